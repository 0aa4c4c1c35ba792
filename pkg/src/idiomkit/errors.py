"""Exception hierarchy shared by the library and the command line."""


class IdiomKitError(Exception):
    """Base class for every error raised by idiomkit."""


class InputError(IdiomKitError, ValueError):
    """Caller supplied inputs that violate an operation's preconditions."""


class ParseError(InputError):
    """A file could not be parsed. Carries the 1-based line number when known."""

    def __init__(self, message, line=None, source=None):
        self.message = message
        self.line = line
        self.source = source
        super().__init__(self._render())

    def _render(self):
        where = []
        if self.source:
            where.append(str(self.source))
        if self.line is not None:
            where.append(f"line {self.line}")
        if where:
            return f"{':'.join(where)}: {self.message}"
        return self.message


class EncodingError(ParseError):
    pass


class DuplicateIdiomError(ParseError):
    pass


class ArityError(ParseError):
    pass


class ConfigurationError(InputError):
    pass


class IntegrityError(IdiomKitError):
    """Internal consistency was violated (indices out of range, mismatched dimensions)."""
