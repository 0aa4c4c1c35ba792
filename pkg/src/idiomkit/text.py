"""Tokenization, lookup-table lemmatization and idiom lexicon ingestion."""

from __future__ import annotations

import io
import unicodedata
from dataclasses import dataclass
from typing import BinaryIO, Iterator, Mapping, Sequence

from .errors import ArityError, DuplicateIdiomError, EncodingError, ParseError


@dataclass(frozen=True)
class Token:
    surface: str

    def __post_init__(self):
        if not self.surface or any(ch.isspace() for ch in self.surface):
            raise ValueError(f"invalid token surface {self.surface!r}")

    @property
    def lower(self) -> str:
        return fold(self.surface)

    def __str__(self):
        return self.surface


def fold(text: str) -> str:
    # str.lower rather than casefold: casefold rewrites "ß" as "ss", which would
    # make canonical forms diverge from dictionary spelling.
    return text.lower()


def _is_punct(ch: str) -> bool:
    return unicodedata.category(ch).startswith("P")


def tokenize(raw: str) -> list[Token]:
    """Split on Unicode whitespace and isolate every punctuation code point.

    >>> [t.surface for t in tokenize("a,b")]
    ['a', ',', 'b']
    """
    tokens = []
    for chunk in raw.split():
        buf = []
        for ch in chunk:
            if _is_punct(ch):
                if buf:
                    tokens.append(Token("".join(buf)))
                    buf = []
                tokens.append(Token(ch))
            else:
                buf.append(ch)
        if buf:
            tokens.append(Token("".join(buf)))
    return tokens


def detokenize(tokens: Sequence[Token]) -> str:
    return " ".join(t.surface for t in tokens)


class LemmaTable:
    """Surface-to-lemma lookup. Absent keys map to themselves."""

    def __init__(self, entries: Mapping[str, str] | None = None):
        self._entries: dict[str, str] = {}
        for surface, lemma in (entries or {}).items():
            if not surface or not lemma:
                raise ValueError("lemma table keys and values must be non-empty")
            self._entries[fold(surface)] = fold(lemma)

    def lookup(self, surface: str) -> str:
        key = fold(surface)
        return self._entries.get(key, key)

    __getitem__ = lookup

    def __len__(self):
        return len(self._entries)

    def __contains__(self, surface):
        return fold(surface) in self._entries

    @property
    def entries(self) -> dict[str, str]:
        return dict(self._entries)


@dataclass(frozen=True)
class Sentence:
    raw: str
    tokens: tuple[Token, ...]
    lemmas: tuple[str, ...]

    def __post_init__(self):
        if len(self.tokens) != len(self.lemmas):
            raise ValueError("tokens and lemmas differ in length")

    def __len__(self):
        return len(self.tokens)

    @property
    def lowered(self) -> list[str]:
        return [t.lower for t in self.tokens]


@dataclass(frozen=True)
class IdiomEntry:
    id: int
    source_canonical: tuple[str, ...]
    source_lemmas: tuple[str, ...]
    target_equivalent: tuple[str, ...]

    def __post_init__(self):
        if len(self.source_canonical) != len(self.source_lemmas):
            raise ValueError("canonical form and lemmas differ in length")
        if len(self.source_canonical) < 2:
            raise ValueError("an idiom needs at least two words")


def read_tsv(source: BinaryIO, columns: int, name: str | None = None) -> Iterator[tuple[int, list[str]]]:
    """Yield ``(line_number, fields)`` for each non-blank line of a UTF-8 TSV stream.

    A single trailing CR is stripped from every line.
    """
    name = name or getattr(source, "name", None)
    for lineno, line in enumerate(source, start=1):
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"invalid UTF-8: {exc.reason}", line=lineno, source=name) from None
        if text.endswith("\n"):
            text = text[:-1]
        if text.endswith("\r"):
            text = text[:-1]
        if not text.strip():
            continue
        fields = text.split("\t")
        if len(fields) != columns:
            raise ParseError(
                f"expected {columns} tab-separated columns, found {len(fields)}",
                line=lineno, source=name,
            )
        yield lineno, fields


def _as_stream(source) -> BinaryIO:
    if isinstance(source, (bytes, bytearray)):
        return io.BytesIO(source)
    return source


def load_lemma_table(source: BinaryIO | bytes) -> LemmaTable:
    """Read ``surface<TAB>lemma`` lines. Later duplicates override earlier ones."""
    entries: dict[str, str] = {}
    stream = _as_stream(source)
    for lineno, (surface, lemma) in read_tsv(stream, 2):
        surface, lemma = surface.strip(), lemma.strip()
        if not surface or not lemma:
            raise ParseError("empty surface or lemma", line=lineno, source=getattr(stream, "name", None))
        entries[fold(surface)] = fold(lemma)
    return LemmaTable(entries)


def lemmatize_sentence(raw: str, table: LemmaTable) -> Sentence:
    tokens = tuple(tokenize(raw))
    return Sentence(raw, tokens, tuple(table.lookup(t.surface) for t in tokens))


def parse_lexicon(source: BinaryIO | bytes, table: LemmaTable) -> list[IdiomEntry]:
    """Read ``idiom<TAB>target equivalent`` lines into entries numbered by line order."""
    stream = _as_stream(source)
    name = getattr(stream, "name", None)
    entries = []
    seen: dict[tuple[str, ...], int] = {}
    for lineno, (idiom, target) in read_tsv(stream, 2):
        canonical = tuple(t.lower for t in tokenize(idiom))
        if len(canonical) < 2:
            raise ArityError(f"idiom {idiom!r} has fewer than two words", line=lineno, source=name)
        if canonical in seen:
            raise DuplicateIdiomError(
                f"idiom {' '.join(canonical)!r} already defined on line {seen[canonical]}",
                line=lineno, source=name,
            )
        equivalent = tuple(t.lower for t in tokenize(target))
        if not equivalent:
            raise ParseError("empty target equivalent", line=lineno, source=name)
        seen[canonical] = lineno
        entries.append(IdiomEntry(
            id=len(entries),
            source_canonical=canonical,
            source_lemmas=tuple(table.lookup(w) for w in canonical),
            target_equivalent=equivalent,
        ))
    return entries
