"""Gap-bounded, reorder-tolerant matching of lexicon idioms against lemmatized sentences.

A match assigns every idiom lemma to a distinct sentence position holding the
same lemma. Positions, read left to right, may be separated by at most
``max_gap`` other tokens. When reordering is off, the idiom lemmas must appear
in dictionary order.
"""

from __future__ import annotations

from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import IntegrityError
from .text import IdiomEntry, Sentence, Token

DEFAULT_MAX_GAP = 3


@dataclass(frozen=True)
class MatchConfig:
    max_gap: int = DEFAULT_MAX_GAP
    allow_reorder: bool = True

    def __post_init__(self):
        if self.max_gap < 0:
            raise ValueError("max_gap must be non-negative")


@dataclass(frozen=True)
class IdiomMatch:
    idiom_id: int
    positions: tuple[int, ...]
    # assignment[k] is the index into the idiom's lemmas realised at positions[k]
    assignment: tuple[int, ...] = field(default=())

    @property
    def span(self) -> int:
        return self.positions[-1] - self.positions[0] if self.positions else 0

    def sort_key(self):
        return (self.span, self.positions[0] if self.positions else 0, self.positions)


def assign_slots(slot_lemmas: Sequence[str], idiom_lemmas: Sequence[str]) -> tuple[int, ...]:
    """Map each slot to the lowest unused idiom index carrying the same lemma."""
    free: dict[str, list[int]] = {}
    for i, lemma in enumerate(idiom_lemmas):
        free.setdefault(lemma, []).append(i)
    for stack in free.values():
        stack.reverse()
    return tuple(free[lemma].pop() for lemma in slot_lemmas)


def _candidate_sets(lemmas, idiom_lemmas, config):
    """Yield every strictly increasing position tuple realising the idiom."""
    k = len(idiom_lemmas)
    n = len(lemmas)
    need = Counter(idiom_lemmas)
    step = config.max_gap + 1

    if config.allow_reorder:
        def extend(chosen, remaining):
            if len(chosen) == k:
                yield tuple(chosen)
                return
            last = chosen[-1]
            for q in range(last + 1, min(n, last + 1 + step)):
                lemma = lemmas[q]
                if remaining[lemma] > 0:
                    remaining[lemma] -= 1
                    chosen.append(q)
                    yield from extend(chosen, remaining)
                    chosen.pop()
                    remaining[lemma] += 1

        for p in range(n):
            if need[lemmas[p]] > 0:
                remaining = Counter(need)
                remaining[lemmas[p]] -= 1
                yield from extend([p], remaining)
    else:
        def extend_ordered(chosen):
            if len(chosen) == k:
                yield tuple(chosen)
                return
            target = idiom_lemmas[len(chosen)]
            last = chosen[-1]
            for q in range(last + 1, min(n, last + 1 + step)):
                if lemmas[q] == target:
                    chosen.append(q)
                    yield from extend_ordered(chosen)
                    chosen.pop()

        for p in range(n):
            if lemmas[p] == idiom_lemmas[0]:
                yield from extend_ordered([p])


def match_idiom(sentence: Sentence, idiom: IdiomEntry, config: MatchConfig = MatchConfig()) -> IdiomMatch | None:
    """Return the canonical match of one idiom, or None.

    Among all realisations the one with the smallest span wins, then the
    leftmost start, then the lexicographically smallest position tuple.
    """
    lemmas = sentence.lemmas
    if not set(idiom.source_lemmas).issubset(lemmas):
        return None
    best = None
    best_key = None
    for positions in _candidate_sets(lemmas, idiom.source_lemmas, config):
        key = (positions[-1] - positions[0], positions[0], positions)
        if best_key is None or key < best_key:
            best, best_key = positions, key
    if best is None:
        return None
    assignment = assign_slots([lemmas[p] for p in best], idiom.source_lemmas)
    return IdiomMatch(idiom.id, best, assignment)


def find_matches(sentence: Sentence, lexicon: Iterable[IdiomEntry], config: MatchConfig = MatchConfig()) -> list[IdiomMatch]:
    """All idioms of the lexicon found in the sentence, one canonical match each, by idiom id."""
    present = set(sentence.lemmas)
    found = []
    for idiom in lexicon:
        if not present.issuperset(idiom.source_lemmas):
            continue
        m = match_idiom(sentence, idiom, config)
        if m is not None:
            found.append(m)
    found.sort(key=lambda m: m.idiom_id)
    return found


def validate_match(match: IdiomMatch, sentence: Sentence, idiom: IdiomEntry, config: MatchConfig) -> None:
    """Raise IntegrityError unless the match satisfies every structural constraint."""
    pos = match.positions
    k = len(idiom.source_lemmas)
    if len(pos) != k or len(match.assignment) != k:
        raise IntegrityError("match arity differs from idiom length")
    if any(q <= p for p, q in zip(pos, pos[1:])):
        raise IntegrityError("positions are not strictly increasing")
    if pos and (pos[0] < 0 or pos[-1] >= len(sentence)):
        raise IntegrityError("position out of sentence range")
    if sorted(match.assignment) != list(range(k)):
        raise IntegrityError("assignment is not a permutation")
    if any(q - p - 1 > config.max_gap for p, q in zip(pos, pos[1:])):
        raise IntegrityError("gap exceeds max_gap")
    if not config.allow_reorder and tuple(match.assignment) != tuple(range(k)):
        raise IntegrityError("reordered match while reordering is disabled")
    for p, a in zip(pos, match.assignment):
        if sentence.lemmas[p] != idiom.source_lemmas[a]:
            raise IntegrityError(f"lemma mismatch at position {p}")


def match_span_text(sentence: Sentence, match: IdiomMatch) -> list[Token]:
    n = len(sentence.tokens)
    for p in match.positions:
        if not 0 <= p < n:
            raise IntegrityError(f"match position {p} outside sentence of {n} tokens")
    return [sentence.tokens[p] for p in sorted(match.positions)]
