"""Idiom-annotated corpus construction: extraction, train/test split, tagging, statistics.

Random draws use ``random.Random`` (MT19937) seeded with the caller's integer,
so a split is reproducible from ``(corpus, lexicon, config, seed, test_target)``.
"""

from __future__ import annotations

import logging
import random
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

from .errors import InputError, IntegrityError, ParseError
from .matcher import IdiomMatch, MatchConfig, find_matches
from .text import IdiomEntry, LemmaTable, Sentence, lemmatize_sentence

log = logging.getLogger(__name__)

IDM_TAG = "<idm>"
SECTIONS = ("TRAIN_PLAIN", "TRAIN_IDIOM", "TEST")


@dataclass(frozen=True)
class SentencePair:
    pair_id: int
    source: Sentence
    target: Sentence


@dataclass(frozen=True)
class AnnotatedPair:
    pair: SentencePair
    match: IdiomMatch
    idiom_canonical: tuple[str, ...]
    target_equivalent: tuple[str, ...]

    @property
    def pair_id(self) -> int:
        return self.pair.pair_id

    @property
    def idiom_id(self) -> int:
        return self.match.idiom_id


@dataclass
class CorpusSplit:
    train_plain: list[SentencePair]
    train_idiomatic: list[AnnotatedPair]
    test: list[AnnotatedPair]
    idiom_train_freq: dict[int, int]
    warning: str | None = None

    def check(self) -> None:
        """Raise IntegrityError if disjointness, coverage or frequency bookkeeping fail."""
        ids = [p.pair_id for p in self.train_plain]
        ids += [a.pair_id for a in self.train_idiomatic]
        ids += [a.pair_id for a in self.test]
        if len(ids) != len(set(ids)):
            raise IntegrityError("a pair_id occurs in more than one partition")
        counts: dict[int, int] = {}
        for a in self.train_idiomatic:
            counts[a.idiom_id] = counts.get(a.idiom_id, 0) + 1
        if counts != {k: v for k, v in self.idiom_train_freq.items() if v}:
            raise IntegrityError("idiom_train_freq disagrees with train_idiomatic")
        for a in self.test:
            if counts.get(a.idiom_id, 0) < 1:
                raise IntegrityError(f"test idiom {a.idiom_id} has no training occurrence")


@dataclass(frozen=True)
class SplitStats:
    unique_test_idioms: int
    train_size: int
    idiomatic_train_sentences: int
    test_size: int

    def rows(self) -> list[tuple[str, int]]:
        return [
            ("Number of unique idioms", self.unique_test_idioms),
            ("Training size", self.train_size),
            ("Idiomatic sentences in training data", self.idiomatic_train_sentences),
            ("Test size", self.test_size),
        ]


def read_parallel(src_lines: Sequence[str], tgt_lines: Sequence[str], table: LemmaTable,
                  target_table: LemmaTable | None = None) -> list[SentencePair]:
    if len(src_lines) != len(tgt_lines):
        raise InputError(f"source has {len(src_lines)} lines but target has {len(tgt_lines)}")
    target_table = target_table or LemmaTable()
    return [
        SentencePair(i, lemmatize_sentence(s, table), lemmatize_sentence(t, target_table))
        for i, (s, t) in enumerate(zip(src_lines, tgt_lines))
    ]


def annotate(pair: SentencePair, match: IdiomMatch, idiom: IdiomEntry) -> AnnotatedPair:
    return AnnotatedPair(pair, match, idiom.source_canonical, idiom.target_equivalent)


def choose_match(matches: Sequence[IdiomMatch]) -> IdiomMatch | None:
    """Pick the annotation for a multi-idiom sentence: smallest span, then lowest idiom id."""
    if not matches:
        return None
    return min(matches, key=lambda m: (m.span, m.idiom_id))


def extract_idiomatic_pairs(corpus: Iterable[SentencePair], lexicon: Sequence[IdiomEntry],
                            config: MatchConfig = MatchConfig()):
    """Partition a corpus into per-idiom groups and a residual of idiom-free pairs.

    Returns ``(groups, residual)`` where groups maps idiom id to annotated pairs
    in corpus order.
    """
    by_id = {e.id: e for e in lexicon}
    groups: dict[int, list[AnnotatedPair]] = {}
    residual: list[SentencePair] = []
    for pair in corpus:
        chosen = choose_match(find_matches(pair.source, lexicon, config))
        if chosen is None:
            residual.append(pair)
        else:
            groups.setdefault(chosen.idiom_id, []).append(annotate(pair, chosen, by_id[chosen.idiom_id]))
    return dict(sorted(groups.items())), residual


def build_split(groups: Mapping[int, Sequence[AnnotatedPair]], residual: Sequence[SentencePair],
                test_target: int, seed: int) -> CorpusSplit:
    """Draw the test set round-robin over idioms with at least two sentence pairs.

    Each round visits eligible idioms in id order and moves one uniformly drawn
    pair to the test set, skipping idioms down to a single remaining pair. That
    last pair always stays in training, so every test idiom is also seen there.
    """
    if test_target < 0:
        raise InputError("test_target must be non-negative")
    rng = random.Random(seed)
    pools = {i: list(groups[i]) for i in sorted(groups)}
    eligible = [i for i, pool in pools.items() if len(pool) >= 2]
    achievable = sum(len(pools[i]) - 1 for i in eligible)

    test: list[AnnotatedPair] = []
    while len(test) < test_target:
        drew = False
        for i in eligible:
            if len(test) >= test_target:
                break
            pool = pools[i]
            if len(pool) < 2:
                continue
            test.append(pool.pop(rng.randrange(len(pool))))
            drew = True
        if not drew:
            break

    train_idiomatic = sorted((a for pool in pools.values() for a in pool), key=lambda a: a.pair_id)
    freq: dict[int, int] = {}
    for a in train_idiomatic:
        freq[a.idiom_id] = freq.get(a.idiom_id, 0) + 1

    warning = None
    if test_target > achievable:
        warning = f"requested {test_target} test pairs but only {achievable} are achievable"
        log.warning(warning)
    split = CorpusSplit(
        train_plain=sorted(residual, key=lambda p: p.pair_id),
        train_idiomatic=train_idiomatic,
        test=sorted(test, key=lambda a: a.pair_id),
        idiom_train_freq=freq,
        warning=warning,
    )
    split.check()
    return split


def tag_sources(split: CorpusSplit) -> tuple[list[str], list[str]]:
    """Training source and target lines in pair_id order, idiomatic sources prefixed with ``<idm>``."""
    rows = [(p.pair_id, p.source.raw, p.target.raw) for p in split.train_plain]
    rows += [(a.pair_id, f"{IDM_TAG} {a.pair.source.raw}", a.pair.target.raw) for a in split.train_idiomatic]
    rows.sort()
    return [r[1] for r in rows], [r[2] for r in rows]


def strip_tag(line: str) -> str:
    prefix = IDM_TAG + " "
    return line[len(prefix):] if line.startswith(prefix) else line


def compute_stats(split: CorpusSplit) -> SplitStats:
    return SplitStats(
        unique_test_idioms=len({a.idiom_id for a in split.test}),
        train_size=len(split.train_plain) + len(split.train_idiomatic),
        idiomatic_train_sentences=len(split.train_idiomatic),
        test_size=len(split.test),
    )


# ---------------------------------------------------------------- file formats

@dataclass(frozen=True)
class AnnotationRecord:
    pair_id: int
    idiom_id: int
    idiom_canonical: tuple[str, ...]
    target_equivalent: tuple[str, ...]
    positions: tuple[int, ...]
    assignment: tuple[int, ...] = field(default=())

    @classmethod
    def from_annotated(cls, a: AnnotatedPair) -> "AnnotationRecord":
        return cls(a.pair_id, a.idiom_id, a.idiom_canonical, a.target_equivalent,
                   a.match.positions, a.match.assignment)

    @property
    def match(self) -> IdiomMatch:
        return IdiomMatch(self.idiom_id, self.positions, self.assignment)

    def to_line(self) -> str:
        return "\t".join([
            str(self.pair_id),
            str(self.idiom_id),
            " ".join(self.idiom_canonical),
            " ".join(self.target_equivalent),
            ",".join(map(str, self.positions)),
            ",".join(map(str, self.assignment)),
        ])


def _int_list(text: str) -> tuple[int, ...]:
    return tuple(int(x) for x in text.split(",")) if text else ()


def format_annotations(records: Iterable[AnnotationRecord | AnnotatedPair]) -> str:
    lines = []
    for r in records:
        if isinstance(r, AnnotatedPair):
            r = AnnotationRecord.from_annotated(r)
        lines.append(r.to_line() + "\n")
    return "".join(lines)


def parse_annotations(text: str, source=None) -> list[AnnotationRecord]:
    records = []
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r")
        if not line.strip():
            continue
        fields = line.split("\t")
        if len(fields) != 6:
            raise ParseError(f"expected 6 annotation fields, found {len(fields)}", line=lineno, source=source)
        try:
            rec = AnnotationRecord(
                int(fields[0]), int(fields[1]),
                tuple(fields[2].split()), tuple(fields[3].split()),
                _int_list(fields[4]), _int_list(fields[5]),
            )
        except ValueError as exc:
            raise ParseError(f"bad integer field: {exc}", line=lineno, source=source) from None
        if len(rec.positions) != len(rec.assignment):
            raise ParseError("positions and assignment differ in length", line=lineno, source=source)
        records.append(rec)
    return records


def format_manifest(split: CorpusSplit) -> str:
    parts = []
    sections = (
        ("TRAIN_PLAIN", [p.pair_id for p in split.train_plain]),
        ("TRAIN_IDIOM", [a.pair_id for a in split.train_idiomatic]),
        ("TEST", [a.pair_id for a in split.test]),
    )
    for name, ids in sections:
        parts.append(f"[{name}]\n")
        parts.extend(f"{i}\n" for i in ids)
    return "".join(parts)


def parse_manifest(text: str, source=None) -> dict[str, list[int]]:
    out: dict[str, list[int]] = {}
    current = None
    for lineno, line in enumerate(text.split("\n"), start=1):
        line = line.removesuffix("\r").strip()
        if not line:
            continue
        if line.startswith("[") and line.endswith("]"):
            current = line[1:-1]
            if current not in SECTIONS:
                raise ParseError(f"unknown manifest section {line}", line=lineno, source=source)
            if current in out:
                raise ParseError(f"repeated manifest section {line}", line=lineno, source=source)
            out[current] = []
            continue
        if current is None:
            raise ParseError("pair id before any section header", line=lineno, source=source)
        try:
            out[current].append(int(line))
        except ValueError:
            raise ParseError(f"bad pair id {line!r}", line=lineno, source=source) from None
    for name in SECTIONS:
        out.setdefault(name, [])
    return out


def format_frequencies(split: CorpusSplit) -> str:
    """Training frequency of each idiom occurring in the test set."""
    test_ids = sorted({a.idiom_id for a in split.test})
    return "".join(f"{i}\t{split.idiom_train_freq.get(i, 0)}\n" for i in test_ids)


@dataclass(frozen=True)
class PairRef:
    """A corpus pair known only by its id, for bookkeeping from files."""
    pair_id: int


def split_from_files(sections: Mapping[str, Sequence[int]], records: Iterable[AnnotationRecord]) -> CorpusSplit:
    """Rebuild a CorpusSplit from a manifest and the annotation records covering its idiomatic ids."""
    by_pair = {r.pair_id: r for r in records}
    missing = [i for i in list(sections["TRAIN_IDIOM"]) + list(sections["TEST"]) if i not in by_pair]
    if missing:
        raise InputError(f"no annotation record for pair_id {missing[0]} ({len(missing)} missing)")
    train_idiomatic = [by_pair[i] for i in sections["TRAIN_IDIOM"]]
    freq: dict[int, int] = {}
    for r in train_idiomatic:
        freq[r.idiom_id] = freq.get(r.idiom_id, 0) + 1
    return CorpusSplit(
        train_plain=[PairRef(i) for i in sections["TRAIN_PLAIN"]],
        train_idiomatic=train_idiomatic,
        test=[by_pair[i] for i in sections["TEST"]],
        idiom_train_freq=freq,
    )


def tag_lines(src_lines: Sequence[str], tgt_lines: Sequence[str],
              sections: Mapping[str, Sequence[int]]) -> tuple[list[str], list[str]]:
    """File-level counterpart of tag_sources: select and tag training lines by manifest."""
    idiomatic = set(sections["TRAIN_IDIOM"])
    ids = sorted(set(sections["TRAIN_PLAIN"]) | idiomatic)
    n = min(len(src_lines), len(tgt_lines))
    if ids and ids[-1] >= n:
        raise InputError(f"manifest refers to pair_id {ids[-1]} but the corpus has {n} pairs")
    src = [f"{IDM_TAG} {src_lines[i]}" if i in idiomatic else src_lines[i] for i in ids]
    return src, [tgt_lines[i] for i in ids]
