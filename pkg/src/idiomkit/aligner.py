"""IBM Model 1 word alignment trained with EM.

The model explains every target word ``f_j`` by one source word ``e_i`` or by a
distinguished NULL word.  Alignment positions follow a fixed distribution: uniform
over the ``m + 1`` candidates, or, with the diagonal prior switched on, NULL gets
``null_prob`` and real positions share the rest in proportion to
``exp(-tension * |(i+1)/m - (j+1)/n|)``.  Only the lexical table ``t(f|e)`` is
re-estimated, so each iteration is a proper EM step and the corpus
log-likelihood cannot decrease.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

from .errors import ConfigurationError, IntegrityError, ParseError

NULL = "<NULL>"
UNK = "<UNK>"
UNK_PROB = 1e-7
LL_RTOL = 1e-12


@dataclass(frozen=True)
class AlignerConfig:
    iterations: int = 5
    use_diagonal_prior: bool = False
    tension: float = 4.0
    null_prob: float = 0.08

    def __post_init__(self):
        if self.iterations < 1:
            raise ConfigurationError("iterations must be at least 1")
        if not self.tension > 0:
            raise ConfigurationError("tension must be positive")
        if not 0 < self.null_prob < 1:
            raise ConfigurationError("null_prob must lie strictly between 0 and 1")


class Vocabulary:
    """Word <-> id table. Ids are handed out in first-seen order."""

    def __init__(self, reserved: Iterable[str] = ()):
        self.words: list[str] = []
        self.ids: dict[str, int] = {}
        for w in reserved:
            self.add(w)

    def add(self, word: str) -> int:
        if word not in self.ids:
            self.ids[word] = len(self.words)
            self.words.append(word)
        return self.ids[word]

    def get(self, word: str) -> int:
        return self.ids.get(word, self.ids.get(UNK, -1))

    def __len__(self):
        return len(self.words)


@dataclass
class TranslationTable:
    probs: dict[tuple[int, int], float]  # (target id, source id) -> t(f|e)
    source_vocab: Vocabulary
    target_vocab: Vocabulary
    config: AlignerConfig = field(default_factory=AlignerConfig)
    log_likelihoods: list[float] = field(default_factory=list)

    def prob(self, f: str, e: str) -> float:
        fi = self.target_vocab.ids.get(f)
        ei = self.source_vocab.ids.get(e)
        if fi is None or ei is None:
            return UNK_PROB
        return self.probs.get((fi, ei), UNK_PROB)

    def row_sums(self) -> dict[int, float]:
        sums: dict[int, float] = {}
        for (_, e), p in self.probs.items():
            sums[e] = sums.get(e, 0.0) + p
        return sums


@dataclass(frozen=True)
class AlignmentLinkSet:
    links: frozenset[tuple[int, int]]
    source_len: int
    target_len: int

    def __post_init__(self):
        for i, j in self.links:
            if not (0 <= i < self.source_len and 0 <= j < self.target_len):
                raise IntegrityError(f"link {i}-{j} outside a {self.source_len}x{self.target_len} pair")

    def sorted(self) -> list[tuple[int, int]]:
        return sorted(self.links)

    def __len__(self):
        return len(self.links)


def _words(sentence) -> list[str]:
    if hasattr(sentence, "tokens"):
        return [t.lower for t in sentence.tokens]
    return [w.lower() for w in sentence]


def _sides(pair):
    if hasattr(pair, "source"):
        return _words(pair.source), _words(pair.target)
    src, tgt = pair
    return _words(src), _words(tgt)


def position_weights(m: int, n: int, j: int, config: AlignerConfig) -> list[float]:
    """Prior over [NULL, 0, ..., m-1] for target position j of n."""
    if m == 0:
        return [1.0]
    if not config.use_diagonal_prior:
        return [1.0 / (m + 1)] * (m + 1)
    h = [math.exp(-config.tension * abs((i + 1) / m - (j + 1) / n)) for i in range(m)]
    z = sum(h)
    rest = 1.0 - config.null_prob
    return [config.null_prob] + [rest * x / z for x in h]


def _encode(corpus, src_vocab, tgt_vocab):
    encoded = []
    for pair in corpus:
        src, tgt = _sides(pair)
        encoded.append(([src_vocab.add(w) for w in src], [tgt_vocab.add(w) for w in tgt]))
    return encoded


def initial_table(corpus, config: AlignerConfig = AlignerConfig()) -> TranslationTable:
    """t(f|e) uniform over the target words co-occurring with e (NULL co-occurs with all)."""
    src_vocab = Vocabulary([NULL, UNK])
    tgt_vocab = Vocabulary([UNK])
    encoded = _encode(corpus, src_vocab, tgt_vocab)
    cooc: dict[int, set[int]] = {}
    for src, tgt in encoded:
        for e in [0] + src:
            cooc.setdefault(e, set()).update(tgt)
    probs = {}
    for e in sorted(cooc):
        fs = cooc[e]
        for f in sorted(fs):
            probs[(f, e)] = 1.0 / len(fs)
    return TranslationTable(probs, src_vocab, tgt_vocab, config)


def expected_counts(corpus, table: TranslationTable) -> tuple[dict[tuple[int, int], float], float]:
    """One E-step: expected link counts c(f, e) and the corpus log-likelihood under ``table``."""
    config = table.config
    sv, tv = table.source_vocab, table.target_vocab
    probs = table.probs
    counts: dict[tuple[int, int], float] = {}
    ll = 0.0
    for pair in corpus:
        src, tgt = _sides(pair)
        es = [0] + [sv.get(w) for w in src]
        m, n = len(src), len(tgt)
        for j, word in enumerate(tgt):
            f = tv.get(word)
            w = position_weights(m, n, j, config)
            scores = [w[i] * probs.get((f, e), UNK_PROB) for i, e in enumerate(es)]
            z = sum(scores)
            ll += math.log(z)
            for e, s in zip(es, scores):
                key = (f, e)
                counts[key] = counts.get(key, 0.0) + s / z
    return counts, ll


def maximize(counts: dict[tuple[int, int], float]) -> dict[tuple[int, int], float]:
    totals: dict[int, float] = {}
    for (_, e), c in counts.items():
        totals[e] = totals.get(e, 0.0) + c
    return {(f, e): c / totals[e] for (f, e), c in counts.items()}


def log_likelihood(corpus, table: TranslationTable) -> float:
    return expected_counts(corpus, table)[1]


def train(corpus: Sequence, config: AlignerConfig = AlignerConfig()) -> TranslationTable:
    """Run ``config.iterations`` EM iterations from the uniform table.

    ``log_likelihoods[k]`` is the corpus log-likelihood entering iteration k.
    """
    corpus = list(corpus)
    if not corpus:
        raise ConfigurationError("cannot train an aligner on an empty corpus")
    table = initial_table(corpus, config)
    history = []
    for _ in range(config.iterations):
        counts, ll = expected_counts(corpus, table)
        if history and ll < history[-1] - LL_RTOL * abs(history[-1]):
            raise IntegrityError(f"EM log-likelihood decreased from {history[-1]!r} to {ll!r}")
        history.append(ll)
        table = TranslationTable(maximize(counts), table.source_vocab, table.target_vocab, config, history)
    return table


def viterbi_align(table: TranslationTable, pair) -> AlignmentLinkSet:
    """Link each target word to its best source position.

    Ties go to the lowest source index; NULL is chosen (no link) only when it
    scores strictly higher than every real position.
    """
    src, tgt = _sides(pair)
    sv, tv = table.source_vocab, table.target_vocab
    es = [0] + [sv.get(w) for w in src]
    m, n = len(src), len(tgt)
    links = set()
    for j, word in enumerate(tgt):
        f = tv.get(word)
        w = position_weights(m, n, j, table.config)
        best_i, best = None, -1.0
        for i in range(1, m + 1):
            s = w[i] * table.probs.get((f, es[i]), UNK_PROB)
            if s > best:
                best_i, best = i, s
        if best_i is not None and best >= w[0] * table.probs.get((f, 0), UNK_PROB):
            links.add((best_i - 1, j))
    return AlignmentLinkSet(frozenset(links), m, n)


def reverse_links(links: AlignmentLinkSet) -> AlignmentLinkSet:
    return AlignmentLinkSet(frozenset((j, i) for i, j in links.links), links.target_len, links.source_len)


def symmetrize(forward: AlignmentLinkSet, backward: AlignmentLinkSet, method: str = "intersection") -> AlignmentLinkSet:
    """Combine two link sets over the same (source, target) dimensions."""
    if (forward.source_len, forward.target_len) != (backward.source_len, backward.target_len):
        raise IntegrityError(
            f"cannot symmetrize {forward.source_len}x{forward.target_len} "
            f"with {backward.source_len}x{backward.target_len}"
        )
    if method == "intersection":
        links = forward.links & backward.links
    elif method == "union":
        links = forward.links | backward.links
    else:
        raise ConfigurationError(f"unknown symmetrization method {method!r}")
    return AlignmentLinkSet(links, forward.source_len, forward.target_len)


def align_corpus(corpus: Sequence, config: AlignerConfig = AlignerConfig()) -> list[AlignmentLinkSet]:
    """Train both directions and intersect their Viterbi alignments, pair by pair."""
    corpus = [_sides(p) for p in corpus]
    flipped = [(t, s) for s, t in corpus]
    fwd = train(corpus, config)
    bwd = train(flipped, config)
    return [
        symmetrize(viterbi_align(fwd, p), reverse_links(viterbi_align(bwd, q)))
        for p, q in zip(corpus, flipped)
    ]


def format_pharaoh(links: AlignmentLinkSet) -> str:
    return " ".join(f"{i}-{j}" for i, j in links.sorted())


def parse_pharaoh(line: str, source_len: int | None = None, target_len: int | None = None,
                  lineno: int | None = None) -> AlignmentLinkSet:
    links = set()
    for item in line.split():
        try:
            a, b = item.split("-")
            links.add((int(a), int(b)))
        except ValueError:
            raise ParseError(f"bad alignment link {item!r}", line=lineno) from None
    if any(i < 0 or j < 0 for i, j in links):
        raise ParseError("negative alignment index", line=lineno)
    if source_len is None:
        source_len = max((i for i, _ in links), default=-1) + 1
    if target_len is None:
        target_len = max((j for _, j in links), default=-1) + 1
    return AlignmentLinkSet(frozenset(links), source_len, target_len)
