"""Corpus BLEU plus two measures localised to the idiom's translation.

The idiom-localised measures look only at the hypothesis words aligned to the
source idiom positions:

* modified unigram precision, clipped against the dictionary equivalent and
  against the reference words aligned to the idiom, keeping the better of the two;
* word-level idiom accuracy ``(H - I) / N`` with H the clipped overlap with the
  gold idiom translation, I the remaining extracted words and N the gold length.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .errors import InputError, IntegrityError


def _fold(tokens):
    return [t.lower() for t in tokens]


def ngram_counts(tokens: Sequence[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu_statistics(hypotheses, references, max_order=4):
    """Summed clipped matches and totals per order, plus hypothesis and reference lengths."""
    if len(hypotheses) != len(references):
        raise InputError(f"{len(hypotheses)} hypotheses but {len(references)} references")
    if not hypotheses:
        raise InputError("BLEU needs at least one sentence")
    matches = [0] * max_order
    totals = [0] * max_order
    hyp_len = ref_len = 0
    for hyp, ref in zip(hypotheses, references):
        hyp, ref = _fold(hyp), _fold(ref)
        hyp_len += len(hyp)
        ref_len += len(ref)
        for n in range(1, max_order + 1):
            h = ngram_counts(hyp, n)
            r = ngram_counts(ref, n)
            matches[n - 1] += sum(min(c, r[g]) for g, c in h.items())
            totals[n - 1] += max(len(hyp) - n + 1, 0)
    return matches, totals, hyp_len, ref_len


def corpus_bleu(hypotheses, references, max_order: int = 4) -> float:
    matches, totals, c, r = bleu_statistics(hypotheses, references, max_order)
    if c == 0 or any(m == 0 for m in matches):
        return 0.0
    log_p = sum(math.log(m / t) for m, t in zip(matches, totals)) / max_order
    bp = math.exp(min(0.0, 1.0 - r / c))
    return bp * math.exp(log_p)


@dataclass(frozen=True)
class WiaccBreakdown:
    H: int
    I: int
    N: int

    def __post_init__(self):
        if self.N < 1:
            raise InputError("gold idiom translation must be non-empty")
        if not 0 <= self.H <= self.N or self.I < 0:
            raise IntegrityError(f"inconsistent breakdown H={self.H} I={self.I} N={self.N}")

    @property
    def value(self) -> Fraction:
        # exact rational so that value * N + I - H == 0 holds without rounding
        return Fraction(self.H - self.I, self.N)


@dataclass(frozen=True)
class IdiomReferencePair:
    standalone: tuple[str, ...]
    in_context: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.standalone:
            raise InputError("standalone idiom reference must be non-empty")


def extract_idiom_translation(hypothesis: Sequence[str], positions: Sequence[int], links) -> list[str]:
    """Hypothesis tokens linked to any idiom position, in hypothesis order.

    ``links`` is an iterable of ``(source_index, target_index)`` or an AlignmentLinkSet.
    """
    pos = set(positions)
    pairs = getattr(links, "links", links)
    chosen = set()
    for i, j in pairs:
        if not 0 <= j < len(hypothesis):
            raise IntegrityError(f"alignment target index {j} outside hypothesis of {len(hypothesis)} tokens")
        if i in pos:
            chosen.add(j)
    return [hypothesis[j] for j in sorted(chosen)]


def clipped_overlap(candidate: Sequence[str], reference: Sequence[str]) -> int:
    ref = Counter(_fold(reference))
    return sum(min(c, ref[w]) for w, c in Counter(_fold(candidate)).items())


def modified_unigram_precision(extracted: Sequence[str], refs: IdiomReferencePair) -> float:
    if not extracted:
        return 0.0
    best = max(clipped_overlap(extracted, refs.standalone), clipped_overlap(extracted, refs.in_context))
    return best / len(extracted)


def word_level_idiom_accuracy(extracted: Sequence[str], gold: Sequence[str]) -> WiaccBreakdown:
    if not gold:
        raise InputError("gold idiom translation must be non-empty")
    hits = clipped_overlap(extracted, gold)
    return WiaccBreakdown(H=hits, I=len(extracted) - hits, N=len(gold))


@dataclass(frozen=True)
class SentenceScore:
    pair_id: int
    precision: float
    wiacc: WiaccBreakdown


@dataclass(frozen=True)
class MetricReport:
    corpus_bleu: float
    mean_unigram_precision: float
    mean_wiacc: float
    per_sentence: tuple[SentenceScore, ...]

    def format(self, summary_only: bool = False) -> str:
        lines = [
            f"BLEU\t{self.corpus_bleu:.6f}",
            f"Unigram Precision\t{self.mean_unigram_precision:.6f}",
            f"Word-level Accuracy\t{self.mean_wiacc:.6f}",
        ]
        if not summary_only:
            lines.append("")
            lines.append("pair_id\tprecision\tH\tI\tN\twiacc")
            for s in self.per_sentence:
                w = s.wiacc
                lines.append(f"{s.pair_id}\t{s.precision:.6f}\t{w.H}\t{w.I}\t{w.N}\t{float(w.value):.6f}")
        return "\n".join(lines) + "\n"


def score_corpus(test_set, hypotheses, alignments, reference_alignments=None, lexicon=None) -> MetricReport:
    """Score hypotheses for an annotated test set.

    ``test_set`` holds AnnotatedPair-like items exposing ``pair_id``,
    ``match.positions``, ``target_equivalent`` and ``pair.target`` (reference).
    ``alignments[k]`` links the k-th source sentence to the k-th hypothesis;
    ``reference_alignments[k]`` links it to its reference and supplies the
    in-context idiom reference. Without reference alignments only the dictionary
    equivalent serves as reference. ``lexicon``, when given, overrides each
    item's target equivalent by idiom id.

    The word-level accuracy gold is the in-context reference when alignment
    found one, the dictionary equivalent otherwise.
    """
    n = len(test_set)
    if len(hypotheses) != n or len(alignments) != n:
        raise InputError(f"{n} test pairs, {len(hypotheses)} hypotheses, {len(alignments)} alignments")
    if reference_alignments is not None and len(reference_alignments) != n:
        raise InputError(f"{n} test pairs but {len(reference_alignments)} reference alignments")
    if n == 0:
        raise InputError("empty test set")
    by_id = {e.id: e for e in lexicon} if lexicon is not None else {}

    scores = []
    references = []
    for k, item in enumerate(test_set):
        hyp = _fold(hypotheses[k])
        ref = [t.lower for t in item.pair.target.tokens]
        references.append(ref)
        positions = item.match.positions
        entry = by_id.get(item.match.idiom_id)
        standalone = tuple(entry.target_equivalent if entry else item.target_equivalent)
        in_context = ()
        if reference_alignments is not None:
            in_context = tuple(extract_idiom_translation(ref, positions, reference_alignments[k]))
        refs = IdiomReferencePair(_fold(standalone), in_context)
        extracted = extract_idiom_translation(hyp, positions, alignments[k])
        gold = refs.in_context or refs.standalone
        scores.append(SentenceScore(
            item.pair_id,
            modified_unigram_precision(extracted, refs),
            word_level_idiom_accuracy(extracted, gold),
        ))
    bleu = corpus_bleu([_fold(h) for h in hypotheses], references)
    return MetricReport(
        corpus_bleu=bleu,
        mean_unigram_precision=math.fsum(s.precision for s in scores) / n,
        mean_wiacc=float(sum(s.wiacc.value for s in scores) / n),
        per_sentence=tuple(scores),
    )
