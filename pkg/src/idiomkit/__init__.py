"""Idiom-annotated parallel corpus construction and idiom translation metrics."""

from .aligner import AlignerConfig, AlignmentLinkSet, TranslationTable, symmetrize, train, viterbi_align
from .corpus import (
    AnnotatedPair,
    CorpusSplit,
    SentencePair,
    SplitStats,
    build_split,
    compute_stats,
    extract_idiomatic_pairs,
    tag_sources,
)
from .errors import IdiomKitError, InputError, IntegrityError, ParseError
from .matcher import IdiomMatch, MatchConfig, find_matches, match_span_text
from .metrics import (
    IdiomReferencePair,
    MetricReport,
    WiaccBreakdown,
    corpus_bleu,
    extract_idiom_translation,
    modified_unigram_precision,
    score_corpus,
    word_level_idiom_accuracy,
)
from .text import IdiomEntry, LemmaTable, Sentence, Token, lemmatize_sentence, load_lemma_table, parse_lexicon, tokenize

__version__ = "0.1.0"

__all__ = [
    "AlignerConfig",
    "AlignmentLinkSet",
    "AnnotatedPair",
    "CorpusSplit",
    "IdiomEntry",
    "IdiomKitError",
    "IdiomMatch",
    "IdiomReferencePair",
    "InputError",
    "IntegrityError",
    "LemmaTable",
    "MatchConfig",
    "MetricReport",
    "ParseError",
    "Sentence",
    "SentencePair",
    "SplitStats",
    "Token",
    "TranslationTable",
    "WiaccBreakdown",
    "build_split",
    "compute_stats",
    "corpus_bleu",
    "extract_idiom_translation",
    "extract_idiomatic_pairs",
    "find_matches",
    "lemmatize_sentence",
    "load_lemma_table",
    "match_span_text",
    "modified_unigram_precision",
    "parse_lexicon",
    "score_corpus",
    "symmetrize",
    "tag_sources",
    "tokenize",
    "train",
    "viterbi_align",
    "word_level_idiom_accuracy",
]
