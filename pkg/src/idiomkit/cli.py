"""Command line front end: ``idiomkit {extract,split,tag,stats,align,score}``.

Exit status is 0 on success, 1 for unreadable or malformed input, 2 when an
internal integrity check fails.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import aligner, corpus, metrics
from .errors import EncodingError, InputError, IntegrityError, ParseError
from .matcher import DEFAULT_MAX_GAP, MatchConfig
from .text import LemmaTable, lemmatize_sentence, load_lemma_table, parse_lexicon, tokenize

log = logging.getLogger("idiomkit")

EXIT_OK, EXIT_INPUT, EXIT_INTEGRITY = 0, 1, 2


# ------------------------------------------------------------------ file io

def read_lines(path) -> list[str]:
    data = Path(path).read_bytes()
    lines = data.split(b"\n")
    if lines and lines[-1] == b"":
        lines.pop()
    out = []
    for lineno, raw in enumerate(lines, start=1):
        try:
            text = raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise EncodingError(f"invalid UTF-8: {exc.reason}", line=lineno, source=path) from None
        out.append(text.removesuffix("\r"))
    return out


def read_text(path) -> str:
    try:
        return Path(path).read_bytes().decode("utf-8")
    except UnicodeDecodeError as exc:
        raise EncodingError(f"invalid UTF-8 at byte {exc.start}", source=path) from None


def write_lines(path, lines) -> None:
    write_text(path, "".join(line + "\n" for line in lines))


def write_text(path, text: str) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)


def _load_annotations(path):
    return corpus.parse_annotations(read_text(path), source=path)


def _load_table(path) -> LemmaTable:
    if path is None:
        return LemmaTable()
    with open(path, "rb") as fh:
        return load_lemma_table(fh)


def _require(args, *names):
    missing = [f"--{n.replace('_', '-')}" for n in names if getattr(args, n) is None]
    if missing:
        raise InputError(f"{args.command} requires {', '.join(missing)}")


def _aligner_config(args) -> aligner.AlignerConfig:
    return aligner.AlignerConfig(iterations=args.iters, use_diagonal_prior=args.diagonal, tension=args.tension)


# ------------------------------------------------------------- subcommands

def cmd_extract(args) -> int:
    _require(args, "src", "tgt", "lexicon", "lemmas", "annotations", "out")
    table = _load_table(args.lemmas)
    with open(args.lexicon, "rb") as fh:
        lexicon = parse_lexicon(fh, table)
    pairs = corpus.read_parallel(read_lines(args.src), read_lines(args.tgt), table)
    config = MatchConfig(max_gap=args.max_gap, allow_reorder=not args.no_reorder)
    groups, residual = corpus.extract_idiomatic_pairs(pairs, lexicon, config)
    records = sorted(
        (corpus.AnnotationRecord.from_annotated(a) for group in groups.values() for a in group),
        key=lambda r: r.pair_id,
    )
    write_text(args.annotations, corpus.format_annotations(records))
    write_lines(args.out, [str(p.pair_id) for p in residual])
    log.info("%d idiomatic pairs over %d idioms, %d residual pairs", len(records), len(groups), len(residual))
    return EXIT_OK


def cmd_split(args) -> int:
    _require(args, "annotations", "manifest", "out", "test_size")
    if args.src is None and args.tgt is None:
        raise InputError("split requires --src or --tgt to count corpus pairs")
    n_pairs = len(read_lines(args.src if args.src is not None else args.tgt))
    records = _load_annotations(args.annotations)
    if records and max(r.pair_id for r in records) >= n_pairs:
        raise InputError(f"{args.annotations}: pair_id beyond the {n_pairs}-line corpus")
    groups: dict[int, list] = {}
    for r in records:
        groups.setdefault(r.idiom_id, []).append(r)
    annotated = {r.pair_id for r in records}
    residual = [corpus.PairRef(i) for i in range(n_pairs) if i not in annotated]

    split = corpus.build_split(groups, residual, args.test_size, args.seed)
    if split.warning:
        print(f"warning: {split.warning}", file=sys.stderr)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_text(args.manifest, corpus.format_manifest(split))
    write_text(out / "train.annotations.tsv", corpus.format_annotations(split.train_idiomatic))
    write_text(out / "test.annotations.tsv", corpus.format_annotations(split.test))
    write_text(out / "idiom_freq.tsv", corpus.format_frequencies(split))
    return EXIT_OK


def cmd_tag(args) -> int:
    _require(args, "src", "tgt", "manifest", "out")
    sections = corpus.parse_manifest(read_text(args.manifest), source=args.manifest)
    src, tgt = corpus.tag_lines(read_lines(args.src), read_lines(args.tgt), sections)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_lines(out / "train.src", src)
    write_lines(out / "train.tgt", tgt)
    return EXIT_OK


def cmd_stats(args) -> int:
    _require(args, "manifest", "annotations")
    sections = corpus.parse_manifest(read_text(args.manifest), source=args.manifest)
    split = corpus.split_from_files(sections, _load_annotations(args.annotations))
    split.check()
    stats = corpus.compute_stats(split)
    width = max(len(label) for label, _ in stats.rows())
    text = "".join(f"{label:<{width}}  {value}\n" for label, value in stats.rows())
    sys.stdout.write(text)
    if args.out is not None:
        write_text(args.out, text)
    if args.figure is not None:
        from .plotting import plot_split

        test_freq: dict[int, int] = {}
        for r in split.test:
            test_freq[r.idiom_id] = test_freq.get(r.idiom_id, 0) + 1
        plot_split(stats, split.idiom_train_freq, test_freq, args.figure)
    return EXIT_OK


def cmd_align(args) -> int:
    _require(args, "src", "tgt", "out")
    src, tgt = read_lines(args.src), read_lines(args.tgt)
    if len(src) != len(tgt):
        raise InputError(f"{args.src} has {len(src)} lines but {args.tgt} has {len(tgt)}")
    pairs = [([t.surface for t in tokenize(s)], [t.surface for t in tokenize(t_)]) for s, t_ in zip(src, tgt)]
    links = aligner.align_corpus(pairs, _aligner_config(args))
    write_lines(args.out, [aligner.format_pharaoh(ls) for ls in links])
    return EXIT_OK


def _read_alignments(path, src_tokens, tgt_tokens):
    lines = read_lines(path)
    if len(lines) != len(src_tokens):
        raise InputError(f"{path} has {len(lines)} lines for {len(src_tokens)} test pairs")
    out = []
    for k, line in enumerate(lines):
        try:
            out.append(aligner.parse_pharaoh(line, len(src_tokens[k]), len(tgt_tokens[k])))
        except (ParseError, IntegrityError) as exc:
            raise ParseError(getattr(exc, "message", str(exc)), line=k + 1, source=path) from None
    return out


def cmd_score(args) -> int:
    _require(args, "annotations", "src", "tgt", "hyp")
    records = _load_annotations(args.annotations)
    src_lines, tgt_lines = read_lines(args.src), read_lines(args.tgt)
    if len(src_lines) != len(tgt_lines):
        raise InputError(f"{args.src} has {len(src_lines)} lines but {args.tgt} has {len(tgt_lines)}")
    hyp_lines = read_lines(args.hyp)
    if len(hyp_lines) != len(records):
        raise InputError(f"{args.hyp} has {len(hyp_lines)} lines for {len(records)} annotated test pairs")

    empty = LemmaTable()
    test_set = []
    for r in records:
        if r.pair_id >= len(src_lines):
            raise InputError(f"{args.annotations}: pair_id {r.pair_id} beyond the {len(src_lines)}-line corpus")
        pair = corpus.SentencePair(r.pair_id, lemmatize_sentence(src_lines[r.pair_id], empty),
                                   lemmatize_sentence(tgt_lines[r.pair_id], empty))
        if r.positions and r.positions[-1] >= len(pair.source):
            raise InputError(f"{args.annotations}: positions of pair {r.pair_id} exceed its source length")
        test_set.append(corpus.AnnotatedPair(pair, r.match, r.idiom_canonical, r.target_equivalent))

    src_tok = [[t.surface for t in a.pair.source.tokens] for a in test_set]
    ref_tok = [[t.surface for t in a.pair.target.tokens] for a in test_set]
    hyp_tok = [[t.surface for t in tokenize(h)] for h in hyp_lines]

    hyp_links = ref_links = None
    if args.alignments is not None:
        hyp_links = _read_alignments(args.alignments, src_tok, hyp_tok)
    if args.ref_alignments is not None:
        ref_links = _read_alignments(args.ref_alignments, src_tok, ref_tok)
    if hyp_links is None or ref_links is None:
        # one model over source-hypothesis and source-reference pairs
        n = len(test_set)
        joint = aligner.align_corpus(list(zip(src_tok, hyp_tok)) + list(zip(src_tok, ref_tok)),
                                     _aligner_config(args))
        hyp_links = hyp_links if hyp_links is not None else joint[:n]
        ref_links = ref_links if ref_links is not None else joint[n:]

    lexicon = None
    if args.lexicon is not None:
        with open(args.lexicon, "rb") as fh:
            lexicon = parse_lexicon(fh, _load_table(args.lemmas))
    report = metrics.score_corpus(test_set, hyp_tok, hyp_links, ref_links, lexicon=lexicon)
    text = report.format(summary_only=args.summary_only)
    if args.out is None:
        sys.stdout.write(text)
    else:
        write_text(args.out, text)
    if args.figure is not None:
        from .plotting import plot_scores

        plot_scores(report, args.figure)
    return EXIT_OK


COMMANDS = {
    "extract": (cmd_extract, "find idiom occurrences; write annotations (--annotations) and residual pair ids (--out)"),
    "split": (cmd_split, "build train/test split; write --manifest and annotation files into directory --out"),
    "tag": (cmd_tag, "write <idm>-tagged training corpus (train.src, train.tgt) into directory --out"),
    "stats": (cmd_stats, "print the four split statistics from --manifest and --annotations"),
    "align": (cmd_align, "train Model 1 both ways on --src/--tgt and write intersected Pharaoh links to --out"),
    "score": (cmd_score, "score --hyp against the annotated test set; report to --out or stdout"),
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    files = common.add_argument_group("files (UTF-8, LF)")
    files.add_argument("--src", help="source side, one sentence per line")
    files.add_argument("--tgt", help="target side, line-aligned with --src")
    files.add_argument("--lexicon", help="idiom lexicon TSV: idiom<TAB>target equivalent")
    files.add_argument("--lemmas", help="lemma table TSV: surface<TAB>lemma")
    files.add_argument("--annotations", help="annotation file (tab-separated records)")
    files.add_argument("--manifest", help="split manifest with [TRAIN_PLAIN] [TRAIN_IDIOM] [TEST]")
    files.add_argument("--out", help="output file or directory, depending on the subcommand")
    files.add_argument("--hyp", help="score: hypotheses, one per annotated test pair in file order")
    files.add_argument("--alignments", help="score: Pharaoh links source->hypothesis (default: trained here)")
    files.add_argument("--ref-alignments", help="score: Pharaoh links source->reference (default: trained here)")
    files.add_argument("--figure", help="stats/score: also render a figure to this path (.png, .pdf, .svg)")

    opts = common.add_argument_group("options")
    opts.add_argument("--max-gap", type=_non_negative, default=DEFAULT_MAX_GAP,
                      help="max tokens between consecutive idiom words (default: %(default)s)")
    opts.add_argument("--no-reorder", action="store_true", help="require idiom words in dictionary order (default: reordering allowed)")
    opts.add_argument("--seed", type=int, default=0, help="split sampling seed (default: %(default)s)")
    opts.add_argument("--test-size", type=_non_negative, help="number of test pairs to draw")
    opts.add_argument("--iters", type=_positive_int, default=5, help="EM iterations (default: %(default)s)")
    opts.add_argument("--diagonal", action="store_true", help="use the diagonal position prior (default: off)")
    opts.add_argument("--tension", type=_positive_float, default=4.0,
                      help="diagonal prior sharpness (default: %(default)s)")
    opts.add_argument("--summary-only", action="store_true", help="score: omit per-pair lines (default: off)")
    opts.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")

    parser = argparse.ArgumentParser(prog="idiomkit", description="Idiom-annotated parallel corpora and idiom translation metrics.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")
    for name, (_, help_text) in COMMANDS.items():
        sub.add_parser(name, parents=[common], help=help_text, description=help_text)
    return parser


def _non_negative(text):
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError("must be >= 0")
    return value


def _positive_int(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return value


def _positive_float(text):
    value = float(text)
    if not value > 0:
        raise argparse.ArgumentTypeError("must be > 0")
    return value


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s", stream=sys.stderr)
    handler = COMMANDS[args.command][0]
    try:
        return handler(args)
    except IntegrityError as exc:
        print(f"idiomkit {args.command}: integrity error: {exc}", file=sys.stderr)
        return EXIT_INTEGRITY
    except (InputError, ValueError) as exc:
        print(f"idiomkit {args.command}: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except OSError as exc:
        where = exc.filename or ""
        print(f"idiomkit {args.command}: {where}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
