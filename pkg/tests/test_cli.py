import subprocess
import sys
from pathlib import Path

import pytest

from idiomkit.cli import main
from idiomkit.corpus import parse_annotations, parse_manifest
from idiomkit.text import tokenize

FIXTURES = Path(__file__).parent / "fixtures"


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def tables(tmp_path):
    """The German example pairs plus two idiom-free pairs, as corpus files."""
    src = (FIXTURES / "examples_de.src").read_text(encoding="utf-8") + "Das ist ein Satz.\nNoch ein Satz.\n"
    tgt = (FIXTURES / "examples_en.tgt").read_text(encoding="utf-8") + "This is a sentence.\nAnother sentence.\n"
    (tmp_path / "c.src").write_text(src, encoding="utf-8")
    (tmp_path / "c.tgt").write_text(tgt, encoding="utf-8")
    return tmp_path


def extract(d):
    return run("extract", "--src", d / "c.src", "--tgt", d / "c.tgt", "--lexicon", FIXTURES / "de_idioms.tsv",
               "--lemmas", FIXTURES / "de_lemmas.tsv", "--annotations", d / "ann.tsv", "--out", d / "residual.txt")


def test_extract_writes_annotations_and_residual(tables):
    assert extract(tables) == 0
    records = parse_annotations((tables / "ann.tsv").read_text(encoding="utf-8"))
    assert [(r.pair_id, r.idiom_id, r.positions) for r in records] == [
        (0, 0, (5, 7, 8, 9, 10)), (1, 1, (1, 4, 5, 6)), (2, 1, (6, 8, 9, 10)),
        (3, 2, (3, 4, 5)), (4, 3, (9, 10, 11, 12)), (5, 4, (12, 14, 15, 17)),
    ]
    assert (tables / "residual.txt").read_text() == "6\n7\n"


def test_split_tag_stats_pipeline(tables, capsys):
    assert extract(tables) == 0
    assert run("split", "--annotations", tables / "ann.tsv", "--src", tables / "c.src",
               "--manifest", tables / "manifest.txt", "--out", tables / "split", "--test-size", "1", "--seed", "7") == 0
    sections = parse_manifest((tables / "manifest.txt").read_text())
    assert len(sections["TEST"]) == 1 and sections["TEST"][0] in (1, 2)
    assert sorted(sections["TRAIN_PLAIN"]) == [6, 7]
    test_ann = parse_annotations((tables / "split" / "test.annotations.tsv").read_text(encoding="utf-8"))
    assert [r.pair_id for r in test_ann] == sections["TEST"]
    assert (tables / "split" / "idiom_freq.tsv").read_text() == "1\t1\n"

    assert run("tag", "--src", tables / "c.src", "--tgt", tables / "c.tgt", "--manifest", tables / "manifest.txt",
               "--out", tables / "tagged") == 0
    tagged = (tables / "tagged" / "train.src").read_text(encoding="utf-8").splitlines()
    assert len(tagged) == 7
    assert sum(line.startswith("<idm> ") for line in tagged) == 5
    assert tagged[-1] == "Noch ein Satz."

    capsys.readouterr()
    assert run("stats", "--manifest", tables / "manifest.txt", "--annotations", tables / "ann.tsv") == 0
    out = capsys.readouterr().out.splitlines()
    assert [line.split("  ")[0].strip() for line in out] == [
        "Number of unique idioms", "Training size", "Idiomatic sentences in training data", "Test size"]
    assert [int(line.split()[-1]) for line in out] == [1, 7, 5, 1]


def test_split_short_of_target_warns_but_succeeds(tables, capsys):
    extract(tables)
    assert run("split", "--annotations", tables / "ann.tsv", "--src", tables / "c.src",
               "--manifest", tables / "m.txt", "--out", tables / "s", "--test-size", "50") == 0
    assert "warning" in capsys.readouterr().err


def test_split_is_byte_identical(tables):
    extract(tables)
    outputs = []
    for name in ("a", "b"):
        assert run("split", "--annotations", tables / "ann.tsv", "--src", tables / "c.src",
                   "--manifest", tables / f"{name}.manifest", "--out", tables / name, "--test-size", "1",
                   "--seed", "7") == 0
        outputs.append([(tables / f"{name}.manifest").read_bytes()]
                       + [(tables / name / f).read_bytes() for f in ("train.annotations.tsv", "test.annotations.tsv")])
    assert outputs[0] == outputs[1]


def test_align_writes_pharaoh(tmp_path):
    (tmp_path / "s").write_text("a b\nb c\nc d\nd a\na c\nb d\n")
    (tmp_path / "t").write_text("x y\ny z\nz w\nw x\nx z\ny w\n")
    assert run("align", "--src", tmp_path / "s", "--tgt", tmp_path / "t", "--out", tmp_path / "a", "--iters", "10") == 0
    assert (tmp_path / "a").read_text().splitlines() == ["0-0 1-1"] * 6
    assert run("align", "--src", tmp_path / "s", "--tgt", tmp_path / "t", "--out", tmp_path / "b",
               "--diagonal", "--tension", "2") == 0


def test_score_perfect_hypotheses(tables, capsys):
    extract(tables)
    records = parse_annotations((tables / "ann.tsv").read_text(encoding="utf-8"))
    refs = (tables / "c.tgt").read_text(encoding="utf-8").splitlines()
    srcs = (tables / "c.src").read_text(encoding="utf-8").splitlines()
    (tables / "hyp.txt").write_text("".join(refs[r.pair_id] + "\n" for r in records), encoding="utf-8")
    # monotone alignment covering every source position, shared by hypothesis and reference
    lines = []
    for r in records:
        m, n = len(tokenize(srcs[r.pair_id])), len(tokenize(refs[r.pair_id]))
        lines.append(" ".join(f"{i}-{i * n // m}" for i in range(m)))
    (tables / "perfect.al").write_text("".join(line + "\n" for line in lines))
    capsys.readouterr()
    assert run("score", "--annotations", tables / "ann.tsv", "--src", tables / "c.src", "--tgt", tables / "c.tgt",
               "--hyp", tables / "hyp.txt", "--alignments", tables / "perfect.al",
               "--ref-alignments", tables / "perfect.al", "--summary-only") == 0
    out = capsys.readouterr().out
    assert out == "BLEU\t1.000000\nUnigram Precision\t1.000000\nWord-level Accuracy\t1.000000\n"


def test_score_with_given_alignments(tmp_path):
    (tmp_path / "c.src").write_text("es steckt noch in den kinderschuhen\n")
    (tmp_path / "c.tgt").write_text("it is still in its infancy\n")
    (tmp_path / "ann.tsv").write_text("0\t1\tin den kinderschuhen stecken\tto be in the fledgling stage\t1,3,4,5\t3,0,1,2\n")
    (tmp_path / "hyp").write_text("it is still in the children's shoes\n")
    (tmp_path / "hyp.al").write_text("0-0 1-1 2-2 3-3 4-4 5-5 5-6 5-7\n")
    (tmp_path / "ref.al").write_text("0-0 1-1 2-2 3-3 4-4 5-5\n")
    assert run("score", "--annotations", tmp_path / "ann.tsv", "--src", tmp_path / "c.src", "--tgt",
               tmp_path / "c.tgt", "--hyp", tmp_path / "hyp", "--alignments", tmp_path / "hyp.al",
               "--ref-alignments", tmp_path / "ref.al", "--out", tmp_path / "report.txt") == 0
    lines = (tmp_path / "report.txt").read_text().splitlines()
    # hypothesis tokens: it is still in the children ' s shoes; idiom positions 1,3,4,5 link to 1,3,4,5,6,7
    # extracted [is, in, the, children, ', s] vs in-context gold [is, in, its, infancy]: H=2, I=4, N=4
    assert lines[-1] == "0\t0.333333\t2\t4\t4\t-0.500000"


def test_score_rejects_out_of_range_alignment(tmp_path, capsys):
    (tmp_path / "c.src").write_text("a b\n")
    (tmp_path / "c.tgt").write_text("x y\n")
    (tmp_path / "ann.tsv").write_text("0\t0\ta b\tx y\t0,1\t0,1\n")
    (tmp_path / "hyp").write_text("x y\n")
    (tmp_path / "al").write_text("0-9\n")
    code = run("score", "--annotations", tmp_path / "ann.tsv", "--src", tmp_path / "c.src", "--tgt",
               tmp_path / "c.tgt", "--hyp", tmp_path / "hyp", "--alignments", tmp_path / "al")
    assert code == 1
    err = capsys.readouterr().err
    assert "line 1" in err and str(tmp_path / "al") in err


def test_malformed_lexicon_exit_1_with_line(tables, capsys, tmp_path):
    bad = tmp_path / "bad.tsv"
    bad.write_text("auf biegen und brechen\tby hook or crook\nhals\tneck\n", encoding="utf-8")
    code = run("extract", "--src", tables / "c.src", "--tgt", tables / "c.tgt", "--lexicon", bad,
               "--lemmas", FIXTURES / "de_lemmas.tsv", "--annotations", tmp_path / "a", "--out", tmp_path / "r")
    assert code == 1
    err = capsys.readouterr().err
    assert "line 2" in err and "bad.tsv" in err


def test_missing_file_exit_1(tmp_path, capsys):
    assert run("stats", "--manifest", tmp_path / "nope", "--annotations", tmp_path / "nope2") == 1
    assert capsys.readouterr().out == ""


def test_missing_required_flag_exit_1(capsys):
    assert run("align", "--src", "x") == 1
    assert "--tgt" in capsys.readouterr().err


def test_invalid_utf8_corpus_exit_1(tmp_path, capsys):
    (tmp_path / "s").write_bytes(b"ok\n\xff\n")
    (tmp_path / "t").write_text("ok\nok\n")
    assert run("align", "--src", tmp_path / "s", "--tgt", tmp_path / "t", "--out", tmp_path / "o") == 1
    assert "line 2" in capsys.readouterr().err


def test_integrity_error_exit_2(tmp_path, capsys):
    # test pair whose idiom never occurs in training violates coverage
    (tmp_path / "m").write_text("[TRAIN_PLAIN]\n0\n[TRAIN_IDIOM]\n[TEST]\n1\n")
    (tmp_path / "a").write_text("1\t0\ta b\tx\t0,1\t0,1\n")
    assert run("stats", "--manifest", tmp_path / "m", "--annotations", tmp_path / "a") == 2
    assert "integrity" in capsys.readouterr().err


def test_bad_option_value_exit_1():
    assert run("extract", "--max-gap", "-1") == 1


def test_help_lists_defaults(capsys):
    assert run("split", "--help") == 0
    text = " ".join(capsys.readouterr().out.split())
    for fragment in ("default: 3", "default: 0", "default: 5", "default: 4.0"):
        assert fragment in text


def test_inputs_not_mutated(tables):
    before = {p.name: p.read_bytes() for p in tables.iterdir() if p.is_file()}
    extract(tables)
    after = {p.name: p.read_bytes() for p in tables.iterdir() if p.name in before}
    assert before == after


def test_module_entry_point(tmp_path):
    result = subprocess.run([sys.executable, "-m", "idiomkit", "--help"], capture_output=True, text=True)
    assert result.returncode == 0
    assert "extract" in result.stdout and result.stderr == ""


def test_figures_rendered(tables):
    extract(tables)
    run("split", "--annotations", tables / "ann.tsv", "--src", tables / "c.src",
        "--manifest", tables / "m.txt", "--out", tables / "s", "--test-size", "1")
    assert run("stats", "--manifest", tables / "m.txt", "--annotations", tables / "ann.tsv",
               "--figure", tables / "split.png") == 0
    assert (tables / "split.png").read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    records = parse_annotations((tables / "ann.tsv").read_text(encoding="utf-8"))
    (tables / "hyp").write_text("".join("it is still in its infancy\n" for _ in records))
    assert run("score", "--annotations", tables / "ann.tsv", "--src", tables / "c.src", "--tgt", tables / "c.tgt",
               "--hyp", tables / "hyp", "--out", tables / "r.txt", "--figure", tables / "scores.svg") == 0
    assert b"<svg" in (tables / "scores.svg").read_bytes()[:500]


def test_align_and_score_are_idempotent(tables):
    extract(tables)
    records = parse_annotations((tables / "ann.tsv").read_text(encoding="utf-8"))
    (tables / "hyp").write_text("".join("it is still in its infancy\n" for _ in records))
    outputs = []
    for k in range(2):
        assert run("align", "--src", tables / "c.src", "--tgt", tables / "c.tgt", "--out", tables / f"al{k}") == 0
        assert run("score", "--annotations", tables / "ann.tsv", "--src", tables / "c.src", "--tgt",
                   tables / "c.tgt", "--hyp", tables / "hyp", "--out", tables / f"rep{k}") == 0
        outputs.append(((tables / f"al{k}").read_bytes(), (tables / f"rep{k}").read_bytes()))
    assert outputs[0] == outputs[1]
