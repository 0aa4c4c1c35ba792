import io
from pathlib import Path

import pytest

from idiomkit import corpus
from idiomkit.matcher import MatchConfig
from idiomkit.text import LemmaTable, load_lemma_table, parse_lexicon

from synthetic import make_corpus

FIXTURES = Path(__file__).parent / "fixtures"

ACCEPTANCE = {
    "test_ac1": "AC1 matching fidelity on the German examples",
    "test_ac2": "AC2 matcher oracle equivalence",
    "test_ac3": "AC3 split invariants",
    "test_ac4": "AC4 tagging round trip",
    "test_ac5": "AC5 BLEU oracle",
    "test_ac6": "AC6 aligner",
    "test_ac7": "AC7 metrics unit suite",
    "test_ac8": "AC8 split statistics via stats",
}
_outcomes: dict[str, list[str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    for prefix in ACCEPTANCE:
        if name.startswith(prefix + "_"):
            if report.when == "call" or report.outcome != "passed":
                _outcomes.setdefault(prefix, []).append(report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for prefix, label in ACCEPTANCE.items():
        results = _outcomes.get(prefix)
        if results is None:
            status = "NOT RUN"
        else:
            status = "PASS" if all(r == "passed" for r in results) else "FAIL"
        terminalreporter.write_line(f"{status:7} {label}")


@pytest.fixture(scope="session")
def de_table():
    with open(FIXTURES / "de_lemmas.tsv", "rb") as fh:
        return load_lemma_table(fh)


@pytest.fixture(scope="session")
def de_lexicon(de_table):
    with open(FIXTURES / "de_idioms.tsv", "rb") as fh:
        return parse_lexicon(fh, de_table)


@pytest.fixture(scope="session")
def synthetic():
    src, tgt, lexicon_text, idiom_of_pair = make_corpus()
    lexicon = parse_lexicon(io.BytesIO(lexicon_text.encode()), LemmaTable())
    pairs = corpus.read_parallel(src, tgt, LemmaTable())
    groups, residual = corpus.extract_idiomatic_pairs(pairs, lexicon, MatchConfig())
    return {
        "src": src, "tgt": tgt, "lexicon_text": lexicon_text, "lexicon": lexicon,
        "pairs": pairs, "groups": groups, "residual": residual, "idiom_of_pair": idiom_of_pair,
    }


@pytest.fixture(scope="session")
def synthetic_files(tmp_path_factory, synthetic):
    root = tmp_path_factory.mktemp("synthetic")
    (root / "corpus.src").write_text("".join(s + "\n" for s in synthetic["src"]), encoding="utf-8")
    (root / "corpus.tgt").write_text("".join(t + "\n" for t in synthetic["tgt"]), encoding="utf-8")
    (root / "lexicon.tsv").write_text(synthetic["lexicon_text"], encoding="utf-8")
    (root / "lemmas.tsv").write_text("", encoding="utf-8")
    return root
