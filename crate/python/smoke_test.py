"""Smoke test for the synerr Python bindings.

Run after `maturin develop -m crates/python/Cargo.toml`, or after
`cargo build -p synerr-py --release`, in which case the built library is
picked up from target/.
"""

import importlib.util
import math
import shutil
import sys
import tempfile
from pathlib import Path

ROOT = Path(__file__).resolve().parent.parent
FIXTURES = ROOT / "crates" / "core" / "tests" / "fixtures"


def load():
    try:
        import synerr

        return synerr
    except ImportError:
        pass
    for profile in ("release", "debug"):
        for name in ("libsynerr_py.so", "libsynerr_py.dylib", "synerr_py.dll"):
            built = ROOT / "target" / profile / name
            if built.exists():
                suffix = ".pyd" if name.endswith(".dll") else ".so"
                dest = Path(tempfile.mkdtemp()) / ("synerr" + suffix)
                shutil.copy(built, dest)
                spec = importlib.util.spec_from_file_location("synerr", dest)
                module = importlib.util.module_from_spec(spec)
                spec.loader.exec_module(module)
                return module
    sys.exit("synerr extension not found; build it with cargo build -p synerr-py --release")


EXAMPLE_M2 = "S you 'll study it easier\nA 4 5|||R:ADJ:FORM|||more easily|||REQUIRED|||-NONE-|||0\n\n"
EXAMPLE_SRC = """1\tyou\tyou\tPRON\t_\t_\t3\tnsubj\t_\t_
2\t'll\twill\tAUX\t_\t_\t3\taux\t_\t_
3\tstudy\tstudy\tVERB\t_\t_\t0\troot\t_\t_
4\tit\tit\tPRON\t_\t_\t3\tobj\t_\t_
5\teasier\teasy\tADJ\t_\t_\t3\txcomp\t_\t_

"""
EXAMPLE_COR = """1\tyou\tyou\tPRON\t_\t_\t3\tnsubj\t_\t_
2\t'll\twill\tAUX\t_\t_\t3\taux\t_\t_
3\tstudy\tstudy\tVERB\t_\t_\t0\troot\t_\t_
4\tit\tit\tPRON\t_\t_\t3\tobj\t_\t_
5\tmore\tmore\tADV\t_\t_\t6\tadvmod\t_\t_
6\teasily\teasily\tADV\t_\t_\t3\tadvmod\t_\t_

"""


def main():
    s = load()

    src = s.parse_conllu(EXAMPLE_SRC)[0]
    assert len(src) == 5 and src.is_valid()
    assert src.depths() == [2, 2, 1, 2, 2]
    assert s.representative(4, 5, src) == 5
    assert s.representative(2, 2, src) is None

    (tokens, edits), = s.parse_m2(EXAMPLE_M2)
    assert tokens == ["you", "'ll", "study", "it", "easier"]
    out, spans = s.apply_edits(tokens, edits)
    assert out == ["you", "'ll", "study", "it", "more", "easily"] and spans == [(4, 6)]

    merged = s.merge_overlapping([s.Edit(1, 2, ["x"]), s.Edit(2, 2, ["y"])], tokens)
    assert [(e.start, e.end, e.replacement) for e in merged] == [(1, 2, ["x", "y"])]

    for scheme, pair in [("upos", ("ADJ", "ADV")), ("deprel", ("xcomp", "advmod"))]:
        (edit,) = s.classify_texts(EXAMPLE_M2, EXAMPLE_SRC, EXAMPLE_COR, scheme=scheme)
        assert edit.kind == "Replacement" and edit.se_type == pair, edit
        m = s.build_matrix([edit], scheme=scheme)
        assert m.total() == 1 and m.get(*pair) == 1

    corpus = FIXTURES / "corpus"
    edits = s.classify_corpus(corpus / "learner.m2", corpus / "source.conllu", corpus / "corrected.conllu")
    assert len(edits) == 20
    m = s.build_matrix(edits)
    assert m.total() == 20
    again = s.ConfusionMatrix.from_tsv(m.to_tsv())
    assert again == m and (m + m).total() == 40

    published = FIXTURES / "published"
    gold = s.ConfusionMatrix.read_tsv(published / "recall_gold_counts.tsv")
    system = s.ConfusionMatrix.read_tsv(published / "recall_uedin_ms_counts.tsv")
    bound = s.recall_bound(system, gold)
    assert (bound["system_total"], bound["gold_total"]) == (2686, 4790)
    assert abs(bound["overall"] - 0.561) < 0.001

    nats, effective = s.entropy_effective([5] * 12)
    assert effective == 12 and math.isclose(nats, math.log(12))
    r, _, n = s.pearson({"a": 1.0, "b": 2.0, "c": 4.0}, {"a": 3.0, "b": 5.0, "c": 9.0})
    assert n == 3 and abs(r - 1) < 1e-12
    assert abs(s.cramers_v_table([[5, 0], [0, 7]]) - 1) < 1e-12

    overlap = s.taxonomy_overlap({"None->DET": {"ArtOrDet": 9, "Prep": 1}}, min_count=0)
    assert overlap["rows"] == [("None->DET", 10, "ArtOrDet", 0.9, 1.0)]

    try:
        s.parse_conllu("1\tbroken\n\n")
    except ValueError:
        pass
    else:
        raise AssertionError("malformed CoNLL-U was accepted")

    print("synerr python bindings: ok")


if __name__ == "__main__":
    main()
