import json

import pytest

from spacecurves.cli import load_chain, main
from spacecurves.curve import validate_curve
from spacecurves.files import CurveFile
from spacecurves.liaison import replay_chain


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr().out
    return code, out


def test_validate_corpus(capsys):
    code, out = run(capsys, "validate", "corpus:twisted-cubic", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["results"] == {"valid": True, "degree": 3, "genus": 0}
    assert rep["schema"] == "spacecurves-report/1"


def test_invariants_skew_lines(capsys):
    code, out = run(capsys, "invariants", "corpus:skew-lines", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["rao_dims"] == {"0": 1}
    assert rep["results"]["degree"] == 2


def test_exit_codes(capsys, tmp_path):
    bad = tmp_path / "bad.curve"
    bad.write_text("ring p=32003 base=field\ngens:\nX*\n")
    assert main(["validate", str(bad)]) == 3
    point = tmp_path / "pt.curve"
    point.write_text("ring p=32003 base=field\ngens:\nX\nY\nZ\n")
    assert main(["validate", str(point)]) == 2
    missing = tmp_path / "nope.curve"
    assert main(["validate", str(missing)]) == 3


def test_compare_exit_codes(capsys):
    assert main(["compare", "corpus:line", "corpus:twisted-cubic"]) == 0
    assert main(["compare", "corpus:skew-lines", "corpus:twisted-cubic"]) == 1


def test_json_determinism(capsys):
    _, out1 = run(capsys, "invariants", "corpus:line", "--json", "--seed", "5")
    _, out2 = run(capsys, "invariants", "corpus:line", "--json", "--seed", "5")
    assert out1 == out2


def test_link_emits_revalidating_file(capsys, tmp_path):
    out_path = tmp_path / "out.curve"
    code, _ = run(
        capsys,
        "link",
        "corpus:twisted-cubic",
        "X*Z - Y^2",
        "Y*W - Z^2",
        "--output",
        str(out_path),
    )
    assert code == 0
    C = validate_curve(CurveFile.load(out_path).to_ideal())
    assert C.degree_genus() == (1, 0)


def test_bilink_emits_quartic(capsys, tmp_path):
    out_path = tmp_path / "q.curve"
    code, out = run(
        capsys,
        "bilink",
        "corpus:skew-lines",
        "X*Z + Y*W",
        "X",
        "1",
        "--output",
        str(out_path),
        "--json",
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["degree"] == 4
    C = validate_curve(CurveFile.load(out_path).to_ideal())
    assert C.rao_module().dims() == {1: 1}


def test_ntype_report(capsys):
    code, out = run(capsys, "ntype", "corpus:twisted-cubic", "--json")
    assert code == 0
    rep = json.loads(out)
    assert rep["results"]["N_twists"] == [-2, -2, -2]
    assert rep["results"]["P_twists"] == [-3, -3]


def test_connect_chain_file_replays(capsys, tmp_path):
    chain_path = tmp_path / "chain.json"
    code, _ = run(
        capsys,
        "connect",
        "corpus:line",
        "corpus:twisted-cubic",
        "--output",
        str(chain_path),
    )
    assert code == 0
    steps = load_chain(chain_path)
    assert steps
    from spacecurves.files import load_corpus

    line = load_corpus("line").to_ideal()
    tc = load_corpus("twisted-cubic").to_ideal()
    end = replay_chain(line, steps)
    assert end == tc


def test_corpus_list(capsys):
    code, out = run(capsys, "corpus", "list", "--json")
    assert code == 0
    rep = json.loads(out)
    assert "twisted-cubic" in rep["results"]["fixtures"]


def test_dual_numbers_flag(capsys):
    code, out = run(
        capsys, "validate", "corpus:line", "--dual-numbers", "--json"
    )
    assert code == 0
    rep = json.loads(out)
    assert rep["results"] == {"valid": True, "degree": 1, "genus": 0}
