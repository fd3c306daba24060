import pytest

from spacecurves.curve import validate_curve
from spacecurves.errors import ParseError
from spacecurves.files import CurveFile, corpus_names, load_corpus


def test_corpus_names_complete():
    names = corpus_names()
    base = [
        "ci-2-2",
        "conic",
        "coplanar-lines",
        "line",
        "quartic-from-skew-bilink",
        "skew-lines",
        "skew-pair-alt",
        "twisted-cubic",
    ]
    assert names == sorted(base + [n + "-dual" for n in base])


def test_every_fixture_parses_and_validates(corpus_curves):
    for name in corpus_names():
        cf = load_corpus(name)
        assert cf.base.dual == name.endswith("-dual")
        corpus_curves(name)  # raises if invalid


def test_round_trip(tmp_path):
    cf = load_corpus("twisted-cubic")
    text = cf.text()
    again = CurveFile.parse(text)
    assert again == cf
    assert again.text() == text
    path = tmp_path / "out.curve"
    cf.save(path)
    assert CurveFile.load(path) == cf


def test_parse_errors():
    with pytest.raises(ParseError):
        CurveFile.parse("")
    with pytest.raises(ParseError):
        CurveFile.parse("ring p=4 base=field\ngens:\nX\n")
    with pytest.raises(ParseError):
        CurveFile.parse("ring p=7 base=field\nX\n")
    with pytest.raises(ParseError):
        CurveFile.parse("ring p=7 base=field\ngens:\n")
    with pytest.raises(ParseError):
        CurveFile.parse("ring p=7 base=field\ngens:\nX + Y^2\n")
    with pytest.raises(ParseError):
        CurveFile.parse("ring p=7 base=field\ngens:\ne*X\n")
    with pytest.raises(ParseError):
        load_corpus("does-not-exist")


def test_comments_and_blank_lines_ignored():
    cf = CurveFile.parse(
        "# fixture\nring p=7 base=field\n\ngens:\n# gen below\nX\nY\n"
    )
    assert len(cf.gens) == 2


def test_emitted_file_revalidates(tmp_path):
    cf = load_corpus("skew-lines")
    C = validate_curve(cf.to_ideal())
    out = CurveFile.from_ideal(C.ideal)
    path = tmp_path / "sk.curve"
    out.save(path)
    validate_curve(CurveFile.load(path).to_ideal())
