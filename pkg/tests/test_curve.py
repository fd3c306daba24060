import pytest

from spacecurves.curve import is_flat_family, validate_curve
from spacecurves.errors import (
    NotFlat,
    NotPureDimensionOrNotLCM,
    NotSaturated,
    WrongDimension,
)
from spacecurves.groebner import Ideal, ideal_intersect
from spacecurves.polyring import Poly


def I(base, *texts):
    return Ideal(base, [Poly.parse(t, base) for t in texts])


EXPECTED = {
    "line": (1, 0, {}),
    "conic": (2, 0, {}),
    "twisted-cubic": (3, 0, {}),
    "skew-lines": (2, -1, {0: 1}),
    "coplanar-lines": (2, 0, {}),
    "ci-2-2": (4, 1, {}),
    "quartic-from-skew-bilink": (4, 0, {1: 1}),
    "skew-pair-alt": (2, -1, {0: 1}),
}


def test_corpus_invariants(corpus_curves):
    for name, (d, g, rao) in EXPECTED.items():
        C = corpus_curves(name)
        assert C.degree_genus() == (d, g), name
        assert C.rao_module().dims() == rao, name


def test_rejects_unsaturated(K):
    with pytest.raises(NotSaturated):
        validate_curve(I(K, "X^2", "X*Y", "X*Z", "X*W"))


def test_rejects_wrong_dimension(K):
    with pytest.raises(WrongDimension):
        validate_curve(I(K, "X"))  # a surface
    with pytest.raises(WrongDimension):
        validate_curve(I(K, "X", "Y", "Z"))  # a point


def test_rejects_line_union_point(K):
    line = I(K, "X", "Y")
    point = I(K, "X", "Z", "W")
    bad = ideal_intersect(line, point)
    with pytest.raises(NotPureDimensionOrNotLCM):
        validate_curve(bad)


def test_rao_of_two_skew_lines_is_k(corpus_curves):
    C = corpus_curves("skew-lines")
    rao = C.rao_module()
    assert rao.dims() == {0: 1}
    assert rao.total_dim() == 1
    assert rao.graded_dual().dims() == {0: 1}


def test_regularity_and_hilbert(corpus_curves):
    tc = corpus_curves("twisted-cubic")
    assert tc.regularity() == 1
    assert tc.hilbert_function(4) == [1, 4, 7, 10, 13]
    sk = corpus_curves("skew-lines")
    assert sk.regularity() == 1


def test_dual_constant_families_validate(corpus_curves):
    for name in ("line-dual", "skew-lines-dual", "twisted-cubic-dual"):
        C = corpus_curves(name)
        assert C.base.dual
        fib = C.fiber()
        assert not fib.base.dual
        assert fib.degree_genus() == C.degree_genus()


def test_flatness_check_over_dual_numbers(A):
    flat = I(A, "X", "Y")
    assert is_flat_family(flat, 4)
    # e*(Z) contributes a non-free piece: rejected
    with pytest.raises((NotFlat, NotSaturated)):
        validate_curve(I(A, "X", "Y", "e*Z"))


def test_perturbed_family_validates(A):
    # a coordinate change X -> X, Y -> Y + e*X applied to the twisted cubic
    C = validate_curve(
        I(
            A,
            "X*Z - Y^2 - 2*e*X*Y",
            "Y*W + e*X*W - Z^2",
            "X*W - Y*Z - e*X*Z",
        )
    )
    assert C.degree_genus() == (3, 0)
    assert C.fiber().rao_module().is_zero()
