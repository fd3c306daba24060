import pytest

from spacecurves.errors import ParseError
from spacecurves.polyring import Poly, graded_piece_dim, monomials, variables


def test_parse_print_round_trip(K):
    for text in ["X*Z - Y^2", "3*X^2 + 2*Y*W", "X + Y + Z + W", "0", "7"]:
        f = Poly.parse(text, K)
        assert Poly.parse(str(f), K) == f


def test_parse_print_round_trip_dual(A):
    for text in ["X + e*Y", "(2+3*e)*Z^2", "e*W^3"]:
        f = Poly.parse(text, A)
        assert Poly.parse(str(f), A) == f


def test_parse_rejects_garbage(K, A):
    for bad in ["X*", "X^", "Q", "X +* Y", "(X"]:
        with pytest.raises(ParseError):
            Poly.parse(bad, K)
    with pytest.raises(ParseError):
        Poly.parse("e*X", K)  # epsilon needs the dual numbers
    Poly.parse("e*X", A)


def test_degree_and_homogeneity(K):
    f = Poly.parse("X*Z - Y^2", K)
    assert f.degree() == 2 and f.is_homogeneous()
    g = Poly.parse("X + Y^2", K)
    assert not g.is_homogeneous()
    assert Poly.zero(K).degree() == -1


def test_ring_axioms_spot_checks(K):
    X, Y, Z, W = variables(K)
    assert (X + Y) * (X - Y) == X * X - Y * Y
    assert (X * Y) * Z == X * (Y * Z)
    assert X * (Y + Z) == X * Y + X * Z


def test_fiber_and_lift(A, K):
    f = Poly.parse("X*Z + e*Y^2", A)
    assert f.fiber() == Poly.parse("X*Z", K)
    g = Poly.parse("X*Z", K).lift(A)
    assert g.base.dual and g.fiber() == Poly.parse("X*Z", K)


def test_epsilon_squares_to_zero(A):
    e = Poly.parse("e", A)
    assert (e * e).is_zero()
    f = Poly.parse("X + e*Y", A)
    g = Poly.parse("X - e*Y", A)
    assert f * g == Poly.parse("X^2", A)


def test_monomial_counts():
    # dim of degree-n forms in 4 variables is C(n+3, 3)
    for n, want in [(0, 1), (1, 4), (2, 10), (3, 20), (4, 35)]:
        assert graded_piece_dim(n) == want
        assert len(monomials(n)) == want
    assert graded_piece_dim(-1) == 0
