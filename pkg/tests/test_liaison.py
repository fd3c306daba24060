import pytest

from spacecurves.errors import (
    NotContained,
    NotCoprime,
    NotRegularSequence,
    ResidualEmpty,
)
from spacecurves.gradedmod import is_module_iso
from spacecurves.groebner import Ideal
from spacecurves.liaison import (
    CompleteIntersection,
    check_elementary_biliaison,
    link,
    trivial_biliaison,
)
from spacecurves.polyring import Poly


def P(base, t):
    return Poly.parse(t, base)


def I(base, *texts):
    return Ideal(base, [Poly.parse(t, base) for t in texts])


def test_complete_intersection_validates(K):
    ci = CompleteIntersection(P(K, "X*Z"), P(K, "Y*W"))
    assert (ci.s, ci.t) == (2, 2)
    with pytest.raises(NotRegularSequence):
        CompleteIntersection(P(K, "X*Y"), P(K, "X*Z"))


def test_link_twisted_cubic_to_line(K, corpus_curves):
    tc = corpus_curves("twisted-cubic")
    Cp = link(tc, P(K, "X*Z - Y^2"), P(K, "Y*W - Z^2"))
    assert Cp.ideal == I(K, "Y", "Z")
    assert Cp.degree_genus() == (1, 0)
    # linking again returns the twisted cubic
    back = link(Cp, P(K, "X*Z - Y^2"), P(K, "Y*W - Z^2"))
    assert back.ideal == tc.ideal


def test_link_requires_containment(K, corpus_curves):
    tc = corpus_curves("twisted-cubic")
    with pytest.raises(NotContained):
        link(tc, P(K, "X^2"), P(K, "Y*W - Z^2"))


def test_link_self_residual_empty(K, corpus_curves):
    ci = corpus_curves("ci-2-2")
    with pytest.raises(ResidualEmpty):
        link(ci, P(K, "X*Z"), P(K, "Y*W"))


def test_link_degree_additivity(K, corpus_curves):
    sk = corpus_curves("skew-lines")
    Cp = link(sk, P(K, "X*Z"), P(K, "Y*W"))
    d, _ = sk.degree_genus()
    dp, _ = Cp.degree_genus()
    assert d + dp == 4


def test_trivial_biliaison_shifts_rao(K, corpus_curves):
    sk = corpus_curves("skew-lines")
    Q = P(K, "X*Z + Y*W")
    Cp, step = trivial_biliaison(sk, Q, P(K, "X"), 1)
    assert Cp.rao_module().dims() == {1: 1}
    assert step.h == 1
    assert step.verify()
    shifted = sk.rao_module().shift(-1)
    assert shifted.dims() == Cp.rao_module().dims()
    assert (
        is_module_iso(shifted.to_module(), Cp.rao_module().to_module()) == "yes"
    )


def test_trivial_biliaison_rejects_bad_input(K, corpus_curves):
    sk = corpus_curves("skew-lines")
    with pytest.raises(NotContained):
        trivial_biliaison(sk, P(K, "X^2"), P(K, "X"), 1)
    with pytest.raises(NotCoprime):
        # H = X*Z shares the component X*Z of... it divides Q exactly
        trivial_biliaison(sk, P(K, "X*Z"), P(K, "Z"), 1)
    with pytest.raises(ValueError):
        trivial_biliaison(sk, P(K, "X*Z + Y*W"), P(K, "X"), 2)


def test_elementary_biliaison_decision(K, corpus_curves):
    line = corpus_curves("line")
    tc = corpus_curves("twisted-cubic")
    Q = P(K, "X*Z - Y^2")
    v = check_elementary_biliaison(line, tc, Q, 1)
    assert v.is_yes and v.h == 1
    v0 = check_elementary_biliaison(line, line, Q, 0)
    assert v0.is_yes
    # degree obstruction
    bad = check_elementary_biliaison(line, tc, Q, 2)
    assert bad.kind == "no"
