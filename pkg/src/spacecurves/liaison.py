"""Linkage by complete intersections and biliaison moves.

A link replaces a curve C by the residual curve C' of a complete
intersection (F, G) containing it: I_{C'} = (F,G) : I_C.  A trivial
biliaison replaces C by the curve with ideal sat(H * I_C + (Q)) for a
surface Q through C and a form H coprime to Q.  An elementary biliaison of
height h on Q is witnessed by a graded isomorphism I_{C'}/(Q) = (I_C/(Q))(-h);
chains of such moves are searched for and replayed by connect_by_biliaisons.
"""

from __future__ import annotations

import random

import numpy as np

from . import linalg
from .curve import CurveFamily, validate_curve
from .errors import (
    NotContained,
    NotCoprime,
    NotEquivalent,
    NotRegularSequence,
    OracleMismatch,
    ResidualEmpty,
    SurfaceNotFlat,
    Undecided,
)
from .gradedmod import (
    FreeModule,
    GradedMap,
    GradedModule,
    ModuleHom,
    element_to_vector,
    hom_space,
    random_hom,
    vector_to_element,
)
from .groebner import (
    Ideal,
    fiber_colon_poly,
    fiber_intersect,
    ideal_colon,
    ideal_product_poly,
    ideal_saturate,
    ideal_sum,
)
from .polyring import Poly, monomials


class Verdict:
    """Outcome of a decision procedure: yes / no / undecided."""

    __slots__ = ("kind", "h", "witness", "reason")

    def __init__(self, kind: str, h=None, witness=None, reason: str = ""):
        if kind not in ("yes", "no", "undecided"):
            raise ValueError(f"bad verdict kind {kind!r}")
        self.kind = kind
        self.h = h
        self.witness = witness
        self.reason = reason

    @property
    def is_yes(self) -> bool:
        return self.kind == "yes"

    def __repr__(self):
        extra = f"(h={self.h})" if self.kind == "yes" and self.h is not None else ""
        return f"Verdict[{self.kind}{extra}{' ' + self.reason if self.reason else ''}]"


# -- complete intersections -------------------------------------------------


class CompleteIntersection:
    """A regular sequence (F, G) of surfaces, with its Koszul resolution."""

    def __init__(self, F: Poly, G: Poly):
        base = F.base
        if base != G.base:
            raise NotRegularSequence("forms over different base rings")
        for f in (F, G):
            if f.fiber().is_zero():
                raise NotRegularSequence(f"fiber form of {f} vanishes")
            if not f.is_homogeneous() or f.degree() < 1:
                raise NotRegularSequence(f"{f} is not homogeneous of positive degree")
        Ff, Gf = F.fiber(), G.fiber()
        kf = base.field()
        if not (fiber_colon_poly(Ideal(kf, [Ff]), Gf) == Ideal(kf, [Ff])):
            raise NotRegularSequence(
                f"{G} is a zero divisor modulo {F} in the fiber"
            )
        self.F = F
        self.G = G
        self.s = F.degree()
        self.t = G.degree()
        self.base = base

    def ideal(self) -> Ideal:
        return Ideal(self.base, [self.F, self.G])

    def koszul_maps(self):
        """[d1: R(-s)+R(-t) -> R, d2: R(-s-t) -> R(-s)+R(-t)]."""
        base = self.base
        F0 = FreeModule(base, [-self.s, -self.t])
        d1 = GradedMap(F0, FreeModule(base, [0]), [[self.F, self.G]])
        d2 = GradedMap(
            FreeModule(base, [-self.s - self.t]), F0, [[self.G], [-self.F]]
        )
        return [d1, d2]

    def twists(self):
        return ((-self.s - self.t,), (-self.s, -self.t))


class CIResolution:
    """Certified Koszul resolution of a complete intersection ideal."""

    def __init__(self, ci: CompleteIntersection):
        self.ci = ci
        self.maps = ci.koszul_maps()
        d1, d2 = self.maps
        if not d1.compose(d2).is_zero():
            raise OracleMismatch("Koszul composition is nonzero")
        # degreewise exactness in the middle: ker(d1)_n = im(d2)_n
        p = ci.base.p
        cap = ci.s + ci.t + 4
        for n in range(cap + 1):
            m1 = d1.matrix_at(n)
            ker = m1.shape[1] - linalg.rank(m1, p)
            im = linalg.rank(d2.matrix_at(n), p)
            if ker != im:
                raise OracleMismatch(
                    f"Koszul complex not exact in degree {n}: ker {ker}, im {im}"
                )
        self.twists = ci.twists()


def ci_resolution(F: Poly, G: Poly) -> CIResolution:
    return CIResolution(CompleteIntersection(F, G))


# -- linkage ---------------------------------------------------------------


def link(C: CurveFamily, F: Poly, G: Poly) -> CurveFamily:
    """The residual curve of C in the complete intersection (F, G)."""
    ci = CompleteIntersection(F, G)
    I = C.ideal
    for f in (F, G):
        if not I.contains(f):
            raise NotContained(f"{f} does not lie in the curve ideal")
    D = ci.ideal()
    J = ideal_colon(D, I)
    if J.is_unit_ideal():
        raise ResidualEmpty("the curve equals the complete intersection")
    J = ideal_saturate(J)
    Cp = validate_curve(J)
    d, _ = C.degree_genus()
    dp, _ = Cp.degree_genus()
    if d + dp != ci.s * ci.t:
        raise OracleMismatch(
            f"degree additivity fails: {d} + {dp} != {ci.s} * {ci.t}"
        )
    return Cp


# -- quotient by a surface --------------------------------------------------


def member_coordinates(I: Ideal, Q: Poly):
    """Coordinates expressing Q in terms of the generators of I.

    Returns a tuple of Polys c with sum(c_i * g_i) = Q, as an element of
    the free cover of the ideal module; raises NotContained otherwise.
    """
    base = I.base
    d = Q.degree()
    degs = [g.degree() for g in I.gens]
    F0 = FreeModule(base, [-e for e in degs])
    row = GradedMap(F0, FreeModule(base, [0]), [list(I.gens)])
    vec = element_to_vector(FreeModule(base, [0]), (Q,), d)
    sol = linalg.solve(row.matrix_at(d), vec.reshape(-1, 1), base.p)
    if sol is None:
        raise NotContained(f"{Q} does not lie in the ideal")
    return vector_to_element(F0, sol[:, 0], d)


def ideal_mod_surface(I: Ideal, Q: Poly) -> GradedModule:
    """I/(Q) as a graded module, for a surface Q in I."""
    IM = GradedModule.from_ideal(I)
    col = member_coordinates(I, Q)
    cols = [IM.presentation.column(j) for j in range(IM.F1.rank)]
    degs = [-t for t in IM.F1.twists]
    cols.append(col)
    degs.append(Q.degree())
    pres = GradedMap.from_columns(IM.F0, cols, degs)
    return GradedModule(pres).minimal_presentation()


def find_module_iso(M: GradedModule, N: GradedModule, trials: int = 32, seed: int = 0):
    """Like is_module_iso but returns (kind, witness ModuleHom or None)."""
    Mm = M.minimal_presentation()
    Nm = N.minimal_presentation()
    if Mm.F0.rank == 0 and Nm.F0.rank == 0:
        return "yes", None
    if Mm.kpolynomial() != Nm.kpolynomial():
        return "no", None
    if M.base.dual:
        lo = min(Mm.min_degree(), Nm.min_degree())
        hi = max(Mm.regularity(), Nm.regularity()) + 2
        for n in range(lo, hi + 1):
            if Mm.piece_dim(n) != Nm.piece_dim(n):
                return "no", None
    homs = hom_space(Mm, Nm, 0)
    if not homs:
        return "no", None
    top = max(
        max((-t for t in Nm.F0.twists), default=0),
        max((-t for t in Mm.F0.twists), default=0),
    )
    rng = random.Random(seed)
    for _ in range(trials):
        f = random_hom(homs, rng, M.base)
        if f.is_surjective_up_to(top):
            return "yes", f
    return "undecided", None


# -- biliaison moves --------------------------------------------------------


class BiliaisonStep:
    """One certified biliaison move from source ideal to target ideal.

    kind "trivial": target = sat(H * source + (Q)), height h = deg H.
    kind "elementary": witnessed by a graded isomorphism between the
    surface quotients; height h may be negative (descending move).
    """

    def __init__(self, kind, Q, h, source: Ideal, target: Ideal, H=None, witness=None):
        self.kind = kind
        self.Q = Q
        self.h = h
        self.source = source
        self.target = target
        self.H = H
        self.witness = witness

    def verify(self, trials: int = 32, seed: int = 0) -> bool:
        """Re-check this move independently of how it was found."""
        C = validate_curve(self.source)
        Cp = validate_curve(self.target)
        if self.kind == "trivial":
            _, step = trivial_biliaison(C, self.Q, self.H, self.h)
            if not (step.target == self.target):
                return False
        if self.h >= 0:
            v = check_elementary_biliaison(C, Cp, self.Q, self.h, trials, seed)
        else:
            v = check_elementary_biliaison(Cp, C, self.Q, -self.h, trials, seed)
        return v.is_yes

    def apply(self, I: Ideal) -> Ideal:
        """Replay the move on an input ideal; must match the recorded source."""
        if not (I == self.source):
            raise NotEquivalent("replay input differs from the recorded source")
        if self.kind == "trivial":
            out = ideal_saturate(
                ideal_sum(ideal_product_poly(self.H, I), Ideal(I.base, [self.Q]))
            )
            if not (out == self.target):
                raise OracleMismatch("trivial biliaison replay mismatch")
            return out
        if not self.verify():
            raise OracleMismatch("elementary biliaison step fails re-verification")
        return self.target

    def __repr__(self):
        return f"BiliaisonStep({self.kind}, Q={self.Q}, h={self.h})"


def trivial_biliaison(C: CurveFamily, Q: Poly, H: Poly, h: int):
    """(C', step) with I_{C'} = sat(H * I_C + (Q)); deg H = h >= 0."""
    base = C.base
    I = C.ideal
    if Q.fiber().is_zero():
        raise SurfaceNotFlat(f"fiber form of {Q} vanishes")
    if not I.contains(Q):
        raise NotContained(f"{Q} does not contain the curve")
    if h < 0 or (h == 0) != (H.degree() == 0) or (h > 0 and H.degree() != h):
        raise ValueError(f"H must be homogeneous of degree h = {h}")
    if H.fiber().is_zero() or not H.is_homogeneous():
        raise NotCoprime("H has vanishing fiber form")
    if h > 0:
        kf = base.field()
        Qf = Ideal(kf, [Q.fiber()])
        if not (fiber_colon_poly(Qf, H.fiber()) == Qf):
            raise NotCoprime(f"{H} shares a component with {Q}")
    J = ideal_saturate(ideal_sum(ideal_product_poly(H, I), Ideal(base, [Q])))
    Cp = validate_curve(J)
    d, _ = C.degree_genus()
    dp, _ = Cp.degree_genus()
    if dp != d + h * Q.degree():
        raise OracleMismatch(
            f"trivial biliaison degree check fails: {dp} != {d} + {h}*{Q.degree()}"
        )
    step = BiliaisonStep("trivial", Q, h, I, J, H=H)
    return Cp, step


def check_elementary_biliaison(
    C: CurveFamily, Cp: CurveFamily, Q: Poly, h: int, trials: int = 32, seed: int = 0
) -> Verdict:
    """Decide whether C' is an elementary biliaison of height h of C on Q."""
    if Q.fiber().is_zero():
        raise SurfaceNotFlat(f"fiber form of {Q} vanishes")
    for X in (C, Cp):
        if not X.ideal.contains(Q):
            raise NotContained(f"{Q} does not contain both curves")
    d, _ = C.degree_genus()
    dp, _ = Cp.degree_genus()
    if dp != d + h * Q.degree():
        return Verdict(
            "no", reason=f"degree obstruction: {dp} != {d} + {h}*{Q.degree()}"
        )
    M = ideal_mod_surface(C.ideal, Q)
    Mp = ideal_mod_surface(Cp.ideal, Q)
    kind, wit = find_module_iso(M.shift(-h), Mp, trials, seed)
    if kind == "yes":
        return Verdict("yes", h=h, witness=wit)
    if kind == "no":
        return Verdict("no", reason="surface quotients are not isomorphic")
    return Verdict("undecided", reason="no surjective hom found")


# -- chain search -----------------------------------------------------------


def _common_surfaces(C: CurveFamily, Cp: CurveFamily, max_degree: int):
    """Low-degree surfaces through both curves, smallest degrees first."""
    base = C.base
    If, Jf = C.ideal.fiber(), Cp.ideal.fiber()
    inter = fiber_intersect(If, Jf)
    out = []
    for g in sorted(inter.gens, key=lambda f: f.degree()):
        if g.degree() <= max_degree:
            out.append(g.lift(base) if base.dual else g)
    return out


def _single_step(C, Cp, surfaces, max_height, trials, seed):
    d, _ = C.degree_genus()
    dp, _ = Cp.degree_genus()
    delta = dp - d
    for Q in surfaces:
        q = Q.degree()
        if delta % q:
            continue
        h = delta // q
        if abs(h) > max_height:
            continue
        try:
            if h >= 0:
                v = check_elementary_biliaison(C, Cp, Q, h, trials, seed)
            else:
                v = check_elementary_biliaison(Cp, C, Q, -h, trials, seed)
        except (NotContained, SurfaceNotFlat):
            continue
        if v.is_yes:
            return BiliaisonStep(
                "elementary", Q, h, C.ideal, Cp.ideal, witness=v.witness
            )
    return None


def _random_form(base, degree, rng):
    p = base.p
    terms = {}
    for m in monomials(degree):
        terms[m] = (rng.randrange(p), 0)
    return Poly(base, terms)


def connect_by_biliaisons(
    C: CurveFamily,
    Cp: CurveFamily,
    max_height: int = 2,
    trials: int = 32,
    seed: int = 0,
):
    """A verified chain of biliaison steps from C to C'."""
    if C.ideal == Cp.ideal:
        return []
    from .raoclass import biliaison_equivalent

    eq = biliaison_equivalent(C, Cp, trials=trials, seed=seed)
    if eq.kind == "no":
        raise NotEquivalent("curves are not in the same biliaison class")
    reg = max(C.regularity(), Cp.regularity())
    surfaces = _common_surfaces(C, Cp, reg + 2)
    step = _single_step(C, Cp, surfaces, max_height, trials, seed)
    if step is not None:
        return [step]
    # two-step search: one trivial biliaison off C (or off C'), then a
    # single elementary move to close the gap
    rng = random.Random(seed)
    own = [
        g for g in sorted(C.ideal.fiber().gens, key=lambda f: f.degree())
    ][:4]
    own_p = [
        g for g in sorted(Cp.ideal.fiber().gens, key=lambda f: f.degree())
    ][:4]
    base = C.base
    for h1 in range(1, max_height + 1):
        for Q in own:
            Qa = Q.lift(base) if base.dual else Q
            for _ in range(4):
                H = _random_form(base, h1, rng)
                try:
                    C1, step1 = trivial_biliaison(C, Qa, H, h1)
                except Exception:
                    continue
                mid = _common_surfaces(C1, Cp, reg + h1 + 2)
                step2 = _single_step(C1, Cp, mid, max_height + h1, trials, seed)
                if step2 is not None:
                    return [step1, step2]
                break
        for Q in own_p:
            Qa = Q.lift(base) if base.dual else Q
            for _ in range(4):
                H = _random_form(base, h1, rng)
                try:
                    C1p, step1 = trivial_biliaison(Cp, Qa, H, h1)
                except Exception:
                    continue
                mid = _common_surfaces(C, C1p, reg + h1 + 2)
                stepA = _single_step(C, C1p, mid, max_height + h1, trials, seed)
                if stepA is not None:
                    stepB = BiliaisonStep(
                        "elementary",
                        step1.Q,
                        -h1,
                        C1p.ideal,
                        Cp.ideal,
                    )
                    if stepB.verify(trials, seed):
                        return [stepA, stepB]
                break
    raise Undecided("no biliaison chain found within the search bounds")


def replay_chain(I: Ideal, steps) -> Ideal:
    """Apply a chain of steps to an ideal, verifying each move."""
    cur = I
    for step in steps:
        cur = step.apply(cur)
    return cur
