"""Validated curve families and their numerical invariants.

A curve family is a saturated homogeneous ideal whose quotient has
2-dimensional support (a cone over a curve), is locally Cohen-Macaulay with
no point components (finite-length Ext^3 criterion), and over the dual
numbers is flat degreewise.  Validation rejects bad input instead of
repairing it.
"""

from __future__ import annotations

import numpy as np

from . import linalg
from .errors import (
    NotFlat,
    NotPureDimensionOrNotLCM,
    NotSaturated,
    OracleMismatch,
    WrongDimension,
)
from .gradedmod import (
    FiniteModuleData,
    GradedModule,
    PieceCalculus,
    PowerHomCalculus,
    ext_module,
    finite_data_to_module,
    finite_module_data,
    is_module_iso,
)
from .groebner import Ideal, ideal_saturate
from .polyring import Poly, graded_piece_dim, monomials
from .scalars import BaseRing


class RaoModule:
    """The finite-length invariant H^1_* of the curve's ideal sheaf."""

    def __init__(self, data: FiniteModuleData):
        self.data = data

    @property
    def base(self) -> BaseRing:
        return self.data.base

    def dims(self) -> dict:
        return dict(self.data.dims)

    def is_zero(self) -> bool:
        return not self.data.dims

    def total_dim(self) -> int:
        return self.data.total_dim()

    def shift(self, h: int) -> "RaoModule":
        return RaoModule(self.data.shift(h))

    def graded_dual(self) -> "RaoModule":
        return RaoModule(self.data.graded_dual())

    def to_module(self) -> GradedModule:
        return finite_data_to_module(self.data)

    def __repr__(self):
        return f"RaoModule(dims={self.data.dims})"


class CurveFamily:
    """A validated (family of) space curve(s), with cached invariants."""

    def __init__(self, ideal: Ideal, _token=None):
        if _token is not _VALIDATED:
            raise ValueError("use validate_curve to construct curves")
        self.ideal = ideal
        self._cache = {}

    @property
    def base(self) -> BaseRing:
        return self.ideal.base

    def _ri(self) -> GradedModule:
        if "ri" not in self._cache:
            self._cache["ri"] = GradedModule.quotient_by_ideal(self.ideal)
        return self._cache["ri"]

    def ideal_module(self) -> GradedModule:
        if "im" not in self._cache:
            self._cache["im"] = GradedModule.from_ideal(self.ideal)
        return self._cache["im"]

    def regularity(self) -> int:
        return self._ri().regularity()

    def degree_genus(self):
        if "dg" not in self._cache:
            reg = self.regularity()
            fib = self.ideal.fiber()
            hf = fib.hilbert_function(reg + 5)
            vals = hf[reg + 1 :]
            diffs = [b - a for a, b in zip(vals, vals[1:])]
            if len(set(diffs)) != 1:
                raise WrongDimension(
                    "Hilbert function does not stabilize to a linear polynomial"
                )
            d = diffs[0]
            n1 = reg + 1
            g = 1 - (vals[0] - d * n1)
            self._cache["dg"] = (d, g)
        return self._cache["dg"]

    def hilbert_function(self, n_max: int):
        return self.ideal.fiber().hilbert_function(n_max)

    def rao_module(self) -> RaoModule:
        if "rao" not in self._cache:
            a = _rao_route_saturation(self)
            b = _rao_route_duality(self)
            if a.dims != b.dims:
                raise OracleMismatch(
                    f"Rao module dims disagree: saturation route {a.dims}, "
                    f"duality route {b.dims}"
                )
            if a.dims:
                verdict = is_module_iso(
                    finite_data_to_module(a), finite_data_to_module(b)
                )
                if verdict != "yes":
                    raise OracleMismatch(
                        f"Rao module structures disagree ({verdict})"
                    )
            self._cache["rao"] = RaoModule(a)
        return self._cache["rao"]

    def fiber(self) -> "CurveFamily":
        if not self.base.dual:
            return self
        fib = ideal_saturate(self.ideal.fiber())
        return validate_curve(fib)

    def __eq__(self, other):
        return isinstance(other, CurveFamily) and self.ideal == other.ideal

    def __hash__(self):
        return hash(self.ideal)

    def __repr__(self):
        d, g = self.degree_genus()
        return f"CurveFamily(d={d}, g={g}, gens={[str(x) for x in self.ideal.gens]})"


_VALIDATED = object()


def is_flat_family(I: Ideal, n_max: int) -> bool:
    """True iff every piece (R_A/I)_n, n <= n_max, is free over A."""
    if not I.base.dual:
        return True
    fib = I.fiber()
    for n in range(n_max + 1):
        full = 2 * graded_piece_dim(n) - I.piece_matrix(n).shape[1]
        fdim = graded_piece_dim(n) - fib.piece_dim(n)
        if full != 2 * fdim:
            return False
    return True


def validate_curve(I: Ideal) -> CurveFamily:
    """Validate the curve conditions; reject rather than repair."""
    fib = I.fiber()
    top = max((g.degree() for g in I.gens), default=0)
    if I.base.dual:
        if not is_flat_family(I, top + 4):
            raise NotFlat("a graded piece of R_A/I is not free over A")
    sat = ideal_saturate(I)
    if not (sat == I):
        raise NotSaturated(
            f"saturation adds generators {[str(g) for g in sat.gens]}"
        )
    dim = I.krull_dimension()
    if dim != 2:
        raise WrongDimension(f"cone dimension {dim}, expected 2")
    C = CurveFamily(I, _token=_VALIDATED)
    e3 = ext_module(C._ri(), 3, 0)
    if e3.F0.rank and not e3.is_finite_length():
        raise NotPureDimensionOrNotLCM(
            "Ext^3(R/I, R) has infinite length: point components or "
            "non-locally-CM locus"
        )
    d, _ = C.degree_genus()
    if d < 1:
        raise WrongDimension(f"degree {d} < 1")
    return C


# -- Rao module routes ------------------------------------------------------


def _rao_route_duality(C: CurveFamily) -> FiniteModuleData:
    """Graded dual of Ext^3(R/I, R(-4))."""
    e3 = ext_module(C._ri(), 3, -4)
    if not e3.F0.rank:
        return FiniteModuleData(C.base, {}, {}, {})
    return finite_module_data(e3).graded_dual()


def _rao_route_saturation(C: CurveFamily) -> FiniteModuleData:
    """coker(R -> Gamma_*(O_C)) computed from stabilized Hom(m^t, R/I)."""
    base = C.base
    p = base.p
    RI = C._ri()
    pc = PieceCalculus(RI)
    reg = C.regularity()
    lo, hi = -reg - 4, reg + 2
    degrees = list(range(lo, hi + 2))
    ph = _stabilized_power_homs(pc, degrees)
    bases = {n: ph.hom_basis(n) for n in degrees}
    # image of R_n inside Hom(m^t, R/I)_n: multiplication homs
    img = {}
    for n in degrees:
        cols = []
        for m in monomials(n):
            v = ph.multiplication_hom(Poly.monomial(base, m), n)
            cols.append(v)
            if base.dual:
                eps = ph.eps_action_coords(n)
                cols.append(linalg.matmul(eps, v.reshape(-1, 1), p).reshape(-1))
        width = bases[n].shape[0]
        img[n] = (
            np.array(cols, dtype=np.int64).T % p
            if cols
            else np.zeros((width, 0), dtype=np.int64)
        )
    # quotient bases
    reps = {}
    for n in degrees:
        width = bases[n].shape[0]
        span = linalg.Span(max(width, 1), p)
        span.add_many(img[n])
        chosen = []
        for j in range(bases[n].shape[1]):
            if span.add(bases[n][:, j]):
                chosen.append(bases[n][:, j])
        reps[n] = chosen
    dims = {n: len(reps[n]) for n in degrees if reps[n]}
    actions = {}
    eps_maps = {}
    for n in degrees[:-1]:
        dn = len(reps[n])
        dn1 = len(reps[n + 1])
        if dn == 0:
            continue
        mats = [ph.variable_action(v, n) for v in range(4)]
        for v in range(4):
            out = np.zeros((dn1, dn), dtype=np.int64)
            for c, w in enumerate(reps[n]):
                moved = linalg.matmul(mats[v], w.reshape(-1, 1), p).reshape(-1)
                out[:, c] = _coords_in_quotient(moved, img[n + 1], reps[n + 1], p)
            actions[(n, v)] = out
        if base.dual:
            emat = ph.eps_action_coords(n)
            out = np.zeros((dn, dn), dtype=np.int64)
            for c, w in enumerate(reps[n]):
                moved = linalg.matmul(emat, w.reshape(-1, 1), p).reshape(-1)
                out[:, c] = _coords_in_quotient(moved, img[n], reps[n], p)
            eps_maps[n] = out
    return FiniteModuleData(base, dims, actions, eps_maps)


def _coords_in_quotient(vec, img, reps, p):
    """Coefficients of vec on the chosen quotient representatives."""
    if not reps:
        return np.zeros(0, dtype=np.int64)
    cols = [r for r in reps]
    mat = np.array(cols, dtype=np.int64).T
    full = np.concatenate([mat, img], axis=1) if img.size else mat
    sol = linalg.solve(full, vec.reshape(-1, 1), p)
    if sol is None:
        raise OracleMismatch("vector escapes the hom space")
    return sol[: len(reps), 0]


def _stabilized_power_homs(pc: PieceCalculus, degrees) -> PowerHomCalculus:
    prev = None
    prev_dims = None
    for t in range(1, 12):
        ph = PowerHomCalculus(pc, t)
        dims = tuple(ph.hom_basis(n).shape[1] for n in degrees)
        if dims == prev_dims:
            return ph
        prev, prev_dims = ph, dims
    raise OracleMismatch("Hom(m^t, -) failed to stabilize")
