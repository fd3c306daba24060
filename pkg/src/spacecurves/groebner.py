"""Groebner engine over the prime-field fiber plus degreewise ideal
operations over the dual numbers.

The raw engine works on dicts mapping exponent tuples (any fixed arity) to
nonzero ints mod p, so the same code handles the 4-variable ring and the
5-variable ring with an elimination tag variable.  Ideal-level operations
(quotient, intersection, saturation) run on the fiber through tag-variable
tricks; over the dual numbers they are recomputed degreewise by exact linear
algebra, with the fiber result fixing the degree window.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from . import linalg
from .errors import MixedBase
from .polyring import (
    NVARS,
    Poly,
    ZERO_EXP,
    graded_piece_dim,
    grevlex_key,
    monomial_index,
    monomials,
)
from .scalars import BaseRing

# -- raw engine on dict polynomials ------------------------------------


def _raw_grevlex(e):
    return (sum(e), tuple(-x for x in reversed(e)))


def _raw_elim_first(e):
    # product order: tag variable block (index 0) dominates, grevlex on rest
    return (e[0], _raw_grevlex(e[1:]))


def _lead(f, key):
    e = max(f, key=key)
    return e, f[e]


def _divides(e1, e2):
    return all(a <= b for a, b in zip(e1, e2))


def _quot(e2, e1):
    return tuple(b - a for a, b in zip(e1, e2))


def _lcm(e1, e2):
    return tuple(max(a, b) for a, b in zip(e1, e2))


def _raw_add_scaled(f, g, c, shift, p):
    """f + c * x^shift * g, in place on a dict copy of f."""
    out = dict(f)
    for e, a in g.items():
        em = tuple(x + y for x, y in zip(e, shift))
        v = (out.get(em, 0) + c * a) % p
        if v:
            out[em] = v
        else:
            out.pop(em, None)
    return out


def raw_normal_form(f, basis, p, key=_raw_grevlex):
    """Full normal form: no term of the result is divisible by a lead term."""
    f = dict(f)
    leads = [( _lead(g, key)[0], g) for g in basis if g]
    out = {}
    while f:
        e, c = _lead(f, key)
        hit = None
        for le, g in leads:
            if _divides(le, e):
                hit = (le, g)
                break
        if hit is None:
            out[e] = c
            del f[e]
            continue
        le, g = hit
        lc = g[le]
        factor = (-c * pow(lc, p - 2, p)) % p
        f = _raw_add_scaled(f, g, factor, _quot(e, le), p)
    return out


def raw_spoly(f, g, p, key=_raw_grevlex):
    ef, cf = _lead(f, key)
    eg, cg = _lead(g, key)
    l = _lcm(ef, eg)
    inv_cf = pow(cf, p - 2, p)
    a = _raw_add_scaled({}, f, inv_cf, _quot(l, ef), p)
    return _raw_add_scaled(a, g, (-pow(cg, p - 2, p)) % p, _quot(l, eg), p)


def raw_buchberger(gens, p, key=_raw_grevlex):
    """Reduced monic Groebner basis of the ideal generated by gens."""
    basis = [dict(g) for g in gens if g]
    if not basis:
        return []
    pairs = [(i, j) for i in range(len(basis)) for j in range(i + 1, len(basis))]
    while pairs:
        i, j = pairs.pop()
        ei, _ = _lead(basis[i], key)
        ej, _ = _lead(basis[j], key)
        if _lcm(ei, ej) == tuple(a + b for a, b in zip(ei, ej)):
            continue  # coprime lead terms: S-polynomial reduces to 0
        s = raw_normal_form(raw_spoly(basis[i], basis[j], p, key), basis, p, key)
        if s:
            basis.append(s)
            k = len(basis) - 1
            pairs.extend((t, k) for t in range(k))
    return raw_interreduce(basis, p, key)


def raw_interreduce(basis, p, key=_raw_grevlex):
    # drop redundant lead terms, then tail-reduce and normalize
    basis = [g for g in basis if g]
    leads = [_lead(g, key)[0] for g in basis]
    keep = []
    for i, e in enumerate(leads):
        if not any(
            j != i and _divides(leads[j], e) and (leads[j] != e or j < i)
            for j in range(len(basis))
        ):
            keep.append(i)
    basis = [basis[i] for i in keep]
    out = []
    for i, g in enumerate(basis):
        others = basis[:i] + basis[i + 1 :]
        r = raw_normal_form(g, others, p, key)
        if r:
            e, c = _lead(r, key)
            inv = pow(c, p - 2, p)
            out.append({m: (a * inv) % p for m, a in r.items()})
    out.sort(key=lambda g: key(_lead(g, key)[0]))
    return out


# -- conversion between Poly and raw form -------------------------------


def poly_to_raw(f: Poly) -> dict:
    """Fiber part of a 4-variable Poly as a raw dict."""
    return {e: a for e, (a, _) in f.terms.items() if a % f.base.p}


def raw_to_poly(raw: dict, base: BaseRing) -> Poly:
    return Poly(base, {e: (c % base.p, 0) for e, c in raw.items()})


def _pad_tag(raw: dict, tag_exp: int = 0) -> dict:
    return {(tag_exp,) + e: c for e, c in raw.items()}


def _strip_tag(raw: dict) -> dict:
    return {e[1:]: c for e, c in raw.items()}


# -- Ideal --------------------------------------------------------------


class Ideal:
    """Homogeneous ideal of R_A with a write-once fiber Groebner cache."""

    def __init__(self, base: BaseRing, gens):
        self.base = base
        gens = [g for g in gens if not g.is_zero()]
        for g in gens:
            if g.base != base:
                raise MixedBase("generator over a different base ring")
            if not g.is_homogeneous():
                raise ValueError(f"non-homogeneous generator {g}")
        self.gens = tuple(gens)
        self._gb = None

    @staticmethod
    def parse(base: BaseRing, texts) -> "Ideal":
        return Ideal(base, [Poly.parse(t, base) for t in texts])

    def fiber(self) -> "Ideal":
        if not self.base.dual:
            return self
        return Ideal(self.base.field(), [g.fiber() for g in self.gens])

    def groebner_basis(self):
        """Reduced fiber Groebner basis, as Polys over the fiber field."""
        if self._gb is None:
            p = self.base.p
            raw = raw_buchberger([poly_to_raw(g) for g in self.gens], p)
            k = self.base.field()
            self._gb = tuple(raw_to_poly(g, k) for g in raw)
        return self._gb

    def _gb_raw(self):
        return [poly_to_raw(g) for g in self.groebner_basis()]

    def normal_form(self, f: Poly) -> Poly:
        """Fiber normal form of the fiber of f."""
        raw = raw_normal_form(poly_to_raw(f), self._gb_raw(), self.base.p)
        return raw_to_poly(raw, self.base.field())

    def fiber_contains(self, f: Poly) -> bool:
        return not self.normal_form(f)

    def contains(self, f: Poly) -> bool:
        """Exact membership over the base ring (degreewise over A)."""
        if not self.base.dual:
            return self.fiber_contains(f)
        if f.is_zero():
            return True
        for d, comp in f.homogeneous_components():
            mat = self.piece_matrix(d)
            vec = poly_to_vector(comp, d)
            if not linalg.row_space_contains(mat.T, vec, self.base.p):
                return False
        return True

    def is_unit_ideal(self) -> bool:
        gb = self.groebner_basis()
        if not (len(gb) == 1 and gb[0].degree() == 0):
            return False
        if not self.base.dual:
            return True
        return self.contains(Poly.one(self.base))

    def is_zero_ideal(self) -> bool:
        return not self.gens

    def lead_exponents(self):
        return [g.leading()[0] for g in self.groebner_basis()]

    # -- degreewise pieces (valid over both bases) ---------------------

    def piece_matrix(self, n: int) -> np.ndarray:
        """Basis of the degree-n piece as stacked coordinate columns.

        Over the field the stacking is trivial (epsilon block zero); over A
        the columns span the piece as a k-space closed under epsilon.
        """
        p = self.base.p
        dim = graded_piece_dim(n)
        cols = []
        for g in self.gens:
            d = g.degree()
            if d > n or d < 0:
                continue
            for m in monomials(n - d):
                cols.append(poly_to_vector(g.mul_monomial(m), n))
        if not cols:
            return linalg.zeros(2 * dim, 0)
        mat = np.array(cols, dtype=np.int64).T % p
        if self.base.dual:
            eps = linalg.eps_action(dim)
            mat = np.concatenate([mat, linalg.matmul(eps, mat, p)], axis=1)
        # column-reduce to a basis
        red, pivots = linalg.rref(mat.T, p)
        return red.T[:, : len(pivots)] if pivots else linalg.zeros(2 * dim, 0)

    def piece_dim(self, n: int) -> int:
        """k-dimension of the degree-n piece of the ideal."""
        if not self.base.dual:
            return graded_piece_dim(n) - _standard_monomial_count(
                tuple(self.lead_exponents()), n
            )
        return self.piece_matrix(n).shape[1]

    def quotient_piece_dim(self, n: int) -> int:
        """k-dimension of (R_A/I)_n."""
        total = graded_piece_dim(n) * (2 if self.base.dual else 1)
        return total - self.piece_dim(n)

    def hilbert_function(self, n_max: int):
        """dim_k (R/I)_n for the fiber ideal, n = 0..n_max."""
        leads = tuple(self.lead_exponents())
        return [_standard_monomial_count(leads, n) for n in range(n_max + 1)]

    def krull_dimension(self) -> int:
        """Krull dimension of R_k / (fiber ideal)."""
        gb = self.groebner_basis()
        if len(gb) == 1 and gb[0].degree() == 0:
            return -1
        leads = self.lead_exponents()
        supports = [frozenset(i for i, x in enumerate(e) if x) for e in leads]
        best = 0
        for mask in range(16):
            s = frozenset(i for i in range(NVARS) if mask & (1 << i))
            if any(sup <= s for sup in supports):
                continue
            best = max(best, len(s))
        return best

    def __eq__(self, other):
        if not isinstance(other, Ideal) or self.base != other.base:
            return False
        if not self.base.dual:
            return self.groebner_basis() == other.groebner_basis()
        if self.fiber().groebner_basis() != other.fiber().groebner_basis():
            return False
        top = max(
            [g.degree() for g in self.gens] + [g.degree() for g in other.gens],
            default=0,
        )
        for n in range(top + 1):
            a, b = self.piece_matrix(n), other.piece_matrix(n)
            if a.shape[1] != b.shape[1]:
                return False
            joint = np.concatenate([a, b], axis=1)
            if linalg.rank(joint.T, self.base.p) != a.shape[1]:
                return False
        return True

    def __hash__(self):
        return hash((self.base, self.groebner_basis()))

    def __repr__(self):
        return "Ideal(" + ", ".join(str(g) for g in self.gens) + ")"


@lru_cache(maxsize=None)
def _standard_monomial_count(leads: tuple, n: int) -> int:
    return sum(
        1 for m in monomials(n) if not any(_divides(e, m) for e in leads)
    )


def poly_to_vector(f: Poly, n: int) -> np.ndarray:
    """Stacked coordinates of a homogeneous degree-n Poly: (fiber; eps)."""
    dim = graded_piece_dim(n)
    idx = monomial_index(n)
    out = np.zeros(2 * dim, dtype=np.int64)
    for e, (a, b) in f.terms.items():
        i = idx[e]
        out[i] = a
        out[dim + i] = b
    return out


def vector_to_poly(vec: np.ndarray, n: int, base: BaseRing) -> Poly:
    dim = graded_piece_dim(n)
    mons = monomials(n)
    terms = {}
    for i in range(dim):
        a = int(vec[i]) % base.p
        b = int(vec[dim + i]) % base.p if base.dual else 0
        if a or b:
            terms[mons[i]] = (a, b)
    return Poly(base, terms)


# -- fiber ideal operations via tag variable ----------------------------


def _elim_intersection_raw(gens_i, gens_j, p):
    """Raw generators of I cap J in 4 variables (fiber)."""
    tagged = [_pad_tag(g, 1) for g in gens_i]  # t * f
    for g in gens_j:
        tg = _pad_tag(g, 1)
        g0 = _pad_tag(g, 0)
        tagged.append(_raw_add_scaled(g0, tg, p - 1, (0, 0, 0, 0, 0), p))  # (1-t) g
    gb = raw_buchberger(tagged, p, key=_raw_elim_first)
    return [_strip_tag(g) for g in gb if all(e[0] == 0 for e in g)]


def fiber_intersect(I: Ideal, J: Ideal) -> Ideal:
    if I.base != J.base:
        raise MixedBase("intersection across base rings")
    base = I.base.field()
    p = base.p
    raw = _elim_intersection_raw(
        [poly_to_raw(g) for g in I.gens], [poly_to_raw(g) for g in J.gens], p
    )
    return Ideal(base, [raw_to_poly(g, base) for g in raw])


def _raw_divide_exact(f, g, p, key=_raw_grevlex):
    """Exact division f / g of raw polynomials; f must be a multiple."""
    q = {}
    f = dict(f)
    eg, cg = _lead(g, key)
    inv = pow(cg, p - 2, p)
    while f:
        e, c = _lead(f, key)
        assert _divides(eg, e), "inexact division"
        shift = _quot(e, eg)
        coeff = (c * inv) % p
        q[shift] = coeff
        f = _raw_add_scaled(f, g, (-coeff) % p, shift, p)
    return q


def fiber_colon_poly(I: Ideal, f: Poly) -> Ideal:
    """(I : f) over the fiber via I : f = (I cap (f)) / f."""
    base = I.base.field()
    p = base.p
    fr = poly_to_raw(f)
    if not fr:
        return Ideal(base, [Poly.one(base)])
    inter = _elim_intersection_raw([poly_to_raw(g) for g in I.gens], [fr], p)
    quots = [_raw_divide_exact(g, fr, p) for g in inter]
    return Ideal(base, [raw_to_poly(q, base) for q in quots])


def fiber_colon(I: Ideal, J: Ideal) -> Ideal:
    """(I : J) over the fiber: intersection of colons by generators."""
    base = I.base.field()
    out = None
    for g in J.gens:
        c = fiber_colon_poly(I, g)
        out = c if out is None else fiber_intersect(out, c)
    if out is None:  # J = 0
        return Ideal(base, [Poly.one(base)])
    return out


def fiber_saturate(I: Ideal) -> Ideal:
    """I : (X,Y,Z,W)^infinity over the fiber, by iterating I : m."""
    base = I.base.field()
    irrelevant = Ideal(base, [Poly.variable(base, i) for i in range(NVARS)])
    cur = I if not I.base.dual else I.fiber()
    while True:
        nxt = fiber_colon(cur, irrelevant)
        if nxt == cur:
            return cur
        cur = nxt


# -- dual-number ideal operations (degreewise) ---------------------------


def _gen_degrees_window(fiber_result: Ideal, margin: int = 0) -> int:
    return max([g.degree() for g in fiber_result.gens], default=0) + margin


def _extract_generators(base: BaseRing, piece_fn, top: int):
    """Collect minimal generators of a degreewise-described ideal over A.

    piece_fn(n) returns the stacked basis matrix of the degree-n piece.
    Generators in degree n are piece vectors outside the A-span of lower
    degree generators' multiples.
    """
    p = base.p
    gens = []
    for n in range(top + 1):
        dim = graded_piece_dim(n)
        piece = piece_fn(n)
        if piece.shape[1] == 0:
            continue
        span = linalg.Span(2 * dim, p)
        eps = linalg.eps_action(dim) if base.dual else None
        for g in gens:
            d = g.degree()
            for m in monomials(n - d):
                vec = poly_to_vector(g.mul_monomial(m), n)
                span.add(vec)
                if base.dual:
                    span.add(linalg.matmul(eps, vec.reshape(-1, 1), p).reshape(-1))
        if base.dual:
            span.add_many(linalg.matmul(eps, piece, p))
        for j in range(piece.shape[1]):
            if span.add(piece[:, j]):
                gens.append(vector_to_poly(piece[:, j], n, base))
                if base.dual:
                    span.add(
                        linalg.matmul(eps, piece[:, j].reshape(-1, 1), p).reshape(-1)
                    )
    return gens


def _solve_piece(base, constraint_rows, n):
    """Solutions f in (R_A)_n of a stack of k-linear constraints, as a
    stacked-column matrix."""
    p = base.p
    dim = graded_piece_dim(n)
    width = 2 * dim
    if not constraint_rows:
        mat = linalg.zeros(0, width)
    else:
        mat = np.vstack(constraint_rows) % p
    ker = linalg.kernel_basis(mat, p)
    if not base.dual:
        # restrict to epsilon-free solutions
        keep = [j for j in range(ker.shape[1]) if not ker[dim:, j].any()]
        ker = ker[:, keep] if keep else linalg.zeros(width, 0)
    return ker


def _multiplication_rows(g: Poly, n: int, target_piece: np.ndarray, p: int, dual: bool):
    """k-linear constraints on f in degree n saying f*g lies in the span of
    target_piece (a stacked basis in degree n + deg g)."""
    d = g.degree()
    m = n + d
    dim_n, dim_m = graded_piece_dim(n), graded_piece_dim(m)
    # matrix of multiplication by g: (R)_n -> (R)_m on stacked coordinates
    mult = linalg.zeros(2 * dim_m, 2 * dim_n)
    for j, mono in enumerate(monomials(n)):
        vec = poly_to_vector(g.mul_monomial(mono), m)
        mult[:, j] = vec
        if dual:
            # e * mono slot: g * (e*mono) = e * (fiber of g) * mono
            eps = linalg.eps_action(dim_m)
            mult[:, dim_n + j] = linalg.matmul(
                eps, vec.reshape(-1, 1), p
            ).reshape(-1)
    # f*g in span(target) iff projection to a complement vanishes
    proj = _complement_projector(target_piece, 2 * dim_m, p)
    return linalg.matmul(proj, mult, p)


def _complement_projector(piece: np.ndarray, width: int, p: int) -> np.ndarray:
    """Rows annihilating exactly the span of the given columns."""
    if piece.shape[1] == 0:
        return linalg.identity(width)
    return linalg.kernel_basis(piece.T % p, p).T


def ideal_colon(I: Ideal, J: Ideal, margin: int = 2) -> Ideal:
    """(I : J) over the base ring of I."""
    if I.base != J.base:
        raise MixedBase("colon across base rings")
    if not I.base.dual:
        return fiber_colon(I, J)
    guide = fiber_colon(I.fiber(), J.fiber())
    top = _gen_degrees_window(guide, margin)
    p = I.base.p
    piece_cache = {}

    def ideal_piece(m):
        if m not in piece_cache:
            piece_cache[m] = I.piece_matrix(m)
        return piece_cache[m]

    def colon_piece(n):
        rows = []
        for g in J.gens:
            rows.append(
                _multiplication_rows(g, n, ideal_piece(n + g.degree()), p, True)
            )
        return _solve_piece(I.base, rows, n)

    gens = _extract_generators(I.base, colon_piece, top)
    out = Ideal(I.base, gens)
    _certify_degreewise(out, colon_piece, top + margin)
    return out


def ideal_saturate(I: Ideal, margin: int = 2) -> Ideal:
    """I : (X,Y,Z,W)^infinity over the base ring of I."""
    if not I.base.dual:
        return fiber_saturate(I)
    guide = fiber_saturate(I.fiber())
    top = _gen_degrees_window(guide, margin)
    p = I.base.p
    # test bound: multiplying by all monomials of degree c must land in I
    piece_cache = {}

    def ideal_piece(m):
        if m not in piece_cache:
            piece_cache[m] = I.piece_matrix(m)
        return piece_cache[m]

    def sat_piece_at(n, c):
        rows = []
        target = ideal_piece(n + c)
        for mono in monomials(c):
            g = Poly.monomial(I.base, mono)
            rows.append(_multiplication_rows(g, n, target, p, True))
        return _solve_piece(I.base, rows, n)

    def sat_piece(n):
        c = 1
        prev = sat_piece_at(n, c)
        while True:
            c += 1
            nxt = sat_piece_at(n, c)
            if nxt.shape[1] == prev.shape[1]:
                return prev
            prev = nxt

    gens = _extract_generators(I.base, sat_piece, top)
    out = Ideal(I.base, gens)
    _certify_degreewise(out, sat_piece, top + margin)
    return out


def _certify_degreewise(result: Ideal, piece_fn, top: int):
    """Check the extracted generators reproduce every described piece."""
    from .errors import CertificationError

    p = result.base.p
    for n in range(top + 1):
        want = piece_fn(n)
        got = result.piece_matrix(n)
        if want.shape[1] != got.shape[1]:
            raise CertificationError(
                f"degree {n}: generated piece has k-dim {got.shape[1]}, "
                f"described piece {want.shape[1]}"
            )
        joint = np.concatenate([want, got], axis=1)
        if linalg.rank(joint.T, p) != got.shape[1]:
            raise CertificationError(f"degree {n}: piece mismatch")


def ideal_intersect(I: Ideal, J: Ideal, margin: int = 2) -> Ideal:
    if I.base != J.base:
        raise MixedBase("intersection across base rings")
    if not I.base.dual:
        return fiber_intersect(I, J)
    guide = fiber_intersect(I.fiber(), J.fiber())
    top = _gen_degrees_window(guide, margin)
    p = I.base.p

    def inter_piece(n):
        a, b = I.piece_matrix(n), J.piece_matrix(n)
        if a.shape[1] == 0 or b.shape[1] == 0:
            return linalg.zeros(2 * graded_piece_dim(n), 0)
        stack = np.concatenate([a, -b % p], axis=1)
        ker = linalg.kernel_basis(stack, p)
        if ker.shape[1] == 0:
            return linalg.zeros(2 * graded_piece_dim(n), 0)
        vecs = linalg.matmul(a, ker[: a.shape[1]], p)
        red, piv = linalg.rref(vecs.T, p)
        return red.T[:, : len(piv)] if piv else linalg.zeros(2 * graded_piece_dim(n), 0)

    gens = _extract_generators(I.base, inter_piece, top)
    out = Ideal(I.base, gens)
    _certify_degreewise(out, inter_piece, top + margin)
    return out


def ideal_sum(I: Ideal, J: Ideal) -> Ideal:
    if I.base != J.base:
        raise MixedBase("sum across base rings")
    return Ideal(I.base, list(I.gens) + list(J.gens))


def ideal_product_poly(H: Poly, I: Ideal) -> Ideal:
    """The ideal H * I (generators scaled)."""
    return Ideal(I.base, [H * g for g in I.gens])


def ideal_contains_ideal(I: Ideal, J: Ideal) -> bool:
    return all(I.contains(g) for g in J.gens)
