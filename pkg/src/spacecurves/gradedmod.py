"""Finitely presented graded modules over R_A and their homological algebra.

A module is the cokernel of a graded matrix between twisted free modules.
All structural computations (syzygies, minimal resolutions, Hom, Ext,
cohomology) reduce to exact linear algebra on graded pieces: each piece of a
twisted free module is a finite free module over the base ring A, coordinates
are stacked (fiber; epsilon) vectors, and generators are extracted by graded
Nakayama over the local ring.

Twist convention: a FreeModule with twists (t_1, ..., t_r) is R(t_1) + ... +
R(t_r); the generator of R(t) sits in degree -t; the (i, j) entry of a map
has degree target_twist_i - source_twist_j.
"""

from __future__ import annotations

import random
from functools import lru_cache
from math import comb

import numpy as np

from . import linalg
from .errors import (
    CertificationError,
    MixedBase,
    NotFiniteLength,
    NotLiftable,
)
from .polyring import Poly, graded_piece_dim, monomial_index, monomials
from .scalars import BaseRing


class FreeModule:
    """A direct sum of twisted copies of R_A."""

    __slots__ = ("base", "twists")

    def __init__(self, base: BaseRing, twists):
        self.base = base
        self.twists = tuple(int(t) for t in twists)

    @property
    def rank(self) -> int:
        return len(self.twists)

    def shift(self, h: int) -> "FreeModule":
        return FreeModule(self.base, [t + h for t in self.twists])

    def dual(self, shift: int = 0) -> "FreeModule":
        """Hom(F, R(shift))."""
        return FreeModule(self.base, [-t + shift for t in self.twists])

    def block_dims(self, n: int):
        return [graded_piece_dim(n + t) for t in self.twists]

    def fiber_dim(self, n: int) -> int:
        return sum(self.block_dims(n))

    def piece_dim(self, n: int) -> int:
        """k-dimension of the degree-n piece over the base ring."""
        return self.fiber_dim(n) * (2 if self.base.dual else 1)

    def min_degree(self) -> int:
        """Lowest degree with a nonzero piece; 1 past cap when rank 0."""
        return min((-t for t in self.twists), default=0)

    def zero_element(self):
        return tuple(Poly.zero(self.base) for _ in range(self.rank))

    def __eq__(self, other):
        return (
            isinstance(other, FreeModule)
            and self.base == other.base
            and self.twists == other.twists
        )

    def __hash__(self):
        return hash((self.base, self.twists))

    def __repr__(self):
        return f"FreeModule{self.twists}"


def element_to_vector(F: FreeModule, elem, n: int) -> np.ndarray:
    """Stacked coordinates of a degree-n element (tuple of Polys)."""
    dims = F.block_dims(n)
    D = sum(dims)
    dual = F.base.dual
    out = np.zeros(2 * D if dual else D, dtype=np.int64)
    off = 0
    for i, f in enumerate(elem):
        d = n + F.twists[i]
        idx = monomial_index(d) if d >= 0 else {}
        for e, (a, b) in f.terms.items():
            j = off + idx[e]
            out[j] = a
            if dual:
                out[D + j] = b
            elif b:
                raise MixedBase("epsilon coefficient over a prime field")
        off += dims[i]
    return out


def vector_to_element(F: FreeModule, vec: np.ndarray, n: int):
    dims = F.block_dims(n)
    D = sum(dims)
    dual = F.base.dual
    p = F.base.p
    out = []
    off = 0
    for i in range(F.rank):
        d = n + F.twists[i]
        mons = monomials(d)
        terms = {}
        for j in range(dims[i]):
            a = int(vec[off + j]) % p
            b = int(vec[D + off + j]) % p if dual else 0
            if a or b:
                terms[mons[j]] = (a, b)
        out.append(Poly(F.base, terms))
        off += dims[i]
    return tuple(out)


def eps_matrix(F: FreeModule, n: int) -> np.ndarray:
    """Multiplication by epsilon on the stacked degree-n piece."""
    D = F.fiber_dim(n)
    return linalg.eps_action(D)


def element_degree(F: FreeModule, elem) -> int:
    """Degree of a homogeneous element; None if zero."""
    for i, f in enumerate(elem):
        if not f.is_zero():
            return f.degree() - F.twists[i]
    return None


class GradedMap:
    """A degree-0 map between twisted free modules, as a Poly matrix."""

    __slots__ = ("source", "target", "matrix", "_cache")

    def __init__(self, source: FreeModule, target: FreeModule, matrix):
        if source.base != target.base:
            raise MixedBase("map across base rings")
        self.source = source
        self.target = target
        self.matrix = tuple(tuple(row) for row in matrix)
        if len(self.matrix) != target.rank or any(
            len(r) != source.rank for r in self.matrix
        ):
            raise ValueError("matrix shape does not match ranks")
        for i in range(target.rank):
            for j in range(source.rank):
                f = self.matrix[i][j]
                if f.is_zero():
                    continue
                want = target.twists[i] - source.twists[j]
                if not f.is_homogeneous() or f.degree() != want:
                    raise ValueError(
                        f"entry ({i},{j}) = {f} must be homogeneous of degree {want}"
                    )
        self._cache = {}

    @property
    def base(self):
        return self.source.base

    @staticmethod
    def zero(source: FreeModule, target: FreeModule) -> "GradedMap":
        z = Poly.zero(source.base)
        return GradedMap(
            source, target, [[z] * source.rank for _ in range(target.rank)]
        )

    @staticmethod
    def from_columns(target: FreeModule, columns, degrees) -> "GradedMap":
        """Map whose source generators hit the given elements of target."""
        source = FreeModule(target.base, [-d for d in degrees])
        matrix = [
            [columns[j][i] for j in range(len(columns))]
            for i in range(target.rank)
        ]
        return GradedMap(source, target, matrix)

    def column(self, j: int):
        return tuple(self.matrix[i][j] for i in range(self.target.rank))

    def apply(self, elem):
        """Image of an element of the source (tuple of Polys)."""
        out = []
        for i in range(self.target.rank):
            acc = Poly.zero(self.base)
            for j in range(self.source.rank):
                acc = acc + self.matrix[i][j] * elem[j]
            out.append(acc)
        return tuple(out)

    def compose(self, other: "GradedMap") -> "GradedMap":
        """self o other."""
        if other.target != self.source:
            raise ValueError("composition shape mismatch")
        cols = [self.apply(other.column(j)) for j in range(other.source.rank)]
        matrix = [
            [cols[j][i] for j in range(other.source.rank)]
            for i in range(self.target.rank)
        ]
        return GradedMap(other.source, self.target, matrix)

    def is_zero(self) -> bool:
        return all(f.is_zero() for row in self.matrix for f in row)

    def dual(self, shift: int = 0) -> "GradedMap":
        """Hom(-, R(shift)): transposed matrix between dualized modules."""
        src = self.target.dual(shift)
        tgt = self.source.dual(shift)
        matrix = [
            [self.matrix[i][j] for i in range(self.target.rank)]
            for j in range(self.source.rank)
        ]
        return GradedMap(src, tgt, matrix)

    def shift(self, h: int) -> "GradedMap":
        return GradedMap(self.source.shift(h), self.target.shift(h), self.matrix)

    def fiber(self) -> "GradedMap":
        k = self.base.field()
        return GradedMap(
            FreeModule(k, self.source.twists),
            FreeModule(k, self.target.twists),
            [[f.fiber() for f in row] for row in self.matrix],
        )

    def lift_base(self, base: BaseRing) -> "GradedMap":
        return GradedMap(
            FreeModule(base, self.source.twists),
            FreeModule(base, self.target.twists),
            [[f.lift(base) for f in row] for row in self.matrix],
        )

    def matrix_at(self, n: int) -> np.ndarray:
        """The k-linear matrix of the map on degree-n stacked pieces."""
        if n in self._cache:
            return self._cache[n]
        p = self.base.p
        dual = self.base.dual
        Dt = self.target.fiber_dim(n)
        src_dims = self.source.block_dims(n)
        Ds = sum(src_dims)
        width = 2 * Ds if dual else Ds
        height = 2 * Dt if dual else Dt
        out = np.zeros((height, width), dtype=np.int64)
        col = 0
        cols_fiber = []
        for j in range(self.source.rank):
            d = n + self.source.twists[j]
            column = self.column(j)
            for m in monomials(d):
                elem = tuple(f.mul_monomial(m) for f in column)
                vec = element_to_vector(self.target, elem, n)
                out[:, col] = vec
                cols_fiber.append(col)
                col += 1
        if dual:
            eps = linalg.eps_action(Dt)
            for j, c in enumerate(cols_fiber):
                out[:, Ds + j] = linalg.matmul(
                    eps, out[:, c].reshape(-1, 1), p
                ).reshape(-1)
        self._cache[n] = out % p
        return self._cache[n]

    def __repr__(self):
        rows = ["[" + ", ".join(str(f) for f in row) + "]" for row in self.matrix]
        return f"GradedMap {self.source.twists} -> {self.target.twists}\n" + "\n".join(rows)


# -- generator extraction ------------------------------------------------


def min_generators(F: FreeModule, piece_fn, cap: int):
    """Minimal generators of a graded submodule of F described degreewise.

    piece_fn(n) returns a stacked-column matrix spanning the degree-n piece
    (closed under epsilon over A).  Returns (elements, degrees).
    """
    base = F.base
    p = base.p
    dual = base.dual
    gens = []
    degs = []
    n0 = F.min_degree()
    for n in range(n0, cap + 1):
        piece = piece_fn(n)
        if piece.shape[1] == 0:
            continue
        D = F.fiber_dim(n)
        width = 2 * D if dual else D
        span = linalg.Span(width, p)
        for g, d in zip(gens, degs):
            for m in monomials(n - d):
                span.add(element_to_vector(F, tuple(f.mul_monomial(m) for f in g), n))
        if dual:
            eps = linalg.eps_action(D)
            span.add_many(linalg.matmul(eps, piece, p))
        for j in range(piece.shape[1]):
            if span.add(piece[:, j]):
                gens.append(vector_to_element(F, piece[:, j], n))
                degs.append(n)
                if dual:
                    eps = linalg.eps_action(D)
                    span.add(
                        linalg.matmul(eps, piece[:, j].reshape(-1, 1), p).reshape(-1)
                    )
    return gens, degs


def kernel_min_gens(phi: GradedMap, cap: int) -> GradedMap:
    """Map onto ker(phi) from a free module on its minimal generators."""

    def piece(n):
        return linalg.kernel_basis(phi.matrix_at(n), phi.base.p)

    gens, degs = min_generators(phi.source, piece, cap)
    return GradedMap.from_columns(phi.source, gens, degs)


def image_min_gens(phi: GradedMap, cap: int) -> GradedMap:
    """Map onto im(phi) from a free module on its minimal generators."""
    p = phi.base.p

    def piece(n):
        mat = phi.matrix_at(n)
        red, piv = linalg.rref(mat.T, p)
        return red.T[:, : len(piv)] if piv else np.zeros((mat.shape[0], 0), dtype=np.int64)

    gens, degs = min_generators(phi.target, piece, cap)
    return GradedMap.from_columns(phi.target, gens, degs)


# -- graded modules ------------------------------------------------------


class GradedModule:
    """Cokernel of a graded map between twisted free modules."""

    __slots__ = ("presentation", "_cache")

    def __init__(self, presentation: GradedMap):
        self.presentation = presentation
        self._cache = {}

    @property
    def base(self):
        return self.presentation.base

    @property
    def F0(self) -> FreeModule:
        return self.presentation.target

    @property
    def F1(self) -> FreeModule:
        return self.presentation.source

    @staticmethod
    def free(base: BaseRing, twists) -> "GradedModule":
        F = FreeModule(base, twists)
        return GradedModule(GradedMap.zero(FreeModule(base, []), F))

    @staticmethod
    def zero(base: BaseRing) -> "GradedModule":
        return GradedModule.free(base, [])

    @staticmethod
    def from_ideal(ideal) -> "GradedModule":
        """The ideal as a graded module: generators and their syzygies."""
        base = ideal.base
        degs = [g.degree() for g in ideal.gens]
        F0 = FreeModule(base, [-d for d in degs])
        row = GradedMap(
            F0, FreeModule(base, [0]), [list(ideal.gens)]
        )
        cap = (max(degs, default=0)) * 2 + 4
        syz = kernel_min_gens(row, cap)
        return GradedModule(syz)

    @staticmethod
    def quotient_by_ideal(ideal) -> "GradedModule":
        """R_A / I as a graded module."""
        base = ideal.base
        F0 = FreeModule(base, [0])
        F1 = FreeModule(base, [-g.degree() for g in ideal.gens])
        return GradedModule(GradedMap(F1, F0, [list(ideal.gens)]))

    def shift(self, h: int) -> "GradedModule":
        return GradedModule(self.presentation.shift(h))

    def fiber(self) -> "GradedModule":
        return GradedModule(self.presentation.fiber())

    def tensor_residue_field(self) -> "GradedModule":
        """M tensor_A k: over a field this is M itself."""
        return self.fiber() if self.base.dual else self

    def piece_dim(self, n: int) -> int:
        key = ("dim", n)
        if key not in self._cache:
            full = self.F0.piece_dim(n)
            self._cache[key] = full - linalg.rank(
                self.presentation.matrix_at(n), self.base.p
            )
        return self._cache[key]

    def hilbert_function(self, lo: int, hi: int) -> dict:
        return {n: self.piece_dim(n) for n in range(lo, hi + 1)}

    def min_degree(self) -> int:
        return self.F0.min_degree()

    # -- minimal presentation -----------------------------------------

    def minimal_presentation(self) -> "GradedModule":
        if "minpres" not in self._cache:
            self._cache["minpres"] = GradedModule(
                _minimalize_map(self.presentation)
            )
        return self._cache["minpres"]

    def strip_free_summands(self):
        """(M0, stripped twists) with M = M0 + free part.

        Free summands show up in a minimal presentation as generators whose
        relation row is identically zero: no relation touches them, and
        minimality guarantees the splitting is canonical.
        """
        mp = self.minimal_presentation().presentation
        free_rows = [
            i
            for i in range(mp.target.rank)
            if all(mp.matrix[i][j].is_zero() for j in range(mp.source.rank))
        ]
        keep = [i for i in range(mp.target.rank) if i not in free_rows]
        stripped = [mp.target.twists[i] for i in free_rows]
        new_target = FreeModule(self.base, [mp.target.twists[i] for i in keep])
        matrix = [[mp.matrix[i][j] for j in range(mp.source.rank)] for i in keep]
        # relations may repeat after dropping rows; prune zero columns
        cols = [
            j
            for j in range(mp.source.rank)
            if any(not matrix[i][j].is_zero() for i in range(len(keep)))
        ]
        new_source = FreeModule(self.base, [mp.source.twists[j] for j in cols])
        matrix = [[matrix[i][j] for j in cols] for i in range(len(keep))]
        return GradedModule(GradedMap(new_source, new_target, matrix)), stripped

    # -- resolutions ----------------------------------------------------

    def resolution(self, cap: int = None, margin: int = 2):
        """Minimal free resolution as a list of GradedMaps F1->F0, F2->F1, ...

        Exactness is certified degreewise up to the final cap; compositions
        are checked symbolically.
        """
        key = "resolution"
        if key in self._cache:
            return self._cache[key]
        maps = _resolve(self.presentation, cap, margin)
        if self.base.dual:
            fiber_maps = _resolve(self.presentation.fiber(), cap, margin)
            mine = [m.source.twists for m in maps]
            theirs = [m.source.twists for m in fiber_maps]
            if [sorted(t) for t in mine] != [sorted(t) for t in theirs]:
                raise NotLiftable(
                    f"resolution over the dual numbers has twists {mine}, "
                    f"fiber has {theirs}; the module is not flat"
                )
        self._cache[key] = maps
        return maps

    def regularity(self) -> int:
        key = "reg"
        if key not in self._cache:
            maps = self.fiber().resolution() if self.base.dual else self.resolution()
            best = max((-t for t in maps[0].target.twists), default=0)
            for j, m in enumerate(maps, start=1):
                best = max(
                    best, max((-t - j for t in m.source.twists), default=best)
                )
            self._cache[key] = best
        return self._cache[key]

    def betti_twists(self):
        """Twists of the minimal fiber resolution, one tuple per step."""
        maps = self.fiber().resolution() if self.base.dual else self.resolution()
        out = [tuple(sorted(maps[0].target.twists))]
        for m in maps:
            if m.source.rank:
                out.append(tuple(sorted(m.source.twists)))
        return out

    def projective_dimension(self):
        """(module pd, sheaf dp): sheaf dp is the largest i > 0 with
        Ext^i(M, R) of infinite length (0 when none)."""
        key = "pd"
        if key in self._cache:
            return self._cache[key]
        maps = self.resolution()
        pd = sum(1 for m in maps if m.source.rank)
        dp = 0
        for i in range(1, pd + 1):
            E = ext_module(self, i, 0)
            if E.F0.rank and not E.is_finite_length():
                dp = i
        self._cache[key] = (pd, dp)
        return (pd, dp)

    def is_finite_length(self) -> bool:
        reg = self.regularity()
        lo = self.min_degree()
        if any(self.piece_dim(n) for n in range(reg + 1, reg + 4)):
            return False
        # finitely generated with eventually-zero Hilbert function
        return True

    def kpolynomial(self) -> dict:
        """Signed twist counts of the fiber resolution: determines the
        Hilbert function in every degree."""
        maps = self.fiber().resolution() if self.base.dual else self.resolution()
        out = {}
        sign = 1
        for t in maps[0].target.twists:
            out[t] = out.get(t, 0) + 1
        for j, m in enumerate(maps):
            s = -1 if j % 2 == 0 else 1
            for t in m.source.twists:
                out[t] = out.get(t, 0) + s
        return {t: c for t, c in out.items() if c}

    def __repr__(self):
        return (
            f"GradedModule(F1={self.F1.twists} -> F0={self.F0.twists})"
        )


def _minimalize_map(phi: GradedMap) -> GradedMap:
    """Cancel unit pivots: remove generator/relation pairs joined by a
    degree-0 unit entry, then drop zero relation columns."""
    base = phi.base
    matrix = [list(row) for row in phi.matrix]
    tgt = list(phi.target.twists)
    src = list(phi.source.twists)
    while True:
        pivot = None
        for i in range(len(tgt)):
            for j in range(len(src)):
                f = matrix[i][j]
                if f.is_zero() or tgt[i] != src[j]:
                    continue
                c = f.coefficient((0, 0, 0, 0))
                if c[0] % base.p:
                    pivot = (i, j, c)
                    break
            if pivot:
                break
        if pivot is None:
            break
        i, j, c = pivot
        inv = base.scalar(c[0], c[1]).invert()
        # column ops: clear row i using column j
        for jj in range(len(src)):
            if jj == j or matrix[i][jj].is_zero():
                continue
            factor = matrix[i][jj].scale(inv)
            for ii in range(len(tgt)):
                matrix[ii][jj] = matrix[ii][jj] - matrix[ii][j] * factor
        # generator i is now expressed by relation j: drop both
        matrix = [
            [matrix[ii][jj] for jj in range(len(src)) if jj != j]
            for ii in range(len(tgt))
            if ii != i
        ]
        del tgt[i]
        del src[j]
    cols = [
        j
        for j in range(len(src))
        if any(not matrix[i][j].is_zero() for i in range(len(tgt)))
    ]
    matrix = [[matrix[i][j] for j in cols] for i in range(len(tgt))]
    return GradedMap(
        FreeModule(base, [src[j] for j in cols]),
        FreeModule(base, tgt),
        matrix,
    )


def _resolve(phi: GradedMap, cap, margin):
    """Minimal free resolution of coker(phi) with self-consistent cap."""
    phi = _minimalize_map(phi)
    gen_top = max((-t for t in phi.target.twists), default=0)
    rel_top = max((-t for t in phi.source.twists), default=gen_top)
    attempt_cap = cap if cap is not None else rel_top + 4
    for _ in range(5):
        maps = _resolve_at_cap(phi, attempt_cap)
        reg = max((-t for t in maps[0].target.twists), default=0)
        for j, m in enumerate(maps, start=1):
            reg = max(reg, max((-t - j for t in m.source.twists), default=reg))
        # syzygy generators at homological step j live in degrees <= reg + j
        needed = reg + max(4, margin + 2)
        if attempt_cap >= needed:
            _certify_resolution(maps, reg + margin + 2)
            return maps
        attempt_cap = needed + 2
    raise CertificationError("resolution cap failed to stabilize")


def _resolve_at_cap(phi: GradedMap, cap: int):
    # relations must minimally generate the relation submodule, else the
    # next syzygy step would pick up unit entries
    rel = image_min_gens(phi, cap)
    maps = [rel]
    cur = rel
    for _ in range(4):
        if cur.source.rank == 0:
            break
        syz = kernel_min_gens(cur, cap)
        if syz.source.rank == 0:
            break
        maps.append(syz)
        cur = syz
    return maps


def _certify_resolution(maps, cap: int):
    p = maps[0].base.p
    for a, b in zip(maps, maps[1:]):
        if not a.compose(b).is_zero():
            raise CertificationError("nonzero composition in resolution")
    lo = min(m.target.min_degree() for m in maps)
    for i, m in enumerate(maps):
        nxt = maps[i + 1] if i + 1 < len(maps) else None
        for n in range(lo, cap + 1):
            mat = m.matrix_at(n)
            ker = mat.shape[1] - linalg.rank(mat, p)
            im = linalg.rank(nxt.matrix_at(n), p) if nxt else 0
            if ker != im:
                raise CertificationError(
                    f"exactness fails at step {i+1}, degree {n}: "
                    f"kernel {ker}, image {im}"
                )


# -- Hom ------------------------------------------------------------------


class ModuleHom:
    """A module homomorphism M -> N, carried by a map on covers F0 -> G0."""

    __slots__ = ("source", "target", "f0")

    def __init__(self, source: GradedModule, target: GradedModule, f0: GradedMap):
        self.source = source
        self.target = target
        self.f0 = f0

    def piece_matrices(self, n: int):
        """(map matrix on covers, source relations, target relations) at n."""
        return (
            self.f0.matrix_at(n),
            self.source.presentation.matrix_at(n),
            self.target.presentation.matrix_at(n),
        )

    def is_surjective_up_to(self, top: int) -> bool:
        p = self.f0.base.p
        lo = self.target.min_degree()
        for n in range(lo, top + 1):
            f, _, psi = self.piece_matrices(n)
            full = self.target.F0.piece_dim(n)
            joint = np.concatenate([f, psi], axis=1) if psi.size else f
            if linalg.rank(joint, p) != full:
                return False
        return True

    def is_injective_up_to(self, top: int) -> bool:
        """Degreewise injectivity of the induced map on pieces."""
        p = self.f0.base.p
        lo = self.source.min_degree()
        for n in range(lo, top + 1):
            if _hom_piece_kernel_dim(self, n) != 0:
                return False
        return True

    def compose(self, other: "ModuleHom") -> "ModuleHom":
        return ModuleHom(other.source, self.target, self.f0.compose(other.f0))


def _hom_piece_kernel_dim(h: ModuleHom, n: int) -> int:
    """dim ker(M_n -> N_n)."""
    p = h.f0.base.p
    f, phi, psi = h.piece_matrices(n)
    # kernel of induced map = preimage of im psi, modulo im phi
    proj = _cocomplement_rows(psi, p)
    constrained = linalg.matmul(proj, f, p) if proj.size else np.zeros((0, f.shape[1]), dtype=np.int64)
    pre = linalg.kernel_basis(constrained, p)
    dim_pre = pre.shape[1]
    rank_phi = linalg.rank(phi, p)
    return dim_pre - rank_phi


def _cocomplement_rows(mat: np.ndarray, p: int) -> np.ndarray:
    """Rows whose kernel is exactly the column space of mat."""
    if mat.shape[1] == 0:
        return linalg.identity(mat.shape[0])
    return linalg.kernel_basis(mat.T % p, p).T


def hom_space(M: GradedModule, N: GradedModule, d: int = 0):
    """Basis of Hom(M, N)_d as ModuleHoms M -> N(d), exact dimension."""
    Nd = N.shift(d)
    base = M.base
    p = base.p
    phi, psi = M.presentation, Nd.presentation
    F0, G0 = M.F0, Nd.F0
    # unknown coordinates: monomial coefficients of each entry of f0
    slots = []  # (i, j, monomial, eps_flag)
    for i in range(G0.rank):
        for j in range(F0.rank):
            deg = G0.twists[i] - F0.twists[j]
            for m in monomials(deg):
                slots.append((i, j, m, 0))
                if base.dual:
                    slots.append((i, j, m, 1))
    if not slots:
        return []
    rows = []
    for a in range(phi.source.rank):
        col = phi.column(a)
        deg = -phi.source.twists[a]
        target_piece = psi.matrix_at(deg)
        # rows annihilating im(psi) in G0 at degree `deg`
        red, piv = linalg.rref(target_piece.T, p) if target_piece.size else (np.zeros((0, G0.piece_dim(deg)), dtype=np.int64), [])
        span = red.T[:, : len(piv)] if piv else np.zeros((G0.piece_dim(deg), 0), dtype=np.int64)
        proj = _cocomplement_rows(span, p)
        if proj.shape[0] == 0:
            continue
        block = np.zeros((proj.shape[0], len(slots)), dtype=np.int64)
        for s, (i, j, m, ef) in enumerate(slots):
            contrib = col[j].mul_monomial(m)
            if ef:
                contrib = Poly(base, {e: (0, a0) for e, (a0, _) in contrib.fiber().lift(base).terms.items()})
            elem = [Poly.zero(base)] * G0.rank
            elem[i] = contrib if not ef else contrib
            vec = element_to_vector(G0, tuple(elem), deg)
            block[:, s] = linalg.matmul(proj, vec.reshape(-1, 1), p).reshape(-1)
        rows.append(block)
    mat = np.vstack(rows) if rows else np.zeros((0, len(slots)), dtype=np.int64)
    sols = linalg.kernel_basis(mat, p)
    # quotient by homs landing inside im(psi): f0 = psi o g
    trivial_cols = []
    for l in range(psi.source.rank):
        for j in range(F0.rank):
            deg = psi.source.twists[l] - F0.twists[j]
            for m in monomials(deg):
                for ef in range(2 if base.dual else 1):
                    vec = np.zeros(len(slots), dtype=np.int64)
                    for s, (i, jj, mm, eff) in enumerate(slots):
                        if jj != j:
                            continue
                        entry = psi.matrix[i][l].mul_monomial(m)
                        if ef:
                            entry = Poly(base, {e: (0, a0) for e, (a0, _) in entry.terms.items() if a0})
                        c = entry.coefficient(mm)
                        vec[s] = c[1] if eff else c[0]
                    trivial_cols.append(vec)
    if trivial_cols:
        span = linalg.Span(len(slots), p)
        for v in trivial_cols:
            span.add(v)
        pick = [j for j in range(sols.shape[1]) if span.add(sols[:, j])]
        sols = sols[:, pick] if pick else np.zeros((len(slots), 0), dtype=np.int64)
    out = []
    for c in range(sols.shape[1]):
        out.append(_hom_from_slots(M, Nd, slots, sols[:, c]))
    return out


def _hom_from_slots(M, Nd, slots, coeffs) -> ModuleHom:
    base = M.base
    p = base.p
    F0, G0 = M.F0, Nd.F0
    entries = [
        [dict() for _ in range(F0.rank)] for _ in range(G0.rank)
    ]
    for s, (i, j, m, ef) in enumerate(slots):
        c = int(coeffs[s]) % p
        if not c:
            continue
        a, b = entries[i][j].get(m, (0, 0))
        if ef:
            entries[i][j][m] = (a, (b + c) % p)
        else:
            entries[i][j][m] = ((a + c) % p, b)
    matrix = [
        [Poly(base, entries[i][j]) for j in range(F0.rank)]
        for i in range(G0.rank)
    ]
    return ModuleHom(M, Nd, GradedMap(F0, G0, matrix))


def random_hom(homs, rng, base) -> ModuleHom:
    """Random A-linear combination of a hom basis."""
    p = base.p
    M, N = homs[0].source, homs[0].target
    F0, G0 = homs[0].f0.source, homs[0].f0.target
    acc = [[Poly.zero(base) for _ in range(F0.rank)] for _ in range(G0.rank)]
    for h in homs:
        c = rng.randrange(p)
        for i in range(G0.rank):
            for j in range(F0.rank):
                acc[i][j] = acc[i][j] + h.f0.matrix[i][j].scale_int(c)
    return ModuleHom(M, N, GradedMap(F0, G0, acc))


# -- isomorphism testing ---------------------------------------------------


def is_module_iso(M: GradedModule, N: GradedModule, trials: int = 32, seed: int = 0):
    """'yes' / 'no' / 'undecided'.

    'no' is certified by a Hilbert-function or K-polynomial mismatch, or by
    an empty hom space.  'yes' is certified by an exhibited degree-0 hom that
    is surjective degreewise up to the generation bound; combined with equal
    Hilbert functions in every degree this forces an isomorphism.
    """
    if M.base != N.base:
        raise MixedBase("iso test across base rings")
    Mm = M.minimal_presentation()
    Nm = N.minimal_presentation()
    if Mm.F0.rank == 0 and Nm.F0.rank == 0:
        return "yes"
    if Mm.kpolynomial() != Nm.kpolynomial():
        return "no"
    if M.base.dual:
        lo = min(Mm.min_degree(), Nm.min_degree())
        hi = max(Mm.regularity(), Nm.regularity()) + 2
        for n in range(lo, hi + 1):
            if Mm.piece_dim(n) != Nm.piece_dim(n):
                return "no"
    homs = hom_space(Mm, Nm, 0)
    if not homs:
        return "no"
    top = max(
        max((-t for t in Nm.F0.twists), default=0),
        max((-t for t in Mm.F0.twists), default=0),
    )
    rng = random.Random(seed)
    for _ in range(trials):
        f = random_hom(homs, rng, M.base)
        if f.is_surjective_up_to(top):
            return "yes"
    return "undecided"


# -- Ext ------------------------------------------------------------------

def _dual_complex(M: GradedModule, shift: int):
    """Maps delta_i: F_i^dual -> F_{i+1}^dual of the dualized resolution."""
    key = ("dualcx", shift)
    if key not in M._cache:
        maps = M.resolution()
        M._cache[key] = [m.dual(shift) for m in maps]
    return M._cache[key]


def _ext_slot(M: GradedModule, i: int, shift: int):
    """(into, outof, home) pieces of the dualized complex at spot i."""
    deltas = _dual_complex(M, shift)
    pd = len(deltas)
    if i > pd or i < 0:
        return None, None, None
    into = deltas[i] if i < pd else None  # F_i^dual -> F_{i+1}^dual
    outof = deltas[i - 1] if i >= 1 else None  # F_{i-1}^dual -> F_i^dual
    home = outof.target if outof is not None else into.source
    return into, outof, home


def ext_piece_dims(M: GradedModule, i: int, shift: int, degrees) -> dict:
    """k-dimensions of Ext^i(M, R(shift)) in the given degrees."""
    p = M.base.p
    into, outof, home = _ext_slot(M, i, shift)
    if home is None:
        return {n: 0 for n in degrees}
    out = {}
    for n in degrees:
        if into is not None:
            mat = into.matrix_at(n)
            ker = mat.shape[1] - linalg.rank(mat, p)
        else:
            ker = home.piece_dim(n)
        im = linalg.rank(outof.matrix_at(n), p) if outof is not None else 0
        out[n] = ker - im
    return out


def ext_module(M: GradedModule, i: int, shift: int = 0) -> GradedModule:
    """Ext^i_{R_A}(M, R_A(shift)) as a presented graded module.

    Built with a growing degree cap; the presentation is accepted once its
    piece dimensions match direct kernel/image dimensions two degrees past
    the cap.
    """
    if i < 0 or i > 4:
        raise ValueError("Ext index out of range")
    key = ("ext", i, shift)
    if key in M._cache:
        return M._cache[key]
    base = M.base
    into, outof, home = _ext_slot(M, i, shift)
    if home is None:
        return GradedModule.zero(base)
    if into is None:
        K = GradedMap(
            home,
            home,
            [
                [
                    Poly.one(base) if a == b else Poly.zero(base)
                    for b in range(home.rank)
                ]
                for a in range(home.rank)
            ],
        )
    cap = home.min_degree() + 6
    for _ in range(4):
        if into is not None:
            K = kernel_min_gens(into, cap)
        E = subquotient_module(K, outof, cap)
        probe = ext_piece_dims(M, i, shift, [cap + 1, cap + 2])
        if all(E.piece_dim(n) == d for n, d in probe.items()):
            M._cache[key] = E
            return E
        cap += 4
    raise CertificationError(f"Ext^{i} cap failed to stabilize")


def subquotient_module(K: GradedMap, B: GradedMap, cap: int) -> GradedModule:
    """The module (im K + im B)/(im B), generated by the columns of K.

    K: H -> F picks generators, B: G -> F (or None) spans the submodule to
    quotient by.  Relations are kernel elements of [K | B] projected to H.
    """
    base = K.base
    if B is None:
        rel = kernel_min_gens(K, cap)
        return GradedModule(rel).minimal_presentation()
    F = K.target
    H, G = K.source, B.source
    concat_src = FreeModule(base, list(H.twists) + list(G.twists))
    matrix = [
        [K.matrix[i][j] for j in range(H.rank)]
        + [B.matrix[i][j] for j in range(G.rank)]
        for i in range(F.rank)
    ]
    joint = GradedMap(concat_src, F, matrix)
    syz = kernel_min_gens(joint, cap)
    rel_cols = []
    rel_degs = []
    for j in range(syz.source.rank):
        col = syz.column(j)
        head = col[: H.rank]
        if any(not f.is_zero() for f in head):
            rel_cols.append(head)
            rel_degs.append(-syz.source.twists[j])
    rel = GradedMap.from_columns(H, rel_cols, rel_degs)
    return GradedModule(rel).minimal_presentation()


# -- piece-level calculus ---------------------------------------------------


class PieceCalculus:
    """Canonical coordinates on the graded pieces of a module.

    Works on the minimal presentation: each piece M_n is F0_n modulo the
    relation image; coordinates are the non-pivot cover coordinates after
    reduction by the relation rref.
    """

    def __init__(self, M: GradedModule):
        self.M = M.minimal_presentation()
        self.p = M.base.p
        self.dual = M.base.dual
        self._red = {}
        self._mult = {}

    def _reducer(self, n: int):
        if n not in self._red:
            im = self.M.presentation.matrix_at(n)
            red, piv = linalg.rref(im.T, self.p)
            full = self.M.F0.piece_dim(n)
            nonpiv = [c for c in range(full) if c not in piv]
            self._red[n] = (red, piv, nonpiv)
        return self._red[n]

    def dim(self, n: int) -> int:
        return len(self._reducer(n)[2])

    def project(self, vec: np.ndarray, n: int) -> np.ndarray:
        red, piv, nonpiv = self._reducer(n)
        v = vec.copy() % self.p
        for r, c in enumerate(piv):
            coef = int(v[c]) % self.p
            if coef:
                v = (v - coef * red[r]) % self.p
        return v[nonpiv]

    def embed(self, idx: int, n: int) -> np.ndarray:
        _, _, nonpiv = self._reducer(n)
        out = np.zeros(self.M.F0.piece_dim(n), dtype=np.int64)
        out[nonpiv[idx]] = 1
        return out

    def element_coords(self, elem, n: int) -> np.ndarray:
        return self.project(element_to_vector(self.M.F0, elem, n), n)

    def mult_matrix(self, g: Poly, n: int) -> np.ndarray:
        """Multiplication by homogeneous g on quotient coordinates."""
        key = (g, n)
        if key in self._mult:
            return self._mult[key]
        d = g.degree()
        dn, dm = self.dim(n), self.dim(n + d)
        out = np.zeros((dm, dn), dtype=np.int64)
        F0 = self.M.F0
        for c in range(dn):
            elem = vector_to_element(F0, self.embed(c, n), n)
            moved = tuple(g * f for f in elem)
            out[:, c] = self.project(element_to_vector(F0, moved, n + d), n + d)
        self._mult[key] = out
        return out

    def eps_matrix_q(self, n: int) -> np.ndarray:
        """Multiplication by epsilon on quotient coordinates (dual base)."""
        dn = self.dim(n)
        D = self.M.F0.fiber_dim(n)
        out = np.zeros((dn, dn), dtype=np.int64)
        for c in range(dn):
            vec = self.embed(c, n)
            evec = linalg.matmul(linalg.eps_action(D), vec.reshape(-1, 1), self.p).reshape(-1)
            out[:, c] = self.project(evec, n)
        return out


class PowerHomCalculus:
    """Homs from m^t into a module, in generator-image coordinates.

    A hom f: m^t -> M(n) is determined by the images of the degree-t
    monomials, subject to the linear syzygies of m^t.  The coordinates of f
    are the concatenated quotient coordinates of those images in M_{n+t}.
    """

    def __init__(self, pc: PieceCalculus, t: int):
        self.pc = pc
        self.t = t
        self.base = pc.M.base
        self.mons = monomials(t)
        self.syz = _power_ideal_module(self.base, t).presentation

    def hom_basis(self, n: int) -> np.ndarray:
        """Columns: a k-basis of Hom(m^t, M)_n in image coordinates."""
        pc, t = self.pc, self.t
        p = pc.p
        N = len(self.mons)
        dv = pc.dim(n + t)
        if dv == 0:
            return np.zeros((0, 0), dtype=np.int64)
        dw = pc.dim(n + t + 1)
        rows = []
        syz = self.syz
        for s in range(syz.source.rank):
            block = np.zeros((dw, N * dv), dtype=np.int64)
            for i in range(N):
                c = syz.matrix[i][s]
                if c.is_zero():
                    continue
                block[:, i * dv : (i + 1) * dv] = pc.mult_matrix(c, n + t)
            rows.append(block)
        mat = np.vstack(rows) if rows else np.zeros((0, N * dv), dtype=np.int64)
        return linalg.kernel_basis(mat, p)

    def hom_dim(self, n: int) -> int:
        b = self.hom_basis(n)
        return b.shape[1]

    def multiplication_hom(self, f: Poly, n: int) -> np.ndarray:
        """The hom 'multiply by f' (f of degree n) in image coordinates."""
        pc = self.pc
        if pc.M.F0.rank != 1:
            raise ValueError("multiplication homs need a cyclic module")
        dv = pc.dim(n + self.t)
        out = np.zeros(len(self.mons) * dv, dtype=np.int64)
        for i, m in enumerate(self.mons):
            # image of the generator m is the class of f*m in M_{n+t}
            out[i * dv : (i + 1) * dv] = pc.element_coords(
                (f.mul_monomial(m),), n + self.t
            )
        return out

    def variable_action(self, v: int, n: int) -> np.ndarray:
        """Matrix of x_v: image coords at degree n -> image coords at n+1."""
        pc = self.pc
        dv = pc.dim(n + self.t)
        dw = pc.dim(n + 1 + self.t)
        N = len(self.mons)
        g = Poly.variable(self.base, v)
        out = np.zeros((N * dw, N * dv), dtype=np.int64)
        mult = pc.mult_matrix(g, n + self.t)
        for i in range(N):
            out[i * dw : (i + 1) * dw, i * dv : (i + 1) * dv] = mult
        return out

    def eps_action_coords(self, n: int) -> np.ndarray:
        pc = self.pc
        dv = pc.dim(n + self.t)
        N = len(self.mons)
        e = pc.eps_matrix_q(n + self.t)
        out = np.zeros((N * dv, N * dv), dtype=np.int64)
        for i in range(N):
            out[i * dv : (i + 1) * dv, i * dv : (i + 1) * dv] = e
        return out


# -- finite-length module data ---------------------------------------------


class FiniteModuleData:
    """A finite-length module as explicit pieces plus action matrices.

    dims maps degree -> k-dimension of the stacked piece; actions maps
    (degree, v) for v in 0..3 to the matrix of multiplication by the v-th
    variable from degree to degree+1; over A, eps maps degree to the matrix
    of multiplication by epsilon on the piece.
    """

    def __init__(self, base: BaseRing, dims: dict, actions: dict, eps: dict):
        self.base = base
        self.dims = {n: d for n, d in dims.items() if d}
        self.actions = actions
        self.eps = eps

    def degrees(self):
        return sorted(self.dims)

    def total_dim(self):
        return sum(self.dims.values())

    def graded_dual(self) -> "FiniteModuleData":
        """(M*)_n = dual of M_{-n}; actions transpose.

        The degree-n action X: (M*)_n -> (M*)_{n+1} is the transpose of
        X: M_{-n-1} -> M_{-n}.
        """
        dims = {-n: d for n, d in self.dims.items()}
        actions = {}
        for n in dims:
            if (n + 1) not in dims:
                continue
            for v in range(4):
                src = -n - 1
                mat = self.actions.get((src, v))
                if mat is None:
                    continue
                actions[(n, v)] = mat.T.copy()
        eps = {}
        for n in dims:
            m = self.eps.get(-n)
            if m is not None:
                eps[n] = m.T.copy()
        return FiniteModuleData(self.base, dims, actions, eps)

    def hilbert(self) -> dict:
        return dict(self.dims)

    def shift(self, h: int) -> "FiniteModuleData":
        """M(h): M(h)_n = M_{n+h}."""
        dims = {n - h: d for n, d in self.dims.items()}
        actions = {(n - h, v): m for (n, v), m in self.actions.items()}
        eps = {n - h: m for n, m in self.eps.items()}
        return FiniteModuleData(self.base, dims, actions, eps)


def finite_module_data(M: GradedModule, margin: int = 2) -> FiniteModuleData:
    """Explicit piece/action data of a finite-length module."""
    if not M.is_finite_length():
        raise NotFiniteLength(f"{M} has nonzero pieces past its regularity")
    p = M.base.p
    Mm = M.minimal_presentation()
    lo = Mm.min_degree()
    hi = Mm.regularity() + margin
    # per-degree canonical quotient bases: reduce cover coordinates by the
    # rref of the relation image, keep non-pivot coordinates
    reducers = {}
    dims = {}
    for n in range(lo, hi + 2):
        im = Mm.presentation.matrix_at(n)
        red, piv = linalg.rref(im.T, p)
        full = Mm.F0.piece_dim(n)
        nonpiv = [c for c in range(full) if c not in piv]
        reducers[n] = (red, piv, nonpiv)
        dims[n] = len(nonpiv)

    def project(vec, n):
        red, piv, nonpiv = reducers[n]
        v = vec.copy() % p
        for r, c in enumerate(piv):
            coef = int(v[c]) % p
            if coef:
                v = (v - coef * red[r]) % p
        return v[nonpiv]

    def embed(idx, n):
        _, _, nonpiv = reducers[n]
        full = Mm.F0.piece_dim(n)
        out = np.zeros(full, dtype=np.int64)
        out[nonpiv[idx]] = 1
        return out

    actions = {}
    eps = {}
    F0 = Mm.F0
    for n in range(lo, hi + 1):
        dn, dn1 = dims.get(n, 0), dims.get(n + 1, 0)
        for v in range(4):
            mono = tuple(1 if k == v else 0 for k in range(4))
            mat = np.zeros((dn1, dn), dtype=np.int64)
            for c in range(dn):
                elem = vector_to_element(F0, embed(c, n), n)
                moved = tuple(f.mul_monomial(mono) for f in elem)
                vec = element_to_vector(F0, moved, n + 1)
                mat[:, c] = project(vec, n + 1)
            actions[(n, v)] = mat
        if M.base.dual:
            D = F0.fiber_dim(n)
            emat = np.zeros((dn, dn), dtype=np.int64)
            for c in range(dn):
                vec = embed(c, n)
                evec = linalg.matmul(linalg.eps_action(D), vec.reshape(-1, 1), p).reshape(-1)
                emat[:, c] = project(evec, n)
            eps[n] = emat
    return FiniteModuleData(M.base, dims, actions, eps)


def finite_data_to_module(data: FiniteModuleData) -> GradedModule:
    """Present a finite-length module from its piece/action data."""
    base = data.base
    p = base.p
    degs = data.degrees()
    if not degs:
        return GradedModule.zero(base)
    # one generator per basis vector per degree; relations express each
    # variable action and kill everything past the top degree
    gens = []  # (degree, index)
    for n in degs:
        for i in range(data.dims[n]):
            gens.append((n, i))
    gidx = {g: a for a, g in enumerate(gens)}
    F0 = FreeModule(base, [-n for n, _ in gens])
    cols = []
    degsrc = []
    top = degs[-1]
    for n in degs:
        dn = data.dims[n]
        dn1 = data.dims.get(n + 1, 0)
        for v in range(4):
            mono = Poly.variable(base, v)
            mat = data.actions.get((n, v))
            for i in range(dn):
                col = [Poly.zero(base)] * len(gens)
                col[gidx[(n, i)]] = mono
                if mat is not None and dn1:
                    for jj in range(dn1):
                        c = int(mat[jj, i]) % p
                        if c:
                            col[gidx[(n + 1, jj)]] = col[gidx[(n + 1, jj)]] - Poly.constant(base, c)
                cols.append(tuple(col))
                degsrc.append(n + 1)
        if base.dual and n in data.eps:
            emat = data.eps[n]
            for i in range(dn):
                col = [Poly.zero(base)] * len(gens)
                col[gidx[(n, i)]] = Poly.constant(base, 0, 1)
                for jj in range(dn):
                    c = int(emat[jj, i]) % p
                    if c:
                        col[gidx[(n, jj)]] = col[gidx[(n, jj)]] - Poly.constant(base, c)
                cols.append(tuple(col))
                degsrc.append(n)
    rel = GradedMap.from_columns(F0, cols, degsrc)
    return GradedModule(rel).minimal_presentation()


# -- cohomology -------------------------------------------------------------


def cohomology_table(M: GradedModule, Q: str, n_lo: int, n_hi: int) -> dict:
    """dims of H^i of the sheaf of (M tensor_A Q)(n), i = 0..3.

    Routed through Ext and local duality: H^i(~M(n)) = H^{i+1}_m(M)_n for
    i >= 1, and H^{j}_m(M)_n is dual to Ext^{4-j}(M, R(-4))_{-n}; H^0 comes
    from the four-term comparison with the module piece itself.
    """
    if Q == "k":
        M = M.tensor_residue_field()
    elif Q != "A":
        raise ValueError("test module must be 'A' or 'k'")
    degs = list(range(n_lo, n_hi + 1))
    negs = [-n for n in degs]
    e = {
        j: ext_piece_dims(M, j, -4, negs)
        for j in range(5)
    }
    table = {i: {} for i in range(4)}
    for n in degs:
        h0m = e[4].get(-n, 0)
        h1m = e[3].get(-n, 0)
        table[0][n] = M.piece_dim(n) - h0m + h1m
        table[1][n] = e[2].get(-n, 0)
        table[2][n] = e[1].get(-n, 0)
        table[3][n] = e[0].get(-n, 0)
    return table


@lru_cache(maxsize=None)
def _power_ideal_module(base: BaseRing, t: int) -> GradedModule:
    """(X,Y,Z,W)^t as a graded module."""
    from .groebner import Ideal

    gens = [Poly.monomial(base, m) for m in monomials(t)]
    return GradedModule.from_ideal(Ideal(base, gens))


def saturation_dims(M: GradedModule, n_lo: int, n_hi: int) -> dict:
    """Independent H^0 oracle: dim Hom(m^t, M)_n stabilized over t.

    For the sheaf of M this is dim H^0(~M(n)) = dim Gamma(~M(n)).
    """
    pc = PieceCalculus(M)
    out = {}
    for n in range(n_lo, n_hi + 1):
        t = 1
        prev = PowerHomCalculus(pc, t).hom_dim(n)
        while True:
            t += 1
            cur = PowerHomCalculus(pc, t).hom_dim(n)
            if cur == prev:
                break
            prev = cur
        out[n] = prev
    return out


def torsion_dims(M: GradedModule, n_lo: int, n_hi: int) -> dict:
    """dim of the m-power-torsion submodule piece (H^0_m(M)_n), directly."""
    p = M.base.p
    Mm = M.minimal_presentation()
    reg = Mm.regularity()
    out = {}
    for n in range(n_lo, n_hi + 1):
        c = max(reg + 2 - n, 1)
        # v is torsion iff m^c * v = 0 in M for c past the regularity window
        full = Mm.F0.piece_dim(n)
        rows = []
        target = Mm.presentation.matrix_at(n + c)
        red, piv = linalg.rref(target.T, p) if target.size else (None, [])
        span = red.T[:, : len(piv)] if piv else np.zeros((Mm.F0.piece_dim(n + c), 0), dtype=np.int64)
        proj = _cocomplement_rows(span, p)
        for m in monomials(c):
            mat = np.zeros((proj.shape[0], full), dtype=np.int64)
            for col in range(full):
                vec = np.zeros(full, dtype=np.int64)
                vec[col] = 1
                elem = vector_to_element(Mm.F0, vec, n)
                moved = tuple(f.mul_monomial(m) for f in elem)
                w = element_to_vector(Mm.F0, moved, n + c)
                mat[:, col] = linalg.matmul(proj, w.reshape(-1, 1), p).reshape(-1)
            rows.append(mat)
        big = np.vstack(rows)
        ker = linalg.kernel_basis(big, p)
        # torsion piece dim = dim of kernel modulo relations
        rel = Mm.presentation.matrix_at(n)
        joint = np.concatenate([ker, rel], axis=1) if rel.size else ker
        out[n] = linalg.rank(joint.T, p) - linalg.rank(rel.T, p)
    return out
