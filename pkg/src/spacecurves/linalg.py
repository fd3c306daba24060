"""Exact dense linear algebra mod p, plus block helpers for the dual numbers.

Matrices are numpy int64 arrays with entries in [0, p).  With p = 32003 the
intermediate products stay below 2^63 after one accumulation row, and every
reduction step is followed by an explicit mod, so all arithmetic is exact.

A matrix over A = F_p[e]/(e^2) is a pair (M0, M1) meaning M0 + e*M1.  Acting
on column vectors written as stacked pairs (x0; x1) it expands to the k-linear
block matrix [[M0, 0], [M1, M0]].  Multiplication by e sends (x0; x1) to
(0; x0).
"""

from __future__ import annotations

import numpy as np


def zeros(rows: int, cols: int) -> np.ndarray:
    return np.zeros((rows, cols), dtype=np.int64)


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=np.int64)


def matmul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    if a.shape[1] == 0 or b.shape[1] == 0 or a.shape[0] == 0:
        return zeros(a.shape[0], b.shape[1])
    # chunk the inner dimension so int64 accumulation cannot overflow:
    # each product < p^2 ~ 2^30, so ~2^32 summands are safe; no chunking needed
    # for desk-scale sizes, a single mod at the end suffices.
    return (a @ b) % p


def rref(mat: np.ndarray, p: int):
    """Row-reduce a copy of mat mod p.  Returns (reduced, pivot_columns)."""
    m = mat.copy() % p
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        m[r] = (m[r] * inv) % p
        col = m[:, c].copy()
        col[r] = 0
        m = (m - np.outer(col, m[r])) % p
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(mat: np.ndarray, p: int) -> int:
    """Rank mod p by forward elimination (no back substitution)."""
    if mat.size == 0:
        return 0
    m = mat.copy() % p
    rows, cols = m.shape
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if nz.size == 0:
            continue
        i = r + nz[0]
        if i != r:
            m[[r, i]] = m[[i, r]]
        inv = pow(int(m[r, c]), p - 2, p)
        below = np.nonzero(m[r + 1 :, c])[0]
        if below.size:
            idx = below + r + 1
            factors = (m[idx, c] * inv) % p
            m[idx] = (m[idx] - np.outer(factors, m[r])) % p
        r += 1
    return r


class Span:
    """Incremental row space mod p with O(rank * width) membership."""

    __slots__ = ("p", "width", "rows", "pivots")

    def __init__(self, width: int, p: int):
        self.p = p
        self.width = width
        self.rows = []  # echelon rows, pivot entry normalized to 1
        self.pivots = []  # pivot column per row, ascending insert order

    @property
    def rank(self) -> int:
        return len(self.rows)

    def _reduce(self, vec: np.ndarray):
        v = vec.copy() % self.p
        for piv, row in zip(self.pivots, self.rows):
            c = int(v[piv])
            if c:
                v = (v - c * row) % self.p
        return v

    def add(self, vec: np.ndarray) -> bool:
        """Insert if independent; returns True when the rank grew."""
        v = self._reduce(vec)
        nz = np.nonzero(v)[0]
        if nz.size == 0:
            return False
        piv = int(nz[0])
        inv = pow(int(v[piv]), self.p - 2, self.p)
        v = (v * inv) % self.p
        self.rows.append(v)
        self.pivots.append(piv)
        return True

    def contains(self, vec: np.ndarray) -> bool:
        return not np.nonzero(self._reduce(vec))[0].size

    def add_many(self, mat: np.ndarray):
        """Insert every column of mat."""
        for j in range(mat.shape[1]):
            self.add(mat[:, j])


def kernel_basis(mat: np.ndarray, p: int) -> np.ndarray:
    """Columns form a basis of the right kernel {x : mat x = 0}."""
    rows, cols = mat.shape
    if cols == 0:
        return zeros(0, 0)
    if rows == 0:
        return identity(cols)
    red, pivots = rref(mat, p)
    free = [c for c in range(cols) if c not in pivots]
    out = zeros(cols, len(free))
    for j, fc in enumerate(free):
        out[fc, j] = 1
        for i, pc in enumerate(pivots):
            out[pc, j] = (-int(red[i, fc])) % p
    return out


def solve(mat: np.ndarray, rhs: np.ndarray, p: int):
    """One solution of mat x = rhs (rhs may have several columns); None if none."""
    rows, cols = mat.shape
    rhs = rhs.reshape(rows, -1) % p
    aug = np.concatenate([mat % p, rhs], axis=1)
    red, pivots = rref(aug, p)
    ncols_rhs = rhs.shape[1]
    for i, c in enumerate(pivots):
        if c >= cols:
            return None
    out = zeros(cols, ncols_rhs)
    for i, c in enumerate(pivots):
        out[c] = red[i, cols:]
    return out % p


def row_space_contains(space: np.ndarray, vec: np.ndarray, p: int) -> bool:
    if np.count_nonzero(vec % p) == 0:
        return True
    if space.shape[0] == 0:
        return False
    return rank(np.vstack([space, vec.reshape(1, -1)]), p) == rank(space, p)


def column_space_complement(mat: np.ndarray, candidates: np.ndarray, p: int):
    """Indices of candidate columns extending the column space of mat to a
    basis of the joint span, greedily in order."""
    rows = mat.shape[0]
    base = mat.T % p
    chosen = []
    cur = rank(base, p) if base.size else 0
    for j in range(candidates.shape[1]):
        trial = np.vstack([base, candidates[:, j].reshape(1, -1) % p])
        r = rank(trial, p)
        if r > cur:
            chosen.append(j)
            base = trial
            cur = r
    return chosen


# -- dual-number block form -------------------------------------------


def expand_dual(m0: np.ndarray, m1: np.ndarray, p: int) -> np.ndarray:
    """k-linear matrix of M0 + e*M1 on stacked coordinates (x0; x1)."""
    rows, cols = m0.shape
    out = zeros(2 * rows, 2 * cols)
    out[:rows, :cols] = m0 % p
    out[rows:, cols:] = m0 % p
    out[rows:, :cols] = m1 % p
    return out


def eps_action(dim: int) -> np.ndarray:
    """Multiplication by e on stacked coordinates of A^dim."""
    out = zeros(2 * dim, 2 * dim)
    out[dim:, :dim] = identity(dim)
    return out


def a_span_rank(vectors: np.ndarray, dim: int, p: int) -> int:
    """k-dimension of the A-submodule of A^dim generated by stacked columns."""
    if vectors.size == 0:
        return 0
    eps = eps_action(dim)
    all_cols = np.concatenate([vectors % p, matmul(eps, vectors, p)], axis=1)
    return rank(all_cols.T, p)


def a_min_generators(kernel_cols: np.ndarray, dim: int, p: int):
    """Column indices of a minimal A-generating set of an A-submodule
    K of A^dim given by spanning stacked columns.

    By graded Nakayama over the local ring A, columns generate iff their
    residues span K/(eK).  Greedy selection against span + eK.
    """
    if kernel_cols.size == 0:
        return []
    eps = eps_action(dim)
    eK = matmul(eps, kernel_cols, p)
    base = eK.T
    chosen = []
    cur = rank(base, p) if base.size else 0
    for j in range(kernel_cols.shape[1]):
        trial = np.vstack([base, kernel_cols[:, j].reshape(1, -1) % p])
        r = rank(trial, p)
        if r > cur:
            chosen.append(j)
            base = np.vstack(
                [base, kernel_cols[:, j].reshape(1, -1), eK[:, j].reshape(1, -1)]
            )
            cur = rank(base, p)
    return chosen
