import numpy as np
import pytest

from spacecurves import linalg

P = 32003


def _rand(rng, rows, cols):
    return rng.integers(0, P, size=(rows, cols), dtype=np.int64)


@pytest.mark.parametrize("shape", [(4, 6), (6, 4), (5, 5), (1, 7), (7, 1)])
def test_rank_plus_nullity(shape):
    rng = np.random.default_rng(0)
    for _ in range(5):
        m = _rand(rng, *shape)
        r = linalg.rank(m, P)
        ker = linalg.kernel_basis(m, P)
        assert r + ker.shape[1] == shape[1]
        if ker.size:
            assert not linalg.matmul(m, ker, P).any()


def test_solve_consistent_and_inconsistent():
    rng = np.random.default_rng(1)
    m = _rand(rng, 5, 3)
    x = _rand(rng, 3, 1)
    rhs = linalg.matmul(m, x, P)
    sol = linalg.solve(m, rhs, P)
    assert sol is not None
    assert (linalg.matmul(m, sol, P) == rhs).all()
    # a vector outside the column space of a rank-deficient map
    m2 = np.zeros((3, 2), dtype=np.int64)
    m2[0, 0] = 1
    bad = np.array([[0], [1], [0]], dtype=np.int64)
    assert linalg.solve(m2, bad, P) is None


def test_span_incremental_rank():
    rng = np.random.default_rng(2)
    m = _rand(rng, 6, 10)
    span = linalg.Span(6, P)
    span.add_many(m)
    assert span.rank == linalg.rank(m, P)
    for j in range(m.shape[1]):
        assert span.contains(m[:, j])


def test_eps_action_nilpotent():
    e = linalg.eps_action(3)
    assert e.shape == (6, 6)
    assert not linalg.matmul(e, e, P).any()


def test_a_span_rank_counts_eps_directions():
    # over the dual numbers a free rank-1 piece contributes 2 to the
    # k-dimension; a pure-epsilon vector only 1
    dim = 2
    v_unit = np.array([[1], [0], [0], [0]], dtype=np.int64)
    v_eps = np.array([[0], [0], [1], [0]], dtype=np.int64)
    assert linalg.a_span_rank(v_unit, dim, P) == 2
    assert linalg.a_span_rank(v_eps, dim, P) == 1
