import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from donsa import hungarian
from donsa.hungarian import NonFinite, NonSquare, hungarian_solve

BACKENDS = ["python"] + (["compiled"] if hungarian._solve_compiled is not None else [])


def brute_force_max(w):
    n = len(w)
    return max(sum(w[i][p[i]] for i in range(n)) for p in itertools.permutations(range(n)))


def value(w, perm):
    return sum(w[i][perm[i]] for i in range(len(perm)))


@pytest.mark.parametrize("backend", BACKENDS)
def test_rank_one_matrix(backend):
    w = [[1, 2, 3], [2, 4, 6], [3, 6, 9]]
    perm = hungarian_solve(w, backend=backend)
    assert brute_force_max(w) == 14
    assert list(perm) == [0, 1, 2]
    assert value(w, perm) == 14


@pytest.mark.parametrize("backend", BACKENDS)
def test_dominant_diagonal_and_singleton(backend):
    w = np.ones((6, 6)) + np.diag(np.full(6, 100.0))
    assert list(hungarian_solve(w, backend=backend)) == list(range(6))
    assert list(hungarian_solve([[7.5]], backend=backend)) == [0]


def test_minimize():
    w = [[4, 1, 3], [2, 0, 5], [3, 2, 2]]
    perm = hungarian_solve(w, maximize=False)
    assert value(w, perm) == 5


def test_errors():
    with pytest.raises(NonSquare):
        hungarian_solve(np.zeros((2, 3)))
    with pytest.raises(NonFinite):
        hungarian_solve([[1.0, np.nan], [0.0, 1.0]])
    with pytest.raises(NonFinite):
        hungarian_solve([[np.inf]])


def test_empty():
    assert hungarian_solve(np.zeros((0, 0))).size == 0


@settings(max_examples=150, deadline=None)
@given(arrays(np.int64, st.tuples(st.integers(1, 6)).map(lambda t: (t[0], t[0])),
              elements=st.integers(0, 100)))
def test_matches_brute_force(w):
    for backend in BACKENDS:
        perm = hungarian_solve(w, backend=backend)
        assert sorted(perm) == list(range(len(w)))
        assert value(w, perm) == brute_force_max(w.tolist())


@pytest.mark.skipif(len(BACKENDS) < 2, reason="compiled kernel not built")
def test_backends_agree_on_ties_and_padding():
    rng = np.random.default_rng(3)
    for _ in range(60):
        n = int(rng.integers(1, 40))
        w = rng.integers(0, 4, size=(n, n)).astype(float)  # heavy ties
        if rng.random() < 0.5:
            w[n // 2:, : n - 2] = 1 + w.sum()
        p_c = hungarian_solve(w, backend="compiled")
        p_py = hungarian_solve(w, backend="python")
        assert np.array_equal(p_c, p_py)


def test_large_padding_keeps_small_rates_exact():
    # a padding weight far above the rates must not blur a 1 bit/s difference
    rng = np.random.default_rng(0)
    real = rng.integers(1_000_000, 2_000_000, size=(5, 8)).astype(float)
    w = np.zeros((8, 8))
    w[:5] = real
    w[5:, :] = 1e13
    from scipy.optimize import linear_sum_assignment
    perm = hungarian_solve(w)
    r, c = linear_sum_assignment(real, maximize=True)
    assert value(real, perm[:5]) == real[r, c].sum()
