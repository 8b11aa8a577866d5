import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from filmsim.tridiag import solve_cyclic, solve_tridiagonal


def _dense(lower, diag, upper, cyclic=False):
    n = len(diag)
    a = np.diag(diag) + np.diag(lower[1:], -1) + np.diag(upper[:-1], 1)
    if cyclic:
        a[0, -1] += lower[0]
        a[-1, 0] += upper[-1]
    return a


def _system(rng, n, batch=()):
    lower = rng.uniform(-1, 1, batch + (n,))
    upper = rng.uniform(-1, 1, batch + (n,))
    diag = np.abs(lower) + np.abs(upper) + rng.uniform(0.1, 2, batch + (n,))
    return lower, diag, upper


class TestTridiagonal:
    @settings(max_examples=100, deadline=None)
    @given(n=st.integers(1, 40), seed=st.integers(0, 2**32 - 1))
    def test_matches_dense_solve(self, n, seed):
        rng = np.random.default_rng(seed)
        lower, diag, upper = _system(rng, n)
        rhs = rng.normal(size=n)
        x = solve_tridiagonal(lower, diag, upper, rhs)
        assert np.allclose(x, np.linalg.solve(_dense(lower, diag, upper), rhs), rtol=1e-10)

    def test_batched_with_columns(self):
        rng = np.random.default_rng(1)
        lower, diag, upper = _system(rng, 7, (3,))
        rhs = rng.normal(size=(3, 7, 2))
        x = solve_tridiagonal(lower, diag, upper, rhs)
        for b in range(3):
            ref = np.linalg.solve(_dense(lower[b], diag[b], upper[b]), rhs[b])
            assert np.allclose(x[b], ref)

    def test_does_not_modify_inputs(self):
        rng = np.random.default_rng(2)
        lower, diag, upper = _system(rng, 5)
        rhs = rng.normal(size=5)
        copies = [a.copy() for a in (lower, diag, upper, rhs)]
        solve_tridiagonal(lower, diag, upper, rhs)
        assert all(np.array_equal(a, b) for a, b in zip(copies, (lower, diag, upper, rhs)))


class TestCyclic:
    @settings(max_examples=100, deadline=None)
    @given(n=st.integers(3, 40), seed=st.integers(0, 2**32 - 1))
    def test_matches_dense_solve(self, n, seed):
        rng = np.random.default_rng(seed)
        lower, diag, upper = _system(rng, n)
        rhs = rng.normal(size=n)
        x = solve_cyclic(lower, diag, upper, rhs)
        a = _dense(lower, diag, upper, cyclic=True)
        assert np.linalg.norm(a @ x - rhs) <= 1e-12 * np.linalg.norm(rhs) * np.linalg.cond(a)

    def test_batched_with_columns(self):
        rng = np.random.default_rng(3)
        lower, diag, upper = _system(rng, 9, (2,))
        rhs = rng.normal(size=(2, 9, 2))
        x = solve_cyclic(lower, diag, upper, rhs)
        for b in range(2):
            ref = np.linalg.solve(_dense(lower[b], diag[b], upper[b], cyclic=True), rhs[b])
            assert np.allclose(x[b], ref)

    def test_regulariser_residual(self):
        h = 1 + 0.3 * np.sin(np.linspace(0, 2 * np.pi, 50, endpoint=False))
        c, d = 0.5, 0.1
        lower, diag, upper = -c * h**2, 4 * d * d + c * (h**2 + np.roll(h, -1) ** 2), -c * np.roll(h, -1) ** 2
        rhs = np.cos(np.arange(50.0))
        x = solve_cyclic(lower, diag, upper, rhs)
        res = _dense(lower, diag, upper, cyclic=True) @ x - rhs
        assert np.linalg.norm(res) <= 1e-12 * np.linalg.norm(rhs)

    def test_too_small(self):
        with pytest.raises(ValueError):
            solve_cyclic([1.0, 1.0], [4.0, 4.0], [1.0, 1.0], [1.0, 1.0])
