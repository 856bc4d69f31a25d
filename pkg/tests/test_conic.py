import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chandef import corpus
from chandef.conic import (
    Model,
    SdpProblem,
    multistart_seesaw,
    pure_state_search,
    seesaw,
    solve_lp,
    solve_sdp,
    thread_count,
)
from chandef.matops import op_norm, trace_norm
from chandef.norms import qc_diamond_seesaw


def test_operator_norm_sdp_raw_problem():
    # min λ  s.t.  λI − diag(3, 1) ⪰ 0
    p = SdpProblem(n=1, c=np.array([1.0]), lmis=[(-np.diag([3.0, 1.0]).astype(complex),
                                                  np.eye(2, dtype=complex)[None])])
    res = solve_sdp(p)
    assert res.ok
    assert res.primal == pytest.approx(3, abs=1e-7)
    assert res.gap <= 1e-7


def test_trace_norm_sdp():
    z = np.diag([1.0, -1.0])
    m = Model()
    x = m.hermitian(2)
    m.psd(x - z)
    m.psd(x + z)
    m.minimize(x.trace())
    sol = m.solve()
    assert sol.ok and sol.value_opt == pytest.approx(2, abs=1e-7)


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 4))
def test_operator_norm_sdp_matches_eig(seed, d):
    h = corpus.random_hermitian(seed, d)
    m = Model()
    lam = m.real()
    m.psd(lam * np.eye(d) - h)
    m.psd(lam * np.eye(d) + h)
    m.minimize(lam)
    assert m.solve().value_opt == pytest.approx(op_norm(h), abs=1e-7)


def test_sdp_duals_are_psd_and_complementary():
    h = corpus.random_hermitian(3, 3)
    m = Model()
    x = m.hermitian(3)
    i1 = m.psd(x - h)
    i2 = m.psd(x + h)
    m.minimize(x.trace())
    sol = m.solve()
    assert sol.value_opt == pytest.approx(trace_norm(h), abs=1e-7)
    y1, y2 = sol.dual(i1), sol.dual(i2)
    assert np.linalg.eigvalsh(y1)[0] >= -1e-8 and np.linalg.eigvalsh(y2)[0] >= -1e-8
    # Stationarity in x: y1 + y2 = I.
    np.testing.assert_allclose(y1 + y2, np.eye(3), atol=1e-6)


def test_infeasible_sdp_is_flagged():
    m = Model()
    x = m.real()
    m.psd(x * np.eye(2) - np.eye(2))  # x ≥ 1
    m.psd(-x * np.eye(2))             # x ≤ 0
    m.minimize(x)
    sol = m.solve()
    assert not sol.ok


def test_linf_lp():
    # min t  s.t.  −t ≤ x_i ≤ t  for x = (1, −2)
    x = np.array([1.0, -2.0])
    A = np.array([[-1.0], [-1.0], [-1.0], [-1.0]])
    b = np.concatenate([-x, x])
    res = solve_lp([1.0], A, b)
    assert res.status == "OPTIMAL" and res.primal == pytest.approx(2)


def test_l1_lp():
    # min Σ t_i  s.t.  |x_i| ≤ t_i
    x = np.array([1.0, -2.0])
    A = np.vstack([-np.eye(2), -np.eye(2)])
    b = np.concatenate([-x, x])
    res = solve_lp(np.ones(2), A, b)
    assert res.primal == pytest.approx(3)


def _vertex_oracle(c, A, b):
    # Enumerate all basic solutions of A x ≤ b.
    n = len(c)
    best = np.inf
    for rows in itertools.combinations(range(len(A)), n):
        M = A[list(rows)]
        if abs(np.linalg.det(M)) < 1e-10:
            continue
        x = np.linalg.solve(M, b[list(rows)])
        if np.all(A @ x <= b + 1e-9):
            best = min(best, c @ x)
    return best


@pytest.mark.parametrize("seed", range(5))
def test_random_lp_matches_vertex_enumeration(seed):
    rng = np.random.default_rng(seed)
    n = 3
    A = np.vstack([rng.normal(size=(6, n)), np.eye(n), -np.eye(n)])
    b = np.concatenate([rng.uniform(0.5, 2, 6), np.full(2 * n, 3.0)])
    c = rng.normal(size=n)
    res = solve_lp(c, A, b)
    assert res.primal == pytest.approx(_vertex_oracle(c, A, b), abs=1e-9)


def _quadratic(h):
    def f(x):
        return float(np.vdot(x, h @ x).real), 2 * h @ x
    return f


def test_pure_state_search_top_eigenvalue():
    r = pure_state_search(_quadratic(np.diag([5.0, 1.0])), 2, seed=0, starts=5)
    assert r.value == pytest.approx(5, abs=1e-10)


def test_pure_state_search_constant():
    r = pure_state_search(lambda x: (2.5, np.zeros_like(x)), 3, seed=0, starts=3)
    assert r.value == 2.5


@pytest.mark.parametrize("seed", range(3))
def test_pure_state_search_random_quadratic(seed):
    h = corpus.random_hermitian(seed, 4)
    r = pure_state_search(_quadratic(h), 4, seed=seed, starts=10)
    assert r.value == pytest.approx(np.linalg.eigvalsh(h)[-1], abs=1e-8)


def test_seesaw_bilinear_toy_reaches_grid_optimum():
    # max a·M·b over unit vectors; optimum is the top singular value.
    M = np.array([[2.0, 1.0], [0.5, -1.0]])

    def best_a(b):
        v = M @ b
        return v / np.linalg.norm(v)

    def best_b(a):
        v = M.T @ a
        return v / np.linalg.norm(v)

    val, (a, b), hist = seesaw(lambda a, b: a @ M @ b, best_a, best_b, np.array([1.0, 0.0]))
    t = np.linspace(0, 2 * np.pi, 2001)
    grid = max(np.linalg.norm(M @ np.array([np.cos(s), np.sin(s)])) for s in t)
    assert val == pytest.approx(np.linalg.svd(M, compute_uv=False)[0], abs=1e-6)
    assert val >= grid - 1e-6
    assert all(np.diff(hist) >= -1e-12)


def test_seesaw_constant_objective():
    val, _, hist = seesaw(lambda a, b: 7.0, lambda b: 0, lambda a: 0, 0)
    assert val == 7.0 and hist[0] == 7.0 and len(hist) <= 2


def test_multistart_seesaw_returns_best():
    M = np.diag([3.0, 1.0])
    r = multistart_seesaw(lambda a, b: a @ M @ b,
                          lambda b: M @ b / np.linalg.norm(M @ b),
                          lambda a: M.T @ a / np.linalg.norm(M.T @ a),
                          lambda rng: rng.normal(size=2), seed=1, starts=4)
    assert r.value == pytest.approx(3) and len(r.values) == 4


def test_seesaw_restart_stability_on_qc_instances():
    rng = np.random.default_rng(11)
    A = [corpus.random_hermitian(rng, 2) for _ in range(2)]
    vals = [qc_diamond_seesaw(A, seed=s, starts=4)[0] for s in range(20)]
    assert max(vals) - min(vals) <= 1e-6


def test_thread_count_env(monkeypatch):
    monkeypatch.setenv("CHANDEF_THREADS", "3")
    assert thread_count() == 3
