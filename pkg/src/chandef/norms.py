"""Diamond norm and dual diamond norm under an admissible cone family.

For a map ``φ: B(H) → B(K)`` with Choi matrix ``C`` on ``K ⊗ H``:

* ``‖φ‖_◇ = min{λ : λα ± φ ∈ P, α a channel in P}``; writing ``W = λ C(α)``
  this is ``min λ`` over ``W ± C ∈ C(P)``, ``Tr_K W = λ I_H``.  Its dual is
  ``max Tr(C X)`` over ``I_K ⊗ σ ± X ∈ C(P̃)`` with ``σ`` a state, and the
  optimum equals ``sup_ρ ‖(φ⊗id)(ρ)‖_{1,P̃}`` over pure ``ρ``.
* ``‖φ‖^◇ = min{Tr X : X ⊗ I_H ± C ∈ C(P*)}`` (``X = λσ``), with dual
  ``max Tr(C Y)`` over ``A ± Y ∈ C(P)``, ``Tr_H A = I_K``.

For CP both sides are solved and the returned interval is certified: primal
solutions are repaired into exactly feasible points before their objective
is evaluated.  For EB and Pos the inner approximations of the cones of
:mod:`chandef.cones` give certified bounds on each side.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .cones import ConeFamily, Interval, constrain_choi
from .conic import Model, ascend_sphere, kron_affine, pure_state_search
from .hmap import HermitianMap, choi_adjoint, choi_mask, out_trace
from .matops import (
    as_matrices,
    herm,
    min_eig,
    op_norm,
    partial_trace,
    pinv_sqrt,
    psd_part,
    sqrtm_psd,
    trace_norm,
)


@dataclass
class NormResult:
    """Certified bracket on a norm together with the optimizers found."""

    value_lo: float
    value_hi: float
    method: str
    certificate: dict = field(default_factory=dict)

    @property
    def value(self) -> float:
        return (self.value_lo + self.value_hi) / 2

    @property
    def interval(self) -> Interval:
        return Interval(self.value_lo, self.value_hi)

    def to_json(self) -> dict:
        from .jsonio import encode_value
        return {"value_lo": float(self.value_lo), "value_hi": float(self.value_hi),
                "method": self.method, "certificate": encode_value(self.certificate)}


class SolverFailure(RuntimeError):
    """An SDP stopped without a usable certificate."""


def _check(sol, what):
    if not sol.ok:
        raise SolverFailure(f"{what}: solver status {sol.status}")


def _bracket(lo, hi, method, cert):
    if lo > hi:
        # Both ends are certified; a crossing is rounding noise.
        lo, hi = min(lo, hi), max(lo, hi)
    return NormResult(float(lo), float(hi), method, cert)


# ----------------------------------------------------------------------------
# Diamond norm
# ----------------------------------------------------------------------------


def stabilized_output(c, dims, x) -> np.ndarray:
    """``(φ ⊗ id)(|x⟩⟨x|)`` for ``x ∈ H ⊗ H``."""
    dout, din = dims
    a = x.reshape(din, din).T
    left = np.kron(np.eye(dout), a)
    return left @ c @ left.conj().T


def _stabilized_objective(c, dims):
    dout, din = dims
    cadj = choi_adjoint(c, dims)
    tadj = cadj.reshape(din, dout, din, dout)

    def f(x):
        m = stabilized_output(c, dims, x)
        w, v = np.linalg.eigh(m)
        s = (v * np.sign(w)) @ v.conj().T
        st = s.reshape(dout, din, dout, din)
        g = np.einsum("ikjl,kblc->ibjc", tadj, st).reshape(din * din, din * din)
        return float(np.sum(np.abs(w))), 2 * g @ x

    return f


def purification(sigma) -> np.ndarray:
    """``|x_σ⟩ = Σ_i |i⟩ ⊗ σ^{1/2}|i⟩``."""
    r = sqrtm_psd(sigma)
    return r.T.reshape(-1)


def _normalize_state(s):
    s = psd_part(s)
    t = np.trace(s).real
    return s / t if t > 0 else np.eye(s.shape[0]) / s.shape[0]


def diamond_norm(family, m: HermitianMap, *, seed: int = 0, search_starts: int = 0) -> NormResult:
    """Diamond norm ``‖φ‖_◇`` relative to the channels of ``family``.

    Parameters
    ----------
    search_starts : int
        Extra random starts for the pure-state ascent that polishes the
        lower bound (the ascent from the dual optimum is always run).
    """
    family = ConeFamily.parse(family)
    c, dims = m.choi, m.dims
    dout, din = dims
    n = dout * din

    # inf side: min λ with W ± C in the cone, Tr_K W = λ I.
    mask = choi_mask(m.in_alg, m.out_alg)
    model = Model()
    lam = model.real()
    w = model.hermitian(n, mask)
    constrain_choi(model, family, w - c, dims, "inner")
    constrain_choi(model, family, w + c, dims, "inner")
    model.equal(w.apply(lambda a: partial_trace(a, dims, 0)), lam * np.eye(din))
    model.minimize(lam)
    sol = model.solve()
    _check(sol, "diamond norm (inf form)")
    wv = sol.hvalue(w)

    # sup side: max Tr(CX) with I ⊗ σ ± X in the tilde cone.
    model2 = Model()
    sig = model2.hermitian(din, m.in_alg.mask)
    x = model2.hermitian(n, mask)
    ios = kron_affine(np.eye(dout), sig)
    constrain_choi(model2, family.tilde, ios - x, dims, "inner")
    constrain_choi(model2, family.tilde, ios + x, dims, "inner")
    model2.equal(sig.trace(), 1.0)
    model2.maximize((c @ x).trace())
    sol2 = model2.solve()
    _check(sol2, "diamond norm (sup form)")
    sigma = _normalize_state(sol2.hvalue(sig))

    if family is ConeFamily.CP:
        hi, alpha = _repair_channel_bound(c, wv, dims)
        f = _stabilized_objective(c, dims)
        x0 = purification(sigma)
        lo, xbest = f(x0)[0], x0
        val, xv = ascend_sphere(f, x0, maxiter=200)
        if val > lo:
            lo, xbest = val, xv
        if search_starts:
            res = pure_state_search(f, din * din, seed=seed, starts=search_starts, maxiter=200)
            if res.value > lo:
                lo, xbest = res.value, res.argmax
        cert = {"sigma": sigma, "channel_choi": alpha, "input_vector": xbest}
        return _bracket(lo, hi, "sdp", cert)

    lo = sol2.result.primal
    hi = sol.result.primal
    cert = {"sigma": sigma, "channel_choi": wv / hi if hi > 0 else wv, "X": sol2.hvalue(x),
            "exact": family.is_exact(dims)}
    return _bracket(lo, hi, "sdp-relaxation", cert)


def _repair_channel_bound(c, w, dims):
    """Turn an approximate ``W`` into an exactly feasible one; return ``(λ, α)``."""
    dout, din = dims
    n = dout * din
    delta = max(0.0, -min_eig(w - c), -min_eig(w + c))
    w = w + delta * np.eye(n)
    t = herm(out_trace(w, dims))
    lam = float(np.linalg.eigvalsh(t)[-1])
    w = w + np.kron(np.eye(dout) / dout, lam * np.eye(din) - t)
    alpha = w / lam if lam > 0 else np.kron(np.eye(dout) / dout, np.eye(din))
    return lam, alpha


def diamond_distance(m1: HermitianMap, m2: HermitianMap, family="cp") -> NormResult:
    return diamond_norm(family, m1 - m2)


# ----------------------------------------------------------------------------
# Dual diamond norm
# ----------------------------------------------------------------------------


def dual_diamond_norm(family, m: HermitianMap) -> NormResult:
    """Dual diamond norm ``‖φ‖^◇`` relative to the replacers ``Φ_{I,σ}``."""
    family = ConeFamily.parse(family)
    c, dims = m.choi, m.dims
    dout, din = dims
    n = dout * din

    mask = choi_mask(m.in_alg, m.out_alg)
    model = Model()
    xk = model.hermitian(dout, m.out_alg.mask)
    big = kron_affine(xk, np.eye(din))
    constrain_choi(model, family.dual, big - c, dims, "inner")
    constrain_choi(model, family.dual, big + c, dims, "inner")
    model.minimize(xk.trace())
    sol = model.solve()
    _check(sol, "dual diamond norm (inf form)")
    xv = sol.hvalue(xk)

    model2 = Model()
    a = model2.hermitian(n, mask)
    y = model2.hermitian(n, mask)
    constrain_choi(model2, family, a - y, dims, "inner")
    constrain_choi(model2, family, a + y, dims, "inner")
    model2.equal(a.apply(lambda z: partial_trace(z, dims, 1)), np.eye(dout))
    model2.maximize((c @ y).trace())
    sol2 = model2.solve()
    _check(sol2, "dual diamond norm (sup form)")
    av, yv = sol2.hvalue(a), sol2.hvalue(y)

    if family is ConeFamily.CP:
        delta = max(0.0, -min_eig(np.kron(xv, np.eye(din)) - c), -min_eig(np.kron(xv, np.eye(din)) + c))
        xv = xv + delta * np.eye(dout)
        hi = float(np.trace(xv).real)
        av, yv = _repair_unital_pair(av, yv, dims)
        lo = float(np.sum(c * yv.T).real)
        method = "sdp"
    else:
        hi, lo = sol.result.primal, sol2.result.primal
        method = "sdp-relaxation"
    sigma = _normalize_state(xv)
    cert = {"sigma": sigma, "X": xv, "unital_choi": av, "Y": yv}
    return _bracket(lo, hi, method, cert)


def _repair_unital_pair(a, y, dims):
    """Make ``A ± Y ⪰ 0`` and ``Tr_H A = I`` hold exactly (CP case)."""
    dout, din = dims
    delta = max(0.0, -min_eig(a - y), -min_eig(a + y))
    a = a + delta * np.eye(dout * din)
    t = herm(partial_trace(a, dims, 1))
    s, _ = pinv_sqrt(t)
    g = np.kron(s, np.eye(din))
    return herm(g @ a @ g), herm(g @ y @ g)


# ----------------------------------------------------------------------------
# Closed forms for cq and qc maps
# ----------------------------------------------------------------------------


def cq_diamond(A) -> float:
    """``‖Φ^cq_A‖_◇ = max_i ‖A_i‖_1``."""
    return max(trace_norm(a) for a in as_matrices(A))


def qc_dual_diamond(A) -> float:
    """``‖Φ^qc_A‖^◇ = Σ_i ‖A_i‖``."""
    return float(sum(op_norm(a) for a in as_matrices(A)))


def cq_dual_diamond(A, sigma=None) -> NormResult:
    """``‖Φ^cq_A‖^◇ = inf_σ max_i ‖σ^{-1/2} A_i σ^{-1/2}‖``.

    Without ``sigma`` the infimum is computed as ``min Tr X`` subject to
    ``X ± A_i ⪰ 0``.  With a fixed ``sigma`` the expression is evaluated
    directly and is infinite when some ``A_i`` is not supported inside
    ``supp σ``.
    """
    A = [herm(a) for a in as_matrices(A)]
    d = A[0].shape[0]
    if sigma is not None:
        s, p = pinv_sqrt(sigma)
        q = np.eye(d) - p
        scale = max(op_norm(a) for a in A)
        if any(np.max(np.abs(q @ a)) > 1e-10 * max(scale, 1e-300) for a in A):
            return NormResult(np.inf, np.inf, "fixed-sigma", {"unbounded": True})
        v = max(op_norm(s @ a @ s) for a in A)
        return NormResult(v, v, "fixed-sigma", {"sigma": np.asarray(sigma), "unbounded": False})

    model = Model()
    x = model.hermitian(d)
    plus = [model.psd(x - a) for a in A]
    minus = [model.psd(x + a) for a in A]
    model.minimize(x.trace())
    sol = model.solve()
    _check(sol, "cq dual diamond")
    xv = sol.hvalue(x)
    delta = max(0.0, max(max(-min_eig(xv - a), -min_eig(xv + a)) for a in A))
    xv = xv + delta * np.eye(d)
    hi = float(np.trace(xv).real)
    # Dual certificate: PSD Z±_i with Σ (Z+_i + Z-_i) = I.
    zp = [psd_part(sol.dual(k)) for k in plus]
    zm = [psd_part(sol.dual(k)) for k in minus]
    tot = sum(zp) + sum(zm)
    g, _ = pinv_sqrt(tot)
    lo = float(sum(np.trace(a @ g @ (p_ - m_) @ g).real for a, p_, m_ in zip(A, zp, zm)))
    if not np.allclose(g @ tot @ g, np.eye(d), atol=1e-9):
        lo = 0.0
    return _bracket(lo, hi, "sdp", {"sigma": _normalize_state(xv), "X": xv, "unbounded": False})


def qc_diamond_seesaw(A, *, seed: int = 0, starts: int = 20):
    """Lower bound ``sup_σ Σ_i ‖σ^{1/2} A_i σ^{1/2}‖_1`` by see-saw.

    Alternates between ``T`` (with ``σ = T T†``) and sign matrices
    ``Y_i = sign(T† A_i T)``.  Both half-steps are exact (a top
    eigenvector, respectively a spectral sign), so the value never
    decreases.  Returns ``(value, sigma, search_result)``; the value is
    attained at ``sigma``.
    """
    from .conic import multistart_seesaw

    A = [herm(a) for a in as_matrices(A)]
    d = A[0].shape[0]

    def signs(t):
        out = []
        for a in A:
            w, v = np.linalg.eigh(t.conj().T @ a @ t)
            out.append((v * np.sign(w)) @ v.conj().T)
        return out

    def best_t(ys):
        q = sum(np.kron(a, y.T) for a, y in zip(A, ys))
        w, v = np.linalg.eigh(herm(q))
        return v[:, -1].reshape(d, d)

    def objective(ys, t):
        return float(sum(np.trace(y @ t.conj().T @ a @ t).real for a, y in zip(A, ys)))

    def init(rng):
        t = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        return t / np.linalg.norm(t)

    res = multistart_seesaw(objective, signs, best_t, init, seed=seed, starts=starts)
    t = res.argmax[1]
    sigma = _normalize_state(t @ t.conj().T)
    r = sqrtm_psd(sigma)
    value = float(sum(trace_norm(r @ a @ r) for a in A))
    return value, sigma, res


def qc_diamond(A, *, seed: int = 0, starts: int = 20) -> NormResult:
    """``‖Φ^qc_A‖_◇ = sup_σ Σ_i ‖σ^{1/2}A_iσ^{1/2}‖_1``.

    The lower end comes from :func:`qc_diamond_seesaw`.  The upper end is
    the dual program ``min λ : Y_i ± A_i ⪰ 0, Σ_i Y_i = λ I``, repaired to
    exact feasibility.
    """
    A = [herm(a) for a in as_matrices(A)]
    d = A[0].shape[0]
    lo, sigma, res = qc_diamond_seesaw(A, seed=seed, starts=starts)

    model = Model()
    lam = model.real()
    ys = [model.hermitian(d) for _ in A]
    for a, y in zip(A, ys):
        model.psd(y - a)
        model.psd(y + a)
    model.equal(sum(ys[1:], ys[0]), lam * np.eye(d))
    model.minimize(lam)
    sol = model.solve()
    _check(sol, "qc diamond (dual form)")
    yv = [sol.hvalue(y) for y in ys]
    delta = max(0.0, max(max(-min_eig(y - a), -min_eig(y + a)) for a, y in zip(A, yv)))
    yv = [y + delta * np.eye(d) for y in yv]
    s = sum(yv)
    hi = float(np.linalg.eigvalsh(s)[-1])
    yv[0] = yv[0] + hi * np.eye(d) - s
    cert = {"sigma": sigma, "seesaw_values": res.values, "dual_povm": [y / hi for y in yv] if hi > 0 else yv}
    return _bracket(lo, hi, "seesaw+sdp", cert)


# ----------------------------------------------------------------------------
# Duality check
# ----------------------------------------------------------------------------


def dual_ball_sup(family, m: HermitianMap) -> float:
    """``sup{⟨φ, ψ⟩ : ‖ψ‖^◇ ≤ 1}`` over ``ψ: K → H`` (one SDP)."""
    family = ConeFamily.parse(family)
    c, dims = m.choi, m.dims
    dout, din = dims
    pdims = (din, dout)
    model = Model()
    sig = model.hermitian(din)
    cpsi = model.hermitian(din * dout)
    base = kron_affine(sig, np.eye(dout))
    constrain_choi(model, family.dual, base - cpsi, pdims, "inner")
    constrain_choi(model, family.dual, base + cpsi, pdims, "inner")
    model.equal(sig.trace(), 1.0)
    model.maximize((c @ cpsi.apply(lambda z: choi_adjoint(z, pdims))).trace())
    sol = model.solve()
    _check(sol, "dual-ball supremum")
    return float(sol.result.primal)


def norm_duality_check(family, m: HermitianMap, *, seed: int = 0, samples: int = 50) -> dict:
    """Compare ``‖φ‖_◇`` with the supremum of ``⟨φ, ψ⟩`` over the dual unit ball.

    The supremum is computed by its own SDP (optimizing over ``ψ`` and a
    state ``σ`` with ``−Φ_{I,σ} ≤ ψ ≤ Φ_{I,σ}``) and also probed with random
    elements of the ball normalized by their dual norm.
    """
    from .hmap import from_choi

    family = ConeFamily.parse(family)
    dn = diamond_norm(family, m)
    sup = dual_ball_sup(family, m)
    rng = np.random.default_rng(seed)
    dout, din = m.dims
    best = -np.inf
    for _ in range(samples):
        g = rng.normal(size=(din * dout,) * 2) + 1j * rng.normal(size=(din * dout,) * 2)
        psi = from_choi(g + g.conj().T, m.out_alg, m.in_alg)
        nrm = dual_diamond_norm(family, psi).value_hi
        best = max(best, float(np.sum(m.choi * choi_adjoint(psi.choi, psi.dims).T).real) / nrm)
    gap = abs(sup - dn.value) / max(1.0, abs(dn.value))
    return {"diamond": dn, "dual_ball_sup": sup, "sample_max": best, "relative_gap": gap,
            "samples_below": best <= dn.value_hi + 1e-8}
