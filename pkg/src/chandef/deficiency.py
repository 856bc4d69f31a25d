"""Deficiency of one channel with respect to another.

``Ψ`` is ε-deficient with respect to ``Φ`` under post-processing when every
decision rule applied after ``Φ`` can be imitated after ``Ψ`` up to ``ε``
times the norm of the payoff; the randomization criterion turns this into
``min_{α'} ‖α∘Φ − α'∘Ψ‖_◇ ≤ 2ε``.  Pre-processing is the mirror image with
composition on the input side.

All routines report an interval ``[eps_lo, eps_hi]``:

* ``eps_hi`` is half the diamond distance of an explicit (repaired, exactly
  feasible) randomizing channel, so it is always attained.
* ``eps_lo`` comes from an explicit payoff map ``Γ`` in the dual cone: the
  payoff gap it certifies can never exceed the true ε.

For the full algebra of decisions (``D = B`` after, ``D = A`` before) both
ends come from a single primal/dual pair of SDPs and agree to solver
precision.  For other decision algebras ``eps_hi`` is the full-algebra value
and ``eps_lo`` is the best witness over a net of decision rules.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import minimize

from .cones import ConeFamily, constrain_choi, dual_membership, IN
from .conic import Model, kron_affine
from .corpus import random_channel, random_unitary, rng_of
from .hmap import (
    Experiment,
    HermitianMap,
    adjoint,
    apply,
    choi_adjoint,
    choi_compose,
    choi_mask,
    compose,
    make_cq,
    make_qc,
    out_trace,
    pairing,
    tensor_id,
)
from .matops import (
    BlockAlgebra,
    DimensionError,
    Povm,
    as_algebra,
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
from .norms import SolverFailure, cq_dual_diamond, diamond_norm, dual_diamond_norm, qc_diamond_seesaw

ZERO_TOL = 1e-6


@dataclass
class DeficiencyReport:
    """Certified bounds on the minimal ε and the objects that certify them."""

    eps_lo: float
    eps_hi: float
    certificate_channel: HermitianMap | None = None
    witness_payoff: HermitianMap | None = None
    diagnostics: dict = field(default_factory=dict)

    @property
    def interval(self):
        return (self.eps_lo, self.eps_hi)

    def is_zero(self, tol: float = ZERO_TOL) -> bool:
        return self.eps_hi <= tol

    def to_json(self) -> dict:
        from .jsonio import encode_value
        return {
            "eps_lo": float(self.eps_lo),
            "eps_hi": float(self.eps_hi),
            "certificate_channel": encode_value(self.certificate_channel),
            "witness_payoff": encode_value(self.witness_payoff),
            "diagnostics": encode_value(self.diagnostics),
        }


@dataclass(frozen=True)
class DecisionSpace:
    """A decision algebra with either payoff operators ``G`` or a payoff map ``Γ``."""

    algebra: BlockAlgebra
    payoff: object = None

    def __post_init__(self):
        object.__setattr__(self, "algebra", as_algebra(self.algebra))
        p = self.payoff
        if p is None or isinstance(p, HermitianMap):
            return
        G = [herm(g) for g in as_matrices(p)]
        for g in G:
            if g.shape[0] != self.algebra.ambient_dim:
                raise DimensionError("payoff operator does not match the decision algebra")
            if np.linalg.eigvalsh(g)[0] < -1e-10:
                raise ValueError("payoff operators must be positive semidefinite")
        object.__setattr__(self, "payoff", G)

    def check(self, family, seed: int = 0) -> bool:
        """Payoff maps must lie in the dual cone of the active family."""
        if isinstance(self.payoff, HermitianMap):
            return dual_membership(family, self.payoff, seed=seed).status == IN
        return True


def _report(lo, hi, cert, witness, diag):
    lo = max(0.0, float(lo))
    hi = float(hi)
    if lo > hi:
        # Both ends are certified; a crossing is rounding noise.
        lo, hi = hi, lo
    return DeficiencyReport(lo, hi, cert, witness, diag)


# ----------------------------------------------------------------------------
# Payoffs
# ----------------------------------------------------------------------------


def payoff(E: Experiment, alpha: HermitianMap, G) -> tuple[list[float], float]:
    """Per-index payoffs ``Tr α(ρ_i) G_i`` and their total.

    The total is computed independently as the pairing
    ``⟨α ∘ Φ^cq_E, Φ^qc_G⟩``.
    """
    G = as_matrices(G)
    if len(G) != len(E):
        raise ValueError("need one payoff operator per state")
    per = [float(np.trace(apply(alpha, r) @ g).real) for r, g in zip(E.matrices, G)]
    total = pairing(compose(alpha, make_cq(E.matrices, E.algebra)), make_qc(G, alpha.out_alg))
    return per, float(total)


# ----------------------------------------------------------------------------
# Channel repair
# ----------------------------------------------------------------------------


def repair_channel(choi, in_alg, out_alg, family=ConeFamily.CP) -> HermitianMap:
    """Nearest-by-construction channel to an approximately feasible Choi matrix.

    For CP the negative part is dropped first.  Trace preservation is then
    restored by the congruence ``(I ⊗ T^{-1/2})`` with ``T = Tr_out C`` (a
    pre-composition with a CP map, so membership in any admissible family is
    kept), and a uniform completion on the kernel of ``T``.
    """
    family = ConeFamily.parse(family)
    in_alg, out_alg = as_algebra(in_alg), as_algebra(out_alg)
    dims = (out_alg.ambient_dim, in_alg.ambient_dim)
    c = herm(np.asarray(choi, complex))
    c[~choi_mask(in_alg, out_alg)] = 0
    if family is ConeFamily.CP:
        c = psd_part(c)
    t = herm(out_trace(c, dims))
    s, p = pinv_sqrt(t)
    g = np.kron(np.eye(dims[0]), s)
    c = g @ c @ g.conj().T + np.kron(np.eye(dims[0]) / dims[0], np.eye(dims[1]) - p)
    return HermitianMap(c, in_alg, out_alg)


# ----------------------------------------------------------------------------
# The two SDPs behind every deficiency computation
# ----------------------------------------------------------------------------


@dataclass
class _Side:
    """How the free channel ``χ`` enters.

    ``compose(c)`` maps the Choi matrix of ``χ`` (possibly batched) to the
    Choi matrix of the composite compared with the target; ``pull(g)`` maps
    the Choi matrix of a payoff ``Γ`` to ``C((L†Γ)*)``, the operator paired
    with ``C(χ)`` in ``⟨L(χ), Γ⟩ = Tr C(χ) C((L†Γ)*)``.
    """

    var_in: BlockAlgebra
    var_out: BlockAlgebra
    compose: Callable
    pull: Callable

    @property
    def dims(self):
        return (self.var_out.ambient_dim, self.var_in.ambient_dim)


def _post_side(psi: HermitianMap, d_alg: BlockAlgebra) -> _Side:
    """``χ = α': B' → D`` acting after ``Ψ``."""
    var_in, var_out = psi.out_alg, d_alg
    vd = (var_out.ambient_dim, var_in.ambient_dim)
    gd = (psi.d_in, var_out.ambient_dim)

    def comp(c):
        return choi_compose(c, vd, psi.choi, psi.dims)

    def pull(g):
        # Ψ∘Γ : D → B', its adjoint has Choi on D ⊗ B'.
        return choi_adjoint(choi_compose(psi.choi, psi.dims, g, gd), (var_in.ambient_dim, vd[0]))

    return _Side(var_in, var_out, comp, pull)


def _pre_side(psi: HermitianMap, d_alg: BlockAlgebra) -> _Side:
    """``χ = β': D → A'`` acting before ``Ψ``."""
    var_in, var_out = d_alg, psi.in_alg
    vd = (var_out.ambient_dim, var_in.ambient_dim)
    gd = (var_in.ambient_dim, psi.d_out)

    def comp(c):
        return choi_compose(psi.choi, psi.dims, c, vd)

    def pull(g):
        # Γ∘Ψ : A' → D, its adjoint has Choi on A' ⊗ D.
        return choi_adjoint(choi_compose(g, gd, psi.choi, psi.dims), (vd[1], vd[0]))

    return _Side(var_in, var_out, comp, pull)


def _distance_sdp(family: ConeFamily, target: HermitianMap, side: _Side):
    """``min_χ ‖target − L(χ)‖_◇`` over channels ``χ`` of the family (joint SDP)."""
    vd = side.dims
    model = Model()
    x = model.hermitian(vd[0] * vd[1], choi_mask(side.var_in, side.var_out))
    constrain_choi(model, family, x, vd, "inner")
    model.equal(x.apply(lambda a: partial_trace(a, vd, 0)), np.eye(vd[1]))
    diff = x.apply(side.compose) * -1 + target.choi
    lam = model.real()
    n = target.d_in * target.d_out
    w = model.hermitian(n, choi_mask(target.in_alg, target.out_alg))
    constrain_choi(model, family, w - diff, target.dims, "inner")
    constrain_choi(model, family, w + diff, target.dims, "inner")
    model.equal(w.apply(lambda a: partial_trace(a, target.dims, 0)), lam * np.eye(target.d_in))
    model.minimize(lam)
    sol = model.solve()
    if not sol.ok:
        raise SolverFailure(f"randomization SDP: {sol.status}")
    return float(sol.value_opt), sol.hvalue(x), sol.result


def _witness_sdp(family: ConeFamily, target: HermitianMap, side: _Side):
    """``max_Γ ⟨target, Γ⟩ − max_χ ⟨L(χ), Γ⟩`` over the unit ball of ``‖·‖^◇``.

    The inner maximum over channels is replaced by its dual
    ``min Tr Y : I ⊗ Y − C((L†Γ)*) ∈ P*``.  Returns the optimal value
    (``= 2ε`` at optimum) and ``(Γ, σ, Y)``.
    """
    fam_d = family.dual
    g_in, g_out = target.out_alg, target.in_alg
    gd = (g_out.ambient_dim, g_in.ambient_dim)
    vd = side.dims
    vmask = choi_mask(side.var_in, side.var_out)
    model = Model()
    g = model.hermitian(gd[0] * gd[1], choi_mask(g_in, g_out))
    sig = model.hermitian(gd[0], g_out.mask)
    base = kron_affine(sig, np.eye(gd[1]))
    constrain_choi(model, fam_d, base - g, gd, "inner")
    constrain_choi(model, fam_d, base + g, gd, "inner")
    model.equal(sig.trace(), 1.0)
    y = model.hermitian(vd[1], side.var_in.mask)
    k = g.apply(side.pull).apply(lambda a: a * vmask)
    constrain_choi(model, fam_d, kron_affine(np.eye(vd[0]), y) - k, vd, "inner")
    gadj = g.apply(lambda a: choi_adjoint(a, gd))
    model.maximize((target.choi @ gadj).trace() - y.trace())
    sol = model.solve()
    if not sol.ok:
        raise SolverFailure(f"witness SDP: {sol.status}")
    return float(sol.value_opt), sol.hvalue(g), sol.hvalue(sig), sol.hvalue(y)


def _certify_witness(family, target, side, g, sig, y):
    """Exact lower bound on ``2ε`` from an approximate witness (CP repair)."""
    gd = (target.d_in, target.d_out)
    vd = side.dims
    vmask = choi_mask(side.var_in, side.var_out)
    sig = herm(sig)
    g = herm(g)
    pair = float(np.sum(target.choi * choi_adjoint(g, gd).T).real)
    k = side.pull(g) * vmask
    if family is ConeFamily.CP:
        base = np.kron(sig, np.eye(gd[1]))
        d1 = max(0.0, -min_eig(base - g), -min_eig(base + g))
        sig = sig + d1 * np.eye(gd[0])
        norm_bound = float(np.trace(sig).real)
        d2 = max(0.0, -min_eig(np.kron(np.eye(vd[0]), y) - k))
        y = y + d2 * np.eye(vd[1])
        certified = True
    else:
        norm_bound = float(np.trace(sig).real)
        certified = False
    value = (pair - float(np.trace(y).real)) / norm_bound
    return value, g / norm_bound, sig / norm_bound, certified


def _payoff_gap_ratio(family, phi, psi, gamma, direction):
    """Payoff-gap ratio ``(‖Φ∘Γ‖^◇ − ‖Ψ∘Γ‖^◇)/‖Γ‖^◇`` (post) or its pre mirror."""
    if direction == "post":
        a, b = compose(phi, gamma), compose(psi, gamma)
    else:
        a, b = compose(gamma, phi), compose(gamma, psi)
    na = dual_diamond_norm(family, a)
    nb = dual_diamond_norm(family, b)
    ng = dual_diamond_norm(family, gamma)
    return (na.value_lo - nb.value_hi) / ng.value_hi, {"phi_gamma": na.interval, "psi_gamma": nb.interval,
                                                      "gamma": ng.interval}


def _solve_fixed(family, target, side, phi, psi, direction, *, ii_check=True):
    """Both SDPs for one target; returns the report pieces."""
    lam, xc, _ = _distance_sdp(family, target, side)
    chi = repair_channel(xc, side.var_in, side.var_out, family)
    gap_map = target - HermitianMap(side.compose(chi.choi), target.in_alg, target.out_alg)
    dn = diamond_norm(family, gap_map)
    hi = dn.value_hi / 2

    wval, g, sig, y = _witness_sdp(family, target, side)
    lo2, g_n, sig_n, certified = _certify_witness(family, target, side, g, sig, y)
    lo = lo2 / 2
    g_map = HermitianMap(g_n, target.out_alg, target.in_alg)
    # Shift by the replacer onto σ: Γ' = Γ + Φ_{I,σ} lies in the dual cone.
    shift = HermitianMap(np.kron(sig_n, np.eye(target.d_out)), target.out_alg, target.in_alg)
    witness = g_map + shift
    diag = {"sdp_distance": lam, "sdp_witness": wval, "eps_lo_direct": lo, "witness_certified": certified}
    if ii_check and target is phi:
        r, parts = _payoff_gap_ratio(family, phi, psi, witness, direction)
        diag["eps_lo_ratio"] = r
        diag["ratio_parts"] = parts
        lo = max(lo, r)
    return lo, hi, chi, witness, diag


def _same_algebra(a: BlockAlgebra, b: BlockAlgebra) -> bool:
    return a.labels == b.labels


def _embedding_channel(src: BlockAlgebra, dst: BlockAlgebra) -> HermitianMap | None:
    """Isometric embedding of a full matrix algebra into the largest block of ``dst``."""
    if not src.is_full:
        return None
    d = src.ambient_dim
    labels = np.asarray(dst.labels)
    for lab in sorted(set(labels), key=lambda l: -np.sum(labels == l)):
        idx = np.flatnonzero(labels == lab)
        if len(idx) >= d:
            v = np.zeros((dst.ambient_dim, d), complex)
            v[idx[:d], np.arange(d)] = 1
            return HermitianMap(_kraus_choi([v]), src, dst)
    return None


def _compression_channel(src: BlockAlgebra, dst: BlockAlgebra) -> HermitianMap | None:
    """A channel ``src → dst`` that acts as the identity on a copy of ``dst``."""
    if not dst.is_full:
        return None
    d = dst.ambient_dim
    labels = np.asarray(src.labels)
    for lab in sorted(set(labels), key=lambda l: -np.sum(labels == l)):
        idx = np.flatnonzero(labels == lab)
        if len(idx) >= d:
            v = np.zeros((src.ambient_dim, d), complex)
            v[idx[:d], np.arange(d)] = 1
            rest = np.eye(src.ambient_dim) - v @ v.conj().T
            # a ↦ V†aV + Tr((I − VV†)a)·|0⟩⟨0|
            kraus = [v.conj().T]
            w, u = np.linalg.eigh(rest)
            for val, vec in zip(w, u.T):
                if val > 0.5:
                    k = np.zeros((d, src.ambient_dim), complex)
                    k[0] = vec.conj()
                    kraus.append(k)
            return HermitianMap(_kraus_choi(kraus), src, dst)
    return None


def _sharp_rule(rng, src: BlockAlgebra, dst: BlockAlgebra) -> HermitianMap:
    """Random extremal-looking channel ``src → dst``.

    Kraus operators ``V W_j U`` where ``U, V`` are Haar unitaries and the
    ``W_j`` cut the input basis into chunks of size ``d_dst``; restricted to
    the algebras this gives, e.g., rank-one projective measurements when
    ``dst`` is commutative.  Such sharp rules find larger gaps than generic
    noisy channels.
    """
    din, dout = src.ambient_dim, dst.ambient_dim
    u, v = random_unitary(rng, din), random_unitary(rng, dout)
    kraus = []
    for j in range(0, din, dout):
        w = np.zeros((dout, din), complex)
        idx = np.arange(j, min(j + dout, din))
        w[idx - j, idx] = 1
        kraus.append(v @ w @ u)
    return HermitianMap(_kraus_choi(kraus), src, dst)


def _kraus_choi(kraus):
    vecs = [np.asarray(k, complex).reshape(-1) for k in kraus]
    return sum(np.outer(v, v.conj()) for v in vecs)


# ----------------------------------------------------------------------------
# Post- and pre-processing deficiency
# ----------------------------------------------------------------------------


def post_deficiency(family, Phi: HermitianMap, Psi: HermitianMap, D=None, *, seed: int = 0,
                    net: int = 12) -> DeficiencyReport:
    """Post-processing deficiency of ``Psi`` with respect to ``Phi``.

    Parameters
    ----------
    D : BlockAlgebra, optional
        Decision algebra.  The default (``None``) is the output algebra of
        ``Phi``, which gives the deficiency over all decision algebras.
    net : int
        Number of random decision rules tried when ``D`` differs from the
        output algebra of ``Phi``.
    """
    family = ConeFamily.parse(family)
    if not _same_algebra(Phi.in_alg, Psi.in_alg):
        raise DimensionError("post-processing needs a common input algebra")
    full = _solve_fixed(family, Phi, _post_side(Psi, Phi.out_alg), Phi, Psi, "post")
    lo, hi, chi, witness, diag = full
    diag["decision_algebra"] = list(Phi.out_alg.blocks)
    if D is None or _same_algebra(as_algebra(D), Phi.out_alg):
        return _report(lo, hi, chi, witness, diag)

    D = as_algebra(D)
    side = _post_side(Psi, D)
    rules = []
    emb = _embedding_channel(Phi.out_alg, D)
    if emb is not None:
        rules.append(emb)
    rng = rng_of(seed)
    for _ in range(net):
        rules.append(_sharp_rule(rng, Phi.out_alg, D))
    rules.append(random_channel(rng, Phi.d_out, D.ambient_dim, in_alg=Phi.out_alg, out_alg=D))
    best = (-np.inf, None, None)
    for alpha in rules:
        target = compose(alpha, Phi)
        wval, g, sig, y = _witness_sdp(family, target, side)
        v, g_n, sig_n, _ = _certify_witness(family, target, side, g, sig, y)
        if v / 2 > best[0]:
            shift = HermitianMap(np.kron(sig_n, np.eye(target.d_out)), target.out_alg, target.in_alg)
            best = (v / 2, HermitianMap(g_n, target.out_alg, target.in_alg) + shift, alpha)
    diag = {"full_algebra": diag, "decision_algebra": list(D.blocks), "net_size": len(rules),
            "embedding_in_net": emb is not None, "best_rule": best[2]}
    return _report(best[0], hi, chi, best[1], diag)


def pre_deficiency(family, Phi: HermitianMap, Psi: HermitianMap, D=None, *, seed: int = 0,
                   net: int = 12) -> DeficiencyReport:
    """Pre-processing deficiency of ``Psi`` with respect to ``Phi``.

    ``D`` defaults to the input algebra of ``Phi`` (the full deficiency).
    For a commutative ``D`` the classical value is computed with
    :func:`pre_range_inclusion`.
    """
    family = ConeFamily.parse(family)
    if not _same_algebra(Phi.out_alg, Psi.out_alg):
        raise DimensionError("pre-processing needs a common output algebra")
    full = _solve_fixed(family, Phi, _pre_side(Psi, Phi.in_alg), Phi, Psi, "pre")
    lo, hi, chi, witness, diag = full
    diag["decision_algebra"] = list(Phi.in_alg.blocks)
    if D is None or _same_algebra(as_algebra(D), Phi.in_alg):
        return _report(lo, hi, chi, witness, diag)

    D = as_algebra(D)
    if D.is_commutative:
        ri = pre_range_inclusion(Phi, Psi, seed=seed, full_bound=hi)
        ri.diagnostics["decision_algebra"] = list(D.blocks)
        return ri
    side = _pre_side(Psi, D)
    rules = []
    comp = _compression_channel(D, Phi.in_alg)
    if comp is not None:
        rules.append(comp)
    rng = rng_of(seed)
    for _ in range(net):
        rules.append(_sharp_rule(rng, D, Phi.in_alg))
    rules.append(random_channel(rng, D.ambient_dim, Phi.d_in, in_alg=D, out_alg=Phi.in_alg))
    best = (-np.inf, None, None)
    for beta in rules:
        target = compose(Phi, beta)
        wval, g, sig, y = _witness_sdp(family, target, side)
        v, g_n, sig_n, _ = _certify_witness(family, target, side, g, sig, y)
        if v / 2 > best[0]:
            shift = HermitianMap(np.kron(sig_n, np.eye(target.d_out)), target.out_alg, target.in_alg)
            best = (v / 2, HermitianMap(g_n, target.out_alg, target.in_alg) + shift, beta)
    diag = {"full_algebra": diag, "decision_algebra": list(D.blocks), "net_size": len(rules),
            "compression_in_net": comp is not None, "best_rule": best[2]}
    return _report(best[0], hi, chi, best[1], diag)


# ----------------------------------------------------------------------------
# Range inclusion (classical pre-processing deficiency)
# ----------------------------------------------------------------------------


def _top_state(h, alg: BlockAlgebra):
    """Pure state in ``alg`` maximizing ``Tr hσ`` (top eigenvector of one block)."""
    labels = np.asarray(alg.labels)
    best = (-np.inf, None)
    for lab in sorted(set(labels)):
        idx = np.flatnonzero(labels == lab)
        w, v = np.linalg.eigh(herm(h[np.ix_(idx, idx)]))
        if w[-1] > best[0]:
            x = np.zeros(alg.ambient_dim, complex)
            x[idx] = v[:, -1]
            best = (w[-1], x)
    return best[1]


def _range_distance(Phi, Psi, sigma):
    """``min_ρ ‖Φ(σ) − Ψ(ρ)‖_1`` in dual form; returns ``(value, G, ρ)``.

    The dual ``max Tr G Φ(σ) − t`` over ``−I ≤ G ≤ I``, ``t I ⪰ Ψ*(G)``
    yields a witness ``G`` whose value is a certified lower bound.
    """
    d = Phi.d_out
    target = apply(Phi, sigma)
    adj = adjoint(Psi)
    model = Model()
    g = model.hermitian(d, Phi.out_alg.mask)
    t = model.real()
    model.psd(np.eye(d) - g)
    model.psd(g + np.eye(d))
    model.psd(t * np.eye(Psi.d_in) - g.apply(lambda a: _apply_batched(adj, a)))
    model.maximize((g @ target).trace() - t)
    sol = model.solve()
    if not sol.ok:
        raise SolverFailure(f"range distance SDP: {sol.status}")
    gv = sol.hvalue(g)
    # Clip into the unit ball, then evaluate exactly.
    w, v = np.linalg.eigh(gv)
    gv = (v * np.clip(w, -1, 1)) @ v.conj().T
    value = float(np.trace(gv @ target).real) - _max_state_value(apply(adj, gv), Psi.in_alg)
    return value, gv


def _apply_batched(m: HermitianMap, a):
    t = m.choi.reshape(m.d_out, m.d_in, m.d_out, m.d_in)
    return np.einsum("kilj,...ij->...kl", t, a)


def _max_state_value(h, alg):
    x = _top_state(h, alg)
    return float(np.real(np.vdot(x, h @ x)))


def pre_range_inclusion(Phi: HermitianMap, Psi: HermitianMap, *, seed: int = 0, starts: int = 6,
                        iters: int = 30, full_bound: float | None = None) -> DeficiencyReport:
    """``ε = ½ sup_σ inf_ρ ‖Φ(σ) − Ψ(ρ)‖_1`` (range of ``Φ`` inside range of ``Ψ``).

    The inner infimum is an SDP whose dual gives a witness ``G``; the value
    is convex in ``σ``, so the supremum is approached from pure states by
    the iteration ``σ ← argmax Tr Φ*(G) σ`` (each step maximizes an affine
    minorant, hence never decreases the value).  ``G + I`` is reported as a
    positive witness: ``(‖Φ*(G+I)‖ − ‖Ψ*(G+I)‖)/‖G+I‖`` is a second lower
    bound.  The upper end is the full pre-processing deficiency.
    """
    if not _same_algebra(Phi.out_alg, Psi.out_alg):
        raise DimensionError("range inclusion needs a common output algebra")
    rng = rng_of(seed)
    phi_adj = adjoint(Phi)
    alg = Phi.in_alg
    starts_x = [np.eye(alg.ambient_dim)[i].astype(complex) for i in range(alg.ambient_dim)]
    for _ in range(starts):
        x = rng.normal(size=alg.ambient_dim) + 1j * rng.normal(size=alg.ambient_dim)
        if not alg.is_full:
            x = x * (np.asarray(alg.labels) == alg.labels[0])
        starts_x.append(x / np.linalg.norm(x))
    best = (-np.inf, None, None)
    history = []
    for x in starts_x:
        val_prev = -np.inf
        for _ in range(iters):
            sigma = np.outer(x, x.conj())
            val, gv = _range_distance(Phi, Psi, sigma)
            if val > best[0]:
                best = (val, sigma, gv)
            if val <= val_prev + 1e-10:
                break
            val_prev = val
            x = _top_state(apply(phi_adj, gv), alg)
        history.append(val_prev)
    val, sigma, gv = best
    eps_dca = max(0.0, val) / 2
    gp = gv + np.eye(gv.shape[0])
    ng = op_norm(gp)
    eps_wit = (op_norm(apply(phi_adj, gp)) - op_norm(apply(adjoint(Psi), gp))) / ng if ng > 0 else 0.0
    if full_bound is None:
        full_bound = pre_deficiency(ConeFamily.CP, Phi, Psi).eps_hi
    lo = max(eps_dca, eps_wit)
    diag = {"eps_dca": eps_dca, "eps_witness": eps_wit, "worst_input": sigma, "witness_G": gp,
            "start_values": history, "consistent": eps_wit >= eps_dca - 1e-5}
    return _report(lo, max(full_bound, lo), None, None, diag)


# ----------------------------------------------------------------------------
# Experiments and POVMs
# ----------------------------------------------------------------------------


def experiment_post_deficiency(E: Experiment, F: Experiment, D=None, family="cp", *, seed: int = 0) -> DeficiencyReport:
    """Deficiency of ``E`` with respect to ``F`` (``E`` simulates ``F``).

    Delegates to :func:`post_deficiency` on the cq-channels and verifies the
    per-index form ``‖α'(ρ_i) − σ_i‖_1 ≤ 2ε`` on the certificate.
    """
    if len(E) != len(F):
        raise ValueError("experiments must have the same number of states")
    phi = make_cq(F.matrices, F.algebra)
    psi = make_cq(E.matrices, E.algebra)
    rep = post_deficiency(family, phi, psi, D, seed=seed)
    alpha = rep.certificate_channel
    per = [trace_norm(apply(alpha, r) - s) for r, s in zip(E.matrices, F.matrices)]
    rep.diagnostics["per_index_distance"] = per
    rep.diagnostics["per_index_ok"] = bool(max(per) <= 2 * rep.eps_hi + 1e-7)
    return rep


def experiment_pre_deficiency(E: Experiment, F: Experiment) -> DeficiencyReport:
    """``ε = ½ max_i min_{ρ ∈ co(E)} ‖σ_i − ρ‖_1`` for ``F = {σ_i}``."""
    if E.algebra.ambient_dim != F.algebra.ambient_dim:
        raise DimensionError("experiments must live on the same space")
    R = E.matrices
    d = R[0].shape[0]
    his, los, mixes = [], [], []
    for s in F.matrices:
        model = Model()
        w = model.real(len(R))
        p = model.hermitian(d)
        q = model.hermitian(d)
        model.psd(p)
        model.psd(q)
        model.nonneg(w)
        model.equal(w.apply(lambda a: a.sum(axis=-1)), 1.0)
        mix = w.apply(lambda a: np.tensordot(a, np.array(R), axes=(-1, 0)))
        model.equal(p - q, s - mix)
        model.minimize(p.trace() + q.trace())
        sol = model.solve()
        if not sol.ok:
            raise SolverFailure(f"hull distance SDP: {sol.status}")
        wv = np.clip(sol.value(w).real, 0, None)
        wv = wv / wv.sum()
        mixes.append(wv)
        his.append(trace_norm(s - sum(a * r for a, r in zip(wv, R))))
        # Dual witness: max Tr G σ − t, t ≥ Tr G ρ_j, −I ≤ G ≤ I.
        model = Model()
        g = model.hermitian(d)
        t = model.real()
        model.psd(np.eye(d) - g)
        model.psd(np.eye(d) + g)
        for r in R:
            model.psd(t - (g @ r).trace())
        model.maximize((g @ s).trace() - t)
        sol = model.solve()
        gv = sol.hvalue(g)
        wv_, v_ = np.linalg.eigh(gv)
        gv = (v_ * np.clip(wv_, -1, 1)) @ v_.conj().T
        los.append(float(np.trace(gv @ s).real) - max(float(np.trace(gv @ r).real) for r in R))
    return _report(max(los) / 2, max(his) / 2, None, None,
                   {"mixtures": mixes, "distances": his})


def _pad(ops, n):
    ops = list(ops)
    d = ops[0].shape[0]
    return ops + [np.zeros((d, d), complex)] * (n - len(ops))


def povm_post_cleanness(M, N, family="cp") -> DeficiencyReport:
    """Deficiency of ``N`` w.r.t. ``M`` under classical relabeling.

    Returns the stochastic matrix ``Λ`` (``m × n``, columns summing to one)
    minimizing ``‖Φ^qc_M − Φ^qc_{Λ(N)}‖_◇``; ``Λ(N)_i = Σ_j λ_ij N_j``.
    """
    M = M.matrices if isinstance(M, Povm) else as_matrices(M)
    N = N.matrices if isinstance(N, Povm) else as_matrices(N)
    phi, psi = make_qc(M), make_qc(N)
    rep = post_deficiency(family, phi, psi)
    c = rep.certificate_channel.choi
    m, n = len(M), len(N)
    t = c.reshape(m, n, m, n)
    lam = np.array([[t[i, j, i, j].real for j in range(n)] for i in range(m)])
    rep.diagnostics["stochastic_matrix"] = lam
    rep.diagnostics["column_sums"] = lam.sum(axis=0)
    return rep


def _project_simplex(v):
    u = np.sort(v)[::-1]
    css = np.cumsum(u)
    k = np.nonzero(u * np.arange(1, len(v) + 1) > (css - 1))[0][-1]
    tau = (css[k] - 1) / (k + 1)
    return np.maximum(v - tau, 0)


def cleanness_seesaw(M, N, *, seed: int = 0, starts: int = 1, inner_starts: int = 8) -> tuple[float, np.ndarray]:
    """Independent estimate of the cleanness deficiency.

    Minimizes ``Λ ↦ ½ sup_σ Σ_i ‖σ^{1/2}(M_i − Λ(N)_i)σ^{1/2}‖_1`` over
    column-stochastic ``Λ``; the inner supremum is the σ see-saw of
    :func:`chandef.norms.qc_diamond_seesaw`, the outer minimization a
    Nelder-Mead search on simplex-projected columns.
    """
    M = as_matrices(M.matrices if isinstance(M, Povm) else M)
    N = as_matrices(N.matrices if isinstance(N, Povm) else N)
    m, n = len(M), len(N)
    rng = rng_of(seed)

    def lam_of(z):
        # Free coordinates are the first m − 1 rows; columns are projected onto the simplex.
        top = z.reshape(m - 1, n)
        full = np.vstack([top, 1 - top.sum(axis=0)])
        return np.column_stack([_project_simplex(col) for col in full.T])

    def f(z):
        lam = lam_of(z)
        A = [M[i] - sum(lam[i, j] * N[j] for j in range(n)) for i in range(m)]
        return qc_diamond_seesaw(A, seed=0, starts=inner_starts)[0] / 2

    inits = [np.full((m - 1) * n, 1 / m)]
    if m == n:
        inits.append(np.eye(m)[:-1].ravel())
    inits += [rng.dirichlet(np.ones(m), size=n).T[:-1].ravel() for _ in range(starts)]
    best = (np.inf, None)
    for z0 in inits:
        res = minimize(f, z0, method="Nelder-Mead",
                       options={"xatol": 1e-8, "fatol": 1e-10, "maxfev": 3000})
        if res.fun < best[0]:
            best = (float(res.fun), lam_of(res.x))
    return best


def povm_pre_deficiency(M, N, D=None, family="cp", *, seed: int = 0) -> DeficiencyReport:
    """Pre-processing deficiency of ``N`` (on ``A'``) with respect to ``M`` (on ``A``).

    Outcome counts are equalized by padding with zero effects.  The witness
    is a cq payoff list ``G`` normalized by its dual diamond norm.
    """
    M = as_matrices(M.matrices if isinstance(M, Povm) else M)
    N = as_matrices(N.matrices if isinstance(N, Povm) else N)
    k = max(len(M), len(N))
    M, N = _pad(M, k), _pad(N, k)
    phi, psi = make_qc(M), make_qc(N)
    rep = pre_deficiency(family, phi, psi, D, seed=seed)
    if rep.witness_payoff is not None and rep.witness_payoff.d_in == k:
        G = [apply(rep.witness_payoff, np.diag(np.eye(k)[i])) for i in range(k)]
        rep.diagnostics["payoff_list"] = G
        rep.diagnostics["payoff_norm"] = cq_dual_diamond(G).value_hi
    return rep


# ----------------------------------------------------------------------------
# Classical and purely quantum decision problems
# ----------------------------------------------------------------------------


def pauli_group(k: int) -> list[np.ndarray]:
    """The ``k²`` generalized Pauli unitaries ``X^a Z^b``."""
    x = np.roll(np.eye(k), 1, axis=0)
    z = np.diag(np.exp(2j * np.pi * np.arange(k) / k))
    return [np.linalg.matrix_power(x, a) @ np.linalg.matrix_power(z, b) for a in range(k) for b in range(k)]


def one_design_defect(unitaries) -> float:
    """``max |Σ_j (1/k) U_j† a U_j − (Tr a) I|`` over matrix units ``a``."""
    k = unitaries[0].shape[0]
    worst = 0.0
    for i in range(k):
        for j in range(k):
            a = np.zeros((k, k), complex)
            a[i, j] = 1
            s = sum(u.conj().T @ a @ u for u in unitaries) / k
            worst = max(worst, float(np.max(np.abs(s - np.trace(a) * np.eye(k)))))
    return worst


def cq_gamma_construct(Gamma: HermitianMap, *, check_norm: bool = True) -> dict:
    """Classical payoff list reproducing a CP payoff map ``Γ: B(D) → B(H)``.

    ``G_j = (id_H ⊗ θ_j)(C(Γ))`` with ``θ_j(a) = U_j† a U_j / k`` over the
    generalized Pauli group; ``Φ^cq_G`` has the same dual diamond norm as
    ``Γ``.
    """
    if min_eig(Gamma.choi) < -1e-9:
        raise ValueError("the payoff map must be completely positive")
    k, dh = Gamma.d_in, Gamma.d_out
    us = pauli_group(k)
    G = []
    for u in us:
        w = np.kron(np.eye(dh), u.conj().T)
        G.append(herm(w @ Gamma.choi @ w.conj().T) / k)
    out = {"G": G, "cq_map": make_cq(G), "design_defect": one_design_defect(us)}
    if check_norm:
        n1 = dual_diamond_norm("cp", Gamma)
        n2 = cq_dual_diamond(G)
        out["norm_gamma"] = n1.interval
        out["norm_cq"] = n2.interval
        out["norm_gap"] = abs(n1.value - n2.value)
    return out


def bi_state_factorize(sigma, dims) -> tuple[HermitianMap, np.ndarray]:
    """Write a state on ``H ⊗ D`` as ``(β ⊗ id_D)(σ_0)`` with ``σ_0`` pure on ``D ⊗ D``.

    ``β`` has Choi matrix ``(I ⊗ σ_D^{-1/2}) σ (I ⊗ σ_D^{-1/2}) + (I_H/d_H) ⊗ (I − p)``
    where ``p`` is the support of ``σ_D = Tr_H σ``, and
    ``σ_0 = |x⟩⟨x|`` with ``x = Σ_i |i⟩ ⊗ σ_D^{1/2}|i⟩``.
    """
    dh, dd = dims
    sigma = herm(np.asarray(sigma, complex))
    sd = herm(partial_trace(sigma, dims, 0))
    s, p = pinv_sqrt(sd)
    g = np.kron(np.eye(dh), s)
    c = g @ sigma @ g + np.kron(np.eye(dh) / dh, np.eye(dd) - p)
    beta = HermitianMap(c, BlockAlgebra.full(dd), BlockAlgebra.full(dh))
    x = sqrtm_psd(sd).T.reshape(-1)
    return beta, np.outer(x, x.conj())


def powers_stormer_slack(rho, gamma) -> float:
    """``‖ρ − γ‖_1 − ‖ρ^{1/2} − γ^{1/2}‖_F²`` (nonnegative for PSD inputs)."""
    r = sqrtm_psd(rho) - sqrtm_psd(gamma)
    return trace_norm(np.asarray(rho) - np.asarray(gamma)) - float(np.sum(np.abs(r) ** 2))


def two_outcome_value(states, g) -> float:
    """``max_M Σ_ij g_ij Tr ρ_i M_j`` over two-outcome POVMs: ``Tr A_2 + Tr (A_1 − A_2)_+``."""
    a1 = sum(g[i, 0] * s for i, s in enumerate(states))
    a2 = sum(g[i, 1] * s for i, s in enumerate(states))
    w = np.linalg.eigvalsh(herm(a1 - a2))
    return float(np.trace(a2).real + w[w > 0].sum())


def classical_deficiency(E: Experiment, F: Experiment, *, seed: int = 0, grid: int = 7,
                         refine: int = 6) -> tuple[float, np.ndarray]:
    """Two-outcome classical deficiency of ``E`` with respect to ``F``.

    ``sup_g (V_F(g) − V_E(g)) / Σ_i max_j g_ij`` over nonnegative payoff
    matrices ``g`` (one row per state, two decisions); ``V`` is the optimal
    expected payoff.  Grid sweep followed by Nelder-Mead refinement of the
    best grid points.  Every evaluated ``g`` is explicit, so the value is a
    lower bound.
    """
    R, S = E.matrices, F.matrices
    n = len(R)

    def ratio(z):
        g = np.abs(z).reshape(n, 2)
        den = g.max(axis=1).sum()
        if den <= 1e-12:
            return 0.0
        return (two_outcome_value(S, g) - two_outcome_value(R, g)) / den

    ticks = np.linspace(0, 1, grid)
    pts = np.array(np.meshgrid(*([ticks] * (2 * n)), indexing="ij")).reshape(2 * n, -1).T
    vals = np.array([ratio(p) for p in pts])
    order = np.argsort(-vals)[:refine]
    best = (vals[order[0]], pts[order[0]])
    rng = rng_of(seed)
    seeds = [pts[i] for i in order] + [rng.uniform(0, 1, 2 * n) for _ in range(refine)]
    for z0 in seeds:
        res = minimize(lambda z: -ratio(z), z0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-13, "maxiter": 3000})
        if -res.fun > best[0]:
            best = (-res.fun, np.abs(res.x))
    return float(best[0]), np.abs(best[1]).reshape(n, 2)


def alberti_uhlmann_check(E: Experiment, F: Experiment, *, tol: float = ZERO_TOL, seed: int = 0) -> dict:
    """Compare the two-outcome classical verdict with the full 0-deficiency verdict."""
    full = experiment_post_deficiency(E, F)
    cl, g = classical_deficiency(E, F, seed=seed)
    v_full = full.eps_hi <= tol
    v_cl = cl <= tol
    return {"full": full.interval, "classical": cl, "payoff": g, "full_zero": v_full,
            "classical_zero": v_cl, "agree": v_full == v_cl}


def tensor_lift_check(Phi: HermitianMap, Psi: HermitianMap, k: int | None = None, eps: float | None = None,
                      direction: str = "post", *, tol: float = 1e-4, seed: int = 0,
                      starts: int = 6, iters: int = 30) -> dict:
    """Evaluate both sides of the tensor-lift implications on one instance.

    ``direction="post"``: the purely quantum deficiency (decision algebra
    ``B(C^k)``) is bounded by the classical ``D_{k²}`` deficiency of
    ``Ψ ⊗ id_k`` versus ``Φ ⊗ id_k``.  Every quantum payoff witness ``Γ`` is
    carried to the cq payoff of :func:`cq_gamma_construct`, and the
    classical gap ratio must reproduce the quantum one.

    ``direction="pre"``: with ``ε_r`` the range-inclusion deficiency of the
    pair tensored with ``id_k``, the chain requires ``ε_r ≤ ε_pre`` and
    ``ε_pre ≤ ε_r + ½√ε_r``.  ``starts`` and ``iters`` are passed to
    :func:`pre_range_inclusion`.

    ``eps`` optionally checks the stated implication at that threshold.
    """
    k = Phi.d_out if (k is None and direction == "post") else (Phi.d_in if k is None else k)
    out = {"direction": direction, "k": k}
    if direction == "post":
        D = BlockAlgebra.full(k)
        q = post_deficiency("cp", Phi, Psi, None if k == Phi.d_out else D, seed=seed)
        gam = q.witness_payoff
        gam = HermitianMap(psd_part(gam.choi), gam.in_alg, gam.out_alg)
        cq = cq_gamma_construct(gam, check_norm=False)
        G = cq["G"]
        phik, psik = tensor_id(Phi, k), tensor_id(Psi, k)
        num = cq_dual_diamond([apply(phik, g) for g in G]).value_lo - cq_dual_diamond([apply(psik, g) for g in G]).value_hi
        r_cl = num / cq_dual_diamond(G).value_hi
        r_q, _ = _payoff_gap_ratio("cp", Phi, Psi, gam, "post")
        out.update({"eps_quantum": q.interval, "ratio_quantum": r_q, "ratio_classical": r_cl,
                    "slack_lift": r_cl - r_q + 0.0, "slack_upper": q.eps_hi - r_cl})
        out["ok"] = bool(r_cl >= r_q - tol and r_cl <= q.eps_hi + tol)
        if eps is not None:
            out["implication_at_eps"] = bool(not (r_cl <= eps) or q.eps_lo <= eps + tol)
        return out
    if direction != "pre":
        raise ValueError("direction must be 'post' or 'pre'")
    D = BlockAlgebra.full(k)
    p = pre_deficiency("cp", Phi, Psi, None if k == Phi.d_in else D, seed=seed)
    phik, psik = tensor_id(Phi, k), tensor_id(Psi, k)
    # chi ⊗ id_k is admissible for the lifted pair and the diamond norm is
    # stable under ⊗ id_k, so the full value bounds the lifted one.
    r = pre_range_inclusion(phik, psik, seed=seed, starts=starts, iters=iters, full_bound=p.eps_hi)
    er = r.eps_lo
    s1 = p.eps_hi - er
    s2 = (er + 0.5 * np.sqrt(max(er, 0.0))) - p.eps_lo
    out.update({"eps_pre": p.interval, "eps_range": r.interval, "slack_first": s1, "slack_second": s2})
    out["ok"] = bool(s1 >= -tol and s2 >= -tol)
    if eps is not None:
        out["implication_at_eps"] = bool(not (er <= eps) or p.eps_lo <= eps + 0.5 * np.sqrt(eps) + tol)
    return out


def pointwise_post_check(Phi: HermitianMap, Psi: HermitianMap, E: Experiment, D=None, family="cp",
                         *, tol: float = ZERO_TOL) -> dict:
    """Image deficiency ``ε(Φ(E), Ψ(E))`` never exceeds the channel deficiency."""
    ch = post_deficiency(family, Phi, Psi, D)
    img = experiment_post_deficiency(E.image(Psi), E.image(Phi), D, family)
    span = _span_rank(E.matrices, Phi.in_alg) == Phi.in_alg.herm_dim
    out = {"channel": ch.interval, "image": img.interval, "spanning": span,
           "inequality_ok": bool(img.eps_lo <= ch.eps_hi + tol)}
    if span:
        out["zero_equivalent"] = bool((ch.eps_hi <= tol) == (img.eps_hi <= tol)) or \
            bool(ch.eps_lo > tol and img.eps_lo > tol)
    return out


def _span_rank(ops, alg: BlockAlgebra) -> int:
    basis = alg.hermitian_basis()
    coords = np.array([[np.trace(b @ o).real for b in basis] for o in ops])
    return int(np.linalg.matrix_rank(coords, tol=1e-9)) if len(ops) else 0


def ic_check(E) -> bool:
    """Informational completeness: the effects span the Hermitian part of the algebra."""
    if isinstance(E, Povm):
        alg, mats = E.effects[0].algebra, E.matrices
    else:
        mats = as_matrices(E)
        alg = BlockAlgebra.full(mats[0].shape[0])
    return _span_rank(mats, alg) == alg.herm_dim


def pre_zero_via_ic(Phi: HermitianMap, Psi: HermitianMap, E, D=None, family="cp", *,
                    tol: float = ZERO_TOL, samples: int = 2, seed: int = 0) -> dict:
    """Three-way check of 0-deficiency via pulled-back POVMs.

    (i) the channel pre-deficiency, (ii) the POVM pre-deficiency of
    ``Ψ*(F)`` against ``Φ*(F)`` for sampled POVMs ``F``, (iii) the same for
    the informationally complete ``E``.
    """
    from .corpus import random_povm
    E = as_matrices(E.matrices if isinstance(E, Povm) else E)
    if not ic_check(E):
        raise ValueError("E is not informationally complete")
    pa, qa = adjoint(Phi), adjoint(Psi)
    v1 = pre_deficiency(family, Phi, Psi, D).eps_hi <= tol
    rng = rng_of(seed)
    v2 = []
    for _ in range(samples):
        F = random_povm(rng, Phi.d_out, 3)
        v2.append(povm_pre_deficiency([apply(pa, f) for f in F], [apply(qa, f) for f in F], D, family).eps_hi <= tol)
    r3 = povm_pre_deficiency([apply(pa, e) for e in E], [apply(qa, e) for e in E], D, family)
    v3 = r3.eps_hi <= tol
    return {"channel_zero": v1, "sampled_povm_zero": v2, "ic_zero": v3,
            "equivalent": bool(v1 == v3 and (not v1 or all(v2)))}
