"""Admissible cone families CP, EB and Pos.

Each family is identified with a cone of Choi matrices on ``K ⊗ H``:

========  ==================================  =========================
family    Choi cone                           SDP handling
========  ==================================  =========================
CP        PSD                                 exact
EB        separable operators ``Sep``         PPT outer / product inner
Pos       block-positive operators ``BP``     decomposable inner /
                                              compression outer
========  ==================================  =========================

For ``d_out · d_in ≤ 6`` the PPT and decomposable approximations are exact,
so every computation collapses to a single SDP there.  Elsewhere the two
approximations bracket the true value and results are reported as an
:class:`Interval`.

Duality runs ``CP* = CP``, ``Pos* = EB``, ``EB* = Pos``.  The families are
closed under adjoints, so the "tilde" family ``P̃ = {φ* : φ ∈ P*}`` has the
Choi cone of ``P*``.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .conic import Affine, Model, kron_affine
from .hmap import HermitianMap, choi_apply, choi_adjoint
from .matops import eig, herm, op_norm, partial_transpose, trace_norm

#: Margin below which a membership witness counts as a violation.
TOL_MEMBER = 1e-8
#: Largest ``d_out · d_in`` where PPT / decomposability are exact.
EXACT_PRODUCT_DIM = 6


class ConeFamily(enum.Enum):
    CP = "cp"
    EB = "eb"
    POS = "pos"

    @classmethod
    def parse(cls, s) -> "ConeFamily":
        if isinstance(s, ConeFamily):
            return s
        try:
            return cls(str(s).lower())
        except ValueError:
            raise ValueError(f"unknown cone family {s!r}; expected cp, eb or pos") from None

    @property
    def dual(self) -> "ConeFamily":
        return _DUAL[self]

    @property
    def tilde(self) -> "ConeFamily":
        """Family whose Choi cone is that of ``P̃`` (adjoint image of ``P*``)."""
        return _DUAL[self]

    def is_exact(self, dims) -> bool:
        return self is ConeFamily.CP or dims[0] * dims[1] <= EXACT_PRODUCT_DIM


_DUAL = {ConeFamily.CP: ConeFamily.CP, ConeFamily.POS: ConeFamily.EB, ConeFamily.EB: ConeFamily.POS}


@dataclass(frozen=True)
class Interval:
    """Certified bracket ``lo ≤ value ≤ hi``."""

    lo: float
    hi: float

    @property
    def mid(self) -> float:
        return (self.lo + self.hi) / 2

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def contains(self, v: float, tol: float = 0.0) -> bool:
        return self.lo - tol <= v <= self.hi + tol


IN, OUT, UNDECIDED = "IN", "OUT", "UNDECIDED"


@dataclass
class MembershipVerdict:
    """Result of a cone-membership test.

    ``margin`` is the smallest value of the defining functional that was
    certified (IN) or found (OUT); ``certificate`` holds the data needed to
    re-check the verdict.
    """

    status: str
    margin: float
    certificate: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        cert = {}
        for k, v in self.certificate.items():
            if isinstance(v, np.ndarray):
                cert[k] = [[float(z.real), float(z.imag)] for z in np.asarray(v, complex).ravel()]
            elif isinstance(v, list) and v and isinstance(v[0], np.ndarray):
                cert[k] = [[[float(z.real), float(z.imag)] for z in np.asarray(a, complex).ravel()] for a in v]
            else:
                cert[k] = v
        return {"status": self.status, "margin": float(self.margin), "certificate": cert}


# ----------------------------------------------------------------------------
# SDP approximations of the Choi cones
# ----------------------------------------------------------------------------


def probe_vectors(d: int, extra: int | None = None, seed: int = 7) -> np.ndarray:
    """Unit vectors in ``C^d`` whose projectors span all Hermitian matrices.

    Computational basis, the real and imaginary two-level superpositions, and
    ``extra`` seeded random vectors (default ``2 d²``).
    """
    vecs = [np.eye(d)[i].astype(complex) for i in range(d)]
    for i in range(d):
        for j in range(i + 1, d):
            for ph in (1, -1, 1j, -1j):
                v = np.zeros(d, complex)
                v[i], v[j] = 1, ph
                vecs.append(v / np.sqrt(2))
    rng = np.random.default_rng(seed)
    for _ in range(2 * d * d if extra is None else extra):
        v = rng.normal(size=d) + 1j * rng.normal(size=d)
        vecs.append(v / np.linalg.norm(v))
    return np.array(vecs)


def constrain_choi(model: Model, family: ConeFamily, z: Affine, dims, approx: str = "inner") -> None:
    """Add ``z ∈ C(family)`` to ``model`` through an SDP approximation.

    ``approx="inner"`` uses a subset of the cone (feasible points are
    certified members), ``approx="outer"`` a superset.  Both coincide with
    the cone when :meth:`ConeFamily.is_exact` holds.
    """
    family = ConeFamily.parse(family)
    d1, d2 = dims
    if family is ConeFamily.CP:
        model.psd(z)
        return
    exact = family.is_exact(dims)
    if family is ConeFamily.EB:
        if exact or approx == "outer":
            model.psd(z)
            model.psd(z.apply(lambda a: partial_transpose(a, dims, 1)))
            return
        # Inner: Σ_k |x_k⟩⟨x_k| ⊗ B_k on the smaller factor, B_k ⪰ 0.
        small_first = d1 <= d2
        ds, db = (d1, d2) if small_first else (d2, d1)
        total = Affine(np.zeros((d1 * d2, d1 * d2), complex))
        for x in probe_vectors(ds):
            b = model.hermitian(db)
            model.psd(b)
            p = np.outer(x, x.conj())
            total = total + (kron_affine(p, b) if small_first else kron_affine(b, p))
        model.equal(z, total)
        return
    # Pos: block-positive cone.
    if exact or approx == "inner":
        q = model.hermitian(d1 * d2)
        model.psd(q)
        model.psd(z - q.apply(lambda a: partial_transpose(a, dims, 1)))
        return
    small_first = d1 <= d2
    ds, db = (d1, d2) if small_first else (d2, d1)
    for x in probe_vectors(ds):
        v = np.kron(x[:, None], np.eye(db)) if small_first else np.kron(np.eye(db), x[:, None])
        model.psd(v.conj().T @ z @ v)


# ----------------------------------------------------------------------------
# Membership tests
# ----------------------------------------------------------------------------


def cp_membership(m: HermitianMap) -> MembershipVerdict:
    """Complete positivity: the Choi matrix is PSD."""
    w, v = eig(m.choi)
    margin = float(w[-1])
    if margin >= -1e-10:
        return MembershipVerdict(IN, margin, {"min_eigenvalue": margin})
    return MembershipVerdict(OUT, margin, {"witness_vector": v[:, -1]})


def _ppt_margins(c, dims):
    w1, v1 = eig(c)
    w2, v2 = eig(partial_transpose(c, dims, 1))
    return (float(w1[-1]), v1[:, -1]), (float(w2[-1]), v2[:, -1])


def eb_membership(m: HermitianMap) -> MembershipVerdict:
    """Entanglement breaking: the Choi matrix is separable.

    Decided exactly by the PPT test when ``d_out · d_in ≤ 6``.  In larger
    dimensions a PPT violation gives OUT, an explicit product decomposition
    gives IN, and otherwise the verdict is UNDECIDED.
    """
    dims = m.dims
    (m1, v1), (m2, v2) = _ppt_margins(m.choi, dims)
    if m1 < -1e-10:
        return MembershipVerdict(OUT, m1, {"witness": "psd", "witness_vector": v1})
    if m2 < -1e-10:
        return MembershipVerdict(OUT, m2, {"witness": "partial_transpose", "witness_vector": v2})
    if ConeFamily.EB.is_exact(dims):
        return MembershipVerdict(IN, min(m1, m2), {"ppt_min_eigenvalues": [m1, m2], "exact": True})
    dec = separable_decomposition(m.choi, dims)
    if dec is not None:
        F, E, resid = dec
        return MembershipVerdict(IN, -resid, {"F": F, "E": E, "residual": resid})
    return MembershipVerdict(UNDECIDED, min(m1, m2), {"ppt_min_eigenvalues": [m1, m2]})


def separable_decomposition(c, dims, tol: float = 1e-8):
    """Search ``C = Σ_k ρ_k ⊗ F_kᵀ`` with PSD factors (the Choi matrix of ``Φ_{F,E}``).

    Returns ``(F, E, residual)`` or None when the probe-vector SDP fails.
    """
    d1, d2 = dims
    model = Model()
    t = model.real()
    small_first = d1 <= d2
    ds, db = (d1, d2) if small_first else (d2, d1)
    xs = probe_vectors(ds)
    bs = []
    total = Affine(np.zeros((d1 * d2, d1 * d2), complex))
    for x in xs:
        b = model.hermitian(db)
        model.psd(b - t * np.eye(db))
        bs.append(b)
        p = np.outer(x, x.conj())
        total = total + (kron_affine(p, b) if small_first else kron_affine(b, p))
    model.equal(total, c)
    model.nonneg(1 - t)
    model.maximize(t)
    sol = model.solve()
    if not sol.ok or sol.value_opt < -1e-9:
        return None
    E, F = [], []
    for x, b in zip(xs, bs):
        bv = herm(sol.value(b))
        w, v = np.linalg.eigh(bv)
        for lam, u in zip(w, v.T):
            if lam <= 1e-14:
                continue
            big = lam * np.outer(u, u.conj())
            small = np.outer(x, x.conj())
            rho, ft = (small, big) if small_first else (big, small)
            E.append(rho)
            F.append(ft.T)
    recon = sum(np.kron(e, f.T) for e, f in zip(E, F))
    resid = float(np.max(np.abs(recon - c)))
    if resid > tol * max(1.0, op_norm(c)):
        return None
    return F, E, resid


def min_product_value(c, dims, seed=0, starts: int = 200, maxiter: int = 500):
    """Minimize ``⟨y⊗x̄|C|y⊗x̄⟩ = ⟨y|φ(|x⟩⟨x|)|y⟩`` over unit ``x, y``.

    Alternates exact minimizations over ``y`` and ``x``; returns
    ``(value, x, y)`` for the best start.
    """
    dout, din = dims
    cadj = choi_adjoint(c, dims)
    rng = np.random.default_rng(seed)
    best = (np.inf, None, None)
    for _ in range(starts):
        x = rng.normal(size=din) + 1j * rng.normal(size=din)
        x /= np.linalg.norm(x)
        val = np.inf
        for _ in range(maxiter):
            w, v = np.linalg.eigh(choi_apply(c, dims, np.outer(x, x.conj())))
            y = v[:, 0]
            w2, v2 = np.linalg.eigh(choi_apply(cadj, (din, dout), np.outer(y, y.conj())))
            x = v2[:, 0]
            if val - w2[0] <= 1e-15 * (1 + abs(w2[0])):
                val = w2[0]
                break
            val = w2[0]
        if val < best[0]:
            best = (float(val), x, y)
    return best


def decomposable_margin(c, dims):
    """Largest ``t`` with ``C = P + Q^Γ``, ``P, Q ⪰ t I`` (capped at 1)."""
    n = dims[0] * dims[1]
    model = Model()
    t = model.real()
    q = model.hermitian(n)
    model.psd(q - t * np.eye(n))
    model.psd(c - q.apply(lambda a: partial_transpose(a, dims, 1)) - t * np.eye(n))
    model.nonneg(1 - t)
    model.maximize(t)
    sol = model.solve()
    if not sol.ok:
        return -np.inf, None
    qv = herm(sol.value(q))
    return float(sol.value_opt), qv


def pos_membership(m: HermitianMap, seed: int = 0, starts: int = 200) -> MembershipVerdict:
    """Positivity of the map.

    OUT when the product-vector search finds ``⟨y|φ(|x⟩⟨x|)|y⟩ < −1e-8``;
    IN when ``C(φ)`` is certified decomposable, ``C = P + Q^Γ`` with
    ``P, Q ⪰ 0`` (such maps are positive; at ``d_out · d_in ≤ 6`` every
    positive map is of this form); UNDECIDED otherwise.
    """
    dims = m.dims
    val, x, y = min_product_value(m.choi, dims, seed=seed, starts=starts)
    if val < -TOL_MEMBER:
        return MembershipVerdict(OUT, val, {"x": x, "y": y})
    t, q = decomposable_margin(m.choi, dims)
    if t >= -1e-9:
        p = herm(m.choi - partial_transpose(q, dims, 1))
        return MembershipVerdict(IN, min(val, t), {"P": p, "Q": q, "product_min": val})
    return MembershipVerdict(UNDECIDED, val, {"product_min": val, "decomposable_margin": t})


def membership(family, m: HermitianMap, seed: int = 0) -> MembershipVerdict:
    family = ConeFamily.parse(family)
    if family is ConeFamily.CP:
        return cp_membership(m)
    if family is ConeFamily.EB:
        return eb_membership(m)
    return pos_membership(m, seed=seed)


def dual_membership(family, m: HermitianMap, seed: int = 0) -> MembershipVerdict:
    """Membership of ``m`` in the dual family ``P*``."""
    return membership(ConeFamily.parse(family).dual, m, seed=seed)


# ----------------------------------------------------------------------------
# Order-unit and base norms of the tilde cone
# ----------------------------------------------------------------------------


def orderunit_norm_tilde(family, X, dims) -> Interval:
    """``‖X‖_{P̃} = inf{λ : −λI ≤ X ≤ λI}`` in the order of ``C(P̃)``.

    ``dims = (d_K, d_H)`` are the factor dimensions of ``X``.  For CP this is
    the operator norm.
    """
    family = ConeFamily.parse(family)
    X = herm(X)
    if family is ConeFamily.CP:
        v = op_norm(X)
        return Interval(v, v)
    cone = family.tilde
    n = X.shape[0]

    def solve(approx):
        model = Model()
        lam = model.real()
        eye = lam * np.eye(n)
        constrain_choi(model, cone, eye - X, dims, approx)
        constrain_choi(model, cone, eye + X, dims, approx)
        model.minimize(lam)
        return model.solve()

    hi_sol = solve("inner")
    hi = hi_sol.result.primal if hi_sol.ok else np.inf
    if cone.is_exact(dims):
        lo = hi_sol.result.dual if hi_sol.ok else 0.0
    else:
        lo_sol = solve("outer")
        lo = lo_sol.result.dual if lo_sol.ok else 0.0
    if cone is ConeFamily.POS:
        # Product vectors give a direct lower bound for the block-positive order.
        v1, _, _ = min_product_value(X, dims, starts=20)
        v2, _, _ = min_product_value(-X, dims, starts=20)
        lo = max(lo, -v1, -v2)
    return Interval(min(lo, hi), hi)


def base_norm_tilde(family, X, dims) -> Interval:
    """``‖X‖_{1,P̃} = sup{Tr XY : −I ≤ Y ≤ I}`` in the order of ``C(P̃)``.

    For CP this is the trace norm.
    """
    family = ConeFamily.parse(family)
    X = herm(X)
    if family is ConeFamily.CP:
        v = trace_norm(X)
        return Interval(v, v)
    cone = family.tilde
    n = X.shape[0]

    def solve(approx):
        model = Model()
        y = model.hermitian(n)
        constrain_choi(model, cone, np.eye(n) - y, dims, approx)
        constrain_choi(model, cone, np.eye(n) + y, dims, approx)
        model.maximize((X @ y).trace().apply(np.real))
        return model.solve()

    lo_sol = solve("inner")
    lo = lo_sol.result.primal if lo_sol.ok else -np.inf
    if cone.is_exact(dims):
        hi = lo_sol.result.dual if lo_sol.ok else np.inf
    else:
        hi_sol = solve("outer")
        hi = hi_sol.result.dual if hi_sol.ok else np.inf
    lo = max(lo, abs(float(np.trace(X).real)))
    return Interval(lo, max(lo, hi))
