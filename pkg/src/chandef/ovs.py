"""Ordered vector spaces with polyhedral cones, base sections and their norms.

A :class:`PolyCone` keeps both descriptions of a pointed full-dimensional
cone ``Q ⊂ R^d``: extreme rays (``generators``) and facet normals
(``facets``, so ``Q = {x : F x ≥ 0}``).  The two are converted into each
other with the double description method.

A :class:`BaseSection` is ``B = T ∩ {q ∈ Q : ⟨q, b̃⟩ = 1}`` for a subspace
``T`` meeting the interior of ``Q``.  Its order interval hull
``O_B = {x : −b ≤ x ≤ b for some b ∈ B}`` is the unit ball of ``‖·‖_B``;
every norm here is a small LP.

The dual space is identified with ``R^d`` through the standard inner product.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import scipy.linalg

from .conic import solve_lp

if TYPE_CHECKING:
    from .hmap import HermitianMap

TOL = 1e-9
MAX_DIM = 12
MAX_RAYS = 10_000


class PolyhedralError(ValueError):
    """The cone or section violates a structural precondition."""


# ----------------------------------------------------------------------------
# Double description
# ----------------------------------------------------------------------------


def _unit_rows(a):
    a = np.atleast_2d(np.asarray(a, float))
    n = np.linalg.norm(a, axis=1, keepdims=True)
    return a[n[:, 0] > TOL] / n[n[:, 0] > TOL]


def _dedupe(rays, tol=1e-8, chunk=512):
    """Drop rows within ``tol`` of an earlier row."""
    rays = np.atleast_2d(rays)
    keep = np.ones(len(rays), bool)
    sq = (rays ** 2).sum(axis=1)
    for s in range(0, len(rays), chunk):
        block = rays[s:s + chunk]
        e = s + len(block)
        d2 = sq[s:e, None] + sq[None, :e] - 2 * block @ rays[:e].T
        # The Gram form loses ~1e-15 to cancellation, so compare on a coarser scale.
        close = d2 < max(tol * tol, 1e-12)
        close[:, s:] &= np.tri(len(block), len(block), -1, dtype=bool)
        close &= keep[None, :e]
        keep[s:e] &= ~close.any(axis=1)
    return rays[keep]


def _adjacent_pairs(active, rows, pos, neg, d, chunk=20_000):
    """Adjacent (positive, negative) ray pairs of the current cone.

    Two extreme rays are adjacent iff the inequalities active on both have
    rank ``d − 2``.  The rank is read off the Gram matrix
    ``Σ_{j ∈ common} a_j a_jᵀ``: both rays lie in its kernel, so adjacency
    means the third smallest eigenvalue is nonzero.  Near-threshold cases
    are decided by an SVD of the rows themselves.
    """
    z = active.astype(float)
    pi, ni = np.flatnonzero(pos), np.flatnonzero(neg)
    cp, cn = np.nonzero(z[pi] @ z[ni].T >= d - 2.5)
    cp, cn = pi[cp], ni[cn]
    if d <= 2 or len(cp) == 0:
        return cp, cn
    outer = np.einsum("ja,jb->jab", rows, rows).reshape(len(rows), d * d)
    ok = np.zeros(len(cp), bool)
    for s in range(0, len(cp), chunk):
        c = z[cp[s:s + chunk]] * z[cn[s:s + chunk]]
        w = np.linalg.eigvalsh((c @ outer).reshape(-1, d, d))[:, 2]
        ok[s:s + chunk] = w > 1e-9
        for t in np.flatnonzero((w > 1e-13) & (w <= 1e-9)):
            sub = rows[c[t] > 0]
            ok[s + t] = np.linalg.matrix_rank(sub, tol=1e-8) == d - 2
    return cp[ok], cn[ok]


def extreme_rays(A, tol: float = TOL) -> np.ndarray:
    """Extreme rays of the pointed cone ``{x : A x ≥ 0}`` (rows, unit norm).

    Incremental double description: start from a simplicial cone cut out by
    ``d`` independent rows, then add the remaining inequalities one at a
    time, combining each positive/negative pair of adjacent rays.
    """
    A = _unit_rows(A)
    m, d = A.shape
    if d > MAX_DIM:
        raise PolyhedralError(f"dimension {d} exceeds the enumeration cap {MAX_DIM}")
    if np.linalg.matrix_rank(A, tol=1e-10) < d:
        raise PolyhedralError("the cone contains a line (inequalities do not have full rank)")
    _, _, piv = scipy.linalg.qr(A.T, pivoting=True)
    first = list(piv[:d])
    rays = np.linalg.inv(A[first]).T
    rays = _unit_rows(rays)
    done = list(first)
    for i in piv[d:]:
        a = A[i]
        vals = rays @ a
        pos, neg = vals > tol, vals < -tol
        if not neg.any():
            done.append(i)
            continue
        active = np.abs(rays @ A[done].T) <= tol
        p, n = _adjacent_pairs(active, A[done], pos, neg, d)
        new = vals[p, None] * rays[n] - vals[n, None] * rays[p]
        rays = _dedupe(_unit_rows(np.vstack([rays[~neg], new])))
        if len(rays) > MAX_RAYS:
            raise PolyhedralError("ray count exceeds the enumeration cap")
        done.append(i)
    return rays


# ----------------------------------------------------------------------------
# Cones
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class PolyCone:
    generators: np.ndarray
    facets: np.ndarray

    def __post_init__(self):
        g, f = np.atleast_2d(self.generators), np.atleast_2d(self.facets)
        if g.shape[1] != f.shape[1]:
            raise PolyhedralError("generators and facets live in different dimensions")
        if np.min(f @ g.T) < -1e-10:
            raise PolyhedralError("a generator violates a facet inequality")

    @classmethod
    def from_generators(cls, gens) -> "PolyCone":
        gens = _unit_rows(gens)
        if np.linalg.matrix_rank(gens) < gens.shape[1]:
            raise PolyhedralError("generators do not span the space")
        facets = extreme_rays(gens)
        return cls(extreme_rays(facets), facets)

    @classmethod
    def from_facets(cls, facets) -> "PolyCone":
        gens = extreme_rays(facets)
        return cls(gens, extreme_rays(gens))

    @classmethod
    def orthant(cls, d: int) -> "PolyCone":
        return cls(np.eye(d), np.eye(d))

    @property
    def dim(self) -> int:
        return self.generators.shape[1]

    def contains(self, x, tol: float = 1e-10) -> bool:
        return bool(np.min(self.facets @ np.asarray(x, float)) >= -tol)

    def is_interior(self, x, tol: float = 1e-10) -> bool:
        return bool(np.min(self.facets @ np.asarray(x, float)) > tol)

    def to_json(self) -> dict:
        return {"generators": self.generators.tolist(), "facets": self.facets.tolist()}


def dual_cone(Q: PolyCone) -> PolyCone:
    """``Q* = {y : ⟨y, q⟩ ≥ 0 for q ∈ Q}``: generators and facets swap."""
    return PolyCone(Q.facets.copy(), Q.generators.copy())


def same_rays(a, b, tol: float = 1e-8) -> bool:
    """Equality of two ray sets up to positive scaling and order."""
    a, b = _unit_rows(a), _unit_rows(b)
    if len(a) != len(b):
        return False
    return all(np.min(np.linalg.norm(b - r, axis=1)) < tol for r in a)


# ----------------------------------------------------------------------------
# Base sections
# ----------------------------------------------------------------------------


def _orth(m):
    m = np.atleast_2d(m)
    if m.size == 0:
        return np.zeros((m.shape[0], 0))
    return scipy.linalg.orth(m, rcond=1e-10)


@dataclass(frozen=True)
class BaseSection:
    """``B = T ∩ S`` with ``S = {q ∈ Q : ⟨q, b̃⟩ = 1}``.

    ``subspace`` holds an orthonormal basis of ``T`` as columns.
    """

    cone: PolyCone
    base_functional: np.ndarray
    subspace: np.ndarray
    interior_point: np.ndarray

    def __post_init__(self):
        q, bt, b = self.cone, np.asarray(self.base_functional, float), np.asarray(self.interior_point, float)
        t = _orth(np.asarray(self.subspace, float).reshape(q.dim, -1))
        object.__setattr__(self, "base_functional", bt)
        object.__setattr__(self, "subspace", t)
        object.__setattr__(self, "interior_point", b)
        if np.min(q.generators @ bt) <= TOL:
            raise PolyhedralError("base functional is not strictly positive on the cone")
        if not q.is_interior(b):
            raise PolyhedralError("interior point is not in the interior of the cone")
        if abs(b @ bt - 1) > 1e-9:
            raise PolyhedralError("interior point is not normalized by the base functional")
        if np.linalg.norm(b - t @ (t.T @ b)) > 1e-9:
            raise PolyhedralError("interior point does not lie in the subspace")

    @classmethod
    def full(cls, cone: PolyCone, base_functional, interior_point=None) -> "BaseSection":
        """The whole base ``S`` (``T = V``)."""
        bt = np.asarray(base_functional, float)
        if interior_point is None:
            g = cone.generators / (cone.generators @ bt)[:, None]
            interior_point = g.mean(axis=0)
        return cls(cone, bt, np.eye(cone.dim), interior_point)

    @classmethod
    def point(cls, cone: PolyCone, base_functional, b) -> "BaseSection":
        """The singleton section ``{b}`` (``T = span b``)."""
        b = np.asarray(b, float)
        b = b / (b @ base_functional)
        return cls(cone, np.asarray(base_functional, float), b[:, None], b)

    @property
    def dim(self) -> int:
        return self.cone.dim

    def vertices(self) -> np.ndarray:
        """Vertices of the polytope ``B`` (rows)."""
        t = self.subspace
        if t.shape[1] == 1:
            return self.interior_point[None, :]
        rays = extreme_rays(self.cone.facets @ t) @ t.T
        return rays / (rays @ self.base_functional)[:, None]

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = np.asarray(x, float)
        return (self.cone.contains(x, tol) and abs(x @ self.base_functional - 1) <= tol
                and np.linalg.norm(x - self.subspace @ (self.subspace.T @ x)) <= tol)

    def to_json(self) -> dict:
        return {"cone": self.cone.to_json(), "base_functional": self.base_functional.tolist(),
                "subspace_basis": self.subspace.T.tolist(), "interior_point": self.interior_point.tolist()}


def dual_section(B: BaseSection) -> BaseSection:
    """``B̃ = (b̃ + B^⊥) ∩ Q*``, the functionals equal to one on all of ``B``.

    Its subspace is ``span(b̃) + T^⊥``, its base functional the interior
    point of ``B`` and its interior point ``b̃``.
    """
    t = B.subspace
    perp = scipy.linalg.null_space(t.T, rcond=1e-10)
    sub = np.column_stack([B.base_functional, perp])
    return BaseSection(dual_cone(B.cone), B.interior_point.copy(), sub, B.base_functional.copy())


# ----------------------------------------------------------------------------
# Norms
# ----------------------------------------------------------------------------


def _norm_lp(B: BaseSection, x):
    """``min ⟨c, b̃⟩`` over ``c ∈ T`` with ``c ± x ∈ Q`` (variables: coordinates of ``c`` in ``T``)."""
    F, t, x = B.cone.facets, B.subspace, np.asarray(x, float)
    ft = F @ t
    a_ub = np.vstack([-ft, -ft])
    b_ub = np.concatenate([-F @ x, F @ x])
    return solve_lp(t.T @ B.base_functional, a_ub, b_ub)


def base_section_norm(B: BaseSection, x) -> float:
    """``‖x‖_B = inf{λ ≥ 0 : x ∈ λ O_B}``; ``inf`` when ``x`` is outside the span of ``O_B``."""
    res = _norm_lp(B, x)
    if res.status == "INFEASIBLE":
        return np.inf
    if not res.ok:
        raise PolyhedralError(f"norm LP failed: {res.status}")
    return max(0.0, float(res.primal))


def in_unit_ball(B: BaseSection, x, tol: float = 1e-9) -> bool:
    """LP membership ``x ∈ O_B``: some ``b ∈ B`` with ``b ± x ∈ Q``."""
    F, t, x = B.cone.facets, B.subspace, np.asarray(x, float)
    ft = F @ t
    res = solve_lp(np.zeros(t.shape[1]), np.vstack([-ft, -ft]), np.concatenate([-F @ x + tol, F @ x + tol]),
                   (t.T @ B.base_functional)[None, :], [1.0])
    return res.ok


def dual_norm_lp(B: BaseSection, xs) -> float:
    """``sup_{x ∈ O_B} ⟨x, x*⟩`` as an LP over pairs ``(x, b)``."""
    return _dual_norm_solution(B, xs)[0]


def _dual_norm_solution(B: BaseSection, xs):
    F, t, xs = B.cone.facets, B.subspace, np.asarray(xs, float)
    d, k = t.shape
    ft = F @ t
    # variables (x, y) with b = T y
    a_ub = np.block([[F, -ft], [-F, -ft]])
    b_ub = np.zeros(2 * len(F))
    a_eq = np.concatenate([np.zeros(d), t.T @ B.base_functional])[None, :]
    res = solve_lp(np.concatenate([-xs, np.zeros(k)]), a_ub, b_ub, a_eq, [1.0])
    if not res.ok:
        raise PolyhedralError(f"dual-norm LP failed: {res.status}")
    return -float(res.primal), res.x[:d], t @ res.x[d:]


def _order_interval_by_generators(B: BaseSection) -> np.ndarray:
    # b ± x ∈ Q with b = Gᵀλ: extreme points use each generator with one sign,
    # and λ ranges over the extreme rays of {w ≥ 0 : P_{T⊥} Gᵀ w = 0}.
    G, t = B.cone.generators, B.subspace
    L = (np.eye(B.dim) - t @ t.T) @ G.T
    u, sv, vh = np.linalg.svd(L)
    N = vh[int(np.sum(sv > 1e-10)):].T
    W = extreme_rays(N) @ N.T
    W[np.abs(W) < TOL] = 0.0
    W /= (W @ (G @ B.base_functional))[:, None]
    out = []
    for w in W:
        S = np.flatnonzero(w > 0)
        signs = 1 - 2 * ((np.arange(2 ** len(S))[:, None] >> np.arange(len(S))) & 1)
        out.append((signs * w[S]) @ G[S])
    return _dedupe(np.vstack(out))


def _order_interval_by_facets(B: BaseSection) -> np.ndarray:
    F, t = B.cone.facets, B.subspace
    ft = F @ t
    rays = extreme_rays(np.block([[-F, ft], [F, ft]]))
    d = B.dim
    scale = rays[:, d:] @ (t.T @ B.base_functional)
    rays = rays[scale > TOL] / scale[scale > TOL, None]
    return rays[:, :d]


def order_interval_vertices(B: BaseSection) -> np.ndarray:
    """Points whose convex hull is ``O_B`` (all vertices, possibly a few more).

    Two exact enumerations, whichever runs in the lower dimension:

    * generator side: ``x ∈ O_B`` iff ``b ± x ∈ Q`` for some ``b ∈ B``, so
      with generators ``g_i`` the extreme points are ``Σ ±λ_i g_i`` where
      ``λ`` is an extreme ray of ``{λ ≥ 0 : Σ λ_i g_i ∈ T}`` normalized by
      ``b̃`` (dimension ``n − dim T⊥`` for ``n`` generators);
    * facet side: the ``x``-parts of the extreme rays of the lifted cone
      ``{(x, y) : T y ± x ∈ Q}`` (dimension ``d + dim T``).
    """
    n, d, k = len(B.cone.generators), B.dim, B.subspace.shape[1]
    if n - d + k < d + k:
        return _order_interval_by_generators(B)
    return _order_interval_by_facets(B)


def dual_norm_check(B: BaseSection, xs) -> dict:
    """Compare ``sup_{O_B} ⟨x, x*⟩`` (vertex enumeration) with ``‖x*‖_{B̃}`` (LP)."""
    verts = order_interval_vertices(B)
    sup_vertices = float(np.max(verts @ np.asarray(xs, float)))
    dual_norm = base_section_norm(dual_section(B), xs)
    sup_lp = dual_norm_lp(B, xs)
    return {"sup_vertices": sup_vertices, "sup_lp": sup_lp, "dual_norm": dual_norm,
            "gap": abs(sup_vertices - dual_norm), "gap_lp": abs(sup_lp - dual_norm)}


def krein_extend(B: BaseSection, f_lin, f_const: float = 0.0):
    """Element ``q* ∈ Q*`` with ``⟨b, q*⟩ = f(b)`` on ``B`` for ``f(b) = ⟨f_lin, b⟩ + f_const``.

    On ``B`` the affine ``f`` equals the linear ``⟨f_lin + f_const b̃, ·⟩``;
    an LP over nonnegative combinations of the generators of ``Q*`` then
    matches it on the vertices of ``B``.  Returns ``(q*, max error)``.
    """
    verts = B.vertices()
    lin = np.asarray(f_lin, float) + f_const * B.base_functional
    target = verts @ lin
    if np.min(target) < -1e-9:
        raise PolyhedralError("the functional is negative somewhere on B")
    gens = B.cone.facets  # generators of Q*
    a_eq = verts @ gens.T
    res = solve_lp(np.zeros(len(gens)), A_eq=a_eq, b_eq=target, bounds=(0, None))
    if not res.ok:
        raise PolyhedralError(f"no extension found: {res.status}")
    q = res.x @ gens
    return q, float(np.max(np.abs(verts @ q - target)))


def half_identity_check(B: BaseSection, b, b2) -> dict:
    """``sup_{q* ∈ O_{B̃} ∩ Q*} ⟨b − b′, q*⟩`` against ``½‖b − b′‖_B``."""
    b, b2 = np.asarray(b, float), np.asarray(b2, float)
    diff = b - b2
    Bd = dual_section(B)
    Fd, td = Bd.cone.facets, Bd.subspace   # facets of Q* are generators of Q
    d, k = td.shape
    # variables (q, y): q ∈ Q*, p = T̃ y ∈ B̃, p − q ∈ Q*
    a_ub = np.block([[-Fd, np.zeros((len(Fd), k))], [Fd, -Fd @ td]])
    b_ub = np.zeros(2 * len(Fd))
    a_eq = np.concatenate([np.zeros(d), td.T @ Bd.base_functional])[None, :]
    res = solve_lp(np.concatenate([-diff, np.zeros(k)]), a_ub, b_ub, a_eq, [1.0])
    if not res.ok:
        raise PolyhedralError(f"half-identity LP failed: {res.status}")
    lhs = -float(res.primal)
    rhs = 0.5 * base_section_norm(B, diff)
    return {"sup": lhs, "half_norm": rhs, "gap": abs(lhs - rhs)}


def positive_map_norm(T, B1: BaseSection, B2: BaseSection, *, samples: int = 0, seed: int = 0) -> dict:
    """``‖T‖_{B1,B2} = sup_{b ∈ B1} ‖T b‖_{B2}`` for a positive linear map ``T``.

    The supremum is taken over the vertices of ``B1``.  With ``samples > 0``
    the value is also compared with ``‖T x‖_{B2}`` on up to ``samples``
    extreme points of ``O_{B1}`` and as many random points of ``O_{B1}``,
    which must never exceed it.
    """
    T = np.asarray(T, float)
    img = T @ B1.cone.generators.T
    if np.min(B2.cone.facets @ img) < -1e-10:
        raise PolyhedralError("the map is not positive")
    verts = B1.vertices()
    value = max(base_section_norm(B2, T @ v) for v in verts)
    out = {"value": value}
    if samples:
        rng = np.random.default_rng(seed)
        ov = order_interval_vertices(B1)
        pts = list(ov[rng.choice(len(ov), min(samples, len(ov)), replace=False)])
        w = rng.dirichlet(np.ones(len(ov)), size=samples)
        pts += list(w @ ov)
        worst = max(base_section_norm(B2, T @ x) for x in pts)
        out["sampled_max"] = worst
        out["excess"] = worst - value
    return out


def order_unit_norm(Q: PolyCone, b, x) -> float:
    """``‖x‖_b = inf{λ : −λb ≤ x ≤ λb}`` for ``b`` interior to ``Q``."""
    fb = Q.facets @ np.asarray(b, float)
    if np.min(fb) <= 0:
        return np.inf
    return float(np.max(np.abs(Q.facets @ np.asarray(x, float)) / fb))


def sandwich_check(B: BaseSection, x, *, samples: int = 1000, seed: int = 0) -> dict:
    """Two-sided sampling of ``‖x‖_B`` through order-unit and base norms.

    ``inf_{b ∈ ri B} ‖x‖_b`` and ``sup_{b̃ ∈ ri B̃} ‖x‖_{S_b̃}`` are sampled
    with Dirichlet mixtures of vertices (strictly positive weights, both a
    flat and a sparse concentration).  For ``x ∈ Q`` the identity
    ``‖x‖_B = max_{b̃ ∈ B̃} ⟨x, b̃⟩`` is checked on the vertices of ``B̃``.
    """
    x = np.asarray(x, float)
    rng = np.random.default_rng(seed)
    norm = base_section_norm(B, x)
    Bd = dual_section(B)
    vb, vd = B.vertices(), Bd.vertices()

    def mixtures(v):
        half = samples // 2
        w = np.vstack([rng.dirichlet(np.full(len(v), 1.0), size=samples - half),
                       rng.dirichlet(np.full(len(v), 0.05), size=half)])
        w = np.maximum(w, 1e-12)
        return (w / w.sum(axis=1, keepdims=True)) @ v

    # LP optimizers pushed slightly into the relative interior show that the
    # bounds are approached, not merely respected.
    res = _norm_lp(B, x)
    c = B.subspace @ res.x
    b_opt = c / (c @ B.base_functional) if c @ B.base_functional > TOL else B.interior_point
    b_opt = (1 - 1e-7) * b_opt + 1e-7 * B.interior_point
    bt_opt = _dual_norm_solution(Bd, x)[2]
    bt_opt = (1 - 1e-7) * bt_opt + 1e-7 * Bd.interior_point

    inf_side = min(order_unit_norm(B.cone, b, x) for b in [b_opt, *mixtures(vb)])
    sup_side = max(base_section_norm(BaseSection.full(B.cone, bt, _base_point(B.cone, bt)), x)
                   for bt in [bt_opt, *mixtures(vd)[: max(1, samples // 10)]])
    out = {"norm": norm, "inf_order_unit": inf_side, "sup_base": sup_side,
           "inf_ok": inf_side >= norm - 1e-8, "sup_ok": sup_side <= norm + 1e-8,
           "inf_gap": inf_side - norm, "sup_gap": norm - sup_side}
    if B.cone.contains(x):
        vmax = float(np.max(vd @ x))
        out["positive_identity"] = vmax
        out["positive_gap"] = abs(vmax - norm)
    return out


def _base_point(Q: PolyCone, bt):
    g = Q.generators / (Q.generators @ bt)[:, None]
    return g.mean(axis=0)


def lemma_characterization_check(B: BaseSection, *, trials: int = 100, seed: int = 0) -> dict:
    """For ``b1, b2 ∈ B`` and ``t, s ≥ 0`` with ``t b1 − s b2 ∈ S``, check ``∈ B``."""
    rng = np.random.default_rng(seed)
    v = B.vertices()
    failures = 0
    tested = 0
    for _ in range(trials):
        b1, b2 = rng.dirichlet(np.ones(len(v))) @ v, rng.dirichlet(np.ones(len(v))) @ v
        # ⟨t b1 − s b2, b̃⟩ = t − s = 1 is required for S; pick s then t = 1 + s.
        s = rng.uniform(0, 0.5)
        y = (1 + s) * b1 - s * b2
        if not B.cone.contains(y, 1e-10):
            continue
        tested += 1
        if not B.contains(y, 1e-8):
            failures += 1
    return {"tested": tested, "failures": failures}


# ----------------------------------------------------------------------------
# Random instances and the classical bridge
# ----------------------------------------------------------------------------


def random_section(rng, dim: int, n_gen: int | None = None, sub_dim: int | None = None) -> BaseSection:
    """Random polyhedral cone over the slice ``x_0 = 1`` with a random base section."""
    from .corpus import random_polytope_cone
    rng = np.random.default_rng(rng) if not isinstance(rng, np.random.Generator) else rng
    n_gen = n_gen or dim + 3
    Q = PolyCone.from_generators(random_polytope_cone(rng, dim, n_gen))
    bt = np.eye(dim)[0]
    p = _base_point(Q, bt)
    k = sub_dim if sub_dim is not None else int(rng.integers(1, dim + 1))
    sub = np.column_stack([p] + [rng.normal(size=dim) for _ in range(k - 1)])
    return BaseSection(Q, bt, sub, p)


def stochastic_section(n: int, m: int) -> BaseSection:
    """Channels ``D_n → D_m`` as a base section of the orthant ``R^{m×n}_+``.

    Vectors are row-major ``m × n`` matrices; the base is the set of
    column-stochastic matrices, cut out by the functional ``Σ x_ij / n`` and
    the subspace of matrices with equal column sums.
    """
    Q = PolyCone.orthant(m * n)
    bt = np.full(m * n, 1.0 / n)
    cons = np.zeros((n - 1, m * n))
    for j in range(n - 1):
        col = np.zeros((m, n))
        col[:, j], col[:, j + 1] = 1, -1
        cons[j] = col.ravel()
    sub = scipy.linalg.null_space(cons) if n > 1 else np.eye(m * n)
    return BaseSection(Q, bt, sub, np.full(m * n, 1.0 / m))


def classical_map(X) -> "HermitianMap":
    """The Hermitian map ``D_n → D_m`` with matrix ``X`` (``e_j ↦ Σ_i X_ij e_i``)."""
    from .hmap import HermitianMap
    from .matops import BlockAlgebra
    X = np.asarray(X, float)
    m, n = X.shape
    c = np.zeros((m * n, m * n))
    for i in range(m):
        for j in range(n):
            c[i * n + j, i * n + j] = X[i, j]
    return HermitianMap(c, BlockAlgebra.diagonal(n), BlockAlgebra.diagonal(m))


def bridge_check(X, family="cp") -> dict:
    """Base-section norms of a classical map against the SDP diamond norms.

    ``‖X‖_B`` for the stochastic base section must equal ``‖X‖_◇`` and
    ``‖Xᵀ‖_{B̃}`` must equal ``‖·‖^◇`` of the transposed map ``D_m → D_n``
    (the duality pairing of maps is ``Σ X_ij Y_ji``).
    """
    from .norms import diamond_norm, dual_diamond_norm
    X = np.asarray(X, float)
    m, n = X.shape
    B = stochastic_section(n, m)
    ovs_diamond = base_section_norm(B, X.ravel())
    sdp_diamond = diamond_norm(family, classical_map(X)).value
    Y = X.T  # a map D_m → D_n, paired with maps D_n → D_m
    ovs_dual = base_section_norm(dual_section(B), Y.T.ravel())
    sdp_dual = dual_diamond_norm(family, classical_map(Y)).value
    return {"ovs_diamond": ovs_diamond, "sdp_diamond": sdp_diamond,
            "column_l1": float(np.max(np.abs(X).sum(axis=0))),
            "ovs_dual": ovs_dual, "sdp_dual": sdp_dual,
            "gap": max(abs(ovs_diamond - sdp_diamond), abs(ovs_dual - sdp_dual))}
