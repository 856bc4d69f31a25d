"""Small dense conic solvers and nonconvex search engines.

The semidefinite programs used throughout the package are written with a tiny
modeling layer: :class:`Model` hands out real decision variables wrapped in
:class:`Affine` expressions (complex matrices depending affinely on those
variables).  A model lowers to an :class:`SdpProblem` in linear-matrix-
inequality form,

    minimize    c·x
    subject to  F0_k + Σ_j x_j F_kj ⪰ 0     (complex Hermitian blocks)
                a0 + A x ≥ 0
                E x = f,

which :func:`solve_sdp` hands to CVXOPT's primal-dual interior point method
(Nesterov-Todd scaling) after eliminating the equality constraints and
embedding complex blocks as real symmetric ones.  Linear programs go to HiGHS
through :func:`scipy.optimize.linprog`.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
import scipy.optimize
from cvxopt import matrix as cvx_matrix
from cvxopt import solvers as cvx_solvers

OPTIMAL = "OPTIMAL"
INFEASIBLE = "INFEASIBLE"
UNBOUNDED = "UNBOUNDED"
MAXITER = "MAXITER"

#: Relative duality-gap contract for an OPTIMAL status.
GAP_TOL = 1e-7


def thread_count() -> int:
    """Parallelism cap read from ``CHANDEF_THREADS`` (default 1)."""
    try:
        return max(1, int(os.environ.get("CHANDEF_THREADS", "1")))
    except ValueError:
        return 1


# ----------------------------------------------------------------------------
# Affine expressions
# ----------------------------------------------------------------------------


class Affine:
    """Complex array depending affinely on real variable blocks.

    ``terms`` maps a variable-block id to an array of shape ``(nb, *shape)``
    whose ``j``-th slice is the coefficient of the block's ``j``-th scalar.
    Linear maps passed to :meth:`apply` must accept leading batch axes.
    """

    __slots__ = ("const", "terms")
    # Make numpy defer to the reflected operators (ndarray @ Affine etc.).
    __array_ufunc__ = None

    def __init__(self, const, terms=None):
        self.const = np.asarray(const, dtype=complex)
        self.terms = dict(terms or {})

    @property
    def shape(self):
        return self.const.shape

    @staticmethod
    def lift(x) -> "Affine":
        return x if isinstance(x, Affine) else Affine(x)

    def apply(self, fn: Callable[[np.ndarray], np.ndarray]) -> "Affine":
        return Affine(fn(self.const), {k: fn(v) for k, v in self.terms.items()})

    def __add__(self, other):
        other = Affine.lift(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return Affine(self.const + other.const, terms)

    __radd__ = __add__

    def __neg__(self):
        return self.apply(lambda a: -a)

    def __sub__(self, other):
        return self + (-Affine.lift(other))

    def __rsub__(self, other):
        return Affine.lift(other) - self

    def __mul__(self, s):
        if isinstance(s, Affine):
            raise TypeError("products of affine expressions are not affine")
        return self.apply(lambda a: a * s)

    __rmul__ = __mul__

    def __truediv__(self, s):
        return self.apply(lambda a: a / s)

    def __matmul__(self, m):
        m = np.asarray(m)
        return self.apply(lambda a: a @ m)

    def __rmatmul__(self, m):
        m = np.asarray(m)
        return self.apply(lambda a: m @ a)

    def trace(self) -> "Affine":
        return self.apply(lambda a: np.trace(a, axis1=-2, axis2=-1))

    def __getitem__(self, idx):
        if not isinstance(idx, tuple):
            idx = (idx,)
        return self.apply(lambda a: a[(Ellipsis,) + idx])


def kron_affine(a, b) -> Affine:
    """Kronecker product where exactly one factor may be an :class:`Affine`."""
    def _k(x, y):
        x, y = np.asarray(x), np.asarray(y)
        bs = np.broadcast_shapes(x.shape[:-2], y.shape[:-2])
        out = np.einsum("...ij,...kl->...ikjl", x, y)
        return out.reshape(bs + (x.shape[-2] * y.shape[-2], x.shape[-1] * y.shape[-1]))

    if isinstance(a, Affine) and isinstance(b, Affine):
        raise TypeError("kron of two affine expressions is not affine")
    if isinstance(a, Affine):
        return a.apply(lambda x: _k(x, b))
    if isinstance(b, Affine):
        return b.apply(lambda y: _k(a, y))
    return Affine(_k(a, b))


# ----------------------------------------------------------------------------
# Problem data and results
# ----------------------------------------------------------------------------


@dataclass
class SdpProblem:
    """Linear-matrix-inequality problem over real variables ``x``.

    Attributes
    ----------
    n : int
        Number of real variables.
    c, c0 : objective ``c·x + c0`` (minimized).
    lmis : list of (F0, F)
        ``F0`` is an ``(m, m)`` Hermitian matrix and ``F`` an ``(n, m, m)``
        stack; the constraint is ``F0 + Σ_j x_j F[j] ⪰ 0``.
    lin_const, lin_coef : ``lin_const + lin_coef @ x ≥ 0``.
    eq_coef, eq_rhs : ``eq_coef @ x = eq_rhs``.
    """

    n: int
    c: np.ndarray
    c0: float = 0.0
    lmis: list = field(default_factory=list)
    lin_const: np.ndarray | None = None
    lin_coef: np.ndarray | None = None
    eq_coef: np.ndarray | None = None
    eq_rhs: np.ndarray | None = None

    def validate(self):
        if self.c.shape != (self.n,):
            raise ValueError("objective length does not match variable count")
        for f0, f in self.lmis:
            m = f0.shape[0]
            if f0.shape != (m, m) or f.shape != (self.n, m, m):
                raise ValueError("inconsistent LMI block dimensions")
            if np.max(np.abs(f0 - f0.conj().T), initial=0) > 1e-9 * (1 + np.max(np.abs(f0))):
                raise ValueError("LMI constant block is not Hermitian")
            if f.size and np.max(np.abs(f - f.conj().swapaxes(1, 2))) > 1e-9 * (1 + np.max(np.abs(f))):
                raise ValueError("LMI coefficient block is not Hermitian")


@dataclass
class SolveResult:
    """Outcome of a conic solve.

    ``x`` is the primal iterate, ``dual_lmis`` the PSD dual matrices (one per
    LMI, complex Hermitian), ``dual_lin`` the multipliers of the linear
    inequalities.  For INFEASIBLE results the duals hold a certificate ray.
    """

    status: str
    primal: float
    dual: float
    x: np.ndarray
    dual_lmis: list = field(default_factory=list)
    dual_lin: np.ndarray | None = None
    iterations: int = 0
    info: dict = field(default_factory=dict)

    @property
    def gap(self) -> float:
        return abs(self.primal - self.dual)

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


def _real_embed(f: np.ndarray) -> np.ndarray:
    """Real symmetric embedding ``[[Re, -Im], [Im, Re]]`` (batched)."""
    re, im = f.real, f.imag
    top = np.concatenate([re, -im], axis=-1)
    bot = np.concatenate([im, re], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def _complex_from_real(z: np.ndarray) -> np.ndarray:
    m = z.shape[0] // 2
    z11, z12, z21, z22 = z[:m, :m], z[:m, m:], z[m:, :m], z[m:, m:]
    out = (z11 + z22) + 1j * (z21 - z12)
    return (out + out.conj().T) / 2


def _eliminate_equalities(p: SdpProblem):
    """Return ``(x0, N)`` with ``{x : E x = f} = {x0 + N z}``, or None."""
    if p.eq_coef is None or p.eq_coef.shape[0] == 0:
        return np.zeros(p.n), np.eye(p.n)
    a, b = p.eq_coef, p.eq_rhs
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    tol = max(a.shape) * np.finfo(float).eps * (s[0] if s.size else 0.0) * 100
    r = int(np.sum(s > tol))
    x0 = vt[:r].T @ ((u[:, :r].T @ b) / s[:r])
    if np.linalg.norm(a @ x0 - b) > 1e-8 * (1 + np.linalg.norm(b)):
        return None
    return x0, vt[r:].T


def solve_sdp(p: SdpProblem, *, tol: float = 1e-9, maxiters: int = 200) -> SolveResult:
    """Solve an :class:`SdpProblem` with CVXOPT's interior point method.

    Equalities are eliminated by a null-space parametrization, complex blocks
    are embedded as real symmetric blocks of twice the size, and directions
    that no constraint sees are projected out (an objective along such a
    direction makes the problem unbounded).
    """
    p.validate()
    red = _eliminate_equalities(p)
    if red is None:
        return SolveResult(INFEASIBLE, np.inf, np.inf, np.full(p.n, np.nan),
                           info={"reason": "inconsistent equality constraints"})
    x0, nsp = red
    const = float(p.c @ x0 + p.c0)
    cz = nsp.T @ p.c

    hs, gs = [], []
    for f0, f in p.lmis:
        f0r = _real_embed(f0 + np.tensordot(x0, f, axes=(0, 0)))
        fr = _real_embed(np.tensordot(nsp.T, f, axes=(1, 0)))
        hs.append(f0r)
        gs.append(-fr.reshape(fr.shape[0], -1).T)
    if p.lin_coef is not None and p.lin_coef.shape[0]:
        hl = p.lin_const + p.lin_coef @ x0
        gl = -(p.lin_coef @ nsp)
    else:
        hl, gl = np.zeros(0), np.zeros((0, nsp.shape[1]))

    # Directions invisible to every constraint.
    stacked = np.vstack([g for g in gs] + [gl]) if (gs or gl.size) else np.zeros((0, nsp.shape[1]))
    keep = np.eye(nsp.shape[1])
    if nsp.shape[1]:
        _, s, vt = np.linalg.svd(stacked, full_matrices=True)
        tol_r = max(stacked.shape) * np.finfo(float).eps * (s[0] if s.size else 1.0) * 100
        r = int(np.sum(s > tol_r))
        if r < nsp.shape[1]:
            free = vt[r:].T
            if np.linalg.norm(free.T @ cz) > 1e-10 * (1 + np.linalg.norm(cz)):
                return SolveResult(UNBOUNDED, -np.inf, -np.inf, np.full(p.n, np.nan),
                                   info={"reason": "objective along unconstrained direction"})
            keep = vt[:r].T
    cw = keep.T @ cz
    gs = [g @ keep for g in gs]
    gl = gl @ keep

    if keep.shape[1] == 0:
        # Nothing to optimize: check feasibility of the constant point.
        feas = all(np.linalg.eigvalsh(h)[0] >= -1e-9 for h in hs) and np.all(hl >= -1e-9)
        status = OPTIMAL if feas else INFEASIBLE
        return SolveResult(status, const, const, x0.copy())

    kwargs = dict(Gs=[cvx_matrix(g) for g in gs], hs=[cvx_matrix(h) for h in hs])
    if gl.shape[0]:
        kwargs.update(Gl=cvx_matrix(gl), hl=cvx_matrix(hl))
    opts = {"show_progress": False, "maxiters": maxiters, "abstol": tol,
            "reltol": tol, "feastol": tol}
    sol = None
    for kkt in ("chol2", "ldl", "qr"):
        try:
            sol = cvx_solvers.sdp(cvx_matrix(cw), kktsolver=kkt, options=opts, **kwargs)
            break
        except (ArithmeticError, ValueError):
            continue
    if sol is None:
        return SolveResult(MAXITER, np.nan, np.nan, np.full(p.n, np.nan),
                           info={"reason": "KKT factorization failed"})

    status = sol["status"]
    zs = [_complex_from_real(np.array(z)) for z in (sol.get("zs") or [])]
    zl = np.array(sol["zl"]).ravel() if sol.get("zl") is not None else None
    if status == "primal infeasible":
        return SolveResult(INFEASIBLE, np.inf, np.inf, np.full(p.n, np.nan), zs, zl,
                           sol["iterations"], {"cvxopt_status": status})
    if status == "dual infeasible":
        return SolveResult(UNBOUNDED, -np.inf, -np.inf, np.full(p.n, np.nan), zs, zl,
                           sol["iterations"], {"cvxopt_status": status})
    if sol["x"] is None:
        return SolveResult(MAXITER, np.nan, np.nan, np.full(p.n, np.nan),
                           info={"cvxopt_status": status})
    w = np.array(sol["x"]).ravel()
    x = x0 + nsp @ (keep @ w)
    primal = float(sol["primal objective"]) + const
    dual = float(sol["dual objective"]) + const
    info = {"cvxopt_status": status,
            "primal_infeasibility": sol.get("primal infeasibility"),
            "dual_infeasibility": sol.get("dual infeasibility")}
    if status != "optimal":
        pin = sol.get("primal infeasibility") or np.inf
        din = sol.get("dual infeasibility") or np.inf
        close = abs(primal - dual) <= GAP_TOL * (1 + abs(primal)) and max(pin, din) <= 1e-7
        status = OPTIMAL if close else MAXITER
    else:
        status = OPTIMAL
    return SolveResult(status, primal, dual, x, zs, zl, sol["iterations"], info)


def solve_lp(c, A_ub=None, b_ub=None, A_eq=None, b_eq=None, bounds=(None, None)) -> SolveResult:
    """Linear program ``min c·x`` via HiGHS, reporting primal and dual values.

    Argument conventions follow :func:`scipy.optimize.linprog`; the default
    bounds leave every variable free.
    """
    c = np.asarray(c, float)
    res = scipy.optimize.linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq,
                                 bounds=bounds, method="highs")
    if res.status == 2:
        return SolveResult(INFEASIBLE, np.inf, np.inf, np.full(c.size, np.nan),
                           info={"message": res.message})
    if res.status == 3:
        return SolveResult(UNBOUNDED, -np.inf, -np.inf, np.full(c.size, np.nan),
                           info={"message": res.message})
    if res.status != 0:
        return SolveResult(MAXITER, np.nan, np.nan, np.full(c.size, np.nan),
                           info={"message": res.message})
    dual = 0.0
    if A_ub is not None and len(b_ub):
        dual += float(np.dot(b_ub, res.ineqlin.marginals))
    if A_eq is not None and len(b_eq):
        dual += float(np.dot(b_eq, res.eqlin.marginals))
    lo, hi = _expand_bounds(bounds, c.size)
    for vals, marg in ((lo, res.lower.marginals), (hi, res.upper.marginals)):
        finite = np.isfinite(vals)
        dual += float(np.dot(vals[finite], marg[finite]))
    duals = res.ineqlin.marginals if A_ub is not None else None
    return SolveResult(OPTIMAL, float(res.fun), dual, res.x, dual_lin=duals,
                       iterations=int(res.nit), info={"eq_marginals": getattr(res.eqlin, "marginals", None)})


def _expand_bounds(bounds, n):
    if isinstance(bounds, tuple) and len(bounds) == 2 and not isinstance(bounds[0], (tuple, list)):
        bounds = [bounds] * n
    lo = np.array([-np.inf if b[0] is None else b[0] for b in bounds], float)
    hi = np.array([np.inf if b[1] is None else b[1] for b in bounds], float)
    return lo, hi


# ----------------------------------------------------------------------------
# Modeling layer
# ----------------------------------------------------------------------------


class Model:
    """Builder for :class:`SdpProblem` instances.

    Example
    -------
    >>> m = Model()
    >>> t = m.real()
    >>> m.psd(t * np.eye(2) - np.diag([3.0, 1.0]))
    >>> m.minimize(t)
    >>> round(m.solve().value(t).real, 6)
    3.0
    """

    def __init__(self):
        self._blocks: list[int] = []
        self._lmis: list[Affine] = []
        self._lins: list[Affine] = []
        self._eqs: list[Affine] = []
        self._objective: Affine | None = None
        self._sense = 1.0

    # variables ---------------------------------------------------------

    def _new_block(self, coef: np.ndarray) -> Affine:
        k = len(self._blocks)
        self._blocks.append(coef.shape[0])
        return Affine(np.zeros(coef.shape[1:], complex), {k: coef.astype(complex)})

    def real(self, shape=()) -> Affine:
        """Unconstrained real array of the given shape."""
        shape = tuple(np.atleast_1d(shape)) if shape != () else ()
        size = int(np.prod(shape)) if shape else 1
        coef = np.eye(size).reshape((size,) + shape)
        return self._new_block(coef)

    def hermitian(self, n: int, mask: np.ndarray | None = None) -> Affine:
        """Hermitian ``n×n`` matrix, optionally restricted to a sparsity mask."""
        mask = np.ones((n, n), bool) if mask is None else np.asarray(mask, bool)
        basis = []
        for i in range(n):
            if mask[i, i]:
                e = np.zeros((n, n), complex)
                e[i, i] = 1
                basis.append(e)
        for i in range(n):
            for j in range(i + 1, n):
                if mask[i, j]:
                    e = np.zeros((n, n), complex)
                    e[i, j] = e[j, i] = 1
                    basis.append(e)
                    e = np.zeros((n, n), complex)
                    e[i, j], e[j, i] = -1j, 1j
                    basis.append(e)
        return self._new_block(np.array(basis).reshape(-1, n, n))

    # constraints -------------------------------------------------------

    def psd(self, expr) -> int:
        """Add ``expr ⪰ 0``; returns the constraint index for dual lookup."""
        expr = Affine.lift(expr)
        if expr.const.ndim == 0:
            self._lins.append(expr.apply(lambda a: a[..., None]))
            return -len(self._lins)
        if len(expr.shape) != 2 or expr.shape[0] != expr.shape[1]:
            raise ValueError("PSD constraints need square matrices")
        self._lmis.append(expr)
        return len(self._lmis) - 1

    def nonneg(self, expr) -> None:
        """Add entrywise ``expr ≥ 0`` (real part)."""
        expr = Affine.lift(expr)
        self._lins.append(expr.apply(lambda a: a.reshape(a.shape[:len(a.shape) - len(expr.shape)] + (-1,))))

    def equal(self, lhs, rhs=0.0) -> None:
        """Add the (complex, entrywise) equality ``lhs = rhs``."""
        self._eqs.append(Affine.lift(lhs) - rhs)

    def minimize(self, expr) -> None:
        self._objective, self._sense = Affine.lift(expr), 1.0

    def maximize(self, expr) -> None:
        self._objective, self._sense = Affine.lift(expr), -1.0

    # lowering ----------------------------------------------------------

    @property
    def n(self) -> int:
        return int(sum(self._blocks))

    def _offsets(self):
        return np.concatenate([[0], np.cumsum(self._blocks)]).astype(int)

    def _dense(self, expr: Affine) -> tuple[np.ndarray, np.ndarray]:
        off = self._offsets()
        coef = np.zeros((self.n,) + expr.shape, complex)
        for k, v in expr.terms.items():
            coef[off[k]:off[k + 1]] += v
        return expr.const, coef

    def problem(self) -> SdpProblem:
        n = self.n
        if self._objective is None:
            c, c0 = np.zeros(n), 0.0
        else:
            k0, kc = self._dense(self._objective)
            c, c0 = self._sense * kc.real.reshape(n), float(self._sense * k0.real)
        lmis = [self._dense(e) for e in self._lmis]
        lin_c, lin_a = [], []
        for e in self._lins:
            k0, kc = self._dense(e)
            lin_c.append(k0.real.ravel())
            lin_a.append(kc.real.reshape(n, -1).T)
        eq_a, eq_b = [], []
        for e in self._eqs:
            k0, kc = self._dense(e)
            kc = kc.reshape(n, -1).T
            k0 = k0.ravel()
            for part in (np.real, np.imag):
                a = part(kc)
                rows = np.any(np.abs(a) > 0, axis=1) | (np.abs(part(k0)) > 0)
                eq_a.append(a[rows])
                eq_b.append(-part(k0)[rows])
        return SdpProblem(
            n=n, c=c, c0=c0, lmis=lmis,
            lin_const=np.concatenate(lin_c) if lin_c else None,
            lin_coef=np.vstack(lin_a) if lin_a else None,
            eq_coef=np.vstack(eq_a) if eq_a else None,
            eq_rhs=np.concatenate(eq_b) if eq_b else None,
        )

    def solve(self, **kwargs) -> "Solution":
        res = solve_sdp(self.problem(), **kwargs)
        if self._sense < 0:
            res.primal, res.dual = -res.primal, -res.dual
        return Solution(self, res)


class Solution:
    """Solve result bound to its model, for evaluating expressions."""

    def __init__(self, model: Model, result: SolveResult):
        self.model = model
        self.result = result
        off = model._offsets()
        self._x = {k: result.x[off[k]:off[k + 1]] for k in range(len(model._blocks))}

    @property
    def status(self) -> str:
        return self.result.status

    @property
    def ok(self) -> bool:
        return self.result.ok

    @property
    def value_opt(self) -> float:
        return self.result.primal

    def value(self, expr) -> np.ndarray:
        expr = Affine.lift(expr)
        out = expr.const.copy()
        for k, v in expr.terms.items():
            out = out + np.tensordot(self._x[k], v, axes=(0, 0))
        return out

    def hvalue(self, expr) -> np.ndarray:
        v = self.value(expr)
        return (v + v.conj().T) / 2

    def dual(self, idx: int) -> np.ndarray:
        return self.result.dual_lmis[idx]


# ----------------------------------------------------------------------------
# Nonconvex search engines
# ----------------------------------------------------------------------------


def _spawn(seed, n):
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(n)]


def _run_parallel(fn, items):
    threads = thread_count()
    if threads > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=threads) as ex:
            return list(ex.map(fn, items))
    return [fn(it) for it in items]


@dataclass
class SearchResult:
    """Best value found by a multistart search and its certificate."""

    value: float
    argmax: object
    values: list = field(default_factory=list)
    heuristic: bool = True


def random_unit_vector(rng: np.random.Generator, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def ascend_sphere(objective, x, *, maxiter=500, gtol=1e-10):
    """Projected-gradient ascent with backtracking on the complex unit sphere.

    ``objective(x)`` returns ``(value, grad)`` where ``grad`` points in the
    direction of steepest ascent in the real inner product ``Re⟨u, v⟩``.
    """
    x = x / np.linalg.norm(x)
    f, g = objective(x)
    step = 1.0
    for _ in range(maxiter):
        gt = g - np.real(np.vdot(x, g)) * x
        gn = np.linalg.norm(gt)
        if gn <= gtol:
            break
        improved = False
        t = step * 2
        while t > 1e-14:
            y = x + t * gt
            y /= np.linalg.norm(y)
            fy, gy = objective(y)
            if fy >= f + 1e-4 * t * gn * gn * 0.5 or (fy > f and t < 1e-8):
                improved = True
                break
            t /= 4
        if not improved:
            break
        if fy - f <= 1e-15 * (1 + abs(f)):
            x, f, g = y, fy, gy
            break
        x, f, g, step = y, fy, gy, t
    return f, x


def pure_state_search(objective, dim: int, seed=0, starts: int = 100, init=(),
                      maxiter: int = 500, gtol: float = 1e-10) -> SearchResult:
    """Maximize a function of unit vectors by multistart gradient ascent.

    Parameters
    ----------
    objective : callable
        ``objective(x) -> (value, grad)`` for a unit vector ``x ∈ C^dim``.
    init : sequence of arrays
        Deterministic starting points tried before the random ones.

    Returns
    -------
    SearchResult
        ``value`` is attained at ``argmax`` and is therefore a lower bound on
        the supremum.
    """
    rngs = _spawn(seed, starts)
    points = [np.asarray(v, complex) for v in init] + [random_unit_vector(r, dim) for r in rngs]

    def run(x):
        return ascend_sphere(objective, x, maxiter=maxiter, gtol=gtol)

    results = _run_parallel(run, points)
    vals = [r[0] for r in results]
    best = int(np.argmax(vals))
    return SearchResult(float(vals[best]), results[best][1], vals)


def seesaw(objective, best_a, best_b, b0, *, rounds: int = 1000, tol: float = 1e-13):
    """Alternating maximization of ``objective(a, b)``.

    Each round sets ``a = best_a(b)`` then ``b = best_b(a)``; with exact
    partial maximizers the value never decreases.

    Returns
    -------
    (value, (a, b), history)
    """
    b = b0
    a = best_a(b)
    b = best_b(a)
    value = objective(a, b)
    history = [value]
    for _ in range(rounds - 1):
        a_new = best_a(b)
        b_new = best_b(a_new)
        v = objective(a_new, b_new)
        if v < value:
            break
        a, b = a_new, b_new
        gain = v - value
        value = v
        history.append(v)
        if gain <= tol * (1 + abs(v)):
            break
    return value, (a, b), history


def multistart_seesaw(objective, best_a, best_b, init_b, *, seed=0, starts: int = 20,
                      rounds: int = 1000, tol: float = 1e-13) -> SearchResult:
    """Run :func:`seesaw` from ``starts`` random initial points ``init_b(rng)``."""
    rngs = _spawn(seed, starts)

    def run(rng):
        return seesaw(objective, best_a, best_b, init_b(rng), rounds=rounds, tol=tol)

    results = _run_parallel(run, rngs)
    vals = [r[0] for r in results]
    best = int(np.argmax(vals))
    return SearchResult(float(vals[best]), results[best][1], vals)
