"""Hermitian maps between block algebras, stored through their Choi matrix.

Conventions
-----------
For ``φ: B(H) → B(K)`` the Choi matrix is ``C(φ) = Σ_ij φ(|i⟩⟨j|) ⊗ |i⟩⟨j|``
on ``K ⊗ H`` (output first) built from the unnormalized ``X_H = Σ_ij
|i⟩⟨j| ⊗ |i⟩⟨j|``.  As a four-index tensor ``C[k, i, l, j] = φ(|i⟩⟨j|)[k, l]``,
so ``φ(a) = Tr_H C (I ⊗ aᵀ)``.

A map between subalgebras ``A ⊆ B(H)`` and ``B ⊆ B(K)`` is stored as the
ambient map ``E_B ∘ φ ∘ E_A``; its Choi matrix vanishes off the induced block
pattern.

The array-level helpers (``choi_compose``, ``choi_adjoint`` ...) accept
leading batch axes so that they can be applied to the coefficient stacks of
:class:`chandef.conic.Affine` expressions.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .matops import (
    BlockAlgebra,
    DimensionError,
    State,
    as_algebra,
    as_matrices,
    herm,
    op_norm,
    partial_trace,
)

#: Trace-preservation defect accepted for channels.
TOL_TP = 1e-9


# ----------------------------------------------------------------------------
# Array-level Choi calculus
# ----------------------------------------------------------------------------


def _t4(c: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    dout, din = dims
    return c.reshape(c.shape[:-2] + (dout, din, dout, din))


def _m2(t: np.ndarray) -> np.ndarray:
    s = t.shape
    return t.reshape(s[:-4] + (s[-4] * s[-3], s[-2] * s[-1]))


def choi_apply(c: np.ndarray, dims: tuple[int, int], a: np.ndarray) -> np.ndarray:
    """``φ(a)`` from the Choi matrix ``c`` of a map with ``dims = (d_out, d_in)``."""
    return np.einsum("...kilj,ij->...kl", _t4(c, dims), a)


def choi_compose(c2, dims2, c1, dims1) -> np.ndarray:
    """Choi matrix of ``φ2 ∘ φ1``; batch axes allowed on either argument."""
    if dims2[1] != dims1[0]:
        raise DimensionError(f"cannot compose: {dims1} then {dims2}")
    t = np.einsum("...akbl,...kilj->...aibj", _t4(np.asarray(c2), dims2), _t4(np.asarray(c1), dims1))
    return _m2(t)


def choi_adjoint(c, dims) -> np.ndarray:
    """Choi matrix of the Hilbert-Schmidt adjoint ``φ*``."""
    return _m2(np.einsum("...kjli->...iljk", _t4(np.asarray(c), dims)))


def choi_tensor(c1, dims1, c2, dims2) -> np.ndarray:
    """Choi matrix of ``φ1 ⊗ φ2`` on ``(K1⊗K2) ⊗ (H1⊗H2)``."""
    t = np.einsum("...aibj,...ckdl->...acikbdjl", _t4(np.asarray(c1), dims1), _t4(np.asarray(c2), dims2))
    s = t.shape
    n = s[-8] * s[-7] * s[-6] * s[-5]
    return t.reshape(s[:-8] + (n, n))


def choi_tensor_id(c, dims, d_anc: int) -> np.ndarray:
    """Choi matrix of ``φ ⊗ id_{d_anc}``."""
    return choi_tensor(c, dims, identity_choi(d_anc), (d_anc, d_anc))


def identity_choi(d: int) -> np.ndarray:
    v = np.eye(d).reshape(d * d)
    return np.outer(v, v).astype(complex)


def out_trace(c, dims) -> np.ndarray:
    """``Tr_K C(φ)``, the transpose of ``φ*(I)``; equals ``I`` for channels."""
    return partial_trace(c, dims, side=0)


# ----------------------------------------------------------------------------
# HermitianMap
# ----------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class HermitianMap:
    """A Hermitian-preserving linear map ``A → B`` given by its Choi matrix.

    Construction symmetrizes the Choi matrix and zeroes entries outside the
    pattern of ``E_B ∘ φ ∘ E_A``.
    """

    choi: np.ndarray
    in_alg: BlockAlgebra
    out_alg: BlockAlgebra

    def __post_init__(self):
        in_alg, out_alg = as_algebra(self.in_alg), as_algebra(self.out_alg)
        c = np.array(self.choi, dtype=complex)
        n = in_alg.ambient_dim * out_alg.ambient_dim
        if c.shape != (n, n):
            raise DimensionError(
                f"Choi matrix of shape {c.shape} does not match {out_alg.ambient_dim}x{in_alg.ambient_dim}")
        c = herm(c)
        c[~choi_mask(in_alg, out_alg)] = 0
        c.setflags(write=False)
        object.__setattr__(self, "choi", c)
        object.__setattr__(self, "in_alg", in_alg)
        object.__setattr__(self, "out_alg", out_alg)

    @property
    def d_in(self) -> int:
        return self.in_alg.ambient_dim

    @property
    def d_out(self) -> int:
        return self.out_alg.ambient_dim

    @property
    def dims(self) -> tuple[int, int]:
        """``(d_out, d_in)``, the factor dimensions of the Choi matrix."""
        return self.d_out, self.d_in

    def __call__(self, a) -> np.ndarray:
        return apply(self, a)

    def _same(self, other: "HermitianMap"):
        if self.in_alg != other.in_alg or self.out_alg != other.out_alg:
            raise DimensionError("maps act between different algebras")

    def __add__(self, other: "HermitianMap") -> "HermitianMap":
        self._same(other)
        return HermitianMap(self.choi + other.choi, self.in_alg, self.out_alg)

    def __sub__(self, other: "HermitianMap") -> "HermitianMap":
        self._same(other)
        return HermitianMap(self.choi - other.choi, self.in_alg, self.out_alg)

    def __neg__(self) -> "HermitianMap":
        return HermitianMap(-self.choi, self.in_alg, self.out_alg)

    def __mul__(self, s: float) -> "HermitianMap":
        return HermitianMap(float(s) * self.choi, self.in_alg, self.out_alg)

    __rmul__ = __mul__

    def __matmul__(self, other: "HermitianMap") -> "HermitianMap":
        return compose(self, other)

    def allclose(self, other: "HermitianMap", atol: float = 1e-10) -> bool:
        return (self.dims == other.dims) and bool(np.allclose(self.choi, other.choi, atol=atol, rtol=0))

    def __repr__(self):
        return f"HermitianMap({self.in_alg!r} -> {self.out_alg!r})"


def choi_mask(in_alg: BlockAlgebra, out_alg: BlockAlgebra) -> np.ndarray:
    """Boolean pattern of Choi matrices of maps ``in_alg → out_alg``."""
    mo, mi = out_alg.mask, in_alg.mask
    m = mo[:, None, :, None] & mi[None, :, None, :]
    n = out_alg.ambient_dim * in_alg.ambient_dim
    return m.reshape(n, n)


def from_choi(choi, in_alg, out_alg=None) -> HermitianMap:
    """Build a map from its Choi matrix; algebras may be given as ints."""
    in_alg = as_algebra(in_alg)
    if out_alg is None:
        out_alg = BlockAlgebra.full(np.asarray(choi).shape[0] // in_alg.ambient_dim)
    return HermitianMap(choi, in_alg, as_algebra(out_alg))


def from_function(fn: Callable[[np.ndarray], np.ndarray], in_alg, out_alg) -> HermitianMap:
    """Choi matrix of a linear function by evaluation on matrix units."""
    in_alg, out_alg = as_algebra(in_alg), as_algebra(out_alg)
    d = in_alg.ambient_dim
    blocks = np.zeros((out_alg.ambient_dim, d, out_alg.ambient_dim, d), complex)
    for i in range(d):
        for j in range(d):
            e = np.zeros((d, d), complex)
            e[i, j] = 1
            blocks[:, i, :, j] = fn(e)
    return HermitianMap(_m2(blocks), in_alg, out_alg)


def from_kraus(kraus: Sequence[np.ndarray], in_alg=None, out_alg=None) -> HermitianMap:
    """Map ``a ↦ Σ_k K_k a K_k†`` (internal constructor for test data)."""
    kraus = [np.asarray(k, complex) for k in kraus]
    d_out, d_in = kraus[0].shape
    vecs = [k.reshape(d_out * d_in) for k in kraus]  # row-major vec = Σ K|i⟩⊗|i⟩ ordering
    c = sum(np.outer(v, v.conj()) for v in vecs)
    return HermitianMap(c, in_alg or d_in, out_alg or d_out)


def identity_map(alg) -> HermitianMap:
    alg = as_algebra(alg)
    return HermitianMap(identity_choi(alg.ambient_dim), alg, alg)


def replacer(sigma, in_alg) -> HermitianMap:
    """``Φ_{I,σ}: a ↦ (Tr a) σ``."""
    in_alg = as_algebra(in_alg)
    sigma = np.asarray(sigma, complex)
    return HermitianMap(np.kron(sigma, np.eye(in_alg.ambient_dim)), in_alg, sigma.shape[0])


def tau(in_alg, out_alg) -> HermitianMap:
    """``τ = Φ_{I,I}: a ↦ (Tr a) I``."""
    in_alg, out_alg = as_algebra(in_alg), as_algebra(out_alg)
    return HermitianMap(np.eye(in_alg.ambient_dim * out_alg.ambient_dim), in_alg, out_alg)


def unitary_channel(u, alg=None) -> HermitianMap:
    """``a ↦ U a U†``."""
    u = np.asarray(u, complex)
    return from_kraus([u], alg, alg)


# ----------------------------------------------------------------------------
# Core operations
# ----------------------------------------------------------------------------


def apply(m: HermitianMap, a) -> np.ndarray:
    """Evaluate ``φ(a) = Tr_in C(φ)(I ⊗ aᵀ)``."""
    a = np.asarray(a, complex)
    if a.shape[-2:] != (m.d_in, m.d_in):
        raise DimensionError(f"input of shape {a.shape} for a map on dimension {m.d_in}")
    return choi_apply(m.choi, m.dims, a)


def compose(m2: HermitianMap, m1: HermitianMap) -> HermitianMap:
    """The composition ``m2 ∘ m1`` (``m1`` acts first)."""
    if m1.d_out != m2.d_in:
        raise DimensionError(f"cannot compose a map into dimension {m1.d_out} with one on {m2.d_in}")
    return HermitianMap(choi_compose(m2.choi, m2.dims, m1.choi, m1.dims), m1.in_alg, m2.out_alg)


def adjoint(m: HermitianMap) -> HermitianMap:
    """Hilbert-Schmidt adjoint: ``Tr a φ*(b) = Tr φ(a) b``."""
    return HermitianMap(choi_adjoint(m.choi, m.dims), m.out_alg, m.in_alg)


def s_functional(m: HermitianMap) -> float:
    """``s(φ) = Σ_ij ⟨i|φ(|i⟩⟨j|)|j⟩ = Tr C(φ) X_H``."""
    if m.d_in != m.d_out:
        raise DimensionError("s is defined for maps from a space to itself")
    t = _t4(m.choi, m.dims)
    return float(np.einsum("iijj->", t).real)


def pairing(m1: HermitianMap, m2: HermitianMap) -> float:
    """Duality pairing ``⟨φ, ψ⟩ = s(ψ∘φ) = Tr C(φ) C(ψ*)`` for ``φ: A→B, ψ: B→A``."""
    if m1.d_in != m2.d_out or m1.d_out != m2.d_in:
        raise DimensionError("pairing needs maps A→B and B→A")
    return float(np.sum(m1.choi * choi_adjoint(m2.choi, m2.dims).T).real)


def is_trace_preserving(m: HermitianMap, tol: float = TOL_TP) -> tuple[bool, float]:
    """Return ``(flag, defect)`` with ``defect = max |Tr_out C − I|`` on the input algebra."""
    dev = out_trace(m.choi, m.dims) - np.eye(m.d_in)
    dev[~m.in_alg.mask] = 0
    defect = float(np.max(np.abs(dev)))
    return defect <= tol, defect


def tensor_map(m1: HermitianMap, m2: HermitianMap) -> HermitianMap:
    """The tensor product ``m1 ⊗ m2``."""
    c = choi_tensor(m1.choi, m1.dims, m2.choi, m2.dims)
    return HermitianMap(c, m1.in_alg.tensor(m2.in_alg), m1.out_alg.tensor(m2.out_alg))


def tensor_id(m: HermitianMap, d: int) -> HermitianMap:
    """``m ⊗ id_{B(C^d)}``."""
    return tensor_map(m, identity_map(d))


# ----------------------------------------------------------------------------
# Classical-quantum constructors
# ----------------------------------------------------------------------------


def make_cq(B, out_alg=None) -> HermitianMap:
    """``Φ^cq_B: D_n → B(K)``, ``|i⟩⟨i| ↦ B_i``."""
    B = as_matrices(B)
    if not B:
        raise ValueError("need at least one operator")
    n, d = len(B), B[0].shape[0]
    t = np.zeros((d, n, d, n), complex)
    for i, b in enumerate(B):
        t[:, i, :, i] = b
    return HermitianMap(_m2(t), BlockAlgebra.diagonal(n), out_alg if out_alg is not None else d)


def make_qc(A, in_alg=None) -> HermitianMap:
    """``Φ^qc_A: B(H) → D_m``, ``b ↦ Σ_i Tr(A_i b) |i⟩⟨i|``."""
    A = as_matrices(A)
    if not A:
        raise ValueError("need at least one operator")
    m, d = len(A), A[0].shape[0]
    t = np.zeros((m, d, m, d), complex)
    for i, a in enumerate(A):
        t[i, :, i, :] = a.T
    return HermitianMap(_m2(t), in_alg if in_alg is not None else d, BlockAlgebra.diagonal(m))


def make_fe(F, E, in_alg=None, out_alg=None) -> HermitianMap:
    """``Φ_{F,E}: a ↦ Σ_i ρ_i Tr(F_i a)`` with ``ρ_i ∈ E``."""
    F, E = as_matrices(F), as_matrices(E)
    if len(F) != len(E) or not F:
        raise ValueError("F and E must be nonempty lists of equal length")
    c = sum(np.kron(e, f.T) for f, e in zip(F, E))
    return HermitianMap(c, in_alg if in_alg is not None else F[0].shape[0],
                        out_alg if out_alg is not None else E[0].shape[0])


def normalize_eb(F, E) -> tuple[list[np.ndarray], list[np.ndarray]]:
    """Rewrite ``Φ_{F,E}`` with ``F`` a POVM.

    With ``t = ‖Σ_i F_i‖`` the new lists are ``F'_i = F_i/t``,
    ``F'_{k+1} = I − Σ_i F'_i`` and ``E'_i = t E_i``, ``E'_{k+1} = 0``.
    """
    F, E = as_matrices(F), as_matrices(E)
    if len(F) != len(E) or not F:
        raise ValueError("F and E must be nonempty lists of equal length")
    for f in F:
        if np.linalg.eigvalsh(herm(f))[0] < -1e-10:
            raise ValueError("F must consist of PSD operators")
    t = op_norm(sum(F))
    if t == 0:
        d = F[0].shape[0]
        return [np.eye(d, dtype=complex)], [np.zeros_like(E[0])]
    Fn = [f / t for f in F]
    Fn.append(np.eye(F[0].shape[0]) - sum(Fn))
    En = [t * e for e in E] + [np.zeros_like(E[0])]
    return Fn, En


# ----------------------------------------------------------------------------
# Experiments
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class Experiment:
    """An ordered family of states over a common algebra."""

    states: tuple[State, ...]

    def __post_init__(self):
        states = tuple(s if isinstance(s, State) else State(s) for s in self.states)
        if not states:
            raise ValueError("an experiment needs at least one state")
        alg = states[0].op.algebra
        if any(s.op.algebra != alg for s in states):
            raise DimensionError("experiment states live in different algebras")
        object.__setattr__(self, "states", states)

    @classmethod
    def from_arrays(cls, arrays, algebra=None) -> "Experiment":
        from .matops import HermitianOperator
        return cls(tuple(State(HermitianOperator(a, algebra)) for a in arrays))

    @property
    def matrices(self) -> list[np.ndarray]:
        return [np.array(s.matrix) for s in self.states]

    @property
    def algebra(self) -> BlockAlgebra:
        return self.states[0].op.algebra

    def __len__(self):
        return len(self.states)

    def image(self, m: HermitianMap) -> "Experiment":
        """The experiment ``φ(E) = {φ(ρ_i)}``."""
        from .matops import HermitianOperator
        return Experiment(tuple(State(HermitianOperator(apply(m, r), m.out_alg)) for r in self.matrices))
