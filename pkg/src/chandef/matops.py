"""Dense Hermitian linear algebra and finite-dimensional block algebras.

Operators are plain complex :class:`numpy.ndarray` objects throughout the
package.  :class:`HermitianOperator`, :class:`State` and :class:`Povm` are thin
validated wrappers used at API boundaries (file IO, user input).

Block algebras are direct sums ``A = ⊕_k B(H_k)`` embedded in an ambient
``B(C^n)``.  Each ambient basis vector carries a block label; an operator lies
in the algebra iff its ``(a, b)`` entry vanishes whenever ``a`` and ``b`` carry
different labels.  Contiguous blocks are the usual case, but labels also cover
tensor products such as ``B(C^2) ⊗ D_2`` whose blocks interleave.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

#: Hermiticity tolerance for validated operators.
TOL_HERM = 1e-12
#: Tolerance for positivity and normalization of states and effects.
TOL_PSD = 1e-10
#: Relative eigenvalue cutoff used for support decisions.
SUPPORT_CUTOFF = 1e-10


class DimensionError(ValueError):
    """Raised when operator or map dimensions are inconsistent."""


# ----------------------------------------------------------------------------
# Block algebras
# ----------------------------------------------------------------------------


@dataclass(frozen=True)
class BlockAlgebra:
    """A finite-dimensional C*-algebra ``⊕_k B(H_k)`` inside ``B(C^n)``.

    Parameters
    ----------
    labels : tuple of int
        Block label of every ambient basis vector.  Use :meth:`from_blocks`
        for the common contiguous layout.
    """

    labels: tuple[int, ...]

    def __post_init__(self):
        if len(self.labels) == 0:
            raise DimensionError("a block algebra needs at least one basis vector")
        # Canonical relabeling: labels numbered by first appearance.
        seen: dict[int, int] = {}
        canon = tuple(seen.setdefault(l, len(seen)) for l in self.labels)
        object.__setattr__(self, "labels", canon)

    @classmethod
    def from_blocks(cls, blocks: Sequence[int]) -> "BlockAlgebra":
        blocks = [int(b) for b in blocks]
        if not blocks or any(b <= 0 for b in blocks):
            raise DimensionError(f"invalid block list {blocks!r}")
        return cls(tuple(k for k, b in enumerate(blocks) for _ in range(b)))

    @classmethod
    def full(cls, n: int) -> "BlockAlgebra":
        """The full matrix algebra ``B(C^n)``."""
        return cls.from_blocks([n])

    @classmethod
    def diagonal(cls, n: int) -> "BlockAlgebra":
        """The commutative algebra ``D_n`` of diagonal matrices."""
        return cls.from_blocks([1] * n)

    @property
    def ambient_dim(self) -> int:
        return len(self.labels)

    @property
    def blocks(self) -> tuple[int, ...]:
        """Block dimensions in order of first appearance."""
        counts = np.bincount(np.asarray(self.labels))
        return tuple(int(c) for c in counts)

    @property
    def is_contiguous(self) -> bool:
        return list(self.labels) == sorted(self.labels)

    @property
    def is_full(self) -> bool:
        return len(self.blocks) == 1

    @property
    def is_commutative(self) -> bool:
        return all(b == 1 for b in self.blocks)

    @property
    def herm_dim(self) -> int:
        """Real dimension of the Hermitian part, ``Σ_k d_k²``."""
        return sum(b * b for b in self.blocks)

    @property
    def mask(self) -> np.ndarray:
        lab = np.asarray(self.labels)
        return lab[:, None] == lab[None, :]

    def contains(self, h: np.ndarray, tol: float = TOL_HERM) -> bool:
        h = np.asarray(h)
        if h.shape != (self.ambient_dim, self.ambient_dim):
            return False
        return bool(np.all(np.abs(h[~self.mask]) <= tol))

    def tensor(self, other: "BlockAlgebra") -> "BlockAlgebra":
        """Tensor product algebra, basis ordered as ``kron``."""
        n2 = len(set(other.labels))
        return BlockAlgebra(tuple(a * n2 + b for a in self.labels for b in other.labels))

    def hermitian_basis(self) -> np.ndarray:
        """Orthonormal (Hilbert-Schmidt) basis of the Hermitian part.

        Returns an array of shape ``(herm_dim, n, n)``.
        """
        n = self.ambient_dim
        mask = self.mask
        out = []
        for i in range(n):
            e = np.zeros((n, n), complex)
            e[i, i] = 1
            out.append(e)
        s = 1 / np.sqrt(2)
        for i in range(n):
            for j in range(i + 1, n):
                if not mask[i, j]:
                    continue
                e = np.zeros((n, n), complex)
                e[i, j] = e[j, i] = s
                out.append(e)
                e = np.zeros((n, n), complex)
                e[i, j], e[j, i] = -1j * s, 1j * s
                out.append(e)
        return np.array(out)

    def __repr__(self):
        if self.is_contiguous:
            return f"BlockAlgebra.from_blocks({list(self.blocks)})"
        return f"BlockAlgebra({self.labels})"


def as_algebra(alg: BlockAlgebra | int | Sequence[int]) -> BlockAlgebra:
    """Coerce an int (full algebra) or block list into a :class:`BlockAlgebra`."""
    if isinstance(alg, BlockAlgebra):
        return alg
    if isinstance(alg, (int, np.integer)):
        return BlockAlgebra.full(int(alg))
    return BlockAlgebra.from_blocks(alg)


# ----------------------------------------------------------------------------
# Validated wrappers
# ----------------------------------------------------------------------------


def herm(a) -> np.ndarray:
    """Hermitian part ``(a + a†)/2`` as a complex array."""
    a = np.asarray(a, dtype=complex)
    return (a + a.conj().swapaxes(-1, -2)) / 2


@dataclass(frozen=True)
class HermitianOperator:
    """A self-adjoint matrix living in a block algebra.

    Construction symmetrizes ``entries`` and zeroes the entries outside the
    algebra's block pattern.  Inputs farther than ``tol`` from Hermitian raise.
    """

    entries: np.ndarray
    algebra: BlockAlgebra = field(default=None)

    def __post_init__(self):
        a = np.asarray(self.entries, dtype=complex)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise DimensionError(f"expected a square matrix, got shape {a.shape}")
        alg = self.algebra if self.algebra is not None else BlockAlgebra.full(a.shape[0])
        alg = as_algebra(alg)
        if alg.ambient_dim != a.shape[0]:
            raise DimensionError("algebra and matrix dimensions differ")
        scale = max(1.0, float(np.max(np.abs(a))) if a.size else 1.0)
        if np.max(np.abs(a - a.conj().T)) > 1e3 * TOL_HERM * scale:
            raise ValueError("matrix is not Hermitian")
        h = herm(a)
        h[~alg.mask] = 0
        h.setflags(write=False)
        object.__setattr__(self, "entries", h)
        object.__setattr__(self, "algebra", alg)

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)


@dataclass(frozen=True)
class State:
    """A density operator: PSD with unit trace."""

    op: HermitianOperator

    def __post_init__(self):
        op = self.op if isinstance(self.op, HermitianOperator) else HermitianOperator(self.op)
        w = np.linalg.eigvalsh(op.entries)
        if w[0] < -TOL_PSD:
            raise ValueError(f"state has negative eigenvalue {w[0]:.3e}")
        if abs(np.trace(op.entries).real - 1) > TOL_PSD:
            raise ValueError("state does not have unit trace")
        object.__setattr__(self, "op", op)

    @property
    def matrix(self) -> np.ndarray:
        return self.op.entries


@dataclass(frozen=True)
class Povm:
    """A list of PSD effects summing to the identity of a common algebra."""

    effects: tuple[HermitianOperator, ...]

    def __post_init__(self):
        effs = tuple(e if isinstance(e, HermitianOperator) else HermitianOperator(e)
                     for e in self.effects)
        if not effs:
            raise ValueError("a POVM needs at least one effect")
        alg = effs[0].algebra
        if any(e.algebra != alg for e in effs):
            raise DimensionError("POVM effects live in different algebras")
        for e in effs:
            if np.linalg.eigvalsh(e.entries)[0] < -TOL_PSD:
                raise ValueError("POVM effect is not PSD")
        total = sum(e.entries for e in effs)
        if np.max(np.abs(total - np.eye(alg.ambient_dim))) > TOL_PSD:
            raise ValueError("POVM effects do not sum to the identity")
        object.__setattr__(self, "effects", effs)

    @property
    def matrices(self) -> list[np.ndarray]:
        return [e.entries for e in self.effects]

    def __len__(self):
        return len(self.effects)


def as_matrices(ops: Iterable) -> list[np.ndarray]:
    """Turn a Povm, experiment or iterable of operators into complex arrays."""
    if isinstance(ops, Povm):
        return ops.matrices
    out = []
    for o in ops:
        if isinstance(o, State):
            out.append(np.array(o.matrix))
        else:
            out.append(np.array(np.asarray(o), dtype=complex))
    return out


# ----------------------------------------------------------------------------
# Spectral helpers
# ----------------------------------------------------------------------------


def eig(h) -> tuple[np.ndarray, np.ndarray]:
    """Eigen-decomposition of a Hermitian matrix, eigenvalues descending."""
    w, v = np.linalg.eigh(herm(np.asarray(h)))
    return w[::-1], v[:, ::-1]


def trace_norm(h) -> float:
    """Schatten 1-norm of a Hermitian matrix."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(herm(np.asarray(h))))))


def op_norm(h) -> float:
    """Operator norm of a Hermitian matrix."""
    w = np.linalg.eigvalsh(herm(np.asarray(h)))
    return float(max(abs(w[0]), abs(w[-1])))


def min_eig(h) -> float:
    return float(np.linalg.eigvalsh(herm(np.asarray(h)))[0])


def psd_part(h) -> np.ndarray:
    """Projection of a Hermitian matrix onto the PSD cone."""
    w, v = np.linalg.eigh(herm(np.asarray(h)))
    return (v * np.clip(w, 0, None)) @ v.conj().T


def sqrtm_psd(a) -> np.ndarray:
    """Square root of a PSD matrix (negative eigenvalues clipped)."""
    w, v = np.linalg.eigh(herm(np.asarray(a)))
    return (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T


def support_cutoff(w: np.ndarray) -> float:
    return SUPPORT_CUTOFF * max(float(np.max(np.abs(w))), 0.0) if w.size else 0.0


def pinv_sqrt(a) -> tuple[np.ndarray, np.ndarray]:
    """Pseudo-inverse square root of a PSD matrix and its support projection.

    Eigenvalues below ``1e-10 * op_norm(a)`` are treated as zero.

    Returns
    -------
    s : ndarray
        ``a^{-1/2}`` on the support, zero elsewhere, so ``s a s = supp(a)``.
    p : ndarray
        Orthogonal projection onto the support of ``a``.
    """
    w, v = np.linalg.eigh(herm(np.asarray(a)))
    keep = w > support_cutoff(w)
    inv = np.zeros_like(w)
    inv[keep] = 1 / np.sqrt(w[keep])
    s = (v * inv) @ v.conj().T
    p = (v[:, keep]) @ v[:, keep].conj().T
    return s, p


def is_psd(h, tol: float = TOL_PSD) -> bool:
    return min_eig(h) >= -tol


def is_state(h, tol: float = TOL_PSD) -> bool:
    h = np.asarray(h)
    return is_psd(h, tol) and abs(np.trace(h).real - 1) <= tol


# ----------------------------------------------------------------------------
# Tensor plumbing (all functions accept leading batch axes)
# ----------------------------------------------------------------------------


def tensor(*ops) -> np.ndarray:
    """Kronecker product of matrices, left to right."""
    out = np.array([[1.0 + 0j]])
    for o in ops:
        out = np.kron(out, np.asarray(o))
    return out


def _split(h: np.ndarray, dims: Sequence[int]) -> np.ndarray:
    d1, d2 = dims
    if h.shape[-1] != d1 * d2 or h.shape[-2] != d1 * d2:
        raise DimensionError(f"operator of shape {h.shape[-2:]} does not factor as {d1}x{d2}")
    return h.reshape(h.shape[:-2] + (d1, d2, d1, d2))


def partial_trace(h, dims: Sequence[int], side: int | str = 1) -> np.ndarray:
    """Partial trace over one factor of a bipartite operator.

    Parameters
    ----------
    h : array_like
        Operator on ``C^{d1} ⊗ C^{d2}`` (leading batch axes allowed).
    dims : (d1, d2)
    side : {0, 1, "first", "second"}
        Factor that is traced out.
    """
    side = {"first": 0, "second": 1}.get(side, side)
    t = _split(np.asarray(h), dims)
    if side == 1:
        return np.einsum("...ijkj->...ik", t)
    return np.einsum("...ijil->...jl", t)


def partial_transpose(h, dims: Sequence[int], side: int = 1) -> np.ndarray:
    """Partial transpose on one factor of a bipartite operator."""
    t = _split(np.asarray(h), dims)
    if side == 1:
        t = t.swapaxes(-3, -1)
    else:
        t = t.swapaxes(-4, -2)
    d = dims[0] * dims[1]
    return t.reshape(t.shape[:-4] + (d, d))


def swap_operator(d1: int, d2: int) -> np.ndarray:
    """Unitary exchanging the factors ``C^{d1} ⊗ C^{d2} → C^{d2} ⊗ C^{d1}``."""
    s = np.zeros((d2 * d1, d1 * d2))
    for i in range(d1):
        for j in range(d2):
            s[j * d1 + i, i * d2 + j] = 1
    return s


def conditional_expectation(h, alg: BlockAlgebra) -> np.ndarray:
    """Trace-preserving conditional expectation onto a block algebra.

    This is block extraction (pinching); for ``D_n`` it keeps the diagonal.
    """
    h = np.array(h, dtype=complex)
    if h.shape[-1] != alg.ambient_dim:
        raise DimensionError("operator and algebra dimensions differ")
    h[..., ~alg.mask] = 0
    return h


def max_entangled(d: int) -> np.ndarray:
    """Unnormalized vector ``Σ_i |i⟩⊗|i⟩``."""
    return np.eye(d).reshape(d * d).astype(complex)
