"""Seeded generators for random test and benchmark objects.

Every function takes a ``numpy.random.Generator`` (or a seed) so corpora are
reproducible.  Channels come from random Stinespring isometries, which makes
complete positivity and trace preservation hold by construction.
"""

from __future__ import annotations

import numpy as np
from scipy.stats import unitary_group

from .hmap import Experiment, HermitianMap, from_choi, from_kraus, make_cq, make_qc
from .matops import BlockAlgebra, as_algebra, conditional_expectation, herm


def rng_of(seed) -> np.random.Generator:
    return seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)


def ginibre(rng, rows, cols) -> np.ndarray:
    return (rng.normal(size=(rows, cols)) + 1j * rng.normal(size=(rows, cols))) / np.sqrt(2)


def random_hermitian(rng, d: int, scale: float = 1.0) -> np.ndarray:
    g = ginibre(rng_of(rng), d, d)
    return scale * herm(g)


def random_psd(rng, d: int, rank: int | None = None) -> np.ndarray:
    g = ginibre(rng_of(rng), d, rank or d)
    return g @ g.conj().T


def random_state(rng, d: int, rank: int | None = None, alg=None) -> np.ndarray:
    """Random density matrix (Ginibre ensemble), optionally inside a block algebra."""
    p = random_psd(rng, d, rank)
    if alg is not None:
        p = conditional_expectation(p, as_algebra(alg))
    return p / np.trace(p).real


def random_pure_state(rng, d: int) -> np.ndarray:
    v = ginibre(rng_of(rng), d, 1)[:, 0]
    v /= np.linalg.norm(v)
    return np.outer(v, v.conj())


def random_unitary(rng, d: int) -> np.ndarray:
    return unitary_group.rvs(d, random_state=rng_of(rng))


def random_isometry(rng, rows: int, cols: int) -> np.ndarray:
    q, r = np.linalg.qr(ginibre(rng_of(rng), rows, cols))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_channel(rng, d_in: int, d_out: int | None = None, kraus_rank: int | None = None,
                   in_alg=None, out_alg=None) -> HermitianMap:
    """Random CPTP map from a Haar-like Stinespring isometry.

    With block algebras given, the map is ``E_B ∘ φ ∘ E_A``, which is again a
    channel between the subalgebras.
    """
    rng = rng_of(rng)
    d_out = d_in if d_out is None else d_out
    r = kraus_rank or d_in * d_out
    v = random_isometry(rng, d_out * r, d_in).reshape(d_out, r, d_in)
    m = from_kraus([v[:, k, :] for k in range(r)])
    if in_alg is None and out_alg is None:
        return m
    in_alg = as_algebra(in_alg if in_alg is not None else d_in)
    out_alg = as_algebra(out_alg if out_alg is not None else d_out)
    # Conditional expectation on the output side keeps trace preservation.
    return restrict(m, in_alg, out_alg)


def restrict(m: HermitianMap, in_alg: BlockAlgebra, out_alg: BlockAlgebra) -> HermitianMap:
    """``E_B ∘ m ∘ E_A`` as a map between the given algebras."""
    return HermitianMap(m.choi, in_alg, out_alg)


def random_cp_map(rng, d_in: int, d_out: int | None = None, rank: int | None = None) -> HermitianMap:
    d_out = d_in if d_out is None else d_out
    return from_choi(random_psd(rng, d_in * d_out, rank), d_in, d_out)


def random_hermitian_map(rng, d_in: int, d_out: int | None = None) -> HermitianMap:
    """Difference of two random CP maps: a generic Hermitian-preserving map."""
    rng = rng_of(rng)
    return random_cp_map(rng, d_in, d_out) - random_cp_map(rng, d_in, d_out)


def random_povm(rng, d: int, n: int, rank: int | None = None) -> list[np.ndarray]:
    """Random ``n``-outcome POVM ``S^{-1/2} P_i S^{-1/2}`` with ``S = Σ P_i``."""
    rng = rng_of(rng)
    ps = [random_psd(rng, d, rank) for _ in range(n)]
    w, v = np.linalg.eigh(herm(sum(ps)))
    s = (v / np.sqrt(w)) @ v.conj().T
    return [herm(s @ p @ s) for p in ps]


def random_experiment(rng, d: int, n: int, rank: int | None = None) -> Experiment:
    rng = rng_of(rng)
    return Experiment.from_arrays([random_state(rng, d, rank) for _ in range(n)])


def random_cq(rng, d: int, n: int) -> HermitianMap:
    rng = rng_of(rng)
    return make_cq([random_hermitian(rng, d) for _ in range(n)])


def random_qc(rng, d: int, n: int) -> HermitianMap:
    rng = rng_of(rng)
    return make_qc([random_hermitian(rng, d) for _ in range(n)])


def depolarizing(d: int, p: float) -> HermitianMap:
    """``a ↦ (1 − p) a + p (Tr a) I/d``."""
    v = np.eye(d).reshape(d * d)
    c = (1 - p) * np.outer(v, v) + p * np.eye(d * d) / d
    return from_choi(c, d, d)


def random_stochastic(rng, rows: int, cols: int) -> np.ndarray:
    """Column-stochastic ``rows × cols`` matrix (columns drawn from a flat Dirichlet)."""
    return rng_of(rng).dirichlet(np.ones(rows), size=cols).T


def random_polytope_cone(rng, dim: int, n_gen: int) -> np.ndarray:
    """Generators of a random pointed polyhedral cone with nonempty interior.

    Generators are ``(1, u)`` with ``u`` random in a ball, so the cone sits
    over the slice ``x_0 = 1`` and contains the axis ``e_0`` in its interior.
    """
    rng = rng_of(rng)
    while True:
        u = rng.normal(size=(n_gen, dim - 1))
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        u *= rng.uniform(0.5, 1.0, size=(n_gen, 1))
        g = np.hstack([np.ones((n_gen, 1)), u])
        if np.linalg.matrix_rank(g) == dim:
            return g
