"""Invariant suites for every module, used by ``chandef verify``.

Each suite draws a small seeded corpus and returns a list of
:class:`Check` records.  The suites are sized to finish in seconds; the
test-suite runs larger versions of the same properties.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import corpus, deficiency, hmap, matops, norms, ovs
from .cones import IN, cp_membership, eb_membership, membership


@dataclass
class Check:
    suite: str
    name: str
    ok: bool
    detail: float | str = ""

    def to_json(self) -> dict:
        return {"suite": self.suite, "name": self.name, "ok": bool(self.ok), "detail": self.detail}


def _check(suite, name, ok, detail=""):
    if isinstance(detail, (np.floating, float)):
        detail = float(detail)
    return Check(suite, name, bool(ok), detail)


def matops_suite(rng) -> list[Check]:
    out = []
    a = corpus.random_hermitian(rng, 4)
    w, _ = matops.eig(a)
    out.append(_check("matops", "trace norm is the sum of absolute eigenvalues",
                      abs(matops.trace_norm(a) - np.abs(w).sum()) < 1e-10))
    p = corpus.random_psd(rng, 4, 2)
    s, q = matops.pinv_sqrt(p)
    out.append(_check("matops", "pseudo-inverse square root", np.allclose(s @ p @ s, q, atol=1e-8)))
    x, y = corpus.random_hermitian(rng, 2), corpus.random_hermitian(rng, 3)
    out.append(_check("matops", "partial trace of a product",
                      np.allclose(matops.partial_trace(np.kron(x, y), (2, 3), 1), np.trace(y) * x)))
    alg = matops.BlockAlgebra.from_blocks([1, 2])
    e = matops.conditional_expectation(a[:3, :3], alg)
    out.append(_check("matops", "conditional expectation is idempotent",
                      np.allclose(matops.conditional_expectation(e, alg), e)))
    return out


def hmap_suite(rng) -> list[Check]:
    out = []
    f, g, h = (corpus.random_hermitian_map(rng, 2) for _ in range(3))
    lhs = hmap.compose(hmap.compose(f, g), h)
    rhs = hmap.compose(f, hmap.compose(g, h))
    out.append(_check("hmap", "composition is associative", lhs.allclose(rhs, 1e-10)))
    k = corpus.random_hermitian_map(rng, 2, 3)
    a, b = corpus.random_hermitian(rng, 2), corpus.random_hermitian(rng, 3)
    lhs = np.trace(hmap.apply(k, a) @ b).real
    rhs = np.trace(a @ hmap.apply(hmap.adjoint(k), b)).real
    out.append(_check("hmap", "adjoint under the trace pairing", abs(lhs - rhs) < 1e-10, abs(lhs - rhs)))
    ch = corpus.random_channel(rng, 2, 3)
    ok, defect = hmap.is_trace_preserving(ch)
    out.append(_check("hmap", "random channels preserve trace", ok, defect))
    p1 = hmap.pairing(f, hmap.adjoint(g))
    p2 = hmap.pairing(hmap.adjoint(g), f)
    out.append(_check("hmap", "pairing is symmetric", abs(p1 - p2) < 1e-10, abs(p1 - p2)))
    return out


def cones_suite(rng) -> list[Check]:
    out = []
    ch = corpus.random_channel(rng, 2, 2)
    out.append(_check("cones", "channels are CP", cp_membership(ch).status == IN))
    effects = corpus.random_povm(rng, 2, 2)
    states = [corpus.random_state(rng, 2) for _ in range(2)]
    eb = hmap.make_fe(effects, states)
    out.append(_check("cones", "measure-and-prepare maps are EB", eb_membership(eb).status == IN))
    out.append(_check("cones", "EB maps are positive", membership("pos", eb).status == IN))
    return out


def norms_suite(rng) -> list[Check]:
    out = []
    m = corpus.random_hermitian_map(rng, 2)
    for fam in ("cp", "eb", "pos"):
        r = norms.norm_duality_check(fam, m, samples=5)
        out.append(_check("norms", f"diamond norm duality ({fam})", r["relative_gap"] < 1e-5, r["relative_gap"]))
    ops = [corpus.random_hermitian(rng, 2) for _ in range(3)]
    cq = norms.diamond_norm("cp", hmap.make_cq(ops)).value
    out.append(_check("norms", "cq diamond norm is the largest trace norm",
                      abs(cq - norms.cq_diamond(ops)) < 1e-6, abs(cq - norms.cq_diamond(ops))))
    qc = norms.dual_diamond_norm("cp", hmap.make_qc(ops)).value
    out.append(_check("norms", "qc dual diamond norm is the sum of operator norms",
                      abs(qc - norms.qc_dual_diamond(ops)) < 1e-6, abs(qc - norms.qc_dual_diamond(ops))))
    ch = corpus.random_channel(rng, 2, 2)
    n0 = norms.diamond_norm("cp", m).value_lo
    n1 = norms.diamond_norm("cp", hmap.compose(ch, m)).value_hi
    out.append(_check("norms", "channels do not increase the diamond norm", n1 <= n0 + 1e-8, n1 - n0))
    return out


def deficiency_suite(rng) -> list[Check]:
    out = []
    phi = corpus.random_channel(rng, 2, 2)
    r = deficiency.post_deficiency("cp", phi, phi)
    out.append(_check("deficiency", "post reflexivity", r.eps_hi <= 1e-7, r.eps_hi))
    r = deficiency.pre_deficiency("cp", phi, phi)
    out.append(_check("deficiency", "pre reflexivity", r.eps_hi <= 1e-7, r.eps_hi))
    a0 = corpus.random_channel(rng, 2, 2)
    r = deficiency.post_deficiency("cp", hmap.compose(a0, phi), phi)
    out.append(_check("deficiency", "garbling is recovered", r.eps_hi <= 1e-6, r.eps_hi))
    psi = corpus.random_channel(rng, 2, 2, kraus_rank=2)
    r = deficiency.post_deficiency("cp", phi, psi)
    out.append(_check("deficiency", "witness and randomization bounds agree",
                      r.eps_hi - r.eps_lo <= 1e-4, r.eps_hi - r.eps_lo))
    x, y = corpus.random_psd(rng, 3), corpus.random_psd(rng, 3)
    s = deficiency.powers_stormer_slack(x, y)
    out.append(_check("deficiency", "Powers-Stormer inequality", s >= -1e-10, s))
    return out


def ovs_suite(rng) -> list[Check]:
    out = []
    B = ovs.random_section(rng, 5)
    dd = ovs.dual_section(ovs.dual_section(B))
    out.append(_check("ovs", "double dual section", ovs.same_rays(dd.vertices(), B.vertices())))
    r = ovs.dual_norm_check(B, rng.normal(size=5))
    out.append(_check("ovs", "dual norm of the base section norm", r["gap"] <= 1e-8, r["gap"]))
    v = B.vertices()
    b1, b2 = rng.dirichlet(np.ones(len(v))) @ v, rng.dirichlet(np.ones(len(v))) @ v
    r = ovs.half_identity_check(B, b1, b2)
    out.append(_check("ovs", "half identity", r["gap"] <= 1e-8, r["gap"]))
    X = corpus.random_stochastic(rng, 2, 2) - corpus.random_stochastic(rng, 2, 2)
    r = ovs.bridge_check(X)
    out.append(_check("ovs", "classical bridge", r["gap"] <= 1e-8, r["gap"]))
    return out


SUITES = {
    "matops": matops_suite,
    "hmap": hmap_suite,
    "cones": cones_suite,
    "norms": norms_suite,
    "deficiency": deficiency_suite,
    "ovs": ovs_suite,
}


def run_all(seed: int = 0, suites=None) -> list[Check]:
    """Run the selected suites (all by default) with independent seeded streams."""
    names = list(SUITES) if suites is None else list(suites)
    streams = np.random.SeedSequence(seed).spawn(len(names))
    checks = []
    for name, ss in zip(names, streams):
        checks.extend(SUITES[name](np.random.default_rng(ss)))
    return checks
