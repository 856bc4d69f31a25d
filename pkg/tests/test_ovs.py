import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy.spatial import ConvexHull

from chandef import corpus
from chandef.ovs import (
    BaseSection,
    PolyCone,
    PolyhedralError,
    base_section_norm,
    bridge_check,
    dual_cone,
    dual_norm_check,
    dual_section,
    extreme_rays,
    half_identity_check,
    in_unit_ball,
    krein_extend,
    lemma_characterization_check,
    order_unit_norm,
    positive_map_norm,
    random_section,
    same_rays,
    sandwich_check,
    stochastic_section,
)

X12 = np.array([1.0, -2.0])


def simplex(d=2):
    return BaseSection.full(PolyCone.orthant(d), np.ones(d))


def unit_point(d=2):
    return BaseSection.point(PolyCone.orthant(d), np.full(d, 1.0 / d), np.ones(d))


# -- double description ------------------------------------------------------------


@pytest.mark.parametrize("seed", range(6))
def test_extreme_rays_match_convex_hull(seed):
    rng = np.random.default_rng(seed)
    dim = int(rng.integers(3, 6))
    gens = corpus.random_polytope_cone(rng, dim, dim + 4)
    hull = ConvexHull(gens[:, 1:])
    # Hull facet n·u + c ≤ 0 becomes the cone facet (−c, −n)·(x0, u) ≥ 0.
    oracle = np.column_stack([-hull.equations[:, -1], -hull.equations[:, :-1]])
    oracle = np.unique(np.round(oracle / np.linalg.norm(oracle, axis=1, keepdims=True), 10), axis=0)
    assert same_rays(extreme_rays(gens), oracle)


def test_extreme_rays_rejects_lines():
    with pytest.raises(PolyhedralError):
        extreme_rays(np.array([[1.0, 0.0, 0.0], [0.0, 1.0, 0.0]]))


def test_from_generators_drops_redundant_rays():
    gens = np.vstack([np.eye(3), [1.0, 1.0, 1.0]])
    Q = PolyCone.from_generators(gens)
    assert same_rays(Q.generators, np.eye(3)) and same_rays(Q.facets, np.eye(3))


# -- cones and duality -------------------------------------------------------------


def test_orthant_is_self_dual():
    Q = PolyCone.orthant(3)
    D = dual_cone(Q)
    assert same_rays(D.generators, Q.generators) and same_rays(D.facets, Q.facets)


def test_simplicial_dual_facets_are_generators(rng):
    M = np.eye(3) + 0.3 * rng.uniform(size=(3, 3))
    Q = PolyCone.from_generators(M)
    assert same_rays(dual_cone(Q).facets, M)


def test_polyhedral_ice_cream_is_nearly_self_dual():
    t = np.linspace(0, 2 * np.pi, 64, endpoint=False)
    gens = np.column_stack([np.ones_like(t), np.cos(t), np.sin(t)])
    D = dual_cone(PolyCone.from_generators(gens))
    g = D.generators / D.generators[:, :1]
    # Every dual ray sits on the circle of radius sec(π/64) ≈ 1.
    np.testing.assert_allclose(np.linalg.norm(g[:, 1:], axis=1), 1 / np.cos(np.pi / 64), atol=1e-9)


def test_cone_membership():
    Q = PolyCone.orthant(2)
    assert Q.contains([1.0, 0.0]) and not Q.is_interior([1.0, 0.0]) and not Q.contains([1.0, -1e-6])


def test_bad_base_functional_rejected():
    with pytest.raises(PolyhedralError):
        BaseSection.full(PolyCone.orthant(2), np.array([1.0, -1.0]))


# -- sections ----------------------------------------------------------------------


def test_dual_of_full_simplex_is_order_unit():
    Bd = dual_section(simplex(3))
    assert same_rays(Bd.vertices(), np.ones((1, 3)))


def test_dual_of_order_unit_point_is_simplex():
    Bd = dual_section(BaseSection.point(PolyCone.orthant(3), np.ones(3) / 3, np.ones(3)))
    assert same_rays(Bd.vertices(), np.eye(3))
    np.testing.assert_allclose(Bd.vertices() @ np.ones(3), 1, atol=1e-12)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(2, 6))
def test_double_dual_section(seed, dim):
    B = random_section(np.random.default_rng(seed), dim)
    assert same_rays(dual_section(dual_section(B)).vertices(), B.vertices())


def test_krein_extend_constant_one():
    B = random_section(np.random.default_rng(1), 4)
    q, err = krein_extend(B, np.zeros(4), 1.0)
    assert err <= 1e-9
    assert dual_cone(B.cone).contains(q)


def test_krein_extend_restriction(rng):
    B = random_section(rng, 4)
    q0 = rng.dirichlet(np.ones(len(B.cone.facets))) @ B.cone.facets
    q, err = krein_extend(B, q0)
    assert err <= 1e-9
    np.testing.assert_allclose(B.vertices() @ q, B.vertices() @ q0, atol=1e-9)


def test_krein_extend_random_affine(rng):
    B = random_section(rng, 5, sub_dim=3)
    lin = rng.normal(size=5)
    const = -np.min(B.vertices() @ lin) + 0.1
    q, err = krein_extend(B, lin, const)
    assert err <= 1e-9 and dual_cone(B.cone).contains(q, 1e-9)


# -- norms -----------------------------------------------------------------------


def test_simplex_base_gives_l1():
    assert base_section_norm(simplex(), X12) == pytest.approx(3)


def test_order_unit_point_gives_linf():
    assert base_section_norm(unit_point(), X12) == pytest.approx(2)
    assert order_unit_norm(PolyCone.orthant(2), np.ones(2), X12) == pytest.approx(2)


def test_point_section_scales_with_base_functional():
    # b̃ = (1, 1) normalizes the order unit to (1/2, 1/2), doubling the ℓ∞ norm.
    B = BaseSection.point(PolyCone.orthant(2), np.ones(2), np.ones(2))
    assert base_section_norm(B, X12) == pytest.approx(4)
    assert in_unit_ball(B, [0.5, -0.5]) and not in_unit_ball(B, [0.6, 0.0])


@pytest.mark.parametrize("B", [simplex(), unit_point()])
def test_l1_linf_duality_exact(B):
    r = dual_norm_check(B, np.array([0.3, -1.7]))
    assert r["gap"] <= 1e-12 and r["gap_lp"] <= 1e-12


@pytest.mark.parametrize("seed", range(8))
def test_dual_norm_random(seed):
    rng = np.random.default_rng(seed)
    B = random_section(rng, int(rng.integers(2, 7)))
    r = dual_norm_check(B, rng.normal(size=B.dim))
    assert r["gap"] <= 1e-8 and r["gap_lp"] <= 1e-8


def test_half_identity_cases():
    B = simplex()
    r = half_identity_check(B, np.array([1.0, 0.0]), np.array([1.0, 0.0]))
    assert r["sup"] == pytest.approx(0, abs=1e-12) and r["half_norm"] == pytest.approx(0, abs=1e-12)
    r = half_identity_check(B, np.array([1.0, 0.0]), np.array([0.0, 1.0]))
    assert r["sup"] == pytest.approx(1) and r["half_norm"] == pytest.approx(1)


@pytest.mark.parametrize("seed", range(5))
def test_half_identity_random(seed):
    rng = np.random.default_rng(seed)
    B = random_section(rng, 5)
    v = B.vertices()
    b1, b2 = rng.dirichlet(np.ones(len(v))) @ v, rng.dirichlet(np.ones(len(v))) @ v
    assert half_identity_check(B, b1, b2)["gap"] <= 1e-8


def test_positive_map_norm_scaling():
    B = random_section(np.random.default_rng(4), 4)
    assert positive_map_norm(np.eye(4), B, B)["value"] == pytest.approx(1, abs=1e-9)
    assert positive_map_norm(2 * np.eye(4), B, B)["value"] == pytest.approx(2, abs=1e-9)


def test_positive_map_norm_column_l1(rng):
    T = rng.uniform(size=(3, 4))
    r = positive_map_norm(T, simplex(4), simplex(3), samples=200, seed=1)
    assert r["value"] == pytest.approx(T.sum(axis=0).max(), abs=1e-9)
    assert r["excess"] <= 1e-9


def test_positive_map_norm_rejects_non_positive():
    with pytest.raises(PolyhedralError):
        positive_map_norm(-np.eye(2), simplex(), simplex())


def test_sandwich_generator_and_interior():
    B = simplex(3)
    x = np.array([0.0, 2.0, 0.0])
    r = sandwich_check(B, x, samples=100)
    assert r["positive_identity"] == pytest.approx(2) and r["norm"] == pytest.approx(2)
    b = B.interior_point
    r = sandwich_check(B, b, samples=100)
    assert r["norm"] == pytest.approx(1) and r["sup_base"] == pytest.approx(1, abs=1e-7)


@pytest.mark.parametrize("seed", range(4))
def test_sandwich_random(seed):
    rng = np.random.default_rng(seed)
    B = random_section(rng, 4)
    x = rng.normal(size=4)
    r = sandwich_check(B, x, samples=200, seed=seed)
    assert r["inf_ok"] and r["sup_ok"]
    assert r["inf_gap"] <= 1e-5 and r["sup_gap"] <= 1e-5
    q = B.cone.generators.T @ rng.uniform(size=len(B.cone.generators))
    assert sandwich_check(B, q, samples=50)["positive_gap"] <= 1e-8


def test_base_characterization():
    r = lemma_characterization_check(random_section(np.random.default_rng(2), 4), trials=200)
    assert r["failures"] == 0 and r["tested"] > 0


def test_stochastic_section_vertices_are_deterministic_maps():
    B = stochastic_section(2, 2)
    v = B.vertices()
    assert len(v) == 4
    for row in v:
        np.testing.assert_allclose(row.reshape(2, 2).sum(axis=0), 1, atol=1e-12)


@pytest.mark.parametrize("shape", [(2, 2), (3, 2), (2, 3)])
def test_classical_bridge(shape, rng):
    X = corpus.random_stochastic(rng, *shape) - corpus.random_stochastic(rng, *shape)
    r = bridge_check(X)
    assert r["gap"] <= 1e-8
    assert r["ovs_diamond"] == pytest.approx(r["column_l1"], abs=1e-9)


@pytest.mark.parametrize("dim,sub_dim", [(3, 1), (4, 2), (5, 3), (6, 2), (6, 6)])
def test_order_interval_routes_agree(dim, sub_dim):
    from chandef.ovs import _order_interval_by_facets, _order_interval_by_generators
    rng = np.random.default_rng(dim * 10 + sub_dim)
    B = random_section(rng, dim, sub_dim=sub_dim)
    gens, facets = _order_interval_by_generators(B), _order_interval_by_facets(B)
    for _ in range(20):
        y = rng.normal(size=dim)
        assert np.max(gens @ y) == pytest.approx(np.max(facets @ y), abs=1e-10)
