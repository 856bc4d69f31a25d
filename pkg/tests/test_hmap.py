import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chandef import corpus
from chandef.hmap import (
    Experiment,
    adjoint,
    apply,
    compose,
    from_choi,
    from_function,
    identity_map,
    is_trace_preserving,
    make_cq,
    make_fe,
    make_qc,
    normalize_eb,
    pairing,
    replacer,
    s_functional,
    tau,
    tensor_map,
)
from chandef.matops import BlockAlgebra, DimensionError


def _transpose_map(d=2):
    return from_function(lambda a: a.T, d, d)


def test_identity_map_apply(rng):
    a = corpus.random_hermitian(rng, 3)
    np.testing.assert_allclose(apply(identity_map(3), a), a, atol=1e-14)


def test_tau_scales_identity_by_trace():
    a = np.diag([1.0, 2.0])
    np.testing.assert_allclose(apply(tau(2, 3), a), 3 * np.eye(3))


def test_channel_preserves_trace_of_states(rng):
    ch = corpus.random_channel(rng, 2, 3)
    rho = corpus.random_state(rng, 2)
    assert abs(np.trace(apply(ch, rho)) - 1) < 1e-10


def test_apply_rejects_wrong_shape():
    with pytest.raises(DimensionError):
        apply(identity_map(2), np.eye(3))


def test_from_function_matches_kraus(rng):
    u = corpus.random_unitary(rng, 2)
    m = from_function(lambda a: u @ a @ u.conj().T, 2, 2)
    a = corpus.random_hermitian(rng, 2)
    np.testing.assert_allclose(apply(m, a), u @ a @ u.conj().T, atol=1e-12)


def test_compose_with_identity(rng):
    m = corpus.random_hermitian_map(rng, 2, 3)
    assert compose(identity_map(3), m).allclose(m)
    assert compose(m, identity_map(2)).allclose(m)


def test_compose_cq_after_qc_is_measure_prepare(rng):
    F = corpus.random_povm(rng, 2, 3)
    B = [corpus.random_hermitian(rng, 2) for _ in range(3)]
    m = compose(make_cq(B), make_qc(F))
    a = corpus.random_hermitian(rng, 2)
    expected = sum(b * np.trace(f @ a) for f, b in zip(F, B))
    np.testing.assert_allclose(apply(m, a), expected, atol=1e-12)
    assert m.allclose(make_fe(F, B))


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_compose_agrees_pointwise(seed):
    rng = np.random.default_rng(seed)
    m1, m2 = corpus.random_hermitian_map(rng, 2, 3), corpus.random_hermitian_map(rng, 3, 2)
    c = compose(m2, m1)
    for i in range(2):
        for j in range(2):
            e = np.zeros((2, 2))
            e[i, j] = 1
            np.testing.assert_allclose(apply(c, e), apply(m2, apply(m1, e)), atol=1e-10)


def test_adjoint_of_identity():
    assert adjoint(identity_map(3)).allclose(identity_map(3))


def test_adjoint_of_qc_recovers_effects(rng):
    A = [corpus.random_hermitian(rng, 2) for _ in range(3)]
    qa = adjoint(make_qc(A))
    for i, a in enumerate(A):
        np.testing.assert_allclose(apply(qa, np.diag(np.eye(3)[i])), a, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_adjoint_pairing_identity(seed):
    rng = np.random.default_rng(seed)
    m = corpus.random_hermitian_map(rng, 2, 3)
    ma = adjoint(m)
    for _ in range(20):
        a, b = corpus.random_hermitian(rng, 2), corpus.random_hermitian(rng, 3)
        lhs = np.trace(a @ apply(ma, b)).real
        rhs = np.trace(apply(m, a) @ b).real
        assert abs(lhs - rhs) <= 1e-9


def test_s_functional_of_identity():
    assert s_functional(identity_map(2)) == pytest.approx(4)


def test_s_functional_of_rank_one_map(rng):
    # a ↦ b Tr(a c) has s = Tr(b c).
    b, c = corpus.random_hermitian(rng, 3), corpus.random_hermitian(rng, 3)
    m = make_fe([c], [b])
    assert s_functional(m) == pytest.approx(np.trace(b @ c).real, abs=1e-12)


def test_s_functional_is_cyclic(rng):
    f, g = corpus.random_hermitian_map(rng, 2, 3), corpus.random_hermitian_map(rng, 3, 2)
    assert s_functional(compose(g, f)) == pytest.approx(s_functional(compose(f, g)), abs=1e-10)


def test_pairing_cq_qc(rng):
    B = [corpus.random_hermitian(rng, 2) for _ in range(3)]
    F = [corpus.random_hermitian(rng, 2) for _ in range(3)]
    expected = sum(np.trace(b @ f).real for b, f in zip(B, F))
    assert pairing(make_cq(B), make_qc(F)) == pytest.approx(expected, abs=1e-12)


def test_pairing_channel_with_scaled_replacer(rng):
    ch = corpus.random_channel(rng, 2, 3)
    sigma = corpus.random_state(rng, 2)
    t = 1.7
    assert pairing(ch, replacer(sigma, 3) * t) == pytest.approx(t, abs=1e-10)


def test_pairing_two_formulas(rng):
    f, g = corpus.random_hermitian_map(rng, 2, 3), corpus.random_hermitian_map(rng, 3, 2)
    assert pairing(f, g) == pytest.approx(s_functional(compose(g, f)), abs=1e-9)


def test_make_cq_single_state_is_replacer(rng):
    rho = corpus.random_state(rng, 2)
    m = make_cq([rho])
    np.testing.assert_allclose(apply(m, np.ones((1, 1))), rho)


def test_make_cq_basis_projectors_embed_diagonal():
    m = make_cq([np.diag([1.0, 0.0]), np.diag([0.0, 1.0])])
    assert is_trace_preserving(m)[0]
    np.testing.assert_allclose(apply(m, np.diag([0.3, 0.7])), np.diag([0.3, 0.7]))


def test_make_cq_of_states_is_trace_preserving(rng):
    assert is_trace_preserving(make_cq([corpus.random_state(rng, 3) for _ in range(4)]))[0]


def test_trivial_qc_map():
    m = make_qc([np.eye(2) / 2, np.eye(2) / 2])
    np.testing.assert_allclose(apply(m, np.diag([0.9, 0.1])), np.diag([0.5, 0.5]))


def test_make_fe_identity_effect_is_replacer(rng):
    sigma = corpus.random_state(rng, 2)
    assert make_fe([np.eye(3)], [sigma]).allclose(replacer(sigma, 3))


def test_normalize_eb_on_povm(rng):
    F = corpus.random_povm(rng, 2, 2)
    E = [corpus.random_state(rng, 2) for _ in range(2)]
    Fn, En = normalize_eb(F, E)
    np.testing.assert_allclose(Fn[-1], 0, atol=1e-12)
    np.testing.assert_allclose(En[0], E[0], atol=1e-12)


def test_normalize_eb_quarter_identity(rng):
    e = corpus.random_state(rng, 2)
    Fn, En = normalize_eb([np.eye(2) / 4], [e])
    np.testing.assert_allclose(Fn[0], np.eye(2))
    np.testing.assert_allclose(Fn[1], 0, atol=1e-15)
    np.testing.assert_allclose(En[0], e / 4)


@settings(max_examples=20, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_normalize_eb_keeps_choi(seed):
    rng = np.random.default_rng(seed)
    F = [corpus.random_psd(rng, 2) for _ in range(3)]
    E = [corpus.random_hermitian(rng, 2) for _ in range(3)]
    Fn, En = normalize_eb(F, E)
    np.testing.assert_allclose(make_fe(Fn, En).choi, make_fe(F, E).choi, atol=1e-10)


def test_trace_preservation_defect():
    assert is_trace_preserving(identity_map(2)) == (True, 0.0)
    ok, defect = is_trace_preserving(identity_map(2) * 0.5)
    assert not ok and defect == pytest.approx(0.5)


def test_stinespring_channels_are_trace_preserving(rng):
    for _ in range(5):
        assert is_trace_preserving(corpus.random_channel(rng, 3, 2))[0]


def test_tensor_with_trivial_ancilla(rng):
    m = corpus.random_hermitian_map(rng, 2, 3)
    np.testing.assert_allclose(tensor_map(m, identity_map(1)).choi, m.choi)


def test_tau_tensor_tau_on_product(rng):
    t = tau(2, 2)
    rho = np.kron(corpus.random_state(rng, 2), corpus.random_state(rng, 2))
    np.testing.assert_allclose(apply(tensor_map(t, t), rho), np.eye(4), atol=1e-12)


def test_tensor_factorizes_on_products(rng):
    m1, m2 = corpus.random_hermitian_map(rng, 2, 3), corpus.random_hermitian_map(rng, 2, 2)
    a, b = corpus.random_hermitian(rng, 2), corpus.random_hermitian(rng, 2)
    np.testing.assert_allclose(apply(tensor_map(m1, m2), np.kron(a, b)),
                               np.kron(apply(m1, a), apply(m2, b)), atol=1e-9)


def test_masked_map_lives_between_subalgebras(rng):
    D = BlockAlgebra.diagonal(2)
    ch = corpus.random_channel(rng, 2, 2, in_alg=D, out_alg=D)
    out = apply(ch, corpus.random_state(rng, 2))
    np.testing.assert_allclose(out, np.diag(np.diag(out)), atol=1e-14)
    assert is_trace_preserving(ch)[0]


def test_from_choi_rejects_bad_shape():
    with pytest.raises(DimensionError):
        from_choi(np.eye(5), 2, 2)


def test_from_choi_symmetrizes():
    c = np.triu(np.ones((4, 4)))
    np.testing.assert_allclose(from_choi(c, 2, 2).choi, (c + c.T) / 2)


def test_experiment_image(rng):
    E = corpus.random_experiment(rng, 2, 3)
    u = corpus.random_unitary(rng, 2)
    img = E.image(from_function(lambda a: u @ a @ u.conj().T, 2, 2))
    assert isinstance(img, Experiment) and len(img) == 3
    np.testing.assert_allclose(img.matrices[1], u @ E.matrices[1] @ u.conj().T, atol=1e-12)
