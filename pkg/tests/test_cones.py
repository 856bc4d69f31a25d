import numpy as np
import pytest

from chandef import corpus
from chandef.cones import (
    IN,
    OUT,
    ConeFamily,
    Interval,
    base_norm_tilde,
    cp_membership,
    dual_membership,
    eb_membership,
    membership,
    orderunit_norm_tilde,
    pos_membership,
)
from chandef.hmap import compose, from_choi, from_function, identity_map, make_fe, tau
from chandef.matops import partial_transpose, swap_operator, trace_norm


def transpose_map(d=2):
    return from_function(lambda a: a.T, d, d)


def test_family_duality_table():
    assert ConeFamily.CP.dual is ConeFamily.CP
    assert ConeFamily.POS.dual is ConeFamily.EB
    assert ConeFamily.EB.dual is ConeFamily.POS
    assert ConeFamily.parse("Pos") is ConeFamily.POS
    with pytest.raises(ValueError):
        ConeFamily.parse("kpos")


def test_interval_helpers():
    iv = Interval(1.0, 3.0)
    assert iv.mid == 2 and iv.width == 2
    assert iv.contains(3.0 + 1e-9, tol=1e-8) and not iv.contains(0.5)


@pytest.mark.parametrize("m, expected", [
    (identity_map(2), IN),
    (tau(2, 2), IN),
    (transpose_map(), OUT),
])
def test_cp_membership(m, expected):
    assert cp_membership(m).status == expected


def test_transpose_choi_is_swap_with_negative_eigenvalue():
    c = transpose_map().choi
    np.testing.assert_allclose(c, swap_operator(2, 2), atol=1e-14)
    v = cp_membership(transpose_map())
    assert v.margin == pytest.approx(-1.0)


def test_eb_membership(rng):
    F = [corpus.random_psd(rng, 2) for _ in range(3)]
    E = [corpus.random_psd(rng, 2) for _ in range(3)]
    assert eb_membership(make_fe(F, E)).status == IN
    assert eb_membership(tau(2, 2)).status == IN
    v = eb_membership(identity_map(2))
    assert v.status == OUT
    # The maximally entangled Choi matrix has partial transpose with eigenvalue −1.
    assert v.margin == pytest.approx(-1.0)


def test_pos_membership(rng):
    assert pos_membership(transpose_map()).status == IN
    assert pos_membership(from_choi(-np.eye(4), 2, 2)).status == OUT
    m = corpus.random_cp_map(rng, 2)
    assert pos_membership(m).status == IN and cp_membership(m).status == IN


def test_dual_membership():
    F = [np.diag([1.0, 0.0]), np.diag([0.0, 1.0])]
    E = [np.eye(2) / 2, np.diag([1.0, 0.0])]
    assert dual_membership("pos", make_fe(F, E)).status == IN
    assert dual_membership("cp", identity_map(2)).status == IN
    assert dual_membership("eb", transpose_map()).status == IN


def test_family_inclusions_on_corpus(rng):
    # EB ⊆ CP ⊆ Pos on every sampled map.
    order = {"eb": 0, "cp": 1, "pos": 2}
    maps = [corpus.random_cp_map(rng, 2, rank=r) for r in (1, 2, 4)] + [transpose_map(), identity_map(2)]
    for m in maps:
        verdicts = {f: membership(f, m).status for f in order}
        for f, g in [("eb", "cp"), ("cp", "pos"), ("eb", "pos")]:
            if verdicts[f] == IN:
                assert verdicts[g] == IN, (f, g)


def test_families_closed_under_composition(rng):
    for fam in ("eb", "cp", "pos"):
        if fam == "eb":
            a = make_fe([corpus.random_psd(rng, 2)], [corpus.random_psd(rng, 2)])
            b = make_fe([corpus.random_psd(rng, 2)], [corpus.random_psd(rng, 2)])
        elif fam == "cp":
            a, b = corpus.random_cp_map(rng, 2), corpus.random_cp_map(rng, 2)
        else:
            a, b = transpose_map(), corpus.random_cp_map(rng, 2)
        assert membership(fam, compose(a, b)).status == IN


@pytest.mark.parametrize("family", ["cp", "eb", "pos"])
def test_orderunit_norm_of_identity(family):
    assert orderunit_norm_tilde(family, np.eye(4), (2, 2)).hi == pytest.approx(1, abs=1e-6)


def test_orderunit_norm_cp_is_operator_norm():
    X = np.diag([2.0, -1.0, 0.0, 0.0])
    assert orderunit_norm_tilde("cp", X, (2, 2)).lo == pytest.approx(2)


@pytest.mark.parametrize("family", ["cp", "pos"])
def test_base_norm_of_psd_is_trace(family, rng):
    X = corpus.random_psd(rng, 4)
    iv = base_norm_tilde(family, X, (2, 2))
    assert iv.contains(np.trace(X).real, tol=1e-6)


def test_base_norm_eb_of_separable_is_trace(rng):
    # For EB the order is block-positive; Y = I is optimal only on separable X.
    X = sum(np.kron(corpus.random_psd(rng, 2), corpus.random_psd(rng, 2)) for _ in range(3))
    iv = base_norm_tilde("eb", X, (2, 2))
    assert iv.contains(np.trace(X).real, tol=1e-6)


def test_base_norm_eb_can_exceed_trace_on_entangled_psd():
    v = np.eye(2).reshape(4) / np.sqrt(2)
    X = np.outer(v, v)
    assert base_norm_tilde("eb", X, (2, 2)).lo > 1 + 1e-3


def test_base_norm_cp_of_z():
    assert base_norm_tilde("cp", np.diag([1.0, -1.0]), (1, 2)).lo == pytest.approx(2)


def test_base_norm_tilde_brackets_trace_norm(rng):
    # Difference of two 2⊗2 states: the separable-order base norm cannot exceed the trace norm.
    X = corpus.random_state(rng, 4) - corpus.random_state(rng, 4)
    cp = trace_norm(X)
    for fam in ("eb", "pos"):
        iv = base_norm_tilde(fam, X, (2, 2))
        assert iv.lo <= iv.hi + 1e-7
        # A smaller order cone shrinks the unit ball of Y, a larger one enlarges it.
        if ConeFamily.parse(fam).tilde is ConeFamily.POS:
            assert iv.lo >= cp - 1e-6
        else:
            assert iv.hi <= cp + 1e-6


def test_orderunit_norm_pos_tilde_bounds_operator_norm(rng):
    X = corpus.random_hermitian(rng, 4)
    from chandef.matops import op_norm
    iv = orderunit_norm_tilde("eb", X, (2, 2))  # tilde cone is Pos
    assert iv.hi <= op_norm(X) + 1e-6
    iv2 = orderunit_norm_tilde("pos", X, (2, 2))  # tilde cone is Sep
    assert iv2.lo >= op_norm(X) - 1e-6


def test_membership_to_json():
    js = cp_membership(transpose_map()).to_json()
    assert js["status"] == OUT and isinstance(js["margin"], float)


def test_ppt_margin_matches_partial_transpose():
    c = identity_map(2).choi
    w = np.linalg.eigvalsh(partial_transpose(c, (2, 2), 1))
    assert eb_membership(identity_map(2)).margin == pytest.approx(w[0])
