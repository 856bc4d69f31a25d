import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from chandef import corpus
from chandef.deficiency import DeficiencyReport
from chandef.hmap import identity_map, make_cq
from chandef.jsonio import (
    ParseError,
    decode_matrix,
    dumps,
    encode_matrix,
    experiment_from_json,
    experiment_to_json,
    map_from_json,
    map_to_json,
    povm_from_json,
    povm_to_json,
)
from chandef.matops import BlockAlgebra, DimensionError, HermitianOperator, Povm


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(1, 4))
def test_matrix_roundtrip_is_bitwise(seed, d):
    a = corpus.ginibre(np.random.default_rng(seed), d, d)
    b = decode_matrix(json.loads(json.dumps(encode_matrix(a))))
    assert np.array_equal(a, b)


def test_decode_nested_real_and_pairs():
    np.testing.assert_array_equal(decode_matrix([[1, 2], [3, 4]]), np.array([[1, 2], [3, 4]]))
    m = decode_matrix([[[1, 0], [0, 1]], [[0, -1], [2, 0]]])
    np.testing.assert_array_equal(m, np.array([[1, 1j], [-1j, 2]]))


def test_decode_errors():
    with pytest.raises(ParseError):
        decode_matrix([["a", "b"]])
    with pytest.raises(DimensionError):
        decode_matrix([[1, 0], [0, 0], [1, 0]])


def test_map_roundtrip(rng):
    m = corpus.random_channel(rng, 2, 3)
    back = map_from_json(json.loads(dumps(map_to_json(m))))
    assert np.array_equal(back.choi, m.choi)
    assert back.in_alg == m.in_alg and back.out_alg == m.out_alg


def test_map_roundtrip_keeps_block_algebras():
    m = make_cq([np.eye(2) / 2, np.diag([1.0, 0.0])])
    back = map_from_json(map_to_json(m))
    assert back.in_alg.blocks == (1, 1) and back.allclose(m, 0)


def test_map_without_choi_is_rejected():
    with pytest.raises(ParseError):
        map_from_json({"in_blocks": [2]})


def test_experiment_and_povm_roundtrip(rng):
    E = corpus.random_experiment(rng, 2, 3)
    back = experiment_from_json(experiment_to_json(E))
    for a, b in zip(E.matrices, back.matrices):
        assert np.array_equal(a, b)
    alg = BlockAlgebra.diagonal(2)
    P = Povm(tuple(HermitianOperator(x, alg) for x in (np.diag([1.0, 0.0]), np.diag([0.0, 1.0]))))
    js = povm_to_json(P)
    assert js["blocks"] == [1, 1]
    assert len(povm_from_json(js)) == 2


def test_dumps_is_deterministic_and_finite():
    rep = DeficiencyReport(0.0, np.inf, identity_map(2), None, {"b": np.float64(1.5), "a": np.array([1, 2])})
    s1, s2 = dumps(rep), dumps(rep)
    assert s1 == s2
    obj = json.loads(s1)
    assert obj["eps_hi"] == "inf" and obj["diagnostics"]["b"] == 1.5
    assert list(obj["diagnostics"]) == ["a", "b"]
