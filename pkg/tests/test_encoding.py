import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import random_params
from onehot_nb.encoding import (
    decode_matrix,
    detect_one_hot_groups,
    encode_matrix,
    generate_dataset,
    one_hot_decode,
    one_hot_encode,
)
from onehot_nb.errors import IndexOutOfRange, NotOneHot
from onehot_nb.models import Layout, NBParams, fit_mle
from onehot_nb.simplex import ProbVector, RngSeed


def row_sums_are_one(m, cols):
    return all(sum(int(row[c]) for c in cols) == 1 for row in m)


class TestGenerateDataset:
    def test_degenerate_prior(self):
        params = NBParams(ProbVector([1.0, 0.0, 0.0]), (np.full((3, 4), 0.25),))
        assert {y for _, y in generate_dataset(params, 500, RngSeed(1, 0))} == {0}

    def test_degenerate_rows(self):
        params = NBParams(ProbVector([0.3, 0.7]), (np.array([[1.0, 0, 0], [1.0, 0, 0]]),))
        assert {obs for obs, _ in generate_dataset(params, 500, RngSeed(1, 0))} == {(0,)}

    def test_zero_probability_values_never_drawn(self):
        params = NBParams(ProbVector([0.5, 0.5]), (np.array([[0.5, 0.0, 0.5], [0.0, 1.0, 0.0]]),))
        data = generate_dataset(params, 5000, RngSeed(2, 0))
        assert all(not (y == 0 and obs[0] == 1) for obs, y in data)
        assert all(obs[0] == 1 for obs, y in data if y == 1)

    def test_label_frequencies(self):
        params = random_params(np.random.default_rng(4), 5, [3, 4])
        data = generate_dataset(params, 100_000, RngSeed(9, 0))
        counts = np.zeros(5)
        for _, y in data:
            counts[y] += 1
        np.testing.assert_allclose(counts / len(data), params.prior.values, atol=0.01)

    def test_deterministic(self):
        params = random_params(np.random.default_rng(4), 3, 3)
        assert generate_dataset(params, 50, RngSeed(1, 2)) == generate_dataset(params, 50, RngSeed(1, 2))


class TestEncodeDecode:
    def test_encode(self):
        assert one_hot_encode((1,), (3,)) == ((0, 1, 0),)

    def test_decode_rejects_empty(self):
        with pytest.raises(NotOneHot):
            one_hot_decode([(0, 0, 0)])

    def test_decode_rejects_two_bits(self):
        with pytest.raises(NotOneHot):
            one_hot_decode([(1, 1, 0)])

    def test_encode_out_of_range(self):
        with pytest.raises(IndexOutOfRange):
            one_hot_encode((3,), (3,))

    @pytest.mark.parametrize("k", range(2, 11))
    def test_round_trip(self, k):
        for j in range(k):
            code = one_hot_encode((j,), (k,))
            assert code[0] == tuple(int(b == j) for b in range(k))
            assert one_hot_decode(code) == (j,)

    def test_matrix_round_trip(self, rng):
        ks = [3, 2, 5]
        obs = np.column_stack([rng.integers(k, size=200) for k in ks])
        bits = encode_matrix(obs, ks)
        assert bits.shape == (200, 10)
        np.testing.assert_array_equal(decode_matrix(bits, ks), obs)
        for row_obs, row_bits in zip(obs[:10], bits[:10]):
            flat = sum(one_hot_encode(tuple(row_obs), ks), ())
            assert tuple(row_bits) == flat


class TestDetectGroups:
    def test_single_group(self, rng):
        obs = rng.integers(3, size=(100, 1))
        bits = np.hstack([encode_matrix(obs, [3]), rng.integers(0, 2, size=(100, 2))])
        groups = detect_one_hot_groups(bits)
        assert [g.columns for g in groups] == [(0, 1, 2)]
        assert groups[0].k == 3

    def test_independent_bernoulli_has_none(self):
        bits = np.random.default_rng(0).integers(0, 2, size=(1000, 8))
        # direct inspection: no pair of columns is even disjoint, so no exact cover exists
        for a in range(8):
            for b in range(a + 1, 8):
                assert np.any(bits[:, a] & bits[:, b])
        assert detect_one_hot_groups(bits) == []

    def test_two_interleaved(self, rng):
        a = encode_matrix(rng.integers(3, size=(300, 1)), [3])
        b = encode_matrix(rng.integers(4, size=(300, 1)), [4])
        order = [0, 3, 1, 4, 5, 2, 6]  # a0 b0 a1 b1 b2 a2 b3
        bits = np.hstack([a, b])[:, order]
        groups = detect_one_hot_groups(bits)
        assert [g.columns for g in groups] == [(0, 2, 5), (1, 3, 4, 6)]
        assert [g.k for g in groups] == [3, 4]
        assert not any(g.ambiguous for g in groups)

    def test_ambiguity_flag(self):
        # x and y are identical binary variables: {x0, x1} and {x0, y1} are both valid groups.
        x = np.array([0, 1, 1, 0, 1])
        bits = np.column_stack([x, 1 - x, x, 1 - x])
        groups = detect_one_hot_groups(bits)
        assert groups[0].columns == (0, 1)
        assert groups[0].ambiguous

    def test_zero_column_not_grouped(self, rng):
        bits = np.hstack([encode_matrix(rng.integers(2, size=(50, 1)), [2]), np.zeros((50, 1), dtype=np.uint8)])
        assert [g.columns for g in detect_one_hot_groups(bits)] == [(0, 1)]

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**32 - 1))
    def test_groups_always_valid(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 40))
        parts = [rng.integers(0, 2, size=(n, int(rng.integers(0, 3))))]
        for _ in range(int(rng.integers(0, 3))):
            k = int(rng.integers(2, 5))
            parts.append(encode_matrix(rng.integers(k, size=(n, 1)), [k]))
        bits = np.hstack(parts)[:, rng.permutation(sum(p.shape[1] for p in parts))]
        seen = set()
        for g in detect_one_hot_groups(bits):
            assert g.k >= 2
            assert row_sums_are_one(bits, g.columns)
            assert not seen & set(g.columns)
            seen |= set(g.columns)


def test_mle_equality_end_to_end():
    """Generate, encode, and fit both ways; the two fits coincide entry for entry."""
    rng = np.random.default_rng(77)
    for _ in range(10):
        ks = [3, 6]
        truth = random_params(rng, 4, ks)
        data = generate_dataset(truth, 1000, rng)
        bits = encode_matrix(np.array([o for o, _ in data]), ks)
        decoded = [(tuple(o), y) for o, (_, y) in zip(decode_matrix(bits, ks).tolist(), data)]
        assert fit_mle(decoded, 4, ks, Layout.ONE_HOT) == fit_mle(data, 4, ks, Layout.ORDINAL)
