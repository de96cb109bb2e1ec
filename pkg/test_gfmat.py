"""
Tests for prime-field matrices, canonical subspaces and enumeration
"""

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import f2_vectors
from core.errors import CapExceededError, DegenerateBlockError, EncodingRangeError, FieldError
from core.gfmat import (
    FqMatrix,
    Subspace,
    canonical_codes,
    canonicalize,
    contains,
    decode_tuple,
    encode_tuple,
    enumerate_subspaces,
    field_order,
    gaussian_binomial,
    intersection,
    intersection_dim,
    pack_keys,
    packed_rank,
    reduce_packed,
    span_sum,
    sub_subspaces,
    subspace_distance,
)


def _subspace(vectors, n=6, q=2):
    codes = canonical_codes(q, n, vectors)
    return Subspace(q, n, codes)


class TestFieldOrder:
    def test_primes_accepted(self):
        assert field_order(2).packed
        assert not field_order(3).packed

    @pytest.mark.parametrize("q", [0, 1, 4, 9, 2.5])
    def test_non_primes_rejected(self, q):
        with pytest.raises(FieldError):
            field_order(q)

    def test_floats_not_truncated(self):
        assert field_order(3).q == 3
        for q in (3.0, 3.7, 2.0):
            with pytest.raises(FieldError):
                field_order(q)

    def test_numpy_integers_normalized(self):
        order = field_order(np.int64(5))
        assert order.q == 5 and type(order.q) is int


class TestDecode:
    def test_table_entry_already_canonical(self):
        assert decode_tuple([7, 32, 64], 7).codes == (7, 32, 64)

    def test_table_entry_reduced(self):
        # 83 and 72 share the top row; 83 ^ 72 = 27 takes pivot row 4
        S = decode_tuple([83, 72, 32], 7)
        assert S.codes == (27, 32, 72)
        assert encode_tuple(S) == (27, 32, 72)
        assert str(S) == "[27,32,72]"

    def test_same_span_same_encoding(self):
        assert decode_tuple([1, 2], 4) == decode_tuple([3, 2], 4) == decode_tuple([1, 3], 4)

    def test_out_of_range(self):
        with pytest.raises(EncodingRangeError):
            decode_tuple([128], 7)

    def test_degenerate(self):
        with pytest.raises(DegenerateBlockError):
            decode_tuple([1, 2, 3], 4)
        with pytest.raises(DegenerateBlockError):
            decode_tuple([], 4)

    def test_empty_basis(self):
        with pytest.raises(DegenerateBlockError):
            canonicalize(FqMatrix(2, 4, ()))

    def test_ternary_scaling(self):
        # (2, 2) and (1, 1) span the same line of F_3^2
        assert decode_tuple([8], 2, q=3).codes == (4,)
        assert decode_tuple([1, 3], 2, q=3).codes == (1, 3)

    @given(f2_vectors())
    def test_canonical_form_idempotent(self, vectors):
        codes = canonical_codes(2, 6, vectors)
        assert canonical_codes(2, 6, codes) == codes
        assert list(codes) == sorted(codes)

    @given(st.lists(st.integers(1, 26), min_size=1, max_size=3))
    def test_ternary_idempotent(self, vectors):
        codes = canonical_codes(3, 3, vectors)
        assert canonical_codes(3, 3, codes) == codes


class TestMatrices:
    def test_identity_and_power(self):
        g = FqMatrix.from_rows(2, [[0, 1, 1, 0], [1, 1, 1, 1], [0, 0, 0, 1], [0, 0, 1, 0]])
        assert FqMatrix.identity(2, 4).is_identity()
        assert g.power(6).is_identity()
        assert not g.power(3).is_identity()
        assert (g @ g.inverse()).is_identity()

    def test_from_rows_reduces_entries(self):
        m = FqMatrix.from_rows(3, [[4, 5], [0, 1]])
        assert m.to_rows() == [[1, 2], [0, 1]]

    def test_apply_matches_array(self):
        g = FqMatrix.from_rows(3, [[1, 2, 0], [0, 1, 1], [1, 0, 1]])
        v = 1 + 2 * 3 + 1 * 9
        expected = (g.array @ np.array([1, 2, 1])) % 3
        assert g.apply(v) == int(expected[0] + 3 * expected[1] + 9 * expected[2])

    def test_singular(self):
        m = FqMatrix.from_rows(2, [[1, 1], [1, 1]])
        assert not m.is_invertible()
        with pytest.raises(FieldError):
            m.inverse()

    def test_shape_mismatch(self):
        with pytest.raises(FieldError):
            FqMatrix.identity(2, 3) @ FqMatrix.identity(2, 4)


class TestSubspaceOperations:
    def test_contains(self):
        K = decode_tuple([1, 2, 4], 4)
        assert contains(decode_tuple([3], 4), K)
        assert not contains(decode_tuple([8], 4), K)

    def test_intersection_of_planes(self):
        S, K = decode_tuple([1, 2, 4], 4), decode_tuple([1, 2, 8], 4)
        assert intersection(S, K) == decode_tuple([1, 2], 4)
        assert intersection_dim(S, K) == 2
        assert subspace_distance(S, K) == 2
        assert span_sum(S, K).k == 4

    def test_trivial_intersection(self):
        assert intersection(decode_tuple([1, 2], 4), decode_tuple([4, 8], 4)) is None

    def test_ternary_intersection(self):
        S, K = decode_tuple([1, 3], 3, q=3), decode_tuple([3, 9], 3, q=3)
        assert intersection(S, K) == decode_tuple([3], 3, q=3)

    def test_different_spaces(self):
        with pytest.raises(FieldError):
            intersection_dim(decode_tuple([1], 3), decode_tuple([1], 4))

    @given(f2_vectors(), f2_vectors(), f2_vectors())
    def test_distance_is_a_metric(self, a, b, c):
        S, T, U = _subspace(a), _subspace(b), _subspace(c)
        assert subspace_distance(S, S) == 0
        assert subspace_distance(S, T) == subspace_distance(T, S)
        assert subspace_distance(S, U) <= subspace_distance(S, T) + subspace_distance(T, U)

    @given(f2_vectors(), f2_vectors())
    def test_intersection_matches_dimension(self, a, b):
        S, T = _subspace(a), _subspace(b)
        meet = intersection(S, T)
        assert (0 if meet is None else meet.k) == intersection_dim(S, T)
        if meet is not None:
            assert contains(meet, S) and contains(meet, T)

    def test_sub_subspaces(self):
        K = decode_tuple([1, 2, 4], 5)
        lines = list(sub_subspaces(K, 2))
        assert len(lines) == 7
        assert len(set(lines)) == 7
        assert all(contains(L, K) for L in lines)


class TestEnumeration:
    @pytest.mark.parametrize("n,k,q,expected", [
        (4, 2, 2, 35), (6, 2, 2, 651), (6, 3, 2, 1395), (7, 3, 2, 11811), (3, 1, 3, 13), (4, 2, 3, 130),
    ])
    def test_gaussian_binomial(self, n, k, q, expected):
        assert gaussian_binomial(n, k, q) == expected

    def test_gaussian_binomial_outside_range(self):
        assert gaussian_binomial(3, 4) == 0
        assert gaussian_binomial(3, -1) == 0

    @pytest.mark.parametrize("q,n_max", [(2, 6), (3, 6)])
    def test_counts_equal_gaussian_binomials(self, q, n_max):
        for n in range(1, n_max + 1):
            for k in range(1, n + 1):
                assert sum(1 for _ in enumerate_subspaces(n, k, q)) == gaussian_binomial(n, k, q)

    def test_enumeration_is_canonical_and_ascending(self):
        subspaces = list(enumerate_subspaces(5, 2))
        assert subspaces == sorted(subspaces)
        assert all(canonical_codes(2, 5, S.codes) == S.codes for S in subspaces)

    @pytest.mark.parametrize("n,t,k,q", [(4, 1, 2, 2), (5, 2, 3, 2), (5, 1, 3, 2), (3, 1, 2, 3)])
    def test_blocks_through_each_subspace(self, n, t, k, q):
        blocks = list(enumerate_subspaces(n, k, q))
        for T in enumerate_subspaces(n, t, q):
            assert sum(contains(T, K) for K in blocks) == gaussian_binomial(n - t, k - t, q)

    def test_cap(self):
        with pytest.raises(CapExceededError) as info:
            list(enumerate_subspaces(7, 3, cap=1000))
        assert info.value.count == 11811


class TestPacked:
    @given(st.lists(st.lists(st.integers(0, 255), min_size=3, max_size=3), min_size=1, max_size=20))
    def test_reduce_packed_matches_scalar(self, rows):
        reduced = reduce_packed(np.array(rows, dtype=np.uint64))
        for row, out in zip(rows, reduced):
            codes = canonical_codes(2, 8, [v for v in row if v])
            assert tuple(int(x) for x in out if x) == codes
        assert list(packed_rank(np.array(rows, dtype=np.uint64))) == [
            len(canonical_codes(2, 8, [v for v in row if v])) for row in rows]

    def test_pack_keys(self):
        keys = pack_keys(np.array([[1, 2], [3, 4]], dtype=np.uint64), 4)
        assert keys.tolist() == [1 | (2 << 4), 3 | (4 << 4)]
