"""
GF(q) Matrices - prime-field linear algebra, canonical subspaces and the
integer-tuple subspace encoding

A vector of F_q^n is stored as the integer sum(x_i * q**i), row 0 being the
least significant digit. For q = 2 this is a plain bitmask and all linear
algebra runs on Python ints (one word per column); other primes go through
galois field arrays. Both paths produce the same canonical form: reduced
column echelon with the pivot of every column at its highest nonzero row,
pivot entries 1, zeros at the other columns' pivot rows, columns sorted by
encoding.
"""

import itertools
from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Callable, Iterator, Optional, Sequence, Tuple

import galois
import numpy as np

from config.settings import ENUMERATION_CAP, IMAGE_TABLE_MAX_DIM
from core.errors import (
    CapExceededError,
    DegenerateBlockError,
    EncodingRangeError,
    FieldError,
)

Codes = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Field order
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FieldOrder:
    """Order of a prime field; q = 2 selects the bit-packed path"""

    q: int

    def __post_init__(self):
        if not isinstance(self.q, (int, np.integer)) or self.q < 2 or not galois.is_prime(int(self.q)):
            raise FieldError(f"field order {self.q!r} is not a prime")
        object.__setattr__(self, "q", int(self.q))

    @property
    def packed(self):
        return self.q == 2

    @property
    def field(self):
        return _prime_field(self.q)


@lru_cache(maxsize=None, typed=True)
def field_order(q):
    """Validated, cached FieldOrder for q"""
    return FieldOrder(q)


@lru_cache(maxsize=None)
def _prime_field(q):
    return galois.GF(q)


def int_to_digits(x, n, q):
    """Base-q digits of x, least significant (row 0) first"""
    if q == 2:
        return [(x >> i) & 1 for i in range(n)]
    digits = []
    for _ in range(n):
        x, d = divmod(x, q)
        digits.append(d)
    return digits


def digits_to_int(digits, q):
    value = 0
    for d in reversed(list(digits)):
        value = value * q + int(d)
    return value


# ---------------------------------------------------------------------------
# GF(2) primitives on ints
# ---------------------------------------------------------------------------

def _gf2_reduce(vectors):
    """Reduced echelon basis of the span of bitmask vectors, ascending"""
    basis = []  # kept in descending order
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis = [min(b, b ^ v) for b in basis]
            basis.append(v)
            basis.sort(reverse=True)
    basis.reverse()
    return tuple(basis)


def _gf2_in_span(v, ascending_basis):
    for b in reversed(ascending_basis):
        v = min(v, v ^ b)
    return v == 0


def _gf2_apply(cols, v):
    result = 0
    i = 0
    while v:
        if v & 1:
            result ^= cols[i]
        v >>= 1
        i += 1
    return result


# ---------------------------------------------------------------------------
# Generic prime path (galois)
# ---------------------------------------------------------------------------

def _generic_reduce(q, n, codes):
    if not codes:
        return ()
    GF = _prime_field(q)
    # Coordinates reversed so that row reduction pivots on the highest row.
    rows = np.array([int_to_digits(c, n, q)[::-1] for c in codes], dtype=np.int64)
    reduced = np.asarray(GF(rows).row_reduce())
    result = [digits_to_int(row[::-1], q) for row in reduced if row.any()]
    return tuple(sorted(result))


def canonical_codes(q, n, codes):
    """Canonical encoding of span(codes); dependent columns dropped"""
    if q == 2:
        return _gf2_reduce(codes)
    return _generic_reduce(q, n, codes)


def rank_of_codes(q, n, codes):
    return len(canonical_codes(q, n, codes))


# ---------------------------------------------------------------------------
# Matrices
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FqMatrix:
    """Matrix over F_q stored by packed columns (column j = sum a_ij q**i)"""

    q: int
    rows: int
    cols: Codes

    @classmethod
    def from_rows(cls, q, rows):
        field_order(q)
        rows = [[int(x) % q for x in row] for row in rows]
        if not rows:
            raise FieldError("matrix has no rows")
        width = len(rows[0])
        if any(len(row) != width for row in rows):
            raise FieldError("ragged matrix rows")
        cols = tuple(digits_to_int([row[j] for row in rows], q) for j in range(width))
        return cls(q, len(rows), cols)

    @classmethod
    def from_array(cls, q, array):
        return cls.from_rows(q, np.asarray(array, dtype=np.int64).tolist())

    @classmethod
    def identity(cls, q, n):
        return cls(q, n, tuple(q ** i for i in range(n)))

    @property
    def ncols(self):
        return len(self.cols)

    @property
    def shape(self):
        return (self.rows, self.ncols)

    @cached_property
    def array(self):
        """Entries as an int64 array indexed (row, col)"""
        out = np.zeros((self.rows, self.ncols), dtype=np.int64)
        for j, c in enumerate(self.cols):
            out[:, j] = int_to_digits(c, self.rows, self.q)
        return out

    def to_rows(self):
        return self.array.tolist()

    @cached_property
    def image_table(self):
        """g*v for every v in F_2^n (q = 2, small n only)"""
        if self.q != 2 or self.rows != self.ncols or self.rows > IMAGE_TABLE_MAX_DIM:
            return None
        table = np.zeros(1 << self.ncols, dtype=np.int64)
        for i, c in enumerate(self.cols):
            table[1 << i: 1 << (i + 1)] = table[:1 << i] ^ c
        return table.tolist()

    def apply(self, v):
        """Matrix-vector product on an encoded vector"""
        if self.q == 2:
            table = self.image_table
            if table is not None:
                return table[v]
            return _gf2_apply(self.cols, v)
        GF = _prime_field(self.q)
        vec = GF(np.array(int_to_digits(v, self.ncols, self.q), dtype=np.int64))
        return digits_to_int(np.asarray(GF(self.array) @ vec), self.q)

    def vector_map(self) -> Callable[[int], int]:
        if self.q == 2:
            table = self.image_table
            if table is not None:
                return table.__getitem__
            cols = self.cols
            return lambda v: _gf2_apply(cols, v)
        return self.apply

    def __matmul__(self, other):
        if not isinstance(other, FqMatrix):
            return NotImplemented
        if self.q != other.q or self.ncols != other.rows:
            raise FieldError(f"cannot multiply {self.shape} by {other.shape} over different shapes or fields")
        if self.q == 2:
            return FqMatrix(2, self.rows, tuple(self.apply(c) for c in other.cols))
        GF = _prime_field(self.q)
        return FqMatrix.from_array(self.q, np.asarray(GF(self.array) @ GF(other.array)))

    def power(self, exponent):
        result = FqMatrix.identity(self.q, self.rows)
        base = self
        while exponent:
            if exponent & 1:
                result = base @ result
            base = base @ base
            exponent >>= 1
        return result

    def rank(self):
        return rank_of_codes(self.q, self.rows, self.cols)

    def is_square(self):
        return self.rows == self.ncols

    def is_invertible(self):
        return self.is_square() and self.rank() == self.rows

    def is_identity(self):
        return self == FqMatrix.identity(self.q, self.rows)

    def inverse(self):
        if not self.is_invertible():
            raise FieldError(f"{self.shape} matrix is not invertible")
        GF = _prime_field(self.q)
        return FqMatrix.from_array(self.q, np.asarray(np.linalg.inv(GF(self.array))))

    def __str__(self):
        return "\n".join(" ".join(str(x) for x in row) for row in self.to_rows())


# ---------------------------------------------------------------------------
# Subspaces
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Subspace:
    """A k-subspace of F_q^n held by its canonical encoding

    Build instances through canonicalize/decode_tuple; the constructor trusts
    that codes are already canonical.
    """

    q: int
    n: int
    codes: Codes

    @property
    def k(self):
        return len(self.codes)

    @property
    def encoding(self):
        return self.codes

    @cached_property
    def basis(self):
        return FqMatrix(self.q, self.n, self.codes)

    def __str__(self):
        return "[" + format_tuple(self.codes) + "]"


def format_tuple(codes):
    return ",".join(str(c) for c in codes)


def _check_same_space(S, K):
    if S.q != K.q or S.n != K.n:
        raise FieldError(f"subspaces live in different spaces: F_{S.q}^{S.n} vs F_{K.q}^{K.n}")


def canonicalize(raw_basis: FqMatrix) -> Subspace:
    """Canonical subspace spanned by the columns of raw_basis"""
    field_order(raw_basis.q)
    if raw_basis.ncols < 1:
        raise DegenerateBlockError("empty subspace not representable as a block")
    codes = canonical_codes(raw_basis.q, raw_basis.rows, raw_basis.cols)
    if not codes:
        raise DegenerateBlockError("empty subspace not representable as a block")
    return Subspace(raw_basis.q, raw_basis.rows, codes)


def decode_tuple(ints: Sequence[int], n, q=2) -> Subspace:
    """Subspace spanned by the integer-encoded columns ints (all independent)"""
    field_order(q)
    ints = tuple(int(x) for x in ints)
    if not ints:
        raise DegenerateBlockError("empty tuple does not describe a block")
    limit = q ** n
    for x in ints:
        if x < 0 or x >= limit:
            raise EncodingRangeError(f"{x} out of range for F_{q}^{n} (must be < {limit})")
    codes = canonical_codes(q, n, ints)
    if len(codes) < len(ints):
        raise DegenerateBlockError(f"degenerate block [{format_tuple(ints)}]: columns are dependent")
    return Subspace(q, n, codes)


def encode_tuple(S: Subspace) -> Codes:
    return S.codes


def contains(T: Subspace, K: Subspace) -> bool:
    """True iff T is a subspace of K"""
    _check_same_space(T, K)
    if T.k > K.k:
        return False
    if T.q == 2:
        return all(_gf2_in_span(v, K.codes) for v in T.codes)
    return rank_of_codes(K.q, K.n, K.codes + T.codes) == K.k


def intersection_dim(S: Subspace, K: Subspace) -> int:
    _check_same_space(S, K)
    return S.k + K.k - rank_of_codes(S.q, S.n, S.codes + K.codes)


def subspace_distance(S: Subspace, K: Subspace) -> int:
    return S.k + K.k - 2 * intersection_dim(S, K)


def span_sum(S: Subspace, K: Subspace) -> Subspace:
    _check_same_space(S, K)
    return Subspace(S.q, S.n, canonical_codes(S.q, S.n, S.codes + K.codes))


def intersection(S: Subspace, K: Subspace) -> Optional[Subspace]:
    """S ∩ K, or None when the intersection is the zero space"""
    _check_same_space(S, K)
    n, q = S.n, S.q
    if q == 2:
        # Zassenhaus: [u|u] for u in S, [w|0] for w in K; the rows whose
        # left half vanishes span the intersection.
        stacked = [(u << n) | u for u in S.codes] + [w << n for w in K.codes]
        codes = tuple(v for v in _gf2_reduce(stacked) if v < (1 << n))
    else:
        GF = _prime_field(q)
        system = np.concatenate([S.basis.array, (-K.basis.array) % q], axis=1)
        kernel = np.asarray(GF(system).null_space())
        if kernel.size == 0:
            return None
        coeffs = GF(kernel[:, :S.k].T % q)
        vectors = np.asarray(GF(S.basis.array) @ coeffs)
        codes = canonical_codes(q, n, tuple(digits_to_int(vectors[:, j], q) for j in range(vectors.shape[1])))
    if not codes:
        return None
    return Subspace(q, n, codes)


def sub_subspaces(K: Subspace, t) -> Iterator[Subspace]:
    """All t-subspaces of K, in the enumeration order of F_q^k"""
    if t == K.k:
        yield K
        return
    for local in enumerate_subspaces(K.k, t, K.q):
        images = tuple(K.basis.apply(c) for c in local.codes)
        yield Subspace(K.q, K.n, canonical_codes(K.q, K.n, images))


# ---------------------------------------------------------------------------
# Counting and enumeration
# ---------------------------------------------------------------------------

def gaussian_binomial(n, k, q=2) -> int:
    """Number of k-subspaces of F_q^n; 0 when k > n or k < 0"""
    if k < 0 or k > n:
        return 0
    numerator = 1
    denominator = 1
    for i in range(k):
        numerator *= q ** (n - i) - 1
        denominator *= q ** (i + 1) - 1
    return numerator // denominator


def _echelon_columns(q, pivot, taken):
    free = [r for r in range(pivot) if r not in taken]
    lead = q ** pivot
    weights = [q ** r for r in reversed(free)]
    for digits in itertools.product(range(q), repeat=len(free)):
        yield lead + sum(d * w for d, w in zip(digits, weights))


def _echelon_codes(n, k, q, prefix=(), taken=frozenset(), start=0):
    if len(prefix) == k:
        yield prefix
        return
    remaining = k - len(prefix)
    for pivot in range(start, n - remaining + 1):
        for column in _echelon_columns(q, pivot, taken):
            yield from _echelon_codes(n, k, q, prefix + (column,), taken | {pivot}, pivot + 1)


def enumerate_subspaces(n, k, q=2, cap=ENUMERATION_CAP) -> Iterator[Subspace]:
    """Every k-subspace of F_q^n once, ascending by encoding"""
    field_order(q)
    if k < 1 or k > n:
        raise FieldError(f"dimension k={k} outside 1..{n}")
    count = gaussian_binomial(n, k, q)
    if count > cap:
        raise CapExceededError(f"{count} subspaces of dimension {k} in F_{q}^{n} exceed the enumeration cap {cap}", count)
    for codes in _echelon_codes(n, k, q):
        yield Subspace(q, n, codes)


# ---------------------------------------------------------------------------
# Vectorised GF(2) helpers for many small bases at once
# ---------------------------------------------------------------------------

_SHIFTS = tuple(np.uint64(s) for s in (1, 2, 4, 8, 16, 32))
_ONE = np.uint64(1)
_ZERO = np.uint64(0)


def _highest_bit(x):
    x = x.copy()
    for s in _SHIFTS:
        x |= x >> s
    return x ^ (x >> _ONE)


def reduce_packed(vectors):
    """Row-wise canonical GF(2) bases of an (N, m) array of bitmask vectors

    Each output row is sorted ascending; dependent slots come out as 0 and
    therefore lead the row.
    """
    basis = np.array(vectors, dtype=np.uint64, copy=True)
    if basis.ndim != 2:
        raise FieldError("reduce_packed expects a 2-d array")
    count, width = basis.shape
    rows = np.arange(count)
    for i in range(width):
        j = i + np.argmax(basis[:, i:], axis=1)
        pivot = basis[rows, j].copy()
        basis[rows, j] = basis[:, i]
        basis[:, i] = pivot
        top = _highest_bit(pivot)
        for col in range(width):
            if col == i:
                continue
            hit = (basis[:, col] & top) != _ZERO
            basis[:, col] ^= np.where(hit, pivot, _ZERO)
    basis.sort(axis=1)
    return basis


def packed_rank(vectors):
    return np.count_nonzero(reduce_packed(vectors), axis=1)


def pack_keys(codes, n):
    """One uint64 key per row: sum codes[:, j] << (n*j); needs width*n <= 64"""
    codes = np.asarray(codes, dtype=np.uint64)
    keys = np.zeros(codes.shape[0], dtype=np.uint64)
    for j in range(codes.shape[1]):
        keys |= codes[:, j] << np.uint64(n * j)
    return keys
