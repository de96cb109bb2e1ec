"""
Designs - block sets expanded from orbit representatives, their validity
checks and bounds

Blocks are kept as an (N, k) array of canonical column codes (uint64 when
q**n fits, object otherwise), which keeps the multi-million block designs
in memory.
"""

import logging
from collections import defaultdict
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from config.settings import (
    CODE_DISTANCE_FULL_CHECK,
    CODE_DISTANCE_SAMPLE,
    DEFAULT_THREADS,
    PACKED_KEY_BITS,
    PAIRWISE_THRESHOLD,
    VIOLATION_CAP,
)
from core.errors import CapExceededError, ConsistencyError, FieldError, VerificationError
from core.gfmat import (
    Codes,
    Subspace,
    enumerate_subspaces,
    format_tuple,
    gaussian_binomial,
    intersection,
    pack_keys,
    packed_rank,
    rank_of_codes,
    reduce_packed,
    sub_subspaces,
)
from core.orbits import GroupGens, orbit_codes

logger = logging.getLogger(__name__)


def _code_dtype(q, n):
    return np.uint64 if q ** n <= 2 ** 63 else object


@dataclass(eq=False)
class Design:
    q: int
    n: int
    t: int
    k: int
    codes: np.ndarray = field(repr=False)

    @classmethod
    def empty(cls, q, n, t, k):
        return cls(q, n, t, k, np.zeros((0, k), dtype=_code_dtype(q, n)))

    @classmethod
    def from_blocks(cls, blocks: Iterable[Subspace], t=2):
        blocks = list(blocks)
        if not blocks:
            raise FieldError("a design needs at least one block to fix q, n and k")
        q, n, k = blocks[0].q, blocks[0].n, blocks[0].k
        for i, B in enumerate(blocks):
            if (B.q, B.n, B.k) != (q, n, k):
                raise FieldError(f"block {i + 1} {B} is not a {k}-subspace of F_{q}^{n}")
        return cls(q, n, t, k, np.array([B.codes for B in blocks], dtype=_code_dtype(q, n)))

    @property
    def size(self):
        return int(self.codes.shape[0])

    def __len__(self):
        return self.size

    @property
    def packed(self):
        return self.q == 2 and self.codes.dtype == np.uint64

    def block(self, i) -> Subspace:
        return Subspace(self.q, self.n, tuple(int(c) for c in self.codes[i]))

    def blocks(self) -> Iterator[Subspace]:
        for i in range(self.size):
            yield self.block(i)

    def subset(self, indices):
        return Design(self.q, self.n, self.t, self.k, self.codes[np.asarray(indices, dtype=np.int64)])


def expand(reps: Sequence[Subspace], gens: GroupGens, t=2) -> Design:
    """Union of the G-orbits of reps; reps in a common orbit are an error"""
    reps = list(reps)
    if not reps:
        raise FieldError("no representatives to expand")
    k = reps[0].k
    for i, R in enumerate(reps):
        if R.k != k or (R.q, R.n) != (gens.q, gens.n):
            raise FieldError(f"representative {i + 1} {R} does not match the group or dimension {k}")
    dtype = _code_dtype(gens.q, gens.n)
    chunks = []
    for i, R in enumerate(reps):
        members = orbit_codes(gens, R.codes)
        for j in range(i + 1, len(reps)):
            if reps[j].codes in members:
                raise ConsistencyError(
                    f"representatives {i + 1} {R} and {j + 1} {reps[j]} lie in the same orbit")
        chunks.append(np.array(sorted(members), dtype=dtype).reshape(len(members), k))
        logger.debug("orbit %d of %d: %d blocks", i + 1, len(reps), len(members))
    design = Design(gens.q, gens.n, t, k, np.concatenate(chunks))
    logger.info("expanded %d representatives under %s into %d blocks", len(reps), gens.label, design.size)
    return design


# ---------------------------------------------------------------------------
# Verification
# ---------------------------------------------------------------------------

@dataclass
class ValidityReport:
    valid: bool
    size: int
    covered: int
    violations: List[Tuple[Codes, Tuple[int, ...]]]
    violation_count: int
    duplicate_blocks: int = 0
    method: str = ""

    def summary_line(self):
        return (f"valid={'true' if self.valid else 'false'} size={self.size} "
                f"covered={self.covered} violations={self.violation_count}")

    def lines(self):
        out = [self.summary_line()]
        if self.duplicate_blocks:
            out.append(f"duplicate_blocks={self.duplicate_blocks}")
        for codes, blocks in self.violations:
            out.append(f"violation subspace=[{format_tuple(codes)}] blocks={','.join(str(b) for b in blocks)}")
        if self.violation_count > len(self.violations):
            out.append(f"... {self.violation_count - len(self.violations)} more violations")
        return out


def _duplicate_count(D: Design) -> int:
    if D.size == 0:
        return 0
    if D.codes.dtype == object:
        return D.size - len({tuple(row) for row in D.codes})
    return D.size - np.unique(D.codes, axis=0).shape[0]


def _pair_ranks(D: Design, i) -> np.ndarray:
    """dim(B_i + B_j) for every j > i"""
    rest = D.codes[i + 1:]
    if D.packed and 2 * D.k <= 64:
        head = np.broadcast_to(D.codes[i], rest.shape)
        return packed_rank(np.concatenate([head, rest], axis=1))
    head = tuple(int(c) for c in D.codes[i])
    return np.array([rank_of_codes(D.q, D.n, head + tuple(int(c) for c in row)) for row in rest], dtype=np.int64)


def verify_pairwise(D: Design, threshold=PAIRWISE_THRESHOLD, cap=VIOLATION_CAP) -> ValidityReport:
    """Every two blocks meet in dimension at most t-1"""
    if D.size > threshold:
        raise CapExceededError(f"{D.size} blocks exceed the pairwise threshold {threshold}; use coverage", D.size)
    shared: Dict[Codes, set] = defaultdict(set)
    for i in range(D.size - 1):
        meet = 2 * D.k - _pair_ranks(D, i)
        for j in np.flatnonzero(meet >= D.t) + i + 1:
            common = intersection(D.block(i), D.block(int(j)))
            for T in sub_subspaces(common, D.t):
                shared[T.codes].update((i, int(j)))
    duplicates = _duplicate_count(D)
    per_block = gaussian_binomial(D.k, D.t, D.q)
    covered = D.size * per_block - sum(len(blocks) - 1 for blocks in shared.values())
    return _report(D, covered, shared, duplicates, cap, "pairwise")


def _report(D, covered, shared, duplicates, cap, method):
    ordered = sorted(shared)
    violations = [(codes, tuple(sorted(shared[codes]))) for codes in ordered[:cap]]
    valid = not shared and not duplicates
    report = ValidityReport(valid, D.size, covered, violations, len(shared), duplicates, method)
    logger.info("%s verification: %s", method, report.summary_line())
    return report


def _local_coefficients(k, t):
    return [S.codes for S in enumerate_subspaces(k, t, 2)]


def _shard_keys(codes, n, local):
    """Packed keys of all t-subspaces of each block, shape (M, [k t])"""
    k = codes.shape[1]
    combos = {}
    for mask in range(1, 1 << k):
        low = mask & -mask
        j = low.bit_length() - 1
        rest = mask ^ low
        combos[mask] = codes[:, j] if not rest else combos[rest] ^ codes[:, j]
    keys = np.empty((codes.shape[0], len(local)), dtype=np.uint64)
    for col, coeffs in enumerate(local):
        vectors = np.stack([combos[c] for c in coeffs], axis=1)
        keys[:, col] = pack_keys(reduce_packed(vectors), n)
    return keys


def _coverage_keys(D: Design, threads):
    local = _local_coefficients(D.k, D.t)
    pieces = max(1, min(threads * 4, D.size // 50000 + 1))
    bounds = np.linspace(0, D.size, pieces + 1, dtype=np.int64)
    shards = [D.codes[bounds[i]:bounds[i + 1]] for i in range(pieces)]
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        parts = list(pool.map(lambda c: _shard_keys(c, D.n, local), shards))
    return np.concatenate(parts), local


def _unpack_key(key, n, t):
    mask = (1 << n) - 1
    return tuple((int(key) >> (n * j)) & mask for j in range(t))


def verify_coverage(D: Design, threads=DEFAULT_THREADS, cap=VIOLATION_CAP) -> ValidityReport:
    """No t-subspace lies in two blocks; also counts distinct covered t-subspaces"""
    duplicates = _duplicate_count(D)
    if D.size == 0:
        return ValidityReport(True, 0, 0, [], 0, 0, "coverage")
    if D.packed and D.t * D.n <= PACKED_KEY_BITS:
        keys, local = _coverage_keys(D, threads)
        flat = keys.reshape(-1).copy()
        flat.sort()
        repeated = flat[1:] == flat[:-1]
        covered = int(flat.size - np.count_nonzero(repeated))
        shared = {}
        if repeated.any():
            bad = np.unique(flat[1:][repeated])
            positions = np.flatnonzero(np.isin(keys.reshape(-1), bad))
            for pos in positions:
                block, _ = divmod(int(pos), len(local))
                codes = _unpack_key(keys.reshape(-1)[pos], D.n, D.t)
                shared.setdefault(codes, set()).add(block)
        return _report(D, covered, shared, duplicates, cap, "coverage")

    seen: Dict[Codes, List[int]] = defaultdict(list)
    for i, B in enumerate(D.blocks()):
        for T in sub_subspaces(B, D.t):
            seen[T.codes].append(i)
    shared = {codes: set(blocks) for codes, blocks in seen.items() if len(blocks) > 1}
    return _report(D, len(seen), shared, duplicates, cap, "coverage")


def verify(D: Design, threshold=PAIRWISE_THRESHOLD, threads=DEFAULT_THREADS) -> ValidityReport:
    if D.size <= threshold:
        return verify_pairwise(D, threshold)
    return verify_coverage(D, threads)


# ---------------------------------------------------------------------------
# Bounds and the subspace code view
# ---------------------------------------------------------------------------

def packing_bound(n, t, k, q=2) -> int:
    """floor([n t]_q / [k t]_q)"""
    return gaussian_binomial(n, t, q) // gaussian_binomial(k, t, q)


def is_steiner(D: Design, report: Optional[ValidityReport] = None) -> bool:
    """Valid and covering every t-subspace exactly once"""
    report = report or verify_coverage(D)
    if not report.valid:
        raise VerificationError(f"design is not a packing: {report.summary_line()}")
    return report.covered == gaussian_binomial(D.n, D.t, D.q)


def steiner_bound_attained(D: Design, report: Optional[ValidityReport] = None) -> bool:
    return is_steiner(D, report) and D.size == packing_bound(D.n, D.t, D.k, D.q)


def ns_order(n, q=2) -> int:
    """Order of the normalizer of a Singer cycle, n (q**n - 1)"""
    return n * (q ** n - 1)


@dataclass(frozen=True)
class CodeParameters:
    n: int
    k: int
    d: int
    s: int
    q: int
    min_distance: Optional[int] = None
    exhaustive: bool = True

    def __str__(self):
        return f"[{self.n},{self.k},{self.d},{self.s}]_{self.q}"


def code_parameters(D: Design, report: Optional[ValidityReport] = None,
                    full_check=CODE_DISTANCE_FULL_CHECK, sample=CODE_DISTANCE_SAMPLE, seed=0) -> CodeParameters:
    """[n, k, d, s]_q of the design read as a constant-dimension code"""
    report = report or verify(D)
    if not report.valid:
        raise VerificationError(f"design is not a packing: {report.summary_line()}")
    d = 2 * (D.k - D.t + 1)
    if D.size < 2:
        return CodeParameters(D.n, D.k, d, D.size, D.q)
    if D.size <= full_check:
        best = min(int(_pair_ranks(D, i).min()) for i in range(D.size - 1))
        exhaustive = True
    else:
        rng = np.random.default_rng(seed)
        first = rng.integers(0, D.size, sample)
        second = rng.integers(0, D.size, sample)
        keep = first != second
        best = None
        for i, j in zip(first[keep], second[keep]):
            rank = rank_of_codes(D.q, D.n, D.block(int(i)).codes + D.block(int(j)).codes)
            best = rank if best is None else min(best, rank)
        exhaustive = False
    min_distance = 2 * best - 2 * D.k
    if min_distance < d:
        raise VerificationError(f"minimum distance {min_distance} below {d}")
    return CodeParameters(D.n, D.k, d, D.size, D.q, min_distance, exhaustive)
