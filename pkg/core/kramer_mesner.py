"""
Kramer-Mesner Matrices - plain and orbit-reduced incidence matrices, the
fusion of subgroup matrices and the translation of solutions down a
subgroup chain
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Iterable, Optional, Sequence, Tuple

import numpy as np

from config.settings import DEFAULT_THREADS, ENUMERATION_CAP
from core.errors import ConsistencyError, FieldError, SolutionError
from core.gfmat import Subspace, enumerate_subspaces, gaussian_binomial, sub_subspaces
from core.orbits import FusionMap, GroupGens, OrbitPartition, orbit_partition

logger = logging.getLogger(__name__)

ENTRY_DTYPE = np.uint16


@dataclass(eq=False)
class IncidenceMatrix:
    """Incidence (or Kramer-Mesner) matrix between t-orbits and k-orbits"""

    q: int
    n: int
    t: int
    k: int
    row_orbits: Tuple[Subspace, ...]
    col_orbits: Tuple[Subspace, ...]
    entries: np.ndarray
    row_weights: np.ndarray
    col_weights: np.ndarray
    group: Optional[GroupGens] = field(default=None, repr=False)

    @property
    def shape(self):
        return self.entries.shape

    @property
    def is_plain(self):
        return bool((self.col_weights == 1).all() and (self.row_weights == 1).all())

    @cached_property
    def col_index(self):
        return {S.codes: j for j, S in enumerate(self.col_orbits)}

    @cached_property
    def row_index(self):
        return {S.codes: i for i, S in enumerate(self.row_orbits)}

    def double_counting_defects(self):
        """Columns where sum_T |G(T)| a[T][K] != |G(K)| [k t]_q"""
        lhs = self.row_weights.astype(np.int64) @ self.entries.astype(np.int64)
        rhs = self.col_weights.astype(np.int64) * gaussian_binomial(self.k, self.t, self.q)
        return np.flatnonzero(lhs != rhs)


def _check_dims(n, t, k):
    if not 1 <= t < k <= n:
        raise FieldError(f"need 1 <= t < k <= n, got t={t} k={k} n={n}")


def plain_matrix(n, t, k, q=2, cap=ENUMERATION_CAP) -> IncidenceMatrix:
    """a[T][K] = 1 iff T is contained in K"""
    _check_dims(n, t, k)
    rows = tuple(enumerate_subspaces(n, t, q, cap=cap))
    cols = tuple(enumerate_subspaces(n, k, q, cap=cap))
    row_index = {T.codes: i for i, T in enumerate(rows)}
    entries = np.zeros((len(rows), len(cols)), dtype=ENTRY_DTYPE)
    for j, K in enumerate(cols):
        for T in sub_subspaces(K, t):
            entries[row_index[T.codes], j] = 1
    logger.info("plain matrix A_{%d,%d} over F_%d^%d: %dx%d", t, k, q, n, *entries.shape)
    return IncidenceMatrix(q, n, t, k, rows, cols, entries,
                           np.ones(len(rows), dtype=np.int64), np.ones(len(cols), dtype=np.int64))


def reduced_matrix(gens: GroupGens, t, k, rows: Optional[OrbitPartition] = None,
                   cols: Optional[OrbitPartition] = None, threads=DEFAULT_THREADS,
                   cap=ENUMERATION_CAP) -> IncidenceMatrix:
    """Kramer-Mesner matrix A^G_{t,k} from the orbit-to-orbit incidence counts"""
    _check_dims(gens.n, t, k)
    rows = rows or orbit_partition(gens, t, cap=cap)
    cols = cols or orbit_partition(gens, k, cap=cap)
    row_of = rows.index
    row_sizes = np.array(rows.sizes, dtype=np.int64)

    def column_counts(orbit):
        counts = Counter()
        for K in orbit.elements():
            for T in sub_subspaces(K, t):
                counts[row_of[T.codes]] += 1
        return counts

    incidences = np.zeros((len(rows), len(cols)), dtype=np.int64)
    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        for j, counts in enumerate(pool.map(column_counts, cols.orbits)):
            for i, count in counts.items():
                incidences[i, j] = count

    remainder = incidences % row_sizes[:, None]
    if remainder.any():
        i, j = np.argwhere(remainder)[0]
        raise ConsistencyError(
            f"incidence count {incidences[i, j]} between t-orbit {rows.orbits[i].representative} "
            f"and k-orbit {cols.orbits[j].representative} is not divisible by {row_sizes[i]}")
    entries = (incidences // row_sizes[:, None]).astype(ENTRY_DTYPE)
    logger.info("Kramer-Mesner matrix for %s: %dx%d", gens.label, *entries.shape)
    return IncidenceMatrix(gens.q, gens.n, t, k,
                           tuple(rows.representatives), tuple(cols.representatives), entries,
                           row_sizes, np.array(cols.sizes, dtype=np.int64), group=gens)


def _check_alignment(reps, partition: OrbitPartition, what):
    if [S.codes for S in reps] != [o.representative.codes for o in partition.orbits]:
        raise ConsistencyError(f"{what} of the matrix do not match the fusion map's orbits")


def intermediate_matrix(A_H: IncidenceMatrix, fmap_cols: FusionMap) -> IncidenceMatrix:
    """A': columns of A^H summed per G-orbit; rows still H-orbits"""
    _check_alignment(A_H.col_orbits, fmap_cols.fine, "columns")
    parts = fmap_cols.parts()
    summed = np.zeros((A_H.shape[0], len(parts)), dtype=np.int64)
    for j, part in enumerate(parts):
        summed[:, j] = A_H.entries[:, part].astype(np.int64).sum(axis=1)
    return IncidenceMatrix(A_H.q, A_H.n, A_H.t, A_H.k, A_H.row_orbits,
                           tuple(fmap_cols.coarse.representatives), summed.astype(ENTRY_DTYPE),
                           A_H.row_weights, np.array(fmap_cols.coarse.sizes, dtype=np.int64))


def fuse_matrix(A_H: IncidenceMatrix, fmap_cols: FusionMap, fmap_rows: FusionMap) -> IncidenceMatrix:
    """A^G from A^H: sum columns per part, keep one row per part"""
    _check_alignment(A_H.row_orbits, fmap_rows.fine, "rows")
    prime = intermediate_matrix(A_H, fmap_cols)
    row_parts = fmap_rows.parts()
    fused = np.zeros((len(row_parts), prime.shape[1]), dtype=ENTRY_DTYPE)
    for i, part in enumerate(row_parts):
        block = prime.entries[part]
        if not (block == block[0]).all():
            raise ConsistencyError(
                f"fusion violates incidence preservation: rows {part} of A' differ "
                f"inside G-orbit {fmap_rows.coarse.orbits[i].representative}")
        fused[i] = block[0]
    return IncidenceMatrix(A_H.q, A_H.n, A_H.t, A_H.k,
                           tuple(fmap_rows.coarse.representatives), prime.col_orbits, fused,
                           np.array(fmap_rows.coarse.sizes, dtype=np.int64), prime.col_weights,
                           group=fmap_cols.coarse.group)


# ---------------------------------------------------------------------------
# Solutions
# ---------------------------------------------------------------------------

def is_feasible(A: IncidenceMatrix, selected) -> bool:
    """A x <= 1 coordinatewise"""
    x = np.asarray(selected, dtype=np.int64)
    return bool(((A.entries.astype(np.int64) @ x) <= 1).all())


@dataclass(eq=False)
class Solution:
    matrix: IncidenceMatrix
    selected: np.ndarray

    def __post_init__(self):
        self.selected = np.asarray(self.selected, dtype=bool)
        if self.selected.shape != (self.matrix.shape[1],):
            raise SolutionError(f"solution has {self.selected.size} entries, matrix has {self.matrix.shape[1]} columns")

    @classmethod
    def empty(cls, matrix):
        return cls(matrix, np.zeros(matrix.shape[1], dtype=bool))

    @classmethod
    def from_columns(cls, matrix, columns: Iterable[int]):
        selected = np.zeros(matrix.shape[1], dtype=bool)
        selected[list(columns)] = True
        return cls(matrix, selected)

    @classmethod
    def from_bitstring(cls, matrix, bits: str):
        bits = bits.strip()
        if set(bits) - {"0", "1"}:
            raise SolutionError(f"solution string {bits!r} is not a 0-1 string")
        return cls(matrix, np.array([c == "1" for c in bits], dtype=bool))

    @property
    def weighted_size(self):
        return int(self.matrix.col_weights[self.selected].sum())

    @property
    def feasible(self):
        return is_feasible(self.matrix, self.selected)

    def columns(self):
        return [int(j) for j in np.flatnonzero(self.selected)]

    def representatives(self):
        return [self.matrix.col_orbits[j] for j in self.columns()]

    def to_bitstring(self):
        return "".join("1" if b else "0" for b in self.selected)

    def expand(self, gens: Optional[GroupGens] = None):
        """The design made of the selected orbits"""
        from core.designs import Design, expand

        gens = gens or self.matrix.group or GroupGens.trivial(self.matrix.q, self.matrix.n)
        reps = self.representatives()
        if not reps:
            return Design.empty(self.matrix.q, self.matrix.n, self.matrix.t, self.matrix.k)
        return expand(reps, gens, t=self.matrix.t)


def translate_solution(x: Solution, fmap: FusionMap, A_H: IncidenceMatrix) -> Solution:
    """y_i = x_j whenever H(L_i) lies in G(K_j); matched by orbit identity"""
    if not x.feasible:
        raise SolutionError("cannot translate an infeasible solution")
    chosen = set()
    for rep in x.representatives():
        j = fmap.coarse.rep_index.get(rep.codes)
        if j is None:
            raise ConsistencyError(f"selected orbit {rep} is not an orbit of the fusion map's coarse group")
        chosen.add(j)
    selected = np.zeros(A_H.shape[1], dtype=bool)
    for c, rep in enumerate(A_H.col_orbits):
        selected[c] = fmap.parent_of(rep) in chosen
    y = Solution(A_H, selected)
    if y.weighted_size != x.weighted_size:
        raise ConsistencyError(
            f"translated solution has size {y.weighted_size}, expected {x.weighted_size} "
            "(H-orbits of a selected G-orbit missing from the matrix)")
    if not y.feasible:
        raise ConsistencyError("translated solution is infeasible")
    return y


def admissible_columns(A: IncidenceMatrix) -> np.ndarray:
    """Columns whose entries are all <= 1"""
    if A.shape[0] == 0:
        return np.ones(A.shape[1], dtype=bool)
    return A.entries.max(axis=0) <= 1


def zoom_prune(fmap: FusionMap, mask_G) -> FrozenSet[int]:
    """Indices of H-orbits inside admissible G-orbits (excluded after a maximal G-solution)"""
    mask_G = np.asarray(mask_G, dtype=bool)
    return frozenset(i for i, j in enumerate(fmap.assignment) if mask_G[j])


def column_mask(A_H: IncidenceMatrix, fmap: FusionMap, excluded: FrozenSet[int]) -> np.ndarray:
    mask = np.zeros(A_H.shape[1], dtype=bool)
    for c, rep in enumerate(A_H.col_orbits):
        mask[c] = fmap.fine.rep_index[rep.codes] in excluded
    return mask


@dataclass(frozen=True)
class Modification:
    solution: Solution
    accepted: bool
    conflict_rows: Tuple[int, ...] = ()


def local_modify(y: Solution, remove: Iterable[int] = (), add: Iterable[int] = ()) -> Modification:
    """Delete and/or exchange selected columns; infeasible swaps are rejected, not raised"""
    remove, add = set(remove), set(add)
    not_selected = sorted(c for c in remove if not y.selected[c])
    if not_selected:
        raise SolutionError(f"columns {not_selected} are not selected and cannot be removed")
    selected = y.selected.copy()
    selected[list(remove)] = False
    selected[list(add)] = True
    cover = y.matrix.entries.astype(np.int64) @ selected.astype(np.int64)
    conflicts = tuple(int(i) for i in np.flatnonzero(cover > 1))
    if conflicts:
        logger.debug("local modification rejected: rows %s covered twice", conflicts)
        return Modification(y, False, conflicts)
    return Modification(Solution(y.matrix, selected), True)


def saturate(y: Solution, excluded: Optional[np.ndarray] = None) -> Solution:
    """Add every admissible, non-conflicting column in index order"""
    A = y.matrix
    cover = A.entries.astype(np.int64) @ y.selected.astype(np.int64)
    selected = y.selected.copy()
    candidates = admissible_columns(A) & ~selected
    if excluded is not None:
        candidates &= ~excluded
    for c in np.flatnonzero(candidates):
        column = A.entries[:, c]
        if not (cover[column > 0]).any():
            selected[c] = True
            cover += column
    return Solution(A, selected)
