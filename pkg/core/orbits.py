"""
Orbits - finite matrix groups and their action on Grassmannians

Orbits are always expanded by breadth-first search over the generators, so
an orbit never needs the full group. The closure is only built when a group
order, a membership test or a subgroup is requested.
"""

import logging
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, FrozenSet, Iterator, List, Optional, Tuple

from config.settings import ENUMERATION_CAP, ORDER_CAP
from core.errors import CapExceededError, ConsistencyError, FieldError, GroupError
from core.gfmat import (
    Codes,
    FqMatrix,
    Subspace,
    canonical_codes,
    enumerate_subspaces,
    field_order,
    gaussian_binomial,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GroupGens:
    """Generators of a subgroup of GL(n, q)"""

    q: int
    n: int
    generators: Tuple[FqMatrix, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        field_order(self.q)
        for i, g in enumerate(self.generators):
            if g.q != self.q or g.shape != (self.n, self.n):
                raise FieldError(f"generator {i + 1} of {self.label} is not a {self.n}x{self.n} matrix over F_{self.q}")
            if not g.is_invertible():
                raise FieldError(f"generator {i + 1} of {self.label} is singular")

    @classmethod
    def trivial(cls, q, n):
        return cls(q, n, (FqMatrix.identity(q, n),), name="1")

    @property
    def identity(self):
        return FqMatrix.identity(self.q, self.n)

    @property
    def label(self):
        return self.name or f"<{len(self.generators)} generators>"

    def is_trivial(self):
        return all(g.is_identity() for g in self.generators)


@dataclass(frozen=True)
class GroupClosure:
    """All elements of a finite matrix group, identity first, BFS order"""

    gens: GroupGens
    elements: Tuple[FqMatrix, ...]

    @property
    def order(self):
        return len(self.elements)

    @cached_property
    def _members(self):
        return frozenset(self.elements)

    def __contains__(self, g):
        return g in self._members


@lru_cache(maxsize=16)
def close_group(gens: GroupGens, order_cap=ORDER_CAP) -> GroupClosure:
    """Breadth-first closure of gens under left multiplication"""
    identity = gens.identity
    seen = {identity}
    elements = [identity]
    frontier = [identity]
    while frontier:
        next_frontier = []
        for h in frontier:
            for g in gens.generators:
                x = g @ h
                if x not in seen:
                    seen.add(x)
                    elements.append(x)
                    next_frontier.append(x)
                    if len(elements) > order_cap:
                        raise CapExceededError(
                            f"closure of {gens.label} exceeds the order cap {order_cap} "
                            f"({len(elements)} elements reached)", len(elements))
        frontier = next_frontier
    logger.info("group %s has order %d", gens.label, len(elements))
    return GroupClosure(gens, tuple(elements))


def is_member(closure: GroupClosure, g: FqMatrix) -> bool:
    return g in closure


def element_order(g: FqMatrix, limit=ORDER_CAP) -> int:
    identity = FqMatrix.identity(g.q, g.rows)
    x = g
    order = 1
    while x != identity:
        x = g @ x
        order += 1
        if order > limit:
            raise CapExceededError(f"element order exceeds {limit}", order)
    return order


def cyclic_subgroup_of_order(closure: GroupClosure, m) -> GroupGens:
    """Generator of the first cyclic subgroup of order m in closure order"""
    gens = closure.gens
    if m == 1:
        return GroupGens.trivial(gens.q, gens.n)
    if closure.order % m:
        raise GroupError(f"{m} does not divide the group order {closure.order}")
    for g in closure.elements:
        if element_order(g, limit=closure.order) == m:
            logger.info("found element of order %d in %s", m, gens.label)
            return GroupGens(gens.q, gens.n, (g,), name=f"{gens.label}[{m}]")
    raise GroupError(f"{gens.label} has no element of order {m}")


# ---------------------------------------------------------------------------
# Action and orbits
# ---------------------------------------------------------------------------

def act(g: FqMatrix, K: Subspace) -> Subspace:
    """gK as a canonical subspace"""
    if g.q != K.q or g.shape != (K.n, K.n):
        raise FieldError(f"cannot apply a {g.shape} matrix to a subspace of F_{K.q}^{K.n}")
    images = tuple(g.apply(c) for c in K.codes)
    return Subspace(K.q, K.n, canonical_codes(K.q, K.n, images))


@dataclass(frozen=True)
class Orbit:
    representative: Subspace
    size: int
    members: Optional[FrozenSet[Codes]] = field(default=None, compare=False, repr=False)

    def elements(self) -> Iterator[Subspace]:
        if self.members is None:
            raise ConsistencyError(f"orbit of {self.representative} was not materialised")
        rep = self.representative
        for codes in sorted(self.members):
            yield Subspace(rep.q, rep.n, codes)

    def __contains__(self, S):
        codes = S.codes if isinstance(S, Subspace) else tuple(S)
        return self.members is not None and codes in self.members


def orbit_codes(gens: GroupGens, start: Codes) -> set:
    """Set of canonical codes of the orbit of start"""
    q, n = gens.q, gens.n
    mappers = [g.vector_map() for g in gens.generators if not g.is_identity()]
    seen = {start}
    frontier = [start]
    while frontier:
        next_frontier = []
        for codes in frontier:
            for image_of in mappers:
                image = canonical_codes(q, n, [image_of(c) for c in codes])
                if image not in seen:
                    seen.add(image)
                    next_frontier.append(image)
        frontier = next_frontier
    return seen


def orbit_of(gens: GroupGens, K: Subspace, materialize=True) -> Orbit:
    if K.q != gens.q or K.n != gens.n:
        raise FieldError(f"subspace of F_{K.q}^{K.n} under a group on F_{gens.q}^{gens.n}")
    members = orbit_codes(gens, K.codes)
    rep = Subspace(K.q, K.n, min(members))
    return Orbit(rep, len(members), frozenset(members) if materialize else None)


@dataclass(frozen=True)
class OrbitPartition:
    group: GroupGens
    dim: int
    orbits: Tuple[Orbit, ...]

    def __len__(self):
        return len(self.orbits)

    @cached_property
    def index(self) -> Dict[Codes, int]:
        """Canonical codes of every subspace -> orbit index"""
        table = {}
        for i, orbit in enumerate(self.orbits):
            for codes in orbit.members:
                table[codes] = i
        return table

    @cached_property
    def rep_index(self) -> Dict[Codes, int]:
        return {orbit.representative.codes: i for i, orbit in enumerate(self.orbits)}

    def orbit_index(self, S) -> int:
        codes = S.codes if isinstance(S, Subspace) else tuple(S)
        return self.index[codes]

    @property
    def sizes(self):
        return [orbit.size for orbit in self.orbits]

    @property
    def representatives(self):
        return [orbit.representative for orbit in self.orbits]


def orbit_partition(gens: GroupGens, k, cap=ENUMERATION_CAP) -> OrbitPartition:
    """All G-orbits on k-subspaces, sorted by representative"""
    assigned = set()
    orbits = []
    for S in enumerate_subspaces(gens.n, k, gens.q, cap=cap):
        if S.codes in assigned:
            continue
        members = orbit_codes(gens, S.codes)
        assigned |= members
        orbits.append(Orbit(S, len(members), frozenset(members)))
    total = sum(o.size for o in orbits)
    expected = gaussian_binomial(gens.n, k, gens.q)
    if total != expected:
        raise ConsistencyError(f"orbit sizes sum to {total}, expected {expected}")
    logger.info("%s has %d orbits on %d-subspaces of F_%d^%d", gens.label, len(orbits), k, gens.q, gens.n)
    return OrbitPartition(gens, k, tuple(orbits))


# ---------------------------------------------------------------------------
# Fusion of subgroup orbits
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class FusionMap:
    """H-orbits (fine) assigned to the G-orbits (coarse) that contain them"""

    fine: OrbitPartition
    coarse: OrbitPartition
    assignment: Tuple[int, ...]

    def parts(self) -> List[List[int]]:
        groups = [[] for _ in self.coarse.orbits]
        for i, j in enumerate(self.assignment):
            groups[j].append(i)
        return groups

    def part_sizes(self) -> List[int]:
        return [len(part) for part in self.parts()]

    def parent_of(self, S) -> int:
        return self.assignment[self.fine.rep_index[S.codes if isinstance(S, Subspace) else tuple(S)]]

    def is_identity(self):
        return len(self.fine) == len(self.coarse)


def check_subgroup(gens_H: GroupGens, gens_G: GroupGens, order_cap=ORDER_CAP):
    if (gens_H.q, gens_H.n) != (gens_G.q, gens_G.n):
        raise GroupError(f"{gens_H.label} and {gens_G.label} act on different spaces")
    closure = close_group(gens_G, order_cap)
    for i, h in enumerate(gens_H.generators):
        if h not in closure:
            raise GroupError(f"generator {i + 1} of {gens_H.label} is not in {gens_G.label}: not a subgroup")


def fuse(gens_H: GroupGens, gens_G: GroupGens, k, fine=None, coarse=None,
         check=True, cap=ENUMERATION_CAP) -> FusionMap:
    """Map every H-orbit on k-subspaces to its G-orbit"""
    if check:
        check_subgroup(gens_H, gens_G)
    fine = fine or orbit_partition(gens_H, k, cap=cap)
    coarse = coarse or orbit_partition(gens_G, k, cap=cap)
    assignment = tuple(coarse.orbit_index(o.representative) for o in fine.orbits)
    totals = [0] * len(coarse)
    for orbit, j in zip(fine.orbits, assignment):
        totals[j] += orbit.size
    for j, orbit in enumerate(coarse.orbits):
        if totals[j] != orbit.size:
            raise ConsistencyError(
                f"H-orbits inside G-orbit {orbit.representative} sum to {totals[j]}, not {orbit.size}")
    return FusionMap(fine, coarse, assignment)
