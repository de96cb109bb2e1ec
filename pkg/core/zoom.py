"""
Zoom - Kramer-Mesner search down a subgroup chain G = G_0 >= G_1 >= ...

A solution found with the coarse group is translated to the next subgroup,
the H-orbits lying in admissible G-orbits are excluded (they cannot be
added to a maximal G-solution) and the rest of the finer matrix is used to
extend it. Optional exchange rounds drop a few selected orbits and extend
again without the exclusion.
"""

import logging
from dataclasses import dataclass, field, replace
from typing import List, Sequence

import numpy as np

from config.settings import DEFAULT_THREADS, ENUMERATION_CAP
from core.beam import SolverParams, beam_search
from core.errors import GroupError
from core.kramer_mesner import (
    IncidenceMatrix,
    Solution,
    admissible_columns,
    column_mask,
    local_modify,
    reduced_matrix,
    saturate,
    translate_solution,
    zoom_prune,
)
from core.orbits import GroupGens, check_subgroup, fuse, orbit_partition

logger = logging.getLogger(__name__)


@dataclass
class ZoomResult:
    solution: Solution
    group: GroupGens
    log: List[str] = field(default_factory=list)

    @property
    def weighted_size(self):
        return self.solution.weighted_size

    def design(self):
        return self.solution.expand(self.group)


def exchange_search(z: Solution, params: SolverParams, rounds, size=2) -> Solution:
    """Remove `size` random selected columns and re-extend; keep non-worse results"""
    best = z
    for r in range(rounds):
        chosen = best.columns()
        if not chosen:
            break
        rng = np.random.default_rng([params.seed, 1, r])
        drop = rng.choice(chosen, size=min(size, len(chosen)), replace=False)
        reduced = local_modify(best, remove=drop.tolist()).solution
        run_params = replace(params, seed=params.seed + r + 1, max_rounds=1, time_limit_s=None)
        candidate = beam_search(best.matrix, run_params, warm_start=reduced).solution
        if candidate.weighted_size >= best.weighted_size:
            if candidate.weighted_size > best.weighted_size:
                logger.info("exchange round %d: size %d -> %d", r + 1, best.weighted_size, candidate.weighted_size)
            best = candidate
    return best


def zoom(chain: Sequence[GroupGens], t, k, params: SolverParams = SolverParams(),
         exchange_rounds=0, exchange_size=2, threads=DEFAULT_THREADS, cap=ENUMERATION_CAP) -> ZoomResult:
    """Solve under chain[0], then translate and extend under every following subgroup"""
    if not chain:
        raise GroupError("zoom needs at least one group")
    G = chain[0]
    rows_G = orbit_partition(G, t, cap=cap)
    cols_G = orbit_partition(G, k, cap=cap)
    A = reduced_matrix(G, t, k, rows_G, cols_G, threads=threads)
    x = saturate(beam_search(A, params).solution)
    log = [f"level=0 group={G.label} matrix={A.shape[0]}x{A.shape[1]} size={x.weighted_size}"]

    for level, H in enumerate(chain[1:], 1):
        check_subgroup(H, G)
        rows_H = orbit_partition(H, t, cap=cap)
        cols_H = orbit_partition(H, k, cap=cap)
        fmap = fuse(H, G, k, fine=cols_H, coarse=cols_G, check=False)
        A_H = reduced_matrix(H, t, k, rows_H, cols_H, threads=threads)
        y = translate_solution(x, fmap, A_H)
        excluded = column_mask(A_H, fmap, zoom_prune(fmap, admissible_columns(A)))
        z = saturate(beam_search(A_H, params, warm_start=y, excluded=excluded).solution, excluded)
        if exchange_rounds:
            z = saturate(exchange_search(z, params, exchange_rounds, exchange_size))
        log.append(f"level={level} group={H.label} matrix={A_H.shape[0]}x{A_H.shape[1]} "
                   f"excluded={int(excluded.sum())} translated={y.weighted_size} size={z.weighted_size}")
        logger.info(log[-1])
        x, A, G, cols_G = z, A_H, H, cols_H

    return ZoomResult(x, G, log)


def zoom_step(x: Solution, A_H: IncidenceMatrix, fmap, params: SolverParams) -> Solution:
    """Translate, prune and extend for one pair of already built matrices"""
    y = translate_solution(x, fmap, A_H)
    excluded = column_mask(A_H, fmap, zoom_prune(fmap, admissible_columns(x.matrix)))
    return beam_search(A_H, params, warm_start=y, excluded=excluded).solution
