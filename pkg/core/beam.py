"""
Beam Search - randomized breadth-limited search for large feasible 0-1
solutions of A x <= 1

Each pass keeps alpha partial solutions; every one proposes beta random
extensions and the alpha extensions leaving the most selectable columns
survive. A state with nothing left to add retires and shrinks the beam by
one; the pass ends when the beam is empty. Passes repeat until the stop
condition of SolverParams fires.

Random streams are numpy PCG64 generators seeded with
(seed, pass, iteration, state rank), so a run is reproducible on every
platform for a fixed seed.
"""

import logging
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import List, Optional, Tuple

import numpy as np

from config.settings import BEAM_DEFAULTS
from core.errors import QPackError, SolutionError
from core.kramer_mesner import IncidenceMatrix, Solution, admissible_columns

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverParams:
    alpha: int = BEAM_DEFAULTS['alpha']
    beta: int = BEAM_DEFAULTS['beta']
    seed: int = BEAM_DEFAULTS['seed']
    time_limit_s: Optional[float] = BEAM_DEFAULTS['time_limit_s']
    max_rounds: Optional[int] = BEAM_DEFAULTS['max_rounds']
    target_size: Optional[int] = BEAM_DEFAULTS['target_size']

    def __post_init__(self):
        if self.alpha < 1 or self.beta < 1:
            raise QPackError(f"beam parameters need alpha >= 1 and beta >= 1, got {self.alpha}, {self.beta}")
        if self.max_rounds is not None and self.max_rounds < 1:
            raise QPackError("max_rounds must be positive")

    @property
    def unbounded(self):
        return self.time_limit_s is None and self.max_rounds is None and self.target_size is None


@dataclass(frozen=True)
class BeamState:
    chosen: Tuple[int, ...]
    remaining: np.ndarray = field(compare=False, repr=False)
    weighted_size: int

    @property
    def f(self):
        return int(np.count_nonzero(self.remaining))


class Delta:
    """Nonzero rows per column, plus the row -> columns index used for elimination"""

    def __init__(self, columns, rows, ncols):
        self.columns = columns
        self.rows = rows
        self.ncols = ncols
        self.conflicts = lru_cache(maxsize=None)(self._conflicts)

    def _conflicts(self, c):
        """Columns sharing a nonzero row with c, c included"""
        touched = [self.rows[r] for r in self.columns[c]]
        touched.append(np.array([c], dtype=np.int64))
        return np.unique(np.concatenate(touched))


def build_delta(A: IncidenceMatrix) -> Delta:
    nonzero = A.entries > 0
    columns = tuple(np.flatnonzero(nonzero[:, c]) for c in range(A.shape[1]))
    rows = tuple(np.flatnonzero(nonzero[r]).astype(np.int64) for r in range(A.shape[0]))
    return Delta(columns, rows, A.shape[1])


@dataclass
class BeamResult:
    solution: Solution
    log: List[str]
    rounds: int
    iterations: int
    elapsed_s: float


def _extend(state: BeamState, c, delta: Delta, weights) -> BeamState:
    remaining = state.remaining.copy()
    remaining[delta.conflicts(c)] = False
    return BeamState(state.chosen + (int(c),), remaining, state.weighted_size + int(weights[c]))


def _run_pass(A, delta, params, start, alpha, round_no, log, best, clock):
    """One pass from the start state until the beam empties; returns the best state seen and the iterations used"""
    weights = A.col_weights
    rng = np.random.default_rng([params.seed, round_no, 0, 0])
    candidates = np.flatnonzero(start.remaining)
    first = rng.choice(candidates, size=alpha, replace=False)
    states = [_extend(start, c, delta, weights) for c in first]
    iteration = 0
    while alpha > 0:
        iteration += 1
        live = []
        for s in states:
            if s.weighted_size > best.weighted_size:
                best = s
            if s.f == 0:
                alpha -= 1
            else:
                live.append(s)
        log.append(f"iter={clock['iterations'] + iteration} best_f={max((s.f for s in states), default=0)} "
                   f"best_size={best.weighted_size}")
        if alpha <= 0 or not live or clock['stop'](best):
            break
        proposals = []
        for rank, s in enumerate(live):
            stream = np.random.default_rng([params.seed, round_no, iteration, rank])
            open_cols = np.flatnonzero(s.remaining)
            if open_cols.size > params.beta:
                picks = stream.choice(open_cols, size=params.beta, replace=False)
            else:
                picks = open_cols
            ties = stream.random(picks.size)
            for c, tie in zip(picks, ties):
                lost = np.count_nonzero(s.remaining[delta.conflicts(int(c))])
                proposals.append((s.f - lost, s.weighted_size + int(weights[c]), tie, rank, int(c)))
        proposals.sort(key=lambda p: (-p[0], -p[1], p[2]))
        seen = set()
        states = []
        for f_new, size, tie, rank, c in proposals:
            key = frozenset(live[rank].chosen + (c,))
            if key in seen:
                continue
            seen.add(key)
            states.append(_extend(live[rank], c, delta, weights))
            if len(states) == alpha:
                break
    return best, iteration


def beam_search(A: IncidenceMatrix, params: SolverParams = SolverParams(),
                warm_start: Optional[Solution] = None, excluded=None) -> BeamResult:
    """Best feasible solution found; deterministic for fixed (A, params, warm_start)"""
    if A.shape[1] == 0:
        raise SolutionError("incidence matrix has no columns")
    if params.unbounded:
        params = SolverParams(params.alpha, params.beta, params.seed, max_rounds=1, time_limit_s=None)
    delta = build_delta(A)

    open_cols = admissible_columns(A)
    if excluded is not None:
        open_cols &= ~np.asarray(excluded, dtype=bool)
    chosen = ()
    size = 0
    if warm_start is not None:
        if warm_start.matrix is not A and warm_start.matrix.shape != A.shape:
            raise SolutionError("warm start belongs to a different matrix")
        if not warm_start.feasible:
            raise SolutionError("warm start is infeasible")
        chosen = tuple(warm_start.columns())
        size = warm_start.weighted_size
        for c in chosen:
            open_cols[delta.conflicts(c)] = False
    start = BeamState(chosen, open_cols, size)

    started = time.monotonic()
    clock = {'iterations': 0}

    def should_stop(best_state):
        if params.target_size is not None and best_state.weighted_size >= params.target_size:
            return True
        return params.time_limit_s is not None and time.monotonic() - started >= params.time_limit_s

    clock['stop'] = should_stop
    best = start
    log = []
    rounds = 0
    if start.f == 0:
        logger.info("nothing to extend: start solution of size %d is maximal", size)
    else:
        alpha = params.alpha
        if alpha > start.f:
            logger.warning("beam width %d exceeds the %d selectable columns; clamped", alpha, start.f)
            alpha = start.f
        while True:
            best, used = _run_pass(A, delta, params, start, alpha, rounds, log, best, clock)
            clock['iterations'] += used
            rounds += 1
            logger.debug("pass %d finished: best size %d", rounds, best.weighted_size)
            if should_stop(best) or (params.max_rounds is not None and rounds >= params.max_rounds):
                break

    elapsed = time.monotonic() - started
    solution = Solution.from_columns(A, best.chosen)
    if not solution.feasible:
        raise SolutionError("beam search produced an infeasible solution")
    logger.info("beam search: size %d after %d passes, %d iterations, %.1fs",
                solution.weighted_size, rounds, clock['iterations'], elapsed)
    return BeamResult(solution, log, rounds, clock['iterations'], elapsed)
