"""
Reproduce - named end-to-end scenarios over the committed fixtures

Each scenario returns its report lines and whether every check held, so the
command line and the acceptance tests run exactly the same code.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List

import numpy as np

from config.settings import DEFAULT_THREADS
from core.beam import SolverParams
from core.designs import (
    Design,
    code_parameters,
    expand,
    is_steiner,
    packing_bound,
    verify_coverage,
    verify_pairwise,
)
from core.kramer_mesner import (
    IncidenceMatrix,
    Solution,
    fuse_matrix,
    intermediate_matrix,
    local_modify,
    reduced_matrix,
    translate_solution,
)
from core.orbits import close_group, cyclic_subgroup_of_order, fuse, orbit_partition
from core.zoom import zoom_step
from utils.fixtures import DisplayMatch, display_match, fixture_info, literature_bounds, load_fixture, table_order_note

logger = logging.getLogger(__name__)


@dataclass
class ScenarioResult:
    name: str
    ok: bool = True
    lines: List[str] = field(default_factory=list)

    def check(self, condition, line):
        self.lines.append(line + ("" if condition else "  FAILED"))
        self.ok = self.ok and bool(condition)


def _to_display(solution: Solution, match: DisplayMatch) -> str:
    return "".join("1" if solution.selected[c] else "0" for c in match.cols)


def _from_display(A: IncidenceMatrix, bits: str, match: DisplayMatch) -> Solution:
    return Solution.from_columns(A, [match.cols[j] for j, b in enumerate(bits) if b == "1"])


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------

def scenario_bounds(n_from=6, n_to=14, q=2, t=2, k=3, **_) -> ScenarioResult:
    result = ScenarioResult('bounds')
    table = literature_bounds()
    for n in range(n_from, n_to + 1):
        bound = packing_bound(n, t, k, q)
        row = table.get(n)
        if row is None:
            result.lines.append(f"n={n} packing_bound={bound}")
            continue
        result.check(bound == row.upper,
                     f"n={n} packing_bound={bound} table_upper={row.upper} lower={row.lower} reference={row.reference}")
    return result


def scenario_example(seed=0, **_) -> ScenarioResult:
    result = ScenarioResult('example')
    G = load_fixture('example_g4')
    closure = close_group(G)
    result.check(closure.order == 6, f"group_order={closure.order}")
    H = cyclic_subgroup_of_order(closure, 3)

    rows_H, cols_H = orbit_partition(H, 1), orbit_partition(H, 2)
    rows_G, cols_G = orbit_partition(G, 1), orbit_partition(G, 2)
    A_H = reduced_matrix(H, 1, 2, rows_H, cols_H)
    fmap_cols = fuse(H, G, 2, fine=cols_H, coarse=cols_G, check=False)
    fmap_rows = fuse(H, G, 1, fine=rows_H, coarse=rows_G, check=False)
    A_prime = intermediate_matrix(A_H, fmap_cols)
    A_G = fuse_matrix(A_H, fmap_cols, fmap_rows)
    direct = reduced_matrix(G, 1, 2, rows_G, cols_G)
    result.check(np.array_equal(A_G.entries, direct.entries), "fused_equals_direct=true")

    matches = {}
    for label, A, fixture in (('A_H', A_H, 'example_AH'), ("A'", A_prime, 'example_Aprime'),
                              ('A_G', A_G, 'example_AG')):
        match = display_match(fixture)
        applies = match.applies(A, load_fixture(fixture))
        matches[label] = match
        result.check(applies, f"matrix={label} shape={A.shape[0]}x{A.shape[1]} matches_display={str(applies).lower()}")
    if not result.ok:
        return result

    x = _from_display(A_G, "001000001", matches['A_G'])
    result.check(x.feasible and x.weighted_size == 2, f"x=001000001 feasible={x.feasible} size={x.weighted_size}")
    y = translate_solution(x, fmap_cols, A_H)
    y_bits = _to_display(y, matches['A_H'])
    result.check(y_bits == "0000100000001", f"y={y_bits} size={y.weighted_size}")

    z_bits = "0000100001001"
    extra = [matches['A_H'].cols[j] for j, b in enumerate(z_bits) if b == "1" and not y.selected[matches['A_H'].cols[j]]]
    modified = local_modify(y, add=extra)
    z = modified.solution
    design = z.expand(H)
    report = verify_pairwise(design)
    result.check(modified.accepted and report.valid and design.size == 5,
                 f"z={z_bits} size={design.size} {report.summary_line()}")
    result.check(is_steiner(design, report), f"is_steiner={'true' if is_steiner(design, report) else 'false'}")

    searched = zoom_step(x, A_H, fmap_cols, SolverParams(seed=seed, max_rounds=3, time_limit_s=None))
    result.check(searched.weighted_size == 5, f"beam_extension_size={searched.weighted_size}")
    return result


def scenario_n7_design(threads=DEFAULT_THREADS, **_) -> ScenarioResult:
    result = ScenarioResult('p2_2_3_7')
    design = Design.from_blocks(load_fixture('p2_2_3_7'), t=2)
    pairwise = verify_pairwise(design)
    coverage = verify_coverage(design, threads=threads)
    result.check(pairwise.valid and pairwise.size == 329, f"pairwise {pairwise.summary_line()}")
    result.check(coverage.valid and coverage.covered == 2303, f"coverage {coverage.summary_line()}")
    params = code_parameters(design, coverage)
    result.check(str(params) == "[7,3,4,329]_2" and params.exhaustive and params.min_distance == 4,
                 f"code={params} min_distance={params.min_distance} exhaustive={str(params.exhaustive).lower()}")
    return result


def _expand_reps(result, reps_name, gens, threads):
    info = fixture_info(reps_name)
    started = time.monotonic()
    design = expand(load_fixture(reps_name), gens, t=2)
    report = verify_coverage(design, threads=threads)
    expected = info.meta['expected_size']
    bound = packing_bound(design.n, design.t, design.k, design.q)
    result.check(design.size == expected and design.size <= bound and report.valid,
                 f"fixture={reps_name} blocks={design.size} expected={expected} bound={bound} {report.summary_line()} "
                 f"seconds={time.monotonic() - started:.1f}")


def scenario_n8_subgroup(threads=DEFAULT_THREADS, **_) -> ScenarioResult:
    result = ScenarioResult('p2_2_3_8')
    G = load_fixture('gen_n8')
    closure = close_group(G)
    result.check(closure.order == 217, f"group=gen_n8 order={closure.order}")
    H = cyclic_subgroup_of_order(closure, 7)
    result.check(close_group(H).order == 7, f"subgroup_order={close_group(H).order}")
    _expand_reps(result, 'p2_2_3_8', H, threads)
    return result


def _normalizer_expansion(reps_name, gens_name, threads):
    result = ScenarioResult(reps_name)
    G = load_fixture(gens_name)
    order = close_group(G).order
    info = fixture_info(gens_name)
    result.check(order == info.meta['order'], f"group={gens_name} order={order}")
    note = table_order_note(gens_name, order)
    if note:
        result.lines.append(note)
    _expand_reps(result, reps_name, G, threads)
    return result


def scenario_n11(threads=DEFAULT_THREADS, **_):
    return _normalizer_expansion('p2_2_3_11', 'gen_n11', threads)


def scenario_n12(threads=DEFAULT_THREADS, **_):
    return _normalizer_expansion('p2_2_3_12', 'gen_n12', threads)


def scenario_n14(threads=DEFAULT_THREADS, **_):
    return _normalizer_expansion('p2_2_3_14', 'gen_n14', threads)


SCENARIOS: Dict[str, Callable[..., ScenarioResult]] = {
    'bounds': scenario_bounds,
    'example': scenario_example,
    'p2_2_3_7': scenario_n7_design,
    'p2_2_3_8': scenario_n8_subgroup,
    'p2_2_3_11': scenario_n11,
    'p2_2_3_12': scenario_n12,
    'p2_2_3_14': scenario_n14,
}


def run_scenario(name, **options) -> List[ScenarioResult]:
    names = list(SCENARIOS) if name == 'all' else [name]
    results = []
    for scenario in names:
        logger.info("running scenario %s", scenario)
        results.append(SCENARIOS[scenario](**options))
    return results
