"""
Command Line Interface - argparse front end over the library

Results go to stdout as stable key=value lines; logging goes to stderr.
"""

import argparse
import logging
import sys
from typing import Optional, Sequence

from config.settings import (
    APP_NAME,
    APP_VERSION,
    BEAM_DEFAULTS,
    DEFAULT_THREADS,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    EXIT_VERIFICATION_FAILED,
)
from core.beam import SolverParams, beam_search
from core.designs import Design, code_parameters, expand, is_steiner, packing_bound, verify, verify_coverage, verify_pairwise
from core.errors import QPackError
from core.kramer_mesner import plain_matrix, reduced_matrix
from core.orbits import close_group, cyclic_subgroup_of_order, orbit_partition
from core.reproduce import SCENARIOS, run_scenario
from core.zoom import zoom
from utils.file_utils import incidence_text, read_generators, read_subspaces, write_incidence_text, write_tuple_file
from utils.fixtures import FIXTURES, table_order_note

logger = logging.getLogger(__name__)


class QPackArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the invalid-input code instead of argparse's 2"""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID_INPUT, f"{self.prog}: error: {message}\n")


def _out(line=""):
    print(line, flush=True)


def _configure_logging(verbose, quiet):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    logging.basicConfig(level=level, stream=sys.stderr,
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", force=True)


def _solver_params(args) -> SolverParams:
    return SolverParams(alpha=args.alpha, beta=args.beta, seed=args.seed,
                        time_limit_s=args.time_limit_s, max_rounds=args.max_rounds,
                        target_size=args.target_size)


def _load_group(path, subgroup_order=None, name=None):
    gens = read_generators(path, name=name)
    if subgroup_order:
        gens = cyclic_subgroup_of_order(close_group(gens), subgroup_order)
    return gens


def _write_design(design: Design, path):
    write_tuple_file(path, (tuple(int(c) for c in row) for row in design.codes), design.q, design.n, design.k)
    logger.info("wrote %d blocks to %s", design.size, path)


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_bounds(args):
    for n in range(args.n_from, args.n_to + 1):
        _out(f"n={n} upper={packing_bound(n, args.t, args.k, args.q)}")
    return EXIT_OK


def cmd_group_order(args):
    gens = _load_group(args.generators, args.subgroup_order, name=args.fixture)
    order = close_group(gens).order
    _out(f"order={order}")
    if args.fixture in FIXTURES and not args.subgroup_order:
        note = table_order_note(args.fixture, order)
        if note:
            _out(note)
    return EXIT_OK


def cmd_orbits(args):
    gens = _load_group(args.generators, args.subgroup_order)
    partition = orbit_partition(gens, args.k)
    _out(f"orbits={len(partition)} dim={args.k}")
    for orbit in partition.orbits:
        _out(f"rep={orbit.representative} size={orbit.size}")
    return EXIT_OK


def _build_matrix(args):
    if args.generators:
        gens = _load_group(args.generators, args.subgroup_order)
        return reduced_matrix(gens, args.t, args.k, threads=args.threads)
    return plain_matrix(args.n, args.t, args.k, args.q)


def cmd_km(args):
    A = _build_matrix(args)
    if args.out:
        write_incidence_text(args.out, A)
    else:
        sys.stdout.write(incidence_text(A))
    if args.image:
        from ui.matrix_image import save_matrix_image
        save_matrix_image(A, args.image)
    return EXIT_OK


def cmd_solve(args):
    A = _build_matrix(args)
    result = beam_search(A, _solver_params(args))
    for line in result.log:
        _out(line)
    solution = result.solution
    _out(f"size={solution.weighted_size} rounds={result.rounds}")
    _out(f"solution={solution.to_bitstring()}")
    _out(f"columns={','.join(str(c + 1) for c in solution.columns())}")
    if args.out:
        _write_design(solution.expand(), args.out)
    return EXIT_OK


def cmd_zoom(args):
    chain = [read_generators(args.generators)] + [read_generators(path) for path in args.subgroup or []]
    if args.subgroup_order:
        chain.append(cyclic_subgroup_of_order(close_group(chain[-1]), args.subgroup_order))
    result = zoom(chain, args.t, args.k, _solver_params(args), exchange_rounds=args.exchange_rounds,
                  exchange_size=args.exchange_size, threads=args.threads)
    for line in result.log:
        _out(line)
    _out(f"size={result.weighted_size}")
    if args.out:
        _write_design(result.design(), args.out)
    return EXIT_OK


def cmd_expand(args):
    _, reps = read_subspaces(args.reps, n=args.n)
    gens = _load_group(args.generators, args.subgroup_order)
    design = expand(reps, gens, t=args.t)
    _out(f"blocks={design.size}")
    if args.out:
        _write_design(design, args.out)
    return EXIT_OK


def cmd_verify(args):
    _, blocks = read_subspaces(args.design, n=args.n)
    design = Design.from_blocks(blocks, t=args.t)
    if args.method == 'pairwise':
        report = verify_pairwise(design)
    elif args.method == 'coverage':
        report = verify_coverage(design, threads=args.threads)
    else:
        report = verify(design, threads=args.threads)
    for line in report.lines():
        _out(line)
    if not report.valid:
        return EXIT_VERIFICATION_FAILED
    if args.code:
        params = code_parameters(design, report)
        _out(f"code={params} min_distance={params.min_distance} exhaustive={str(params.exhaustive).lower()}")
        _out(f"steiner={str(is_steiner(design, report)).lower()}")
    return EXIT_OK


def cmd_reproduce(args):
    ok = True
    for result in run_scenario(args.scenario, threads=args.threads, seed=args.seed):
        _out(f"scenario={result.name} ok={str(result.ok).lower()}")
        for line in result.lines:
            _out(f"  {line}")
        ok = ok and result.ok
    return EXIT_OK if ok else EXIT_VERIFICATION_FAILED


def cmd_fixtures(args):
    for info in FIXTURES.values():
        _out(f"{info.name} kind={info.kind} file={info.filename} - {info.description}")
    return EXIT_OK


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------

def _add_space(parser, need_n=False):
    parser.add_argument("--q", type=int, default=2, help="Field order (prime).")
    parser.add_argument("--n", type=int, required=need_n, help="Ambient dimension.")
    parser.add_argument("--t", type=int, default=2, help="Dimension of the packed subspaces.")
    parser.add_argument("--k", type=int, default=3, help="Block dimension.")


def _add_group(parser, required=False):
    parser.add_argument("--generators", required=required, help="Generator matrix file.")
    parser.add_argument("--subgroup-order", type=int, default=None,
                        help="Use the first cyclic subgroup of this order.")


def _add_solver(parser):
    parser.add_argument("--alpha", type=int, default=BEAM_DEFAULTS['alpha'], help="Beam width.")
    parser.add_argument("--beta", type=int, default=BEAM_DEFAULTS['beta'], help="Extensions per state.")
    parser.add_argument("--seed", type=int, default=BEAM_DEFAULTS['seed'], help="RNG seed.")
    parser.add_argument("--time-limit-s", type=float, default=BEAM_DEFAULTS['time_limit_s'],
                        help="Wall-clock budget in seconds.")
    parser.add_argument("--max-rounds", type=int, default=None, help="Stop after this many passes.")
    parser.add_argument("--target-size", type=int, default=None, help="Stop once this size is reached.")


def build_parser():
    # --threads is accepted before or after the subcommand
    common = QPackArgumentParser(add_help=False)
    common.add_argument("--threads", type=int, default=argparse.SUPPRESS, help="Worker threads.")

    parser = QPackArgumentParser(prog=APP_NAME, description="q-packing designs by Kramer-Mesner and beam search.")
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    parser.add_argument("--verbose", action="store_true", help="Debug logging.")
    parser.add_argument("--quiet", action="store_true", help="Warnings and errors only.")
    parser.add_argument("--threads", type=int, default=DEFAULT_THREADS, help="Worker threads.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("bounds", parents=[common], help="Packing bounds floor([n t]/[k t]).")
    _add_space(p)
    p.add_argument("--n-from", type=int, default=6)
    p.add_argument("--n-to", type=int, default=14)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("group-order", parents=[common], help="Order of the group generated by a file.")
    _add_group(p, required=True)
    p.add_argument("--fixture", default=None, help="Fixture name, for published metadata.")
    p.set_defaults(func=cmd_group_order)

    p = sub.add_parser("orbits", parents=[common], help="Orbits on k-subspaces.")
    _add_group(p, required=True)
    p.add_argument("--k", type=int, default=3)
    p.set_defaults(func=cmd_orbits)

    p = sub.add_parser("km", parents=[common], help="Emit the plain or Kramer-Mesner matrix.")
    _add_space(p)
    _add_group(p)
    p.add_argument("--out", help="Write the matrix here instead of stdout.")
    p.add_argument("--image", help="Also write a PNG rendering.")
    p.set_defaults(func=cmd_km)

    p = sub.add_parser("solve", parents=[common], help="Beam search on a (reduced) incidence matrix.")
    _add_space(p)
    _add_group(p)
    _add_solver(p)
    p.add_argument("--out", help="Write the expanded design here.")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("zoom", parents=[common], help="Zoomed search down a subgroup chain.")
    _add_space(p)
    _add_group(p, required=True)
    p.add_argument("--subgroup", action="append", help="Generator file of the next subgroup (repeatable).")
    p.add_argument("--exchange-rounds", type=int, default=0, help="Remove-and-extend rounds after each level.")
    p.add_argument("--exchange-size", type=int, default=2, help="Orbits removed per exchange round.")
    _add_solver(p)
    p.add_argument("--out", help="Write the expanded design here.")
    p.set_defaults(func=cmd_zoom)

    p = sub.add_parser("expand", parents=[common], help="Expand orbit representatives into a design.")
    _add_space(p)
    _add_group(p, required=True)
    p.add_argument("--reps", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_expand)

    p = sub.add_parser("verify", parents=[common], help="Check that a design is a q-packing.")
    _add_space(p)
    p.add_argument("--design", required=True)
    p.add_argument("--method", choices=("auto", "pairwise", "coverage"), default="auto")
    p.add_argument("--code", action="store_true", help="Also report code parameters.")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("reproduce", parents=[common], help="Run a named reproduction scenario.")
    p.add_argument("scenario", choices=sorted(SCENARIOS) + ["all"])
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("fixtures", parents=[common], help="List the committed fixtures.")
    p.set_defaults(func=cmd_fixtures)
    return parser


def _validate(args):
    if args.threads < 1:
        raise QPackError(f"--threads must be positive, got {args.threads}")
    if getattr(args, 'command', None) in ('km', 'solve') and not args.generators and args.n is None:
        raise QPackError("--n is required without --generators")


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args.verbose, args.quiet)
    try:
        _validate(args)
        return args.func(args)
    except QPackError as e:
        logger.error("%s", e)
        return e.exit_code
