HELP_TEXT = """
Command line interface for the shareability network school bus routing solver.

Commands
solve I1:       Solve instance file I1 and print a result table row.
sweep I1:       Re-solve I1 over a grid of beta or gamma values.
oracle I1:      Exhaustive optimum for a tiny instance (students picked up at home).
bench D1:       Solve every instance file in directory D1.

Instance formats (--format) are inferred from the suffix when omitted:
.json -> native-json, .csv -> bps-csv, anything else -> euclidean-schittekat.

Output (--emit FMT[:PATH], repeatable): text-table, json, geojson, svg.  Without PATH the text
is printed.  svg always needs a PATH.

Exit codes: 0 solved, 2 infeasible, 1 any other error.
"""

import argparse
import logging

GENERIC_ERROR_RETURN = 1
INFEASIBLE_RETURN = 2

logger = logging.getLogger(__name__)

def _set_verbosity(verbose: int) -> None:
    if verbose >= 2:
        logging.getLogger("sbrp").setLevel(logging.DEBUG)
    elif verbose == 1:
        logging.getLogger("sbrp").setLevel(logging.INFO)

def _params(args):
    from ..pipeline import SolveParams

    return SolveParams.from_defaults(
        beta=args.beta,
        gamma=args.gamma,
        n_max=args.nmax,
        virtual_walk_mi=args.virtual_walk,
        compress=not args.no_compress,
        exact_tsp=args.exact_tsp,
        exact_tsp_limit=args.exact_tsp_limit,
        trip_cap=args.trip_cap,
        time_limit=args.time_limit,
        gap=args.gap,
        solver=args.solver,
    )

def _load(args):
    from ..model import load_instance

    return load_instance(args.instance, args.fmt)

def _emit_all(solution, emits, include_timings) -> None:
    from ..pipeline import emit

    for choice in emits or ["text-table"]:
        fmt, _, path = choice.partition(":")
        text = emit(solution, fmt, path or None, include_timings=include_timings)
        if not path:
            print(text, end="")
        else:
            print(f"Wrote {fmt} to {path}")

def _run(func, args):
    """Call func(args) translating package errors into exit codes."""
    from ..compression import UncoveredStudentsError
    from ..compression.stops import CompressionError
    from ..cover.problem import CoverError, InfeasibleCoverError
    from ..model import InstanceError
    from ..pipeline import PipelineError
    from ..trips import TripError

    try:
        return func(args)
    except (InfeasibleCoverError, UncoveredStudentsError) as e:
        print(f"Infeasible: {e}")
        return INFEASIBLE_RETURN
    except (InstanceError, CompressionError, TripError, CoverError, PipelineError, ValueError, OSError) as e:
        print(f"Failed: {e}")
        return GENERIC_ERROR_RETURN

def handle_solve(args):
    """
    Load, solve and emit one instance.
    """
    def run(args):
        from ..pipeline import solve

        instance = _load(args)
        print(f"Solving {instance}")
        solution = solve(instance, _params(args), network_out=args.network_out, trips_out=args.trips_out)
        _emit_all(solution, args.emit, args.timings)
        return 0
    return _run(run, args)

def handle_sweep(args):
    """
    Solve once per grid value and print one row per value.
    """
    def run(args):
        from ..pipeline import format_sweep, plot_sweep, sweep

        grid = None if args.grid is None else [float(v) for v in args.grid.split(",")]
        rows = sweep(_load(args), args.param, grid, _params(args))
        print(format_sweep(rows, args.param))
        if args.plot:
            plot_sweep(rows, args.param, args.plot)
            print(f"Wrote plot to {args.plot}")
        return 0
    return _run(run, args)

def handle_oracle(args):
    """
    Exhaustive optimum over all partitions of the students.
    """
    def run(args):
        from ..pipeline import brute_force_oracle

        instance = _load(args)
        solution = brute_force_oracle(instance, _params(args))
        _emit_all(solution, args.emit, args.timings)
        return 0
    return _run(run, args)

def handle_bench(args):
    """
    Solve every instance in a directory.
    """
    def run(args):
        from ..pipeline import bench, format_bench

        rows = bench(args.directory, _params(args), args.fmt)
        print(format_bench(rows))
        return GENERIC_ERROR_RETURN if any(r.error for r in rows) else 0
    return _run(run, args)

def _add_solver_flags(parser) -> None:
    parser.add_argument("--format", dest="fmt", default=None,
                        help="Instance format: native-json, bps-csv or euclidean-schittekat.")
    parser.add_argument("--beta", type=float, default=None, help="Edge compression budget multiplier (> 1).")
    parser.add_argument("--gamma", type=float, default=None, help="Quasi-clique tolerance in [0, 1).")
    parser.add_argument("--nmax", type=int, default=None, help="Split stops with more students than this.")
    parser.add_argument("--virtual-walk", type=float, default=None,
                        help="Stop search radius for door-to-door students, miles.")
    parser.add_argument("--no-compress", action="store_true", help="Pick every student up at home.")
    parser.add_argument("--exact-tsp", action="store_true", help="Route small trips exactly.")
    parser.add_argument("--exact-tsp-limit", type=int, default=None, help="Largest trip routed exactly.")
    parser.add_argument("--trip-cap", type=int, default=None, help="Maximum number of enumerated trips.")
    parser.add_argument("--time-limit", type=float, default=None, help="Set cover time limit, seconds.")
    parser.add_argument("--gap", type=float, default=None, help="Accepted relative optimality gap.")
    parser.add_argument("--solver", default="internal", help="internal, or external:<command with {lp} and {sol}>.")
    parser.add_argument("-v", "--verbose", action="count", default=0, help="More logging (repeat for debug).")

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sbrp",
        description="Shareability network solver for the multi-modal school bus routing problem.",
        epilog=HELP_TEXT,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )

    # Subcommands
    subparsers = parser.add_subparsers(
        title="commands",
        dest="command",
        required=True,
    )

    # ---- solve command ----
    solve_parser = subparsers.add_parser("solve", help="Solve an instance.")
    solve_parser.add_argument("instance", metavar="I1", help="Instance file.")
    _add_solver_flags(solve_parser)
    solve_parser.add_argument("--emit", action="append", metavar="FMT[:PATH]", help="Output format and optional path.")
    solve_parser.add_argument("--network-out", default=None, help="Write the shareability network (.graphml or edge list).")
    solve_parser.add_argument("--trips-out", default=None, help="Write the enumerated trips.")
    solve_parser.add_argument("--timings", action="store_true", help="Include stage runtimes in json output.")
    solve_parser.set_defaults(func=handle_solve)

    # ---- sweep command ----
    sweep_parser = subparsers.add_parser("sweep", help="Sweep beta or gamma.")
    sweep_parser.add_argument("instance", metavar="I1", help="Instance file.")
    _add_solver_flags(sweep_parser)
    sweep_parser.add_argument("--param", choices=("beta", "gamma"), default="beta", help="Parameter to sweep.")
    sweep_parser.add_argument("--grid", default=None, help="Comma separated values.")
    sweep_parser.add_argument("--plot", default=None, help="Write a four panel plot to this path.")
    sweep_parser.set_defaults(func=handle_sweep)

    # ---- oracle command ----
    oracle_parser = subparsers.add_parser("oracle", help="Exhaustive optimum for tiny instances.")
    oracle_parser.add_argument("instance", metavar="I1", help="Instance file.")
    _add_solver_flags(oracle_parser)
    oracle_parser.add_argument("--emit", action="append", metavar="FMT[:PATH]", help="Output format and optional path.")
    oracle_parser.add_argument("--timings", action="store_true", help="Include runtimes in json output.")
    oracle_parser.set_defaults(func=handle_oracle)

    # ---- bench command ----
    bench_parser = subparsers.add_parser("bench", help="Solve every instance in a directory.")
    bench_parser.add_argument("directory", metavar="D1", help="Directory of instance files.")
    _add_solver_flags(bench_parser)
    bench_parser.set_defaults(func=handle_bench)
    return parser

def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _set_verbosity(args.verbose)

    from ..model.loaders import InstanceFormats

    if args.fmt is not None and not InstanceFormats.is_known(args.fmt):
        print(f"Unknown instance format specified ({args.fmt}) - exiting.")
        return GENERIC_ERROR_RETURN

    # Dispatch to the handler function for the chosen subcommand
    return args.func(args) or 0
