"""
Pipeline entry points.

solve.py runs the full decomposition and holds SolveParams.
oracle.py is the exhaustive reference solver for tiny instances.
sweep.py and bench.py drive repeated runs.
emit.py renders solutions; solution.py defines them.
"""

from .bench import bench, format_bench
from .emit import EmitFormats, emit, getEmitter
from .oracle import OracleSizeError, brute_force_oracle
from .solution import PipelineError, Solution, SolutionAuditError, load_solution
from .solve import SolveParams, solve, split_stops
from .sweep import format_sweep, plot_sweep, sweep
