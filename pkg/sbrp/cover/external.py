"""
Hand the cover problem to an external MIP solver through LP files.

The command template gets {lp} and {sol} substituted with the problem and solution paths,
e.g. "cbc {lp} solve solu {sol}".  Any solution file where each chosen variable appears on a
line as 'y_<id> <value>' (extra columns allowed) can be read back.
"""

import logging
import math
import re
import shlex
import subprocess
import tempfile
import time
from pathlib import Path

from .problem import CoverError, CoverProblem, CoverSolution, CoverStatus, _id

logger = logging.getLogger(__name__)

class ExternalSolverError(CoverError):
    """
    Raised when the external solver fails or returns something unusable.
    Inputs:
    - command: the command line run
    - info: Optional additional information about the error
    """
    def __init__(self, command, info=None):
        self.command = command
        self.info = info
        super().__init__(self.__str__())

    def __str__(self) -> str:
        return f"External solver '{self.command}' failed." + (f" {self.info}" if self.info else "")

_VALUE_LINE = re.compile(r"(?:^|\s)y_(\S+)\s+([-+0-9.eE]+)")

def read_solution_values(text: str) -> dict:
    values = {}
    for line in text.splitlines():
        match = _VALUE_LINE.search(line)
        if match:
            try:
                values[_id(match.group(1))] = float(match.group(2))
            except ValueError:
                continue
    return values

def run_external(command: str, problem: CoverProblem, time_limit: float = 3600.0) -> CoverSolution:
    if "{lp}" not in command or "{sol}" not in command:
        raise ValueError("External solver command needs {lp} and {sol} placeholders")
    with tempfile.TemporaryDirectory(prefix="sbrp-") as tmp:
        lp_path, sol_path = Path(tmp, "cover.lp"), Path(tmp, "cover.sol")
        lp_path.write_text(problem.to_lp())
        argv = [tok.replace("{lp}", str(lp_path)).replace("{sol}", str(sol_path)) for tok in shlex.split(command)]
        logger.info(f"Running external solver: {' '.join(argv)}")
        started = time.monotonic()
        try:
            done = subprocess.run(argv, capture_output=True, text=True, timeout=time_limit)
        except FileNotFoundError as e:
            raise ExternalSolverError(command, f"Executable not found: {argv[0]}") from e
        except subprocess.TimeoutExpired as e:
            raise ExternalSolverError(command, f"No answer within {time_limit}s") from e
        if done.returncode != 0:
            raise ExternalSolverError(command, f"Exit code {done.returncode}: {done.stderr.strip()[:500]}")
        if not sol_path.is_file():
            raise ExternalSolverError(command, "No solution file written")
        text = sol_path.read_text()
        logger.debug(f"External solver finished in {time.monotonic() - started:.3f}s")

    first_line = text.strip().splitlines()[0].lower() if text.strip() else ""
    if "infeasible" in first_line:
        return CoverSolution(chosen=(), objective=math.inf, status=CoverStatus.INFEASIBLE,
                             gap=math.inf, bound=math.inf, uncovered=tuple(problem.uncoverable()))
    values = read_solution_values(text)
    unknown = [sid for sid in values if sid not in problem.sets]
    if unknown:
        raise ExternalSolverError(command, f"Unknown variables in solution: {unknown[:5]}")
    chosen = tuple(sid for sid in problem.set_ids() if values.get(sid, 0.0) > 0.5)
    if not problem.is_feasible(chosen):
        raise ExternalSolverError(command, "Returned selection is not a feasible cover")
    objective = problem.objective(chosen)
    # the external solver is trusted to have closed its own gap
    return CoverSolution(chosen=chosen, objective=objective, status=CoverStatus.OPTIMAL, gap=0.0, bound=objective)
