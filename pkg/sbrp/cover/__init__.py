"""
Weighted set cover.  Use getSolver to get a CoverSolver for a solver name string
("internal" or "external:<command>").

problem.py defines CoverProblem, CoverSolution and LP text I/O.
bnb.py is the internal branch-and-bound.
repair.py converts a cover into a partition.
external.py runs an external MIP solver over LP files.
"""

from abc import ABC, abstractmethod
from enum import Enum

from .bnb import greedy_cover, solve_cover
from .problem import CoverError, CoverProblem, CoverSolution, CoverStatus, InfeasibleCoverError
from .repair import repair_to_partition

class SolverTypes(Enum):
    INTERNAL = "internal"
    EXTERNAL = "external"

    @staticmethod
    def is_known(val):
        if isinstance(val, SolverTypes):
            return True
        if isinstance(val, str):
            name = val.split(":", 1)[0]
            return name in SolverTypes.__members__ or name in (s.value for s in SolverTypes)
        return False

class CoverSolver(ABC):
    required_attributes = ["name"]

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)

        for attr in cls.required_attributes:
            if not hasattr(cls, attr):
                raise TypeError(f"{cls.__name__} must define '{attr}'")

    @abstractmethod
    def solve(self, problem: CoverProblem, time_limit: float = 3600.0, gap_limit: float = 0.0) -> CoverSolution:
        pass

    def __repr__(self) -> str:
        return f"[{type(self).__name__}]({self.name})" # type: ignore

class InternalSolver(CoverSolver):
    name = "internal"

    def solve(self, problem, time_limit=3600.0, gap_limit=0.0):
        return solve_cover(problem, time_limit=time_limit, gap_limit=gap_limit)

class ExternalSolver(CoverSolver):
    name = "external"

    def __init__(self, command: str) -> None:
        self.command = command

    def solve(self, problem, time_limit=3600.0, gap_limit=0.0):
        from .external import run_external
        return run_external(self.command, problem, time_limit)

def getSolver(solver="internal") -> CoverSolver:
    if not SolverTypes.is_known(solver):
        raise ValueError(f"Unknown solver: {solver}")

    # Normalize to enum
    command = None
    if isinstance(solver, str):
        name, _, command = solver.partition(":")
        solver = SolverTypes[name] if name in SolverTypes.__members__ else SolverTypes(name)

    if solver == SolverTypes.INTERNAL:
        return InternalSolver()
    elif solver == SolverTypes.EXTERNAL:
        if not command:
            raise ValueError("The external solver needs a command: external:<command with {lp} and {sol}>")
        return ExternalSolver(command)

    raise NotImplementedError(f"Solver '{solver}' is not implemented.")
