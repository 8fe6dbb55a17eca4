"""
Solution types returned by the pipeline and the oracle, with JSON round trip and a cost audit.
"""

import json
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

logger = logging.getLogger(__name__)

class PipelineError(Exception):
    """Base class for pipeline errors."""
    pass

class SolutionAuditError(PipelineError):
    """
    Raised when a solution breaks one of its invariants.
    Inputs:
    - check: what failed
    - info: Optional additional information about the error
    """
    def __init__(self, check, info=None):
        self.check = check
        self.info = info
        super().__init__(self.__str__())

    def __str__(self) -> str:
        return f"Solution audit failed: {self.check}." + (f" {self.info}" if self.info else "")

@dataclass
class StopVisit:
    key: str
    location: str
    students: tuple
    door_to_door: tuple = ()

@dataclass
class BusRoute:
    """path lists every location driven through in order, ending at the school."""
    trip_id: int
    stops: list
    path: tuple
    travel_time: float
    distance: float
    miles: float
    cost: float

    @property
    def load(self) -> int:
        return sum(len(v.students) for v in self.stops)

    def students(self) -> list:
        return [s for v in self.stops for s in v.students]

@dataclass
class AlternateAssignment:
    student: str
    mode: str
    miles: float
    cost: float
    home: str = ""

@dataclass
class Diagnostics:
    status: str = "optimal"
    gap: float = 0.0
    bound: float = 0.0
    n_trips: int = 0
    n_stops: int = 0
    n_pickups: int = 0
    n_edges: int = 0
    beta: float | None = None
    gamma: float | None = None
    n_max: int | None = None
    compressed: bool = True
    evaluator: str = "insertion"
    cover_nodes: int = 0
    runtimes: dict = field(default_factory=dict)

@dataclass
class Solution:
    instance: str
    routes: list
    alternates: list
    total_cost: float
    diagnostics: Diagnostics
    school: str = ""
    coordinate_kind: str = "planar"
    coordinates: dict = field(default_factory=dict)

    @property
    def bus_count(self) -> int:
        return len(self.routes)

    @property
    def students_alt(self) -> int:
        return len(self.alternates)

    @property
    def runtime(self) -> float:
        return float(sum(self.diagnostics.runtimes.values()))

    def assignment(self) -> dict:
        """Student id -> ("bus", trip id) or (mode, None)."""
        out = {}
        for route in self.routes:
            for s in route.students():
                out.setdefault(s, []).append(("bus", route.trip_id))
        for alt in self.alternates:
            out.setdefault(alt.student, []).append((alt.mode, None))
        return out

    def audit(self, instance, tol: float = 1e-6) -> None:
        """
        Check exactly-once assignment, the fleet limit and the total cost
        bus_fixed * K + bus_per_mile * miles + alternate costs.

        :raises SolutionAuditError: on the first failed check
        """
        placed = self.assignment()
        expected = {s.id for s in instance.students}
        missing = sorted(expected - set(placed))
        if missing:
            raise SolutionAuditError("every student is assigned", f"missing: {missing}")
        twice = sorted(s for s, where in placed.items() if len(where) > 1)
        if twice:
            raise SolutionAuditError("every student is assigned once", f"repeated: {twice}")
        extra = sorted(set(placed) - expected)
        if extra:
            raise SolutionAuditError("only instance students are assigned", f"unknown: {extra}")
        if instance.fleet_limit is not None and self.bus_count > instance.fleet_limit:
            raise SolutionAuditError("bus count within the fleet limit", f"{self.bus_count} > {instance.fleet_limit}")
        for route in self.routes:
            if route.load > instance.capacity:
                raise SolutionAuditError("route load within capacity", f"trip {route.trip_id} carries {route.load}")
            if route.travel_time > instance.t_max + tol:
                raise SolutionAuditError("route time within t_max", f"trip {route.trip_id} takes {route.travel_time}")

        cost = instance.cost
        expected_cost = cost.bus_fixed * self.bus_count + cost.bus_per_mile * sum(r.miles for r in self.routes)
        expected_cost += sum(cost.alt_per_mile[a.mode] * a.miles for a in self.alternates)
        if not math.isclose(expected_cost, self.total_cost, rel_tol=1e-9, abs_tol=tol):
            raise SolutionAuditError("total cost matches the cost model", f"{self.total_cost} != {expected_cost}")

    def to_dict(self, include_timings: bool = False) -> dict:
        data = asdict(self)
        if not include_timings:
            data["diagnostics"].pop("runtimes")
        data["bus_count"] = self.bus_count
        data["students_alt"] = self.students_alt
        data["coordinates"] = {k: list(v) for k, v in sorted(self.coordinates.items())}
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "Solution":
        routes = []
        for r in data["routes"]:
            stops = [StopVisit(key=v["key"], location=v["location"], students=tuple(v["students"]),
                               door_to_door=tuple(v.get("door_to_door", ()))) for v in r["stops"]]
            routes.append(BusRoute(trip_id=r["trip_id"], stops=stops, path=tuple(r["path"]),
                                   travel_time=r["travel_time"], distance=r["distance"], miles=r["miles"], cost=r["cost"]))
        alternates = [AlternateAssignment(**a) for a in data["alternates"]]
        diag = dict(data["diagnostics"])
        diag.setdefault("runtimes", {})
        return cls(instance=data["instance"], routes=routes, alternates=alternates, total_cost=data["total_cost"],
                   diagnostics=Diagnostics(**diag), school=data.get("school", ""),
                   coordinate_kind=data.get("coordinate_kind", "planar"),
                   coordinates={k: tuple(v) for k, v in data.get("coordinates", {}).items()})

    def to_json(self, include_timings: bool = False) -> str:
        return json.dumps(self.to_dict(include_timings), indent=2, sort_keys=True)

    def __str__(self) -> str:
        return (f"[Solution]({self.instance}) cost={self.total_cost:.2f} buses={self.bus_count} "
                f"alternate={self.students_alt} status={self.diagnostics.status}")

def load_solution(path) -> Solution:
    with open(Path(path), "r") as fobj:
        return Solution.from_dict(json.load(fobj))
