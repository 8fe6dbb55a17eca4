"""
Problem data model for the school bus routing problem.

An Instance bundles the students, the candidate bus stops, the school and depot, fleet and
capacity limits, the cost model and either a road network or a planar point set.  All types
here are frozen dataclasses - build a new one rather than editing in place.

Location ids are strings throughout.  Distances on road networks are metres, times seconds.
Planar (Euclidean) instances use their native unit for both.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import networkx as nx

logger = logging.getLogger(__name__)

class InstanceError(Exception):
    """Base class for instance related errors."""
    pass

class InstanceParseError(InstanceError):
    """
    Raised when an instance file cannot be parsed.
    Inputs:
    - path: file being parsed
    - line: 1-indexed line number, when known
    - field: field or column name, when known
    - info: Optional additional information about the error
    """
    def __init__(self, path, line=None, field=None, info=None):
        self.path = path
        self.line = line
        self.field = field
        self.info = info
        super().__init__(self.__str__())

    def __str__(self) -> str:
        base = f"Unable to parse instance file '{self.path}'"
        if self.line is not None:
            base += f" at line {self.line}"
        if self.field is not None:
            base += f" (field '{self.field}')"
        base += "."
        if self.info:
            base += f" {self.info}"
        return base

class InstanceValidationError(InstanceError):
    """
    Raised when instance data violates an invariant.
    Inputs:
    - invariant: short name of the violated invariant
    - info: Optional additional information about the error
    """
    def __init__(self, invariant: str, info=None):
        self.invariant = invariant
        self.info = info
        super().__init__(self.__str__())

    def __str__(self) -> str:
        return f"Invalid instance: {self.invariant}." + (f" {self.info}" if self.info else "")

class UnreachableNodeError(InstanceError):
    """
    Raised when a node cannot reach (or be reached from) a required location.
    Inputs:
    - node: the offending node id
    - target: the school or depot node it fails to reach
    """
    def __init__(self, node, target):
        self.node = node
        self.target = target
        super().__init__(self.__str__())

    def __str__(self) -> str:
        return f"Node '{self.node}' cannot reach '{self.target}' on the road network."

class MetricKind(Enum):
    SHORTEST_PATH = "shortest-path"
    EUCLIDEAN = "euclidean"

@dataclass(frozen=True)
class Student:
    id: str
    home: str
    max_walk: float = 0.0
    door_to_door: bool = True

    def __post_init__(self):
        if self.max_walk < 0:
            raise InstanceValidationError("max_walk >= 0", f"student {self.id} has max_walk {self.max_walk}")
        if self.door_to_door != (self.max_walk == 0):
            raise InstanceValidationError("door_to_door iff max_walk == 0",
                                          f"student {self.id}: door_to_door={self.door_to_door}, max_walk={self.max_walk}")

@dataclass(frozen=True)
class CostModel:
    """
    Cost rates.  bus_fixed is per bus per day, the per-mile rates are per mile driven (or per
    native unit on planar instances).  An alternate mode with an infinite rate is disabled.
    """
    bus_fixed: float = 200.0
    bus_per_mile: float = 1.0
    alt_per_mile: dict = field(default_factory=lambda: {"dedicated": 2.0})

    def __post_init__(self):
        rates = [("bus_fixed", self.bus_fixed), ("bus_per_mile", self.bus_per_mile)]
        rates.extend((f"alt_per_mile[{mode}]", rate) for mode, rate in self.alt_per_mile.items())
        for name, rate in rates:
            if math.isnan(rate) or rate < 0:
                raise InstanceValidationError("cost rates >= 0", f"{name} = {rate}")
        if math.isinf(self.bus_fixed) or math.isinf(self.bus_per_mile):
            raise InstanceValidationError("bus cost rates finite")

    def enabled_modes(self) -> list[tuple[str, float]]:
        """Alternate modes with a finite rate, sorted by mode id."""
        return sorted((mode, rate) for mode, rate in self.alt_per_mile.items() if math.isfinite(rate))

@dataclass(frozen=True)
class RoadNetwork:
    """
    Directed road graph.  Edges are (u, v, length_m, time_s).  Coordinates are (lat, lon) when
    coordinates == "latlon" and (x, y) when "planar".
    """
    nodes: dict
    edges: tuple
    coordinates: str = "latlon"

    def __post_init__(self):
        if self.coordinates not in ("latlon", "planar"):
            raise InstanceValidationError("network coordinates are latlon or planar", self.coordinates)
        for u, v, length, time in self.edges:
            if u not in self.nodes or v not in self.nodes:
                raise InstanceValidationError("every edge endpoint is a declared node", f"edge ({u}, {v})")
            if not (length > 0 and time > 0):
                raise InstanceValidationError("edge lengths and times are strictly positive",
                                              f"edge ({u}, {v}) length={length} time={time}")

    def to_graph(self) -> nx.DiGraph:
        """Build a networkx DiGraph, keeping the fastest of any parallel edges."""
        graph = nx.DiGraph()
        graph.add_nodes_from(self.nodes)
        for u, v, length, time in self.edges:
            if graph.has_edge(u, v) and graph[u][v]["time"] <= time:
                continue
            graph.add_edge(u, v, length=float(length), time=float(time))
        return graph

@dataclass(frozen=True)
class Instance:
    name: str
    students: tuple
    candidate_stops: tuple
    school: str
    depot: str
    cost: CostModel = field(default_factory=CostModel)
    capacity: int = 72
    t_max: float = 3600.0
    fleet_limit: int | None = None
    stop_delay: tuple = (15.0, 5.0)
    network: RoadNetwork | None = None
    points: dict | None = None

    def __post_init__(self):
        if (self.network is None) == (self.points is None):
            raise InstanceValidationError("exactly one of network or points")
        if not self.students:
            raise InstanceValidationError("empty student set")
        ids = [s.id for s in self.students]
        if len(set(ids)) != len(ids):
            raise InstanceValidationError("student ids are unique")
        if len(set(self.candidate_stops)) != len(self.candidate_stops):
            raise InstanceValidationError("candidate stop ids are unique")
        if not isinstance(self.capacity, int) or self.capacity < 1:
            raise InstanceValidationError("capacity >= 1", f"capacity = {self.capacity}")
        if not self.t_max > 0:
            raise InstanceValidationError("t_max > 0", f"t_max = {self.t_max}")
        if self.fleet_limit is not None and self.fleet_limit < 1:
            raise InstanceValidationError("fleet_limit >= 1 or unbounded", f"fleet_limit = {self.fleet_limit}")
        if len(self.stop_delay) != 2 or min(self.stop_delay) < 0:
            raise InstanceValidationError("stop_delay is a non-negative (base, per_student) pair", str(self.stop_delay))

        declared = self.locations()
        referenced = [("school", self.school), ("depot", self.depot)]
        referenced.extend((f"home of {s.id}", s.home) for s in self.students)
        referenced.extend(("candidate stop", m) for m in self.candidate_stops)
        for what, node in referenced:
            if node not in declared:
                raise InstanceValidationError("referenced nodes are declared", f"{what} '{node}' not found")

    @property
    def metric_kind(self) -> MetricKind:
        return MetricKind.EUCLIDEAN if self.points is not None else MetricKind.SHORTEST_PATH

    def locations(self) -> dict:
        """Location id to coordinate map."""
        return self.points if self.points is not None else self.network.nodes # type: ignore

    def coordinates(self, node) -> tuple:
        return tuple(self.locations()[node])

    def node_set(self) -> list[str]:
        """Sorted node set N = homes + candidate stops + depot + school."""
        nodes = {s.home for s in self.students}
        nodes.update(self.candidate_stops)
        nodes.update((self.school, self.depot))
        return sorted(nodes)

    def student(self, student_id):
        for s in self.students:
            if s.id == student_id:
                return s
        raise KeyError(student_id)

    def stop_delay_for(self, load: int) -> float:
        base, per_student = self.stop_delay
        return base + per_student * load

    def door_to_door_count(self) -> int:
        return sum(1 for s in self.students if s.door_to_door)

    def __str__(self) -> str:
        return (f"[Instance]({self.name}) {len(self.students)} students, {len(self.candidate_stops)} stops, "
                f"C={self.capacity}, t_max={self.t_max}, {self.metric_kind.value}")
