"""
Weighted set cover problem and solution types, plus LP text I/O.

The LP text is CPLEX LP format with one binary y_<set id> per set, a covering row c_<element>
per element and an optional 'fleet' row bounding the number of bus sets.
"""

import logging
import math
import re
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

logger = logging.getLogger(__name__)

class CoverError(Exception):
    """Base class for set cover errors."""
    pass

class InfeasibleCoverError(CoverError):
    """
    Raised when some elements cannot be covered by any set.
    Inputs:
    - elements: the uncovered element ids
    """
    def __init__(self, elements):
        self.elements = tuple(elements)
        super().__init__(self.__str__())

    def __str__(self) -> str:
        if not self.elements:
            return "Cover infeasible under the fleet limit."
        shown = ", ".join(str(e) for e in self.elements[:20])
        more = f" (+{len(self.elements) - 20} more)" if len(self.elements) > 20 else ""
        return f"Cover infeasible; no set covers: {shown}{more}"

class CoverStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE_GAP = "feasible-gap"
    INFEASIBLE = "infeasible"

    @staticmethod
    def is_known(val):
        if isinstance(val, CoverStatus):
            return True
        return val in (s.value for s in CoverStatus)

@dataclass
class CoverProblem:
    """
    elements: element ids to cover
    sets: set id -> frozenset of element ids
    weights: set id -> non-negative weight
    bus_sets: ids of sets counted against fleet_limit
    fleet_limit: cap on the number of chosen bus sets, None when unbounded
    """
    elements: tuple
    sets: dict
    weights: dict
    bus_sets: frozenset = frozenset()
    fleet_limit: int | None = None

    def __post_init__(self):
        self.elements = tuple(self.elements)
        self.sets = {k: frozenset(v) for k, v in self.sets.items()}
        self.bus_sets = frozenset(self.bus_sets)
        if set(self.sets) != set(self.weights):
            raise ValueError("Every set needs exactly one weight.")
        for sid, w in self.weights.items():
            if not w >= 0 or math.isinf(w):
                raise ValueError(f"Set {sid} has invalid weight {w}")

    @classmethod
    def from_trip_list(cls, trip_list, students, fleet_limit=None) -> "CoverProblem":
        """Students are the elements; every stored trip is a set weighted by its cost."""
        sets, weights, bus = {}, {}, set()
        for trip in trip_list:
            sets[trip.id] = frozenset(trip.members)
            weights[trip.id] = trip.cost
            if trip.is_bus:
                bus.add(trip.id)
        return cls(tuple(sorted(students)), sets, weights, frozenset(bus), fleet_limit)

    def add_set(self, sid, members, weight, bus=False) -> None:
        if sid in self.sets:
            raise ValueError(f"Set {sid} already present")
        self.sets[sid] = frozenset(members)
        self.weights[sid] = float(weight)
        if bus:
            self.bus_sets = self.bus_sets | {sid}

    def set_ids(self) -> list:
        return list(self.sets)

    def uncoverable(self) -> list:
        covered = set().union(*self.sets.values()) if self.sets else set()
        return [e for e in self.elements if e not in covered]

    def incidence(self, set_ids=None) -> np.ndarray:
        """Element x set 0/1 matrix in element order and the given (or insertion) set order."""
        set_ids = self.set_ids() if set_ids is None else set_ids
        row = {e: i for i, e in enumerate(self.elements)}
        mat = np.zeros((len(self.elements), len(set_ids)), dtype=float)
        for col, sid in enumerate(set_ids):
            for e in self.sets[sid]:
                if e in row:
                    mat[row[e], col] = 1.0
        return mat

    def objective(self, chosen) -> float:
        return float(sum(self.weights[sid] for sid in chosen))

    def is_cover(self, chosen) -> bool:
        covered = set()
        for sid in chosen:
            covered |= self.sets[sid]
        return all(e in covered for e in self.elements)

    def is_feasible(self, chosen) -> bool:
        if not self.is_cover(chosen):
            return False
        if self.fleet_limit is not None:
            return sum(1 for sid in chosen if sid in self.bus_sets) <= self.fleet_limit
        return True

    def to_lp(self) -> str:
        lines = ["\\ weighted set cover", "Minimize"]
        terms = " + ".join(f"{_num(self.weights[sid])} y_{sid}" for sid in self.sets)
        lines.append(f" obj: {terms or '0'}")
        if self.bus_sets:
            lines.insert(1, "\\ bus " + " ".join(f"y_{sid}" for sid in self.sets if sid in self.bus_sets))
        lines.append("Subject To")
        covering = {e: [] for e in self.elements}
        for sid, members in self.sets.items():
            for e in members:
                if e in covering:
                    covering[e].append(sid)
        for e, sids in covering.items():
            lhs = " + ".join(f"y_{sid}" for sid in sids) or "0 y_none"
            lines.append(f" c_{e}: {lhs} >= 1")
        if self.fleet_limit is not None:
            lhs = " + ".join(f"y_{sid}" for sid in self.sets if sid in self.bus_sets) or "0 y_none"
            lines.append(f" fleet: {lhs} <= {self.fleet_limit}")
        lines.append("Binary")
        lines.extend(f" y_{sid}" for sid in self.sets)
        lines.append("End")
        return "\n".join(lines) + "\n"

    @classmethod
    def from_lp(cls, text: str) -> "CoverProblem":
        """Parse LP text written by to_lp.  Integer-looking ids come back as int."""
        weights, sets, elements, bus, fleet = {}, {}, [], set(), None
        section = None
        for raw in text.splitlines():
            line = raw.strip()
            if line.startswith("\\ bus "):
                bus = {_id(tok[2:]) for tok in line[6:].split()}
                continue
            if not line or line.startswith("\\"):
                continue
            low = line.lower()
            if low in ("minimize", "subject to", "binary", "end"):
                section = low
                continue
            if section == "minimize":
                body = line.split(":", 1)[1]
                for coef, name in re.findall(r"([0-9.eE+-]+)\s+y_(\S+)", body):
                    sid = _id(name)
                    weights[sid] = float(coef)
                    sets.setdefault(sid, set())
            elif section == "subject to":
                name, body = line.split(":", 1)
                names = [_id(n) for n in re.findall(r"y_(\S+)", body) if n != "none"]
                if name.strip() == "fleet":
                    fleet = int(body.split("<=")[1])
                else:
                    element = _id(name.strip()[2:])
                    elements.append(element)
                    for sid in names:
                        sets[sid].add(element)
        return cls(tuple(elements), sets, weights, frozenset(bus), fleet)

def _num(val: float) -> str:
    return repr(float(val))

def _id(token: str):
    return int(token) if re.fullmatch(r"-?\d+", token) else token

@dataclass
class CoverSolution:
    chosen: tuple
    objective: float
    status: CoverStatus
    gap: float = 0.0
    bound: float = 0.0
    history: list = field(default_factory=list)
    uncovered: tuple = ()
    nodes: int = 0

    def __str__(self) -> str:
        return (f"[CoverSolution]({self.status.value}) objective={self.objective:.4f} "
                f"bound={self.bound:.4f} gap={self.gap:.4%} sets={len(self.chosen)} nodes={self.nodes}")
