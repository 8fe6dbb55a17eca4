"""
Trip configurations and the trip list produced by enumeration.
"""

import logging
from collections import defaultdict
from dataclasses import dataclass, replace
from enum import Enum
from pathlib import Path

logger = logging.getLogger(__name__)

class TripKind(Enum):
    BUS = "bus"
    ALTERNATE = "alternate"

@dataclass(frozen=True)
class TripConfiguration:
    """
    A bus trip visits the pickups in route order and ends at the school.  An alternate trip
    carries one student from home (route[0]) to the school (route[1]); its node_set holds the
    student id.
    """
    route: tuple
    node_set: frozenset
    travel_time: float
    distance: float
    load: int
    members: tuple
    cost: float
    kind: TripKind = TripKind.BUS
    mode: str | None = None
    id: int = -1

    @property
    def is_bus(self) -> bool:
        return self.kind == TripKind.BUS

    @property
    def size(self) -> int:
        return len(self.node_set)

    def describe(self) -> str:
        if self.is_bus:
            stops = " ".join(str(n) for n in self.route)
            return f"{self.id} bus [{stops}] time={self.travel_time:.2f} dist={self.distance:.2f} load={self.load} cost={self.cost:.4f}"
        return f"{self.id} {self.mode} {self.members[0]} dist={self.distance:.2f} cost={self.cost:.4f}"

class TripList(object):
    """Append-only store.  Ids are positions in insertion order."""

    def __init__(self) -> None:
        self.trips = []
        self.levels = defaultdict(list)
        self.index = defaultdict(list)
        self._lookup = {}

    def add(self, trip: TripConfiguration) -> TripConfiguration:
        if trip.is_bus and trip.node_set in self._lookup:
            raise ValueError(f"Bus trip over {sorted(trip.node_set)} already stored")
        trip = replace(trip, id=len(self.trips))
        self.trips.append(trip)
        if trip.is_bus:
            self._lookup[trip.node_set] = trip.id
            self.levels[trip.size].append(trip.id)
            for node in trip.node_set:
                self.index[node].append(trip.id)
        return trip

    def find(self, node_set):
        """Stored bus trip over exactly node_set, or None."""
        tid = self._lookup.get(frozenset(node_set))
        return None if tid is None else self.trips[tid]

    def __contains__(self, node_set) -> bool:
        return frozenset(node_set) in self._lookup

    def __len__(self) -> int:
        return len(self.trips)

    def __iter__(self):
        return iter(self.trips)

    def __getitem__(self, tid) -> TripConfiguration:
        return self.trips[tid]

    def level(self, k: int) -> list[TripConfiguration]:
        return [self.trips[tid] for tid in self.levels.get(k, [])]

    def bus_trips(self) -> list[TripConfiguration]:
        return [t for t in self.trips if t.is_bus]

    def alternate_trips(self) -> list[TripConfiguration]:
        return [t for t in self.trips if not t.is_bus]

    def bus_count(self) -> int:
        return len(self._lookup)

    def max_level(self) -> int:
        return max(self.levels, default=0)

    def dump(self, path) -> Path:
        """One line per trip, sorted by (kind, size, node ids)."""
        path = Path(path)
        def key(t):
            return (t.kind.value, t.size, tuple(sorted(t.node_set)), t.mode or "")
        with open(path, "w") as fobj:
            for trip in sorted(self.trips, key=key):
                fobj.write(trip.describe() + "\n")
        logger.info(f"Wrote {len(self.trips)} trips to {path}")
        return path

    def __repr__(self) -> str:
        return f"[TripList] {self.bus_count()} bus trips up to size {self.max_level()}, {len(self.trips) - self.bus_count()} alternate"
