"""
Open path TSP to the school: a linear-time insertion heuristic and an exact subset DP for small
node sets, wrapped as route evaluators.
"""

import logging
from abc import ABC, abstractmethod
from enum import Enum

import numpy as np

from .configuration import TripConfiguration, TripKind
from .context import RoutingContext

logger = logging.getLogger(__name__)

class TripError(Exception):
    """Base class for trip construction errors."""
    pass

class PathTspSizeError(TripError):
    """
    Raised when the exact solver is asked for more nodes than it supports.
    Inputs:
    - size: number of nodes requested
    - limit: exact solver limit
    """
    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(self.__str__())

    def __str__(self) -> str:
        return (f"Exact path TSP supports at most {self.limit} nodes, got {self.size}. "
                f"Use the insertion heuristic for larger trips.")

def insertion_path_tsp(route, route_time: float, new_node: int, context: RoutingContext):
    """
    Insert new_node into route at the single cheapest position, keeping the order of the others.

    Positions are tried front to back: before the first pickup, between consecutive pickups, and
    between the last pickup and the school.  The first strict minimum wins.

    :return: (route, travel time, distance)
    """
    T = context.time
    school = context.school
    service = float(context.service[new_node])
    route = tuple(route)
    if not route:
        new_route = (new_node,)
        return new_route, float(T[new_node, school]) + service, context.route_distance(new_route)

    best_delta = float(T[new_node, route[0]])
    best_pos = 0
    stops = route + (school,)
    for pos in range(len(route)):
        a, b = stops[pos], stops[pos + 1]
        delta = float(T[a, new_node] + T[new_node, b] - T[a, b])
        if delta < best_delta:
            best_delta, best_pos = delta, pos + 1
    new_route = route[:best_pos] + (new_node,) + route[best_pos:]
    return new_route, route_time + best_delta + service, context.route_distance(new_route)

def exact_path_tsp(node_set, context: RoutingContext, limit: int = 12):
    """
    Fastest open path visiting node_set and ending at the school, by dynamic programming over
    subsets.  Ties resolve to the lowest index.

    :return: (route, travel time, distance)
    :raises PathTspSizeError: len(node_set) > limit
    """
    nodes = sorted(node_set)
    k = len(nodes)
    if k > limit:
        raise PathTspSizeError(k, limit)
    if k == 0:
        return (), 0.0, 0.0
    idx = np.array(nodes)
    T = context.time[np.ix_(idx, idx)]
    to_school = context.time[idx, context.school]

    full = (1 << k) - 1
    cost = np.full((1 << k, k), np.inf)
    parent = np.full((1 << k, k), -1, dtype=int)
    for j in range(k):
        cost[1 << j, j] = 0.0
    for mask in range(1, full + 1):
        row = cost[mask]
        if not np.isfinite(row).any():
            continue
        # extend the path ending at j to each node outside the mask
        cand = row[:, None] + T
        best_from = np.argmin(cand, axis=0)
        best_val = cand[best_from, np.arange(k)]
        for nxt in range(k):
            if mask >> nxt & 1:
                continue
            target = mask | (1 << nxt)
            if best_val[nxt] < cost[target, nxt]:
                cost[target, nxt] = best_val[nxt]
                parent[target, nxt] = best_from[nxt]

    totals = cost[full] + to_school
    last = int(np.argmin(totals))
    if not np.isfinite(totals[last]):
        # some leg is unreachable, no path exists
        return tuple(nodes), float("inf"), float("inf")
    order = []
    mask, cur = full, last
    while cur != -1:
        order.append(cur)
        prev = parent[mask, cur]
        mask ^= 1 << cur
        cur = prev
    route = tuple(nodes[j] for j in reversed(order))
    travel_time = float(totals[last] + context.service[idx].sum())
    return route, travel_time, context.route_distance(route)

class EvaluatorTypes(Enum):
    INSERTION = "insertion"
    EXACT = "exact"

    @staticmethod
    def is_known(val):
        if isinstance(val, EvaluatorTypes):
            return True
        if isinstance(val, str):
            return val in EvaluatorTypes.__members__ or val in (e.value for e in EvaluatorTypes)
        return False

class RouteEvaluator(ABC):
    """
    Turns a pickup node set into a priced bus TripConfiguration.  Feasibility is left to the
    caller (see is_feasible).
    """
    required_attributes = ["kind"]

    def __init__(self, context: RoutingContext) -> None:
        self.context = context

    def __init_subclass__(cls, **kwargs):
        super().__init_subclass__(**kwargs)

        for attr in cls.required_attributes:
            if not hasattr(cls, attr):
                raise TypeError(f"{cls.__name__} must define '{attr}'")

    def make_trip(self, route, travel_time: float, distance: float) -> TripConfiguration:
        ctx = self.context
        return TripConfiguration(route=tuple(route), node_set=frozenset(route), travel_time=travel_time,
                                 distance=distance, load=ctx.load(route), members=ctx.members(route),
                                 cost=ctx.bus_cost(distance), kind=TripKind.BUS)

    def is_feasible(self, trip: TripConfiguration) -> bool:
        return trip.load <= self.context.capacity and self.context.within_time(trip.travel_time)

    def _insert_all(self, node_set) -> TripConfiguration:
        route, travel_time, distance = (), 0.0, 0.0
        for node in sorted(node_set):
            route, travel_time, distance = insertion_path_tsp(route, travel_time, node, self.context)
        return self.make_trip(route, travel_time, distance)

    def _extend_by_insertion(self, parents, node_set) -> TripConfiguration:
        node_set = frozenset(node_set)
        best = None
        for parent in parents:
            extra = node_set - parent.node_set
            if len(extra) != 1:
                raise ValueError(f"Parent {sorted(parent.node_set)} is not a (k-1)-subset of {sorted(node_set)}")
            route, travel_time, distance = insertion_path_tsp(parent.route, parent.travel_time, next(iter(extra)), self.context)
            if best is None or travel_time < best[1]:
                best = (route, travel_time, distance)
        if best is None:
            return self._insert_all(node_set)
        return self.make_trip(*best)

    @abstractmethod
    def evaluate(self, node_set) -> TripConfiguration:
        pass

    @abstractmethod
    def extend(self, parents, node_set) -> TripConfiguration:
        """Evaluate node_set from stored trips over its (k-1)-subsets, keeping the best route."""
        pass

    def __repr__(self) -> str:
        return f"[{type(self).__name__}]({self.kind})" # type: ignore

class InsertionEvaluator(RouteEvaluator):
    kind = EvaluatorTypes.INSERTION

    def evaluate(self, node_set) -> TripConfiguration:
        return self._insert_all(node_set)

    def extend(self, parents, node_set) -> TripConfiguration:
        return self._extend_by_insertion(parents, node_set)

class ExactEvaluator(RouteEvaluator):
    """Exact up to limit nodes, insertion beyond."""
    kind = EvaluatorTypes.EXACT

    def __init__(self, context: RoutingContext, limit: int = 12) -> None:
        super().__init__(context)
        self.limit = limit

    def evaluate(self, node_set) -> TripConfiguration:
        if len(node_set) <= self.limit:
            return self.make_trip(*exact_path_tsp(node_set, self.context, self.limit))
        return self._insert_all(node_set)

    def extend(self, parents, node_set) -> TripConfiguration:
        if len(node_set) <= self.limit:
            return self.evaluate(node_set)
        return self._extend_by_insertion(parents, node_set)
