"""
Level-by-level enumeration of feasible bus trips on a shareability network.

Trips of size k+1 grow from stored trips of size k by adding one adjacent pickup.  Without a
quasi-clique tolerance every trip is a clique whose (k)-subsets are all stored, which keeps the
list downward closed.  With a tolerance gamma a candidate may miss up to gamma * k of the trip's
nodes; a node set is accepted when any of its stored parents passes that test, and is evaluated
once, from all of its stored parents.
"""

import logging
import time

from ..model.instance import Instance
from ..model.metric import Metric
from .configuration import TripConfiguration, TripKind, TripList
from .tsp import InsertionEvaluator, RouteEvaluator, TripError

logger = logging.getLogger(__name__)

class TripCapExceededError(TripError):
    """
    Raised when enumeration stores more trips than allowed.
    Inputs:
    - cap: the configured limit
    - level: trip size being enumerated when the cap was hit
    """
    def __init__(self, cap, level):
        self.cap = cap
        self.level = level
        super().__init__(self.__str__())

    def __str__(self) -> str:
        return (f"Trip enumeration exceeded {self.cap} trips at size {self.level}. "
                f"Use edge compression (smaller beta) or a quasi-clique tolerance to shrink the network.")

def clique_check(trip, candidate, network) -> bool:
    """True when candidate is adjacent to every node of trip."""
    nodes = trip.node_set if isinstance(trip, TripConfiguration) else trip
    return all(network.has_edge(n, candidate) for n in nodes)

def quasi_clique_check(trip, candidate, network, gamma: float) -> bool:
    """False when more than gamma * |trip| nodes of trip are not adjacent to candidate."""
    nodes = trip.node_set if isinstance(trip, TripConfiguration) else trip
    missing = sum(1 for n in nodes if not network.has_edge(n, candidate))
    return not missing > gamma * len(nodes)

def alternate_trips(instance: Instance, metric: Metric, students=None) -> list[TripConfiguration]:
    """One trip per student and enabled alternate mode, priced on the direct home -> school distance."""
    chosen = sorted(instance.students if students is None else students, key=lambda s: s.id)
    trips = []
    for student in chosen:
        distance = metric.dist(student.home, instance.school)
        travel_time = metric.time(student.home, instance.school)
        for mode, rate in instance.cost.enabled_modes():
            trips.append(TripConfiguration(route=(student.home, instance.school), node_set=frozenset((student.id,)),
                                           travel_time=travel_time, distance=distance, load=1,
                                           members=(student.id,), cost=rate * metric.to_miles(distance),
                                           kind=TripKind.ALTERNATE, mode=mode))
    return trips

def enumerate_trips(network, instance: Instance, metric: Metric, gamma: float | None = None,
                    tsp: RouteEvaluator | None = None, trip_cap: int = 5_000_000, students=None) -> TripList:
    """
    :param network: ShareabilityNetwork
    :param gamma: quasi-clique tolerance in [0, 1), None for strict cliques
    :param tsp: route evaluator, insertion heuristic by default
    :param trip_cap: maximum number of stored trips
    :param students: students to create alternate trips for (all when None)
    :raises TripCapExceededError: more than trip_cap trips
    """
    if gamma is not None and not 0 <= gamma < 1:
        raise ValueError(f"gamma must be in [0, 1), got {gamma}")
    tsp = InsertionEvaluator(network.context) if tsp is None else tsp
    context = network.context
    trips = TripList()
    started = time.monotonic()

    def store(trip):
        if len(trips) >= trip_cap:
            logger.error(f"Trip cap {trip_cap} reached at size {trip.size}")
            raise TripCapExceededError(trip_cap, trip.size)
        return trips.add(trip)

    for node in network.nodes():
        trip = tsp.evaluate((node,))
        if tsp.is_feasible(trip):
            store(trip)
        else:
            logger.debug(f"Pickup {node} cannot be served alone (time {trip.travel_time:.1f}, load {trip.load})")

    k = 1
    while trips.level(k):
        if gamma is None:
            _grow_cliques(trips, k, network, context, tsp, store)
        else:
            _grow_quasi_cliques(trips, k, network, context, tsp, store, gamma)
        logger.debug(f"Size {k + 1}: {len(trips.level(k + 1))} trips")
        k += 1

    for trip in alternate_trips(instance, metric, students):
        store(trip)
    logger.info(f"Enumerated {trips} in {time.monotonic() - started:.3f}s")
    return trips

def _grow_cliques(trips, k, network, context, tsp, store) -> None:
    for trip in trips.level(k):
        top = max(trip.node_set)
        anchor = min(trip.node_set, key=lambda n: (len(network.neighbors(n)), n))
        for cand in sorted(c for c in network.neighbors(anchor) if c > top):
            if not clique_check(trip, cand, network):
                continue
            node_set = trip.node_set | {cand}
            if not context.within_capacity(node_set):
                continue
            parents = [trips.find(node_set - {n}) for n in sorted(node_set)]
            if any(p is None for p in parents):
                continue
            new = tsp.extend(parents, node_set)
            if tsp.is_feasible(new):
                store(new)

def _grow_quasi_cliques(trips, k, network, context, tsp, store, gamma) -> None:
    rejected = set()
    for trip in trips.level(k):
        touching = set()
        for n in trip.node_set:
            touching |= network.neighbors(n)
        for cand in sorted(touching - trip.node_set):
            node_set = trip.node_set | {cand}
            if node_set in trips or node_set in rejected:
                continue
            if not quasi_clique_check(trip, cand, network, gamma):
                continue
            if not context.within_capacity(node_set):
                rejected.add(node_set)
                continue
            parents = [p for p in (trips.find(node_set - {n}) for n in sorted(node_set)) if p is not None]
            new = tsp.extend(parents, node_set)
            if tsp.is_feasible(new):
                store(new)
            else:
                rejected.add(node_set)
