"""
Exhaustive reference solver for tiny instances.

Every student is picked up at home.  The optimum is found over all set partitions of the
students, each part served by one bus trip priced with the same route evaluator as the
pipeline, or each of its students sent by their cheapest alternate mode.
"""

import logging
import math
import time
from functools import lru_cache

from ..model.instance import Instance
from ..model.metric import compute_metric
from ..trips.configuration import TripList
from ..trips.context import RoutingContext, pickups_from_students
from ..trips.enumeration import alternate_trips
from .solution import Diagnostics, PipelineError, Solution
from .solve import SolveParams, assemble_solution, make_evaluator

logger = logging.getLogger(__name__)

class OracleSizeError(PipelineError):
    """
    Raised when the oracle is asked to enumerate too many students.
    Inputs:
    - size: number of students
    - limit: configured oracle limit
    """
    def __init__(self, size, limit):
        self.size = size
        self.limit = limit
        super().__init__(self.__str__())

    def __str__(self) -> str:
        return f"The exhaustive oracle handles at most {self.limit} students, instance has {self.size}."

def brute_force_oracle(instance: Instance, params: SolveParams | None = None) -> Solution:
    """
    :raises OracleSizeError: more students than params.oracle_limit
    :raises PipelineError: no partition is feasible
    """
    params = SolveParams.from_defaults() if params is None else params
    n = len(instance.students)
    if n > params.oracle_limit:
        logger.error(f"Oracle refused {n} students (limit {params.oracle_limit})")
        raise OracleSizeError(n, params.oracle_limit)
    started = time.monotonic()
    metric = compute_metric(instance)
    context = RoutingContext.for_instance(instance, metric, pickups_from_students(instance))
    evaluator = make_evaluator(params, context)

    cheapest_alt = {}
    for trip in alternate_trips(instance, metric):
        s = trip.members[0]
        if s not in cheapest_alt or trip.cost < cheapest_alt[s].cost:
            cheapest_alt[s] = trip

    @lru_cache(maxsize=None)
    def bus_trip(mask: int):
        nodes = [j for j in range(n) if mask >> j & 1]
        if not context.within_capacity(nodes):
            return None
        trip = evaluator.evaluate(nodes)
        return trip if evaluator.is_feasible(trip) else None

    fleet = instance.fleet_limit if instance.fleet_limit is not None else n
    # without a fleet limit the bus count never binds
    spend = 0 if instance.fleet_limit is None else 1

    @lru_cache(maxsize=None)
    def best(mask: int, buses_left: int):
        """Cheapest way to serve the students in mask: (cost, parts)."""
        if mask == 0:
            return 0.0, ()
        low = mask & -mask
        rest = mask ^ low
        result = (math.inf, ())
        point = context.points[low.bit_length() - 1]
        alt = cheapest_alt.get(point.members[0])
        if alt is not None:
            cost, parts = best(rest, buses_left)
            if alt.cost + cost < result[0]:
                result = (alt.cost + cost, (("alt", low),) + parts)
        if buses_left > 0:
            sub = rest
            while True:
                part = sub | low
                trip = bus_trip(part)
                if trip is not None:
                    cost, parts = best(mask ^ part, buses_left - spend)
                    if trip.cost + cost < result[0] - 1e-12:
                        result = (trip.cost + cost, (("bus", part),) + parts)
                if sub == 0:
                    break
                sub = (sub - 1) & rest
        return result

    total, parts = best((1 << n) - 1, fleet)
    if not math.isfinite(total):
        raise PipelineError("No feasible partition of the students into trips")

    trips = TripList()
    chosen = []
    for kind, mask in sorted(parts, key=lambda p: (p[0], p[1])):
        if kind == "bus":
            chosen.append(trips.add(bus_trip(mask)))
        else:
            chosen.append(trips.add(cheapest_alt[context.points[mask.bit_length() - 1].members[0]]))
    diagnostics = Diagnostics(status="optimal", n_pickups=n, compressed=False,
                              evaluator="exact" if params.exact_tsp else "insertion",
                              runtimes={"oracle": round(time.monotonic() - started, 6)})
    solution = assemble_solution(instance, metric, chosen, context, diagnostics)
    logger.info(f"Oracle optimum {total:.4f} ({solution})")
    return solution
