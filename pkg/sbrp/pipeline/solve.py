"""
End-to-end solve: metric, stop selection, shareability network, trip enumeration, set cover
and partition repair.
"""

import logging
import math
import time
from dataclasses import dataclass, fields

from ..compression.network import build_network, prune_edges
from ..compression.stops import select_stops, split_stops
from ..cover import getSolver, repair_to_partition
from ..cover.problem import CoverProblem, CoverStatus, InfeasibleCoverError
from ..model.instance import Instance
from ..model.metric import Metric, compute_metric, validate_options
from ..trips import getEvaluator
from ..trips.enumeration import enumerate_trips
from ..utilities import load_defaults
from .solution import AlternateAssignment, BusRoute, Diagnostics, Solution, StopVisit

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class SolveParams:
    """
    beta: edge compression budget multiplier (> 1), None to keep every edge
    gamma: quasi-clique tolerance in [0, 1), None for strict cliques
    n_max: split stops above this load, None to keep them whole
    virtual_walk_mi: stop search radius for door-to-door students, miles
    compress: select stops (True) or pick every student up at home (False)
    """
    beta: float | None = None
    gamma: float | None = None
    n_max: int | None = None
    virtual_walk_mi: float = 0.5
    compress: bool = True
    exact_tsp: bool = False
    exact_tsp_limit: int = 12
    trip_cap: int = 5_000_000
    time_limit: float = 3600.0
    gap: float = 0.0
    solver: str = "internal"
    oracle_limit: int = 10

    def __post_init__(self):
        if self.beta is not None and not self.beta > 1:
            raise ValueError(f"beta must be > 1, got {self.beta}")
        if self.gamma is not None and not 0 <= self.gamma < 1:
            raise ValueError(f"gamma must be in [0, 1), got {self.gamma}")
        if self.n_max is not None and self.n_max < 1:
            raise ValueError(f"n_max must be >= 1, got {self.n_max}")
        if self.virtual_walk_mi < 0:
            raise ValueError(f"virtual walk must be >= 0, got {self.virtual_walk_mi}")

    @classmethod
    def from_defaults(cls, **overrides) -> "SolveParams":
        defaults = load_defaults()
        base = dict(virtual_walk_mi=float(defaults["virtual_walk_mi"]),
                    exact_tsp_limit=int(defaults["exact_tsp_limit"]),
                    trip_cap=int(defaults["trip_cap"]),
                    time_limit=float(defaults["time_limit_s"]),
                    gap=float(defaults["gap"]),
                    oracle_limit=int(defaults["oracle_limit"]))
        known = {f.name for f in fields(cls)}
        unknown = set(overrides) - known
        if unknown:
            raise ValueError(f"Unknown solve parameters: {sorted(unknown)}")
        base.update({k: v for k, v in overrides.items() if v is not None or k in ("beta", "gamma", "n_max")})
        return cls(**base)

def make_evaluator(params: SolveParams, context):
    if params.exact_tsp:
        return getEvaluator("exact")(context, params.exact_tsp_limit)
    return getEvaluator("insertion")(context)

def finalize_route(trip, context, instance: Instance, metric: Metric) -> BusRoute:
    """
    Lay out the driven path of a bus trip.  A door-to-door home is visited on the way to the next
    pickup when that is shorter than the stop -> home -> stop round trip; otherwise the bus makes
    the round trip.  Falls back to round trips only if the shortcuts would break t_max.
    """
    school = context.school_location
    points = [context.points[n] for n in trip.route]
    stops = [StopVisit(key=p.key, location=p.location, students=p.members, door_to_door=p.door_to_door)
             for p in points]

    def layout(allow_chain: bool) -> list:
        path = []
        for pos, p in enumerate(points):
            loc = p.location
            nxt = points[pos + 1].location if pos + 1 < len(points) else school
            path.append(loc)
            detours, chain, tail = [], [], loc
            for sid in p.door_to_door:
                home = instance.student(sid).home
                if home == loc:
                    continue
                round_trip = metric.dist(loc, home) + metric.dist(home, loc)
                shortcut = metric.dist(tail, home) + metric.dist(home, nxt) - metric.dist(tail, nxt)
                if allow_chain and shortcut < round_trip - 1e-9:
                    chain.append(home)
                    tail = home
                else:
                    detours.append(home)
            for home in detours:
                path.extend((home, loc))
            path.extend(chain)
        path.append(school)
        return path

    def measure(path) -> tuple[float, float]:
        legs = list(zip(path, path[1:]))
        travel = sum(metric.time(a, b) for a, b in legs) + sum(p.delay for p in points)
        return travel, sum(metric.dist(a, b) for a, b in legs)

    path = layout(True)
    travel_time, distance = measure(path)
    if not context.within_time(travel_time):
        path = layout(False)
        travel_time, distance = measure(path)
    miles = metric.to_miles(distance)
    return BusRoute(trip_id=trip.id, stops=stops, path=tuple(path), travel_time=travel_time, distance=distance,
                    miles=miles, cost=context.bus_cost(distance))

def assemble_solution(instance: Instance, metric: Metric, trips, context, diagnostics: Diagnostics) -> Solution:
    routes, alternates = [], []
    for trip in trips:
        if trip.is_bus:
            routes.append(finalize_route(trip, context, instance, metric))
        else:
            alternates.append(AlternateAssignment(student=trip.members[0], mode=trip.mode,
                                                  miles=metric.to_miles(trip.distance), cost=trip.cost,
                                                  home=trip.route[0]))
    routes.sort(key=lambda r: r.trip_id)
    alternates.sort(key=lambda a: a.student)
    total = sum(r.cost for r in routes) + sum(a.cost for a in alternates)

    used = {instance.school}
    for r in routes:
        used.update(r.path)
    used.update(a.home for a in alternates)
    coordinates = {loc: instance.coordinates(loc) for loc in sorted(used)}
    kind = "planar" if instance.points is not None else instance.network.coordinates # type: ignore
    return Solution(instance=instance.name, routes=routes, alternates=alternates, total_cost=total,
                    diagnostics=diagnostics, school=instance.school, coordinate_kind=kind, coordinates=coordinates)

def solve(instance: Instance, params: SolveParams | None = None, metric: Metric | None = None,
          network_out=None, trips_out=None) -> Solution:
    """
    Run the full pipeline.

    :param metric: precomputed metric, computed when None
    :param network_out: optional path for the shareability network edge list (.graphml for GraphML)
    :param trips_out: optional path for the trip list dump
    :raises InfeasibleCoverError: no assignment of students to trips exists
    """
    params = SolveParams.from_defaults() if params is None else params
    runtimes = {}
    clock = time.monotonic()

    def lap(stage):
        nonlocal clock
        now = time.monotonic()
        runtimes[stage] = round(now - clock, 6)
        clock = now

    if metric is None:
        metric = compute_metric(instance)
    lap("metric")
    virtual_walk = params.virtual_walk_mi * metric.units_per_mile
    validate_options(instance, metric, virtual_walk, params.compress)

    plan = None
    if params.compress:
        plan = select_stops(instance, metric, virtual_walk, allow_unassigned=bool(instance.cost.enabled_modes()),
                            time_limit=params.time_limit)
        if params.n_max is not None:
            plan = split_stops(plan, params.n_max)
        crowded = [key for key, load in plan.loads().items() if load > instance.capacity]
        if crowded:
            logger.warning(f"{len(crowded)} stops exceed capacity {instance.capacity}; splitting them at capacity")
            plan = split_stops(plan, instance.capacity)
    lap("stops")

    network = build_network(instance, metric, plan)
    if params.beta is not None:
        network = prune_edges(network, metric, instance.school, params.beta, instance.capacity)
    if network_out is not None:
        if str(network_out).endswith(".graphml"):
            network.write_graphml(network_out)
        else:
            network.write_edge_list(network_out)
    lap("network")

    evaluator = make_evaluator(params, network.context)
    trips = enumerate_trips(network, instance, metric, gamma=params.gamma, tsp=evaluator, trip_cap=params.trip_cap)
    if trips_out is not None:
        trips.dump(trips_out)
    lap("trips")

    problem = CoverProblem.from_trip_list(trips, [s.id for s in instance.students], instance.fleet_limit)
    cover = getSolver(params.solver).solve(problem, time_limit=params.time_limit, gap_limit=params.gap)
    if cover.status == CoverStatus.INFEASIBLE:
        uncovered = cover.uncovered or tuple(problem.uncoverable())
        logger.error(f"No feasible assignment: {len(uncovered)} students cannot be covered")
        raise InfeasibleCoverError(uncovered)
    lap("cover")
    cover = repair_to_partition(problem, cover, trips, evaluator)
    lap("repair")

    diagnostics = Diagnostics(status=cover.status.value, gap=cover.gap, bound=cover.bound,
                              n_trips=trips.bus_count(), n_stops=len(plan) if plan is not None else 0,
                              n_pickups=network.number_of_nodes(), n_edges=network.number_of_edges(),
                              beta=params.beta, gamma=params.gamma, n_max=params.n_max, compressed=params.compress,
                              evaluator="exact" if params.exact_tsp else "insertion", cover_nodes=cover.nodes)
    solution = assemble_solution(instance, metric, [trips[tid] for tid in cover.chosen], network.context, diagnostics)
    lap("finalize")
    solution.diagnostics.runtimes = runtimes
    solution.audit(instance)
    logger.info(f"{solution} in {solution.runtime:.3f}s")
    if not math.isclose(solution.total_cost, cover.objective, rel_tol=1e-9, abs_tol=1e-6):
        logger.info(f"Route layout changed cost {cover.objective:.4f} -> {solution.total_cost:.4f}")
    return solution
