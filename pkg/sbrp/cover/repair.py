"""
Turn a set cover into a set partition: every student ends up on exactly one trip.
"""

import logging
from dataclasses import replace

from .problem import CoverError, CoverProblem, CoverSolution, CoverStatus

logger = logging.getLogger(__name__)

def _node_members(trip_list, tsp) -> dict:
    members = {}
    for trip in trip_list.level(1):
        node = next(iter(trip.node_set))
        members[node] = set(trip.members)
    if tsp is not None:
        for p in tsp.context.points:
            members.setdefault(p.node, set(p.members))
    return members

def _first_overlap(chosen, trip_list):
    covering = {}
    for tid in sorted(chosen):
        for s in trip_list[tid].members:
            covering.setdefault(s, []).append(tid)
    for s in sorted(covering):
        if len(covering[s]) > 1:
            return covering[s][0], covering[s][1]
    return None

def _covered_elsewhere(students, chosen, skip, trip_list) -> bool:
    others = set()
    for tid in chosen:
        if tid != skip:
            others.update(trip_list[tid].members)
    return others.issuperset(students)

def _reduced_trip(trip, remaining, trip_list, tsp):
    """Stored trip over remaining, else a fresh evaluation, else None when it cannot be priced."""
    stored = trip_list.find(remaining)
    if stored is not None:
        return stored
    if tsp is None:
        return None
    candidate = tsp.evaluate(remaining)
    ctx = tsp.context
    kept = tuple(n for n in trip.route if n in remaining)
    kept_time = ctx.route_time(kept)
    if kept_time < candidate.travel_time:
        candidate = tsp.make_trip(kept, kept_time, ctx.route_distance(kept))
    return candidate

def _shrink_option(tid, other, chosen, trip_list, tsp, node_members):
    """
    Ways to take the overlap out of trip tid.  Returns None when removing it would uncover a
    student or the remainder cannot be priced.
    """
    trip = trip_list[tid]
    overlap = set(trip.members) & set(trip_list[other].members)
    if not trip.is_bus:
        return {"tid": tid, "removed": set(trip.members), "reduced": None, "saving": trip.cost}
    drop = set()
    for node in trip.node_set:
        if node not in node_members:
            return None
        if node_members[node] & overlap:
            drop.add(node)
    removed = set().union(*(node_members[n] for n in drop))
    if not _covered_elsewhere(removed, chosen, tid, trip_list):
        return None
    remaining = trip.node_set - drop
    reduced = None
    if remaining:
        reduced = _reduced_trip(trip, remaining, trip_list, tsp)
        if reduced is None:
            return None
    saving = trip.cost - (reduced.cost if reduced is not None else 0.0)
    return {"tid": tid, "removed": removed, "reduced": reduced, "saving": saving, "remaining": remaining}

def _feasible(trip, tsp) -> bool:
    return trip is None or trip.id >= 0 or tsp is None or tsp.is_feasible(trip)

def _store(trip, trip_list, problem: CoverProblem):
    if trip.id >= 0:
        return trip
    trip = trip_list.add(trip)
    problem.add_set(trip.id, trip.members, trip.cost, bus=trip.is_bus)
    logger.debug(f"Added repaired trip {trip.describe()}")
    return trip

def _split_into_singles(remaining, trip_list, node_members) -> list:
    """Stored singleton bus trips, or the cheapest alternate trip per student."""
    alternates = {}
    for trip in trip_list.alternate_trips():
        s = trip.members[0]
        if s not in alternates or trip.cost < alternates[s].cost:
            alternates[s] = trip
    replacement = []
    for node in sorted(remaining):
        single = trip_list.find({node})
        if single is not None:
            replacement.append(single)
            continue
        for s in sorted(node_members.get(node, ())):
            if s not in alternates:
                logger.error(f"No singleton or alternate trip can carry student {s}")
                raise CoverError(f"Cannot repair cover: student {s} has no standalone trip")
            replacement.append(alternates[s])
    return replacement

def repair_to_partition(problem: CoverProblem, solution: CoverSolution, trip_list, tsp=None) -> CoverSolution:
    """
    Remove overlaps between chosen trips.  Of each overlapping pair, the trip that saves more
    per removed student gives up the shared students (whole pickups for bus trips).  The
    shrunken trip is looked up in trip_list or evaluated with tsp; new trips are appended to
    trip_list and problem.

    :return: solution with each element covered exactly once
    """
    chosen = list(solution.chosen)
    if not chosen:
        return solution
    node_members = _node_members(trip_list, tsp)
    steps = 0
    while True:
        pair = _first_overlap(chosen, trip_list)
        if pair is None:
            break
        a, b = pair
        options = [opt for opt in (_shrink_option(b, a, chosen, trip_list, tsp, node_members),
                                   _shrink_option(a, b, chosen, trip_list, tsp, node_members)) if opt]
        if not options:
            logger.error(f"Trips {a} and {b} overlap and neither can give up the shared students")
            raise CoverError(f"Cannot repair overlap between trips {a} and {b}")
        # stable sort keeps the later trip first on ties
        options.sort(key=lambda opt: -opt["saving"] / len(opt["removed"]))
        pick = next((opt for opt in options if _feasible(opt["reduced"], tsp)), None)
        if pick is None:
            pick = options[0]
            logger.warning(f"Shrunken trip {pick['tid']} is infeasible; splitting it into single pickups")
            replacement = _split_into_singles(pick["remaining"], trip_list, node_members)
        elif pick is not options[0]:
            logger.warning(f"Shrinking trip {options[0]['tid']} is infeasible; shrinking trip {pick['tid']} instead")
            replacement = [] if pick["reduced"] is None else [pick["reduced"]]
        else:
            replacement = [] if pick["reduced"] is None else [pick["reduced"]]

        chosen.remove(pick["tid"])
        for trip in replacement:
            trip = _store(trip, trip_list, problem)
            if trip.id not in chosen:
                chosen.append(trip.id)
        steps += 1

    objective = problem.objective(chosen)
    if not problem.is_cover(chosen):
        raise CoverError("Repair lost coverage")
    if steps:
        logger.info(f"Repaired {steps} overlaps: objective {solution.objective:.4f} -> {objective:.4f}")
    if problem.fleet_limit is not None:
        buses = sum(1 for tid in chosen if tid in problem.bus_sets)
        if buses > problem.fleet_limit:
            logger.warning(f"Repaired solution uses {buses} buses, above the fleet limit {problem.fleet_limit}")
    gap = solution.gap
    status = solution.status
    if objective > 0 and solution.bound <= objective:
        gap = max(0.0, (objective - solution.bound) / objective)
        if gap > 1e-9:
            status = CoverStatus.FEASIBLE_GAP
    return replace(solution, chosen=tuple(sorted(chosen)), objective=objective, gap=gap, status=status)
