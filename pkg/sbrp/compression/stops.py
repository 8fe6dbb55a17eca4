"""
Node compression: choose the fewest bus stops that every student can walk to, then assign
each student to a stop.

Door-to-door students are covered within the virtual walking radius.  The bus still drives to
their home; the round trip stop -> home -> stop is charged to their stop as a penalty.
"""

import logging
from dataclasses import dataclass, field

from ..cover.bnb import solve_cover
from ..cover.problem import CoverProblem, CoverStatus
from ..model.instance import Instance
from ..model.metric import Metric, reachable_stops

logger = logging.getLogger(__name__)

class CompressionError(Exception):
    """Base class for compression errors."""
    pass

class UncoveredStudentsError(CompressionError):
    """
    Raised when students cannot walk to any candidate stop.
    Inputs:
    - students: ids of the students with no stop in range
    """
    def __init__(self, students):
        self.students = tuple(students)
        super().__init__(self.__str__())

    def __str__(self) -> str:
        return f"No candidate stop within walking range of: {', '.join(self.students)}"

@dataclass(frozen=True)
class StopPlan:
    """
    stops: selected stop keys, sorted
    location: stop key -> location id.  Split copies use keys "<stop>~<k>"
    assignment: student id -> stop key
    d2d_penalty: door-to-door student id -> (round trip seconds, round trip distance)
    unassigned: students left to alternate modes
    """
    stops: tuple
    location: dict
    assignment: dict
    d2d_penalty: dict = field(default_factory=dict)
    unassigned: tuple = ()

    def __post_init__(self):
        loads = self.loads()
        empty = [key for key in self.stops if loads.get(key, 0) == 0]
        if empty:
            raise ValueError(f"Selected stops with no students: {empty}")

    def members(self, key) -> tuple:
        return tuple(sorted(s for s, k in self.assignment.items() if k == key))

    def loads(self) -> dict:
        loads = {key: 0 for key in self.stops}
        for key in self.assignment.values():
            loads[key] += 1
        return loads

    def penalties(self) -> dict:
        """Stop key -> (penalty seconds, penalty distance)."""
        totals = {key: (0.0, 0.0) for key in self.stops}
        for student, (ptime, pdist) in self.d2d_penalty.items():
            key = self.assignment[student]
            t, d = totals[key]
            totals[key] = (t + ptime, d + pdist)
        return totals

    def door_to_door(self, key) -> tuple:
        return tuple(s for s in self.members(key) if s in self.d2d_penalty)

    def __len__(self) -> int:
        return len(self.stops)

def minimum_stop_cover(problem: CoverProblem, time_limit: float = 3600.0) -> tuple:
    """
    Minimum-cardinality cover, ties broken to the lexicographically smallest sorted id set.

    A stop is kept when some minimum cover still exists containing it together with every stop
    kept so far and none of the stops already rejected.
    """
    best = solve_cover(problem, time_limit=time_limit)
    if best.status == CoverStatus.INFEASIBLE:
        raise UncoveredStudentsError(tuple(str(e) for e in best.uncovered))
    size = round(best.objective)
    logger.info(f"Minimum stop cover has {size} stops (status {best.status.value})")

    included, excluded = [], []
    witness = set(best.chosen)
    covered = set()
    for stop in sorted(problem.sets):
        if covered.issuperset(problem.elements):
            excluded.append(stop)
            continue
        if stop not in witness:
            trial = solve_cover(problem, time_limit=time_limit, fixed_in=included + [stop], fixed_out=excluded)
            if trial.status == CoverStatus.INFEASIBLE or trial.objective > size + 1e-9:
                excluded.append(stop)
                continue
            witness = set(trial.chosen)
        included.append(stop)
        covered |= problem.sets[stop]
    return tuple(included)

def select_stops(instance: Instance, metric: Metric, virtual_walk: float, allow_unassigned: bool = False,
                 time_limit: float = 3600.0) -> StopPlan:
    """
    Select the minimum stop set and assign students to it.

    :param virtual_walk: search radius for door-to-door students, metric distance units
    :param allow_unassigned: leave students without a stop in range to alternate modes instead of failing
    :raises UncoveredStudentsError: some regular student reaches no candidate stop
    """
    reach = {s.id: reachable_stops(instance, metric, s, virtual_walk) for s in instance.students}
    for student in instance.students:
        # door-to-door students with no stop in range are picked up at home
        if student.door_to_door and not reach[student.id]:
            reach[student.id] = [student.home]
            logger.debug(f"Door-to-door student {student.id} has no stop in range, using home {student.home}")
    stranded = tuple(sid for sid, stops in sorted(reach.items()) if not stops)
    if stranded and not allow_unassigned:
        logger.error(f"{len(stranded)} students reach no candidate stop")
        raise UncoveredStudentsError(stranded)

    sets = {}
    for sid, stops in reach.items():
        for stop in stops:
            sets.setdefault(stop, set()).add(sid)
    elements = tuple(sorted(sid for sid, stops in reach.items() if stops))
    if not elements:
        return StopPlan(stops=(), location={}, assignment={}, unassigned=stranded)
    problem = CoverProblem(elements, sets, {stop: 1.0 for stop in sets})
    selected = minimum_stop_cover(problem, time_limit)
    chosen = set(selected)

    assignment, penalty = {}, {}
    for student in instance.students:
        if student.id in stranded:
            continue
        stop = next(m for m in reach[student.id] if m in chosen)
        assignment[student.id] = stop
        if student.door_to_door:
            ptime = metric.time(stop, student.home) + metric.time(student.home, stop)
            pdist = metric.dist(stop, student.home) + metric.dist(student.home, stop)
            penalty[student.id] = (ptime, pdist)

    plan = StopPlan(stops=tuple(sorted(chosen)), location={m: m for m in chosen}, assignment=assignment,
                    d2d_penalty=penalty, unassigned=stranded)
    logger.info(f"Selected {len(plan)} of {len(instance.candidate_stops)} candidate stops for "
                f"{len(assignment)} students")
    return plan

def split_stops(plan: StopPlan, n_max: int) -> StopPlan:
    """
    Split every stop with load above n_max into ceil(load / n_max) co-located copies.
    Students fill the copies in id order; copies are keyed "<stop>~<k>" starting at 1.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    loads = plan.loads()
    if all(load <= n_max for load in loads.values()):
        return plan

    stops, location, assignment = [], {}, dict(plan.assignment)
    for key in plan.stops:
        members = plan.members(key)
        if len(members) <= n_max:
            stops.append(key)
            location[key] = plan.location[key]
            continue
        for k, start in enumerate(range(0, len(members), n_max), start=1):
            copy = f"{key}~{k}"
            stops.append(copy)
            location[copy] = plan.location[key]
            for student in members[start:start + n_max]:
                assignment[student] = copy
        logger.debug(f"Split stop {key} (load {len(members)}) into {k} copies")
    return StopPlan(stops=tuple(sorted(stops)), location=location, assignment=assignment,
                    d2d_penalty=dict(plan.d2d_penalty), unassigned=plan.unassigned)
