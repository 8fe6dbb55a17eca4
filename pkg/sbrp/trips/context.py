"""
Pickup points and the routing context trips are evaluated in.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np

from ..model.instance import Instance
from ..model.metric import Metric

logger = logging.getLogger(__name__)

@dataclass(frozen=True)
class PickupPoint:
    """
    One node of the shareability network: a selected stop (or split copy) in compressed mode,
    a student's home otherwise.
    """
    node: int
    key: str
    location: str
    members: tuple
    delay: float = 0.0
    penalty_time: float = 0.0
    penalty_dist: float = 0.0
    door_to_door: tuple = ()

    @property
    def weight(self) -> int:
        return len(self.members)

def pickups_from_plan(instance: Instance, plan) -> list[PickupPoint]:
    """Pickup per stop key, numbered in sorted key order."""
    penalties = plan.penalties()
    points = []
    for node, key in enumerate(sorted(plan.stops)):
        members = plan.members(key)
        ptime, pdist = penalties[key]
        points.append(PickupPoint(node=node, key=key, location=plan.location[key], members=members,
                                  delay=instance.stop_delay_for(len(members)),
                                  penalty_time=ptime, penalty_dist=pdist,
                                  door_to_door=plan.door_to_door(key)))
    return points

def pickups_from_students(instance: Instance, students=None) -> list[PickupPoint]:
    """Pickup per student home, numbered in sorted student id order."""
    chosen = sorted(instance.students if students is None else students, key=lambda s: s.id)
    return [PickupPoint(node=node, key=s.id, location=s.home, members=(s.id,), delay=instance.stop_delay_for(1),
                        door_to_door=(s.id,) if s.door_to_door else ())
            for node, s in enumerate(chosen)]

class RoutingContext(object):
    """
    Dense matrices over the pickup points with the school appended as the last index.
    Route times include each point's stop delay and door-to-door penalty.
    """

    def __init__(self, points, metric: Metric, school: str, capacity: int, t_max: float,
                 bus_fixed: float, bus_per_mile: float) -> None:
        self.points = list(points)
        for idx, p in enumerate(self.points):
            if p.node != idx:
                raise ValueError(f"Pickup points must be numbered 0..n-1 in order, got {p.node} at {idx}")
        self.metric = metric
        self.school_location = school
        self.school = len(self.points)
        self.dist, self.time = metric.submatrices([p.location for p in self.points] + [school])
        self.service = np.array([p.delay + p.penalty_time for p in self.points] + [0.0])
        self.extra_dist = np.array([p.penalty_dist for p in self.points] + [0.0])
        self.weights = np.array([p.weight for p in self.points], dtype=int)
        self.capacity = capacity
        self.t_max = t_max
        self.bus_fixed = bus_fixed
        self.bus_per_mile = bus_per_mile
        logger.debug(f"Routing context over {len(self.points)} pickups, C={capacity}, t_max={t_max}")

    @classmethod
    def for_instance(cls, instance: Instance, metric: Metric, points) -> "RoutingContext":
        return cls(points, metric, instance.school, instance.capacity, instance.t_max,
                   instance.cost.bus_fixed, instance.cost.bus_per_mile)

    def __len__(self) -> int:
        return len(self.points)

    def load(self, nodes) -> int:
        return int(sum(self.weights[n] for n in nodes))

    def members(self, nodes) -> tuple:
        return tuple(sorted(s for n in nodes for s in self.points[n].members))

    def route_time(self, route) -> float:
        if not route:
            return 0.0
        legs = list(route) + [self.school]
        return float(sum(self.time[a, b] for a, b in zip(legs, legs[1:])) + self.service[list(route)].sum())

    def route_distance(self, route) -> float:
        if not route:
            return 0.0
        legs = list(route) + [self.school]
        return float(sum(self.dist[a, b] for a, b in zip(legs, legs[1:])) + self.extra_dist[list(route)].sum())

    def bus_cost(self, distance: float) -> float:
        return self.bus_fixed + self.bus_per_mile * self.metric.to_miles(distance)

    def within_capacity(self, nodes) -> bool:
        return self.load(nodes) <= self.capacity

    def within_time(self, travel_time: float) -> bool:
        """Unreachable legs make travel_time infinite, which no time limit admits."""
        if not math.isfinite(travel_time):
            return False
        return travel_time <= self.t_max + 1e-9 or math.isinf(self.t_max)
