"""
Random planar instances for demos and property tests.
"""

import logging
import math

import numpy as np

from .instance import CostModel, Instance, Student

logger = logging.getLogger(__name__)

def random_planar_instance(seed: int, n_students: int = 6, n_stops: int = 0, extent: float = 10.0,
                           capacity: int = 3, t_max: float = math.inf, max_walk: float = 2.0,
                           d2d_share: float = 0.0, virtual_walk: float = 0.5, stop_delay=(0.0, 0.0), cost: CostModel | None = None,
                           fleet_limit: int | None = None, name: str | None = None) -> Instance:
    """
    Students and candidate stops uniform in [-extent, extent]^2, school at the origin.

    When n_stops > 0 every student gets at least one stop in range: a stop is dropped next to
    any student left uncovered by the random stops.
    """
    rng = np.random.default_rng(seed)
    points = {"school": (0.0, 0.0)}
    homes = rng.uniform(-extent, extent, size=(n_students, 2))
    students = []
    for k, (x, y) in enumerate(homes, start=1):
        home = f"h{k:03d}"
        points[home] = (float(x), float(y))
        d2d = bool(rng.random() < d2d_share)
        students.append(Student(id=f"s{k:03d}", home=home, max_walk=0.0 if d2d else max_walk, door_to_door=d2d))

    stops = []
    if n_stops > 0:
        for k, (x, y) in enumerate(rng.uniform(-extent, extent, size=(n_stops, 2)), start=1):
            points[f"m{k:03d}"] = (float(x), float(y))
            stops.append(f"m{k:03d}")
        for s in students:
            hx, hy = points[s.home]
            radius = virtual_walk if s.door_to_door else max_walk
            if not any(math.hypot(points[m][0] - hx, points[m][1] - hy) <= radius for m in stops):
                stop = f"m{len(stops) + 1:03d}"
                angle = rng.uniform(0, 2 * math.pi)
                offset = rng.uniform(0, 0.9 * radius)
                points[stop] = (float(hx + offset * math.cos(angle)), float(hy + offset * math.sin(angle)))
                stops.append(stop)

    instance = Instance(
        name=name or f"planar-{seed}",
        students=tuple(students),
        candidate_stops=tuple(stops),
        school="school",
        depot="school",
        cost=cost if cost is not None else CostModel(bus_fixed=20.0, bus_per_mile=1.0, alt_per_mile={"dedicated": 2.0}),
        capacity=capacity,
        t_max=t_max,
        fleet_limit=fleet_limit,
        stop_delay=tuple(stop_delay),
        points=points,
    )
    logger.debug(f"Generated {instance}")
    return instance
