"""
Loader for the planar benchmark instances (Euclidean coordinates, single school).

File layout, whitespace separated, blank lines and lines starting with '#' ignored:

    n_stops n_students capacity max_walk
    [id] x y          <- n_stops + 1 lines, the first one is the school
    [id] x y          <- n_students lines

The optional leading id column is ignored; generated ids are "school", "m001"..., "s001"...
with homes "h001"...
"""

import logging
import math
from pathlib import Path

from .instance import CostModel, Instance, InstanceParseError, Student
from .loaders import InstanceLoader

logger = logging.getLogger(__name__)

SCHOOL_ID = "school"

def _coords(fields, path, line) -> tuple[float, float]:
    if len(fields) not in (2, 3):
        raise InstanceParseError(path, line=line, info=f"Expected '[id] x y', got {len(fields)} fields.")
    try:
        return float(fields[-2]), float(fields[-1])
    except ValueError as e:
        raise InstanceParseError(path, line=line, field="x y", info=str(e)) from e

class SchittekatLoader(InstanceLoader):
    format_name = "euclidean-schittekat"

    def load(self, path) -> Instance:
        path = Path(path)
        with open(path, "r") as fobj:
            rows = [(num, line.split()) for num, line in enumerate(fobj, start=1)
                    if line.strip() and not line.lstrip().startswith("#")]
        if not rows:
            raise InstanceParseError(path, line=1, info="File is empty.")

        num, header = rows[0]
        if len(header) != 4:
            raise InstanceParseError(path, line=num, info="Header must be 'n_stops n_students capacity max_walk'.")
        try:
            n_stops, n_students, capacity = (int(v) for v in header[:3])
            max_walk = float(header[3])
        except ValueError as e:
            raise InstanceParseError(path, line=num, field="header", info=str(e)) from e

        expected = 1 + (n_stops + 1) + n_students
        if len(rows) != expected:
            last = rows[-1][0]
            raise InstanceParseError(path, line=last,
                                     info=f"Expected {n_stops + 1} stop lines and {n_students} student lines, "
                                          f"found {len(rows) - 1} data lines.")

        points = {}
        stop_rows = rows[1:n_stops + 2]
        points[SCHOOL_ID] = _coords(stop_rows[0][1], path, stop_rows[0][0])
        stops = []
        for k, (num, fields) in enumerate(stop_rows[1:], start=1):
            stop_id = f"m{k:03d}"
            points[stop_id] = _coords(fields, path, num)
            stops.append(stop_id)

        students = []
        for k, (num, fields) in enumerate(rows[n_stops + 2:], start=1):
            home = f"h{k:03d}"
            points[home] = _coords(fields, path, num)
            students.append(Student(id=f"s{k:03d}", home=home, max_walk=max_walk, door_to_door=max_walk == 0))

        instance = Instance(
            name=path.stem,
            students=tuple(students),
            candidate_stops=tuple(stops),
            school=SCHOOL_ID,
            depot=SCHOOL_ID,
            cost=CostModel(bus_fixed=0.0, bus_per_mile=1.0, alt_per_mile={}),
            capacity=capacity,
            t_max=math.inf,
            fleet_limit=None,
            stop_delay=(0.0, 0.0),
            points=points,
        )
        logger.info(f"Loaded {instance}")
        return instance
