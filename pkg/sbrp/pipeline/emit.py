"""
Solution writers.  Use getEmitter to get the writer for an output format.
"""

import logging
from enum import Enum
from pathlib import Path

import geojson

from .solution import Solution

logger = logging.getLogger(__name__)

class EmitFormats(Enum):
    TEXT_TABLE = "text-table"
    JSON = "json"
    GEOJSON = "geojson"
    SVG = "svg"

    @staticmethod
    def is_known(val):
        if isinstance(val, EmitFormats):
            return True
        if isinstance(val, str):
            return val in EmitFormats.__members__ or val in (f.value for f in EmitFormats)
        return False

TABLE_HEADER = (f"{'instance':<20} {'N_M*':>6} {'|T_b|':>10} {'objective':>12} {'buses':>6} "
                f"{'N_U':>5} {'runtime_s':>10} status")

def text_row(solution: Solution) -> str:
    d = solution.diagnostics
    return (f"{solution.instance:<20} {d.n_stops:>6d} {d.n_trips:>10d} {solution.total_cost:>12.2f} "
            f"{solution.bus_count:>6d} {solution.students_alt:>5d} {solution.runtime:>10.3f} {d.status}")

def to_text_table(solution: Solution, include_timings: bool = True) -> str:
    return TABLE_HEADER + "\n" + text_row(solution) + "\n"

def to_json(solution: Solution, include_timings: bool = False) -> str:
    return solution.to_json(include_timings) + "\n"

def _xy(solution: Solution, location) -> tuple:
    a, b = solution.coordinates[location]
    # GeoJSON positions are (lon, lat)
    return (b, a) if solution.coordinate_kind == "latlon" else (a, b)

def to_geojson(solution: Solution, include_timings: bool = False) -> str:
    """
    Features: one LineString per bus route, one Point per pickup stop, a Point for the school and
    a MultiPoint of the homes of students on alternate modes.
    """
    features = []
    for route in solution.routes:
        features.append(geojson.Feature(
            geometry=geojson.LineString([_xy(solution, loc) for loc in route.path]),
            properties={"kind": "route", "trip_id": route.trip_id, "load": route.load, "miles": route.miles,
                        "travel_time": route.travel_time, "cost": route.cost}))
    for route in solution.routes:
        for visit in route.stops:
            features.append(geojson.Feature(
                geometry=geojson.Point(_xy(solution, visit.location)),
                properties={"kind": "stop", "key": visit.key, "trip_id": route.trip_id,
                            "students": list(visit.students), "door_to_door": list(visit.door_to_door)}))
    features.append(geojson.Feature(geometry=geojson.Point(_xy(solution, solution.school)),
                                    properties={"kind": "school", "id": solution.school}))
    alt_homes = sorted({a.home for a in solution.alternates})
    features.append(geojson.Feature(geometry=geojson.MultiPoint([_xy(solution, loc) for loc in alt_homes]),
                                    properties={"kind": "alternate", "students": [a.student for a in solution.alternates]}))
    collection = geojson.FeatureCollection(features, properties={"instance": solution.instance,
                                                                 "total_cost": solution.total_cost})
    return geojson.dumps(collection, sort_keys=True, indent=2) + "\n"

def to_svg(solution: Solution, path, include_timings: bool = False):
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    fig, ax = plt.subplots(figsize=(8, 8))
    for route in solution.routes:
        xs, ys = zip(*(_xy(solution, loc) for loc in route.path))
        ax.plot(xs, ys, linewidth=1.2, alpha=0.8)
        sx, sy = zip(*(_xy(solution, v.location) for v in route.stops))
        ax.scatter(sx, sy, s=18, zorder=3)
    alt = [_xy(solution, home) for home in sorted({a.home for a in solution.alternates})]
    if alt:
        ax.scatter(*zip(*alt), marker="x", color="grey", label="alternate mode")
    ax.scatter(*_xy(solution, solution.school), marker="*", s=200, color="red", zorder=4, label="school")
    ax.set_title(f"{solution.instance}: cost {solution.total_cost:.2f}, {solution.bus_count} buses")
    ax.set_aspect("equal", adjustable="datalim")
    ax.legend(loc="best")
    fig.savefig(path, format="svg")
    plt.close(fig)
    return path

def getEmitter(fmt):
    if not EmitFormats.is_known(fmt):
        raise ValueError(f"Unknown output format: {fmt}")

    # Normalize to enum
    if isinstance(fmt, str):
        fmt = EmitFormats[fmt] if fmt in EmitFormats.__members__ else EmitFormats(fmt)

    if fmt == EmitFormats.TEXT_TABLE:
        return to_text_table
    elif fmt == EmitFormats.JSON:
        return to_json
    elif fmt == EmitFormats.GEOJSON:
        return to_geojson
    elif fmt == EmitFormats.SVG:
        return to_svg

    raise NotImplementedError(f"Output format '{fmt}' is not implemented.")

def emit(solution: Solution, fmt, path=None, include_timings: bool = False):
    """
    Render a solution.  Text formats return the text and also write it when path is given;
    svg needs a path and returns it.
    """
    writer = getEmitter(fmt)
    if writer is to_svg:
        if path is None:
            raise ValueError("SVG output needs a file path")
        return to_svg(solution, Path(path))
    text = writer(solution, include_timings=include_timings)
    if path is not None:
        Path(path).write_text(text)
        logger.info(f"Wrote {fmt} output to {path}")
    return text
