"""
Loader for district-style road-network instances stored as three CSV files.

    students.csv  student_id, lat, lon, school_lat, school_lon, door_to_door[, max_walk_m]
    nodes.csv     node_id, lat, lon
    edges.csv     u, v, length_m, highway[, oneway]

nodes.csv and edges.csv sit next to students.csv.  Students and the school are snapped to the
nearest road node.  Edge times come from the per-class speeds in data/road_speeds.json.
"""

import logging
import math
from pathlib import Path

import networkx as nx
import numpy as np
import pandas as pd

from ..utilities import load_data_file, load_defaults, miles_to_meters
from .instance import CostModel, Instance, InstanceParseError, InstanceValidationError, RoadNetwork, Student
from .loaders import InstanceLoader

logger = logging.getLogger(__name__)

EARTH_RADIUS_M = 6371008.8

STUDENT_COLUMNS = ["student_id", "lat", "lon", "school_lat", "school_lon", "door_to_door"]
NODE_COLUMNS = ["node_id", "lat", "lon"]
EDGE_COLUMNS = ["u", "v", "length_m", "highway"]

def haversine_m(lat, lon, lats, lons) -> np.ndarray:
    """Great-circle distance in metres from one point to arrays of points."""
    lat, lon = np.radians(lat), np.radians(lon)
    lats, lons = np.radians(np.asarray(lats, dtype=float)), np.radians(np.asarray(lons, dtype=float))
    a = np.sin((lats - lat) / 2) ** 2 + np.cos(lat) * np.cos(lats) * np.sin((lons - lon) / 2) ** 2
    return 2 * EARTH_RADIUS_M * np.arcsin(np.sqrt(a))

def edge_speed_mps(highway, speeds: dict) -> float:
    """Speed in m/s for an OSM highway class.  Lists like "['residential', 'service']" use the first entry."""
    label = str(highway).strip("[]'\" ").split(",")[0].strip("'\" ")
    kmh = speeds["speeds"].get(label, speeds["default"])
    return kmh / 3.6

def _read_csv(path: Path, required: list[str]) -> pd.DataFrame:
    if not path.is_file():
        raise InstanceParseError(path, info="File not found.")
    try:
        frame = pd.read_csv(path)
    except (pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise InstanceParseError(path, info=str(e)) from e
    for col in required:
        if col not in frame.columns:
            raise InstanceParseError(path, line=1, field=col, info="Required column missing.")
    return frame

def _numeric(frame: pd.DataFrame, path: Path, columns: list[str]) -> None:
    for col in columns:
        values = pd.to_numeric(frame[col], errors="coerce")
        bad = values.isna()
        if bad.any():
            row = int(np.flatnonzero(bad.to_numpy())[0])
            raise InstanceParseError(path, line=row + 2, field=col, info=f"Not a number: {frame[col].iloc[row]!r}")
        frame[col] = values.astype(float)

def _truthy(val) -> bool:
    if isinstance(val, str):
        return val.strip().lower() in ("1", "true", "yes", "y", "t")
    return bool(val)

class BpsCsvLoader(InstanceLoader):
    """
    Options:
    - regular_walk_m: walking limit for regular students without a max_walk_m column value
    - virtual_walk_m: stop search radius for door-to-door students
    """
    format_name = "bps-csv"

    def load(self, path) -> Instance:
        path = Path(path)
        defaults = load_defaults()
        regular_walk = float(self.options.get("regular_walk_m", miles_to_meters(defaults["regular_walk_mi"])))
        virtual_walk = float(self.options.get("virtual_walk_m", miles_to_meters(defaults["virtual_walk_mi"])))

        students_df = _read_csv(path, STUDENT_COLUMNS)
        nodes_path, edges_path = path.with_name("nodes.csv"), path.with_name("edges.csv")
        nodes_df = _read_csv(nodes_path, NODE_COLUMNS)
        edges_df = _read_csv(edges_path, EDGE_COLUMNS)
        _numeric(students_df, path, ["lat", "lon", "school_lat", "school_lon"])
        _numeric(nodes_df, nodes_path, ["lat", "lon"])
        _numeric(edges_df, edges_path, ["length_m"])

        if students_df.empty:
            raise InstanceValidationError("empty student set")
        schools = students_df[["school_lat", "school_lon"]].drop_duplicates()
        if len(schools) > 1:
            raise InstanceValidationError("single school per instance",
                                          f"{len(schools)} distinct school locations in {path.name}")

        node_ids = nodes_df["node_id"].astype(str).to_numpy()
        node_lat = nodes_df["lat"].to_numpy()
        node_lon = nodes_df["lon"].to_numpy()
        nodes = {nid: (float(la), float(lo)) for nid, la, lo in zip(node_ids, node_lat, node_lon)}

        def snap(lat, lon) -> str:
            return str(node_ids[int(np.argmin(haversine_m(lat, lon, node_lat, node_lon)))])

        edges = self._edges(edges_df, edges_path, nodes)
        school = snap(*schools.iloc[0].to_numpy())

        students = []
        for row, rec in enumerate(students_df.itertuples(index=False)):
            d2d = _truthy(rec.door_to_door)
            walk = 0.0
            if not d2d:
                walk = getattr(rec, "max_walk_m", regular_walk)
                walk = regular_walk if walk is None or (isinstance(walk, float) and math.isnan(walk)) else float(walk)
                if walk <= 0:
                    raise InstanceParseError(path, line=row + 2, field="max_walk_m",
                                             info="Regular students need a positive walking limit.")
            students.append(Student(id=str(rec.student_id), home=snap(rec.lat, rec.lon),
                                    max_walk=walk, door_to_door=d2d))

        stops = self._candidate_stops(nodes, edges, students, school, virtual_walk)
        defaults_cost = defaults["costs"]
        instance = Instance(
            name=path.parent.name if path.name == "students.csv" else path.stem,
            students=tuple(students),
            candidate_stops=tuple(stops),
            school=school,
            depot=school,
            cost=CostModel(bus_fixed=float(defaults_cost["bus_fixed"]),
                           bus_per_mile=float(defaults_cost["bus_per_mile"]),
                           alt_per_mile={k: float(v) for k, v in defaults_cost["alternate"].items()}),
            capacity=int(defaults["capacity"]),
            t_max=float(defaults["t_max_s"]),
            stop_delay=tuple(float(v) for v in defaults["stop_delay"]),
            network=RoadNetwork(nodes=nodes, edges=edges, coordinates="latlon"),
        )
        logger.info(f"Loaded {instance}")
        return instance

    def _edges(self, frame: pd.DataFrame, path: Path, nodes: dict) -> tuple:
        speeds = load_data_file("road_speeds")
        has_oneway = "oneway" in frame.columns
        edges = []
        for row, rec in enumerate(frame.itertuples(index=False)):
            u, v = str(rec.u), str(rec.v)
            for end, field in ((u, "u"), (v, "v")):
                if end not in nodes:
                    raise InstanceParseError(path, line=row + 2, field=field, info=f"Unknown node '{end}'.")
            length = float(rec.length_m)
            if length <= 0:
                raise InstanceParseError(path, line=row + 2, field="length_m", info="Edge length must be positive.")
            time = length / edge_speed_mps(rec.highway, speeds)
            edges.append((u, v, length, time))
            if not (has_oneway and _truthy(rec.oneway)):
                edges.append((v, u, length, time))
        logger.debug(f"Read {len(edges)} directed edges from {path}")
        return tuple(edges)

    def _candidate_stops(self, nodes, edges, students, school, virtual_walk) -> list[str]:
        """Road nodes within walking distance of at least one student, excluding the school."""
        walk_graph = nx.Graph()
        walk_graph.add_nodes_from(nodes)
        for u, v, length, _ in edges:
            if not walk_graph.has_edge(u, v) or walk_graph[u][v]["length"] > length:
                walk_graph.add_edge(u, v, length=length)
        stops = set()
        for s in students:
            radius = virtual_walk if s.door_to_door else s.max_walk
            reach = nx.single_source_dijkstra_path_length(walk_graph, s.home, cutoff=radius, weight="length")
            stops.update(reach)
        stops.discard(school)
        logger.info(f"{len(stops)} candidate stops within walking range")
        return sorted(stops)
