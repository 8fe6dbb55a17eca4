"""
Travel metric over the node set the pipeline actually uses.

compute_metric builds dense distance and time matrices restricted to
N = homes + candidate stops + depot + school.  Planar instances use Euclidean distance with
unit speed.  Road networks use one Dijkstra per source on travel time (networkx), with the
distance being the length of that fastest path.
"""

import logging

import networkx as nx
import numpy as np

from ..utilities import METERS_PER_MILE
from .instance import Instance, InstanceValidationError, MetricKind, UnreachableNodeError

logger = logging.getLogger(__name__)

class Metric(object):
    """
    Immutable pairwise metric.  Matrices are read-only numpy arrays indexed through index().
    """

    def __init__(self, nodes, dist_matrix, time_matrix, kind: MetricKind) -> None:
        self._nodes = tuple(nodes)
        self._index = {node: idx for idx, node in enumerate(self._nodes)}
        self._dist = np.array(dist_matrix, dtype=float)
        self._time = np.array(time_matrix, dtype=float)
        self._dist.setflags(write=False)
        self._time.setflags(write=False)
        self.kind = kind

    @property
    def nodes(self) -> tuple:
        return self._nodes

    @property
    def dist_matrix(self) -> np.ndarray:
        return self._dist

    @property
    def time_matrix(self) -> np.ndarray:
        return self._time

    @property
    def units_per_mile(self) -> float:
        """Planar instances price their native unit directly."""
        return 1.0 if self.kind == MetricKind.EUCLIDEAN else METERS_PER_MILE

    def index(self, node) -> int:
        return self._index[node]

    def __contains__(self, node) -> bool:
        return node in self._index

    def dist(self, i, j) -> float:
        return float(self._dist[self._index[i], self._index[j]])

    def time(self, i, j) -> float:
        return float(self._time[self._index[i], self._index[j]])

    def to_miles(self, distance: float) -> float:
        return distance / self.units_per_mile

    def submatrices(self, nodes) -> tuple[np.ndarray, np.ndarray]:
        """Distance and time matrices for the given node sequence (repeats allowed)."""
        idx = np.array([self._index[n] for n in nodes], dtype=int)
        return self._dist[np.ix_(idx, idx)], self._time[np.ix_(idx, idx)]

    def __repr__(self) -> str:
        return f"[Metric]({self.kind.value}) {len(self._nodes)} nodes"

def compute_metric(instance: Instance) -> Metric:
    """
    Pairwise distance/time over the instance node set.

    :param instance: validated instance
    :return: Metric restricted to instance.node_set()
    :raises UnreachableNodeError: a student or stop node cannot reach the school or depot
    """
    nodes = instance.node_set()
    if instance.metric_kind == MetricKind.EUCLIDEAN:
        coords = np.array([instance.coordinates(n) for n in nodes], dtype=float)
        diff = coords[:, None, :] - coords[None, :, :]
        dist = np.hypot(diff[..., 0], diff[..., 1])
        logger.info(f"Euclidean metric over {len(nodes)} nodes")
        return Metric(nodes, dist, dist.copy(), MetricKind.EUCLIDEAN)

    graph = instance.network.to_graph() # type: ignore
    n = len(nodes)
    dist = np.full((n, n), np.inf)
    time = np.full((n, n), np.inf)
    targets = set(nodes)
    for row, source in enumerate(nodes):
        lengths, times = _fastest_paths(graph, source, targets)
        for col, target in enumerate(nodes):
            if target in times:
                time[row, col] = times[target]
                dist[row, col] = lengths[target]
        logger.debug(f"Shortest paths from {source}: reached {len(times)} of {n} nodes")

    metric = Metric(nodes, dist, time, MetricKind.SHORTEST_PATH)
    _check_reachability(instance, metric)
    logger.info(f"Shortest-path metric over {n} nodes ({graph.number_of_nodes()} road nodes)")
    return metric

def _fastest_paths(graph: nx.DiGraph, source, targets) -> tuple[dict, dict]:
    """
    Dijkstra on travel time from source.  Returns (length, time) for reached targets, where
    length is measured along the first-found fastest path.
    """
    pred, times = nx.dijkstra_predecessor_and_distance(graph, source, weight="time")
    lengths = {source: 0.0}
    # predecessors always settle earlier, so ascending time is a valid order
    for node in sorted(times, key=times.__getitem__):
        if node == source:
            continue
        parent = pred[node][0]
        lengths[node] = lengths[parent] + graph[parent][node]["length"]
    return ({t: lengths[t] for t in targets if t in times},
            {t: times[t] for t in targets if t in times})

def _check_reachability(instance: Instance, metric: Metric) -> None:
    sources = {s.home for s in instance.students}
    sources.update(instance.candidate_stops)
    for target in (instance.school, instance.depot):
        for node in sorted(sources):
            if not np.isfinite(metric.time(node, target)):
                logger.error(f"Node {node} cannot reach {target}")
                raise UnreachableNodeError(node, target)
    if not np.isfinite(metric.time(instance.depot, instance.school)):
        raise UnreachableNodeError(instance.depot, instance.school)

def reachable_stops(instance: Instance, metric: Metric, student, virtual_walk: float) -> list[str]:
    """
    Candidate stops within walking range of a student, sorted by (distance, stop id).
    Door-to-door students use the virtual walking radius.
    """
    radius = virtual_walk if student.door_to_door else student.max_walk
    ranked = []
    for stop in instance.candidate_stops:
        d = metric.dist(student.home, stop)
        if d <= radius:
            ranked.append((d, stop))
    ranked.sort()
    return [stop for _, stop in ranked]

def validate_options(instance: Instance, metric: Metric, virtual_walk: float, compress: bool = True) -> None:
    """
    Check every student has at least one way to school: a reachable stop, a door-to-door
    pickup, or an enabled alternate mode.  Without node compression every student is picked up
    at home, so only the compressed setting can fail.

    :raises InstanceValidationError: naming the students with no option
    """
    if not compress or instance.cost.enabled_modes():
        return
    stranded = [s.id for s in instance.students
                if not s.door_to_door and not reachable_stops(instance, metric, s, virtual_walk)]
    if stranded:
        logger.error(f"{len(stranded)} students have no feasible option")
        raise InstanceValidationError("every student has at least one feasible option",
                                      f"no stop in range and no alternate mode for: {', '.join(stranded)}")
