"""
Shareability network construction and edge compression.

Nodes are pickup points numbered 0..n-1.  An edge joins two pickups that one bus can serve
together.  prune_edges keeps, for every node, only its closest neighbours under the
school-adjusted travel time until their combined load reaches beta * capacity.
"""

import logging
import math
from pathlib import Path

import networkx as nx

from ..model.instance import Instance
from ..model.metric import Metric
from ..trips.context import RoutingContext, pickups_from_plan, pickups_from_students
from ..trips.tsp import exact_path_tsp

logger = logging.getLogger(__name__)

class ShareabilityNetwork(object):

    def __init__(self, graph: nx.Graph, context: RoutingContext) -> None:
        self.graph = graph
        self.context = context

    @property
    def points(self) -> list:
        return self.context.points

    def nodes(self) -> list[int]:
        return sorted(self.graph.nodes)

    def neighbors(self, node) -> set:
        return set(self.graph.adj[node])

    def has_edge(self, u, v) -> bool:
        return self.graph.has_edge(u, v)

    def edges(self) -> list[tuple[int, int]]:
        return sorted((min(u, v), max(u, v)) for u, v in self.graph.edges)

    def weight(self, node) -> int:
        return self.graph.nodes[node]["weight"]

    def number_of_nodes(self) -> int:
        return self.graph.number_of_nodes()

    def number_of_edges(self) -> int:
        return self.graph.number_of_edges()

    def with_edges(self, edges) -> "ShareabilityNetwork":
        graph = nx.Graph()
        graph.add_nodes_from(self.graph.nodes(data=True))
        graph.add_edges_from(edges)
        return ShareabilityNetwork(graph, self.context)

    def write_edge_list(self, path) -> Path:
        path = Path(path)
        with open(path, "w") as fobj:
            for u, v in self.edges():
                fobj.write(f"{u} {v}\n")
        logger.info(f"Wrote {self.number_of_edges()} edges to {path}")
        return path

    def write_graphml(self, path) -> Path:
        path = Path(path)
        nx.write_graphml(self.graph, path)
        logger.info(f"Wrote network GraphML to {path}")
        return path

    def __repr__(self) -> str:
        return f"[ShareabilityNetwork] {self.number_of_nodes()} nodes, {self.number_of_edges()} edges"

def pair_is_feasible(context: RoutingContext, pair) -> bool:
    """Default edge test: the fastest route over the pair fits capacity and t_max."""
    if not context.within_capacity(pair):
        return False
    _, travel_time, _ = exact_path_tsp(pair, context)
    return context.within_time(travel_time)

def build_network(instance: Instance, metric: Metric, plan=None, trip_check=None, students=None) -> ShareabilityNetwork:
    """
    :param plan: StopPlan for compressed mode, None to pick every student up at home
    :param trip_check: callable(context, (i, j)) -> bool deciding edges
    :param students: restrict uncompressed mode to these students (all when None)
    """
    trip_check = pair_is_feasible if trip_check is None else trip_check
    if plan is not None:
        points = pickups_from_plan(instance, plan)
    else:
        points = pickups_from_students(instance, students)
    context = RoutingContext.for_instance(instance, metric, points)

    graph = nx.Graph()
    for p in points:
        graph.add_node(p.node, key=p.key, location=p.location, weight=p.weight)
    for i in range(len(points)):
        for j in range(i + 1, len(points)):
            if trip_check(context, (i, j)):
                graph.add_edge(i, j)
    network = ShareabilityNetwork(graph, context)
    logger.info(f"Built {network}")
    return network

def adjusted_travel_time(i, j, metric: Metric, school) -> float:
    """
    Travel time i -> j scaled by how far the detour through j strays from the direct trip
    i -> school.  Infinite when i is the school itself.
    """
    if i == j:
        return 0.0
    t_is = metric.time(i, school)
    if t_is == 0:
        return math.inf
    t_ij = metric.time(i, j)
    return (t_ij + metric.time(j, school)) / t_is * t_ij

def prune_edges(network: ShareabilityNetwork, metric: Metric, school, beta: float, capacity: int) -> ShareabilityNetwork:
    """
    Keep, per node, the maximal prefix of neighbours ranked by (adjusted time, id) whose total
    load is at most beta * capacity.  An edge survives when either endpoint keeps it.
    """
    if not beta > 1:
        raise ValueError(f"beta must be > 1, got {beta}")
    budget = beta * capacity
    location = {p.node: p.location for p in network.points}
    keep = set()
    for i in network.nodes():
        ranked = sorted(network.neighbors(i),
                        key=lambda j: (adjusted_travel_time(location[i], location[j], metric, school), j))
        total = 0
        for j in ranked:
            total += network.weight(j)
            if total > budget:
                break
            keep.add((min(i, j), max(i, j)))
    pruned = network.with_edges(sorted(keep))
    logger.info(f"Edge compression beta={beta}: {network.number_of_edges()} -> {pruned.number_of_edges()} edges")
    return pruned
