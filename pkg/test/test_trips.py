import itertools
import math
import unittest

import networkx as nx
import numpy as np

from sbrp.compression import ShareabilityNetwork, build_network, prune_edges
from sbrp.model import CostModel, Instance, Metric, Student, compute_metric, random_planar_instance
from sbrp.trips import (EvaluatorTypes, PathTspSizeError, RoutingContext, TripCapExceededError, TripConfiguration,
                        TripList, clique_check, enumerate_trips, exact_path_tsp, getEvaluator, insertion_path_tsp,
                        pickups_from_students, quasi_clique_check)
from sbrp.trips.tsp import ExactEvaluator, InsertionEvaluator

def home_instance(homes, capacity=10, t_max=math.inf, delay=(0.0, 0.0), alt=None) -> Instance:
    points = {"school": (0.0, 0.0)}
    students = []
    for k, home in enumerate(homes):
        points[f"h{k:02d}"] = home
        students.append(Student(f"s{k:02d}", f"h{k:02d}"))
    return Instance(name="homes", students=tuple(students), candidate_stops=(), school="school", depot="school",
                    cost=CostModel(10.0, 1.0, {} if alt is None else alt), capacity=capacity, t_max=t_max,
                    stop_delay=delay, points=points)

def context_for(inst) -> RoutingContext:
    return RoutingContext.for_instance(inst, compute_metric(inst), pickups_from_students(inst))

def graph_network(edges, n, context=None) -> ShareabilityNetwork:
    graph = nx.Graph()
    graph.add_nodes_from(range(n), weight=1)
    graph.add_edges_from(edges)
    return ShareabilityNetwork(graph, context)

class TestPathTsp(unittest.TestCase):
    def test_insertion_collinear(self):
        ctx = context_for(home_instance([(0.0, 4.0), (0.0, 2.0)]))
        route, travel_time, distance = insertion_path_tsp((0,), 4.0, 1, ctx)
        self.assertEqual(route, (0, 1))
        self.assertAlmostEqual(travel_time, 4.0)
        self.assertAlmostEqual(distance, 4.0)

    def test_insertion_empty_route(self):
        ctx = context_for(home_instance([(3.0, 4.0)], delay=(1.0, 0.5)))
        route, travel_time, _ = insertion_path_tsp((), 0.0, 0, ctx)
        self.assertEqual(route, (0,))
        self.assertAlmostEqual(travel_time, 5.0 + 1.5)

    def test_exact_single(self):
        ctx = context_for(home_instance([(3.0, 4.0)], delay=(1.0, 0.0)))
        route, travel_time, distance = exact_path_tsp({0}, ctx)
        self.assertEqual(route, (0,))
        self.assertAlmostEqual(travel_time, 6.0)
        self.assertAlmostEqual(distance, 5.0)

    def test_unreachable_leg_infeasible(self):
        inst = home_instance([(1.0, 0.0), (0.0, 1.0)])
        base = compute_metric(inst)
        dist, travel = base.dist_matrix.copy(), base.time_matrix.copy()
        a, b = base.index("h00"), base.index("h01")
        for matrix in (dist, travel):
            matrix[a, b] = matrix[b, a] = math.inf
        ctx = RoutingContext.for_instance(inst, Metric(base.nodes, dist, travel, base.kind),
                                          pickups_from_students(inst))
        self.assertFalse(ctx.within_time(math.inf))
        _, travel_time, _ = exact_path_tsp({0, 1}, ctx)
        self.assertTrue(math.isinf(travel_time))
        for evaluator in (InsertionEvaluator(ctx), ExactEvaluator(ctx)):
            self.assertTrue(evaluator.is_feasible(evaluator.evaluate((0,))))
            self.assertFalse(evaluator.is_feasible(evaluator.evaluate((0, 1))))

    def test_exact_farthest_first(self):
        ctx = context_for(home_instance([(0.0, 1.0), (0.0, 3.0), (0.0, 2.0)]))
        route, travel_time, _ = exact_path_tsp({0, 1, 2}, ctx)
        self.assertEqual(route, (1, 2, 0))
        self.assertAlmostEqual(travel_time, 3.0)

    def test_exact_size_limit(self):
        ctx = context_for(home_instance([(float(k), 1.0) for k in range(5)]))
        with self.assertRaises(PathTspSizeError):
            exact_path_tsp(range(5), ctx, limit=4)

    def test_insertion_never_beats_exact(self):
        rng = np.random.default_rng(7)
        ctx = context_for(home_instance([tuple(p) for p in rng.uniform(-10, 10, size=(12, 2))], delay=(0.5, 0.1)))
        insertion, exact = InsertionEvaluator(ctx), ExactEvaluator(ctx, limit=8)
        for _ in range(1000):
            size = int(rng.integers(1, 9))
            nodes = sorted(int(n) for n in rng.choice(12, size=size, replace=False))
            self.assertGreaterEqual(insertion.evaluate(nodes).travel_time, exact.evaluate(nodes).travel_time - 1e-9)

    def test_get_evaluator(self):
        self.assertIs(getEvaluator("exact"), ExactEvaluator)
        self.assertIs(getEvaluator(EvaluatorTypes.INSERTION), InsertionEvaluator)
        with self.assertRaises(ValueError):
            getEvaluator("genetic")

class TestTripList(unittest.TestCase):
    def trip(self, nodes, cost=1.0) -> TripConfiguration:
        return TripConfiguration(route=tuple(nodes), node_set=frozenset(nodes), travel_time=1.0, distance=1.0,
                                 load=len(nodes), members=tuple(f"s{n}" for n in nodes), cost=cost)

    def test_ids_and_levels(self):
        trips = TripList()
        a = trips.add(self.trip((0,)))
        b = trips.add(self.trip((0, 1)))
        self.assertEqual((a.id, b.id), (0, 1))
        self.assertEqual(trips.level(2), [b])
        self.assertIn({1, 0}, trips)
        self.assertIs(trips.find((0,)), a)
        self.assertEqual(trips.index[0], [0, 1])
        with self.assertRaises(ValueError):
            trips.add(self.trip((1, 0)))

class TestCliqueChecks(unittest.TestCase):
    def test_clique(self):
        triangle = graph_network([(0, 1), (1, 2), (0, 2)], 3)
        path = graph_network([(0, 1), (1, 2)], 3)
        self.assertTrue(clique_check(set(), 2, path))
        self.assertTrue(clique_check({0, 1}, 2, triangle))
        self.assertFalse(clique_check({0, 1}, 2, path))

    def test_quasi_clique_tolerance(self):
        trip = {0, 1, 2, 3}
        one_missing = graph_network([(0, 4), (1, 4), (2, 4)], 5)
        two_missing = graph_network([(0, 4), (1, 4)], 5)
        self.assertTrue(quasi_clique_check(trip, 4, one_missing, 0.3))
        self.assertFalse(quasi_clique_check(trip, 4, two_missing, 0.3))

    def test_zero_tolerance_matches_clique(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            n = int(rng.integers(3, 8))
            pairs = [p for p in itertools.combinations(range(n), 2) if rng.random() < 0.5]
            network = graph_network(pairs, n)
            for size in range(0, n):
                for trip in itertools.combinations(range(n), size):
                    for cand in set(range(n)) - set(trip):
                        self.assertEqual(quasi_clique_check(trip, cand, network, 0.0),
                                         clique_check(trip, cand, network))

class TestEnumeration(unittest.TestCase):
    def test_complete_four(self):
        inst = home_instance([(1.0, 0.0), (1.1, 0.0), (1.0, 0.1), (1.1, 0.1)])
        metric = compute_metric(inst)
        trips = enumerate_trips(build_network(inst, metric), inst, metric)
        self.assertEqual(trips.bus_count(), 15)
        self.assertEqual(len(trips.alternate_trips()), 0)
        self.assertEqual([len(trips.level(k)) for k in (1, 2, 3, 4)], [4, 6, 4, 1])

    def test_alternate_trips(self):
        inst = home_instance([(3.0, 4.0), (1.0, 0.0)], alt={"dedicated": 2.0, "walk": 0.5, "taxi": math.inf})
        metric = compute_metric(inst)
        trips = enumerate_trips(build_network(inst, metric), inst, metric)
        alternates = trips.alternate_trips()
        self.assertEqual(len(alternates), 4)
        dedicated = [t for t in alternates if t.mode == "dedicated" and t.members == ("s00",)][0]
        self.assertAlmostEqual(dedicated.cost, 10.0)
        self.assertEqual(dedicated.route, ("h00", "school"))

    def test_infeasible_singleton_skipped(self):
        inst = home_instance([(1.0, 0.0), (30.0, 0.0)], t_max=10.0, alt={"dedicated": 2.0})
        metric = compute_metric(inst)
        trips = enumerate_trips(build_network(inst, metric), inst, metric)
        self.assertEqual([sorted(t.node_set) for t in trips.bus_trips()], [[0]])

    def test_downward_closed_and_monotone(self):
        inst = random_planar_instance(21, n_students=8, extent=5.0, capacity=4, t_max=18.0)
        metric = compute_metric(inst)
        network = build_network(inst, metric)
        trips = enumerate_trips(network, inst, metric, tsp=ExactEvaluator(network.context))
        for trip in trips.bus_trips():
            self.assertLessEqual(trip.load, inst.capacity)
            self.assertLessEqual(trip.travel_time, inst.t_max + 1e-9)
            if trip.size < 2:
                continue
            for node in trip.node_set:
                sub = trips.find(trip.node_set - {node})
                self.assertIsNotNone(sub)
                self.assertLessEqual(sub.cost, trip.cost + 1e-9)

    def test_beta_monotone(self):
        inst = random_planar_instance(8, n_students=9, extent=5.0, capacity=4, t_max=20.0)
        metric = compute_metric(inst)
        network = build_network(inst, metric)
        counts = []
        for beta in (1.2, 1.6, 2.0, 3.0, 4.0):
            pruned = prune_edges(network, metric, inst.school, beta, inst.capacity)
            counts.append(enumerate_trips(pruned, inst, metric, tsp=ExactEvaluator(pruned.context)).bus_count())
        self.assertEqual(counts, sorted(counts))

    def test_gamma_monotone(self):
        inst = random_planar_instance(9, n_students=9, extent=5.0, capacity=4, t_max=20.0)
        metric = compute_metric(inst)
        network = prune_edges(build_network(inst, metric), metric, inst.school, 1.5, inst.capacity)
        tsp = ExactEvaluator(network.context)
        strict = enumerate_trips(network, inst, metric, tsp=tsp)
        zero = enumerate_trips(network, inst, metric, gamma=0.0, tsp=tsp)
        self.assertEqual({t.node_set for t in strict.bus_trips()}, {t.node_set for t in zero.bus_trips()})
        previous = set()
        for gamma in (0.0, 0.3, 0.6, 0.9):
            found = {t.node_set for t in enumerate_trips(network, inst, metric, gamma=gamma, tsp=tsp).bus_trips()}
            self.assertTrue(previous <= found)
            previous = found

    def test_quasi_cliques_grow_from_any_stored_parent(self):
        inst = home_instance([(1.0 + 0.1 * k, 0.0) for k in range(7)])
        ctx = context_for(inst)
        rng = np.random.default_rng(17)
        for _ in range(12):
            gamma = float(rng.choice([0.0, 0.25, 0.4, 0.6]))
            pairs = [p for p in itertools.combinations(range(7), 2) if rng.random() < 0.45]
            network = graph_network(pairs, 7, ctx)
            expected = level = {frozenset((n,)) for n in range(7)}
            while level:
                level = {p | {c} for p in level for c in range(7)
                         if c not in p and quasi_clique_check(p, c, network, gamma)}
                expected = expected | level
            trips = enumerate_trips(network, inst, ctx.metric, gamma=gamma, tsp=ExactEvaluator(ctx))
            found = [t.node_set for t in trips.bus_trips()]
            self.assertEqual(len(found), len(set(found)))
            self.assertEqual(set(found), expected)

    def test_gamma_range(self):
        inst = home_instance([(1.0, 0.0)])
        metric = compute_metric(inst)
        with self.assertRaises(ValueError):
            enumerate_trips(build_network(inst, metric), inst, metric, gamma=1.0)

    def test_trip_cap(self):
        inst = home_instance([(1.0, 0.0), (1.1, 0.0), (1.0, 0.1), (1.1, 0.1)])
        metric = compute_metric(inst)
        with self.assertRaises(TripCapExceededError) as ctx:
            enumerate_trips(build_network(inst, metric), inst, metric, trip_cap=5)
        self.assertEqual(ctx.exception.cap, 5)
        self.assertEqual(ctx.exception.level, 2)

if __name__ == '__main__':
    unittest.main()
