import itertools
import math
import types
import unittest

import networkx as nx

from sbrp.compression import (ShareabilityNetwork, StopPlan, UncoveredStudentsError, adjusted_travel_time,
                              build_network, prune_edges, select_stops, split_stops)
from sbrp.model import CostModel, Instance, Student, compute_metric, random_planar_instance
from sbrp.trips import PickupPoint

def planar_instance(homes, stops=None, school=(0.0, 0.0), max_walk=1.0, d2d=(), t_max=math.inf, capacity=10,
                    alt=None) -> Instance:
    points = {"school": school}
    students = []
    for k, home in enumerate(homes):
        points[f"h{k}"] = home
        sid = f"s{k}"
        if sid in d2d:
            students.append(Student(sid, f"h{k}"))
        else:
            students.append(Student(sid, f"h{k}", max_walk=max_walk, door_to_door=False))
    for name, where in (stops or {}).items():
        points[name] = where
    return Instance(name="toy", students=tuple(students), candidate_stops=tuple(sorted(stops or {})),
                    school="school", depot="school", cost=CostModel(10.0, 1.0, {} if alt is None else alt),
                    capacity=capacity, t_max=t_max, stop_delay=(0.0, 0.0), points=points)

def brute_force_min_cover(instance, metric, virtual_walk) -> tuple:
    reach = {}
    for s in instance.students:
        radius = virtual_walk if s.door_to_door else s.max_walk
        reach[s.id] = {m for m in instance.candidate_stops if metric.dist(s.home, m) <= radius}
    stops = sorted(instance.candidate_stops)
    for size in range(1, len(stops) + 1):
        for combo in itertools.combinations(stops, size):
            if all(reach[s] & set(combo) for s in reach):
                return combo
    return ()

class TestSelectStops(unittest.TestCase):
    def test_forced_single_stop(self):
        inst = planar_instance([(1.0, 0.0)], {"m": (1.2, 0.0)})
        plan = select_stops(inst, compute_metric(inst), 0.5)
        self.assertEqual(plan.stops, ("m",))
        self.assertEqual(plan.loads(), {"m": 1})
        self.assertEqual(plan.assignment, {"s0": "m"})

    def test_shared_stop_preferred(self):
        inst = planar_instance([(1.0, 0.0), (2.0, 0.0)], {"a": (0.9, 0.0), "b": (1.5, 0.0), "c": (2.1, 0.0)})
        plan = select_stops(inst, compute_metric(inst), 0.5)
        self.assertEqual(plan.stops, ("b",))
        self.assertEqual(plan.members("b"), ("s0", "s1"))

    def test_minimum_against_exhaustive(self):
        for seed in range(200):
            inst = random_planar_instance(seed, n_students=3 + seed % 6, n_stops=4 + seed % 12, extent=3.0,
                                          max_walk=1.5)
            metric = compute_metric(inst)
            plan = select_stops(inst, metric, 0.5)
            expected = brute_force_min_cover(inst, metric, 0.5)
            self.assertEqual(plan.stops, expected, f"seed {seed}")
            for student, stop in plan.assignment.items():
                s = inst.student(student)
                self.assertLessEqual(metric.dist(s.home, stop), s.max_walk)

    def test_door_to_door_penalty(self):
        inst = planar_instance([(1.0, 0.0), (1.6, 0.0)], {"m": (1.3, 0.0)}, d2d=("s0",))
        plan = select_stops(inst, compute_metric(inst), 0.5)
        self.assertEqual(plan.door_to_door("m"), ("s0",))
        ptime, pdist = plan.d2d_penalty["s0"]
        self.assertAlmostEqual(ptime, 0.6)
        self.assertAlmostEqual(pdist, 0.6)
        self.assertAlmostEqual(plan.penalties()["m"][0], 0.6)

    def test_door_to_door_without_stop_uses_home(self):
        inst = planar_instance([(1.0, 0.0), (5.0, 5.0)], {"m": (1.2, 0.0)}, d2d=("s1",))
        plan = select_stops(inst, compute_metric(inst), 0.5)
        self.assertEqual(plan.stops, ("h1", "m"))
        self.assertEqual(plan.assignment["s1"], "h1")
        self.assertEqual(plan.door_to_door("h1"), ("s1",))
        self.assertEqual(plan.d2d_penalty["s1"], (0.0, 0.0))

    def test_uncovered_students(self):
        inst = planar_instance([(1.0, 0.0), (5.0, 5.0)], {"m": (1.2, 0.0)})
        with self.assertRaises(UncoveredStudentsError) as ctx:
            select_stops(inst, compute_metric(inst), 0.5)
        self.assertEqual(ctx.exception.students, ("s1",))
        plan = select_stops(inst, compute_metric(inst), 0.5, allow_unassigned=True)
        self.assertEqual(plan.unassigned, ("s1",))
        self.assertEqual(plan.stops, ("m",))

class TestSplitStops(unittest.TestCase):
    def test_split_twelve(self):
        students = [f"s{k:02d}" for k in range(12)]
        plan = StopPlan(stops=("m",), location={"m": "m"}, assignment={s: "m" for s in students})
        split = split_stops(plan, 5)
        self.assertEqual(split.stops, ("m~1", "m~2", "m~3"))
        self.assertEqual([split.loads()[k] for k in split.stops], [5, 5, 2])
        self.assertTrue(all(split.location[k] == "m" for k in split.stops))
        self.assertEqual(split.members("m~3"), ("s10", "s11"))

    def test_split_noop(self):
        plan = StopPlan(stops=("a", "b"), location={"a": "a", "b": "b"}, assignment={"s1": "a", "s2": "b"})
        self.assertIs(split_stops(plan, 5), plan)
        with self.assertRaises(ValueError):
            split_stops(plan, 0)

class TestAdjustedTravelTime(unittest.TestCase):
    def setUp(self):
        inst = planar_instance([(0.0, 10.0), (0.0, 5.0), (10.0, 0.0), (-10.0, 0.0)])
        self.metric = compute_metric(inst)

    def test_on_ray(self):
        self.assertAlmostEqual(adjusted_travel_time("h0", "h1", self.metric, "school"), 5.0)

    def test_opposite_sides(self):
        self.assertAlmostEqual(adjusted_travel_time("h2", "h3", self.metric, "school"), 60.0)

    def test_same_node(self):
        self.assertEqual(adjusted_travel_time("h2", "h2", self.metric, "school"), 0.0)

    def test_from_school(self):
        self.assertTrue(math.isinf(adjusted_travel_time("school", "h1", self.metric, "school")))

class TestNetwork(unittest.TestCase):
    def test_pair_edges(self):
        far = planar_instance([(10.0, 0.0), (-10.0, 0.0)], t_max=15.0)
        self.assertEqual(build_network(far, compute_metric(far)).number_of_edges(), 0)
        near = planar_instance([(1.0, 0.0), (1.1, 0.0)], t_max=15.0)
        network = build_network(near, compute_metric(near))
        self.assertEqual(network.edges(), [(0, 1)])
        self.assertEqual(network.weight(0), 1)

    def test_capacity_blocks_edge(self):
        inst = planar_instance([(1.0, 0.0), (1.1, 0.0)], capacity=1)
        self.assertEqual(build_network(inst, compute_metric(inst)).number_of_edges(), 0)

    def test_compressed_network(self):
        inst = planar_instance([(1.0, 0.0), (1.1, 0.0), (-3.0, 0.0)], {"a": (1.05, 0.0), "b": (-3.1, 0.0)})
        metric = compute_metric(inst)
        network = build_network(inst, metric, select_stops(inst, metric, 0.5))
        self.assertEqual(network.number_of_nodes(), 2)
        self.assertEqual([p.key for p in network.points], ["a", "b"])
        self.assertEqual(network.weight(0), 2)

class TestPrune(unittest.TestCase):
    def star(self):
        # center "c" carries three students, the leaves one each
        locations = {"c": (0.0, 10.0), "a": (0.0, 12.0), "b": (3.0, 10.0), "d": (0.0, 5.0), "e": (10.0, 0.0)}
        inst = planar_instance(list(locations.values()))
        metric = compute_metric(inst)
        homes = [f"h{k}" for k in range(len(locations))]
        members = [("x1", "x2", "x3"), ("y1",), ("y2",), ("y3",), ("y4",)]
        points = [PickupPoint(node=n, key=homes[n], location=homes[n], members=members[n]) for n in range(5)]
        graph = nx.Graph()
        for p in points:
            graph.add_node(p.node, weight=p.weight)
        graph.add_edges_from((0, leaf) for leaf in range(1, 5))
        return ShareabilityNetwork(graph, types.SimpleNamespace(points=points)), metric

    def test_star_prefix(self):
        network, metric = self.star()
        pruned = prune_edges(network, metric, "school", beta=2.0, capacity=1)
        self.assertEqual(pruned.edges(), [(0, 1), (0, 2)])

    def test_large_beta_noop(self):
        network, metric = self.star()
        pruned = prune_edges(network, metric, "school", beta=100.0, capacity=1)
        self.assertEqual(pruned.edges(), network.edges())

    def test_random_large_beta_noop(self):
        inst = random_planar_instance(11, n_students=8, extent=3.0)
        metric = compute_metric(inst)
        network = build_network(inst, metric)
        pruned = prune_edges(network, metric, inst.school, beta=50.0, capacity=inst.capacity)
        self.assertEqual(pruned.edges(), network.edges())

    def test_beta_must_exceed_one(self):
        network, metric = self.star()
        with self.assertRaises(ValueError):
            prune_edges(network, metric, "school", beta=1.0, capacity=1)

    def test_pruned_subset(self):
        inst = random_planar_instance(5, n_students=9, extent=4.0, capacity=4)
        metric = compute_metric(inst)
        network = build_network(inst, metric)
        previous = set()
        for beta in (1.2, 1.5, 2.0, 3.0):
            kept = set(prune_edges(network, metric, inst.school, beta, inst.capacity).edges())
            self.assertTrue(kept <= set(network.edges()))
            self.assertTrue(previous <= kept)
            previous = kept

if __name__ == '__main__':
    unittest.main()
