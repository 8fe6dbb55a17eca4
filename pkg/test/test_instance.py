import math
import tempfile
import unittest
from pathlib import Path

from sbrp.model import (CostModel, Instance, InstanceFormats, InstanceParseError, InstanceValidationError,
                        RoadNetwork, Student, UnreachableNodeError, compute_metric, dump_instance, getLoader,
                        load_instance, random_planar_instance, validate_options)
from sbrp.utilities import data_file_path, miles_to_meters

STUDENTS_CSV = """student_id,lat,lon,school_lat,school_lon,door_to_door,max_walk_m
a,42.00001,-71.00001,42.0010,-70.9980,0,200
b,42.00001,-70.99899,42.0010,-70.9980,1,
c,42.0000,-70.9981,42.0010,-70.9980,0,
"""
NODES_CSV = """node_id,lat,lon
1,42.0000,-71.0000
2,42.0000,-70.9990
3,42.0000,-70.9980
4,42.0010,-70.9980
"""
EDGES_CSV = """u,v,length_m,highway
1,2,83,residential
2,3,83,residential
3,4,111,primary
"""

def write_bps(folder: Path, students=STUDENTS_CSV, nodes=NODES_CSV, edges=EDGES_CSV) -> Path:
    (folder / "students.csv").write_text(students)
    (folder / "nodes.csv").write_text(nodes)
    (folder / "edges.csv").write_text(edges)
    return folder / "students.csv"

def line_network_instance(extra_nodes=None, extra_students=()) -> Instance:
    nodes = {"a": (0.0, 0.0), "b": (2.0, 0.0), "c": (5.0, 0.0)}
    nodes.update(extra_nodes or {})
    edges = (("a", "b", 2.0, 2.0), ("b", "a", 2.0, 2.0), ("b", "c", 3.0, 3.0), ("c", "b", 3.0, 3.0),
             ("a", "c", 4.0, 10.0))
    students = (Student("s1", "a", max_walk=3.0, door_to_door=False),) + tuple(extra_students)
    return Instance(name="line", students=students, candidate_stops=("b",), school="c", depot="c",
                    network=RoadNetwork(nodes=nodes, edges=edges, coordinates="planar"))

class TestLoaders(unittest.TestCase):
    def test_schittekat_sample(self):
        inst = load_instance(data_file_path("samples/schittekat_sample.txt"))
        self.assertEqual(len(inst.candidate_stops), 3)
        self.assertEqual(len(inst.students), 5)
        self.assertEqual(inst.capacity, 3)
        self.assertTrue(all(s.max_walk == 2.0 for s in inst.students))
        self.assertEqual(inst.coordinates(inst.school), (0.0, 0.0))
        self.assertEqual(inst.cost.enabled_modes(), [])
        self.assertTrue(math.isinf(inst.t_max))
        self.assertEqual(inst.stop_delay, (0.0, 0.0))

    def test_schittekat_counts(self):
        lines = ["40 200 25 5", "0 0 0"]
        lines += [f"{k} {k} {-k}" for k in range(1, 41)]
        lines += [f"{k} {k % 17} {k % 13}" for k in range(1, 201)]
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "inst73.txt")
            path.write_text("\n".join(lines) + "\n")
            inst = load_instance(path)
        self.assertEqual((len(inst.candidate_stops), len(inst.students), inst.capacity), (40, 200, 25))
        self.assertEqual(inst.students[0].max_walk, 5.0)
        self.assertEqual(inst.name, "inst73")

    def test_schittekat_truncated(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "bad.txt")
            path.write_text("2 2 5 1\n0 0 0\n1 1 1\n2 2 2\n1 0.5 0.5\n")
            with self.assertRaises(InstanceParseError) as ctx:
                load_instance(path, "euclidean-schittekat")
            self.assertEqual(ctx.exception.line, 5)

    def test_native_round_trip(self):
        inst = load_instance(data_file_path("samples/tiny.json"))
        with tempfile.TemporaryDirectory() as tmp:
            path = dump_instance(inst, Path(tmp, "copy.json"))
            again = load_instance(path)
        self.assertEqual(inst, again)

    def test_native_round_trip_unbounded(self):
        inst = random_planar_instance(3, n_students=4, n_stops=2,
                                      cost=CostModel(alt_per_mile={"dedicated": math.inf, "walk": 0.5}))
        with tempfile.TemporaryDirectory() as tmp:
            again = load_instance(dump_instance(inst, Path(tmp, "x.json")))
        self.assertEqual(inst, again)
        self.assertTrue(math.isinf(again.t_max))
        self.assertEqual(again.cost.enabled_modes(), [("walk", 0.5)])

    def test_native_empty_students(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "empty.json")
            path.write_text('{"points": {"x": [0, 0]}, "students": [], "stops": [], "school": "x", "depot": "x"}')
            with self.assertRaises(InstanceValidationError) as ctx:
                load_instance(path)
        self.assertIn("empty student set", str(ctx.exception))

    def test_native_bad_json(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "broken.json")
            path.write_text('{\n"students": [\n')
            with self.assertRaises(InstanceParseError) as ctx:
                load_instance(path)
        self.assertIsNotNone(ctx.exception.line)

    def test_native_schema_violation(self):
        with tempfile.TemporaryDirectory() as tmp:
            path = Path(tmp, "cap.json")
            path.write_text('{"points": {"x": [0, 0], "h": [1, 1]}, "students": [{"id": "s", "home": "h"}],'
                            ' "stops": [], "school": "x", "depot": "x", "params": {"capacity": 0}}')
            with self.assertRaises(InstanceParseError) as ctx:
                load_instance(path)
        self.assertEqual(ctx.exception.field, "params/capacity")

    def test_bps_csv(self):
        with tempfile.TemporaryDirectory() as tmp:
            inst = load_instance(write_bps(Path(tmp)))
        self.assertEqual(len(inst.students), 3)
        self.assertEqual(inst.door_to_door_count(), 1)
        self.assertEqual(inst.school, "4")
        self.assertEqual(inst.depot, "4")
        self.assertEqual([s.home for s in inst.students], ["1", "2", "3"])
        self.assertEqual(inst.candidate_stops, ("1", "2", "3"))
        self.assertEqual(inst.student("a").max_walk, 200.0)
        self.assertAlmostEqual(inst.student("c").max_walk, miles_to_meters(0.5))
        times = {(u, v): t for u, v, _, t in inst.network.edges}
        self.assertAlmostEqual(times[("1", "2")], 83 / (25 / 3.6))
        self.assertAlmostEqual(times[("2", "1")], 83 / (25 / 3.6))

    def test_bps_multiple_schools(self):
        students = STUDENTS_CSV.replace("c,42.0000,-70.9981,42.0010", "c,42.0000,-70.9981,42.0020")
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(InstanceValidationError):
                load_instance(write_bps(Path(tmp), students=students))

    def test_bps_bad_number(self):
        students = STUDENTS_CSV.replace("b,42.00001", "b,north")
        with tempfile.TemporaryDirectory() as tmp:
            with self.assertRaises(InstanceParseError) as ctx:
                load_instance(write_bps(Path(tmp), students=students))
        self.assertEqual((ctx.exception.line, ctx.exception.field), (3, "lat"))

    def test_formats(self):
        self.assertEqual(InstanceFormats.infer("x.json"), InstanceFormats.NATIVE_JSON)
        self.assertEqual(InstanceFormats.infer("students.csv"), InstanceFormats.BPS_CSV)
        self.assertEqual(InstanceFormats.infer("inst73.txt"), InstanceFormats.EUCLIDEAN_SCHITTEKAT)
        self.assertTrue(InstanceFormats.is_known("bps-csv"))
        self.assertTrue(InstanceFormats.is_known("NATIVE_JSON"))
        with self.assertRaises(ValueError):
            getLoader("xml")

class TestInstanceModel(unittest.TestCase):
    def test_student_invariant(self):
        with self.assertRaises(InstanceValidationError):
            Student("s", "h", max_walk=1.0, door_to_door=True)
        with self.assertRaises(InstanceValidationError):
            Student("s", "h", max_walk=-1.0, door_to_door=False)

    def test_undeclared_node(self):
        with self.assertRaises(InstanceValidationError):
            Instance(name="x", students=(Student("s", "nowhere"),), candidate_stops=(), school="o", depot="o",
                     points={"o": (0.0, 0.0)})

    def test_negative_rate(self):
        with self.assertRaises(InstanceValidationError):
            CostModel(bus_per_mile=-1.0)

class TestMetric(unittest.TestCase):
    def test_euclidean(self):
        inst = Instance(name="e", students=(Student("s", "j"),), candidate_stops=(), school="i", depot="i",
                        points={"i": (0.0, 0.0), "j": (3.0, 4.0)})
        metric = compute_metric(inst)
        self.assertAlmostEqual(metric.dist("i", "j"), 5.0)
        self.assertAlmostEqual(metric.time("i", "j"), 5.0)
        self.assertEqual(metric.dist("j", "j"), 0.0)
        self.assertEqual(metric.units_per_mile, 1.0)

    def test_road_fastest_path(self):
        metric = compute_metric(line_network_instance())
        self.assertAlmostEqual(metric.time("a", "c"), 5.0)
        # distance follows the fastest path, not the shorter slow edge
        self.assertAlmostEqual(metric.dist("a", "c"), 5.0)
        self.assertEqual(metric.time("b", "b"), 0.0)
        self.assertAlmostEqual(metric.units_per_mile, 1609.344)

    def test_triangle_inequality(self):
        metric = compute_metric(line_network_instance())
        for i in metric.nodes:
            for j in metric.nodes:
                for k in metric.nodes:
                    self.assertLessEqual(metric.time(i, k), metric.time(i, j) + metric.time(j, k) + 1e-9)

    def test_unreachable(self):
        inst = line_network_instance({"d": (9.0, 9.0)}, (Student("s2", "d"),))
        with self.assertRaises(UnreachableNodeError) as ctx:
            compute_metric(inst)
        self.assertEqual(ctx.exception.node, "d")

    def test_validate_options(self):
        points = {"o": (0.0, 0.0), "h": (5.0, 0.0), "m": (0.0, 5.0)}
        far = Student("s", "h", max_walk=1.0, door_to_door=False)
        inst = Instance(name="v", students=(far,), candidate_stops=("m",), school="o", depot="o",
                        points=points, cost=CostModel(alt_per_mile={}))
        metric = compute_metric(inst)
        with self.assertRaises(InstanceValidationError):
            validate_options(inst, metric, 0.5)
        validate_options(inst, metric, 0.5, compress=False)
        with_alt = Instance(name="v", students=(far,), candidate_stops=("m",), school="o", depot="o",
                            points=points)
        validate_options(with_alt, compute_metric(with_alt), 0.5)

if __name__ == '__main__':
    unittest.main()
