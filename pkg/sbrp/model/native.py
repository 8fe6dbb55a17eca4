"""
Native JSON instance format - the interchange format of this package.

Top-level keys: name, points | network, students, stops, school, depot, params, costs.
The schema lives in sbrp/data/schemas/instance.json.  Infinite alternate rates are written as
the string "inf"; unbounded t_max and fleet_limit as null.  dump_instance followed by
load_instance returns an equal Instance.
"""

import json
import logging
import math
from pathlib import Path

from ..utilities import load_data_file, load_defaults
from .instance import CostModel, Instance, InstanceParseError, RoadNetwork, Student
from .loaders import InstanceLoader

logger = logging.getLogger(__name__)

try:
    import jsonschema
except ImportError:
    jsonschema = None

class NativeJsonLoader(InstanceLoader):
    format_name = "native-json"

    def load(self, path) -> Instance:
        path = Path(path)
        try:
            with open(path, "r") as fobj:
                data = json.load(fobj)
        except json.JSONDecodeError as e:
            raise InstanceParseError(path, line=e.lineno, info=e.msg) from e
        validate_instance_data(data, path)
        instance = instance_from_dict(data, path)
        logger.info(f"Loaded {instance}")
        return instance

def validate_instance_data(data, path="<data>") -> None:
    """
    Validate a decoded native-json document against the packaged schema.
    Raises InstanceParseError naming the offending field.
    """
    if jsonschema is None:
        logger.warning("jsonschema not installed; skipping schema validation of native-json input.")
        return
    schema = load_data_file("schemas/instance")
    try:
        jsonschema.validate(instance=data, schema=schema)
    except jsonschema.ValidationError as ve:
        field = "/".join(str(p) for p in ve.absolute_path) or None
        raise InstanceParseError(path, field=field, info=ve.message) from ve

def _rate_in(val) -> float:
    return math.inf if val == "inf" else float(val)

def _rate_out(val: float):
    return "inf" if math.isinf(val) else val

def instance_from_dict(data: dict, path="<data>") -> Instance:
    defaults = load_defaults()
    params = data.get("params", {})
    costs = data.get("costs", {})
    try:
        students = tuple(
            Student(
                id=str(s["id"]),
                home=str(s["home"]),
                max_walk=float(s.get("max_walk", 0.0)),
                door_to_door=bool(s.get("door_to_door", float(s.get("max_walk", 0.0)) == 0.0)),
            )
            for s in data["students"]
        )
        cost = CostModel(
            bus_fixed=float(costs.get("bus_fixed", defaults["costs"]["bus_fixed"])),
            bus_per_mile=float(costs.get("bus_per_mile", defaults["costs"]["bus_per_mile"])),
            alt_per_mile={str(k): _rate_in(v) for k, v in costs.get("alternate", defaults["costs"]["alternate"]).items()},
        )
        network = None
        points = None
        if "points" in data:
            points = {str(k): (float(v[0]), float(v[1])) for k, v in data["points"].items()}
        else:
            net = data["network"]
            network = RoadNetwork(
                nodes={str(k): (float(v[0]), float(v[1])) for k, v in net["nodes"].items()},
                edges=tuple((str(u), str(v), float(length), float(time)) for u, v, length, time in net["edges"]),
                coordinates=net.get("coordinates", "latlon"),
            )
        t_max = params.get("t_max", defaults["t_max_s"])
        delay = params.get("stop_delay", defaults["stop_delay"])
        return Instance(
            name=str(data.get("name", Path(str(path)).stem)),
            students=students,
            candidate_stops=tuple(str(m) for m in data["stops"]),
            school=str(data["school"]),
            depot=str(data["depot"]),
            cost=cost,
            capacity=int(params.get("capacity", defaults["capacity"])),
            t_max=math.inf if t_max is None else float(t_max),
            fleet_limit=params.get("fleet_limit"),
            stop_delay=(float(delay[0]), float(delay[1])),
            network=network,
            points=points,
        )
    except KeyError as e:
        raise InstanceParseError(path, field=str(e.args[0]), info="Required key missing.") from e
    except (TypeError, ValueError, IndexError) as e:
        raise InstanceParseError(path, info=str(e)) from e

def instance_to_dict(instance: Instance) -> dict:
    data = {
        "name": instance.name,
        "students": [
            {"id": s.id, "home": s.home, "max_walk": s.max_walk, "door_to_door": s.door_to_door}
            for s in instance.students
        ],
        "stops": list(instance.candidate_stops),
        "school": instance.school,
        "depot": instance.depot,
        "params": {
            "capacity": instance.capacity,
            "t_max": None if math.isinf(instance.t_max) else instance.t_max,
            "fleet_limit": instance.fleet_limit,
            "stop_delay": list(instance.stop_delay),
        },
        "costs": {
            "bus_fixed": instance.cost.bus_fixed,
            "bus_per_mile": instance.cost.bus_per_mile,
            "alternate": {k: _rate_out(v) for k, v in instance.cost.alt_per_mile.items()},
        },
    }
    if instance.points is not None:
        data["points"] = {k: list(v) for k, v in instance.points.items()}
    else:
        net = instance.network
        data["network"] = {
            "coordinates": net.coordinates, # type: ignore
            "nodes": {k: list(v) for k, v in net.nodes.items()}, # type: ignore
            "edges": [list(e) for e in net.edges], # type: ignore
        }
    return data

def dump_instance(instance: Instance, path) -> Path:
    """Write an instance as native-json."""
    path = Path(path)
    with open(path, "w") as fobj:
        json.dump(instance_to_dict(instance), fobj, indent=4, sort_keys=True)
    logger.info(f"Wrote {instance.name} to {path}")
    return path
