"""
Solve the bundled tiny instance, compare against the exhaustive oracle and save a route map.

Swap the instance path for one of your own (native json, district csv bundle or a planar
benchmark file) to try a real problem.  The oracle only handles a handful of students.
"""

import logging

from sbrp.model import load_instance
from sbrp.pipeline import SolveParams, brute_force_oracle, emit, solve
from sbrp.utilities import data_file_path

logging.getLogger("sbrp").setLevel(logging.INFO)

instance = load_instance(data_file_path("samples/tiny.json"))
print(instance)

# Stop selection plus edge compression
params = SolveParams(beta=2.0, exact_tsp=True)
solution = solve(instance, params)
print(emit(solution, "text-table"))

for route in solution.routes:
    stops = " -> ".join(v.key for v in route.stops)
    print(f"bus {route.trip_id}: {stops} -> school  ({route.load} students, {route.miles:.2f} mi, ${route.cost:.2f})")
for alt in solution.alternates:
    print(f"{alt.student}: {alt.mode} ({alt.miles:.2f} mi, ${alt.cost:.2f})")

# Everyone picked up at home, for comparison
home_params = SolveParams(compress=False, exact_tsp=True)
at_home = solve(instance, home_params)
oracle = brute_force_oracle(instance, home_params)
print(f"door-to-door pipeline {at_home.total_cost:.2f}, exhaustive optimum {oracle.total_cost:.2f}")

emit(solution, "svg", "tiny_routes.svg")
emit(solution, "geojson", "tiny_routes.geojson")
print("Wrote tiny_routes.svg and tiny_routes.geojson")
