"""
Trip construction.  Use getEvaluator to get the RouteEvaluator subclass for a routing method.

context.py defines PickupPoint and RoutingContext.
configuration.py defines TripConfiguration and TripList.
tsp.py holds the path TSP solvers and the evaluators built on them.
enumeration.py grows feasible trips over a shareability network.
"""

from .configuration import TripConfiguration, TripKind, TripList
from .context import PickupPoint, RoutingContext, pickups_from_plan, pickups_from_students
from .enumeration import TripCapExceededError, clique_check, enumerate_trips, quasi_clique_check
from .tsp import EvaluatorTypes, PathTspSizeError, RouteEvaluator, TripError, exact_path_tsp, insertion_path_tsp

def getEvaluator(eval_type):
    if not EvaluatorTypes.is_known(eval_type):
        raise ValueError(f"Unknown evaluator type: {eval_type}")

    # Normalize to enum
    if isinstance(eval_type, str):
        eval_type = EvaluatorTypes[eval_type] if eval_type in EvaluatorTypes.__members__ else EvaluatorTypes(eval_type)

    if eval_type == EvaluatorTypes.INSERTION:
        from .tsp import InsertionEvaluator
        return InsertionEvaluator
    elif eval_type == EvaluatorTypes.EXACT:
        from .tsp import ExactEvaluator
        return ExactEvaluator

    raise NotImplementedError(f"Evaluator type '{eval_type}' is not implemented.")
