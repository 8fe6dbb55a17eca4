"""
Problem data model, travel metric and instance ingestion.  Use load_instance to read an
instance file, or getLoader to get the appropriate InstanceLoader subclass.

instance.py defines the Instance, Student, CostModel and RoadNetwork types and their errors.
metric.py builds the pairwise travel metric and checks per-student feasibility.
loaders.py defines the InstanceLoader abstract base class and InstanceFormats enum.

loader modules include:
- native.py : native JSON interchange format (also dump_instance)
- bps.py : district road-network CSV bundles
- schittekat.py : planar benchmark instances
"""

import logging

from .instance import (CostModel, Instance, InstanceError, InstanceParseError, InstanceValidationError,
                       MetricKind, RoadNetwork, Student, UnreachableNodeError)
from .loaders import InstanceFormats, InstanceLoader
from .metric import Metric, compute_metric, reachable_stops, validate_options
from .native import dump_instance
from .synthetic import random_planar_instance

logger = logging.getLogger(__name__)

def getLoader(fmt_type):
    if not InstanceFormats.is_known(fmt_type):
        raise ValueError(f"Unknown instance format: {fmt_type}")

    # Normalize to enum
    fmt_type = InstanceFormats.normalize(fmt_type)

    if fmt_type == InstanceFormats.NATIVE_JSON:
        from .native import NativeJsonLoader
        return NativeJsonLoader
    elif fmt_type == InstanceFormats.BPS_CSV:
        from .bps import BpsCsvLoader
        return BpsCsvLoader
    elif fmt_type == InstanceFormats.EUCLIDEAN_SCHITTEKAT:
        from .schittekat import SchittekatLoader
        return SchittekatLoader

    raise NotImplementedError(f"Instance format '{fmt_type}' is not implemented.")

def load_instance(path, fmt=None, **options) -> Instance:
    """
    Load an instance file.

    :param path: file to read
    :param fmt: InstanceFormats member or name; inferred from the suffix when None
    :param options: loader specific options
    """
    if fmt is None:
        fmt = InstanceFormats.infer(path)
        logger.debug(f"Inferred format {fmt.value} for {path}")
    loader = getLoader(fmt)(**options)
    return loader.load(path)
