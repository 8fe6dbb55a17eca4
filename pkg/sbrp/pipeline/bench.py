"""
Batch runs over a directory of instance files.
"""

import logging
from dataclasses import dataclass
from pathlib import Path

from ..model import InstanceError, load_instance
from ..compression.stops import CompressionError
from ..cover.problem import CoverError
from ..trips.tsp import TripError
from .emit import TABLE_HEADER, text_row
from .solution import PipelineError
from .solve import SolveParams, solve

logger = logging.getLogger(__name__)

BENCH_ERRORS = (InstanceError, CompressionError, TripError, CoverError, PipelineError, ValueError)
INSTANCE_SUFFIXES = (".json", ".txt", ".dat")

@dataclass
class BenchRow:
    path: Path
    solution: object = None
    error: str | None = None

def instance_files(directory) -> list[Path]:
    """Instance files in a directory: json / txt / dat files and students.csv bundles one level down."""
    directory = Path(directory)
    if not directory.is_dir():
        raise NotADirectoryError(directory)
    found = [p for p in directory.iterdir() if p.is_file() and p.suffix.lower() in INSTANCE_SUFFIXES]
    found.extend(p for p in directory.glob("*/students.csv"))
    if (directory / "students.csv").is_file():
        found.append(directory / "students.csv")
    return sorted(found)

def bench(directory, params: SolveParams | None = None, fmt=None) -> list[BenchRow]:
    """Solve every instance in directory.  Failures are recorded per row, not raised."""
    params = SolveParams.from_defaults() if params is None else params
    rows = []
    for path in instance_files(directory):
        logger.info(f"Bench: {path}")
        try:
            instance = load_instance(path, fmt)
            rows.append(BenchRow(path=path, solution=solve(instance, params)))
        except BENCH_ERRORS as e:
            logger.error(f"{path.name}: {type(e).__name__}: {e}")
            rows.append(BenchRow(path=path, error=f"{type(e).__name__}: {e}"))
    return rows

def format_bench(rows) -> str:
    lines = [TABLE_HEADER]
    for row in rows:
        if row.solution is not None:
            lines.append(text_row(row.solution))
        else:
            lines.append(f"{row.path.stem:<20} error: {row.error}")
    return "\n".join(lines)
