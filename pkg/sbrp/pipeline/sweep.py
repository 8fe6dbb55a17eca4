"""
Parameter sweeps over the edge compression budget (beta) or the quasi-clique tolerance (gamma).
"""

import logging
import time
from dataclasses import dataclass, replace

from ..model.instance import Instance
from ..model.metric import compute_metric
from .solve import SolveParams, solve

logger = logging.getLogger(__name__)

SWEEP_PARAMS = ("beta", "gamma")
DEFAULT_GRIDS = {
    "beta": (1.2, 1.5, 2.0, 2.5, 3.0, 4.0),
    "gamma": (0.0, 0.1, 0.2, 0.3, 0.4, 0.5),
}

@dataclass
class SweepRow:
    value: float
    objective: float
    buses: int
    n_trips: int
    runtime: float
    status: str

def sweep(instance: Instance, param: str, grid=None, params: SolveParams | None = None) -> list[SweepRow]:
    """Solve once per grid value, sharing one metric.  Other parameters come from params."""
    if param not in SWEEP_PARAMS:
        raise ValueError(f"Sweep parameter must be one of {SWEEP_PARAMS}, got {param}")
    params = SolveParams.from_defaults() if params is None else params
    grid = DEFAULT_GRIDS[param] if grid is None else tuple(grid)
    metric = compute_metric(instance)
    rows = []
    for value in grid:
        started = time.monotonic()
        solution = solve(instance, replace(params, **{param: value}), metric=metric)
        rows.append(SweepRow(value=value, objective=solution.total_cost, buses=solution.bus_count,
                             n_trips=solution.diagnostics.n_trips, runtime=round(time.monotonic() - started, 6),
                             status=solution.diagnostics.status))
        logger.info(f"{param}={value}: objective {solution.total_cost:.2f}, {solution.diagnostics.n_trips} trips")
    return rows

def format_sweep(rows, param: str) -> str:
    lines = [f"{param:>8} {'objective':>12} {'buses':>6} {'|T_b|':>10} {'runtime_s':>10} status"]
    for r in rows:
        lines.append(f"{r.value:>8.3g} {r.objective:>12.2f} {r.buses:>6d} {r.n_trips:>10d} {r.runtime:>10.3f} {r.status}")
    return "\n".join(lines)

def plot_sweep(rows, param: str, path):
    """Four panels against the swept value: objective, buses, bus trips and runtime."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    values = [r.value for r in rows]
    panels = (("objective", "Objective"), ("buses", "Buses"), ("n_trips", "Bus trips"), ("runtime", "Runtime [s]"))
    fig, axes = plt.subplots(2, 2, figsize=(9, 7))
    for ax, (attr, label) in zip(axes.flat, panels):
        ax.plot(values, [getattr(r, attr) for r in rows], marker="o")
        ax.set_xlabel(param)
        ax.set_ylabel(label)
        ax.grid(True, alpha=0.3)
    fig.tight_layout()
    fig.savefig(path)
    plt.close(fig)
    logger.info(f"Saved sweep plot to {path}")
    return path
