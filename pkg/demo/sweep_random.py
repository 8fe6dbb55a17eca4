"""
Sweep the edge compression budget and the quasi-clique tolerance on a random planar instance
and plot how objective, fleet size, trip count and runtime respond.
"""

from sbrp.model import random_planar_instance
from sbrp.pipeline import SolveParams, format_sweep, plot_sweep, sweep

instance = random_planar_instance(seed=12, n_students=24, n_stops=30, extent=6.0, capacity=6,
                                  max_walk=1.0, t_max=30.0, stop_delay=(0.2, 0.05))
print(instance)

beta_rows = sweep(instance, "beta", [1.2, 1.6, 2.0, 2.5, 3.0], SolveParams(gamma=0.3))
print(format_sweep(beta_rows, "beta"))
plot_sweep(beta_rows, "beta", "sweep_beta.png")

gamma_rows = sweep(instance, "gamma", [0.0, 0.1, 0.2, 0.3, 0.4], SolveParams(beta=2.0))
print(format_sweep(gamma_rows, "gamma"))
plot_sweep(gamma_rows, "gamma", "sweep_gamma.png")
print("Wrote sweep_beta.png and sweep_gamma.png")
