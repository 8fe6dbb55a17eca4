"""
Network compression.

stops.py selects the minimum stop set (node compression) and splits crowded stops.
network.py builds the shareability network and prunes it (edge compression).
"""

from .network import ShareabilityNetwork, adjusted_travel_time, build_network, pair_is_feasible, prune_edges
from .stops import CompressionError, StopPlan, UncoveredStudentsError, minimum_stop_cover, select_stops, split_stops
