"""Secrecy-rate optimization for wireless-powered AF relay networks.

Energy-harvesting relays amplify-and-forward a source signal while
eavesdroppers listen; each relay splits its received power between
harvesting and reception, and splits the harvested energy between
forwarding and cooperative jamming.  The package provides the exact
rate model (model), centralized conic designs for fixed and per-relay
power splitting (sps, dps), closed-form local heuristics (distributed),
channel generation (chansim), small-instance brute-force baselines
(oracle), and a Monte Carlo harness with a CLI (harness, cli).
"""

from .model import (ChannelSet, JammingCovariance, RateReport, RelayPolicy,
                    SystemParams, secrecy_rate)
from .chansim import PathLossModel, PlacementRule, RngSpec, Topology, sample_scenario
from .tausearch import SolveOpts

__version__ = "0.1.0"

__all__ = [
    "ChannelSet", "JammingCovariance", "RateReport", "RelayPolicy",
    "SystemParams", "secrecy_rate", "PathLossModel", "PlacementRule",
    "RngSpec", "Topology", "sample_scenario", "SolveOpts", "__version__",
]
