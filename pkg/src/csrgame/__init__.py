"""Capacitated selfish replication games with binary preferences."""

from .game import UNBOUNDED, is_equilibrium, radii, radius_vector
from .graph import Graph, generate, load_graph
from .dynamics import run_dynamics, bound_report

__version__ = "0.1.0"

__all__ = [
    "UNBOUNDED",
    "Graph",
    "generate",
    "load_graph",
    "is_equilibrium",
    "radii",
    "radius_vector",
    "run_dynamics",
    "bound_report",
]
