"""Entropy and pressure metrics on moduli of metric graphs."""
from .errors import BudgetExceeded, ConfigError, NoCompletion, NumericFailure, ThermographError
from .graph import Graph, build_graph, collapse, pullback_length, standard_graph
from .spectral import entropy, grad_pressure, normalize_unit_entropy, pressure

__all__ = [
    "BudgetExceeded", "ConfigError", "Graph", "NoCompletion", "NumericFailure",
    "ThermographError", "build_graph", "collapse", "entropy", "grad_pressure",
    "normalize_unit_entropy", "pressure", "pullback_length", "standard_graph",
]
