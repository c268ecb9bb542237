"""Labelled 1-safe Petri nets for multi-agent systems that synchronise
either on shared transitions or on shared data."""

from .errors import (CapacityError, CompositionError, DocumentError, FiringError, ModuleError,
                     NetError, ProjectionError, SafetyError, StructuralError, SynthesisError)
from .lts import Lts, distinguishing_trace, isomorphic, prune_unreachable
from .net import LabeledNet, enabled, fire, is_sequential_component, marking_graph, read_to_selfloops
from .verdict import Verdict

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "CompositionError", "DocumentError", "FiringError", "ModuleError",
    "NetError", "ProjectionError", "SafetyError", "StructuralError", "SynthesisError",
    "Lts", "distinguishing_trace", "isomorphic", "prune_unreachable",
    "LabeledNet", "enabled", "fire", "is_sequential_component", "marking_graph",
    "read_to_selfloops", "Verdict",
]
