"""Exact-arithmetic workbench for pairwise compatibility graphs on small vertex counts."""

from .graphs import (
    CanonicalForm,
    Graph,
    Graph6Error,
    canonical_form,
    canonical_labeling,
    enumerate_connected,
    is_connected,
    parse_graph6,
    to_graph6,
    wheel,
)

__version__ = "0.1.0"

__all__ = [
    "CanonicalForm",
    "Graph",
    "Graph6Error",
    "canonical_form",
    "canonical_labeling",
    "enumerate_connected",
    "is_connected",
    "parse_graph6",
    "to_graph6",
    "wheel",
    "__version__",
]
