"""Vertex-cover obstruction sets, exact and heuristic covers, and a learned cover policy."""

__version__ = "0.1.0"
