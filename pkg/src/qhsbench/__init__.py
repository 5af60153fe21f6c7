"""Exact computations around finite type invariants of rational homology spheres."""

__version__ = "0.1.0"
