"""Exact computations with finite categories, spans and bivariant functors."""
__version__ = "0.1.0"
