"""Conformal covariant tensors and Finsler metrics for deformed Poincare subgroups."""

__version__ = "0.1.0"
