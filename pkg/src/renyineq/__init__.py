"""Numerics for Renyi-type informational functionals and the sharp
inequalities relating entropy, divergence, and cross measures under
measure-preserving density transformations."""

__version__ = "0.1.0"
