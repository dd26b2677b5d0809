"""Exact and numerical machinery for random walks on the dual of SU_q(n)."""

__version__ = "0.1.0"
