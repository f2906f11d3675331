"""
SCBO Package

Smoothing consensus-based optimization for nonsmooth nonconvex global
minimization, with consensus diagnostics and a benchmark harness.
"""

__version__ = "1.0.0"
__author__ = "SCBO developers"
