"""Entanglement structure of random tensor network states.

The package takes a boundary-decorated network, finds the maximal flow
between the two boundary regions, orders the residual clusters along the
flow paths, reduces that order series-parallel, and reads off the limiting
entanglement spectrum as a free-probability expression. An exact
finite-dimension oracle and a Monte Carlo simulator cross-check every step.
"""

from __future__ import annotations

__version__ = "0.1.0"
