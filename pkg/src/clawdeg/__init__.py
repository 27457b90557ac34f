"""Exact approximate degrees of claw, k-claw, collision and OR properties.

Minimum-degree searches run as exact rational LP feasibility problems over a
symmetry-reduced input space.  The package also carries the polynomial
machinery for moving witnesses between input encodings and range sizes, the
reductions between these properties, and a symbolic query-amplitude tracker.
"""

__version__ = "0.1.0"
