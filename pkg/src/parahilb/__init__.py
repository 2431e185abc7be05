"""Parabolic Hilbert schemes of points.

Exact combinatorics of the torus-fixed cells of parabolic Hilbert schemes of
points on a surface with a divisor: fixed-point labels, tangent weights,
generating functions of Betti numbers and the Heisenberg/Fock model, each
cross-checked by an independent brute-force computation.
"""

__version__ = "0.1.0"
