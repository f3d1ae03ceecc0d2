"""Behavioural models of a FeFET associative memory that searches by cosine similarity.

Stages: 1FeFET1R arrays produce per-row dot-product and norm currents, a
translinear squarer-divider turns them into Ix**2 / Iy, and a current-mode
winner-take-all picks the largest. Monte Carlo, cost and HDC layers sit on top.
"""

__version__ = "0.1.0"
