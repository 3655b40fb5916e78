"""feasilab: a numerical laboratory for the two-set convex feasibility
problem — projections onto closed convex sets, minimal-distance solvers with
certificates, set-convergence metrics, recession/rotundity diagnostics, and
reproducible stability experiments."""

from ._accel import BACKEND

__version__ = "0.1.0"
__all__ = ["BACKEND", "__version__"]
