"""Numerical lab for Hardy-Z quadrature on disconnected Gram sets.

The package evaluates Hardy's Z along the critical line, solves the
generalized Gram phase equations, assembles the disconnected window sets
G1..G4, builds the slowly-varying ladder map phi1 with phi1' = omega*Z^2,
and compares correlation integrals over the lifted sets against Gram-point
autocorrelation sums.
"""

__version__ = "0.1.0"

from .errors import AccuracyError, ConvergenceError
from .zeta import EULER_GAMMA, ZEvalConfig, hardy_z, omega, theta

__all__ = [
    "AccuracyError",
    "ConvergenceError",
    "EULER_GAMMA",
    "ZEvalConfig",
    "hardy_z",
    "omega",
    "theta",
    "__version__",
]
