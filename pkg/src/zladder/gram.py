"""Generalized Gram sequences: roots of the two phase-lattice equations.

``theta_seq`` solves theta(t_nu(tau)) = pi*nu + tau (the classical Gram
points at tau = 0), ``theta1_seq`` solves theta1(g_nu(tau)) =
(pi/2)*nu + tau/2, a lattice at half the Gram spacing.  Heights are
produced by a seeded Newton iteration on the monotone increasing branch
of the phase; every returned node is residual-checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConvergenceError
from .zeta import TWO_PI, theta

RESIDUAL_TOL = 1.0e-9
_MAX_NEWTON = 50
# Newton iterates are clamped above the phase minimum near t = 2*pi so the
# solver stays on the increasing branch for every admissible target.
_T_FLOOR = 12.0


class GramKind(Enum):
    THETA_SEQ = "theta_seq"
    THETA1_SEQ = "theta1_seq"


class Parity(Enum):
    ALL = "all"
    EVEN = "even"
    ODD = "odd"


@dataclass(frozen=True)
class GramNode:
    """One solved phase-equation root."""

    kind: GramKind
    index: int
    offset: float
    height: float


def phase_target(kind, index, offset):
    """Right-hand side of the phase equation for (kind, nu, tau)."""
    if kind == GramKind.THETA_SEQ:
        return math.pi * index + offset
    return 0.5 * math.pi * index + 0.5 * offset


def _phase(kind, t):
    variant = "exact_asymptotic" if kind == GramKind.THETA_SEQ else "main_term"
    return theta(t, variant, 0)


def _phase_rate(kind, t):
    variant = "exact_asymptotic" if kind == GramKind.THETA_SEQ else "main_term"
    return theta(t, variant, 1)


def _validate_offset(offset):
    if not -math.pi <= offset <= math.pi:
        raise ValueError(f"offset must lie in [-pi, pi], got {offset:g}")


def solve_heights(kind, targets):
    """Vectorized phase-equation solve for an array of target phases.

    Seed: two fixed-point passes on t = (2*target + t + pi/4)/ln(t/2pi),
    the inverted main term; then Newton with the phase rate
    (1/2)ln(t/2pi).  The phase is convex and increasing on the working
    branch, so the clamped iteration converges for every index >= 1.
    """
    targets = np.atleast_1d(np.asarray(targets, dtype=float))
    if targets.size == 0:
        return np.empty(0)
    if targets.min() < -1.0e-12:
        raise ValueError("phase target below the solver's admissible branch")

    t = np.maximum(TWO_PI * math.e ** 2, 2.0 * targets)
    for _ in range(2):
        t = (2.0 * targets + t + math.pi / 4) / np.log(t / TWO_PI)
        t = np.maximum(t, _T_FLOOR)

    tol = RESIDUAL_TOL * np.maximum(1.0, np.abs(targets))
    active = np.arange(targets.size)
    for _ in range(_MAX_NEWTON):
        f = _phase(kind, t[active]) - targets[active]
        still = np.abs(f) >= tol[active]
        active = active[still]
        if active.size == 0:
            break
        f = f[still]
        t[active] = np.maximum(t[active] - f / _phase_rate(kind, t[active]), _T_FLOOR)
    else:
        worst = active[np.abs(_phase(kind, t[active]) - targets[active]).argmax()]
        raise ConvergenceError(
            f"phase solve did not converge in {_MAX_NEWTON} iterations "
            f"(target {targets[worst]:.6g})"
        )
    return t


def node_height(kind, index, offset=0.0):
    """Height of the (kind, nu, tau) node, residual < 1e-9 * max(1, |target|)."""
    if index < 1:
        raise ValueError(f"index must be >= 1, got {index}")
    _validate_offset(offset)
    return float(solve_heights(kind, [phase_target(kind, index, offset)])[0])


def _index_window(kind, lo, hi, offset):
    """Smallest/largest index whose node can lie in [lo, hi]."""
    if kind == GramKind.THETA_SEQ:
        lo_i = (_phase(kind, lo) - offset) / math.pi
        hi_i = (_phase(kind, hi) - offset) / math.pi
    else:
        lo_i = (_phase(kind, lo) - 0.5 * offset) / (0.5 * math.pi)
        hi_i = (_phase(kind, hi) - 0.5 * offset) / (0.5 * math.pi)
    return max(1, math.floor(lo_i)), math.ceil(hi_i)


def heights_in_range(kind, lo, hi, parity=Parity.ALL, offset=0.0):
    """(indices, heights) of all nodes with height in [lo, hi], sorted."""
    if not 100.0 <= lo < hi:
        raise ValueError(f"need 100 <= lo < hi, got [{lo:g}, {hi:g}]")
    _validate_offset(offset)
    parity = Parity(parity)
    first, last = _index_window(kind, lo, hi, offset)
    indices = np.arange(first, last + 1, dtype=np.int64)
    if parity == Parity.EVEN:
        indices = indices[indices % 2 == 0]
    elif parity == Parity.ODD:
        indices = indices[indices % 2 == 1]
    if indices.size == 0:
        return indices, np.empty(0)
    targets = phase_target(kind, indices.astype(float), offset)
    heights = solve_heights(kind, targets)
    keep = (heights >= lo) & (heights <= hi)
    indices, heights = indices[keep], heights[keep]
    if heights.size > 1 and not np.all(np.diff(heights) > 0):
        raise ConvergenceError("solved node heights are not strictly increasing")
    return indices, heights


def nodes_in_range(kind, lo, hi, parity=Parity.ALL, offset=0.0):
    """GramNode list for all nodes in [lo, hi] passing the parity filter."""
    indices, heights = heights_in_range(kind, lo, hi, parity, offset)
    return [
        GramNode(kind, int(i), offset, float(h)) for i, h in zip(indices, heights)
    ]
