"""Disconnected window sets G1..G4 as unions of disjoint intervals.

Each family is a union of symmetric phase windows around the even- or
odd-index members of one of the two Gram lattices:

    G1(x): theta_seq, even indices,  (t_{2nu}(-x),  t_{2nu}(x))
    G2(y): theta_seq, odd indices,   (t_{2nu+1}(-y), t_{2nu+1}(y))
    G3(x): theta1_seq, even indices, (g_{2nu}(-x),  g_{2nu}(x))
    G4(y): theta1_seq, odd indices,  (g_{2nu+1}(-y), g_{2nu+1}(y))

with centers enumerated over [T, T+span] and the assembled union always
clipped back to [T, T+span].  Spans default to T^(1/6+2*eps) for G1/G2
and T^(5/12+2*eps) for G3/G4.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .gram import GramKind, Parity, heights_in_range, phase_target, solve_heights

MIN_PARAMETER = 1.0e-6
MIN_BASE = 1.0e4


class Family(Enum):
    G1 = "G1"
    G2 = "G2"
    G3 = "G3"
    G4 = "G4"


_FAMILY_RULES = {
    Family.G1: (GramKind.THETA_SEQ, Parity.EVEN),
    Family.G2: (GramKind.THETA_SEQ, Parity.ODD),
    Family.G3: (GramKind.THETA1_SEQ, Parity.EVEN),
    Family.G4: (GramKind.THETA1_SEQ, Parity.ODD),
}


@dataclass(frozen=True)
class IntervalUnion:
    """Sorted union of pairwise-disjoint finite open intervals."""

    intervals: np.ndarray  # shape (n, 2), lo < hi, strictly increasing

    def __post_init__(self):
        arr = np.asarray(self.intervals, dtype=float).reshape(-1, 2)
        arr.setflags(write=False)
        object.__setattr__(self, "intervals", arr)
        if arr.size == 0:
            return
        if not np.all(arr[:, 0] < arr[:, 1]):
            raise ValueError("every interval needs lo < hi")
        if arr.shape[0] > 1 and not np.all(arr[:-1, 1] < arr[1:, 0]):
            raise ValueError("intervals must be sorted and strictly disjoint")

    @classmethod
    def empty(cls):
        return cls(np.empty((0, 2)))

    @property
    def n_components(self):
        return self.intervals.shape[0]

    @property
    def is_empty(self):
        return self.intervals.size == 0

    @property
    def support(self):
        """(lo, hi) hull of the union; undefined on empty."""
        if self.is_empty:
            raise ValueError("empty union has no support")
        return float(self.intervals[0, 0]), float(self.intervals[-1, 1])

    def to_rows(self):
        """CSV-ready (lo, hi) rows at round-trip precision."""
        return [(f"{lo:.17g}", f"{hi:.17g}") for lo, hi in self.intervals]

    @classmethod
    def from_rows(cls, rows):
        return cls(np.array([[float(a), float(b)] for a, b in rows]).reshape(-1, 2))


def measure(u: IntervalUnion) -> float:
    """Total length of the union."""
    if u.is_empty:
        return 0.0
    return float(np.sum(u.intervals[:, 1] - u.intervals[:, 0]))


def set_distance(a: IntervalUnion, b: IntervalUnion) -> float:
    """inf |s - t| over s in a, t in b; 0 when the sets meet."""
    if a.is_empty or b.is_empty:
        raise ValueError("set_distance is undefined for an empty union")
    ia, ib = a.intervals, b.intervals
    best = math.inf
    i = j = 0
    while i < len(ia) and j < len(ib):
        lo = max(ia[i, 0], ib[j, 0])
        hi = min(ia[i, 1], ib[j, 1])
        if lo <= hi:
            return 0.0
        best = min(best, lo - hi)
        if ia[i, 1] < ib[j, 1]:
            i += 1
        else:
            j += 1
    return float(best)


def clip(u: IntervalUnion, lo: float, hi: float) -> IntervalUnion:
    """Intersect with [lo, hi]; straddling components are truncated."""
    if u.is_empty:
        return u
    arr = u.intervals
    clipped = np.column_stack([np.maximum(arr[:, 0], lo), np.minimum(arr[:, 1], hi)])
    return IntervalUnion(clipped[clipped[:, 0] < clipped[:, 1]])


def interval(lo: float, hi: float) -> IntervalUnion:
    return IntervalUnion(np.array([[lo, hi]]))


@dataclass(frozen=True)
class SetFamily:
    """Recipe for one window set: family, half-width parameter, base, span."""

    family: Family
    parameter: float
    base: float
    span: float = None  # None -> default power of base per family
    epsilon: float = 0.05

    def __post_init__(self):
        if not 0.0 < self.parameter <= 0.5 * math.pi:
            raise ValueError(f"parameter must lie in (0, pi/2], got {self.parameter:g}")
        if self.parameter < MIN_PARAMETER:
            raise ValueError(
                f"parameter {self.parameter:g} is below spacing resolution"
            )
        if self.base < MIN_BASE:
            raise ValueError(f"base must be >= {MIN_BASE:g}")
        if self.span is None:
            object.__setattr__(self, "span", default_span(self.family, self.base, self.epsilon))
        if self.span <= 0:
            raise ValueError("span must be positive")

    @property
    def window(self):
        return self.base, self.base + self.span


def default_span(family: Family, base: float, epsilon: float = 0.05) -> float:
    """T^(1/6+2eps) for G1/G2, T^(5/12+2eps) for G3/G4."""
    exponent = 1.0 / 6.0 if family in (Family.G1, Family.G2) else 5.0 / 12.0
    return base ** (exponent + 2.0 * epsilon)


def build_set(spec: SetFamily) -> IntervalUnion:
    """Assemble the window union for the recipe, clipped to [T, T+span]."""
    kind, parity = _FAMILY_RULES[spec.family]
    lo, hi = spec.window
    indices, _ = heights_in_range(kind, lo, hi, parity)
    if indices.size == 0:
        return IntervalUnion.empty()
    idx = indices.astype(float)
    left = solve_heights(kind, phase_target(kind, idx, -spec.parameter))
    right = solve_heights(kind, phase_target(kind, idx, spec.parameter))
    if not np.all(left < right):
        raise ValueError("degenerate window: parameter below spacing resolution")
    # neighbouring windows must stay strictly disjoint for any parameter <= pi/2
    if left.size > 1 and not np.all(right[:-1] < left[1:]):
        raise ValueError("window construction produced overlapping components")
    return clip(IntervalUnion(np.column_stack([left, right])), lo, hi)
