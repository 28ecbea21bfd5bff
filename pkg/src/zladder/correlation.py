"""Gram-point sums: second-order autocorrelation and homogeneous power sums.

The autocorrelative sum runs over the classical Gram points in
[T, T + U1] with U1 = sqrt(T) * ln(P0), P0 = sqrt(T / 2pi); its
normalized form (divided by Q1 * ln P0, Q1 the actual node count) tracks
2 * sin(x)/x at shift beta = x / ln P0.  All reductions go through
``math.fsum``, so results are independent of summation order.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .gram import GramKind, Parity, heights_in_range
from .zeta import DEFAULT_Z_CONFIG, TWO_PI, hardy_z


def scale_u1(T: float) -> float:
    """U1 = sqrt(T) * ln(P0)."""
    return math.sqrt(T) * math.log(scale_p0(T))


def scale_p0(T: float) -> float:
    """P0 = sqrt(T / 2pi)."""
    return math.sqrt(T / TWO_PI)


def sinc_model(x: float) -> float:
    """The autocorrelation main-term shape 2*sin(x)/x."""
    return 2.0 * math.sin(x) / x if x != 0.0 else 2.0


@dataclass(frozen=True)
class AutocorrParams:
    """Shifted second-order sum over Gram points in [T, T+U1]."""

    T: float
    beta: float
    normalized: bool = False

    def __post_init__(self):
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")
        if self.beta * math.log(scale_p0(self.T)) > math.pi + 1.0e-12:
            raise ValueError(
                f"shift out of range: beta * ln P0 = "
                f"{self.beta * math.log(scale_p0(self.T)):.4f} exceeds pi"
            )

    @property
    def u1(self):
        return scale_u1(self.T)

    @property
    def ln_p0(self):
        return math.log(scale_p0(self.T))


def gram_heights(T: float, span: float) -> np.ndarray:
    """Heights of all theta_seq nodes (any parity, tau = 0) in [T, T+span]."""
    _, heights = heights_in_range(GramKind.THETA_SEQ, T, T + span, Parity.ALL)
    return heights


def autocorr_sum(params: AutocorrParams, z_cfg=DEFAULT_Z_CONFIG,
                 nodes: np.ndarray = None) -> float:
    """Sum of Z(t_nu) Z(t_nu + beta); normalized form divides by Q1 ln P0."""
    if nodes is None:
        nodes = gram_heights(params.T, params.u1)
    if nodes.size == 0:
        return 0.0
    za = hardy_z(nodes, "riemann_siegel", z_cfg)
    zb = za if params.beta == 0.0 else hardy_z(nodes + params.beta, "riemann_siegel", z_cfg)
    raw = math.fsum(za * zb)
    if not params.normalized:
        return raw
    return raw / (nodes.size * params.ln_p0)


def power_sum(T: float, span: float, exponent: int, z_cfg=DEFAULT_Z_CONFIG,
              nodes: np.ndarray = None) -> float:
    """Sum of Z^exponent(t_nu) over Gram points in [T, T+span]."""
    if exponent not in (2, 4):
        raise ValueError("exponent must be 2 or 4")
    if nodes is None:
        nodes = gram_heights(T, span)
    if nodes.size == 0:
        return 0.0
    z = hardy_z(nodes, "riemann_siegel", z_cfg)
    return math.fsum(z ** exponent)
