"""The slowly-varying ladder map phi1 and its preimages.

phi1 is the cumulative integral of omega * Z^2, anchored per experiment:
its starting point T-hat solves u - (1-gamma)*u/ln(u) = T so that
phi1(T-hat) = T, and the map then climbs at local mean slope
1 - (1-gamma)/ln t.  The table stores dense checkpoints (t, phi1(t));
between checkpoints both evaluation directions integrate the weight on
a Gauss-Legendre sub-panel, so interpolation never crosses an
oscillation of Z^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial.legendre import leggauss

from .errors import ConvergenceError
from .intervals import IntervalUnion
from .zeta import DEFAULT_Z_CONFIG, EULER_GAMMA, ZEvalConfig, hardy_z, omega, zero_spacing

OMEGA_VERSION = "omega-v1"
MIN_ANCHOR_T = 1.0e4
_GL_CACHE = {}


def _gl(n):
    if n not in _GL_CACHE:
        _GL_CACHE[n] = leggauss(n)
    return _GL_CACHE[n]


def solve_anchor(T: float) -> float:
    """Root u of u - (1-gamma)*u/ln(u) = T; the anchor height T-hat > T."""
    if T < MIN_ANCHOR_T:
        raise ValueError(f"anchor solve needs T >= {MIN_ANCHOR_T:g}")
    gap = 1.0 - EULER_GAMMA
    u = T * (1.0 + gap / math.log(T))
    for _ in range(50):
        ln = math.log(u)
        f = u * (1.0 - gap / ln) - T
        if abs(f) < 1.0e-6:
            return u
        df = 1.0 - gap / ln + gap / (ln * ln)
        u -= f / df
    raise ConvergenceError(f"anchor solve stalled at T={T:g}")


def prime_count_approx(t: float) -> float:
    """t / ln t, the asymptotic stand-in for the prime-counting function."""
    if t < 100.0:
        raise ValueError("prime_count_approx requires t >= 100")
    return t / math.log(t)


@dataclass(frozen=True)
class LadderTable:
    """Monotone checkpoint table for phi1 on one working window."""

    anchor_hat: float
    anchor_image: float
    t: np.ndarray
    phi: np.ndarray
    max_step: float
    nodes_per_panel: int
    z_cfg: ZEvalConfig
    omega_version: str = OMEGA_VERSION

    def __post_init__(self):
        self.t.setflags(write=False)
        self.phi.setflags(write=False)
        if self.t[0] != self.anchor_hat or self.phi[0] != self.anchor_image:
            raise ValueError("first checkpoint must be the anchor")
        if np.any(np.diff(self.phi) < 0):
            raise ValueError("phi checkpoints must be nondecreasing")

    @property
    def domain(self):
        return float(self.t[0]), float(self.t[-1])

    @property
    def image(self):
        return float(self.phi[0]), float(self.phi[-1])

    def weight(self, ts):
        """The integrand omega * Z^2 at arbitrary heights."""
        z = hardy_z(ts, "riemann_siegel", self.z_cfg)
        return omega(ts) * np.square(z)

    def to_rows(self):
        return [(f"{a:.17g}", f"{b:.17g}") for a, b in zip(self.t, self.phi)]


def _panel_integrals(table_like, a_nodes, b_nodes, nodes_per_panel, z_cfg):
    """Integral of omega*Z^2 over each [a_i, b_i] by one GL panel apiece."""
    x, w = _gl(nodes_per_panel)
    half = 0.5 * (b_nodes - a_nodes)
    mid = 0.5 * (a_nodes + b_nodes)
    ts = mid[:, None] + half[:, None] * x[None, :]
    flat = ts.reshape(-1)
    z = hardy_z(flat, "riemann_siegel", z_cfg)
    vals = (omega(flat) * np.square(z)).reshape(ts.shape)
    return (vals @ w) * half


def build_table(T: float, extent: float, z_cfg: ZEvalConfig = DEFAULT_Z_CONFIG,
                nodes_per_panel: int = 8, max_step: float = None) -> LadderTable:
    """Integrate omega*Z^2 from the anchor until the image covers [T, T+extent]."""
    if extent <= 0:
        raise ValueError("extent must be positive")
    if extent > T / math.log(T):
        raise ValueError(
            f"extent {extent:g} exceeds the admissible window T/ln T = {T/math.log(T):g}"
        )
    t_hat = solve_anchor(T)
    if max_step is None:
        max_step = 0.25 * zero_spacing(t_hat)
    # mean slope of phi1 is just below 1; pad the domain estimate and extend
    # block-wise until the stopping rule fires
    slope = 1.0 - (1.0 - EULER_GAMMA) / math.log(T)
    block = max(256, int(math.ceil(1.05 * extent / slope / max_step)) + 2)
    hard_cap = 20 * block

    ts = [np.array([t_hat])]
    phis = [np.array([T])]
    grown = 0
    t_cursor, phi_cursor, carry = t_hat, T, 0.0
    while phi_cursor < T + extent:
        if grown >= hard_cap:
            raise ConvergenceError("ladder table failed to cover the requested image")
        edges = t_cursor + max_step * np.arange(block + 1)
        panels = _panel_integrals(None, edges[:-1], edges[1:], nodes_per_panel, z_cfg)
        # compensated (Neumaier) prefix in a fixed order for reproducibility
        prefix = np.empty(block)
        acc = phi_cursor
        for i, dv in enumerate(panels):
            s = acc + dv
            if abs(acc) >= abs(dv):
                carry += (acc - s) + dv
            else:
                carry += (dv - s) + acc
            acc = s
            prefix[i] = acc + carry
        ts.append(edges[1:])
        phis.append(prefix)
        t_cursor = float(edges[-1])
        phi_cursor = float(prefix[-1])
        grown += block

    t_all = np.concatenate(ts)
    phi_all = np.concatenate(phis)
    stop = int(np.searchsorted(phi_all, T + extent, side="left"))
    stop = min(stop + 2, t_all.size - 1)
    return LadderTable(
        anchor_hat=t_hat, anchor_image=T,
        t=t_all[: stop + 1].copy(), phi=phi_all[: stop + 1].copy(),
        max_step=max_step, nodes_per_panel=nodes_per_panel, z_cfg=z_cfg,
    )


def _local_increment(table, base_t, ts):
    """Integral of the weight from checkpoint base_t up to ts, elementwise."""
    x, w = _gl(table.nodes_per_panel)
    half = 0.5 * (ts - base_t)
    mid = 0.5 * (ts + base_t)
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = table.weight(nodes.reshape(-1)).reshape(nodes.shape)
    return (vals @ w) * half


def phi1_forward(table: LadderTable, ts) -> np.ndarray:
    """phi1 at arbitrary points of the table domain."""
    ts = np.atleast_1d(np.asarray(ts, dtype=float))
    lo, hi = table.domain
    if ts.size and (ts.min() < lo - 1e-9 or ts.max() > hi + 1e-9):
        raise ValueError("forward evaluation outside the table domain")
    idx = np.clip(np.searchsorted(table.t, ts, side="right") - 1, 0, table.t.size - 1)
    return table.phi[idx] + _local_increment(table, table.t[idx], ts)


def phi1_inverse(table: LadderTable, xs) -> np.ndarray:
    """Leftmost preimage of xs under phi1 (monotone bisection + Newton polish)."""
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    lo_img, hi_img = table.image
    if xs.size and (xs.min() < lo_img - 1e-9 or xs.max() > hi_img + 1e-9):
        raise ValueError("inverse evaluation outside the table image")
    idx = np.clip(np.searchsorted(table.phi, xs, side="left") - 1, 0, table.t.size - 2)
    lo = table.t[idx].copy()
    hi = table.t[idx + 1].copy()
    base_t = table.t[idx]
    deficit = xs - table.phi[idx]  # >= 0, to be matched by the local integral

    # the bracket keeps g(lo) < 0 <= g(hi), so it converges to the
    # leftmost preimage across flats of phi1; Newton accelerates wherever
    # the local slope omega*Z^2 is healthy, bisection covers the flats.
    # Converged points stick, otherwise a float-resolution Newton step
    # equal to a bracket end would be bounced back to the midpoint.
    phi_tol = 1.0e-10 * max(1.0, hi_img - lo_img)
    cur = 0.5 * (lo + hi)
    for it in range(14):
        g = _local_increment(table, base_t, cur) - deficit
        done = np.abs(g) <= phi_tol
        right = g >= 0.0
        hi = np.where(right, np.minimum(hi, cur), hi)
        lo = np.where(right | done, lo, np.maximum(lo, cur))
        if it < 6:
            cand = 0.5 * (lo + hi)
        else:
            slope = table.weight(cur)
            with np.errstate(divide="ignore", invalid="ignore"):
                nxt = cur - g / slope
            ok = np.isfinite(nxt) & (nxt >= lo) & (nxt <= hi)
            cand = np.where(ok, nxt, 0.5 * (lo + hi))
        cur = np.where(done, cur, cand)
    # final polish; degenerate slopes (flats of phi1) fall back to the
    # right bracket end, whose phi-residual is tiny there anyway
    g = _local_increment(table, base_t, cur) - deficit
    slope = table.weight(cur)
    with np.errstate(divide="ignore", invalid="ignore"):
        nxt = cur - g / slope
    ok = np.isfinite(nxt) & (nxt >= lo) & (nxt <= hi)
    polished = np.where(ok, nxt, np.where(g >= 0.0, cur, hi))
    return np.where(np.abs(g) <= phi_tol, cur, polished)


def phi1_eval(table: LadderTable, value, mode="forward"):
    """Scalar-friendly wrapper over the two evaluation directions."""
    if mode == "forward":
        out = phi1_forward(table, value)
    elif mode == "inverse":
        out = phi1_inverse(table, value)
    else:
        raise ValueError(f"unknown phi1_eval mode {mode!r}")
    return out if np.ndim(value) else float(out[0])


def lift_set(table: LadderTable, g: IntervalUnion) -> IntervalUnion:
    """Preimage of a union under phi1; component count is preserved."""
    if g.is_empty:
        return g
    flat = phi1_inverse(table, g.intervals.reshape(-1))
    lifted = IntervalUnion(flat.reshape(-1, 2))
    if lifted.n_components != g.n_components:
        raise ConvergenceError("lift merged or dropped components")
    return lifted
