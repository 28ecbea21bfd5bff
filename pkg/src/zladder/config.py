"""Run configuration and pre-registered tolerance bands.

The bands encode desk-scale expectations (relative errors of order
1/ln T at ln T ~ 14); every one of them can be overridden per run and the
effective values are echoed into each report's params block.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .quadrature import DEFAULT_QUAD, QuadSpec
from .zeta import DEFAULT_Z_CONFIG, ZEvalConfig

T_MIN, T_MAX = 1.0e4, 1.0e9

EXPERIMENTS = ("thm1", "thm2", "thm3", "baselines", "selfcheck")

DEFAULT_X_GRID = tuple(0.2 + k * (0.5 * math.pi - 0.2) / 6.0 for k in range(7))

# gate: (lo, hi) ratio bands, or scalar multipliers on an error scale
DEFAULT_BANDS = {
    "thm1_ratio": (0.6, 1.4),
    "thm1_abs_mult": 2.0,
    "thm2_ratio": (0.6, 1.4),
    "thm3_resid_mult": 3.0,
    "pow2_ratio": (0.8, 1.2),
    "pow4_ratio": (0.7, 1.3),
    "mean_g3_ratio": (0.85, 1.15),
    "anchor_ratio": (0.95, 1.05),
    "distance_ratio": (0.85, 1.15),
    "mean_value_g1_ratio": (0.5, 1.5),
    "measure_rel_mult": 3.0,  # x ln T tolerance: 3 / ln T relative
    "identity_rel": 1.0e-4,
    "oracle_abs": 1.0e-4,
    "autocorr_rms": 0.25,
}


def parse_band_overrides(text: str) -> dict:
    """Parse 'key=lo:hi,key2=value' into band entries."""
    out = {}
    if not text:
        return out
    for item in text.split(","):
        item = item.strip()
        if not item:
            continue
        key, _, val = item.partition("=")
        key = key.strip()
        if key not in DEFAULT_BANDS:
            raise ValueError(f"unknown band name {key!r}")
        if ":" in val:
            lo, hi = val.split(":")
            out[key] = (float(lo), float(hi))
        else:
            out[key] = float(val)
    return out


@dataclass
class RunConfig:
    """Everything one experiment run needs, with validated defaults."""

    T: float = 1.0e6
    epsilon: float = 0.05
    x: float = 0.5 * math.pi
    y: float = 0.5 * math.pi
    x_grid: tuple = DEFAULT_X_GRID
    quad: QuadSpec = DEFAULT_QUAD
    z_cfg: ZEvalConfig = DEFAULT_Z_CONFIG
    experiments: tuple = ("selfcheck",)
    cache_dir: str = None
    out_dir: str = "."
    output_format: str = "csv"
    workers: int = 0
    figures: bool = True
    bands: dict = field(default_factory=dict)

    def __post_init__(self):
        if not T_MIN <= self.T <= T_MAX:
            raise ValueError(f"T must lie in [{T_MIN:g}, {T_MAX:g}]")
        for name, val in (("x", self.x), ("y", self.y)):
            if not 0.0 < val <= 0.5 * math.pi + 1e-12:
                raise ValueError(f"{name} must lie in (0, pi/2], got {val:g}")
        for val in self.x_grid:
            if not 0.0 < val <= 0.5 * math.pi + 1e-12:
                raise ValueError(f"x_grid values must lie in (0, pi/2], got {val:g}")
        if self.output_format not in ("csv", "json"):
            raise ValueError("output_format must be csv or json")
        unknown = set(self.experiments) - set(EXPERIMENTS)
        if unknown:
            raise ValueError(f"unknown experiments: {sorted(unknown)}")
        merged = dict(DEFAULT_BANDS)
        merged.update(self.bands)
        self.bands = merged

    def band(self, name):
        return self.bands[name]
