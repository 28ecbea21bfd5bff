"""Versioned CSV cache for Gram nodes and ladder checkpoints.

Text CSV keeps the cache diffable and language-neutral; all numbers are
written with 17 significant digits, so a cache hit reproduces the exact
doubles of a cold run and cached results are bit-identical to fresh ones.
"""

from __future__ import annotations

import csv
import hashlib
from pathlib import Path

import numpy as np

from .ladder import LadderTable
from .zeta import ZEvalConfig

CACHE_VERSION = "v1"


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _key(*parts) -> str:
    return hashlib.sha1("|".join(str(p) for p in parts).encode()).hexdigest()[:16]


class FileCache:
    """Directory-backed cache; safe to delete at any time."""

    def __init__(self, root):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)

    def _gram_path(self, kind, lo, hi, parity, offset):
        key = _key(kind.value, _fmt(lo), _fmt(hi), parity.value, _fmt(offset))
        return self.root / f"zlcache_{CACHE_VERSION}_gram_{kind.value}_{key}.csv"

    def get_gram(self, kind, lo, hi, parity, offset):
        path = self._gram_path(kind, lo, hi, parity, offset)
        if not path.exists():
            return None
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        body = rows[1:]  # header
        indices = np.array([int(r[0]) for r in body], dtype=np.int64)
        heights = np.array([float(r[1]) for r in body])
        return indices, heights

    def put_gram(self, kind, lo, hi, parity, offset, indices, heights):
        path = self._gram_path(kind, lo, hi, parity, offset)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["index", "height"])
            for i, h in zip(indices, heights):
                w.writerow([int(i), _fmt(h)])

    def _ladder_path(self, T, extent, omega_version, spec_key):
        key = _key(_fmt(T), _fmt(extent), omega_version, spec_key)
        return self.root / f"zlcache_{CACHE_VERSION}_ladder_{key}.csv"

    def get_ladder(self, T, extent, omega_version, spec_key, z_cfg: ZEvalConfig):
        path = self._ladder_path(T, extent, omega_version, spec_key)
        if not path.exists():
            return None
        with path.open(newline="") as fh:
            rows = list(csv.reader(fh))
        meta = dict(zip(rows[0], rows[1]))
        body = rows[3:]  # meta header, meta row, column header
        t = np.array([float(r[0]) for r in body])
        phi = np.array([float(r[1]) for r in body])
        return LadderTable(
            anchor_hat=float(meta["anchor_hat"]),
            anchor_image=float(meta["anchor_image"]),
            t=t, phi=phi,
            max_step=float(meta["max_step"]),
            nodes_per_panel=int(meta["nodes_per_panel"]),
            z_cfg=z_cfg,
            omega_version=meta["omega_version"],
        )

    def put_ladder(self, T, extent, spec_key, table: LadderTable):
        path = self._ladder_path(T, extent, table.omega_version, spec_key)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["anchor_hat", "anchor_image", "max_step",
                        "nodes_per_panel", "omega_version"])
            w.writerow([_fmt(table.anchor_hat), _fmt(table.anchor_image),
                        _fmt(table.max_step), table.nodes_per_panel,
                        table.omega_version])
            w.writerow(["t", "phi"])
            for a, b in zip(table.t, table.phi):
                w.writerow([_fmt(a), _fmt(b)])
