"""Cumulative composite Simpson quadrature on piecewise-uniform grids.

Integrals are accumulated outward from an anchor time ``t0``; requested
output times split the span into segments, each subdivided uniformly into a
multiple of four panels. That keeps every Simpson pair inside one segment
and lets ``Branch.coarse()`` drop every other node for a refinement check.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

__all__ = ["DEFAULT_PANELS_PER_UNIT", "panels_per_unit", "Branch", "build_branches", "cumulative_simpson"]

DEFAULT_PANELS_PER_UNIT = 4096


def panels_per_unit(value: int | None = None) -> int:
    """Explicit value, else ``$VARODE_PANELS``, else the default."""
    if value is not None:
        return int(value)
    env = os.environ.get("VARODE_PANELS")
    if env:
        return int(env)
    return DEFAULT_PANELS_PER_UNIT


def cumulative_simpson(y: np.ndarray, h_pairs: np.ndarray) -> np.ndarray:
    """Integral from the first node to every node along axis 0.

    ``y`` has ``2 P + 1`` samples; ``h_pairs[p]`` is the (signed) spacing
    inside Simpson pair ``p``. Even nodes get the composite rule; odd nodes
    add the first half of their pair, (5 y0 + 8 y1 - y2) h / 12.
    """
    y = np.asarray(y)
    npairs = (y.shape[0] - 1) // 2
    if y.shape[0] != 2 * npairs + 1 or len(h_pairs) != npairs:
        raise ValueError("need an odd number of samples matching h_pairs")
    h = np.asarray(h_pairs).reshape((-1,) + (1,) * (y.ndim - 1))
    out = np.zeros(y.shape, dtype=np.result_type(y, float))
    y0, y1, y2 = y[0:-2:2], y[1:-1:2], y[2::2]
    out[2::2] = np.cumsum(h / 3.0 * (y0 + 4.0 * y1 + y2), axis=0)
    out[1::2] = out[0:-2:2] + h / 12.0 * (5.0 * y0 + 8.0 * y1 - y2)
    return out


@dataclass(frozen=True)
class Branch:
    """Fine nodes from the anchor outward to the farthest target on one side."""

    nodes: np.ndarray
    h_pairs: np.ndarray
    target_index: np.ndarray  # node index of each target, in target order
    target_position: np.ndarray  # position of each target in the caller's grid

    @property
    def panels(self) -> int:
        return len(self.nodes) - 1

    def coarse(self) -> "Branch":
        return Branch(self.nodes[::2], 2.0 * self.h_pairs[::2], self.target_index // 2, self.target_position)


def _branch(t0: float, targets: np.ndarray, positions: np.ndarray, ppu: int) -> Branch:
    nodes = [np.array([t0])]
    hp = []
    idx = []
    prev = t0
    count = 0
    for tt in targets:
        span = tt - prev
        if span == 0:
            idx.append(count)
            continue
        m = max(4, 4 * math.ceil(abs(span) * ppu / 4))
        seg = prev + span * np.arange(1, m + 1) / m
        seg[-1] = tt
        nodes.append(seg)
        hp.append(np.full(m // 2, span / m))
        count += m
        idx.append(count)
        prev = tt
    nodes = np.concatenate(nodes)
    h = np.concatenate(hp) if hp else np.zeros(0)
    return Branch(nodes, h, np.array(idx, dtype=int), positions)


def build_branches(t_grid, t0: float = 0.0, ppu: int | None = None) -> tuple[list[Branch], np.ndarray]:
    """Split sorted output times into the forward and backward branches from ``t0``."""
    t = np.asarray(t_grid, dtype=float).reshape(-1)
    if t.size == 0:
        raise ValueError("empty time grid")
    if np.any(np.diff(t) <= 0):
        raise ValueError("time grid must be strictly increasing")
    ppu = panels_per_unit(ppu)
    pos = np.arange(t.size)
    branches = []
    fwd = t >= t0
    if np.any(fwd):
        branches.append(_branch(t0, t[fwd], pos[fwd], ppu))
    bwd = t < t0
    if np.any(bwd):
        branches.append(_branch(t0, t[bwd][::-1], pos[bwd][::-1], ppu))
    return branches, t
