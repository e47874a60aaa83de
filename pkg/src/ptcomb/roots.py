"""Scan-and-bracket helpers for smooth oscillatory functions of ``eps``."""

from __future__ import annotations

import math
import warnings

import numpy as np
from scipy.optimize import brentq

# samples per interval of length pi
SCAN_PER_PI = 2000
XTOL = 1e-14
RTOL = 4 * np.finfo(float).eps


def scan_grid(lo: float, hi: float, per_pi: int = SCAN_PER_PI) -> np.ndarray:
    """Uniform grid on ``[lo, hi]`` with every multiple of pi inside added exactly."""
    if not hi > lo:
        raise ValueError(f"empty range [{lo}, {hi}]")
    n = max(2, int(math.ceil((hi - lo) / math.pi * per_pi)) + 1)
    grid = np.linspace(lo, hi, n)
    k = np.arange(math.ceil(lo / math.pi), math.floor(hi / math.pi) + 1)
    pins = k * math.pi
    pins = pins[(pins > lo) & (pins < hi)]
    grid = np.union1d(grid, pins)
    # drop uniform points that crowd a pinned one
    keep = np.ones(grid.size, dtype=bool)
    for p in pins:
        i = np.searchsorted(grid, p)
        for j in (i - 1, i + 1):
            if 0 < j < grid.size - 1 and abs(grid[j] - p) < 1e-9:
                keep[j] = False
    return grid[keep]


def polish(f, a: float, b: float) -> float:
    return brentq(f, a, b, xtol=XTOL, rtol=RTOL, maxiter=200)


def sign_change_roots(f, grid: np.ndarray, values: np.ndarray) -> list:
    """Roots of ``f`` bracketed by sign changes of ``values`` on ``grid``.

    Exact zeros at grid points count when the neighbours straddle them.
    """
    roots = []
    s = np.sign(values)
    for i in range(grid.size - 1):
        if s[i] * s[i + 1] < 0:
            roots.append(polish(f, grid[i], grid[i + 1]))
        elif s[i + 1] == 0 and 0 < i + 1 < grid.size - 1 and s[i] * s[i + 2] < 0:
            roots.append(float(grid[i + 1]))
    return roots


def warn_if_crowded(points, step: float, what: str) -> None:
    pts = np.sort(np.asarray(points, dtype=float))
    if pts.size > 1 and np.any(np.diff(pts) < step):
        warnings.warn(f"{what} closer than the scan step {step:.3g}; some may be missed",
                      RuntimeWarning, stacklevel=3)
