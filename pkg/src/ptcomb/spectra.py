"""Allowed bands, dispersion, band tables and density of states.

Every routine samples ``B`` on a scan grid that also contains each multiple
of pi and every polished extremum of ``B``.  Between two consecutive samples
``B`` is then monotone, so a change of band membership (or a root of
``B - cos(N Q a)``) is always bracketed by a neighbouring pair.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad

from .analysis import locate_extrema
from .condition import big_b_derivative, big_b_real
from .lattice import UnitCell
from .roots import SCAN_PER_PI, polish, scan_grid, warn_if_crowded

# |B| <= 1 + TOUCH_TOL counts as allowed
TOUCH_TOL = 1e-12
ROOT_TOL = 1e-12
MERGE_TOL = 1e-9
DOS_EDGE_TOL = 1e-12
ANOMALY_SLOPE = 1e-8


class OutOfBandError(ValueError):
    """Requested energy is not strictly inside an allowed band."""

    def __init__(self, eps, b_value):
        super().__init__(f"eps={eps:.12g} is not inside an allowed band (B={b_value:.12g})")
        self.eps = eps
        self.b_value = b_value


@dataclass(frozen=True)
class BandInterval:
    eps_lo: float
    eps_hi: float
    edge_lo_kind: str  # "crossing" | "tangency" | "range-boundary"
    edge_hi_kind: str

    @property
    def width(self) -> float:
        return self.eps_hi - self.eps_lo

    def contains(self, eps: float, tol: float = 0.0) -> bool:
        return self.eps_lo - tol <= eps <= self.eps_hi + tol


@dataclass(frozen=True)
class DispersionPoint:
    """Energies solving ``B(eps) = cos(N q_a)`` at one ``q_a``, ascending.

    ``multiplicities`` is 2 where two branches meet at an extremum of ``B``
    (e.g. the band-touching points at the zone centre), 1 otherwise.
    """

    q_a: float
    energies: tuple
    multiplicities: tuple
    discontinuity_flags: tuple


@dataclass(frozen=True)
class DosPoint:
    """Density per unit ``eps`` per unit length ``a``; ``N * density`` is per cell."""

    eps: float
    density: float
    anomaly: bool = False


@dataclass(frozen=True)
class Samples:
    x: np.ndarray
    b: np.ndarray
    critical: np.ndarray  # True at extrema of B


def _require_pt(cell: UnitCell) -> None:
    if not cell.pt_ordered:
        raise ValueError("spectra are defined for PT-ordered cells only")


def _range(eps_range) -> Tuple[float, float]:
    lo, hi = map(float, eps_range)
    if not (0 <= lo < hi and math.isfinite(hi)):
        raise ValueError(f"need 0 <= lo < hi, got {eps_range}")
    return lo, hi


def sample_condition(cell: UnitCell, eps_range, per_pi: int = SCAN_PER_PI) -> Samples:
    """Scan grid plus multiples of pi plus every extremum of ``B``."""
    lo, hi = _range(eps_range)
    grid = scan_grid(lo, hi, per_pi)
    # the derivative route needs eps > 0; B is even so eps = 0 is a critical point
    inner = grid[grid > 0]
    found = [x for x, _ in locate_extrema(cell, inner)] if inner.size > 1 else []
    warn_if_crowded(found, math.pi / per_pi, "extrema of the band condition")
    marked = np.zeros(grid.size, dtype=bool)
    extra = []
    for c in found:
        # an extremum that landed on a grid point marks that point instead
        j = int(np.argmin(np.abs(grid - c)))
        if abs(grid[j] - c) <= 1e-12:
            marked[j] = True
        else:
            extra.append(c)
    x = np.concatenate([grid, extra])
    critical = np.concatenate([marked, np.ones(len(extra), dtype=bool)])
    order = np.argsort(x, kind="stable")
    x, critical = x[order], critical[order]
    if x[0] == 0.0:
        critical[0] = True
    return Samples(x, big_b_real(cell, x), critical)


def _status(b: np.ndarray) -> np.ndarray:
    return np.where(b > 1 + TOUCH_TOL, 1, np.where(b < -1 - TOUCH_TOL, -1, 0))


def _crossing(cell: UnitCell, a: float, b: float, target: float) -> float:
    g = lambda e: big_b_real(cell, e) - target
    ga, gb = g(a), g(b)
    if ga == 0:
        return a
    if gb == 0:
        return b
    if ga * gb > 0:
        # one endpoint sits on the bound within rounding
        return a if abs(ga) <= abs(gb) else b
    return polish(g, a, b)


def allowed_bands(cell: UnitCell, eps_range, per_pi: int = SCAN_PER_PI,
                  samples: Optional[Samples] = None) -> List[BandInterval]:
    """Maximal intervals of ``eps_range`` where ``-1 <= B <= 1``.

    Points where ``B`` touches +-1 from inside do not split a band.  An
    isolated touch from outside (``|B| > 1`` on both sides) is returned as a
    zero-width interval with tangency edges.
    """
    _require_pt(cell)
    s = samples or sample_condition(cell, eps_range, per_pi)
    x, b, crit = s.x, s.b, s.critical
    st = _status(b)
    last = x.size - 1
    bands = []
    i = 0
    while i <= last:
        if st[i] == 0:
            j = i
            while j < last and st[j + 1] == 0:
                j += 1
            if i == j and crit[i] and 0 < i < last and st[i - 1] == st[i + 1]:
                bands.append(BandInterval(float(x[i]), float(x[i]), "tangency", "tangency"))
            else:
                if i == 0:
                    lo, lo_kind = x[0], "range-boundary"
                else:
                    lo, lo_kind = _crossing(cell, x[i - 1], x[i], float(st[i - 1])), "crossing"
                if j == last:
                    hi, hi_kind = x[last], "range-boundary"
                else:
                    hi, hi_kind = _crossing(cell, x[j], x[j + 1], float(st[j + 1])), "crossing"
                bands.append(BandInterval(float(lo), float(hi), lo_kind, hi_kind))
            i = j + 1
            continue
        if i < last and st[i + 1] == -st[i]:
            # B sweeps through the whole allowed window between two samples
            e1 = _crossing(cell, x[i], x[i + 1], float(st[i]))
            e2 = _crossing(cell, e1, x[i + 1], float(st[i + 1]))
            bands.append(BandInterval(float(e1), float(e2), "crossing", "crossing"))
        i += 1
    return bands


def _roots(cell: UnitCell, s: Samples, target: float) -> List[Tuple[float, int]]:
    x, b, crit = s.x, s.b, s.critical
    g = b - target
    last = x.size - 1
    found = []
    for i in np.flatnonzero(np.abs(g) <= ROOT_TOL):
        interior = 0 < i < last and abs(b[i - 1]) <= 1 + TOUCH_TOL and abs(b[i + 1]) <= 1 + TOUCH_TOL
        found.append((float(x[i]), 2 if crit[i] and interior else 1))
    f = lambda e: big_b_real(cell, e) - target
    for i in np.flatnonzero(g[:-1] * g[1:] < 0):
        if abs(g[i]) > ROOT_TOL and abs(g[i + 1]) > ROOT_TOL:
            found.append((polish(f, x[i], x[i + 1]), 1))
    found.sort()
    merged = []
    for e, m in found:
        if merged and e - merged[-1][0] <= MERGE_TOL:
            merged[-1] = (merged[-1][0], max(m, merged[-1][1]))
        else:
            merged.append((e, m))
    return merged


def _check_q(cell: UnitCell, q_a: float) -> float:
    q_a = float(q_a)
    top = math.pi / cell.n
    if not (-1e-15 <= q_a <= top + 1e-15):
        raise ValueError(f"q_a must lie in [0, pi/N] = [0, {top:.6g}], got {q_a}")
    return min(max(q_a, 0.0), top)


def dispersion(cell: UnitCell, q_a: float, eps_range, per_pi: int = SCAN_PER_PI,
               samples: Optional[Samples] = None) -> DispersionPoint:
    """All ``eps`` in range with ``B(eps) = cos(N q_a)``, sorted ascending."""
    _require_pt(cell)
    q_a = _check_q(cell, q_a)
    s = samples or sample_condition(cell, eps_range, per_pi)
    roots = _roots(cell, s, math.cos(cell.n * q_a))
    return DispersionPoint(
        q_a,
        tuple(e for e, _ in roots),
        tuple(m for _, m in roots),
        tuple(False for _ in roots),
    )


def branch_array(points: Sequence[DispersionPoint]) -> np.ndarray:
    """``(n_q, n_branches)`` energies, branch ``n`` = ``n``-th lowest with multiplicity.

    Missing branches (fewer roots at that ``q``) are NaN.
    """
    expanded = [[e for e, m in zip(p.energies, p.multiplicities) for _ in range(m)] for p in points]
    width = max((len(row) for row in expanded), default=0)
    out = np.full((len(points), width), np.nan)
    for k, row in enumerate(expanded):
        out[k, :len(row)] = row
    return out


def branch_jumps(branches: np.ndarray, factor: float = 10.0) -> np.ndarray:
    """True at ``[k, n]`` when branch ``n`` jumps between ``q_(k-1)`` and ``q_k``.

    A jump is a step larger than ``factor`` times the branch's median step.
    """
    jumps = np.zeros(branches.shape, dtype=bool)
    if branches.shape[0] < 2:
        return jumps
    steps = np.abs(np.diff(branches, axis=0))
    for n in range(branches.shape[1]):
        col = steps[:, n]
        ok = np.isfinite(col)
        if not ok.any():
            continue
        threshold = factor * np.median(col[ok]) + 1e-9
        jumps[1:, n] = ok & (col > threshold)
    return jumps


def band_table(cell: UnitCell, q_samples: int, eps_range,
               per_pi: int = SCAN_PER_PI) -> List[DispersionPoint]:
    """Dispersion on a uniform ``q_a`` grid over ``[0, pi/N]`` with jump flags.

    Bands are labelled by plain ascending order at each ``q``; branches
    built that way may be discontinuous and are flagged, not re-threaded.
    """
    _require_pt(cell)
    if q_samples < 2:
        raise ValueError("q_samples must be >= 2")
    s = sample_condition(cell, eps_range, per_pi)
    qs = np.linspace(0.0, math.pi / cell.n, q_samples)
    points = [dispersion(cell, q, eps_range, samples=s) for q in qs]
    jumps = branch_jumps(branch_array(points))
    out = []
    for k, p in enumerate(points):
        flags, n = [], 0
        for m in p.multiplicities:
            flags.append(bool(jumps[k, n:n + m].any()))
            n += m
        out.append(DispersionPoint(p.q_a, p.energies, p.multiplicities, tuple(flags)))
    return out


def _density(cell: UnitCell, eps):
    b = big_b_real(cell, eps)
    d = big_b_derivative(cell, eps)
    return b, d, np.abs(d) / (cell.n * math.pi * np.sqrt(np.maximum(1.0 - b * b, 1e-300)))


def dos(cell: UnitCell, eps: float) -> DosPoint:
    """``|B'| / (N pi sqrt(1 - B^2))`` at an energy strictly inside a band.

    Zero at interior extrema of ``B`` (flagged as ``anomaly``).
    """
    _require_pt(cell)
    eps = float(eps)
    b, d, rho = _density(cell, eps)
    if abs(b) >= 1 - DOS_EDGE_TOL:
        raise OutOfBandError(eps, b)
    return DosPoint(eps, float(rho), bool(abs(d) <= ANOMALY_SLOPE))


def band_state_count(cell: UnitCell, band: BandInterval) -> float:
    """States per cell in one band: ``N`` times the quadrature of the density.

    Adaptive quadrature never samples the end points, where the density has
    integrable inverse-square-root singularities.
    """
    if band.width <= 0:
        return 0.0
    value, _ = quad(lambda e: _density(cell, e)[2], band.eps_lo, band.eps_hi,
                    limit=400, epsabs=1e-10, epsrel=1e-8)
    return cell.n * value
