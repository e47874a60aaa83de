"""Closed-form N=2 / N=3 results and a numeric extremum finder.

For the PT pair ``(r1 + i s1, r1 - i s1)`` the imaginary part only ever
lifts the band condition::

    B = B(s1=0) + 2 s1^2 sin^2(eps) / eps^2

and the maxima/minima of ``B`` lie on the curves ``C+`` / ``C-`` built from
``f+-`` and ``F+-`` below.  The three-site cell ``(r1 + i s1, r2, r1 - i s1)``
splits the same way with a lift of either sign.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .condition import big_b, big_b_derivative, big_b_real, sinc
from .lattice import UnitCell, make_pt_cell
from .roots import SCAN_PER_PI, polish, scan_grid, warn_if_crowded

ENVELOPE_IMAG_TOL = 1e-9


class EnvelopeDomainError(ArithmeticError):
    """``F+-`` vanished, so ``f+-`` is undefined."""


@dataclass(frozen=True)
class Decomposition:
    base: float
    lift: float
    total: float


def n2_decompose(r1: float, s1: float, eps) -> Decomposition:
    """Split ``B`` of the PT pair into its ``s1 = 0`` value and the lift."""
    base = big_b_real(make_pt_cell([(r1, 0.0)]), eps)
    lift = 2.0 * s1 * s1 * np.square(sinc(eps))
    return Decomposition(base, lift, base + lift)


def n3_decompose(r1: float, r2: float, s1: float, eps) -> Decomposition:
    """Split ``B`` of ``(r1 + i s1, r2, r1 - i s1)``.

    The lift ``4 s1^2 sin^2(eps) (eps cos eps + r2 sin eps) / eps^3`` is
    written as ``4 s1^2 sinc^2 (cos eps + r2 sinc)``, which is finite at 0.
    """
    base = big_b_real(make_pt_cell([(r1, 0.0)], r2), eps)
    sc = sinc(eps)
    lift = 4.0 * s1 * s1 * sc * sc * (np.cos(eps) + r2 * sc)
    return Decomposition(base, lift, base + lift)


def _f_big(r1, s1, eps, sign):
    e2 = eps * eps
    lin = 2.0 * (r1 + r1 * r1 - s1 * s1) * e2 + e2 * e2
    root = np.sqrt(complex((r1 + r1 * r1 + s1 * s1) ** 2 + lin))
    return r1 * r1 + (r1 * r1 + s1 * s1) ** 2 + lin + sign * (r1 - r1 * r1 - s1 * s1 + e2) * root


def n2_envelope(r1: float, s1: float, eps: float, sign: int) -> float:
    """Curve ``C+`` (``sign=+1``, through the maxima) or ``C-`` (through the minima).

    ``C = 2 f f* - 1`` with
    ``f = [sqrt(2) r1 (r1 - i s1) +- (F - 2 r1^2 eps^2)^(1/2)] / sqrt(F)``.
    Principal branches throughout; this choice is what puts every extremum
    on one of the two curves.
    """
    if sign not in (1, -1):
        raise ValueError("sign must be +1 or -1")
    eps = float(eps)
    if not eps > 0:
        raise ValueError("envelope needs eps > 0")
    F = _f_big(r1, s1, eps, sign)
    if F == 0:
        raise EnvelopeDomainError(f"F{'+' if sign > 0 else '-'} = 0 at eps={eps}")
    f = (math.sqrt(2.0) * r1 * complex(r1, -s1) + sign * np.sqrt(F - 2.0 * r1 * r1 * eps * eps)) / np.sqrt(F)
    c = 2.0 * f * f.conjugate() - 1.0
    if not np.isfinite(c):
        raise EnvelopeDomainError(f"envelope undefined at eps={eps}")
    if abs(c.imag) > ENVELOPE_IMAG_TOL * max(1.0, abs(c.real)):
        warnings.warn(f"envelope has imaginary residue {c.imag:.3g} at eps={eps}", RuntimeWarning)
    return float(c.real)


def n2_envelope_curve(r1: float, s1: float, eps, sign: int) -> np.ndarray:
    """``n2_envelope`` over an array; NaN where the curve is undefined."""
    out = np.empty(np.shape(eps))
    for i, e in enumerate(np.ravel(eps)):
        try:
            out.flat[i] = n2_envelope(r1, s1, e, sign)
        except EnvelopeDomainError:
            out.flat[i] = np.nan
    return out


def n2_envelope_limit_small_s(r1: float, eps):
    """``(C+, C-)`` as ``s1 -> 0``; ``C-`` collapses to -1."""
    e2 = np.square(eps)
    a = r1 * (2.0 + r1) + e2
    upper = 1.0 + 2.0 * r1 * r1 / e2 * a / (a + r1 * r1 / e2)
    return upper, -np.ones_like(upper)


def n2_envelope_limit_small_r(s1: float, eps):
    """``(C+, C-)`` as ``r1 -> 0``; the non-trivial curve swaps sides at ``eps = s1``."""
    eps = np.asarray(eps, dtype=float)
    e2, s2 = eps * eps, s1 * s1
    num = s2 * s2 + e2 * e2 + s2 * (1.0 - 2.0 * e2)
    den = s2 * s2 + e2 * e2 + s2 * (s2 / e2 - 2.0 * e2)
    curve = -1.0 + 2.0 * s2 / e2 * num / den
    below = eps <= s1
    upper = np.where(below, curve, 1.0)
    lower = np.where(below, 1.0, curve)
    if upper.ndim == 0:
        return float(upper), float(lower)
    return upper, lower


def n2_large_s_condition(s1: float, eps):
    """``B ~ -1 + 2 s1^2/eps^2 + 2 cos^2(eps) (1 - s1^2/eps^2)`` for ``s1 >> r1``."""
    ratio = s1 * s1 / np.square(eps)
    return -1.0 + 2.0 * ratio + 2.0 * np.square(np.cos(eps)) * (1.0 - ratio)


def n2_large_s_approx(s1: float, eps):
    """``(lower, upper)`` bounds of the band condition when ``s1 >> r1``.

    Below ``eps = s1`` the condition sits in ``[1, -1 + 2 s1^2/eps^2]``;
    above it the two bounds trade places.
    """
    eps = np.asarray(eps, dtype=float)
    curve = -1.0 + 2.0 * s1 * s1 / (eps * eps)
    lower = np.minimum(curve, 1.0)
    upper = np.maximum(curve, 1.0)
    if lower.ndim == 0:
        return float(lower), float(upper)
    return lower, upper


@dataclass(frozen=True)
class Extremum:
    eps: float
    b_value: float
    kind: str  # "max" or "min"
    group_label: int = 0


def extrema_per_piece(n: int) -> int:
    """Extremal points per repeating piece: ``N`` for odd, ``N/2`` for even cells."""
    return n if n % 2 else n // 2


def locate_extrema(cell: UnitCell, grid: np.ndarray) -> List[tuple]:
    """``(eps, kind)`` for every sign change of ``dB/deps`` on ``grid``.

    A ``+ -> -`` change is a maximum and ``- -> +`` a minimum.  Zero-slope
    inflections do not change sign and are not reported.
    """
    d = big_b_derivative(cell, grid)
    fprime: Callable[[float], float] = lambda x: big_b_derivative(cell, x)
    s = np.sign(d)
    found = []
    i = 0
    while i < grid.size - 1:
        if s[i] * s[i + 1] < 0:
            x = polish(fprime, grid[i], grid[i + 1])
            found.append((x, "max" if s[i] > 0 else "min"))
        elif s[i + 1] == 0 and i + 2 < grid.size and s[i] * s[i + 2] < 0:
            found.append((float(grid[i + 1]), "max" if s[i] > 0 else "min"))
            i += 1
        i += 1
    return found


def find_extrema(cell: UnitCell, eps_range, grouping: bool = True,
                 per_pi: int = SCAN_PER_PI) -> List[Extremum]:
    """All local extrema of ``B`` inside ``eps_range``.

    The scan runs ``per_pi`` samples per pi of ``eps`` and each bracket is
    polished with Brent's method.  With ``grouping`` each extremum gets the
    positional label ``index mod extrema_per_piece(N)``; it is a bookkeeping
    aid for plotting, not a spectral invariant.
    """
    if not cell.pt_ordered:
        raise ValueError("find_extrema expects a PT-ordered cell")
    lo, hi = map(float, eps_range)
    if not (0 < lo < hi):
        raise ValueError(f"need 0 < lo < hi, got {eps_range}")
    grid = scan_grid(lo, hi, per_pi)
    found = locate_extrema(cell, grid)
    warn_if_crowded([x for x, _ in found], math.pi / per_pi, "extrema")
    period = extrema_per_piece(cell.n)
    values = big_b(cell, np.array([x for x, _ in found])).real_value if found else []
    return [
        Extremum(float(x), float(b), kind, (i % period) if grouping else 0)
        for i, ((x, kind), b) in enumerate(zip(found, values))
    ]
