"""Bloch wavefunctions inside the primitive cell.

Lengths are in units of the lattice spacing ``a``: the cell is ``[0, N]``
and the deltas sit at ``x = 1, ..., N``.  Inside segment ``j`` (``j - 1 < x
< j``) the state is ``A_j exp(i eps x) + B_j exp(-i eps x)``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from .condition import sinc
from .lattice import UnitCell
from .spectra import OutOfBandError
from .transfer import cell_matrix_entries, jump, propagation

EDGE_DEGENERACY = 1e-10
OUT_OF_BAND = 1e-12


class BandEdgeDegeneracy(ArithmeticError):
    """The two Bloch eigenvectors merge at a band edge."""


@dataclass(frozen=True)
class BlochState:
    cell: UnitCell
    eps: float
    q_a: float
    segment_coeffs: Tuple[Tuple[complex, complex], ...]
    norm: float  # integral of |psi|^2 over the cell before normalisation

    @property
    def multiplier(self) -> complex:
        return cmath.exp(1j * self.cell.n * self.q_a)


def _sign(q_sign) -> int:
    if q_sign in (1, "+", "plus"):
        return 1
    if q_sign in (-1, "-", "minus"):
        return -1
    raise ValueError(f"q_sign must be '+' or '-', got {q_sign!r}")


def _segment_integral(a: complex, b: complex, x0: float, eps: float) -> float:
    # integral over [x0, x0 + 1] of |a e^{i eps x} + b e^{-i eps x}|^2
    q = a * b.conjugate()
    osc = cmath.exp(2j * eps * (x0 + 0.5)) * sinc(eps)
    return abs(a) ** 2 + abs(b) ** 2 + 2.0 * (q * osc).real


def _coeffs(vectors, eps):
    # (psi, psi'/k) just right of x0 = j - 1 to plane-wave amplitudes
    out = []
    for j, (psi, dpsi) in enumerate(vectors):
        x0 = float(j)
        a = 0.5 * (psi - 1j * dpsi) * cmath.exp(-1j * eps * x0)
        b = 0.5 * (psi + 1j * dpsi) * cmath.exp(1j * eps * x0)
        out.append((a, b))
    return out


def bloch_state(cell: UnitCell, eps: float, q_sign="+") -> BlochState:
    """Bloch state with multiplier ``exp(+- i arccos B)`` over one cell.

    The state is normalised to ``integral_0^N |psi|^2 dx = 1`` and its phase
    fixed so ``psi(0)`` is real and positive (``psi'(0)`` if ``psi(0) = 0``).
    """
    if not cell.pt_ordered:
        raise ValueError("Bloch states are built for PT-ordered cells only")
    sign = _sign(q_sign)
    eps = float(eps)
    if not eps > 0:
        raise ValueError("eps must be > 0")
    m = np.array(cell_matrix_entries(cell, eps), dtype=complex).reshape(2, 2)
    half = 0.5 * (m[0, 0] + m[1, 1])
    b = half.real
    if abs(b) >= 1 - OUT_OF_BAND:
        raise OutOfBandError(eps, b)
    if abs(b) >= 1 - EDGE_DEGENERACY:
        raise BandEdgeDegeneracy(f"|B| = {abs(b):.15g} is within {EDGE_DEGENERACY} of 1 at eps={eps}")
    lam = half + 1j * sign * np.sqrt(1 - half * half)
    shifted = m - lam * np.eye(2)
    row = shifted[0] if np.linalg.norm(shifted[0]) >= np.linalg.norm(shifted[1]) else shifted[1]
    v = np.array([row[1], -row[0]])
    pivot = v[0] if abs(v[0]) > 1e-14 * np.linalg.norm(v) else v[1]
    v = v * (abs(pivot) / pivot)

    vectors = []
    p = propagation(eps)
    for c in cell.c:
        vectors.append(tuple(v))
        v = jump(c, eps) @ (p @ v)
    coeffs = _coeffs(vectors, eps)
    total = sum(_segment_integral(a, bb, j, eps) for j, (a, bb) in enumerate(coeffs))
    scale = 1.0 / math.sqrt(total)
    coeffs = tuple((a * scale, bb * scale) for a, bb in coeffs)
    q_a = sign * math.acos(max(-1.0, min(1.0, b))) / cell.n
    return BlochState(cell, eps, q_a, coeffs, total)


def _amplitudes(state: BlochState, x, side: str):
    n = state.cell.n
    if side == "right":
        seg = np.clip(np.floor(x), 0, n - 1).astype(int)
    elif side == "left":
        seg = np.clip(np.ceil(x) - 1, 0, n - 1).astype(int)
    else:
        raise ValueError("side must be 'left' or 'right'")
    coeffs = np.array(state.segment_coeffs)
    return coeffs[seg, 0] * np.exp(1j * state.eps * x), coeffs[seg, 1] * np.exp(-1j * state.eps * x)


def psi(state: BlochState, x, side: str = "right") -> np.ndarray:
    """``psi(x)`` for ``x`` in ``[0, N]``; at a delta ``side`` picks the segment."""
    fwd, back = _amplitudes(state, np.asarray(x, dtype=float), side)
    return fwd + back


def psi_scaled_slope(state: BlochState, x, side: str = "right") -> np.ndarray:
    """``psi'(x) / k`` with the same segment choice as ``psi``."""
    fwd, back = _amplitudes(state, np.asarray(x, dtype=float), side)
    return 1j * (fwd - back)


def psi_profile(state: BlochState, samples: int) -> Tuple[np.ndarray, np.ndarray]:
    """``(x, |psi(x)|^2)`` on a uniform grid over ``[0, N]``."""
    if samples < 2:
        raise ValueError("samples must be >= 2")
    x = np.linspace(0.0, float(state.cell.n), samples)
    return x, np.abs(psi(state, x)) ** 2


def norm_integral(state: BlochState) -> float:
    return sum(_segment_integral(a, b, j, state.eps) for j, (a, b) in enumerate(state.segment_coeffs))


def residuals(state: BlochState) -> dict:
    """Largest violation of delta matching, the Bloch condition and normalisation.

    Matching and Bloch residuals are relative to ``max(1, |value|)``.
    """
    eps, n = state.eps, state.cell.n
    match = 0.0
    for j, c in enumerate(state.cell.c, start=1):
        x = float(j)
        left = np.array([psi(state, x, "left"), psi_scaled_slope(state, x, "left")])
        jumped = jump(c, eps) @ left
        if j < n:
            right = np.array([psi(state, x, "right"), psi_scaled_slope(state, x, "right")])
            match = max(match, np.max(np.abs(jumped - right)) / max(1.0, np.max(np.abs(right))))
        else:
            start = np.array([psi(state, 0.0), psi_scaled_slope(state, 0.0)])
            target = state.multiplier * start
            bloch = np.max(np.abs(jumped - target)) / max(1.0, np.max(np.abs(target)))
    return {"matching": float(match), "bloch": float(bloch), "normalization": abs(norm_integral(state) - 1.0)}


def _segment_fourth_moment(a, b, x0, eps):
    p = abs(a) ** 2 + abs(b) ** 2
    q = a * b.conjugate()
    mid = x0 + 0.5
    one = cmath.exp(2j * eps * mid) * sinc(eps)
    two = cmath.exp(4j * eps * mid) * sinc(2.0 * eps)
    return p * p + 2 * abs(q) ** 2 + 4 * p * (q * one).real + 2 * (q * q * two).real


def _segment_peak(a, b, x0, eps):
    # |psi|^2 = p + 2|q| cos(2 eps x + arg q) on [x0, x0 + 1]
    p = abs(a) ** 2 + abs(b) ** 2
    q = a * b.conjugate()
    phi0 = 2 * eps * x0 + cmath.phase(q)
    phi1 = phi0 + 2 * eps
    if math.ceil(phi0 / (2 * math.pi)) * 2 * math.pi <= phi1:
        return p + 2 * abs(q)
    return max(p + 2 * abs(q) * math.cos(phi0), p + 2 * abs(q) * math.cos(phi1))


def localization_metrics(state: BlochState) -> Tuple[float, float]:
    """``(participation_ratio, peak_to_mean)`` of the normalised density.

    ``participation_ratio = 1 / (N integral |psi|^4)`` is 1 for a flat
    profile and small when the weight piles into narrow spikes.
    """
    eps, n = state.eps, state.cell.n
    fourth = sum(_segment_fourth_moment(a, b, j, eps) for j, (a, b) in enumerate(state.segment_coeffs))
    peak = max(_segment_peak(a, b, j, eps) for j, (a, b) in enumerate(state.segment_coeffs))
    return 1.0 / (n * fourth), peak * n
