"""Band condition ``cos(N Q a) = B(eps)`` for an N-site delta comb.

``B`` is the alternating-parity expansion in the site functions
``h_j(eps) = cos(eps) + c_j sin(eps) / eps``::

    B = 2^(N-1) S_N - 2^(N-3) S_(N-2) + 2^(N-5) S_(N-4) - ...

where ``S_M`` sums products of ``M`` distinct ``h`` with strictly increasing
indices that alternate odd/even.  Even ``N`` ends with the constant
``(-1)^(N/2)``, odd ``N`` with ``(-1)^((N-1)/2) (h_1 + ... + h_N)``.

All evaluators accept a scalar or an array of ``eps``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .lattice import Coupling, UnitCell
from .transfer import EPS_ZERO_SUBSTITUTE, cell_matrix_entries

SINC_SERIES_BELOW = 1e-4
REALITY_TOL = 1e-10


def _as_eps(eps):
    arr = np.asarray(eps, dtype=float)
    if np.any(~np.isfinite(arr)) or np.any(arr < 0):
        raise ValueError("eps must be finite and >= 0")
    return arr


def sinc(eps):
    """``sin(eps)/eps`` with the Taylor series near zero."""
    e = np.asarray(eps, dtype=float)
    small = np.abs(e) < SINC_SERIES_BELOW
    safe = np.where(small, 1.0, e)
    e2 = e * e
    out = np.where(small, 1.0 - e2 / 6.0 + e2 * e2 / 120.0, np.sin(safe) / safe)
    return out if out.ndim else float(out)


def dsinc(eps):
    """Derivative of ``sinc``: ``(eps cos eps - sin eps) / eps^2``."""
    e = np.asarray(eps, dtype=float)
    # the closed form cancels badly well above the sinc threshold
    small = np.abs(e) < 1e-2
    safe = np.where(small, 1.0, e)
    e2 = e * e
    series = e * (-1.0 / 3.0 + e2 / 30.0 - e2 * e2 / 840.0)
    out = np.where(small, series, (safe * np.cos(safe) - np.sin(safe)) / (safe * safe))
    return out if out.ndim else float(out)


def h_eval(c, eps):
    """Site function ``h_j(eps) = cos(eps) + c sinc(eps)``; equals ``1 + c`` at 0."""
    if isinstance(c, Coupling):
        c = c.c
    e = _as_eps(eps)
    out = np.cos(e) + complex(c) * sinc(e)
    return out if np.ndim(out) else complex(out)


def h_derivative(c, eps):
    if isinstance(c, Coupling):
        c = c.c
    e = np.asarray(eps, dtype=float)
    out = -np.sin(e) + complex(c) * dsinc(e)
    return out if np.ndim(out) else complex(out)


@lru_cache(maxsize=None)
def alternating_subsets(n: int, m: int) -> tuple:
    """Increasing ``m``-tuples from ``1..n`` whose consecutive entries alternate parity.

    Lexicographic order.  Built by extending each prefix with every later
    index of opposite parity, so nothing outside the rule is ever produced.
    """
    if not (1 <= m <= n):
        raise ValueError(f"need 1 <= M <= N, got N={n}, M={m}")

    def extend(prefix):
        if len(prefix) == m:
            yield prefix
            return
        last = prefix[-1]
        for nxt in range(last + 1, n + 1, 2):
            yield from extend(prefix + (nxt,))

    return tuple(t for first in range(1, n + 1) for t in extend((first,)))


def brute_force_alternating(n: int, m: int) -> list:
    """Reference filter over all ``C(n, m)`` subsets (for tests)."""
    return [
        s for s in itertools.combinations(range(1, n + 1), m)
        if all((s[i] + s[i + 1]) % 2 == 1 for i in range(m - 1))
    ]


@lru_cache(maxsize=None)
def expansion(n: int) -> tuple:
    """``(terms, constant)`` of the band-condition expansion for ``n`` sites.

    ``terms`` is a tuple of ``(coefficient, subsets)`` with 0-based index
    arrays; ``constant`` is the trailing even-``N`` term (0 for odd ``N``).
    """
    terms = []
    for m in range(n, 0, -2):
        sign = -1 if ((n - m) // 2) % 2 else 1
        coef = sign * 2 ** (m - 1)
        subsets = tuple(np.array(s) - 1 for s in alternating_subsets(n, m))
        terms.append((coef, subsets))
    constant = (-1) ** (n // 2) if n % 2 == 0 else 0
    return tuple(terms), constant


def _neumaier(parts, shape):
    """Compensated sum of real arrays."""
    total = np.zeros(shape)
    comp = np.zeros(shape)
    for x in parts:
        t = total + x
        big = np.abs(total) >= np.abs(x)
        comp += np.where(big, (total - t) + x, (x - t) + total)
        total = t
    return total + comp


def _compensated_complex_sum(parts, shape):
    parts = list(parts)
    return _neumaier((p.real for p in parts), shape) + 1j * _neumaier(
        (p.imag for p in parts), shape
    )


@dataclass(frozen=True)
class BandConditionValue:
    """Complex value of ``B`` with its real projection.

    ``imag_residue = |Im B| / max(1, |Re B|)``.  Fields are arrays when
    evaluated on a grid.
    """

    complex_value: complex
    real_value: float
    imag_residue: float

    @classmethod
    def from_complex(cls, value):
        value = np.asarray(value, dtype=complex)
        re = value.real
        res = np.abs(value.imag) / np.maximum(1.0, np.abs(re))
        if value.ndim == 0:
            return cls(complex(value), float(re), float(res))
        return cls(value, re, res)

    @property
    def is_real(self):
        return np.all(self.imag_residue <= REALITY_TOL)


def _h_matrix(cell: UnitCell, e):
    return np.array([np.cos(e) + c * sinc(e) for c in cell.c], dtype=complex)


def _product(rows):
    # left-to-right elementwise products; np.prod rounds differently
    p = rows[0]
    for row in rows[1:]:
        p = p * row
    return p


def big_b(cell: UnitCell, eps) -> BandConditionValue:
    """Band condition via the alternating-parity expansion."""
    e = _as_eps(eps)
    h = _h_matrix(cell, np.atleast_1d(e))
    shape = h.shape[1:]
    terms, constant = expansion(cell.n)

    def parts():
        for coef, subsets in terms:
            for idx in subsets:
                yield coef * _product(h[idx])
        if constant:
            yield np.full(shape, float(constant), dtype=complex)

    value = _compensated_complex_sum(parts(), shape)
    return BandConditionValue.from_complex(value.reshape(e.shape))


def big_b_explicit(cell: UnitCell, eps) -> BandConditionValue:
    """Hand-written closed forms for ``N`` = 2, 3, 4 (test double for ``big_b``)."""
    e = _as_eps(eps)
    n = cell.n
    if n not in (2, 3, 4):
        raise ValueError(f"explicit forms exist for N in 2..4, got N={n}")
    h = list(_h_matrix(cell, np.atleast_1d(e)))
    one = np.ones_like(h[0])
    # terms of the written form, summed compensated like big_b
    if n == 2:
        h1, h2 = h
        parts = [2 * h1 * h2, -one]
    elif n == 3:
        h1, h2, h3 = h
        parts = [4 * h1 * h2 * h3, -h1, -h2, -h3]
    else:
        h1, h2, h3, h4 = h
        parts = [8 * h1 * h2 * h3 * h4,
                 -2 * (h1 * h2), -2 * (h1 * h4), -2 * (h2 * h3), -2 * (h3 * h4),
                 one]
    value = _compensated_complex_sum(parts, h[0].shape).reshape(e.shape)
    return BandConditionValue.from_complex(value)


def big_b_oracle(cell: UnitCell, eps) -> BandConditionValue:
    """Half-trace of the transfer matrix; independent check of ``big_b``.

    ``eps == 0`` is evaluated at ``EPS_ZERO_SUBSTITUTE`` (the matrices carry
    ``1/eps``), so it only approximates the limit there.
    """
    e = _as_eps(eps)
    e = np.where(e == 0, EPS_ZERO_SUBSTITUTE, e)
    m00, _, _, m11 = cell_matrix_entries(cell, e)
    return BandConditionValue.from_complex(0.5 * (m00 + m11))


def big_b_derivative(cell: UnitCell, eps):
    """``d Re(B) / d eps`` by the product rule over every expansion term."""
    e = np.asarray(eps, dtype=float)
    e1 = np.atleast_1d(e)
    h = _h_matrix(cell, e1)
    dh = np.array([h_derivative(c, e1) for c in cell.c], dtype=complex)
    shape = h.shape[1:]
    terms, _ = expansion(cell.n)

    def parts():
        for coef, subsets in terms:
            for idx in subsets:
                for k in range(len(idx)):
                    rest = np.delete(idx, k)
                    p = dh[idx[k]]
                    if len(rest):
                        p = p * _product(h[rest])
                    yield coef * p

    value = _compensated_complex_sum(parts(), shape).real.reshape(e.shape)
    return value if value.ndim else float(value)


def big_b_real(cell: UnitCell, eps):
    """Real projection of ``big_b`` (scalar in, scalar out)."""
    value = big_b(cell, eps).real_value
    return value if np.ndim(value) else float(value)
