"""Transfer matrices in the ``(psi, psi'/k)`` basis.

Free propagation over one spacing is a rotation by ``eps``; crossing a delta
of strength ``c`` adds ``2 c / eps`` to the lower-left entry.  The cell
matrix is the ordered product ``J_N P ... J_1 P`` taking the state just
after the delta at ``x = 0`` to the state just after the delta at ``x = N``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .lattice import UnitCell

# the oracle is evaluated here in place of eps == 0
EPS_ZERO_SUBSTITUTE = 1e-6


def propagation(eps: float) -> np.ndarray:
    c, s = np.cos(eps), np.sin(eps)
    return np.array([[c, s], [-s, c]], dtype=complex)


def jump(c: complex, eps: float) -> np.ndarray:
    return np.array([[1.0, 0.0], [2.0 * c / eps, 1.0]], dtype=complex)


@dataclass(frozen=True)
class CellMatrix:
    entries: np.ndarray
    eps: float

    @property
    def det(self) -> complex:
        m = self.entries
        return complex(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])

    @property
    def half_trace(self) -> complex:
        return complex(0.5 * (self.entries[0, 0] + self.entries[1, 1]))


def cell_matrix_entries(cell: UnitCell, eps):
    """Entries ``(m00, m01, m10, m11)`` of the cell matrix, broadcast over ``eps``.

    Written out elementwise so that a whole energy grid is one pass over
    the sites.
    """
    eps = np.asarray(eps, dtype=float)
    co, si = np.cos(eps), np.sin(eps)
    one = np.ones_like(eps, dtype=complex)
    m00, m01, m10, m11 = one, 0 * one, 0 * one, one
    for c in cell.c:
        # rotate, then add the delta kick to the derivative row
        a00 = co * m00 + si * m10
        a01 = co * m01 + si * m11
        a10 = co * m10 - si * m00
        a11 = co * m11 - si * m01
        g = 2.0 * c / eps
        m00, m01 = a00, a01
        m10, m11 = a10 + g * a00, a11 + g * a01
    return m00, m01, m10, m11


def cell_matrix(cell: UnitCell, eps: float) -> CellMatrix:
    """Ordered product of per-site ``jump @ propagation`` factors."""
    eps = float(eps)
    if not eps > 0:
        raise ValueError(f"cell_matrix needs eps > 0, got {eps}")
    p = propagation(eps)
    m = np.eye(2, dtype=complex)
    for c in cell.c:
        m = jump(c, eps) @ (p @ m)
    return CellMatrix(m, eps)
