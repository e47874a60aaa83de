"""Unit-cell data model for a Dirac comb with complex couplings.

Everything is dimensionless: a site carries ``c = r + i s = a / a_j`` and
energies enter through the reduced wavenumber ``eps = k a``.  Lengths are in
units of the delta spacing ``a``, so an ``N``-site cell spans ``[0, N]``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Optional, Sequence, Union


class CellError(ValueError):
    """Invalid coupling or cell specification."""


@dataclass(frozen=True)
class Coupling:
    """Dimensionless delta strength ``r + i s``."""

    r: float
    s: float = 0.0

    def __post_init__(self):
        r, s = float(self.r), float(self.s)
        if not (math.isfinite(r) and math.isfinite(s)):
            raise CellError(f"coupling must be finite, got ({self.r}, {self.s})")
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "s", s)

    @property
    def c(self) -> complex:
        return complex(self.r, self.s)

    def conj(self) -> "Coupling":
        # 0.0 - s keeps a real coupling at +0.0 instead of -0.0
        return Coupling(self.r, 0.0 - self.s)

    @classmethod
    def coerce(cls, value) -> "Coupling":
        """Accept a Coupling, a complex/real number or an ``(r, s)`` pair."""
        if isinstance(value, Coupling):
            return value
        if isinstance(value, complex):
            return cls(value.real, value.imag)
        if isinstance(value, (int, float)):
            return cls(value, 0.0)
        try:
            r, s = value
        except (TypeError, ValueError):
            raise CellError(f"cannot interpret {value!r} as a coupling") from None
        return cls(r, s)


def check_pt(cell: Union["UnitCell", Sequence[Coupling]]) -> bool:
    """True iff ``coupling[N+1-j] == conj(coupling[j])`` for every site.

    Comparison is exact on the stored floats.  For odd ``N`` this forces the
    middle coupling to be real.
    """
    couplings = cell.couplings if isinstance(cell, UnitCell) else tuple(cell)
    n = len(couplings)
    for j in range(n):
        a, b = couplings[j], couplings[n - 1 - j]
        if a.r != b.r or a.s != -b.s:
            return False
    return True


@dataclass(frozen=True)
class UnitCell:
    """Ordered couplings of one primitive cell of ``N`` equally spaced deltas.

    Site ``j`` (1-based) sits at ``x = j``; the cell occupies ``[0, N]`` and
    the last delta coincides with the left edge of the next cell.
    ``pt_ordered`` is derived from the couplings.
    """

    couplings: tuple
    pt_ordered: bool = field(init=False)

    def __post_init__(self):
        couplings = tuple(Coupling.coerce(c) for c in self.couplings)
        if not couplings:
            raise CellError("a unit cell needs at least one site")
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "pt_ordered", check_pt(couplings))

    @property
    def n(self) -> int:
        return len(self.couplings)

    @property
    def c(self) -> tuple:
        """Couplings as Python complex numbers."""
        return tuple(cp.c for cp in self.couplings)

    def conj_reversed(self) -> "UnitCell":
        return UnitCell(tuple(cp.conj() for cp in reversed(self.couplings)))

    def reversed(self) -> "UnitCell":
        return UnitCell(tuple(reversed(self.couplings)))

    def to_json(self) -> dict:
        return {"couplings": [[cp.r, cp.s] for cp in self.couplings]}

    def __str__(self):
        body = ", ".join(f"({cp.r:g},{cp.s:g})" for cp in self.couplings)
        return f"UnitCell[N={self.n}; {body}]"


def make_pt_cell(half: Iterable, middle: Optional[float] = None) -> UnitCell:
    """Build a PT-ordered cell from its first half.

    ``half=[(r1, s1), ...]`` gives the couplings of sites ``1..len(half)``;
    the second half is the conjugate of the first in reverse order.  A real
    ``middle`` coupling yields an odd cell.

    >>> make_pt_cell([(5, 4)]).couplings
    (Coupling(r=5.0, s=4.0), Coupling(r=5.0, s=-4.0))
    """
    half = [Coupling.coerce(c) for c in half]
    if not half:
        raise CellError("half must contain at least one coupling")
    mid = []
    if middle is not None:
        if isinstance(middle, complex) or not isinstance(middle, (int, float)):
            raise CellError(f"middle coupling must be a real number, got {middle!r}")
        mid = [Coupling(middle, 0.0)]
    cell = UnitCell(tuple(half + mid + [c.conj() for c in reversed(half)]))
    assert cell.pt_ordered
    return cell


def cell_from_json(data: dict) -> UnitCell:
    """Parse ``{"couplings": [[r, s], ...]}`` or ``{"half": [...], "middle": r}``."""
    if not isinstance(data, dict):
        raise CellError("cell specification must be a JSON object")
    if "couplings" in data:
        if "half" in data or "middle" in data:
            raise CellError("give either 'couplings' or 'half'/'middle', not both")
        return UnitCell(tuple(data["couplings"]))
    if "half" in data:
        middle = data.get("middle")
        if middle is not None and not isinstance(middle, (int, float)):
            raise CellError("'middle' must be a number")
        return make_pt_cell(data["half"], middle)
    raise CellError("cell specification needs a 'couplings' or 'half' key")


def load_cell(path: Union[str, Path]) -> UnitCell:
    with open(path) as fh:
        try:
            data = json.load(fh)
        except json.JSONDecodeError as exc:
            raise CellError(f"{path}: not valid JSON ({exc})") from None
    return cell_from_json(data)


def save_cell(cell: UnitCell, path: Union[str, Path]) -> None:
    with open(path, "w") as fh:
        json.dump(cell.to_json(), fh)
        fh.write("\n")
