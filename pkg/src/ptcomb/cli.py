"""``ptcomb`` command line: band condition, bands, dispersion, DOS and states.

Every command writes a ``#`` metadata line (tool version and the full cell),
a header row and one row per record, with numbers at 12 significant digits
so identical inputs give byte-identical files.

Examples::

    ptcomb condition --couplings 5,4,5,-4 --emin 0 --emax 30 --envelope
    ptcomb edges --half 0.5,15
    ptcomb dispersion --half 5,1.613,2,0.12,3,0.3 --qsamples 41 --emax 12
    ptcomb wavefunction --half 5,19 --middle 3 --eps 5.2
    ptcomb sweep --half 2,0 --middle 3 --sweep s1=0:30:31 --out frames/
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import __version__
from .analysis import EnvelopeDomainError, find_extrema, n2_envelope_curve
from .bloch import BandEdgeDegeneracy, bloch_state, localization_metrics, psi, psi_profile
from .condition import big_b
from .lattice import CellError, Coupling, UnitCell, load_cell, make_pt_cell
from .spectra import (
    OutOfBandError,
    allowed_bands,
    band_state_count,
    band_table,
    dispersion,
    dos,
)

EXIT_OK, EXIT_CONFIG, EXIT_DOMAIN, EXIT_IO = 0, 2, 3, 4


class ConfigError(Exception):
    pass


class DomainError(Exception):
    pass


# -- formatting -------------------------------------------------------------------

def fmt(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, str):
        return value
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    v = float(value)
    if math.isnan(v):
        return "nan"
    if v == 0:
        v = 0.0  # no "-0"
    return format(v, ".12g")


def _json_value(value):
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (str, int, np.integer)) and not isinstance(value, float):
        return value if isinstance(value, str) else int(value)
    v = float(value)
    return None if math.isnan(v) else float(fmt(v))


@dataclass
class Table:
    columns: List[str]
    rows: List[Sequence]
    meta: dict

    def render(self, kind: str, cell: UnitCell) -> str:
        meta = {"tool": "ptcomb", "version": __version__, "cell": cell.to_json()["couplings"]}
        meta.update({k: _meta_value(v) for k, v in self.meta.items()})
        if kind == "json":
            body = {"meta": meta, "columns": self.columns,
                    "rows": [[_json_value(v) for v in row] for row in self.rows]}
            return json.dumps(body, indent=1) + "\n"
        head = " ".join(f"{k}={json.dumps(v, separators=(',', ':'))}" for k, v in meta.items())
        lines = ["# " + head, ",".join(self.columns)]
        lines += [",".join(fmt(v) for v in row) for row in self.rows]
        return "\n".join(lines) + "\n"


def _meta_value(value):
    return _json_value(value) if isinstance(value, (float, np.floating)) else value


# -- cell and grid ------------------------------------------------------------------

def _floats(text: str, what: str) -> List[float]:
    try:
        values = [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise ConfigError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if not values:
        raise ConfigError(f"{what}: no numbers given")
    return values


def _pairs(values: List[float], what: str) -> List[tuple]:
    if len(values) % 2:
        raise ConfigError(f"{what}: need r,s pairs, got {len(values)} numbers")
    return list(zip(values[0::2], values[1::2]))


def build_cell(args) -> UnitCell:
    given = [x is not None for x in (args.cell, args.couplings, args.half)]
    if sum(given) != 1:
        raise ConfigError("give exactly one of --cell, --couplings, --half")
    if args.middle is not None and args.half is None:
        raise ConfigError("--middle needs --half")
    if args.cell is not None:
        try:
            cell = load_cell(args.cell)
        except OSError as exc:
            raise ConfigError(f"cannot read cell file: {exc}") from None
    elif args.couplings is not None:
        cell = UnitCell(tuple(_pairs(_floats(args.couplings, "--couplings"), "--couplings")))
    else:
        cell = make_pt_cell(_pairs(_floats(args.half, "--half"), "--half"), args.middle)
    if not cell.pt_ordered and not args.allow_non_pt:
        raise ConfigError(f"{cell} is not PT-ordered (c[N+1-j] != conj(c[j])); pass --allow-non-pt to continue")
    return cell


def _require_pt(cell: UnitCell, command: str) -> None:
    if not cell.pt_ordered:
        raise ConfigError(f"{command} is only defined for PT-ordered cells")


def energy_range(args):
    lo = 0.0 if args.include_zero else args.emin
    if not (lo >= 0 and args.emax > lo and math.isfinite(args.emax)):
        raise ConfigError(f"need 0 <= emin < emax, got [{lo}, {args.emax}]")
    return lo, args.emax


def energy_grid(args) -> np.ndarray:
    if args.esamples < 2:
        raise ConfigError("--esamples must be >= 2")
    lo, hi = energy_range(args)
    return np.linspace(lo, hi, args.esamples)


def nearest_band_message(cell: UnitCell, eps: float, args) -> str:
    lo, hi = energy_range(args)
    window = (min(lo, max(0.0, eps - 2 * math.pi)), max(hi, eps + 2 * math.pi))
    bands = allowed_bands(cell, window) if cell.pt_ordered else []
    if not bands:
        return f"eps={fmt(eps)} is not inside an allowed band and no band lies in [{fmt(window[0])}, {fmt(window[1])}]"
    near = min(bands, key=lambda b: 0.0 if b.contains(eps) else min(abs(eps - b.eps_lo), abs(eps - b.eps_hi)))
    return (f"eps={fmt(eps)} is not strictly inside an allowed band; "
            f"nearest band is [{fmt(near.eps_lo)}, {fmt(near.eps_hi)}]")


# -- commands -----------------------------------------------------------------------

def condition_table(cell: UnitCell, eps: np.ndarray, envelope: bool) -> Table:
    value = big_b(cell, eps)
    columns = ["eps", "B", "imag_residue"]
    cols = [eps, value.real_value, value.imag_residue]
    if envelope:
        if cell.n != 2 or not cell.pt_ordered:
            raise ConfigError("--envelope needs a PT-ordered N=2 cell")
        r1, s1 = cell.couplings[0].r, cell.couplings[0].s
        pos = eps > 0
        up = np.full(eps.shape, np.nan)
        down = np.full(eps.shape, np.nan)
        up[pos] = n2_envelope_curve(r1, s1, eps[pos], 1)
        down[pos] = n2_envelope_curve(r1, s1, eps[pos], -1)
        columns += ["C_plus", "C_minus"]
        cols += [up, down]
    return Table(columns, list(zip(*cols)), {"command": "condition"})


def cmd_condition(args, cell):
    return condition_table(cell, energy_grid(args), args.envelope)


def cmd_envelope(args, cell):
    if cell.n != 2:
        raise ConfigError("envelope is defined for N=2 cells only")
    _require_pt(cell, "envelope")
    eps = energy_grid(args)
    eps = eps[eps > 0]
    r1, s1 = cell.couplings[0].r, cell.couplings[0].s
    up = n2_envelope_curve(r1, s1, eps, 1)
    down = n2_envelope_curve(r1, s1, eps, -1)
    return Table(["eps", "C_plus", "C_minus"], list(zip(eps, up, down)), {"command": "envelope"})


def cmd_edges(args, cell):
    _require_pt(cell, "edges")
    bands = allowed_bands(cell, energy_range(args))
    rows = [(i, b.eps_lo, b.eps_hi, b.width, b.edge_lo_kind, b.edge_hi_kind) for i, b in enumerate(bands, 1)]
    return Table(["band", "eps_lo", "eps_hi", "width", "edge_lo_kind", "edge_hi_kind"], rows, {"command": "edges"})


def cmd_dispersion(args, cell):
    _require_pt(cell, "dispersion")
    rng = energy_range(args)
    if args.nqa is not None:
        if not 0 <= args.nqa <= math.pi:
            raise ConfigError("--nqa must lie in [0, pi]")
        points = [dispersion(cell, args.nqa / cell.n, rng)]
    else:
        if args.qsamples < 2:
            raise ConfigError("--qsamples must be >= 2")
        points = band_table(cell, args.qsamples, rng)
    rows = []
    for p in points:
        branch = 0
        for e, m, flag in zip(p.energies, p.multiplicities, p.discontinuity_flags):
            branch += 1
            rows.append((cell.n * p.q_a, p.q_a, branch, e, m, flag))
            branch += m - 1
    return Table(["NQa", "q_a", "branch", "eps", "multiplicity", "discontinuous"], rows,
                 {"command": "dispersion"})


def cmd_dos(args, cell):
    _require_pt(cell, "dos")
    if args.integrate:
        rows = []
        for i, b in enumerate(allowed_bands(cell, energy_range(args)), 1):
            complete = b.edge_lo_kind != "range-boundary" and b.edge_hi_kind != "range-boundary"
            count = band_state_count(cell, b) if complete else float("nan")
            rows.append((i, b.eps_lo, b.eps_hi, count))
        return Table(["band", "eps_lo", "eps_hi", "states_per_cell"], rows, {"command": "dos-integrate"})
    if args.eps:
        points = _floats(args.eps, "--eps")
        rows = []
        for e in points:
            try:
                d = dos(cell, e)
            except OutOfBandError:
                raise DomainError(nearest_band_message(cell, e, args)) from None
            rows.append((d.eps, d.density, cell.n * d.density, d.anomaly))
    else:
        rows = []
        for e in energy_grid(args):
            try:
                d = dos(cell, e)
            except OutOfBandError:
                continue
            rows.append((d.eps, d.density, cell.n * d.density, d.anomaly))
    return Table(["eps", "density_per_site", "density_per_cell", "anomaly"], rows, {"command": "dos"})


def cmd_wavefunction(args, cell):
    _require_pt(cell, "wavefunction")
    if args.eps is None:
        raise ConfigError("wavefunction needs --eps")
    e = _floats(args.eps, "--eps")
    if len(e) != 1:
        raise ConfigError("wavefunction takes a single --eps value")
    if args.xsamples < 2:
        raise ConfigError("--xsamples must be >= 2")
    try:
        state = bloch_state(cell, e[0], args.sign)
    except (OutOfBandError, BandEdgeDegeneracy) as exc:
        raise DomainError(f"{exc}; {nearest_band_message(cell, e[0], args)}") from None
    x, density = psi_profile(state, args.xsamples)
    amp = psi(state, x)
    pr, peak = localization_metrics(state)
    meta = {"command": "wavefunction", "eps": state.eps, "q_sign": args.sign, "NQa": cell.n * state.q_a,
            "participation_ratio": pr, "peak_to_mean": peak}
    return Table(["x", "re_psi", "im_psi", "density"], list(zip(x, amp.real, amp.imag, density)), meta)


def cmd_extrema(args, cell):
    _require_pt(cell, "extrema")
    lo, hi = energy_range(args)
    found = find_extrema(cell, (max(lo, 1e-9), hi), grouping=not args.no_grouping)
    rows = [(e.eps, e.b_value, e.kind, e.group_label) for e in found]
    return Table(["eps", "B", "kind", "group"], rows, {"command": "extrema"})


@dataclass(frozen=True)
class SweepAxis:
    site: int  # 1-based, first half of the cell
    values: np.ndarray


def parse_sweep(text: str, cell: UnitCell) -> SweepAxis:
    try:
        name, bounds = text.split("=")
        start, stop, frames = bounds.split(":")
        start, stop, frames = float(start), float(stop), int(frames)
    except ValueError:
        raise ConfigError(f"--sweep expects sJ=start:stop:frames, got {text!r}") from None
    if not (name.startswith("s") and name[1:].isdigit()):
        raise ConfigError(f"--sweep can only vary imaginary parts s1, s2, ...; got {name!r}")
    j = int(name[1:])
    if frames < 1:
        raise ConfigError("sweep needs at least one frame")
    if not 1 <= j <= cell.n:
        raise ConfigError(f"{name} is outside the {cell.n}-site cell")
    partner = cell.n + 1 - j
    if partner == j:
        raise ConfigError(f"{name} is the middle site; a complex middle coupling breaks PT ordering")
    if j > partner:
        raise ConfigError(f"sweep the first-half site s{partner}; s{j} follows as its conjugate")
    return SweepAxis(j, np.linspace(start, stop, frames))


def swept_cell(cell: UnitCell, axes: Iterable[SweepAxis], k: int) -> UnitCell:
    cps = list(cell.couplings)
    for ax in axes:
        s = float(ax.values[k])
        j = ax.site - 1
        cps[j] = Coupling(cps[j].r, s)
        cps[cell.n - 1 - j] = Coupling(cps[cell.n - 1 - j].r, 0.0 - s)
    return UnitCell(tuple(cps))


def cmd_sweep(args, cell):
    if not args.sweep:
        raise ConfigError("sweep needs at least one --sweep sJ=start:stop:frames")
    if args.out is None:
        raise ConfigError("sweep needs --out DIR for the frame files")
    axes = [parse_sweep(s, cell) for s in args.sweep]
    if len({ax.site for ax in axes}) != len(axes):
        raise ConfigError("each site may be swept only once")
    frames = {ax.values.size for ax in axes}
    if len(frames) != 1:
        raise ConfigError("all --sweep descriptors need the same frame count")
    count = frames.pop()
    width = max(4, len(str(count - 1)))
    eps = energy_grid(args)
    out = Path(args.out)
    suffix = "json" if args.format == "json" else "csv"
    manifest = {"tool": "ptcomb", "version": __version__, "command": "condition", "frames": []}
    out.mkdir(parents=True, exist_ok=True)
    for k in range(count):
        frame_cell = swept_cell(cell, axes, k)
        if not frame_cell.pt_ordered and not args.allow_non_pt:
            raise ConfigError(f"frame {k} is not PT-ordered; pass --allow-non-pt")
        name = f"frame_{k:0{width}d}.{suffix}"
        table = condition_table(frame_cell, eps, args.envelope)
        (out / name).write_text(table.render(args.format, frame_cell))
        manifest["frames"].append({
            "index": k,
            "file": name,
            "values": {f"s{ax.site}": float(fmt(ax.values[k])) for ax in axes},
        })
    (out / "manifest.json").write_text(json.dumps(manifest, indent=1) + "\n")
    return None


COMMANDS = {
    "condition": cmd_condition,
    "edges": cmd_edges,
    "dispersion": cmd_dispersion,
    "dos": cmd_dos,
    "wavefunction": cmd_wavefunction,
    "envelope": cmd_envelope,
    "extrema": cmd_extrema,
    "sweep": cmd_sweep,
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("cell")
    g.add_argument("--cell", help="JSON cell file")
    g.add_argument("--couplings", help="full cell as r1,s1,r2,s2,...")
    g.add_argument("--half", help="first half r1,s1,...; the rest is its conjugate mirror")
    g.add_argument("--middle", type=float, help="real middle coupling for odd cells (with --half)")
    g.add_argument("--allow-non-pt", action="store_true", help="accept cells that are not PT-ordered")
    e = common.add_argument_group("energy grid")
    e.add_argument("--emin", type=float, default=0.001)
    e.add_argument("--emax", type=float, default=30.0)
    e.add_argument("--esamples", type=int, default=4000)
    e.add_argument("--include-zero", action="store_true", help="start the grid at eps = 0")
    o = common.add_argument_group("output")
    o.add_argument("--format", choices=("csv", "json"), default="csv")
    o.add_argument("--out", help="output file (directory for sweep); stdout if omitted")

    parser = _Parser(prog="ptcomb", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ptcomb {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("condition", parents=[common], help="B(eps) over the grid")
    p.add_argument("--envelope", action="store_true", help="append C+ and C- (N=2)")
    sub.add_parser("edges", parents=[common], help="allowed band intervals")
    p = sub.add_parser("dispersion", parents=[common], help="band table over NQa in [0, pi]")
    p.add_argument("--qsamples", type=int, default=41)
    p.add_argument("--nqa", type=float, help="single NQa value instead of a table")
    p = sub.add_parser("dos", parents=[common], help="density of states")
    p.add_argument("--eps", help="comma-separated energies (each must be in a band)")
    p.add_argument("--integrate", action="store_true", help="states per cell in each complete band")
    p = sub.add_parser("wavefunction", parents=[common], help="Bloch state profile")
    p.add_argument("--eps", help="energy strictly inside a band")
    p.add_argument("--sign", choices=("+", "-"), default="+")
    p.add_argument("--xsamples", type=int, default=1001)
    sub.add_parser("envelope", parents=[common], help="C+ and C- curves (N=2)")
    p = sub.add_parser("extrema", parents=[common], help="local extrema of B")
    p.add_argument("--no-grouping", action="store_true")
    p = sub.add_parser("sweep", parents=[common], help="condition frames over a range of s_j")
    p.add_argument("--sweep", action="append", help="sJ=start:stop:frames (repeatable)")
    p.add_argument("--envelope", action="store_true")
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cell = build_cell(args)
        table = COMMANDS[args.command](args, cell)
        if table is not None:
            text = table.render(args.format, cell)
            if args.out:
                Path(args.out).write_text(text)
            else:
                sys.stdout.write(text)
    except (ConfigError, CellError) as exc:
        print(f"ptcomb: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, OutOfBandError, BandEdgeDegeneracy, EnvelopeDomainError) as exc:
        print(f"ptcomb: domain error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except ValueError as exc:
        print(f"ptcomb: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"ptcomb: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


def main(argv: Optional[Sequence[str]] = None) -> None:
    sys.exit(run(argv))


if __name__ == "__main__":
    main()
