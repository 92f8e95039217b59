"""Command-line front end.

Lengths are multiples of the aperture radius and Eb/N0 is in dB.  Every
output starts with ``# config: key = value`` lines holding the fully
resolved parameters; the loader accepts such lines, so a CSV header saved
to a file can be passed back through ``--config``.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Callable

import numpy as np

from . import __version__
from .abep import CancellationError, Deterministic, GammaFade, PpmConfig, abep, db_to_linear
from .montecarlo import SimSpec, simulate_abep
from .numerics import DomainError, NumericalError
from .optimizer import BracketError, WidthSearch, optimal_width_curve
from .pointing import PointingGeometry, equivalent_beam, fade_params

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3


@dataclass(frozen=True)
class Param:
    type: Callable
    default: object
    help: str


def _flag(text: str) -> bool:
    if isinstance(text, bool):
        return text
    value = str(text).strip().lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


PARAMS: dict[str, Param] = {
    "q": Param(int, 16, "PPM order Q"),
    "m": Param(int, 2, "ASE noise modes M"),
    "wz": Param(str, "15", "beam width(s) in units of a, comma separated"),
    "mu-x": Param(float, 0.0, "boresight error along x"),
    "mu-y": Param(float, 0.0, "boresight error along y"),
    "sigma-x": Param(float, 0.0, "jitter deviation along x"),
    "sigma-y": Param(float, 0.0, "jitter deviation along y"),
    "t0": Param(float, None, "fixed collected fraction; overrides the geometry"),
    "ebn0-db": Param(str, "0:40:1", "Eb/N0 in dB, scalar or start:stop:step"),
    "include-zero": Param(_flag, False, "prepend an Eb/N0 = 0 (linear) row"),
    "zero-signal": Param(_flag, False, "simulate at Eb/N0 = 0 (linear)"),
    "w-min": Param(float, 1.0, "lower end of the width bracket"),
    "w-max": Param(float, 60.0, "upper end of the width bracket"),
    "coarse-step": Param(float, 1.0, "coarse width step"),
    "fine-step": Param(float, 0.1, "fine width step"),
    "warm-start": Param(_flag, True, "re-centre each bracket on the previous optimum"),
    "symbols": Param(int, 1_000_000, "simulated symbols"),
    "seed": Param(int, 1, "simulation seed"),
    "chunks": Param(int, 1, "independent generator streams"),
    "workers": Param(int, 1, "worker processes for the simulation"),
    "source": Param(str, "fade", "simulate t from the 'fade' distribution or the 'geometry'"),
}

COMMAND_KEYS = {
    "params": ["wz", "mu-x", "mu-y", "sigma-x", "sigma-y"],
    "abep": ["q", "m", "wz", "mu-x", "mu-y", "sigma-x", "sigma-y", "t0",
             "ebn0-db", "include-zero"],
    "optimize": ["q", "m", "mu-x", "mu-y", "sigma-x", "sigma-y", "ebn0-db",
                 "w-min", "w-max", "coarse-step", "fine-step", "warm-start"],
    "simulate": ["q", "m", "wz", "mu-x", "mu-y", "sigma-x", "sigma-y", "t0",
                 "ebn0-db", "zero-signal", "symbols", "seed", "chunks", "workers", "source"],
}


class UsageError(Exception):
    pass


def fmt(value) -> str:
    """Shortest text that parses back to the identical float."""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def parse_grid(text: str) -> list[float]:
    """Eb/N0 grid in dB: ``x`` or inclusive ``start:stop:step``."""
    parts = str(text).split(":")
    try:
        nums = [float(p) for p in parts]
    except ValueError:
        raise UsageError(f"bad Eb/N0 grid {text!r}") from None
    if len(nums) == 1:
        return nums
    if len(nums) != 3 or nums[2] <= 0 or nums[1] < nums[0]:
        raise UsageError(f"Eb/N0 grid must be start:stop:step with step > 0, got {text!r}")
    start, stop, step = nums
    count = int(math.floor((stop - start) / step + 1e-9))
    return [round(start + k * step, 10) for k in range(count + 1)]


def parse_widths(text: str) -> list[float]:
    try:
        return [float(w) for w in str(text).split(",") if w.strip()]
    except ValueError:
        raise UsageError(f"bad width list {text!r}") from None


def load_config(path: str) -> dict[str, str]:
    """Flat ``key = value`` file; ``# config:`` prefixes are stripped, other comments skipped."""
    lines = []
    for line in Path(path).read_text().splitlines():
        stripped = line.strip()
        if stripped.startswith("# config:"):
            lines.append(stripped[len("# config:"):])
        elif stripped and not stripped.startswith("#"):
            lines.append(stripped)
    parser = configparser.ConfigParser(interpolation=None)
    parser.read_string("[run]\n" + "\n".join(lines))
    out = {}
    for key, value in parser["run"].items():
        name = key.replace("_", "-")
        if name not in PARAMS:
            raise UsageError(f"unknown configuration key {key!r} in {path}")
        out[name] = value
    return out


def resolve(args: argparse.Namespace, keys: list[str]) -> dict[str, object]:
    """Flags win over the config file, which wins over defaults."""
    from_file = load_config(args.config) if getattr(args, "config", None) else {}
    resolved = {}
    for key in keys:
        spec = PARAMS[key]
        flag_value = getattr(args, key.replace("-", "_"), None)
        if flag_value is not None:
            raw = flag_value
        elif key in from_file:
            raw = from_file[key]
        else:
            resolved[key] = spec.default
            continue
        if isinstance(raw, str) and raw.strip().lower() == "none":
            resolved[key] = None
            continue
        try:
            resolved[key] = spec.type(raw)
        except ValueError as err:
            raise UsageError(f"--{key}: {err}") from None
    return resolved


def provenance(command: str, resolved: dict[str, object], extra: dict[str, str] = ()) -> list[str]:
    lines = [f"# tool: ppm_pointing {__version__}", f"# command: {command}"]
    for key, value in dict(extra).items():
        lines.append(f"# {key}: {value}")
    for key, value in resolved.items():
        text = "none" if value is None else (fmt(value) if not isinstance(value, str) else value)
        lines.append(f"# config: {key} = {text}")
    return lines


def geometry_of(r: dict[str, object], w_z: float = 15.0) -> PointingGeometry:
    return PointingGeometry(
        a=1.0, w_z=w_z, mu_x=r["mu-x"], mu_y=r["mu-y"],
        sigma_x=r["sigma-x"], sigma_y=r["sigma-y"],
    )


def write_csv(out, header_lines: list[str], columns: list[str], rows: list[list]) -> None:
    for line in header_lines:
        out.write(line + "\n")
    writer = csv.writer(out, lineterminator="\n")
    writer.writerow(columns)
    for row in rows:
        writer.writerow(["" if v is None else (v if isinstance(v, str) else fmt(v)) for v in row])


def _record(out, record: dict) -> None:
    out.write(json.dumps(record, sort_keys=False) + "\n")


def _open_out(args):
    if getattr(args, "out", None):
        return open(args.out, "w", newline="")
    return _NoClose(sys.stdout)


class _NoClose(io.TextIOBase):
    def __init__(self, stream):
        self._stream = stream

    def write(self, text):
        return self._stream.write(text)

    def close(self):
        self._stream.flush()


# commands ------------------------------------------------------------------

def cmd_params(args) -> int:
    r = resolve(args, COMMAND_KEYS["params"])
    widths = parse_widths(r["wz"])
    out = _open_out(args)
    for line in provenance("params", r):
        out.write(line + "\n")
    for w in widths:
        g = geometry_of(r, w)
        beam = equivalent_beam(g)
        fade = fade_params(g)
        record = {"wz": w, "v": beam.v, "A0": beam.A0, "w_zeq": beam.w_zeq}
        if isinstance(fade, GammaFade):
            record.update(kind="gamma", phi2=fade.phi2, A=fade.A)
        else:
            record.update(kind="deterministic", t0=fade.t0)
        _record(out, record)
    out.close()
    return EXIT_OK


def abep_rows(config: PpmConfig, fade, grid_db: list[float], include_zero: bool, label):
    rows, flagged = [], False
    points = ([-math.inf] if include_zero else []) + list(grid_db)
    for db in points:
        ebn0 = 0.0 if db == -math.inf else db_to_linear(db)
        try:
            rows.append([label, "-inf" if db == -math.inf else db, abep(config, ebn0, fade), ""])
        except CancellationError:
            rows.append([label, db, None, "cancellation"])
            flagged = True
    return rows, flagged


def cmd_abep(args) -> int:
    r = resolve(args, COMMAND_KEYS["abep"])
    config = PpmConfig(r["q"], r["m"])
    grid = parse_grid(r["ebn0-db"])
    rows, flagged = [], False
    if r["t0"] is not None:
        part, bad = abep_rows(config, Deterministic(r["t0"]), grid, r["include-zero"], None)
        rows += part
        flagged |= bad
    else:
        for w in parse_widths(r["wz"]):
            fade = fade_params(geometry_of(r, w))
            part, bad = abep_rows(config, fade, grid, r["include-zero"], w)
            rows += part
            flagged |= bad
    out = _open_out(args)
    write_csv(out, provenance("abep", r), ["wz", "ebn0_db", "abep", "flag"], rows)
    out.close()
    return EXIT_NUMERICAL if flagged else EXIT_OK


def optimize_rows(config, grid, geometry, search, warm_start):
    points = optimal_width_curve(config, grid, geometry, search,
                                 warm_start=warm_start, strict=False)
    rows = []
    for p in points:
        if math.isnan(p.w_opt):
            rows.append([p.ebn0_db, None, None, f"bracket_edge:{fmt(p.w_coarse)}"])
        else:
            rows.append([p.ebn0_db, p.w_opt, p.abep_min, ""])
    return rows


def _search_of(r) -> WidthSearch:
    return WidthSearch(r["w-min"], r["w-max"], r["coarse-step"], r["fine-step"])


def cmd_optimize(args) -> int:
    r = resolve(args, COMMAND_KEYS["optimize"])
    rows = optimize_rows(PpmConfig(r["q"], r["m"]), parse_grid(r["ebn0-db"]),
                         geometry_of(r), _search_of(r), r["warm-start"])
    out = _open_out(args)
    write_csv(out, provenance("optimize", r), ["ebn0_db", "w_opt_over_a", "abep_min", "flag"], rows)
    out.close()
    return EXIT_USAGE if any(row[3] for row in rows) else EXIT_OK


def cmd_simulate(args) -> int:
    r = resolve(args, COMMAND_KEYS["simulate"])
    config = PpmConfig(r["q"], r["m"])
    if r["zero-signal"]:
        ebn0 = 0.0
    else:
        grid = parse_grid(r["ebn0-db"])
        if len(grid) != 1:
            raise UsageError("simulate takes a scalar --ebn0-db")
        ebn0 = db_to_linear(grid[0])
    if r["t0"] is not None:
        source = Deterministic(r["t0"])
    else:
        g = geometry_of(r, parse_widths(r["wz"])[0])
        if r["source"] == "geometry":
            source = g
        elif r["source"] == "fade":
            source = fade_params(g)
        else:
            raise UsageError("--source must be 'fade' or 'geometry'")
    spec = SimSpec(config, ebn0, source, r["symbols"], r["seed"], r["chunks"])
    result = simulate_abep(spec, workers=r["workers"])
    out = _open_out(args)
    for line in provenance("simulate", r):
        out.write(line + "\n")
    _record(out, {
        "abep_estimate": result.abep_estimate,
        "std_error": result.std_error,
        "n_symbols": result.n_symbols,
        "symbol_errors": result.symbol_errors,
        "seed": result.seed,
    })
    out.close()
    return EXIT_OK


# figure reproduction -------------------------------------------------------

FIG2_GRID = "0:45:0.5"
FIG3_GRID = "0:40:1"
FIG2_WIDTHS = (10.0, 15.0, 20.0, 25.0)
FIG3A_SCENARIOS = ((0.0, 1.0), (5.0, 1.0), (10.0, 1.0), (10.0, 2.0))
FIG3B_CONFIGS = ((2, 2), (16, 2), (2, 200), (16, 200))


def _scenario_lines(figure: str, description: str) -> dict[str, str]:
    return {"figure": figure, "scenario": f"{description} (reconstructed)"}


def reproduce(figure: str, outdir: Path, grid_text: str | None = None) -> list[Path]:
    """Write one CSV per curve of ``figure`` into ``outdir``; returns the paths."""
    outdir.mkdir(parents=True, exist_ok=True)
    written = []

    def emit(name, header, columns, rows):
        path = outdir / name
        with open(path, "w", newline="") as fh:
            write_csv(fh, header, columns, rows)
        written.append(path)

    if figure in ("fig2a", "fig2b"):
        sigma = 0.0 if figure == "fig2a" else 1.0
        grid_text = grid_text or FIG2_GRID
        for M in (2, 200):
            for w in FIG2_WIDTHS:
                r = {"q": 16, "m": M, "wz": fmt(w), "mu-x": 10.0, "mu-y": 0.0,
                     "sigma-x": sigma, "sigma-y": sigma, "t0": None,
                     "ebn0-db": grid_text, "include-zero": False}
                fade = fade_params(geometry_of(r, w))
                rows, _ = abep_rows(PpmConfig(16, M), fade, parse_grid(grid_text), False, w)
                desc = f"Q=16 M={M} mu_x=10a sigma={fmt(sigma)}a w_z={fmt(w)}a"
                emit(f"{figure}_M{M}_wz{w:g}.csv",
                     provenance("abep", r, _scenario_lines(figure, desc)),
                     ["wz", "ebn0_db", "abep", "flag"], rows)
    elif figure in ("fig3a", "fig3b"):
        grid_text = grid_text or FIG3_GRID
        if figure == "fig3a":
            cases = [(16, 2, mu, s) for mu, s in FIG3A_SCENARIOS]
        else:
            cases = [(Q, M, 10.0, 1.0) for Q, M in FIG3B_CONFIGS]
        for Q, M, mu, s in cases:
            r = {"q": Q, "m": M, "mu-x": mu, "mu-y": 0.0, "sigma-x": s, "sigma-y": s,
                 "ebn0-db": grid_text, "w-min": 1.0, "w-max": 60.0,
                 "coarse-step": 1.0, "fine-step": 0.1, "warm-start": True}
            rows = optimize_rows(PpmConfig(Q, M), parse_grid(grid_text), geometry_of(r),
                                 _search_of(r), True)
            desc = f"Q={Q} M={M} mu_x={fmt(mu)}a sigma={fmt(s)}a"
            emit(f"{figure}_Q{Q}_M{M}_mu{mu:g}_sigma{s:g}.csv",
                 provenance("optimize", r, _scenario_lines(figure, desc)),
                 ["ebn0_db", "w_opt_over_a", "abep_min", "flag"], rows)
    else:
        raise UsageError(f"unknown figure {figure!r}; choose fig2a, fig2b, fig3a or fig3b")
    return written


def cmd_reproduce(args) -> int:
    paths = reproduce(args.figure, Path(args.out or "."), args.ebn0_db)
    for p in paths:
        print(p)
    return EXIT_OK


# parser --------------------------------------------------------------------

def _add_params(parser: argparse.ArgumentParser, keys: list[str]) -> None:
    for key in keys:
        spec = PARAMS[key]
        kind = str if spec.type in (str, _flag) else spec.type
        if spec.type is _flag:
            parser.add_argument(f"--{key}", nargs="?", const="true", default=None,
                                help=spec.help)
        else:
            parser.add_argument(f"--{key}", type=kind, default=None, help=spec.help)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ppm-pointing",
        description="ABEP of optically pre-amplified PPM receivers under pointing errors",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    handlers = {
        "params": cmd_params,
        "abep": cmd_abep,
        "optimize": cmd_optimize,
        "simulate": cmd_simulate,
    }
    for name, handler in handlers.items():
        p = sub.add_parser(name)
        _add_params(p, COMMAND_KEYS[name])
        p.add_argument("--config", help="flat key = value file; flags win")
        p.add_argument("--out", help="output file (default stdout)")
        p.set_defaults(handler=handler)
    p = sub.add_parser("reproduce")
    p.add_argument("figure", help="fig2a, fig2b, fig3a or fig3b")
    p.add_argument("--out", help="output directory", default=".")
    p.add_argument("--ebn0-db", default=None, help="override the figure's Eb/N0 grid")
    p.set_defaults(handler=cmd_reproduce)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except (UsageError, DomainError, BracketError, configparser.Error, OSError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as err:
        print(f"numerical error: {err}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
