"""Command-line entry point.

Every subcommand prints exactly one JSON object on stdout; logging goes
to stderr.  Exit codes: 0 success, 1 computation failure (or a failed
``verify``), 2 usage error.

Precedence is flags > ``--config`` JSON file > built-in defaults.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import logging
import math
import os
import re
import sys
from dataclasses import dataclass, field
from pathlib import Path

from .errors import FloquetError, GapClosure, NonConvergence, SpecError
from .model import DriveParams
from .realspace import edge_counts, edge_weight, verify_bulk_boundary
from .sweep import (
    PRESETS,
    SweepSpec,
    parse_axis,
    parse_binding,
    preset,
    run_sweep,
    format_value,
    write_csv,
    write_ppm,
)
from .winding import invariants

log = logging.getLogger("nhfloquet")

SUBCOMMANDS = ("invariants", "spectrum", "edges", "verify", "sweep")


class UsageError(Exception):
    exit_code = 2


@dataclass
class RunConfig:
    subcommand: str
    t1: float = 0.0
    t2: float = 0.0
    gamma0: float = 0.0
    theta: float = 2 * math.pi
    mu: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    cells: int = 200
    epsilon_e: float = 1e-2
    samples: int = 4096
    grid: int = 101
    workers: int = 1
    out_csv: str | None = None
    out_ppm: str | None = None
    preset: str | None = None
    x: str | None = None
    y: str | None = None
    bind: list = field(default_factory=list)
    target: list = field(default_factory=lambda: ["W0", "Wpi"])
    scale: int = 1

    def params(self) -> DriveParams:
        return DriveParams(
            t1=self.t1, t2=self.t2, gamma0=self.gamma0, theta=self.theta,
            mu=self.mu, omega1=self.omega1, omega2=self.omega2,
        )


_ANGLE_RE = re.compile(r"^([-+]?(?:\d+\.?\d*|\.\d+)?)\*?pi(?:/(\d+(?:\.\d*)?))?$")


def parse_angle(text) -> float:
    """Float, or a multiple of pi such as ``pi/2`` or ``5pi/12``."""
    if isinstance(text, (int, float)):
        return float(text)
    s = str(text).strip().replace(" ", "")
    try:
        return float(s)
    except ValueError:
        pass
    m = _ANGLE_RE.match(s)
    if not m:
        raise ValueError(f"not an angle: {text!r}")
    coef = m.group(1)
    num = float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0)
    den = float(m.group(2)) if m.group(2) else 1.0
    return num * math.pi / den


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise ValueError
    return v


_TYPES = {
    "t1": float, "t2": float, "gamma0": float, "theta": parse_angle, "mu": float,
    "omega1": float, "omega2": float, "cells": int, "epsilon_e": float,
    "samples": _positive_int, "grid": _positive_int, "workers": _positive_int,
    "out_csv": str, "out_ppm": str, "preset": str, "x": str, "y": str, "scale": _positive_int,
}


def build_parser() -> argparse.ArgumentParser:
    d = RunConfig("invariants")
    p = _Parser(
        prog="nhfloquet",
        description="Floquet invariants, spectra and phase diagrams of the quenched non-Hermitian chain.",
        argument_default=argparse.SUPPRESS,
    )
    p.add_argument("subcommand", nargs="?", choices=SUBCOMMANDS, help="what to compute")
    p.add_argument("--config", help="flat JSON object with RunConfig field names")
    g = p.add_argument_group("model")
    g.add_argument("--t1", type=float, help=f"nearest-neighbour hopping, step 1 (default {d.t1})")
    g.add_argument("--t2", type=float, help=f"next-nearest hopping, step 1 (default {d.t2})")
    g.add_argument("--gamma0", type=float, help=f"modulus of gamma (default {d.gamma0})")
    g.add_argument("--theta", type=parse_angle, help="phase of gamma, radians or e.g. pi/3 (default 2pi)")
    g.add_argument("--mu", type=float, help=f"intracell hopping, step 2 (default {d.mu})")
    g.add_argument("--omega1", type=float, help=f"nearest-neighbour hopping, step 2 (default {d.omega1})")
    g.add_argument("--omega2", type=float, help=f"next-nearest hopping, step 2 (default {d.omega2})")
    n = p.add_argument_group("numerics")
    n.add_argument("--cells", type=int, help=f"open-chain unit cells (default {d.cells})")
    n.add_argument("--epsilon-e", dest="epsilon_e", type=float,
                   help=f"0/pi quasienergy window (default {d.epsilon_e})")
    n.add_argument("--samples", type=_positive_int, help=f"initial k samples (default {d.samples})")
    s = p.add_argument_group("sweep")
    s.add_argument("--preset", choices=PRESETS, help="named reference sweep")
    s.add_argument("--x", help="x axis as name:lo:hi[:points]; '(' before lo excludes it")
    s.add_argument("--y", help="y axis, same format")
    s.add_argument("--bind", action="append", help="linear binding such as 'gamma=0.75i*t1' (repeatable)")
    s.add_argument("--target", action="append", choices=("W0", "Wpi", "W1", "W2", "n0", "npi"),
                   help="quantity to record (repeatable, default W0 and Wpi)")
    s.add_argument("--grid", type=_positive_int, help=f"points per axis (default {d.grid})")
    s.add_argument("--workers", type=_positive_int, help="worker processes (default $FLOQUET_WORKERS or 1)")
    s.add_argument("--out-csv", dest="out_csv", help="CSV output path")
    s.add_argument("--out-ppm", dest="out_ppm", help="PPM heatmap path")
    s.add_argument("--scale", type=_positive_int, help="pixels per cell in the PPM (default 1)")
    return p


def _load_config_file(path) -> dict:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"--config: cannot read {path}: {exc}") from None
    if not isinstance(data, dict):
        raise UsageError("--config: expected a JSON object")
    known = {f.name for f in dataclasses.fields(RunConfig)}
    out = {}
    for key, value in data.items():
        key = key.replace("-", "_")
        if key not in known:
            raise UsageError(f"--config: unknown field {key!r}")
        if key in _TYPES and value is not None:
            try:
                value = _TYPES[key](value)
            except (TypeError, ValueError):
                raise UsageError(f"--config: bad value for {key}: {value!r}") from None
        out[key] = value
    return out


def parse_config(argv) -> RunConfig:
    argv = list(argv)
    if not argv:
        raise UsageError("no subcommand given; choose one of " + ", ".join(SUBCOMMANDS))
    ns = vars(build_parser().parse_args(argv))
    merged = {}
    if "config" in ns:
        merged.update(_load_config_file(ns.pop("config")))
    merged.update({k: v for k, v in ns.items() if v is not None})
    if "workers" not in merged:
        env = os.environ.get("FLOQUET_WORKERS")
        if env:
            try:
                merged["workers"] = _positive_int(env)
            except ValueError:
                raise UsageError(f"FLOQUET_WORKERS must be a positive integer, got {env!r}") from None
    sub = merged.pop("subcommand", None)
    if sub not in SUBCOMMANDS:
        raise UsageError(f"subcommand must be one of {', '.join(SUBCOMMANDS)}")
    cfg = RunConfig(sub, **merged)
    try:
        cfg.params()
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    return cfg


def sweep_spec(cfg: RunConfig) -> SweepSpec:
    if cfg.preset:
        spec = preset(cfg.preset, cfg.grid, theta=cfg.theta if cfg.preset == "fig3" else None)
    else:
        if not cfg.x:
            raise SpecError("sweep needs --preset or --x")
        fixed = cfg.params()
        x = parse_axis(cfg.x, cfg.grid)
        y = parse_axis(cfg.y, cfg.grid) if cfg.y else None
        spec = SweepSpec(x=x, y=y, bindings=tuple(parse_binding(b) for b in cfg.bind), fixed=fixed)
    return dataclasses.replace(
        spec, targets=tuple(cfg.target), samples=cfg.samples, cells=cfg.cells, epsilon=cfg.epsilon_e
    )


def _ppm_path(base: str, target: str, many: bool) -> str:
    if not many:
        return base
    p = Path(base)
    return str(p.with_name(f"{p.stem}_{target}{p.suffix or '.ppm'}"))


def _run(cfg: RunConfig) -> tuple[dict, int]:
    if cfg.subcommand == "invariants":
        w = invariants(cfg.params(), samples=cfg.samples)
        return {**w.as_dict(), "params": cfg.params().as_dict()}, 0

    if cfg.subcommand in ("spectrum", "edges"):
        q = edge_counts(cfg.params(), cfg.cells, cfg.epsilon_e, vectors=cfg.subcommand == "edges")
        if cfg.out_csv:
            Path(cfg.out_csv).write_text(q.to_csv(), encoding="utf-8")
        out = {"n0": q.n0, "npi": q.npi, "cells": cfg.cells, "epsilon_e": cfg.epsilon_e,
               "diagnostics": list(q.diagnostics)}
        if cfg.subcommand == "spectrum":
            out["energies"] = [[float(e.real), float(e.imag)] for e in q.energies]
        else:
            modes = list(q.zero_modes) + list(q.pi_modes)
            weights = edge_weight(q.vectors[:, modes], cfg.cells) if modes else []
            out["zero_modes"] = [[float(q.energies[i].real), float(q.energies[i].imag)] for i in q.zero_modes]
            out["pi_modes"] = [[float(q.energies[i].real), float(q.energies[i].imag)] for i in q.pi_modes]
            out["edge_weight"] = [float(w) for w in weights]
        if cfg.out_csv:
            out["csv"] = cfg.out_csv
        return out, 0

    if cfg.subcommand == "verify":
        r = verify_bulk_boundary(cfg.params(), cfg.cells, cfg.samples, cfg.epsilon_e)
        return r.as_dict(), 0 if r.passed else 1

    spec = sweep_spec(cfg)
    log.info("sweep %s x %s with %d worker(s)", spec.x.name, spec.y.name if spec.y else "-", cfg.workers)
    diagram = run_sweep(spec, cfg.workers)
    out = {
        "spec": spec.describe(),
        "cells": {s: diagram.count_status(s) for s in ("ok", "gap_closure", "error")},
        "observed": {t: sorted(format_value(v) for v in diagram.observed(t)) for t in spec.targets},
        "wall_time": diagram.wall_time,
    }
    if cfg.out_csv:
        write_csv(diagram, cfg.out_csv)
        out["csv"] = cfg.out_csv
    if cfg.out_ppm:
        out["ppm"] = {}
        for t in spec.targets:
            path = _ppm_path(cfg.out_ppm, t, len(spec.targets) > 1)
            write_ppm(diagram, t, path, cfg.scale)
            out["ppm"][t] = path
    return out, 0


def _emit(obj) -> None:
    sys.stdout.write(json.dumps(obj, sort_keys=True) + "\n")
    sys.stdout.flush()


def main(cfg: RunConfig) -> int:
    try:
        out, code = _run(cfg)
    except SpecError as exc:
        _emit({"error": "SpecError", "message": str(exc)})
        return 2
    except FloquetError as exc:
        err = {"error": type(exc).__name__, "message": str(exc)}
        if isinstance(exc, (GapClosure, NonConvergence)) and exc.k is not None:
            err["k"] = exc.k
        _emit(err)
        return 1
    _emit(out)
    return code


def run(argv=None) -> int:
    logging.basicConfig(stream=sys.stderr, level=logging.INFO, format="%(levelname)s %(message)s")
    argv = sys.argv[1:] if argv is None else argv
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        sys.stderr.write(build_parser().format_usage())
        _emit({"error": "UsageError", "message": str(exc)})
        return 2
    return main(cfg)


if __name__ == "__main__":
    sys.exit(run())
