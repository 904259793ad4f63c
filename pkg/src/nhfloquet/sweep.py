"""Parameter sweeps producing phase diagrams, with CSV and PPM output.

A sweep varies one or two :class:`DriveParams` fields over a grid.  Other
parameters may follow an axis linearly (``gamma = 0.75i * t1``).  Cells
are independent; results are stored by grid position so the worker count
never changes the output.
"""

from __future__ import annotations

import csv
import io
import math
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import GapClosure, NonConvergence, NumericalOverflow, SpecError
from .model import DriveParams, phase_factor
from .realspace import DEFAULT_EPSILON, edge_counts
from .winding import DEFAULT_SAMPLES, invariants

AXIS_PARAMS = ("t1", "t2", "omega1", "omega2", "mu", "theta", "gamma0")
BINDABLE = AXIS_PARAMS + ("gamma",)
TARGETS = ("W0", "Wpi", "W1", "W2", "n0", "npi")
EDGE_TARGETS = ("n0", "npi")

OK, GAP, ERROR = "ok", "gap_closure", "error"


@dataclass(frozen=True)
class Axis:
    """Grid axis.  ``open_lo`` drops the lower end: ``lo + (hi-lo) j/points``, j = 1..points."""

    name: str
    lo: float
    hi: float
    points: int
    open_lo: bool = False

    def __post_init__(self):
        if self.name not in AXIS_PARAMS:
            raise SpecError(f"unknown axis parameter {self.name!r}")
        if self.points < 2:
            raise SpecError(f"axis {self.name} needs at least 2 points")
        if not (math.isfinite(self.lo) and math.isfinite(self.hi)):
            raise SpecError(f"axis {self.name} range must be finite")

    def values(self) -> list[float]:
        if self.open_lo:
            j = np.arange(1, self.points + 1)
            return [float(v) for v in self.lo + (self.hi - self.lo) * j / self.points]
        return [float(v) for v in np.linspace(self.lo, self.hi, self.points)]


@dataclass(frozen=True)
class Binding:
    """``target = coefficient * axis``."""

    target: str
    coefficient: complex
    axis: str

    def __post_init__(self):
        if self.target not in BINDABLE:
            raise SpecError(f"cannot bind {self.target!r}")
        if self.axis not in AXIS_PARAMS:
            raise SpecError(f"binding refers to unknown axis {self.axis!r}")
        if self.target != "gamma" and complex(self.coefficient).imag != 0:
            raise SpecError(f"{self.target} is real; coefficient {self.coefficient!r} is complex")


_BINDING_RE = re.compile(r"^\s*(\w+)\s*=\s*(.*?)\s*\*\s*(\w+)\s*$")


def parse_coefficient(text: str) -> complex:
    t = text.strip().replace(" ", "")
    if t.startswith("(") and t.endswith(")"):
        t = t[1:-1]
    t = t.replace("i", "j")
    if t in ("j", "+j", "-j"):
        t = t.replace("j", "1j")
    try:
        return complex(t)
    except ValueError:
        raise SpecError(f"bad coefficient {text!r}") from None


def parse_binding(text: str) -> Binding:
    """Parse ``"gamma = 0.75i * t1"`` style bindings."""
    m = _BINDING_RE.match(text)
    if not m:
        raise SpecError(f"binding must look like 'param = c * axis', got {text!r}")
    target, coef, axis = m.groups()
    return Binding(target, parse_coefficient(coef), axis)


def format_binding(b: Binding) -> str:
    c = complex(b.coefficient)
    coef = repr(c.real) if c.imag == 0 else f"({c.real!r}{c.imag:+}i)"
    return f"{b.target}={coef}*{b.axis}"


@dataclass(frozen=True)
class SweepSpec:
    x: Axis
    y: Axis | None = None
    bindings: tuple[Binding, ...] = ()
    fixed: DriveParams = field(default_factory=DriveParams)
    targets: tuple[str, ...] = ("W0", "Wpi")
    samples: int = DEFAULT_SAMPLES
    cells: int = 200
    epsilon: float = DEFAULT_EPSILON

    def __post_init__(self):
        if self.y is not None and self.y.name == self.x.name:
            raise SpecError("sweep axes must be distinct parameters")
        axes = {self.x.name} | ({self.y.name} if self.y else set())
        for b in self.bindings:
            if b.axis not in axes:
                raise SpecError(f"binding {format_binding(b)} refers to a non-swept axis")
            if b.target in axes:
                raise SpecError(f"binding overrides swept axis {b.target}")
        if not self.targets:
            raise SpecError("no targets")
        for t in self.targets:
            if t not in TARGETS:
                raise SpecError(f"unknown target {t!r}")

    def point(self, x: float, y: float | None = None) -> DriveParams:
        """Drive parameters at one grid point, bindings applied."""
        coords = {self.x.name: x}
        if self.y is not None:
            coords[self.y.name] = y
        params = replace(self.fixed, **coords)
        for b in self.bindings:
            value = complex(b.coefficient) * coords[b.axis]
            if b.target == "gamma":
                params = params.with_gamma(value)
            else:
                params = replace(params, **{b.target: value.real})
        return params

    def describe(self) -> dict:
        def axis(a):
            return None if a is None else {
                "name": a.name, "lo": a.lo, "hi": a.hi, "points": a.points, "open_lo": a.open_lo
            }

        return {
            "x": axis(self.x),
            "y": axis(self.y),
            "bindings": [format_binding(b) for b in self.bindings],
            "fixed": self.fixed.as_dict(),
            "targets": list(self.targets),
            "samples": self.samples,
            "cells": self.cells,
            "epsilon": self.epsilon,
        }


@dataclass
class PhaseDiagram:
    """Values and statuses indexed ``[iy][ix]``; ``ys == [None]`` for 1-D sweeps."""

    x_name: str
    y_name: str | None
    xs: list[float]
    ys: list
    targets: tuple[str, ...]
    values: dict
    status: list
    spec: SweepSpec | None = None
    wall_time: float = 0.0

    def cell(self, target: str, ix: int, iy: int = 0):
        return self.values[target][iy][ix]

    def ok_values(self, target: str) -> list:
        return [
            v
            for row, srow in zip(self.values[target], self.status)
            for v, s in zip(row, srow)
            if s == OK
        ]

    def observed(self, target: str) -> set:
        return set(self.ok_values(target))

    def count_status(self, status: str) -> int:
        return sum(s == status for row in self.status for s in row)

    def fraction(self, target: str, predicate) -> float:
        """Share of all cells whose ok value satisfies ``predicate``."""
        total = len(self.xs) * len(self.ys)
        return sum(1 for v in self.ok_values(target) if predicate(v)) / total


def _evaluate(spec: SweepSpec, params: DriveParams):
    out = {}
    try:
        if any(t not in EDGE_TARGETS for t in spec.targets):
            w = invariants(params, samples=spec.samples)
            out.update(W0=w.w0, Wpi=w.wpi, W1=w.w1, W2=w.w2)
        if any(t in EDGE_TARGETS for t in spec.targets):
            q = edge_counts(params, spec.cells, spec.epsilon)
            out.update(n0=Fraction(q.n0), npi=Fraction(q.npi))
    except GapClosure:
        return None, GAP
    except (NonConvergence, NumericalOverflow, ArithmeticError, np.linalg.LinAlgError):
        return None, ERROR
    return tuple(out[t] for t in spec.targets), OK


def _evaluate_block(args):
    spec, cells = args
    return [_evaluate(spec, spec.point(x, y)) for x, y in cells]


def default_workers() -> int:
    try:
        return max(1, int(os.environ.get("FLOQUET_WORKERS", "1")))
    except ValueError:
        return 1


def run_sweep(spec: SweepSpec, workers: int | None = None) -> PhaseDiagram:
    """Evaluate every grid cell; gap closures are recorded, not raised."""
    workers = default_workers() if workers is None else max(1, int(workers))
    start = time.perf_counter()
    xs = spec.x.values()
    ys = spec.y.values() if spec.y is not None else [None]
    cells = [(x, y) for y in ys for x in xs]

    if workers == 1:
        results = _evaluate_block((spec, cells))
    else:
        chunk = max(1, len(cells) // (workers * 8))
        blocks = [(spec, cells[i : i + chunk]) for i in range(0, len(cells), chunk)]
        results = []
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for part in pool.map(_evaluate_block, blocks):
                results.extend(part)

    nx = len(xs)
    values = {t: [[None] * nx for _ in ys] for t in spec.targets}
    status = [[None] * nx for _ in ys]
    for i, (vals, st) in enumerate(results):
        iy, ix = divmod(i, nx)
        status[iy][ix] = st
        if vals is not None:
            for t, v in zip(spec.targets, vals):
                values[t][iy][ix] = v
    return PhaseDiagram(
        x_name=spec.x.name,
        y_name=spec.y.name if spec.y is not None else None,
        xs=xs,
        ys=ys,
        targets=tuple(spec.targets),
        values=values,
        status=status,
        spec=spec,
        wall_time=time.perf_counter() - start,
    )


def theta_family(
    spec: SweepSpec, thetas, gamma0: float | None = None, workers: int | None = None
) -> list[PhaseDiagram]:
    """One diagram per phase ``theta`` of the intracell amplitude.

    A ``gamma`` binding keeps its axis and modulus (or ``gamma0`` if given)
    and takes the phase ``theta``; without one the fixed ``gamma0, theta``
    are replaced.
    """
    out = []
    for theta in thetas:
        if not 0 < theta <= 2 * math.pi:
            raise SpecError(f"theta {theta!r} outside (0, 2 pi]")
        bindings = []
        bound = False
        for b in spec.bindings:
            if b.target == "gamma":
                modulus = abs(complex(b.coefficient)) if gamma0 is None else gamma0
                b = Binding("gamma", modulus * phase_factor(theta), b.axis)
                bound = True
            bindings.append(b)
        fixed = spec.fixed
        if not bound:
            g0 = fixed.gamma0 if gamma0 is None else gamma0
            fixed = replace(fixed, gamma0=g0, theta=theta)
        member = replace(spec, bindings=tuple(bindings), fixed=fixed)
        out.append(run_sweep(member, workers))
    return out


CSV_HEADER = ["x_name", "x_value", "y_name", "y_value", "target", "value", "status"]


def format_value(v) -> str:
    if v is None:
        return ""
    v = Fraction(v)
    return str(v.numerator) if v.denominator == 1 else f"{v.numerator}/{v.denominator}"


def to_csv(diagram: PhaseDiagram) -> str:
    """Row-major CSV: y outer (ascending), x inner, one line per target."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_HEADER)
    for iy, y in enumerate(diagram.ys):
        for ix, x in enumerate(diagram.xs):
            st = diagram.status[iy][ix]
            for t in diagram.targets:
                w.writerow([
                    diagram.x_name,
                    repr(float(x)),
                    diagram.y_name or "",
                    "" if y is None else repr(float(y)),
                    t,
                    format_value(diagram.values[t][iy][ix]),
                    st,
                ])
    return buf.getvalue()


def write_csv(diagram: PhaseDiagram, path) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(to_csv(diagram))


def read_csv(text: str) -> PhaseDiagram:
    """Rebuild a diagram (without its spec) from :func:`to_csv` output."""
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise SpecError("not a phase-diagram CSV")
    xs, ys, targets = [], [], []
    cells = {}
    x_name = y_name = None
    for x_name, xv, y_name, yv, target, value, st in rows[1:]:
        x = float(xv)
        y = float(yv) if yv else None
        if x not in xs:
            xs.append(x)
        if y not in ys:
            ys.append(y)
        if target not in targets:
            targets.append(target)
        cells[(x, y, target)] = (Fraction(value) if value else None, st)
    values = {t: [[cells[(x, y, t)][0] for x in xs] for y in ys] for t in targets}
    status = [[cells[(x, y, targets[0])][1] for x in xs] for y in ys]
    return PhaseDiagram(
        x_name=x_name,
        y_name=y_name or None,
        xs=xs,
        ys=ys,
        targets=tuple(targets),
        values=values,
        status=status,
    )


# integer value -> RGB; see docs/colormap.md
COLOR_TABLE = {
    -6: (40, 0, 80),
    -5: (84, 39, 136),
    -4: (33, 102, 172),
    -3: (67, 147, 195),
    -2: (146, 197, 222),
    -1: (209, 229, 240),
    0: (247, 247, 247),
    1: (253, 219, 199),
    2: (244, 165, 130),
    3: (214, 96, 77),
    4: (178, 24, 43),
    5: (120, 10, 30),
    6: (80, 40, 0),
}
FRACTION_COLOR = (0, 170, 0)
OUT_OF_RANGE_COLOR = (255, 0, 255)
GAP_COLOR = (0, 0, 0)
ERROR_COLOR = (128, 128, 128)


def cell_color(value, status: str) -> tuple[int, int, int]:
    if status == GAP:
        return GAP_COLOR
    if status != OK or value is None:
        return ERROR_COLOR
    v = Fraction(value)
    if v.denominator != 1:
        return FRACTION_COLOR
    return COLOR_TABLE.get(int(v), OUT_OF_RANGE_COLOR)


def render_heatmap(diagram: PhaseDiagram, target: str, scale: int = 1) -> bytes:
    """Binary PPM (P6) with x to the right and y upward; ``scale`` px per cell."""
    if target not in diagram.targets:
        raise SpecError(f"target {target!r} not recorded")
    scale = int(scale)
    nx, ny = len(diagram.xs), len(diagram.ys)
    img = np.zeros((ny, nx, 3), dtype=np.uint8)
    for iy in range(ny):
        for ix in range(nx):
            img[ny - 1 - iy, ix] = cell_color(diagram.values[target][iy][ix], diagram.status[iy][ix])
    if scale > 1:
        img = img.repeat(scale, axis=0).repeat(scale, axis=1)
    header = f"P6\n{nx * scale} {ny * scale}\n255\n".encode("ascii")
    return header + img.tobytes()


def write_ppm(diagram: PhaseDiagram, target: str, path, scale: int = 1) -> None:
    with open(path, "wb") as fh:
        fh.write(render_heatmap(diagram, target, scale))


def parse_axis(text: str, points: int, open_lo: bool | None = None) -> Axis:
    """``name:lo:hi`` or ``name:lo:hi:points``; a ``(`` before lo opens the lower end."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise SpecError(f"axis must be name:lo:hi[:points], got {text!r}")
    name, lo, hi = parts[:3]
    explicit_open = lo.startswith("(")
    lo = lo.lstrip("([")
    if len(parts) == 4:
        points = int(parts[3])
    try:
        return Axis(name, float(lo), float(hi.rstrip("])")), int(points),
                    explicit_open if open_lo is None else open_lo)
    except ValueError as exc:
        raise SpecError(f"bad axis {text!r}: {exc}") from None


def preset(name: str, grid: int = 101, theta: float | None = None) -> SweepSpec:
    """Named reference sweeps on the standard (0,4] x (0,9] window.

    ``fig1a``: 1-D t1 in [0, 10], gamma = 0.1, omega1 = 1.
    ``fig2a``/``fig2c``: t1 in (0,4], omega1 in (0,9], gamma = 0.75 t1 or 0.75i t1.
    ``fig3``: as fig2 with gamma = 0.75 e^{i theta} t1.
    ``fig4ab``: nearest-only, gamma = 0.75i t1.  ``fig4cd``: next-nearest-only,
    t2 in (0,4], omega2 in (0,9], gamma = 0.75i t2.
    """
    small = DriveParams(t2=0.01, omega2=0.01)
    t1 = Axis("t1", 0.0, 4.0, grid, open_lo=True)
    w1 = Axis("omega1", 0.0, 9.0, grid, open_lo=True)
    if name == "fig1a":
        return SweepSpec(x=Axis("t1", 0.0, 10.0, grid), fixed=DriveParams(gamma0=0.1, omega1=1.0))
    if name == "fig2a":
        return SweepSpec(x=t1, y=w1, bindings=(Binding("gamma", 0.75, "t1"),), fixed=small)
    if name == "fig2c":
        return SweepSpec(x=t1, y=w1, bindings=(Binding("gamma", 0.75j, "t1"),), fixed=small)
    if name == "fig3":
        th = math.pi / 2 if theta is None else theta
        return SweepSpec(
            x=t1, y=w1, bindings=(Binding("gamma", 0.75 * phase_factor(th), "t1"),), fixed=small
        )
    if name == "fig4ab":
        return SweepSpec(x=t1, y=w1, bindings=(Binding("gamma", 0.75j, "t1"),))
    if name == "fig4cd":
        return SweepSpec(
            x=Axis("t2", 0.0, 4.0, grid, open_lo=True),
            y=Axis("omega2", 0.0, 9.0, grid, open_lo=True),
            bindings=(Binding("gamma", 0.75j, "t2"),),
        )
    raise SpecError(f"unknown preset {name!r}")


PRESETS = ("fig1a", "fig2a", "fig2c", "fig3", "fig4ab", "fig4cd")
