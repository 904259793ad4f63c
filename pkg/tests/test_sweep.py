import math
from fractions import Fraction

import pytest

from nhfloquet.errors import SpecError
from nhfloquet.model import DriveParams
from nhfloquet.sweep import (
    COLOR_TABLE,
    GAP_COLOR,
    Axis,
    Binding,
    PhaseDiagram,
    SweepSpec,
    format_binding,
    parse_axis,
    parse_binding,
    preset,
    read_csv,
    render_heatmap,
    run_sweep,
    theta_family,
    to_csv,
)
from nhfloquet.winding import invariants


def small_fig2c(n=5):
    spec = preset("fig2c", grid=n)
    return SweepSpec(x=spec.x, y=spec.y, bindings=spec.bindings, fixed=spec.fixed, samples=1024)


def pixels(ppm: bytes):
    header, _, body = ppm.partition(b"\n255\n")
    w, h = map(int, header.split(b"\n")[1].split())
    return w, h, [tuple(body[i : i + 3]) for i in range(0, len(body), 3)]


def test_axis_values():
    assert Axis("t1", 0, 4, 4, open_lo=True).values() == [1.0, 2.0, 3.0, 4.0]
    assert Axis("t1", 0, 10, 3).values() == [0.0, 5.0, 10.0]


@pytest.mark.parametrize("bad", [dict(name="nope"), dict(points=1), dict(hi=math.inf)])
def test_axis_rejects(bad):
    kw = dict(name="t1", lo=0.0, hi=1.0, points=3) | bad
    with pytest.raises(SpecError):
        Axis(**kw)


def test_parse_axis():
    a = parse_axis("omega1:(0:9:41", 10)
    assert a.open_lo and a.points == 41 and a.hi == 9
    assert not parse_axis("t1:0:10", 11).open_lo


def test_parse_binding_round_trip():
    b = parse_binding("gamma = 0.75i * t1")
    assert b == Binding("gamma", 0.75j, "t1")
    assert parse_binding(format_binding(b)) == b
    assert parse_binding("mu=-2*omega1").coefficient == -2


@pytest.mark.parametrize("text", ["gamma 0.75*t1", "gamma=abc*t1", "mu=1j*t1", "x=1*t1"])
def test_parse_binding_rejects(text):
    with pytest.raises(SpecError):
        parse_binding(text)


def test_spec_validation():
    x = Axis("t1", 0, 1, 3)
    with pytest.raises(SpecError):
        SweepSpec(x=x, y=Axis("t1", 0, 1, 3))
    with pytest.raises(SpecError):
        SweepSpec(x=x, bindings=(Binding("gamma", 1, "omega1"),))
    with pytest.raises(SpecError):
        SweepSpec(x=x, targets=("W3",))
    with pytest.raises(SpecError):
        preset("fig9")


def test_point_applies_binding():
    spec = preset("fig2c", grid=4)
    p = spec.point(2.0, 4.5)
    assert (p.t1, p.omega1, p.t2) == (2.0, 4.5, 0.01)
    assert p.gamma == pytest.approx(1.5j)


def test_single_cell_matches_invariants():
    spec = small_fig2c(4)
    d = run_sweep(spec, workers=1)
    for iy, y in enumerate(d.ys):
        for ix, x in enumerate(d.xs):
            if d.status[iy][ix] == "ok":
                w = invariants(spec.point(x, y), samples=1024)
                assert d.cell("W0", ix, iy) == w.w0 and d.cell("Wpi", ix, iy) == w.wpi


def test_workers_do_not_change_output():
    spec = small_fig2c(6)
    assert to_csv(run_sweep(spec, 1)) == to_csv(run_sweep(spec, 3))


def test_theta_family_member_matches_preset():
    spec = small_fig2c(4)
    fam = theta_family(spec, [math.pi / 2, math.pi / 4])
    assert to_csv(fam[0]) == to_csv(run_sweep(spec))
    with pytest.raises(SpecError):
        theta_family(spec, [0.0])


def test_one_dimensional_plateaus():
    spec = SweepSpec(x=Axis("t1", 0.5, 10, 12), fixed=DriveParams(gamma0=0.1, omega1=1.0))
    d = run_sweep(spec)
    vals = [v for v, s in zip(d.values["W0"][0], d.status[0]) if s == "ok"]
    # piecewise constant: few distinct values relative to points
    assert len(set(vals)) <= 4
    assert all(Fraction(v).denominator == 1 for v in vals)


def test_gap_cells_are_recorded():
    # t1 = gamma = 0.1, omega1 = 1 is an exceptional point at k = 0
    spec = SweepSpec(x=Axis("t1", 0.1, 0.1 + 1e-15, 2), fixed=DriveParams(gamma0=0.1, omega1=1.0))
    d = run_sweep(spec)
    assert d.count_status("gap_closure") >= 1
    assert d.cell("W0", 0) is None


def manual_diagram(values, status=None):
    ny, nx = len(values), len(values[0])
    status = status or [["ok"] * nx for _ in range(ny)]
    return PhaseDiagram("t1", "omega1", [float(i) for i in range(nx)], [float(j) for j in range(ny)],
                        ("W0",), {"W0": values}, status)


def test_heatmap_uniform_zero():
    z = Fraction(0)
    w, h, px = pixels(render_heatmap(manual_diagram([[z, z], [z, z]]), "W0"))
    assert (w, h) == (2, 2)
    assert set(px) == {COLOR_TABLE[0]}


def test_heatmap_distinct_colours_and_gap():
    vals = [[Fraction(v) for v in range(-3, 4)] + [None]]
    st = [["ok"] * 7 + ["gap_closure"]]
    _, _, px = pixels(render_heatmap(manual_diagram(vals, st), "W0", scale=2))
    assert len(set(px)) == 8
    assert GAP_COLOR in px


def test_heatmap_orientation():
    d = manual_diagram([[Fraction(1)], [Fraction(-1)]])
    _, _, px = pixels(render_heatmap(d, "W0"))
    # the bottom row of the image is iy = 0
    assert px == [COLOR_TABLE[-1], COLOR_TABLE[1]]


def test_csv_round_trip_bytes():
    d = run_sweep(small_fig2c(4))
    text = to_csv(d)
    assert to_csv(read_csv(text)) == text
    assert text.splitlines()[0] == "x_name,x_value,y_name,y_value,target,value,status"
