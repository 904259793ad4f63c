import math
import warnings

import numpy as np
import pytest

from conftest import FIG1_C, FIG1_D, random_params
from nhfloquet.bloch import h1_bloch, h2_bloch
from nhfloquet.errors import DegenerateClassification, InvalidSize
from nhfloquet.model import DriveParams
from nhfloquet.realspace import (
    build_chain,
    edge_counts,
    edge_weight,
    open_floquet,
    quasi_spectrum,
    verify_bulk_boundary,
)


def taylor_expm(m, terms=50):
    out = np.eye(len(m), dtype=complex)
    term = np.eye(len(m), dtype=complex)
    for j in range(1, terms):
        term = term @ m / j
        out = out + term
    return out


def bloch_from_stencil(h, cells, k):
    """2x2 block sum over neighbours of a bulk cell with plane-wave phases."""
    n = cells // 2
    out = np.zeros((2, 2), dtype=complex)
    for m in range(cells):
        out += h[2 * n : 2 * n + 2, 2 * m : 2 * m + 2] * np.exp(1j * k * (m - n))
    return out


def test_fourier_of_bulk_rows(rng):
    for _ in range(10):
        p = random_params(rng, bound=2.0)
        ch = build_chain(p, 12)
        for k in rng.uniform(-math.pi, math.pi, 4):
            assert np.allclose(bloch_from_stencil(ch.h1, 12, k), h1_bloch(k, p).array, atol=1e-13)
            assert np.allclose(bloch_from_stencil(ch.h2, 12, k), h2_bloch(k, p).array, atol=1e-13)


def test_antihermitian_part_is_intracell_gamma():
    p = DriveParams.from_gamma(0.3, t1=1.1, t2=0.4, mu=0.2, omega1=0.5, omega2=0.1)
    ch = build_chain(p, 5)
    diff = ch.h1 - ch.h1.conj().T
    expected = np.zeros_like(diff)
    for n in range(5):
        expected[2 * n, 2 * n + 1] = 4 * 0.3
        expected[2 * n + 1, 2 * n] = -4 * 0.3
    assert np.allclose(diff, expected, atol=1e-15)
    assert np.allclose(ch.h2, ch.h2.conj().T)


def test_hermitian_at_imaginary_gamma():
    p = DriveParams(t1=1.4, t2=0.2, gamma0=0.75, theta=math.pi / 2, omega1=1.0)
    ch = build_chain(p, 20)
    assert np.max(np.abs(ch.h1 - ch.h1.conj().T)) <= 1e-14


def test_range_two_band():
    ch = build_chain(DriveParams(t1=1, t2=1, gamma0=1, mu=1, omega1=1, omega2=1), 10)
    rows, cols = np.nonzero(ch.h1 + ch.h2)
    assert np.max(np.abs(rows // 2 - cols // 2)) == 2


def test_invalid_size():
    with pytest.raises(InvalidSize):
        build_chain(DriveParams(), 4)


def test_open_floquet_identity():
    u = open_floquet(build_chain(DriveParams(), 6))
    assert np.allclose(u, np.eye(12))


def test_open_floquet_taylor_oracle(rng):
    p = random_params(rng, bound=0.3)
    ch = build_chain(p, 5)
    want = taylor_expm(-0.5j * ch.h2) @ taylor_expm(-0.5j * ch.h1)
    assert np.max(np.abs(open_floquet(ch) - want)) <= 1e-8


def test_open_floquet_unitary_when_hermitian(rng):
    p = random_params(rng, bound=2.0, theta=math.pi / 2)
    u = open_floquet(build_chain(p, 15))
    assert np.max(np.abs(u.conj().T @ u - np.eye(30))) <= 1e-9


def test_quasi_spectrum_identity():
    q = quasi_spectrum(np.eye(8))
    assert len(q.energies) == 8
    assert q.n0 == 4 and q.npi == 0
    assert set(q.classes()) == {"zero"}


def test_fig1_edge_counts():
    c = edge_counts(FIG1_C, 200)
    d = edge_counts(FIG1_D, 200)
    assert (c.n0, c.npi) == (0, 0)
    assert (d.n0, d.npi) == (3, 4)
    assert len(d.energies) == 400


def test_fig1d_edge_modes_real_and_localised():
    d = edge_counts(FIG1_D, 200, vectors=True)
    modes = list(d.zero_modes) + list(d.pi_modes)
    assert np.max(np.abs(d.energies[modes].imag)) < 1e-6
    assert np.all(edge_weight(d.vectors[:, modes], 200) > 0.5)


def test_finite_size_stability():
    a, b = edge_counts(FIG1_D, 100), edge_counts(FIG1_D, 200)
    assert (a.n0, a.npi) == (b.n0, b.npi)


def test_frames_share_open_spectrum(rng):
    p = random_params(rng, bound=1.5, gamma_max=0.3)
    ch = build_chain(p, 10)
    evs = [np.sort_complex(np.linalg.eigvals(open_floquet(ch, f))) for f in (0, 1, 2)]
    assert np.max(np.abs(evs[0] - evs[1])) <= 1e-8
    assert np.max(np.abs(evs[0] - evs[2])) <= 1e-8


def test_symmetric_frame_inverse_pairs(rng):
    p = random_params(rng, bound=1.5, gamma_max=0.3)
    u = open_floquet(build_chain(p, 10), 1)
    lam = np.linalg.eigvals(u)
    for x in lam:
        assert np.min(np.abs(lam - 1 / x)) <= 1e-8


def test_odd_count_diagnostic():
    u = np.diag([1.0, 1.0, 1.0, -1.0, 1j, -1j]).astype(complex)
    with pytest.warns(DegenerateClassification):
        q = quasi_spectrum(u)
    assert any("odd" in d for d in q.diagnostics)
    assert q.n0 == 1


def test_pi_modes_both_signs_merged():
    eps = 1e-4
    u = np.diag(np.exp(-1j * np.array([math.pi - eps, -math.pi + eps, 0.5, -0.5])))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        q = quasi_spectrum(u)
    assert len(q.pi_modes) == 2 and q.npi == 1


def test_spectrum_csv():
    q = quasi_spectrum(np.diag([1, -1, 1j, -1j]).astype(complex))
    lines = q.to_csv().splitlines()
    assert lines[0] == "index,re_E,im_E,class"
    assert len(lines) == 5
    assert {ln.split(",")[3] for ln in lines[1:]} == {"zero", "pi", "bulk"}


@pytest.mark.parametrize(
    "params, expected",
    [(FIG1_D, (3, 4)), (FIG1_C, (0, 0)), (DriveParams(mu=0.3), (0, 0))],
)
def test_verify_bulk_boundary(params, expected):
    r = verify_bulk_boundary(params, cells=200)
    assert r.passed
    assert (r.n0, r.npi) == expected
    assert (abs(r.winding.w0), abs(r.winding.wpi)) == expected
