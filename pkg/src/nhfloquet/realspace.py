"""Open-boundary chain: real-space Hamiltonians, Floquet operator, edge modes.

Basis ordering is ``(A_1, B_1, A_2, B_2, ...)``: sublattice A of cell
``n`` (0-based) sits at row ``2n`` and B at ``2n + 1``.
"""

from __future__ import annotations

import csv
import io
import math
import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg

from .errors import DegenerateClassification, InvalidSize, NumericalOverflow
from .model import DriveParams, gamma_of
from .winding import DEFAULT_SAMPLES, WindingResult, fraction_json, invariants

DEFAULT_EPSILON = 1e-2
MIN_CELLS = 5


@dataclass(frozen=True)
class ChainMatrices:
    h1: np.ndarray
    h2: np.ndarray
    cells: int

    @property
    def dim(self) -> int:
        return 2 * self.cells


def build_chain(params: DriveParams, cells: int) -> ChainMatrices:
    """Single-particle matrices of both half-period Hamiltonians.

    First step: intracell ``A_n^dag B_n`` = +2 gamma and ``B_n^dag A_n`` =
    -2 gamma (no conjugate partner), intercell ``t1``/``t2`` between
    ``A_n, B_{n+d}`` and ``A_{n+d}, B_n`` plus their conjugates.  Second
    step: ``A_{n+d}^dag B_n`` = omega_d, ``A_n^dag B_{n+d}`` = -omega_d,
    ``A_n^dag B_n`` = 2 mu, all with conjugates.  Bonds leaving the chain
    are dropped.
    """
    if int(cells) != cells or cells < MIN_CELLS:
        raise InvalidSize(f"need at least {MIN_CELLS} cells, got {cells!r}")
    cells = int(cells)
    dim = 2 * cells
    gamma = gamma_of(params)
    h1 = np.zeros((dim, dim), dtype=complex)
    h2 = np.zeros((dim, dim), dtype=complex)
    n = np.arange(cells)
    a, b = 2 * n, 2 * n + 1

    h1[a, b] += 2 * gamma
    h1[b, a] += -2 * gamma
    h2[a, b] += 2 * params.mu
    h2[b, a] += 2 * params.mu

    for d, t, w in ((1, params.t1, params.omega1), (2, params.t2, params.omega2)):
        lo = n[: cells - d]
        a_lo, b_lo = 2 * lo, 2 * lo + 1
        a_hi, b_hi = 2 * (lo + d), 2 * (lo + d) + 1
        h1[a_lo, b_hi] += t
        h1[b_hi, a_lo] += np.conj(t)
        h1[a_hi, b_lo] += t
        h1[b_lo, a_hi] += np.conj(t)
        h2[a_hi, b_lo] += w
        h2[b_lo, a_hi] += np.conj(w)
        h2[a_lo, b_hi] += -w
        h2[b_hi, a_lo] += -np.conj(w)
    return ChainMatrices(h1=h1, h2=h2, cells=cells)


def _expm(m: np.ndarray) -> np.ndarray:
    with np.errstate(over="ignore", invalid="ignore"):
        out = scipy.linalg.expm(m)
    if not np.all(np.isfinite(out)):
        raise NumericalOverflow("matrix exponential overflowed")
    return out


def open_floquet(chain: ChainMatrices, frame: int = 0) -> np.ndarray:
    """One-period evolution of the open chain.

    ``frame = 0`` gives ``e^{-i h2/2} e^{-i h1/2}``; frames 1 and 2 are the
    symmetric products with ``h2`` or ``h1`` split around the middle.
    """
    if frame == 0:
        return _expm(-0.5j * chain.h2) @ _expm(-0.5j * chain.h1)
    if frame == 1:
        q = _expm(-0.25j * chain.h2)
        return q @ _expm(-0.5j * chain.h1) @ q
    if frame == 2:
        q = _expm(-0.25j * chain.h1)
        return q @ _expm(-0.5j * chain.h2) @ q
    raise ValueError(f"frame must be 0, 1 or 2, got {frame!r}")


@dataclass(frozen=True)
class QuasiSpectrum:
    energies: np.ndarray
    eigenvalues: np.ndarray
    zero_modes: tuple[int, ...]
    pi_modes: tuple[int, ...]
    n0: int
    npi: int
    epsilon: float
    diagnostics: tuple[str, ...] = ()
    vectors: np.ndarray | None = field(default=None, repr=False)

    def classes(self) -> list[str]:
        out = ["bulk"] * len(self.energies)
        for i in self.zero_modes:
            out[i] = "zero"
        for i in self.pi_modes:
            out[i] = "pi"
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["index", "re_E", "im_E", "class"])
        for i, (e, cls) in enumerate(zip(self.energies, self.classes())):
            writer.writerow([i, repr(float(e.real)), repr(float(e.imag)), cls])
        return buf.getvalue()


def _window_distance(energies, target):
    if target == 0:
        re = np.abs(energies.real)
    else:
        re = np.abs(np.abs(energies.real) - math.pi)
    return np.maximum(re, np.abs(energies.imag))


def quasi_spectrum(
    u: np.ndarray, epsilon: float = DEFAULT_EPSILON, vectors: bool = False
) -> QuasiSpectrum:
    """Complex quasienergies ``E = i log(lambda)`` and 0/pi edge-pair counts.

    The principal logarithm puts ``Re E`` in [-pi, pi); modes near +pi and
    -pi are both counted as pi modes.  Energies are sorted by (Re, Im).
    """
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError("U must be square")
    if vectors:
        lam, vec = scipy.linalg.eig(u)
    else:
        lam, vec = scipy.linalg.eigvals(u), None
    energies = 1j * np.log(lam)
    order = np.lexsort((energies.imag, energies.real))
    energies, lam = energies[order], lam[order]
    if vec is not None:
        vec = vec[:, order]

    diagnostics = []
    counts = {}
    for name, target in (("zero", 0), ("pi", math.pi)):
        dist = _window_distance(energies, target)
        idx = tuple(int(i) for i in np.flatnonzero(dist <= epsilon))
        counts[name] = idx
        if len(idx) % 2:
            diagnostics.append(f"odd number of {name} modes: {len(idx)}")
        near = int(np.count_nonzero((dist > epsilon) & (dist <= 2 * epsilon)))
        if near:
            diagnostics.append(f"{near} state(s) just outside the {name} window")
    for msg in diagnostics:
        warnings.warn(msg, DegenerateClassification, stacklevel=2)
    return QuasiSpectrum(
        energies=energies,
        eigenvalues=lam,
        zero_modes=counts["zero"],
        pi_modes=counts["pi"],
        n0=len(counts["zero"]) // 2,
        npi=len(counts["pi"]) // 2,
        epsilon=epsilon,
        diagnostics=tuple(diagnostics),
        vectors=vec,
    )


def edge_weight(vectors: np.ndarray, cells: int, fraction: float = 0.1) -> np.ndarray:
    """Share of each column's norm in the outer ``fraction`` of cells at both ends."""
    w = np.abs(vectors) ** 2
    w = w / w.sum(axis=0, keepdims=True)
    edge = max(1, int(round(fraction * cells)))
    rows = np.r_[0 : 2 * edge, 2 * (cells - edge) : 2 * cells]
    return w[rows].sum(axis=0)


@dataclass(frozen=True)
class BulkBoundaryReport:
    n0: int
    npi: int
    winding: WindingResult
    passed: bool
    edge_localized: float
    diagnostics: tuple[str, ...]

    def as_dict(self) -> dict:
        return {
            "n0": self.n0,
            "npi": self.npi,
            "W0_abs": fraction_json(abs(self.winding.w0)),
            "Wpi_abs": fraction_json(abs(self.winding.wpi)),
            "W0": fraction_json(self.winding.w0),
            "Wpi": fraction_json(self.winding.wpi),
            "pass": self.passed,
            "edge_localized_fraction": self.edge_localized,
            "diagnostics": list(self.diagnostics),
        }


def edge_counts(
    params: DriveParams, cells: int = 200, epsilon: float = DEFAULT_EPSILON, vectors=False
) -> QuasiSpectrum:
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DegenerateClassification)
        return quasi_spectrum(open_floquet(build_chain(params, cells)), epsilon, vectors=vectors)


def verify_bulk_boundary(
    params: DriveParams,
    cells: int = 200,
    samples: int = DEFAULT_SAMPLES,
    epsilon: float = DEFAULT_EPSILON,
) -> BulkBoundaryReport:
    """Compare open-chain edge-pair counts with ``|W0|`` and ``|W_pi|``.

    The localisation share of counted modes is reported but does not
    affect the verdict.
    """
    w = invariants(params, samples=samples)
    spectrum = edge_counts(params, cells, epsilon, vectors=True)
    modes = list(spectrum.zero_modes) + list(spectrum.pi_modes)
    if modes:
        weights = edge_weight(spectrum.vectors[:, modes], cells)
        localized = float(np.mean(weights > 0.5))
    else:
        localized = 1.0
    passed = spectrum.n0 == abs(w.w0) and spectrum.npi == abs(w.wpi)
    return BulkBoundaryReport(
        n0=spectrum.n0,
        npi=spectrum.npi,
        winding=w,
        passed=bool(passed),
        edge_localized=localized,
        diagnostics=spectrum.diagnostics,
    )
