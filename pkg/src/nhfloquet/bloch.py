"""Bloch Hamiltonians, Floquet operators and their frame components.

Both half-period Hamiltonians are written as ``H(k) = 2 v(k).sigma``:

    H1(k) = 2i gamma sy + (2 t1 cos k + 2 t2 cos 2k) sx
    H2(k) = 2 mu sx + (2 omega1 sin k + 2 omega2 sin 2k) sy

so every half-period exponential ``exp(-i H/2)`` is ``exp(-i v.sigma)``
and is evaluated in closed form.  Frame 1 starts the period in the middle
of the second step, frame 2 in the middle of the first step:

    U1 = e^{-i H2/4} e^{-i H1/2} e^{-i H2/4}
    U2 = e^{-i H1/4} e^{-i H2/2} e^{-i H1/4}

Each ``U_s = cos E I - i (n_x sx + n_y sy)``; the sz component vanishes
by sublattice symmetry and is checked rather than assumed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import DriveParams, Mat2C, gamma_of, pauli_exp, pauli_mul

# relative size allowed for the sz component of a symmetric-frame operator
SZ_TOLERANCE = 1e-9


@dataclass(frozen=True)
class FrameComponents:
    frame: int
    nx: complex
    ny: complex
    cosE: complex
    nz: complex = 0j

    def unimodularity_residual(self) -> float:
        return abs(self.cosE**2 + self.nx**2 + self.ny**2 - 1)


@dataclass(frozen=True)
class AuxiliaryAngles:
    hx: complex
    hy: complex
    k: float


def _check_frame(s):
    if s not in (1, 2):
        raise ValueError(f"frame must be 1 or 2, got {s!r}")


def half_period_vectors(k, params: DriveParams) -> tuple[np.ndarray, np.ndarray]:
    """Vectors ``v1(k), v2(k)`` of shape (..., 3) with ``H_j = 2 v_j.sigma``."""
    k = np.asarray(k, dtype=float)
    gamma = gamma_of(params)
    v1 = np.zeros(k.shape + (3,), dtype=complex)
    v1[..., 0] = params.t1 * np.cos(k) + params.t2 * np.cos(2 * k)
    v1[..., 1] = 1j * gamma
    v2 = np.zeros(k.shape + (3,), dtype=complex)
    v2[..., 0] = params.mu
    v2[..., 1] = params.omega1 * np.sin(k) + params.omega2 * np.sin(2 * k)
    return v1, v2


def h1_bloch(k: float, params: DriveParams) -> Mat2C:
    v1, _ = half_period_vectors(k, params)
    return Mat2C.from_pauli(0, *(2 * v1))


def h2_bloch(k: float, params: DriveParams) -> Mat2C:
    _, v2 = half_period_vectors(k, params)
    return Mat2C.from_pauli(0, *(2 * v2))


def floquet_u_pauli(k, params: DriveParams) -> np.ndarray:
    """Pauli coefficients of ``U(k) = e^{-i H2/2} e^{-i H1/2}``."""
    v1, v2 = half_period_vectors(k, params)
    return pauli_mul(pauli_exp(v2, 1.0), pauli_exp(v1, 1.0))


def frame_pauli(s: int, k, params: DriveParams) -> np.ndarray:
    """Pauli coefficients of the symmetric-frame operator ``U_s(k)``.

    ``k`` may be an array; the result has shape ``k.shape + (4,)``.
    """
    _check_frame(s)
    v1, v2 = half_period_vectors(k, params)
    if s == 1:
        outer, inner = v2, v1
    else:
        outer, inner = v1, v2
    half = pauli_exp(outer, 0.5)
    return pauli_mul(pauli_mul(half, pauli_exp(inner, 1.0)), half)


def floquet_u(k: float, params: DriveParams) -> Mat2C:
    return Mat2C.from_pauli(*(complex(c) for c in floquet_u_pauli(k, params)))


def floquet_u_frame(s: int, k: float, params: DriveParams) -> Mat2C:
    return Mat2C.from_pauli(*(complex(c) for c in frame_pauli(s, k, params)))


def frame_loops(s: int, k, params: DriveParams, check_sz: bool = True):
    """Arrays ``(nx, ny, cosE)`` of frame ``s`` over momenta ``k``.

    Raises ``ArithmeticError`` if the sz component is not negligible.
    """
    p = frame_pauli(s, k, params)
    if check_sz:
        scale = np.maximum(1.0, np.max(np.abs(p[..., :3]), axis=-1))
        bad = np.abs(p[..., 3]) > SZ_TOLERANCE * scale
        if np.any(bad):
            raise ArithmeticError(
                f"frame {s} operator has a sz component "
                f"{np.max(np.abs(p[..., 3])):.3e}; sublattice symmetry broken"
            )
    # U = c0 I + c.sigma = cosE I - i n.sigma  =>  n = i c
    return 1j * p[..., 1], 1j * p[..., 2], p[..., 0]


def frame_components(s: int, k: float, params: DriveParams) -> FrameComponents:
    """Components ``n_sx, n_sy`` and ``cos E`` of ``U_s(k)``."""
    _check_frame(s)
    p = frame_pauli(s, k, params)
    scale = max(1.0, float(np.max(np.abs(p[:3]))))
    if abs(p[3]) > SZ_TOLERANCE * scale:
        raise ArithmeticError(f"frame {s} operator has sz component {abs(p[3]):.3e}")
    return FrameComponents(
        frame=s, nx=complex(1j * p[1]), ny=complex(1j * p[2]), cosE=complex(p[0]),
        nz=complex(1j * p[3]),
    )


def auxiliary_angles(k: float, params: DriveParams) -> AuxiliaryAngles:
    hx = params.mu + params.t1 * np.cos(k) + params.t2 * np.cos(2 * k)
    hy = params.omega1 * np.sin(k) + params.omega2 * np.sin(2 * k)
    return AuxiliaryAngles(hx=complex(hx), hy=complex(hy), k=float(k))


def separable_components(s: int, k, params: DriveParams):
    """Product-form components built from ``h_x``, ``h_y`` and ``gamma``.

    ``s = 1``: ``(sin hx cos(hy + i gamma), sin(hy + i gamma))``;
    ``s = 2``: ``(sin hx, cos hx sin(hy + i gamma))``.

    These are exact for a drive whose two steps are ``2 hx sx`` and
    ``2 (hy + i gamma) sy``, with the frame labels exchanged relative to
    :func:`frame_pauli`.  For the chain defined here that happens only at
    ``mu = 0`` and ``gamma = 0``; elsewhere :func:`frame_loops` is the
    authoritative evaluation.
    """
    _check_frame(s)
    k = np.asarray(k, dtype=float)
    gamma = gamma_of(params)
    hx = params.mu + params.t1 * np.cos(k) + params.t2 * np.cos(2 * k)
    hy = params.omega1 * np.sin(k) + params.omega2 * np.sin(2 * k)
    shifted = hy + 1j * gamma
    if s == 1:
        return np.sin(hx) * np.cos(shifted), np.sin(shifted)
    return np.sin(hx) + 0j, np.cos(hx) * np.sin(shifted)
