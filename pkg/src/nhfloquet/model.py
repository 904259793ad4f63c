"""Drive parameters and exact 2x2 complex matrix algebra.

Energies are dimensionless with hbar = T = 1.  A 2x2 matrix is carried
either as a :class:`Mat2C` value (scalar API) or, in the vectorised
engine, as an array of Pauli coefficients ``(..., 4)`` ordered
``(c0, cx, cy, cz)`` so that ``M = c0*I + cx*sx + cy*sy + cz*sz``.

Complex square roots use the principal branch (cut along the negative
real axis).  Nothing here depends on the branch: ``cos(e t)`` and
``sin(e t)/e`` are even in ``e``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, replace

import numpy as np

TWO_PI = 2.0 * math.pi

# below this |e t| the sin(e t)/e factor is taken from its Taylor series
_SINC_SERIES_CUTOFF = 1e-4

SIGMA_0 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
SIGMA_PLUS = (SIGMA_X + 1j * SIGMA_Y) / 2
SIGMA_MINUS = (SIGMA_X - 1j * SIGMA_Y) / 2


def reduce_angle(theta: float) -> float:
    """Map an angle into (0, 2*pi]."""
    r = math.fmod(theta, TWO_PI)
    if r <= 0.0:
        r += TWO_PI
    return r


@dataclass(frozen=True)
class DriveParams:
    """Parameters of the two-step quenched chain.

    ``gamma0`` and ``theta`` fix the intracell asymmetric amplitude
    ``gamma = gamma0 * exp(i theta)``.  ``t1``/``t2`` act during the first
    half period together with ``gamma``; ``mu``/``omega1``/``omega2``
    during the second.  The intercell hoppings carry no phase.
    """

    t1: float = 0.0
    t2: float = 0.0
    gamma0: float = 0.0
    theta: float = TWO_PI
    mu: float = 0.0
    omega1: float = 0.0
    omega2: float = 0.0
    period: float = 1.0

    def __post_init__(self):
        if self.period != 1.0:
            raise ValueError("the drive period is fixed at T = 1")
        if not self.gamma0 >= 0.0:
            raise ValueError(f"gamma0 must be >= 0, got {self.gamma0!r}")
        for name in ("t1", "t2", "mu", "omega1", "omega2"):
            value = getattr(self, name)
            if isinstance(value, complex):
                if value.imag != 0.0:
                    raise ValueError(f"{name} must be real, got {value!r}")
                value = value.real
            object.__setattr__(self, name, float(value))
        object.__setattr__(self, "gamma0", float(self.gamma0))
        object.__setattr__(self, "theta", reduce_angle(float(self.theta)))

    @classmethod
    def from_gamma(cls, gamma: complex, **kwargs) -> "DriveParams":
        """Build parameters from a resolved complex ``gamma``."""
        gamma = complex(gamma)
        theta = cmath.phase(gamma) if gamma != 0 else TWO_PI
        return cls(gamma0=abs(gamma), theta=theta, **kwargs)

    @property
    def gamma(self) -> complex:
        return gamma_of(self)

    def replace(self, **changes) -> "DriveParams":
        return replace(self, **changes)

    def with_gamma(self, gamma: complex) -> "DriveParams":
        gamma = complex(gamma)
        theta = cmath.phase(gamma) if gamma != 0 else self.theta
        return replace(self, gamma0=abs(gamma), theta=theta)

    def as_dict(self) -> dict:
        return {
            "t1": self.t1,
            "t2": self.t2,
            "gamma0": self.gamma0,
            "theta": self.theta,
            "mu": self.mu,
            "omega1": self.omega1,
            "omega2": self.omega2,
        }


def phase_factor(theta: float) -> complex:
    """``cos theta + i sin theta``, exact at multiples of pi/2.

    Keeps the theta = pi/2 chain Hermitian to the last bit.
    """
    quarter = theta / (math.pi / 2)
    q = round(quarter)
    if quarter == q:
        return (1 + 0j, 1j, -1 + 0j, -1j)[q % 4]
    return complex(math.cos(theta), math.sin(theta))


def gamma_of(params: DriveParams) -> complex:
    """Resolved complex amplitude ``gamma0 * (cos theta + i sin theta)``."""
    return params.gamma0 * phase_factor(params.theta)


@dataclass(frozen=True)
class Mat2C:
    """2x2 complex matrix ``[[a, b], [c, d]]``."""

    a: complex
    b: complex
    c: complex
    d: complex

    def __post_init__(self):
        for name in ("a", "b", "c", "d"):
            object.__setattr__(self, name, complex(getattr(self, name)))

    @classmethod
    def from_array(cls, m) -> "Mat2C":
        m = np.asarray(m, dtype=complex)
        if m.shape != (2, 2):
            raise ValueError(f"expected a 2x2 matrix, got shape {m.shape}")
        return cls(complex(m[0, 0]), complex(m[0, 1]), complex(m[1, 0]), complex(m[1, 1]))

    @classmethod
    def from_pauli(cls, c0, cx, cy, cz) -> "Mat2C":
        return cls(c0 + cz, cx - 1j * cy, cx + 1j * cy, c0 - cz)

    @classmethod
    def identity(cls) -> "Mat2C":
        return cls(1, 0, 0, 1)

    def __array__(self, dtype=None, copy=None):
        out = np.array([[self.a, self.b], [self.c, self.d]], dtype=complex)
        return out if dtype is None else out.astype(dtype)

    @property
    def array(self) -> np.ndarray:
        return np.asarray(self)

    def __matmul__(self, other: "Mat2C") -> "Mat2C":
        return Mat2C(
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def det(self) -> complex:
        return self.a * self.d - self.b * self.c

    def trace(self) -> complex:
        return self.a + self.d

    def inverse(self) -> "Mat2C":
        det = self.det()
        return Mat2C(self.d / det, -self.b / det, -self.c / det, self.a / det)

    def dagger(self) -> "Mat2C":
        return Mat2C(
            self.a.conjugate(), self.c.conjugate(), self.b.conjugate(), self.d.conjugate()
        )

    def pauli(self) -> tuple[complex, complex, complex, complex]:
        return pauli_decompose(self)

    def max_abs_diff(self, other: "Mat2C") -> float:
        return float(np.max(np.abs(self.array - other.array)))


def pauli_decompose(m: Mat2C) -> tuple[complex, complex, complex, complex]:
    """Coefficients ``(c0, cx, cy, cz)`` with ``M = c0 I + c.sigma``."""
    return (
        (m.a + m.d) / 2,
        (m.b + m.c) / 2,
        1j * (m.b - m.c) / 2,
        (m.a - m.d) / 2,
    )


def pauli_exp(c: np.ndarray, t) -> np.ndarray:
    """Pauli coefficients of ``exp(-i t c.sigma)`` for ``c`` of shape (..., 3).

    Closed form ``cos(e t) I - i sin(e t)/e c.sigma`` with ``e**2 = c.c``;
    the ratio is expanded in a series for ``|e t| < 1e-4``.
    """
    c = np.asarray(c, dtype=complex)
    eps = np.sqrt(np.sum(c * c, axis=-1))
    x = eps * t
    small = np.abs(x) < _SINC_SERIES_CUTOFF
    safe_eps = np.where(small, 1.0, eps)
    x2 = x * x
    ratio = np.where(small, t * (1.0 - x2 / 6.0 + x2 * x2 / 120.0), np.sin(x) / safe_eps)
    out = np.empty(c.shape[:-1] + (4,), dtype=complex)
    out[..., 0] = np.cos(x)
    out[..., 1:] = -1j * ratio[..., None] * c
    return out


def pauli_mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    """Product of two matrices given by Pauli coefficients.

    Uses ``(a.sigma)(b.sigma) = (a.b) I + i (a x b).sigma``.
    """
    p0, pv = p[..., 0], p[..., 1:]
    q0, qv = q[..., 0], q[..., 1:]
    out = np.empty(np.broadcast_shapes(p.shape, q.shape), dtype=complex)
    out[..., 0] = p0 * q0 + np.sum(pv * qv, axis=-1)
    out[..., 1:] = p0[..., None] * qv + q0[..., None] * pv + 1j * np.cross(pv, qv)
    return out


def pauli_to_matrix(p: np.ndarray) -> np.ndarray:
    """Dense ``(..., 2, 2)`` matrices from Pauli coefficients."""
    c0, cx, cy, cz = p[..., 0], p[..., 1], p[..., 2], p[..., 3]
    m = np.empty(p.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = c0 + cz
    m[..., 0, 1] = cx - 1j * cy
    m[..., 1, 0] = cx + 1j * cy
    m[..., 1, 1] = c0 - cz
    return m


def expm_traceless(cx: complex, cy: complex, cz: complex, t: float) -> Mat2C:
    """``exp(-i t (cx sx + cy sy + cz sz))`` in closed form."""
    if not math.isfinite(t):
        raise ValueError("t must be finite")
    p = pauli_exp(np.array([cx, cy, cz], dtype=complex), t)
    return Mat2C.from_pauli(*(complex(v) for v in p))
