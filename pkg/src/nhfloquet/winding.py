"""Frame winding numbers and the invariants W0, W_pi.

For complex components the integrand of the frame winding equals
``(1/2i) d/dk [log(nx + i ny) - log(nx - i ny)]``, so

    W_s = (wind(nx + i ny) - wind(nx - i ny)) / 2

with ``wind`` the number of turns of a closed loop around the origin.
Turns are counted by summing principal phase increments between
neighbouring samples; the k grid is doubled until every increment is
below pi/2, which makes the count exact for a loop that stays away from
the origin.  ``W_s`` is half-integral when the two loops do not wind
oppositely; such values are returned as-is.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np

from .bloch import frame_loops
from .errors import GapClosure, NonConvergence
from .model import DriveParams

GAP_TOLERANCE = 1e-8
DEFAULT_SAMPLES = 4096
MAX_SAMPLES = 2**20
MAX_STEP = math.pi / 2


@dataclass(frozen=True)
class WindingResult:
    w1: Fraction
    w2: Fraction
    w0: Fraction
    wpi: Fraction
    min_modulus: float
    samples_used: int
    w1_raw: float = math.nan
    w2_raw: float = math.nan

    @property
    def is_integral(self) -> bool:
        return all(w.denominator == 1 for w in (self.w1, self.w2, self.w0, self.wpi))

    def as_dict(self) -> dict:
        return {
            "W0": fraction_json(self.w0),
            "Wpi": fraction_json(self.wpi),
            "W1": fraction_json(self.w1),
            "W2": fraction_json(self.w2),
            "min_modulus": self.min_modulus,
            "samples_used": self.samples_used,
            "integral": self.is_integral,
        }


def fraction_json(x: Fraction):
    """Integers stay ints; anything else becomes the string ``"p/q"``."""
    return int(x) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def k_grid(n: int) -> np.ndarray:
    """``n`` equispaced momenta covering one Brillouin zone, starting at -pi."""
    return -math.pi + 2 * math.pi * np.arange(n) / n


def phase_steps(values: np.ndarray) -> np.ndarray:
    """Principal phase increments ``arg(f[j+1]/f[j])`` along a periodic loop.

    Operates along the last axis; the final step closes the loop.
    """
    u = values / np.abs(values)
    return np.angle(np.roll(u, -1, axis=-1) * np.conj(u))


def _check_gap(values, k, tol):
    mod = np.abs(values)
    idx = np.unravel_index(np.argmin(mod), mod.shape)
    smallest = float(mod[idx])
    if not smallest > tol:
        at = float(k[idx[-1]]) if k is not None else None
        where = f" at k = {at:.6g}" if at is not None else ""
        raise GapClosure(f"|f| = {smallest:.3e} <= {tol:g}{where}", k=at, modulus=smallest)
    return smallest


def refine_loops(
    sampler: Callable[[np.ndarray], np.ndarray],
    samples: int = DEFAULT_SAMPLES,
    gap_tolerance: float = GAP_TOLERANCE,
    max_samples: int = MAX_SAMPLES,
):
    """Sample loops on a doubling k grid until all phase steps are < pi/2.

    ``sampler(k)`` returns an array of shape ``(m, len(k))`` holding ``m``
    loops.  Returns ``(steps, min_modulus, n)``.
    """
    n = int(samples)
    if n < 2:
        raise ValueError("need at least 2 samples")
    while True:
        k = k_grid(n)
        values = np.atleast_2d(sampler(k))
        smallest = _check_gap(values, k, gap_tolerance)
        steps = phase_steps(values)
        worst = np.abs(steps)
        if float(worst.max()) < MAX_STEP:
            return steps, smallest, n
        if n * 2 > max_samples:
            j = int(np.unravel_index(np.argmax(worst), worst.shape)[-1])
            raise NonConvergence(
                f"phase step {float(worst.max()):.3f} >= pi/2 with {n} samples",
                k=float(k[j]), samples=n,
            )
        n *= 2


def loop_turns(steps: np.ndarray) -> np.ndarray:
    """Total phase change / 2 pi of each loop, before rounding."""
    return np.sum(steps, axis=-1) / (2 * math.pi)


def loop_winding(
    f,
    samples: int = 64,
    gap_tolerance: float = GAP_TOLERANCE,
    max_samples: int = MAX_SAMPLES,
) -> int:
    """Number of times a closed loop winds around the origin.

    ``f`` is either a callable evaluated on ``k_grid(n)`` (refined as
    needed) or an array of samples along a periodic loop.  A repeated
    closing sample is harmless.  Arrays cannot be refined, so an
    undersampled array raises :class:`NonConvergence`.
    """
    if callable(f):
        steps, _, _ = refine_loops(lambda k: f(k)[None, :], samples, gap_tolerance, max_samples)
    else:
        values = np.asarray(f, dtype=complex)
        _check_gap(values, None, gap_tolerance)
        steps = phase_steps(values)
        if float(np.abs(steps).max()) >= MAX_STEP:
            raise NonConvergence("array loop undersampled: phase step >= pi/2", samples=len(values))
    return int(round(float(loop_turns(steps).ravel()[0])))


def _frame(s, params, samples, gap_tolerance, max_samples):
    def sampler(k):
        nx, ny, _ = frame_loops(s, k, params)
        return np.stack([nx + 1j * ny, nx - 1j * ny])

    try:
        steps, smallest, n = refine_loops(sampler, samples, gap_tolerance, max_samples)
    except (GapClosure, NonConvergence) as exc:
        exc.args = (f"frame {s}: {exc.args[0]}",)
        raise
    turns = loop_turns(steps)
    plus, minus = (int(round(float(t))) for t in turns)
    raw = float(turns[0] - turns[1]) / 2
    return Fraction(plus - minus, 2), raw, smallest, n


def frame_winding(
    s: int,
    params: DriveParams,
    samples: int = DEFAULT_SAMPLES,
    gap_tolerance: float = GAP_TOLERANCE,
    max_samples: int = MAX_SAMPLES,
) -> Fraction:
    """Winding number ``W_s`` of symmetric frame ``s`` over k in (-pi, pi]."""
    return _frame(s, params, samples, gap_tolerance, max_samples)[0]


def invariants(
    params: DriveParams,
    samples: int = DEFAULT_SAMPLES,
    gap_tolerance: float = GAP_TOLERANCE,
    max_samples: int = MAX_SAMPLES,
) -> WindingResult:
    """``W0 = (W1 + W2)/2`` and ``W_pi = (W1 - W2)/2`` in exact arithmetic."""
    w1, r1, m1, n1 = _frame(1, params, samples, gap_tolerance, max_samples)
    w2, r2, m2, n2 = _frame(2, params, samples, gap_tolerance, max_samples)
    return WindingResult(
        w1=w1,
        w2=w2,
        w0=(w1 + w2) / 2,
        wpi=(w1 - w2) / 2,
        min_modulus=min(m1, m2),
        samples_used=max(n1, n2),
        w1_raw=r1,
        w2_raw=r2,
    )
