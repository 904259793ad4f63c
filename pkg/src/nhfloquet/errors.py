"""Exception and warning types raised by the library."""


class FloquetError(Exception):
    """Base class for all computation failures."""


class GapClosure(FloquetError):
    """A loop function came within the gap tolerance of the origin.

    The momentum and modulus of the offending sample are kept so callers
    can report where the gap closed.
    """

    def __init__(self, message, k=None, modulus=None):
        super().__init__(message)
        self.k = k
        self.modulus = modulus


class NonConvergence(FloquetError):
    """Adaptive k-grid refinement hit its sample cap."""

    def __init__(self, message, k=None, samples=None):
        super().__init__(message)
        self.k = k
        self.samples = samples


class NumericalOverflow(FloquetError):
    """A matrix exponential produced non-finite entries."""


class InvalidSize(FloquetError, ValueError):
    """Chain too short for range-2 hopping."""


class SpecError(FloquetError, ValueError):
    """Malformed sweep specification or binding."""


class DegenerateClassification(UserWarning):
    """Edge-mode counting is ambiguous (odd count or bulk states near a window)."""
