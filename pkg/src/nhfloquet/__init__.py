"""Floquet invariants of a periodically quenched non-Hermitian long-range chain."""

from .errors import (
    DegenerateClassification,
    FloquetError,
    GapClosure,
    InvalidSize,
    NonConvergence,
    NumericalOverflow,
    SpecError,
)
from .model import DriveParams, Mat2C, expm_traceless, gamma_of, pauli_decompose
from .bloch import (
    FrameComponents,
    floquet_u,
    floquet_u_frame,
    frame_components,
    h1_bloch,
    h2_bloch,
)
from .winding import WindingResult, frame_winding, invariants, loop_winding
from .realspace import (
    ChainMatrices,
    QuasiSpectrum,
    build_chain,
    open_floquet,
    quasi_spectrum,
    verify_bulk_boundary,
)
from .sweep import Axis, Binding, PhaseDiagram, SweepSpec, render_heatmap, run_sweep, theta_family

__version__ = "0.1.0"
