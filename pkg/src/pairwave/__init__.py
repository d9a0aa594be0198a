"""Two-particle interference and diffraction observables.

pairwave computes joint detection patterns for pairs of identical
particles (bosons or fermions) and their distinguishable-particle
reference curves, in three settings:

* free Gaussian wave packets behind a Gaussian aperture (``diffraction``),
* near-field propagation behind a periodic grating, including the planes
  where two-fermion detection is forbidden (``grating``),
* exchange-sensitive spatial correlation functions on a fixed plane
  (``correlation``).

Every closed-form result has an independent numerical cross-check built
from the ``oracle`` module (adaptive quadrature, seeded rejection
sampling, histogram comparison). The ``cli`` module exposes batch runs
producing CSV/JSON tables.
"""

from .core import (
    Axis,
    ScanTable,
    Statistics,
    WavePacket1D,
    exchange_ratio,
    joint_probability_generic,
    packet_amplitude,
    symmetrized_amplitude,
)
from .diffraction import PacketPair, detection_scan, joint_probability_closed
from .grating import (
    GratingSpec,
    MultiModeSpec,
    MultiModeValidity,
    NodalPlaneSet,
    PlaneWaveMode,
    intensity,
    multimode_coefficient,
    multimode_validity,
    nodal_planes,
    normalize_coefficients,
    pair_probability_on_plane,
    phase_mismatch,
    propagated_amplitude,
)
from .correlation import (
    CorrelationCurve,
    TermPhase,
    correlation_closed,
    correlation_curve,
    correlation_numeric,
    correlation_two_coefficient,
    free_correlation_reference,
    pair_probability_expanded,
    small_eta_asymptotics,
)
from .oracle import (
    ConvergenceError,
    HistogramReport,
    QuadratureResult,
    SampleBatch,
    histogram_compare,
    integrate,
    integrate_complex,
    sample_joint,
)

__version__ = "1.0.0"

__all__ = [
    "Axis",
    "ConvergenceError",
    "CorrelationCurve",
    "GratingSpec",
    "HistogramReport",
    "MultiModeSpec",
    "MultiModeValidity",
    "NodalPlaneSet",
    "PacketPair",
    "PlaneWaveMode",
    "QuadratureResult",
    "SampleBatch",
    "ScanTable",
    "Statistics",
    "TermPhase",
    "WavePacket1D",
    "correlation_closed",
    "correlation_curve",
    "correlation_numeric",
    "correlation_two_coefficient",
    "detection_scan",
    "exchange_ratio",
    "free_correlation_reference",
    "histogram_compare",
    "intensity",
    "integrate",
    "integrate_complex",
    "joint_probability_closed",
    "joint_probability_generic",
    "multimode_coefficient",
    "multimode_validity",
    "nodal_planes",
    "normalize_coefficients",
    "packet_amplitude",
    "pair_probability_expanded",
    "pair_probability_on_plane",
    "phase_mismatch",
    "propagated_amplitude",
    "sample_joint",
    "small_eta_asymptotics",
    "symmetrized_amplitude",
    "__version__",
]
