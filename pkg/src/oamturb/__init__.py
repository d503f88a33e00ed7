"""Detection probabilities of orbital-angular-momentum photon states
behind Kolmogorov turbulence.

Two independent computation routes are exposed: deterministic tensor
quadrature of the mode-overlap integrals (probabilities) and a
phase-screen Monte Carlo oracle (phase_screen_mc).  They share only
the mode and turbulence definitions, so one validates the other.
"""

from .lg_modes import LGModeSpec, ModeIndex, radial_amplitude, radial_orthonormality_defect
from .phase_screen_mc import (
    GridTooCoarse,
    McEstimate,
    PhaseScreen,
    SeparationOutOfRange,
    empirical_structure_function,
    generate_screen,
    load_screen,
    mc_joint_probability,
    save_screen,
)
from .probabilities import (
    ChannelSpec,
    DegenerateBaseline,
    DegenerateFit,
    InvalidChannel,
    NoInteriorPeak,
    PeakResult,
    ProbabilityPoint,
    ScalingFit,
    family_baseline,
    find_peak,
    joint_probability,
    normalize_family,
    normalized_probability,
    peak_scaling,
    probability,
    signal_probability,
    single_photon_probability,
    sweep,
)
from .quadrature import (
    GridRule,
    NonConvergence,
    QuadratureConfig,
    gauss_legendre,
    integrate_product_2d,
    integrate_product_3d,
)
from .special_functions import PolyIndex, assoc_laguerre, laguerre_coefficients, log_factorial
from .turbulence import TurbulenceParams, chord_distance, coherence, structure_function

__version__ = "0.1.0"

__all__ = [
    "ChannelSpec",
    "DegenerateBaseline",
    "DegenerateFit",
    "GridRule",
    "GridTooCoarse",
    "InvalidChannel",
    "LGModeSpec",
    "McEstimate",
    "ModeIndex",
    "NoInteriorPeak",
    "NonConvergence",
    "PeakResult",
    "PhaseScreen",
    "PolyIndex",
    "ProbabilityPoint",
    "QuadratureConfig",
    "ScalingFit",
    "SeparationOutOfRange",
    "TurbulenceParams",
    "assoc_laguerre",
    "chord_distance",
    "coherence",
    "empirical_structure_function",
    "family_baseline",
    "find_peak",
    "gauss_legendre",
    "generate_screen",
    "integrate_product_2d",
    "integrate_product_3d",
    "joint_probability",
    "laguerre_coefficients",
    "load_screen",
    "log_factorial",
    "mc_joint_probability",
    "normalize_family",
    "normalized_probability",
    "peak_scaling",
    "probability",
    "radial_amplitude",
    "radial_orthonormality_defect",
    "save_screen",
    "signal_probability",
    "single_photon_probability",
    "structure_function",
    "sweep",
    "__version__",
]
