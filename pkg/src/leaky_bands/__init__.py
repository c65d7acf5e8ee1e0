"""Strong-coupling band structure of a delta interaction on a periodic planar curve."""

from .band_assembly import BandStructureResult, assemble_bands, gap_persistence_check
from .curve_geometry import (
    CurvatureProfile,
    check_assumptions,
    fourier_profile,
    period_vector,
    preset_profile,
    reconstruct_curve,
    sup_norms,
)
from .errors import AssumptionError, ConvergenceError, LeakyBandsError, PreconditionError, QuadratureError
from .fiber2d import FiberVariant, StripGrid, a_of_beta, bracketing_report, fiber_levels
from .gap_analysis import GapReport, curvature_criterion, gap_report, mathieu_gap_check
from .hill_floquet import HillOperatorSpec, band_table, comparison_operators, floquet_eigenvalues
from .straight_line import check_decay_assumptions, line_asymptotics, line_discrete_spectrum
from .transverse_delta import TransverseSpec, Variant, count_negative_modes, solve_transverse

__version__ = "0.1.0"

__all__ = [
    "BandStructureResult",
    "CurvatureProfile",
    "FiberVariant",
    "GapReport",
    "HillOperatorSpec",
    "StripGrid",
    "TransverseSpec",
    "Variant",
    "AssumptionError",
    "ConvergenceError",
    "LeakyBandsError",
    "PreconditionError",
    "QuadratureError",
    "a_of_beta",
    "assemble_bands",
    "band_table",
    "bracketing_report",
    "check_assumptions",
    "check_decay_assumptions",
    "comparison_operators",
    "count_negative_modes",
    "curvature_criterion",
    "fiber_levels",
    "floquet_eigenvalues",
    "fourier_profile",
    "gap_persistence_check",
    "gap_report",
    "line_asymptotics",
    "line_discrete_spectrum",
    "mathieu_gap_check",
    "period_vector",
    "preset_profile",
    "reconstruct_curve",
    "solve_transverse",
    "sup_norms",
]
