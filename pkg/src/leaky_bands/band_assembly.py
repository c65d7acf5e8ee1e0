"""Strong-coupling band structure: -beta^2/4 plus the Hill bands, and gap persistence."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .curve_geometry import CurvatureProfile, check_assumptions, sup_norms
from .errors import AssumptionError
from .fiber2d import FiberVariant, StripGrid, a_of_beta, check_fiber_preconditions, fiber_levels
from .gap_analysis import GapReport, gap_report
from .hill_floquet import FloquetBandTable, band_table

__all__ = [
    "BandStructureResult",
    "GapPersistenceRow",
    "assemble_bands",
    "gap_persistence_check",
    "ESSENTIAL_BANNER",
]

ESSENTIAL_BANNER = "each fiber has essential spectrum [0, inf); it is not computed"


@dataclass
class BandStructureResult:
    beta: float
    a: float
    table: FloquetBandTable
    lambda_hat: np.ndarray  # grid rows x J
    lambda_zero: np.ndarray
    lambda_pi: np.ndarray
    gaps: GapReport

    @property
    def theta_grid(self) -> np.ndarray:
        return self.table.theta_grid

    @property
    def bands(self) -> np.ndarray:
        """[min, max] of each shifted band over the grid and both edges."""
        allv = np.vstack([self.lambda_hat, self.lambda_zero, self.lambda_pi])
        return np.stack([allv.min(axis=0), allv.max(axis=0)], axis=1)

    @property
    def gap_intervals(self) -> list[tuple[int, float, float]]:
        b = self.bands
        tol = self.gaps.gap_tolerance
        return [(j + 1, float(b[j, 1]), float(b[j + 1, 0])) for j in range(len(b) - 1) if b[j + 1, 0] - b[j, 1] > tol]

    def rows(self):
        q = 0.25 * self.beta**2
        return [(t, row - q) for t, row in self.table.rows()]

    def to_dict(self):
        return {
            "beta": self.beta,
            "a": self.a,
            "bands": [{"j": j + 1, "lo": float(lo), "hi": float(hi)} for j, (lo, hi) in enumerate(self.bands)],
            "gaps": [{"j": j, "lo": lo, "hi": hi} for j, lo, hi in self.gap_intervals],
            "gap_limits": [{"j": j + 1, "G": float(g)} for j, g in enumerate(self.gaps.G)],
            "essential_spectrum": ESSENTIAL_BANNER,
        }


def assemble_bands(
    profile: CurvatureProfile,
    beta: float,
    theta_count: int = 65,
    J: int = 8,
    n_modes: int = 128,
    jobs: int = 1,
    table: FloquetBandTable | None = None,
) -> BandStructureResult:
    """lambda_n(beta, theta) ~ -beta^2/4 + mu_n(theta); the assumptions are checked at a(beta)."""
    a = a_of_beta(beta)
    report = check_assumptions(profile, a)
    if not report.all_passed:
        raise AssumptionError(f"assumptions {report.failed()} fail at a(beta) = {a:.6g}", report)
    table = band_table(profile, theta_count, J, n_modes, jobs) if table is None else table
    q = 0.25 * beta**2
    return BandStructureResult(
        beta=float(beta), a=a, table=table,
        lambda_hat=table.eigenvalues - q,
        lambda_zero=table.at_zero - q,
        lambda_pi=table.at_pi - q,
        gaps=gap_report(table),
    )


@dataclass(frozen=True)
class GapPersistenceRow:
    beta: float
    fiber_gap: float
    limit: float
    residual: float
    envelope: float  # beta^-1 log(beta)


def gap_persistence_check(
    profile: CurvatureProfile,
    betas,
    n: int,
    grid: StripGrid = StripGrid(),
    n_modes: int = 128,
) -> list[GapPersistenceRow]:
    """Fiber gap min_theta kappa_{n+1} - max_theta kappa_n at theta in {0, pi} against G_n."""
    limit = float(gap_report(band_table(profile, 8, max(n + 1, 2), n_modes)).G[n - 1])
    norms = sup_norms(profile)
    rows = []
    for beta in betas:
        a = check_fiber_preconditions(profile, beta, norms=norms)
        lev = [fiber_levels(profile, a, beta, t, FiberVariant.PLUS, grid, n + 1, norms).values for t in (0.0, math.pi)]
        gap = min(v[n] for v in lev) - max(v[n - 1] for v in lev)
        rows.append(GapPersistenceRow(float(beta), float(gap), limit, float(abs(gap - limit)), math.log(beta) / beta))
    return rows
