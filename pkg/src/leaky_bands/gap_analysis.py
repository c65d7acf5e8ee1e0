"""Spectral gaps of Hill operators: Fourier criterion, Mathieu bound, gap search.

The criterion certifies that the n-th gap of ``-d^2/dx^2 + V`` on a period of
length ``a`` is open when the n-th Fourier harmonic of V dominates the rest:

    0 < rho_n = sqrt(a_n^2 + b_n^2) < 12 pi^2 n^2 / a^2,
    sup |V - b_0 - a_n sin(2 pi n x / a) - b_n cos(2 pi n x / a)| < rho_n / 4.

Band and gap lengths follow the Hill edge pattern: the j-th band runs between
mu_j(0) and mu_j(pi), and gap j sits at theta = pi for odd j and at theta = 0
for even j.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import PreconditionError
from .hill_floquet import FloquetBandTable, HillOperatorSpec, floquet_eigenvalues

__all__ = [
    "FourierDecomposition",
    "Verdict",
    "GapCertificate",
    "GapReport",
    "MathieuCheck",
    "fourier_decompose",
    "check_gap_criterion",
    "curvature_criterion",
    "periodic_antiperiodic_eigenvalues",
    "mathieu_gap_check",
    "mathieu_threshold",
    "gap_report",
]

NOT_FOUND = "not found in computed range"


@dataclass(frozen=True)
class FourierDecomposition:
    """Real Fourier series of a periodic function on (0, period).

    ``a[j]`` multiplies sin(2 pi j x / period) (a[0] is unused and zero),
    ``b[j]`` multiplies cos(2 pi j x / period).  ``residual_sup[n]`` is the sup
    over a 4096-point grid of |V - b_0 - a_n sin - b_n cos|.
    """

    period: float
    a: np.ndarray
    b: np.ndarray
    residual_sup: np.ndarray
    mean_square: float

    @property
    def max_index(self) -> int:
        return len(self.a) - 1

    def amplitude(self, n: int) -> float:
        return float(math.hypot(self.a[n], self.b[n]))

    def parseval_defect(self) -> float:
        """mean(V^2) minus b_0^2 + sum (a_j^2 + b_j^2) / 2."""
        return self.mean_square - (self.b[0] ** 2 + 0.5 * float(np.sum(self.a[1:] ** 2 + self.b[1:] ** 2)))


def fourier_decompose(V, period: float, max_index: int, residual_grid: int = 4096) -> FourierDecomposition:
    if max_index < 1:
        raise ValueError("max_index must be >= 1")
    M = 8 * max_index
    x = period * np.arange(M) / M
    c = np.fft.rfft(np.asarray(V(x), dtype=float) + np.zeros(M)) / M
    a = np.zeros(max_index + 1)
    b = np.zeros(max_index + 1)
    b[0] = c[0].real
    b[1:] = 2.0 * c[1:max_index + 1].real
    a[1:] = -2.0 * c[1:max_index + 1].imag

    xr = period * np.arange(residual_grid) / residual_grid
    vr = np.asarray(V(xr), dtype=float) + np.zeros(residual_grid)
    w = 2.0 * np.pi * xr / period
    res = np.empty(max_index + 1)
    res[0] = np.max(np.abs(vr - b[0]))
    for n in range(1, max_index + 1):
        res[n] = np.max(np.abs(vr - b[0] - a[n] * np.sin(n * w) - b[n] * np.cos(n * w)))
    return FourierDecomposition(float(period), a, b, res, float(np.mean(vr * vr)))


class Verdict(enum.Enum):
    CRITERION_HOLDS = "CriterionHolds"
    AMPLITUDE_ZERO = "AmplitudeZero"
    AMPLITUDE_TOO_LARGE = "AmplitudeTooLarge"
    RESIDUAL_TOO_LARGE = "ResidualTooLarge"


@dataclass(frozen=True)
class GapCertificate:
    n: int
    rho: float
    upper_bound: float
    residual_sup: float
    verdict: Verdict

    @property
    def holds(self) -> bool:
        return self.verdict is Verdict.CRITERION_HOLDS


def check_gap_criterion(decomp: FourierDecomposition, n: int) -> GapCertificate:
    """Pure arithmetic on the coefficients; no eigenvalue is computed."""
    if not 1 <= n <= decomp.max_index:
        raise ValueError(f"n must lie in 1..{decomp.max_index}")
    rho = decomp.amplitude(n)
    upper = 12.0 * math.pi**2 * n * n / decomp.period**2
    res = float(decomp.residual_sup[n])
    # FFT roundoff on an absent harmonic is ~1e-17 of the coefficient scale
    scale = 1.0 + float(np.max(np.abs(decomp.b))) + float(np.max(np.abs(decomp.a)))
    if rho <= 1e-12 * scale:
        verdict = Verdict.AMPLITUDE_ZERO
    elif rho >= upper:
        verdict = Verdict.AMPLITUDE_TOO_LARGE
    elif res >= rho / 4.0:
        verdict = Verdict.RESIDUAL_TOO_LARGE
    else:
        verdict = Verdict.CRITERION_HOLDS
    return GapCertificate(n, rho, upper, res, verdict)


def curvature_criterion(profile, max_index: int = 12) -> list[GapCertificate]:
    """Certificates for gamma^2 / 4 on one period, n = 1..max_index."""
    decomp = fourier_decompose(lambda s: 0.25 * profile.gamma(s) ** 2, profile.L, max_index)
    return [check_gap_criterion(decomp, n) for n in range(1, max_index + 1)]


def periodic_antiperiodic_eigenvalues(V, period: float, count: int, n_modes: int = 128):
    """(kappa_j, nu_j): lowest ``count`` periodic and antiperiodic eigenvalues."""
    spec = HillOperatorSpec(V, period, 0.0, 1.0)
    kappa = floquet_eigenvalues(spec, n_modes, count)
    nu = floquet_eigenvalues(spec.at(math.pi), n_modes, count)
    return kappa, nu


def mathieu_threshold(a: float) -> float:
    return 6.0 * math.pi**2 / a**2


@dataclass(frozen=True)
class MathieuCheck:
    alpha: float
    gap: float
    bound: float
    passed: bool


class _Mathieu:
    def __init__(self, alpha, a):
        self.alpha, self.a = alpha, a

    def __call__(self, x):
        return 2.0 * self.alpha * np.cos(2.0 * np.pi * np.asarray(x) / self.a)


def mathieu_gap_check(alpha_grid, a: float, n_modes: int = 128, slack: float = 1e-6) -> list[MathieuCheck]:
    """Check m_2 - m_1 >= |alpha| for -d^2/dx^2 + 2 alpha cos(2 pi x / a), antiperiodic."""
    limit = mathieu_threshold(a)
    out = []
    for alpha in alpha_grid:
        alpha = float(alpha)
        if not abs(alpha) < limit:
            raise PreconditionError(f"|alpha| = {abs(alpha)} must be below 6 pi^2 / a^2 = {limit}")
        m = floquet_eigenvalues(HillOperatorSpec(_Mathieu(alpha, a), a, math.pi), n_modes, 2)
        gap = float(m[1] - m[0])
        out.append(MathieuCheck(alpha, gap, abs(alpha), gap >= abs(alpha) - slack))
    return out


@dataclass
class GapReport:
    B: np.ndarray
    G: np.ndarray
    band_lo: np.ndarray
    band_hi: np.ndarray
    first_open_gap: int | None
    gap_tolerance: float
    edge_violation: float
    criterion: list[GapCertificate] = field(default_factory=list)

    @property
    def searched_up_to(self) -> int:
        return len(self.G)

    @property
    def edges_consistent(self) -> bool:
        return self.edge_violation <= 1e-7

    def to_dict(self):
        return {
            "bands": [
                {"j": j + 1, "B": float(self.B[j]), "lo": float(self.band_lo[j]), "hi": float(self.band_hi[j])}
                for j in range(len(self.B))
            ],
            "gaps": [{"j": j + 1, "G": float(self.G[j])} for j in range(len(self.G))],
            "first_open_gap": self.first_open_gap if self.first_open_gap is not None else NOT_FOUND,
            "criterion": [{"n": c.n, "verdict": c.verdict.value} for c in self.criterion],
            "gap_tolerance": self.gap_tolerance,
            "searched_up_to": self.searched_up_to,
        }


def gap_report(table: FloquetBandTable, gap_tolerance: float | None = None, criterion=()) -> GapReport:
    """Band and gap lengths from the exact theta = 0 and theta = pi columns."""
    z, p = table.at_zero, table.at_pi
    J = table.J
    odd = (np.arange(J) % 2) == 0  # j = 1, 3, ... at 0-based even positions
    lo = np.where(odd, z, p)
    hi = np.where(odd, p, z)
    # gap j lies at theta = pi for odd j, at theta = 0 for even j
    G = np.where(odd[:-1], p[1:] - p[:-1], z[1:] - z[:-1])
    if gap_tolerance is None:
        everything = np.concatenate([z, p, table.eigenvalues.ravel()])
        gap_tolerance = 1e-8 * (1.0 + float(np.ptp(everything)))
    open_idx = np.nonzero(G > gap_tolerance)[0]
    first = int(open_idx[0]) + 1 if open_idx.size else None
    if table.eigenvalues.size:
        grid_min = table.eigenvalues.min(axis=0)
        grid_max = table.eigenvalues.max(axis=0)
        violation = float(max(0.0, np.max(lo - grid_min), np.max(grid_max - hi)))
    else:
        violation = 0.0
    return GapReport(hi - lo, G, lo, hi, first, float(gap_tolerance), violation, list(criterion))
