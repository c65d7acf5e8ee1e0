"""Floquet eigenvalues of one-dimensional periodic Schroedinger operators.

The operator ``-c d^2/ds^2 + V(s)`` on (0, L) with u(L) = e^{i theta} u(0) is
discretized by Galerkin projection onto the quasi-periodic plane waves
``exp(i (2 pi k + theta) s / L) / sqrt(L)``, |k| <= n_modes.  In this basis the
kinetic part is diagonal and the potential is a Toeplitz matrix of its Fourier
coefficients, so for smooth potentials the eigenvalues converge spectrally.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.linalg

from .curve_geometry import CurvatureProfile, sup_norms
from .errors import ConvergenceError, PreconditionError

__all__ = [
    "HillOperatorSpec",
    "FloquetBandTable",
    "curvature_potential",
    "hill_spec",
    "assemble_hill",
    "floquet_eigenvalues",
    "band_table",
    "comparison_operators",
    "comparison_potentials",
]

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class HillOperatorSpec:
    potential: Callable[[np.ndarray], np.ndarray]
    L: float
    theta: float = 0.0
    kinetic_prefactor: float = 1.0

    def __post_init__(self):
        if not self.kinetic_prefactor > 0:
            raise ValueError("kinetic_prefactor must be positive")
        if not self.L > 0:
            raise ValueError("L must be positive")

    def at(self, theta: float) -> "HillOperatorSpec":
        return HillOperatorSpec(self.potential, self.L, float(theta), self.kinetic_prefactor)


class _CurvaturePotential:
    """s -> -gamma(s)^2 / 4."""

    def __init__(self, profile):
        self.profile = profile

    def __call__(self, s):
        g = self.profile.gamma(s)
        return -0.25 * g * g


def curvature_potential(profile: CurvatureProfile):
    return _CurvaturePotential(profile)


def hill_spec(profile: CurvatureProfile, theta: float = 0.0) -> HillOperatorSpec:
    """Spec of the comparison operator -d^2/ds^2 - gamma^2/4."""
    if not profile.periodic:
        raise ValueError("Hill operator needs a periodic profile")
    return HillOperatorSpec(curvature_potential(profile), profile.L, theta, 1.0)


def _reduced_theta(theta):
    # map to (-pi, pi] so that theta and 2 pi - theta give mirror-image bases
    t = math.remainder(float(theta), TWO_PI)
    return math.pi if t == -math.pi else t


def potential_fourier(potential, L, n_max, tail_check=True):
    """Complex Fourier coefficients v_m, |m| <= n_max, of an L-periodic potential."""
    M = 2 * n_max + 4
    s = L * np.arange(M) / M
    vals = np.asarray(potential(s), dtype=float) + np.zeros(M)
    if not np.all(np.isfinite(vals)):
        raise ConvergenceError("potential is not finite on the sampling grid")
    coef = np.fft.fft(vals) / M
    if tail_check and n_max >= 16:
        top = np.abs(coef[n_max - n_max // 8: n_max + 1]).max()
        if top > 1e-6 * (1.0 + np.abs(coef).max()):
            raise ConvergenceError(
                f"potential Fourier coefficients not converged (tail {top:.2e}); "
                "input is not smooth enough for this n_modes"
            )
    return coef, M


def assemble_hill(spec: HillOperatorSpec, n_modes: int, _coef=None) -> np.ndarray:
    """Dense Hermitian Galerkin matrix of size 2 n_modes + 1."""
    if n_modes < 1:
        raise ValueError("n_modes must be >= 1")
    coef, M = _coef if _coef is not None else potential_fourier(spec.potential, spec.L, 2 * n_modes)
    k = np.arange(-n_modes, n_modes + 1)
    q = (TWO_PI * k + _reduced_theta(spec.theta)) / spec.L
    H = coef[(k[:, None] - k[None, :]) % M]
    H = H + np.diag(spec.kinetic_prefactor * q * q)
    return H


def floquet_eigenvalues(spec: HillOperatorSpec, n_modes: int = 128, count: int | None = None, _coef=None):
    """Lowest ``count`` eigenvalues, ascending, with multiplicity."""
    coef = _coef if _coef is not None else potential_fourier(spec.potential, spec.L, 2 * n_modes)
    # the potential mean is split off before the kinetic diagonal is added and
    # restored at the end, so a constant shift never meets the large k^2 entries
    v0 = float(coef[0][0].real)
    centred = coef[0].copy()
    centred[0] -= v0
    H = assemble_hill(spec, n_modes, (centred, coef[1]))
    if count is not None and count > H.shape[0]:
        raise ValueError("count exceeds the matrix size")
    try:
        if count is None:
            return np.linalg.eigvalsh(H) + v0
        # a few guard vectors keep the top requested Ritz value clear of the subspace edge
        m = min(count + 4, H.shape[0])
        _, X = scipy.linalg.eigh(H, subset_by_index=[0, m - 1], driver="evr")
        # LAPACK's absolute error is eps*||H||, dominated by the large kinetic
        # diagonal.  Rayleigh-Ritz on the (re-orthonormalized: MRRR vectors of
        # close pairs drift) subspace, then one Rayleigh quotient per Ritz vector,
        # brings each level to roughly eps*mu_j
        X = np.linalg.qr(X)[0]
        _, V = np.linalg.eigh(X.conj().T @ (H @ X))
        Y = X @ V[:, :count]
        w = np.sort(np.real(np.sum(Y.conj() * (H @ Y), axis=0)) / np.sum(np.abs(Y) ** 2, axis=0))
    except np.linalg.LinAlgError as exc:
        raise ConvergenceError(f"Hermitian eigensolver failed: {exc}; cond ~ {np.linalg.cond(H):.2e}") from exc
    return w + v0


@dataclass
class FloquetBandTable:
    theta_grid: np.ndarray
    eigenvalues: np.ndarray  # shape (len(theta_grid), J)
    edge_values: dict  # {0.0: array(J), pi: array(J)}
    L: float

    @property
    def J(self) -> int:
        return self.eigenvalues.shape[1]

    @property
    def at_zero(self) -> np.ndarray:
        return self.edge_values[0.0]

    @property
    def at_pi(self) -> np.ndarray:
        return self.edge_values[math.pi]

    def rows(self):
        """(theta, mu_1..mu_J) rows, grid plus the exact pi edge, sorted by theta."""
        out = [(float(t), row) for t, row in zip(self.theta_grid, self.eigenvalues)]
        if not np.any(self.theta_grid == math.pi):
            out.append((math.pi, self.at_pi))
        out.sort(key=lambda r: r[0])
        return out

    def edge_sequence(self) -> np.ndarray:
        """mu_1(0), mu_1(pi), mu_2(pi), mu_2(0), mu_3(0), ... (nondecreasing)."""
        seq = []
        for j in range(self.J):
            pair = (self.at_zero[j], self.at_pi[j])
            seq.extend(pair if j % 2 == 0 else pair[::-1])
        return np.array(seq)


def band_table(
    profile: CurvatureProfile | HillOperatorSpec,
    theta_count: int = 65,
    J: int = 8,
    n_modes: int = 128,
    jobs: int = 1,
    tol: float | None = None,
) -> FloquetBandTable:
    """Floquet eigenvalues on a uniform quasimomentum grid plus the 0 and pi edges."""
    spec = hill_spec(profile) if isinstance(profile, CurvatureProfile) else profile
    coef = potential_fourier(spec.potential, spec.L, 2 * n_modes)
    thetas = TWO_PI * np.arange(theta_count) / theta_count

    def column(t):
        return floquet_eigenvalues(spec.at(t), n_modes, J, _coef=coef)

    all_thetas = list(thetas) + [0.0, math.pi]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as ex:
            cols = list(ex.map(column, all_thetas))
    else:
        cols = [column(t) for t in all_thetas]
    table = FloquetBandTable(
        theta_grid=thetas,
        eigenvalues=np.array(cols[:theta_count]),
        edge_values={0.0: cols[-2], math.pi: cols[-1]},
        L=spec.L,
    )
    scale = 1.0 + float(np.max(np.abs(table.eigenvalues))) if table.eigenvalues.size else 1.0
    tol = 1e-9 * scale if tol is None else tol
    seq = table.edge_sequence()
    bad = np.nonzero(np.diff(seq) < -tol)[0]
    if bad.size:
        raise ConvergenceError(
            f"band-edge interlacing violated at position {int(bad[0])} by {float(-np.diff(seq)[bad[0]]):.2e}; "
            "increase n_modes"
        )
    mirror = (-np.arange(theta_count)) % theta_count
    asym = np.max(np.abs(table.eigenvalues - table.eigenvalues[mirror])) if theta_count else 0.0
    if asym > tol:
        raise ConvergenceError(f"theta symmetry violated by {asym:.2e}")
    return table


class _ComparisonPotential:
    def __init__(self, profile, const, weight):
        self.profile, self.const, self.weight = profile, const, weight

    def __call__(self, s):
        g = self.profile.gamma(s)
        return self.const - 0.25 * self.weight * g * g


def comparison_potentials(profile: CurvatureProfile, a: float, norms=None):
    """(V_plus, V_minus, prefactor_plus, prefactor_minus) for halfwidth ``a``."""
    gp, gp1, gp2 = sup_norms(profile) if norms is None else norms
    if not a > 0 or (gp > 0 and not a < 1.0 / (2.0 * gp)):
        raise PreconditionError(f"halfwidth a={a} must satisfy 0 < a < 1/(2 gamma_+) = {0.5 / gp if gp else math.inf}")
    lo, hi = 1.0 - a * gp, 1.0 + a * gp
    c_plus = 0.5 * lo**-3 * a * gp2 - 1.25 * hi**-4 * a * a * gp1 * gp1
    c_minus = -0.5 * lo**-3 * a * gp2 - 1.25 * lo**-4 * a * a * gp1 * gp1
    v_plus = _ComparisonPotential(profile, c_plus, hi**-2)
    v_minus = _ComparisonPotential(profile, c_minus, lo**-2)
    return v_plus, v_minus, lo**-2, hi**-2


def comparison_operators(profile: CurvatureProfile, a: float, theta: float = 0.0):
    """Specs of the separated comparison operators U_+ and U_- at halfwidth ``a``."""
    v_plus, v_minus, c_plus, c_minus = comparison_potentials(profile, a)
    return (
        HillOperatorSpec(v_plus, profile.L, theta, c_plus),
        HillOperatorSpec(v_minus, profile.L, theta, c_minus),
    )
