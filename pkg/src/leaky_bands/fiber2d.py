"""Strip fiber forms in curvilinear coordinates and the bracketing check.

On the strip (0, L) x (-a, a) with quasi-periodic wrap f(L, u) = e^{i theta} f(0, u)
the forms are

    b(f) = int (1 + u gamma)^-2 |f_s|^2 + |f_u|^2 + V(s, u) |f|^2  -  beta int |f(s, 0)|^2

with Dirichlet rows at u = +-a for the plus variant, and for the minus variant
free ends carrying the boundary terms

    -1/2 gamma / (1 + a gamma) |f(s, a)|^2  +  1/2 gamma / (1 - a gamma) |f(s, -a)|^2.

The separated comparison forms replace the metric by (1 -+ a gamma_+)^-2, V by
V_+-(s), and (minus only) the boundary terms by -gamma_+ at both ends.

Each form is discretized directly: nodes s_i = i h_s and u_k = -a + k h_u with
n_u even so the delta line sits on node row n_u / 2, edge differences for the
gradient terms (the s-metric at edge midpoints), nodal values elsewhere, and
half-cell mass on the free end rows of the minus variant.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh

from .curve_geometry import CurvatureProfile, estimate_a0, sup_norms
from .errors import ConvergenceError, PreconditionError
from .hill_floquet import HillOperatorSpec, comparison_potentials, floquet_eigenvalues, hill_spec
from .transverse_delta import TransverseSpec, Variant, discrete_transverse_eigenvalue, solve_transverse

__all__ = [
    "FiberVariant",
    "StripGrid",
    "FiberForm",
    "FiberSpectrum",
    "a_of_beta",
    "strip_potential",
    "assemble_fiber",
    "fiber_eigenvalues",
    "fiber_levels",
    "bracketing_report",
]


class FiberVariant(enum.Enum):
    PLUS = "PlusDirichlet"
    MINUS = "MinusRobin"


def a_of_beta(beta: float) -> float:
    """Tube halfwidth 6 log(beta) / beta."""
    return 6.0 * math.log(beta) / beta


@dataclass(frozen=True)
class StripGrid:
    n_s: int = 128
    n_u: int = 128

    def __post_init__(self):
        if self.n_s < 3 or self.n_u < 4 or self.n_u % 2:
            raise ValueError("need n_s >= 3 and an even n_u >= 4 (delta row at u = 0)")

    def doubled(self) -> "StripGrid":
        return StripGrid(2 * self.n_s, 2 * self.n_u)


def strip_potential(profile: CurvatureProfile, s, u):
    g = profile.derivative(s, 0)
    g1 = profile.derivative(s, 1)
    g2 = profile.derivative(s, 2)
    w = 1.0 + u * g
    return 0.5 * u * g2 / w**3 - 1.25 * u * u * g1 * g1 / w**4 - 0.25 * g * g / w**2


@dataclass
class FiberForm:
    """Stiffness matrix A and diagonal mass m: the form is f^H A f, the norm f^H diag(m) f."""

    A: sp.csr_matrix
    mass: np.ndarray
    shape: tuple[int, int]  # (n_s, number of u rows)
    u_nodes: np.ndarray

    def value(self, f) -> float:
        f = np.asarray(f).ravel()
        return float(np.real(np.vdot(f, self.A @ f)))

    def norm2(self, f) -> float:
        f = np.asarray(f).ravel()
        return float(np.sum(self.mass * np.abs(f) ** 2))

    def scaled(self) -> sp.csr_matrix:
        d = sp.diags(1.0 / np.sqrt(self.mass))
        return (d @ self.A @ d).tocsr()


def _phase(theta):
    t = math.remainder(float(theta), 2 * math.pi)
    if t == 0.0:
        return 1.0
    if abs(t) == math.pi:
        return -1.0
    return complex(math.cos(t), math.sin(t))


def assemble_fiber(
    profile: CurvatureProfile,
    a: float,
    beta: float,
    theta: float,
    variant: FiberVariant,
    grid: StripGrid = StripGrid(),
    separated: bool = False,
    norms=None,
) -> FiberForm:
    """Discrete form of the strip fiber (or its separated comparison if ``separated``)."""
    L = profile.L
    n_s, n_u = grid.n_s, grid.n_u
    h_s, h_u = L / n_s, 2.0 * a / n_u
    norms = sup_norms(profile) if norms is None else norms
    gp = norms[0]
    if a * gp >= 1.0:
        raise PreconditionError(f"metric degenerates: a*gamma_+ = {a * gp:.6g} >= 1")

    u_all = -a + h_u * np.arange(n_u + 1)
    if variant is FiberVariant.PLUS:
        rows = np.arange(1, n_u)
        c = np.ones(n_u - 1)
    else:
        rows = np.arange(n_u + 1)
        c = np.ones(n_u + 1)
        c[0] = c[-1] = 0.5
    u = u_all[rows]
    nr = len(rows)
    k0 = n_u // 2 - rows[0]

    s = h_s * np.arange(n_s)
    s_mid = s + 0.5 * h_s
    if separated:
        v_plus, v_minus, pref_plus, pref_minus = comparison_potentials(profile, a, norms)
        pot_fn, pref = (v_plus, pref_plus) if variant is FiberVariant.PLUS else (v_minus, pref_minus)
        metric = np.full((n_s, nr), pref)
        pot = np.repeat(pot_fn(s)[:, None], nr, axis=1)
    else:
        metric = (1.0 + u[None, :] * profile.gamma(s_mid)[:, None]) ** -2
        pot = strip_potential(profile, s[:, None], u[None, :])

    idx = np.arange(n_s * nr).reshape(n_s, nr)
    ph = _phase(theta)
    dtype = complex if isinstance(ph, complex) else float

    # s-edges (i, i+1), the last one wrapping with the Bloch phase
    w_s = (h_u / h_s) * c[None, :] * metric
    i0 = idx.ravel()
    i1 = np.roll(idx, -1, axis=0).ravel()
    ws = w_s.ravel()
    wrap = np.zeros((n_s, nr), dtype=dtype)
    wrap[:-1] = 1.0
    wrap[-1] = ph
    wr = wrap.ravel()
    rr = [i0, i1, i0, i1]
    cc = [i0, i1, i1, i0]
    vv = [ws, ws, -ws * wr, -ws * np.conj(wr)]

    # u-edges (k, k+1) inside the row set
    w_u = h_s / h_u
    j0 = idx[:, :-1].ravel()
    j1 = idx[:, 1:].ravel()
    wu = np.full(j0.size, w_u)
    rr += [j0, j1, j0, j1]
    cc += [j0, j1, j1, j0]
    vv += [wu, wu, -wu, -wu]

    diag = h_s * h_u * c[None, :] * pot
    if variant is FiberVariant.PLUS:
        # edges to the Dirichlet ends
        diag[:, 0] += w_u
        diag[:, -1] += w_u
    else:
        if separated:
            diag[:, 0] -= h_s * gp
            diag[:, -1] -= h_s * gp
        else:
            g = profile.gamma(s)
            diag[:, -1] -= h_s * 0.5 * g / (1.0 + a * g)
            diag[:, 0] += h_s * 0.5 * g / (1.0 - a * g)
    diag[:, k0] -= beta * h_s
    rr.append(i0)
    cc.append(i0)
    vv.append(diag.ravel())

    N = n_s * nr
    A = sp.coo_matrix(
        (np.concatenate(vv).astype(dtype), (np.concatenate(rr), np.concatenate(cc))), shape=(N, N)
    ).tocsr()
    mass = (h_s * h_u * np.repeat(c[None, :], n_s, axis=0)).ravel()
    return FiberForm(A, mass, (n_s, nr), u)


def fiber_eigenvalues(form: FiberForm, count: int = 3, sigma: float | None = None, seed: int = 0):
    """Lowest ``count`` eigenvalues of the discrete form by shift-invert Lanczos."""
    if not 1 <= count <= 10:
        raise ValueError("count must lie in 1..10")
    B = form.scaled()
    if sigma is None:
        # Gershgorin lower bound keeps the shift below the spectrum
        absrow = np.asarray(abs(B).sum(axis=1)).ravel()
        diag = B.diagonal().real
        sigma = float(np.min(diag - (absrow - np.abs(diag)))) - 1.0
    v0 = np.random.default_rng(seed).standard_normal(B.shape[0]).astype(B.dtype)
    try:
        w, X = eigsh(B, k=count, sigma=sigma, which="LM", v0=v0, maxiter=5000)
    except Exception as exc:  # ArpackNoConvergence and LU failures
        raise ConvergenceError(f"sparse eigensolver failed: {exc}") from exc
    order = np.argsort(w)
    w, X = w[order], X[:, order]
    norm_b = float(sp.linalg.norm(B, 1))
    res = np.linalg.norm(B @ X - X * w, axis=0)
    if np.any(res > 1e-8 * norm_b):
        raise ConvergenceError(f"eigenpair residual {res.max():.2e} exceeds 1e-8 * ||A|| = {1e-8 * norm_b:.2e}")
    return w.real


@dataclass
class FiberLevels:
    """Richardson-extrapolated levels with the transverse discretization defect removed."""

    values: np.ndarray
    slack: np.ndarray
    coarse: np.ndarray
    fine: np.ndarray


def fiber_levels(
    profile: CurvatureProfile,
    a: float,
    beta: float,
    theta: float,
    variant: FiberVariant,
    grid: StripGrid = StripGrid(),
    count: int = 3,
    norms=None,
) -> FiberLevels:
    """Eigenvalues on ``grid`` and its doubling, corrected and extrapolated.

    The lattice delta well carries an O(beta^4 h_u^2) error that swamps the
    curvature effects at large beta.  It is known exactly from the 1D
    transverse problem on the same u-grid, so that defect is subtracted before
    the h^2 Richardson step.  The slack is the coarse-to-fine change.
    """
    norms = sup_norms(profile) if norms is None else norms
    tv = Variant.DIRICHLET_PLUS if variant is FiberVariant.PLUS else Variant.ROBIN_MINUS
    tspec = TransverseSpec(a, beta, 0.0, tv)
    exact = solve_transverse(tspec).zeta
    # V >= V_minus and the end terms are >= -gamma_+, which gives a shift below the spectrum
    floor_spec = TransverseSpec(a, beta, norms[0], tv)
    v_floor = -comparison_potentials(profile, a, norms)[1].const - 0.25 * norms[0] ** 2 / (1 - a * norms[0]) ** 2
    out = []
    for g in (grid, grid.doubled()):
        form = assemble_fiber(profile, a, beta, theta, variant, g, norms=norms)
        defect = discrete_transverse_eigenvalue(tspec, g.n_u) - exact
        sigma = discrete_transverse_eigenvalue(floor_spec, g.n_u) - v_floor - 1.0
        out.append(fiber_eigenvalues(form, count, sigma=sigma) - defect)
    coarse, fine = out
    return FiberLevels((4.0 * fine - coarse) / 3.0, np.abs(fine - coarse), coarse, fine)


@dataclass
class FiberSpectrum:
    theta: float
    beta: float
    a: float
    kappa_plus: np.ndarray
    kappa_minus: np.ndarray
    tau_plus: np.ndarray
    tau_minus: np.ndarray
    lambda_hat: np.ndarray
    slack_plus: np.ndarray
    slack_minus: np.ndarray
    zeta_plus: float
    zeta_minus: float
    mu: np.ndarray
    mu_plus: np.ndarray
    mu_minus: np.ndarray
    bracketing_ok: list[bool] = field(default_factory=list)

    @property
    def residual(self) -> np.ndarray:
        return np.abs(self.kappa_plus - self.lambda_hat)

    def to_dict(self):
        f = lambda x: [float(v) for v in x]  # noqa: E731
        return {
            "beta": self.beta,
            "theta": self.theta,
            "a": self.a,
            "kappa_plus": f(self.kappa_plus),
            "kappa_minus": f(self.kappa_minus),
            "tau_plus": f(self.tau_plus),
            "tau_minus": f(self.tau_minus),
            "lambda_hat": f(self.lambda_hat),
            "bracketing_ok": [bool(b) for b in self.bracketing_ok],
            "slack_plus": f(self.slack_plus),
            "slack_minus": f(self.slack_minus),
            "residual": f(self.residual),
        }


def check_fiber_preconditions(profile: CurvatureProfile, beta: float, a: float | None = None, norms=None):
    """Raise PreconditionError naming the first failing inequality."""
    a = a_of_beta(beta) if a is None else a
    if not beta * a > 8.0:
        raise PreconditionError(f"beta*a = {beta * a:.6g} must exceed 8")
    gp = (sup_norms(profile) if norms is None else norms)[0]
    if not a * gp < 0.5:
        raise PreconditionError(f"a*gamma_+ = {a * gp:.6g} must be below 1/2")
    a0 = estimate_a0(profile)
    if not a < a0:
        raise PreconditionError(f"a = {a:.6g} must be below the sampled a0 estimate {a0:.6g}")
    return a


def bracketing_report(
    profile: CurvatureProfile,
    beta: float,
    theta: float = 0.0,
    J: int = 3,
    grid: StripGrid = StripGrid(),
    n_modes: int = 128,
) -> FiberSpectrum:
    """Strip eigenvalues at a = a(beta) against the separated bounds."""
    norms = sup_norms(profile)
    a = check_fiber_preconditions(profile, beta, norms=norms)
    gp = norms[0]
    z_plus = solve_transverse(TransverseSpec(a, beta, 0.0, Variant.DIRICHLET_PLUS)).zeta
    z_minus = solve_transverse(TransverseSpec(a, beta, gp, Variant.ROBIN_MINUS)).zeta
    v_plus, v_minus, c_plus, c_minus = comparison_potentials(profile, a, norms)
    mu_plus = floquet_eigenvalues(HillOperatorSpec(v_plus, profile.L, theta, c_plus), n_modes, J)
    mu_minus = floquet_eigenvalues(HillOperatorSpec(v_minus, profile.L, theta, c_minus), n_modes, J)
    mu = floquet_eigenvalues(hill_spec(profile, theta), n_modes, J)
    plus = fiber_levels(profile, a, beta, theta, FiberVariant.PLUS, grid, J, norms)
    minus = fiber_levels(profile, a, beta, theta, FiberVariant.MINUS, grid, J, norms)
    tau_plus = z_plus + mu_plus
    tau_minus = z_minus + mu_minus
    ok = [
        bool(tau_minus[j] - minus.slack[j] <= minus.values[j] and plus.values[j] <= tau_plus[j] + plus.slack[j])
        for j in range(J)
    ]
    return FiberSpectrum(
        theta=float(theta), beta=float(beta), a=a,
        kappa_plus=plus.values, kappa_minus=minus.values,
        tau_plus=tau_plus, tau_minus=tau_minus,
        lambda_hat=-0.25 * beta**2 + mu,
        slack_plus=plus.slack, slack_minus=minus.slack,
        zeta_plus=z_plus, zeta_minus=z_minus,
        mu=mu, mu_plus=mu_plus, mu_minus=mu_minus,
        bracketing_ok=ok,
    )
