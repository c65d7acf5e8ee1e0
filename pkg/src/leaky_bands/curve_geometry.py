"""Curvature profiles, curve reconstruction and the geometric assumptions.

A curve is given curvature-first: the signed curvature gamma(s) as a function
of arc length.  In the rotated frame the curve starts at the origin with unit
tangent (1, 0) and has tangent angle ``-turning(s)``, ``turning(s)`` being the
running integral of gamma from 0.  The tube map sends (s, u) to
``Gamma(s) + u * n(s)`` with the left normal ``n = (-Gamma_2', Gamma_1')``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import QuadratureError

logger = logging.getLogger(__name__)

__all__ = [
    "ProfileKind",
    "CurvatureProfile",
    "CurveSample",
    "TubeMap",
    "PeriodVector",
    "AssumptionStatus",
    "AssumptionReport",
    "fourier_profile",
    "preset_profile",
    "turning_angle",
    "reconstruct_curve",
    "curve_points",
    "period_vector",
    "check_assumptions",
    "sup_norms",
    "estimate_a0",
]


class ProfileKind(enum.Enum):
    FOURIER = "fourier"
    PRESET = "preset"
    DECAYING = "decaying"


PERIODIC_PRESETS = {
    # name: (required params, defaults)
    "sine": ({"A"}, {"L": 1.0, "k": 1.0}),
    "exp_sine": ({"A", "eps"}, {"L": 1.0}),
    "circle": (set(), {"L": 1.0}),
}
DECAYING_PRESETS = {
    "sech": ({"c"}, {"scale": 1.0}),
    "lorentzian": ({"c"}, {"p": 2.0, "scale": 1.0}),
    "gaussian": ({"c"}, {"scale": 1.0}),
    "zero": (set(), {"scale": 1.0}),
}


def _preset_expr(name, p, s):
    import sympy as sp

    if name == "sine":
        return p["A"] * sp.sin(2 * sp.pi * p["k"] * s / p["L"])
    if name == "exp_sine":
        from scipy.special import i0

        # mean of exp(eps sin) over a period is I0(eps), so the profile has zero mean
        return p["A"] * (sp.exp(p["eps"] * sp.sin(2 * sp.pi * s / p["L"])) - float(i0(p["eps"])))
    if name == "circle":
        return 2 * sp.pi / p["L"] + 0 * s
    lam = p["scale"]
    if name == "sech":
        return lam * p["c"] * sp.sech(lam * s)
    if name == "lorentzian":
        return lam * p["c"] * (1 + (lam * s) ** 2) ** (-p["p"] / 2)
    if name == "gaussian":
        return lam * p["c"] * sp.exp(-((lam * s) ** 2))
    if name == "zero":
        return 0 * s
    raise ValueError(f"unknown preset {name!r}")


@lru_cache(maxsize=64)
def _preset_derivatives(name, items):
    import sympy as sp

    s = sp.Symbol("s", real=True)
    expr = _preset_expr(name, dict(items), s)
    return tuple(sp.lambdify(s, sp.diff(expr, s, d), "numpy") for d in range(5))


@dataclass(frozen=True)
class CurvatureProfile:
    """Signed curvature of an arc-length parametrized planar curve.

    ``cos_coeffs[k]`` multiplies cos(2 pi k s / L) starting at k = 0, which must
    be zero (no constant term); ``sin_coeffs[k-1]`` multiplies sin(2 pi k s / L).
    ``shift`` re-bases the profile, gamma_new(s) = gamma(s + shift).
    """

    kind: ProfileKind
    L: float | None = None
    cos_coeffs: tuple[float, ...] = ()
    sin_coeffs: tuple[float, ...] = ()
    name: str | None = None
    params: tuple[tuple[str, float], ...] = ()
    shift: float = 0.0

    def __post_init__(self):
        if self.kind is ProfileKind.FOURIER:
            if self.L is None or not self.L > 0:
                raise ValueError("L must be a positive real")
            if self.cos_coeffs and self.cos_coeffs[0] != 0.0:
                raise ValueError("cos[0] (constant term) is forbidden: the profile must have zero mean")
        elif self.kind in (ProfileKind.PRESET, ProfileKind.DECAYING):
            table = PERIODIC_PRESETS if self.kind is ProfileKind.PRESET else DECAYING_PRESETS
            if self.name not in table:
                raise ValueError(f"unknown {self.kind.value} preset {self.name!r}")
            required, defaults = table[self.name]
            given = dict(self.params)
            missing = required - set(given)
            if missing:
                raise ValueError(f"preset {self.name!r} missing parameters {sorted(missing)}")
            unknown = set(given) - required - set(defaults)
            if unknown:
                raise ValueError(f"preset {self.name!r} got unknown parameters {sorted(unknown)}")
            full = {**defaults, **given}
            object.__setattr__(self, "params", tuple(sorted((k, float(v)) for k, v in full.items())))
            if self.kind is ProfileKind.PRESET:
                object.__setattr__(self, "L", float(full["L"]))

    @property
    def periodic(self) -> bool:
        return self.kind is not ProfileKind.DECAYING

    @property
    def length_scale(self) -> float:
        if self.periodic:
            return self.L
        return 1.0 / dict(self.params)["scale"]

    def derivative(self, s, order: int = 0):
        """Evaluate the ``order``-th derivative of gamma (order <= 4 for presets)."""
        s = np.asarray(s, dtype=float) + self.shift
        if self.kind is ProfileKind.FOURIER:
            w = 2 * np.pi / self.L
            out = np.zeros_like(s)
            # d^n/ds^n of cos(kws) = (kw)^n cos(kws + n pi/2)
            for k, c in enumerate(self.cos_coeffs):
                if k and c:
                    out += c * (k * w) ** order * np.cos(k * w * s + order * np.pi / 2)
            for k, c in enumerate(self.sin_coeffs, start=1):
                if c:
                    out += c * (k * w) ** order * np.sin(k * w * s + order * np.pi / 2)
            return out
        f = _preset_derivatives(self.name, self.params)[order]
        return np.asarray(f(s), dtype=float) + np.zeros_like(s)

    def gamma(self, s):
        return self.derivative(s, 0)

    def __call__(self, s):
        return self.derivative(s, 0)

    def scaled(self, lam: float) -> "CurvatureProfile":
        """The profile s -> lam * gamma(lam * s) (curve shrunk by ``lam``)."""
        if self.kind is ProfileKind.FOURIER:
            return CurvatureProfile(
                ProfileKind.FOURIER,
                L=self.L / lam,
                cos_coeffs=tuple(lam * c for c in self.cos_coeffs),
                sin_coeffs=tuple(lam * c for c in self.sin_coeffs),
                shift=self.shift / lam,
            )
        p = dict(self.params)
        if self.kind is ProfileKind.DECAYING:
            p["scale"] *= lam
            return CurvatureProfile(self.kind, name=self.name, params=tuple(p.items()), shift=self.shift / lam)
        if self.name == "sine":
            p["A"] *= lam
        elif self.name == "exp_sine":
            p["A"] *= lam
        p["L"] /= lam
        return CurvatureProfile(self.kind, name=self.name, params=tuple(p.items()), shift=self.shift / lam)

    def rebased(self, shift: float) -> "CurvatureProfile":
        """Move the initial point s = 0 to ``shift`` on the current curve."""
        return CurvatureProfile(
            self.kind, L=self.L, cos_coeffs=self.cos_coeffs, sin_coeffs=self.sin_coeffs,
            name=self.name, params=self.params, shift=self.shift + shift,
        )

    def mirrored(self) -> "CurvatureProfile":
        if self.kind is ProfileKind.FOURIER:
            return CurvatureProfile(
                ProfileKind.FOURIER, L=self.L,
                cos_coeffs=tuple(-c for c in self.cos_coeffs),
                sin_coeffs=tuple(-c for c in self.sin_coeffs),
                shift=self.shift,
            )
        p = dict(self.params)
        key = "A" if "A" in p else "c"
        if key not in p:
            raise ValueError(f"preset {self.name!r} has no amplitude to mirror")
        p[key] = -p[key]
        return CurvatureProfile(self.kind, name=self.name, params=tuple(p.items()), shift=self.shift)


def fourier_profile(L: float, sin=(), cos=(), shift: float = 0.0) -> CurvatureProfile:
    """Fourier curvature; ``sin`` starts at k = 1, ``cos`` at k = 0 (must be 0)."""
    return CurvatureProfile(
        ProfileKind.FOURIER, L=float(L),
        cos_coeffs=tuple(float(c) for c in cos),
        sin_coeffs=tuple(float(c) for c in sin),
        shift=float(shift),
    )


def preset_profile(name: str, shift: float = 0.0, **params) -> CurvatureProfile:
    kind = ProfileKind.DECAYING if name in DECAYING_PRESETS else ProfileKind.PRESET
    return CurvatureProfile(kind, name=name, params=tuple(params.items()), shift=float(shift))


# --------------------------------------------------------------------------
# quadrature

_GL_ORDER = 10
_PANELS_PER_SCALE = 256


@lru_cache(maxsize=None)
def _gauss_legendre(order):
    return np.polynomial.legendre.leggauss(order)


def _panel_integrals(f, edges, order):
    x, w = _gauss_legendre(order)
    mid = 0.5 * (edges[1:] + edges[:-1])
    half = 0.5 * (edges[1:] - edges[:-1])
    nodes = mid[:, None] + half[:, None] * x[None, :]
    vals = f(nodes.ravel())
    vals = vals.reshape(nodes.shape + vals.shape[1:])
    out = np.einsum("j,pj...->p...", w, vals)
    return out * half.reshape((-1,) + (1,) * (out.ndim - 1))


class _CumulativeIntegral:
    """Cumulative integral F(t) = int_0^t f on a fixed panel set covering [lo, hi].

    Panel totals are cached; F at an arbitrary point adds a Gauss-Legendre
    integral over the partial panel, so no interpolation error is introduced.
    """

    def __init__(self, f, lo, hi, width):
        self.f = f
        n_lo = max(1, math.ceil(-lo / width)) if lo < 0 else 0
        n_hi = max(1, math.ceil(hi / width)) if hi > 0 else 0
        left = np.linspace(lo, 0.0, n_lo + 1) if n_lo else np.zeros(1)
        right = np.linspace(0.0, hi, n_hi + 1) if n_hi else np.zeros(1)
        self.edges = np.concatenate([left[:-1], right])
        panels = _panel_integrals(f, self.edges, _GL_ORDER)
        check = _panel_integrals(f, self.edges, _GL_ORDER + 4)
        scale = 1.0 + np.abs(check).sum()
        if np.max(np.abs(panels - check)) > 1e-12 * scale:
            raise QuadratureError(
                f"panel quadrature mismatch {np.max(np.abs(panels - check)):.3e}; "
                "profile too wild for the panel width"
            )
        cum = np.concatenate([np.zeros((1,) + panels.shape[1:]), np.cumsum(panels, axis=0)])
        i0 = n_lo
        self.cum = cum - cum[i0]
        self.lo, self.hi = self.edges[0], self.edges[-1]

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        flat = t.ravel()
        if flat.size and (flat.min() < self.lo - 1e-12 or flat.max() > self.hi + 1e-12):
            raise ValueError("evaluation point outside the cached span")
        p = np.clip(np.searchsorted(self.edges, flat, side="right") - 1, 0, len(self.edges) - 2)
        a = self.edges[p]
        x, w = _gauss_legendre(_GL_ORDER)
        half = 0.5 * (flat - a)
        nodes = (a + half)[:, None] + half[:, None] * x[None, :]
        vals = self.f(nodes.ravel())
        vals = vals.reshape(nodes.shape + vals.shape[1:])
        part = np.tensordot(w, vals, axes=(0, 1))
        part = part * (half if part.ndim == 1 else half[:, None])
        out = self.cum[p] + part
        return out.reshape(t.shape + out.shape[1:])


def _span_key(profile, lo, hi):
    unit = profile.length_scale
    return (math.floor(min(lo, 0.0) / unit), math.ceil(max(hi, 0.0) / unit))


@lru_cache(maxsize=128)
def _integrators(profile, key):
    unit = profile.length_scale
    lo, hi = key[0] * unit, key[1] * unit
    width = unit / _PANELS_PER_SCALE
    turning = _CumulativeIntegral(profile.gamma, lo, hi, width)

    def tangent(t):
        psi = -turning(t)
        return np.stack([np.cos(psi), np.sin(psi)], axis=-1)

    position = _CumulativeIntegral(tangent, lo, hi, width)
    return turning, position


def _get(profile, s):
    s = np.asarray(s, dtype=float)
    lo = float(s.min()) if s.size else 0.0
    hi = float(s.max()) if s.size else 0.0
    if profile.periodic:
        hi = max(hi, profile.L)
    return _integrators(profile, _span_key(profile, lo, hi))


def turning_angle(profile: CurvatureProfile, s):
    """Running turning angle int_0^s gamma(u) du."""
    return _get(profile, s)[0](s)


def curve_points(profile: CurvatureProfile, s):
    """Positions Gamma(s), tangents Gamma'(s) and turning angles, as arrays."""
    s = np.asarray(s, dtype=float)
    turning, position = _get(profile, s)
    phase = turning(s)
    tangent = np.stack([np.cos(-phase), np.sin(-phase)], axis=-1)
    return position(s), tangent, phase


@dataclass(frozen=True)
class CurveSample:
    s: float
    point: tuple[float, float]
    tangent: tuple[float, float]
    phase: float


def reconstruct_curve(profile: CurvatureProfile, s_grid) -> list[CurveSample]:
    s_grid = np.asarray(s_grid, dtype=float)
    if s_grid.size == 0:
        raise ValueError("s_grid must be nonempty")
    pts, tan, phase = curve_points(profile, s_grid)
    return [
        CurveSample(float(si), (float(p[0]), float(p[1])), (float(t[0]), float(t[1])), float(ph))
        for si, p, t, ph in zip(s_grid, pts, tan, phase)
    ]


@dataclass(frozen=True)
class TubeMap:
    profile: CurvatureProfile
    a: float

    def __call__(self, s, u):
        s = np.asarray(s, dtype=float)
        u = np.asarray(u, dtype=float)
        pts, tan, _ = curve_points(self.profile, s)
        normal = np.stack([-tan[..., 1], tan[..., 0]], axis=-1)
        return pts + u[..., None] * normal

    def jacobian(self, s, u):
        return 1.0 + np.asarray(u) * self.profile.gamma(s)


@dataclass(frozen=True)
class PeriodVector:
    K1: float
    K2: float

    @property
    def a4_holds(self) -> bool:
        return self.K1 > 0


def period_vector(profile: CurvatureProfile) -> PeriodVector:
    if not profile.periodic:
        raise ValueError("period vector needs a periodic profile")
    pts, _, _ = curve_points(profile, np.array([0.0, profile.L]))
    k = pts[1] - pts[0]
    return PeriodVector(float(k[0]), float(k[1]))


# --------------------------------------------------------------------------
# sup norms


def _polished_max(profile, order, s_grid, lo, hi):
    g = profile.derivative(s_grid, order)
    absg = np.abs(g)
    best = float(absg.max()) if absg.size else 0.0
    if best == 0.0:
        return 0.0
    n = len(s_grid)
    if profile.periodic:
        left, right = np.roll(absg, 1), np.roll(absg, -1)
    else:
        left = np.concatenate([[-np.inf], absg[:-1]])
        right = np.concatenate([absg[1:], [-np.inf]])
    cand = np.nonzero((absg >= left) & (absg >= right))[0]
    h = (hi - lo) / n
    for i in cand:
        s = s_grid[i]
        d1 = float(profile.derivative(s, order + 1))
        d2 = float(profile.derivative(s, order + 2))
        if d2 != 0.0:
            step = -d1 / d2
            if abs(step) <= h:
                s = s + step
        best = max(best, abs(float(profile.derivative(s, order))))
    return best


def sup_norms(profile: CurvatureProfile, n_grid: int = 4096, R: float | None = None):
    """(gamma_+, gamma'_+, gamma''_+) over one period (or over [-R, R])."""
    if profile.periodic:
        lo, hi = 0.0, profile.L
        s = lo + (hi - lo) * np.arange(n_grid) / n_grid
    else:
        R = 40.0 * profile.length_scale if R is None else R
        lo, hi = -R, R
        s = np.linspace(lo, hi, n_grid)
    return tuple(_polished_max(profile, d, s, lo, hi) for d in range(3))


# --------------------------------------------------------------------------
# assumptions


@dataclass
class AssumptionStatus:
    passed: bool
    value: float | None = None
    detail: str = ""

    def to_dict(self):
        return {"passed": self.passed, "value": _json_float(self.value), "detail": self.detail}


def _json_float(x):
    if x is None:
        return None
    x = float(x)
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


@dataclass
class AssumptionReport:
    a: float
    entries: dict[str, AssumptionStatus] = field(default_factory=dict)
    K1: float | None = None
    K2: float | None = None
    max_abs_phase: float | None = None
    sufficient_condition: bool | None = None
    a0_estimate: float | None = None

    @property
    def all_passed(self) -> bool:
        return all(e.passed for e in self.entries.values())

    def failed(self) -> list[str]:
        return [k for k, e in self.entries.items() if not e.passed]

    def to_dict(self):
        return {
            "a": self.a,
            "all_passed": self.all_passed,
            "assumptions": {k: v.to_dict() for k, v in self.entries.items()},
            "K1": self.K1,
            "K2": self.K2,
            "max_abs_phase": self.max_abs_phase,
            "sufficient_condition_max_phase_lt_pi_over_2": self.sufficient_condition,
            "a0_estimate_sampled": _json_float(self.a0_estimate),
        }


def _normal_crossings(P, N, chunk=256):
    """Smallest max(|u_i|, |u_j|) at which two sampled normal segments meet."""
    n = len(P)
    best = np.inf
    for start in range(0, n, chunk):
        stop = min(n, start + chunk)
        Pi, Ni = P[start:stop, None, :], N[start:stop, None, :]
        Pj, Nj = P[None, :, :], N[None, :, :]
        # solve Pi + ui Ni = Pj + uj Nj
        det = Ni[..., 0] * (-Nj[..., 1]) - Ni[..., 1] * (-Nj[..., 0])
        d = Pj - Pi
        with np.errstate(divide="ignore", invalid="ignore"):
            ui = (d[..., 0] * (-Nj[..., 1]) - d[..., 1] * (-Nj[..., 0])) / det
            uj = (Ni[..., 0] * d[..., 1] - Ni[..., 1] * d[..., 0]) / det
            m = np.maximum(np.abs(ui), np.abs(uj))
        idx = np.arange(start, stop)
        m[idx - start, idx] = np.inf
        m[~np.isfinite(m) | (np.abs(det) < 1e-14)] = np.inf
        best = min(best, float(m.min()))
    return best


def estimate_a0(profile: CurvatureProfile, n_samples: int = 2000) -> float:
    """Sampled estimate of the largest admissible tube halfwidth.

    Minimum of three sampled limits: the focal distance 1/gamma_+, the first
    crossing of two normal segments, and the halfwidth at which a normal
    segment leaves the slab 0 < x' < K1.  Returns +inf for a straight line.
    """
    L = profile.L
    s = L * np.arange(n_samples) / n_samples
    pts, tan, _ = curve_points(profile, s)
    normal = np.stack([-tan[:, 1], tan[:, 0]], axis=-1)
    g_plus = sup_norms(profile)[0]
    focal = np.inf if g_plus == 0 else 1.0 / g_plus
    crossing = _normal_crossings(pts, normal)
    K1 = period_vector(profile).K1
    # x'(s, u) = Gamma_1(s) + u * n_1(s) must stay in (0, K1) for interior s
    x, n1 = pts[1:, 0], normal[1:, 0]
    if np.any(x <= 0) or np.any(x >= K1):
        slab = 0.0
    else:
        with np.errstate(divide="ignore"):
            lim = np.where(n1 > 0, (K1 - x) / n1, np.where(n1 < 0, -x / n1, np.inf))
            lim2 = np.where(n1 > 0, x / n1, np.where(n1 < 0, (x - K1) / n1, np.inf))
        slab = float(min(lim.min(), lim2.min()))
    return float(min(focal, crossing, slab))


def check_assumptions(profile: CurvatureProfile, a: float, n_samples: int = 2000) -> AssumptionReport:
    """Numerical status of the periodic-curve assumptions at halfwidth ``a``."""
    if not profile.periodic:
        raise ValueError("check_assumptions expects a periodic profile")
    rep = AssumptionReport(a=float(a))
    rep.entries["A1"] = AssumptionStatus(True, detail="closed-form profile, C^2 by construction")
    rep.entries["A2"] = AssumptionStatus(True, value=profile.L, detail="periodic by construction")
    g_plus = sup_norms(profile)[0]
    total = float(turning_angle(profile, np.array([profile.L]))[0])
    tol = 1e-10 * max(1.0, profile.L * g_plus)
    rep.entries["A3"] = AssumptionStatus(abs(total) <= tol, value=total, detail=f"|mean turning| <= {tol:.1e}")
    pv = period_vector(profile)
    rep.K1, rep.K2 = pv.K1, pv.K2
    rep.entries["A4"] = AssumptionStatus(pv.K1 > 0, value=pv.K1, detail="K1 > 0")
    s = profile.L * np.arange(4 * n_samples + 1) / (4 * n_samples)
    phase = turning_angle(profile, s)
    rep.max_abs_phase = float(np.max(np.abs(phase)))
    rep.sufficient_condition = rep.max_abs_phase < np.pi / 2
    a0 = estimate_a0(profile, n_samples) if pv.K1 > 0 else 0.0
    rep.a0_estimate = a0
    rep.entries["A5"] = AssumptionStatus(
        bool(0 < a < a0), value=a0,
        detail="sampled injectivity and slab containment (sampled, not certified)",
    )
    if not (rep.entries["A4"].passed and rep.entries["A5"].passed):
        logger.warning(
            "assumptions A4/A5 depend on the choice of the initial point s = 0; "
            "consider re-basing the profile with a shift"
        )
    return rep
