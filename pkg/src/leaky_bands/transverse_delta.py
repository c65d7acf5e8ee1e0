"""Transverse delta-well operators on (-a, a).

Two variants share the form ``int |f'|^2 du - beta |f(0)|^2``:

* ``DIRICHLET_PLUS``: f(-a) = f(a) = 0.
* ``ROBIN_MINUS``: no boundary condition in the form domain, plus the boundary
  term ``-gamma_plus (|f(a)|^2 + |f(-a)|^2)``.  Integrating by parts gives the
  natural conditions f'(a) = gamma_plus f(a) and -f'(-a) = gamma_plus f(-a).

An even bound state ``f = g(a - |u|)`` with decay rate k must satisfy the jump
condition f'(0+) - f'(0-) = -beta f(0).  Writing e = exp(-2 k a) the secular
equations become

    Dirichlet:  beta - 2k = e (beta + 2k)
    Robin:      (2k - beta)(k - gamma_plus) = e (2k + beta)(k + gamma_plus)

Both forms isolate the exponentially small offset of k from beta / 2, so
``zeta + beta^2 / 4`` is obtained without cancellation.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigvalsh_tridiagonal
from scipy.optimize import brentq

from .errors import ConvergenceError, PreconditionError

__all__ = [
    "Variant",
    "TransverseSpec",
    "TransverseMode",
    "solve_transverse",
    "count_negative_modes",
    "transverse_fd_matrix",
    "discrete_transverse_eigenvalue",
    "fd_transverse_eigenvalue",
]

ROBIN_CONSTANT = 2205.0 / 16.0


class Variant(enum.Enum):
    DIRICHLET_PLUS = "DirichletPlus"
    ROBIN_MINUS = "RobinMinus"


@dataclass(frozen=True)
class TransverseSpec:
    a: float
    beta: float
    gamma_plus: float = 0.0
    variant: Variant = Variant.DIRICHLET_PLUS

    def __post_init__(self):
        if not (self.a > 0 and self.beta > 0):
            raise ValueError("a and beta must be positive")
        if self.variant is Variant.ROBIN_MINUS and not self.gamma_plus >= 0:
            raise ValueError("RobinMinus needs gamma_plus >= 0")

    @property
    def hypotheses_hold(self) -> bool:
        """Parameter range in which the two-sided bounds are claimed."""
        ba = self.beta * self.a
        if self.variant is Variant.DIRICHLET_PLUS:
            return ba > 8.0 / 3.0
        return ba > 8.0 and self.beta > 8.0 / 3.0 * self.gamma_plus


@dataclass(frozen=True)
class TransverseMode:
    spec: TransverseSpec
    zeta: float
    k: float
    offset: float  # zeta + beta^2 / 4, computed without cancellation
    bound_lo: float
    bound_hi: float

    @property
    def within_bounds(self) -> bool:
        # compare offsets, which carry the exponentially small information
        q = 0.25 * self.spec.beta**2
        return self.bound_lo + q < self.offset < self.bound_hi + q


def _bounds(spec):
    b = spec.beta
    q = 0.25 * b * b
    tail = b * b * math.exp(-0.5 * b * spec.a)
    if spec.variant is Variant.DIRICHLET_PLUS:
        return -q, -q + 2.0 * tail
    return -q - ROBIN_CONSTANT * tail, -q


def _secular(spec):
    b, a, g = spec.beta, spec.a, spec.gamma_plus
    if spec.variant is Variant.DIRICHLET_PLUS:
        return lambda k: (b - 2 * k) - math.exp(-2 * k * a) * (b + 2 * k)
    return lambda k: (2 * k - b) * (k - g) - math.exp(-2 * k * a) * (2 * k + b) * (k + g)


def _refine(spec, k):
    """Fixed-point polish of eps = k - beta / 2 from the secular equation."""
    b, a, g = spec.beta, spec.a, spec.gamma_plus
    for _ in range(4):
        e = math.exp(-2 * k * a)
        if spec.variant is Variant.DIRICHLET_PLUS:
            eps = -0.5 * e * (b + 2 * k)
        else:
            if k <= g:
                return k - 0.5 * b
            eps = 0.5 * e * (2 * k + b) * (k + g) / (k - g)
        k = 0.5 * b + eps
    return eps


def solve_transverse(spec: TransverseSpec, xtol: float = 1e-13) -> TransverseMode:
    """Lowest even bound state of the transverse operator."""
    b, a = spec.beta, spec.a
    F = _secular(spec)
    half = 0.5 * b
    if spec.variant is Variant.DIRICHLET_PLUS:
        if b * a <= 2.0:
            raise PreconditionError(f"beta*a = {b * a:.6g} <= 2: the Dirichlet well has no negative eigenvalue")
        # F > 0 as k -> 0+ and F(beta/2) <= 0; stay off the trivial root k = 0
        lo = min(half, 1.0 / a)
        while F(lo) <= 0:
            lo *= 0.5
            if lo < 1e-300:
                raise ConvergenceError("no sign change for the Dirichlet secular equation")
        k = brentq(F, lo, half, xtol=xtol, rtol=4 * np.finfo(float).eps) if F(half) < 0 else half
    else:
        # F(beta/2) <= 0 always and F -> +inf; widen the upper end geometrically
        delta = b
        hi = half + delta
        tries = 0
        while F(hi) <= 0:
            delta *= 2.0
            hi = half + delta
            tries += 1
            if tries > 60:
                raise ConvergenceError("no sign change for the Robin secular equation")
        k = brentq(F, half, hi, xtol=xtol, rtol=4 * np.finfo(float).eps) if F(half) < 0 else half
    if k * a > 3.0:
        eps = _refine(spec, k)
    else:
        eps = k - half
    k = half + eps
    offset = -eps * (b + eps)
    lo_b, hi_b = _bounds(spec)
    return TransverseMode(spec, -k * k, k, offset, lo_b, hi_b)


def transverse_fd_matrix(spec: TransverseSpec, n: int):
    """Symmetric tridiagonal (diag, offdiag) of the form on a uniform grid.

    Nodes u_i = -a + i h with h = 2a / n and n even; the delta sits on node
    n / 2 as -beta / h after mass scaling.  Dirichlet drops the end nodes; the
    Robin variant keeps them with half-cell mass.
    """
    if n % 2 or n < 4:
        raise ValueError("n must be even and >= 4")
    h = 2.0 * spec.a / n
    if spec.variant is Variant.DIRICHLET_PLUS:
        d = np.full(n - 1, 2.0 / h**2)
        e = np.full(n - 2, -1.0 / h**2)
        d[n // 2 - 1] -= spec.beta / h
        return d, e
    d = np.full(n + 1, 2.0 / h**2)
    e = np.full(n, -1.0 / h**2)
    # end nodes: stiffness 1/h, mass h/2, boundary term -gamma_plus
    d[0] = d[-1] = 2.0 / h**2 - 2.0 * spec.gamma_plus / h
    e[0] = e[-1] = -math.sqrt(2.0) / h**2
    d[n // 2] -= spec.beta / h
    return d, e


def discrete_transverse_eigenvalue(spec: TransverseSpec, n: int) -> float:
    d, e = transverse_fd_matrix(spec, n)
    return float(eigvalsh_tridiagonal(d, e, select="i", select_range=(0, 0))[0])


def fd_transverse_eigenvalue(spec: TransverseSpec, n: int = 8192) -> float:
    """Richardson combination of grids n and 2n (second-order scheme)."""
    coarse = discrete_transverse_eigenvalue(spec, n)
    fine = discrete_transverse_eigenvalue(spec, 2 * n)
    return (4.0 * fine - coarse) / 3.0


def count_negative_modes(spec: TransverseSpec, n: int = 8192) -> int:
    """Number of negative eigenvalues of the FD form (Sturm count at 0)."""
    d, e = transverse_fd_matrix(spec, n)
    return int(len(eigvalsh_tridiagonal(d, e, select="v", select_range=(-np.inf, 0.0))))
