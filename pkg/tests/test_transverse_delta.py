from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from leaky_bands.errors import PreconditionError
from leaky_bands.transverse_delta import (
    TransverseSpec,
    Variant,
    count_negative_modes,
    fd_transverse_eigenvalue,
    solve_transverse,
)

D, R = Variant.DIRICHLET_PLUS, Variant.ROBIN_MINUS


def test_dirichlet_bounds_and_secular_residual():
    m = solve_transverse(TransverseSpec(10.0, 4.0))
    assert m.within_bounds
    assert m.bound_hi == pytest.approx(-4 + 32 * math.exp(-20))
    assert abs(2 * m.k / math.tanh(m.k * 10.0) - 4.0) < 1e-12
    assert m.zeta == pytest.approx(-m.k**2)


def test_line_limit():
    b = 6.0
    m = solve_transverse(TransverseSpec(60.0 / b, b))
    assert abs(m.zeta + b * b / 4) <= 1e-10 * b * b / 4


def test_robin_bounds_example():
    m = solve_transverse(TransverseSpec(1.0, 10.0, 1.0, R))
    assert m.within_bounds
    assert m.bound_lo == pytest.approx(-25 - 2205 / 16 * 100 * math.exp(-5))
    assert m.zeta < -25


def test_robin_natural_boundary_condition():
    # f = cosh(k t) + sigma sinh(k t), t = a - |u|, with f'(a) = gamma f(a) and the delta jump
    a, b, g = 0.7, 12.0, 0.8
    m = solve_transverse(TransverseSpec(a, b, g, R))
    k, sigma = m.k, -g / m.k
    f0 = math.cosh(k * a) + sigma * math.sinh(k * a)
    df0 = k * (math.sinh(k * a) + sigma * math.cosh(k * a))
    assert 2 * df0 == pytest.approx(b * f0, rel=1e-12)


def test_dirichlet_needs_binding():
    with pytest.raises(PreconditionError):
        solve_transverse(TransverseSpec(1.0, 1.5))


@pytest.mark.parametrize("ba", [3, 5, 10, 20])
@pytest.mark.parametrize("beta", [4.0, 8.0, 16.0])
def test_dirichlet_hypothesis_grid(ba, beta):
    spec = TransverseSpec(ba / beta, beta)
    assert spec.hypotheses_hold
    assert solve_transverse(spec).within_bounds
    assert count_negative_modes(spec) == 1


@pytest.mark.parametrize("ba", [9, 12, 20])
@pytest.mark.parametrize("beta,g", [(4.0, 0.5), (8.0, 1.0), (16.0, 1.0), (40.0, 0.5)])
def test_robin_bounds_grid(ba, beta, g):
    spec = TransverseSpec(ba / beta, beta, g, R)
    assert spec.hypotheses_hold
    assert solve_transverse(spec).within_bounds


@pytest.mark.parametrize("ba", [9, 12, 20])
@pytest.mark.parametrize("g", [0.5, 1.0])
def test_robin_unique_when_edge_modes_absent(ba, g):
    # edge-localized modes need gamma_+ a > 1 (odd) or a beta gamma_+ > 2 gamma_+ + beta (even)
    beta = 40.0
    assert g * ba / beta < 1 and ba * g < 2 * g + beta
    assert count_negative_modes(TransverseSpec(ba / beta, beta, g, R)) == 1


def test_robin_edge_modes_counted():
    # odd edge mode exists once gamma_+ a > 1; the even one once a beta gamma_+ > 2 gamma_+ + beta
    assert count_negative_modes(TransverseSpec(1.1, 10.0, 1.0, R)) == 2
    assert count_negative_modes(TransverseSpec(5.0, 4.0, 1.0, R)) == 3


def test_counts_small_and_moderate_coupling():
    assert count_negative_modes(TransverseSpec(1.0, 10.0)) == 1
    # a Dirichlet well binds only for beta a > 2
    assert count_negative_modes(TransverseSpec(1.0, 0.01)) == 0
    assert count_negative_modes(TransverseSpec(1.0, 2.5)) == 1


@pytest.mark.parametrize(
    "spec",
    [TransverseSpec(0.5, 10.0), TransverseSpec(2.0, 4.0), TransverseSpec(0.9, 10.0, 1.0, R), TransverseSpec(0.3, 40.0, 0.5, R)],
)
def test_secular_matches_fd(spec):
    m = solve_transverse(spec)
    assert fd_transverse_eigenvalue(spec) == pytest.approx(m.zeta, rel=1e-6)


@settings(max_examples=30, deadline=None)
@given(st.floats(0.2, 3.0), st.floats(3.0, 60.0), st.floats(0.0, 1.0), st.sampled_from([D, R]))
def test_monotone_in_beta(a, beta, g, variant):
    lo = TransverseSpec(a, beta, g, variant)
    hi = TransverseSpec(a, beta * 1.05, g, variant)
    if variant is D and beta * a <= 2.0:
        return
    assert solve_transverse(hi).zeta < solve_transverse(lo).zeta


def test_zeta_offset_consistency():
    for spec in (TransverseSpec(0.3, 40.0), TransverseSpec(0.3, 40.0, 0.5, R)):
        m = solve_transverse(spec)
        assert m.zeta + spec.beta**2 / 4 == pytest.approx(m.offset, abs=1e-12)
        assert np.sign(m.offset) == (1 if spec.variant is D else -1)
