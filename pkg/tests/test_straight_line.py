from __future__ import annotations

import math

import numpy as np
import pytest

from leaky_bands.curve_geometry import fourier_profile, preset_profile
from leaky_bands.errors import ConvergenceError
from leaky_bands.straight_line import (
    BETA0_NOTE,
    LineSpectrum,
    check_decay_assumptions,
    line_asymptotics,
    line_discrete_spectrum,
)

from oracles import PT_LAMBDA, PT_MU1

PT = preset_profile("sech", c=0.8)


@pytest.fixture(scope="module")
def pt_spectrum():
    return line_discrete_spectrum(PT)


def test_poschl_teller_single_level(pt_spectrum):
    assert pt_spectrum.n == 1
    assert pt_spectrum.mu[0] == pytest.approx(PT_MU1, abs=1e-8)
    assert PT_MU1 == pytest.approx(-(PT_LAMBDA**2), rel=1e-14)
    assert pt_spectrum.convergence_flag


def test_poschl_teller_two_levels():
    # c^2 / 4 = lam (lam + 1) with lam = 1.5 gives levels -(lam - j)^2
    spec = line_discrete_spectrum(preset_profile("sech", c=math.sqrt(15.0)))
    np.testing.assert_allclose(spec.mu, [-2.25, -0.25], atol=1e-8)


def test_dirichlet_cut_close_but_biased(pt_spectrum):
    d = line_discrete_spectrum(PT, boundary="dirichlet")
    assert d.boundary == "dirichlet"
    assert abs(d.mu[0] - PT_MU1) < 1e-5
    # a Dirichlet cut only raises levels
    assert d.mu[0] > pt_spectrum.mu[0]


def test_zero_profile_has_no_bound_states():
    spec = line_discrete_spectrum(preset_profile("zero"))
    assert spec.n == 0 and spec.convergence_flag


def test_scaling_multiplies_levels(pt_spectrum):
    spec = line_discrete_spectrum(preset_profile("sech", c=0.8, scale=2.0))
    np.testing.assert_allclose(spec.mu, 4.0 * pt_spectrum.mu, rtol=1e-7)


def test_levels_decrease_with_amplitude():
    mus = [line_discrete_spectrum(preset_profile("gaussian", c=c), n_points=2048).mu[0] for c in (0.5, 1.0, 1.5)]
    assert mus[0] > mus[1] > mus[2]


def test_decay_report_examples():
    rep = check_decay_assumptions(PT)
    assert rep.all_passed
    assert rep.tau_fit > 1.25
    slow = check_decay_assumptions(preset_profile("lorentzian", c=1.0, p=1.0))
    assert slow.failed() == ["A9"]
    assert slow.tau_fit == pytest.approx(1.0, abs=0.01)
    quad = check_decay_assumptions(preset_profile("lorentzian", c=1.0))
    assert quad.tau_fit == pytest.approx(2.0, abs=0.01)
    assert check_decay_assumptions(preset_profile("zero")).failed() == ["A7"]


def test_decay_report_json_safe():
    d = check_decay_assumptions(preset_profile("gaussian", c=1.5)).to_dict()
    assert d["K_fit"] == "inf"
    assert d["assumptions"]["A8"]["value"] > 0


def test_decay_report_rejects_periodic():
    with pytest.raises(ValueError):
        check_decay_assumptions(fourier_profile(1.0, sin=[0.3]))


def test_asymptotics_arithmetic(pt_spectrum):
    out = line_asymptotics(pt_spectrum, [10.0, 20.0])
    np.testing.assert_allclose(out.thresholds, [-25.0, -100.0])
    np.testing.assert_allclose(out.lambdas[:, 0], [-25.0 + PT_MU1, -100.0 + PT_MU1], atol=1e-8)
    assert out.lambdas[0, 0] == pytest.approx(-25.02, abs=1e-3)
    assert out.note == BETA0_NOTE


def test_asymptotics_refuse_unconverged():
    spec = LineSpectrum(np.array([-0.1]), 40.0, 64, False)
    with pytest.raises(ConvergenceError):
        line_asymptotics(spec, [10.0])


def test_argument_validation():
    with pytest.raises(ValueError):
        line_discrete_spectrum(PT, boundary="neumann")
    with pytest.raises(ValueError):
        line_discrete_spectrum(PT, n_points=101)
