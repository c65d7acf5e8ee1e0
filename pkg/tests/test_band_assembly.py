from __future__ import annotations

import math

import numpy as np
import pytest

from leaky_bands.band_assembly import ESSENTIAL_BANNER, assemble_bands, gap_persistence_check
from leaky_bands.curve_geometry import fourier_profile
from leaky_bands.errors import AssumptionError, PreconditionError
from leaky_bands.fiber2d import StripGrid, a_of_beta
from leaky_bands.hill_floquet import band_table


def test_free_bands_touch():
    res = assemble_bands(fourier_profile(1.0), 10.0, theta_count=17, J=4)
    j = np.arange(4)
    np.testing.assert_allclose(res.bands[:, 0], -25.0 + (j * math.pi) ** 2, atol=1e-9)
    np.testing.assert_allclose(res.bands[:, 1], -25.0 + ((j + 1) * math.pi) ** 2, atol=1e-9)
    assert res.gap_intervals == []
    assert res.a == pytest.approx(a_of_beta(10.0))


def test_sine_profile_opens_second_gap():
    res = assemble_bands(fourier_profile(1.0, sin=[0.5]), 40.0, theta_count=17, J=4)
    (j, lo, hi), = res.gap_intervals
    assert j == 2
    assert hi - lo == pytest.approx(1 / 32, rel=1e-3)
    assert res.gaps.first_open_gap == 2


def test_shift_is_exact():
    prof = fourier_profile(1.0, sin=[0.3], cos=[0, 0.2])
    table = band_table(prof, 9, 5)
    res = assemble_bands(prof, 25.0, table=table)
    assert np.array_equal(res.lambda_hat, table.eigenvalues - 0.25 * 25.0**2)
    assert np.array_equal(res.lambda_zero, table.at_zero - 156.25)
    for (t, row), (t0, row0) in zip(res.rows(), table.rows()):
        assert t == t0
        assert np.array_equal(row, row0 - 156.25)


def test_result_dict():
    d = assemble_bands(fourier_profile(1.0, sin=[0.5]), 40.0, theta_count=9, J=3).to_dict()
    assert d["essential_spectrum"] == ESSENTIAL_BANNER
    assert [b["j"] for b in d["bands"]] == [1, 2, 3]
    assert d["gaps"][0]["j"] == 2


def test_assumption_failure_propagates():
    with pytest.raises(AssumptionError) as info:
        assemble_bands(fourier_profile(1.0, sin=[6.0]), 10.0)
    assert "A5" in info.value.report.failed()


def test_zero_profile_gap_persistence():
    (row,) = gap_persistence_check(fourier_profile(1.0), [20.0], 1, StripGrid(32, 32))
    assert row.limit == 0.0
    assert abs(row.fiber_gap) < 1e-9
    assert row.envelope == pytest.approx(math.log(20.0) / 20.0)


def test_gap_persistence_refuses_small_beta():
    with pytest.raises(PreconditionError):
        gap_persistence_check(fourier_profile(1.0, sin=[0.3]), [3.0], 2, StripGrid(16, 16))
