import math

import numpy as np
import pytest
from hypothesis import given, strategies as st
from hypothesis.extra import numpy as hnp

from dfma.di import DiSpectrum
from dfma.errors import InsufficientCandidatesError, ParameterError, ShapeError
from dfma.matching import (FmsCurve, Regime, classify_regime, default_betas, fms_avg, fms_sweep,
                           select_boundary)

pmfs = hnp.arrays(np.float64, st.integers(2, 33), elements=st.floats(0.0, 1.0)).filter(lambda p: p.sum() > 1e-6)


def test_default_betas():
    b = default_betas()
    assert len(b) == 19 and b[0] == 0.05 and b[-1] == 0.95
    assert np.all(np.diff(b) > 0)


def test_dc_only_mass():
    di = DiSpectrum.from_pmf([1.0, 0.0, 0.0, 0.0, 0.0])
    for beta in (0.0, 0.3, 0.99):
        assert fms_avg(di, beta) == 1.0


@given(pmfs)
def test_memoryless_fms_is_one(p):
    assert fms_avg(DiSpectrum.from_pmf(p), 0.0) == pytest.approx(1.0, abs=1e-12)


def test_uniform_pmf_on_four_point_grid():
    di = DiSpectrum.from_pmf([1.0, 1.0, 1.0])
    direct = (1 + 0.25 / (0.25 + 1) + 1 / 9) / 3
    assert fms_avg(di, 0.5) == pytest.approx(direct, rel=1e-14)
    assert fms_avg(di, 0.5) == pytest.approx(0.4370, abs=1e-4)


@given(pmfs, st.floats(0.0, 0.999))
def test_fms_bounds(p, beta):
    assert 0.0 <= fms_avg(DiSpectrum.from_pmf(p), beta) <= 1.0


@given(pmfs, st.lists(st.floats(0.0, 0.999), min_size=3, max_size=12, unique=True))
def test_fms_monotone_along_sweep(p, betas):
    curve = fms_sweep(DiSpectrum.from_pmf(p), sorted(betas))
    assert np.all(np.diff(curve.fms) <= 1e-12)


def test_sweep_validation():
    di = DiSpectrum.from_pmf([0.2, 0.8])
    with pytest.raises(InsufficientCandidatesError):
        fms_sweep(di, [0.1, 0.2])
    with pytest.raises(ParameterError):
        fms_sweep(di, [0.1, 0.1, 0.2])
    with pytest.raises(ParameterError):
        fms_sweep(di, [0.3, 0.2, 0.1])
    with pytest.raises(ParameterError):
        fms_sweep(di, [0.1, 0.5, 1.0])


def test_dc_only_sweep_is_flat_and_degenerate():
    curve = fms_sweep(DiSpectrum.from_pmf([1.0, 0.0, 0.0]), [0.0, 0.5, 0.9])
    np.testing.assert_array_equal(curve.fms, 1.0)
    knee = select_boundary(curve)
    assert knee.degenerate and knee.beta_dagger == 0.0 and knee.index == 0


def test_worked_example():
    knee = select_boundary(FmsCurve(np.array([0.1, 0.5, 0.9]), np.array([1.0, 0.5, 0.0])))
    # phi_2 from log(2/(10/9)) / log(10/(10/9)) = log(1.8) / log(9)
    phi2 = math.log(1.8) / math.log(9.0)
    assert knee.phis[1] == pytest.approx(phi2, rel=1e-14)
    assert knee.phis[1] == pytest.approx(0.2675, abs=1e-4)
    assert knee.deviations[1] == pytest.approx(0.2325, abs=1e-4)
    assert knee.deviations[0] == 0.0 and knee.deviations[2] == 0.0
    assert knee.beta_dagger == 0.5 and knee.index == 1 and not knee.degenerate
    assert knee.tau_dagger == 2.0


def test_linear_curve_ties_to_first():
    betas = np.array([0.1, 0.5, 0.9])
    tau = 1 / (1 - betas)
    phi = (np.log(tau) - np.log(tau[0])) / (np.log(tau[-1]) - np.log(tau[0]))
    knee = select_boundary(FmsCurve(betas, 1.0 - phi))
    assert knee.deviations.max() < 1e-15
    assert knee.index == 0 and knee.beta_dagger == 0.1


@given(st.lists(st.floats(0.0, 0.99), min_size=3, max_size=20, unique=True),
       st.lists(st.floats(0.0, 1.0), min_size=20, max_size=20))
def test_knee_invariants(betas, fms):
    betas = np.array(sorted(betas))
    fms = np.sort(np.array(fms[:len(betas)]))[::-1]
    a = select_boundary(FmsCurve(betas, fms))
    b = select_boundary(FmsCurve(betas.copy(), fms.copy()))
    assert a.to_json() == b.to_json()
    if not a.degenerate:
        assert a.phis[0] == 0.0 and a.phis[-1] == 1.0
        assert abs(a.deviations[0]) <= 1e-15 and abs(a.deviations[-1]) <= 1e-15
        assert np.all(a.deviations >= 0)
        assert a.index == int(np.argmax(a.deviations))
        assert a.beta_dagger == betas[a.index]


def test_fms_csv_round_trip():
    curve = fms_sweep(DiSpectrum.from_pmf([0.1, 0.3, 0.6]), default_betas())
    text = curve.to_csv()
    assert text.splitlines()[0] == "beta,tau,fms"
    back = FmsCurve.from_csv(text)
    np.testing.assert_array_equal(back.betas, curve.betas)
    np.testing.assert_array_equal(back.fms, curve.fms)
    with pytest.raises(ShapeError):
        FmsCurve.from_csv("beta,fms\n")
    with pytest.raises(ShapeError):
        FmsCurve.from_csv("a,b\n1,2\n")


def test_regimes():
    assert classify_regime(0.6, 0.6) is Regime.OVER_LOW_PASS
    assert classify_regime(0.001, 0.6) is Regime.UNDER_FILTER
    assert classify_regime(0.3, 0.6) is Regime.STABILITY_WINDOW
    assert Regime.OVER_LOW_PASS.value == "OverLowPass"
    with pytest.raises(ParameterError):
        classify_regime(1.2, 0.5)
