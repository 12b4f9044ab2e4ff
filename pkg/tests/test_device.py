import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from mosajscc.device import (
    MosfetParams,
    approx_slope_from_currents,
    curve_slope_exact,
    ids_forward,
    invert_vds,
)
from mosajscc.errors import ConfigError, DeviceOffError, InversionError
from oracles import ids_mp

# frozen from oracles.ids_mp at 40 digits
IDS_2V_5V = 1.45801215e-4
IDS_2V_5V_LAM0 = 1.23039e-4
IDS_2V_5P1V = 1.462564593e-4


def test_forward_matches_high_precision(dev):
    assert ids_forward(dev, 2.0, 5.0) == pytest.approx(IDS_2V_5V, rel=1e-12)
    assert float(ids_mp("2.0", "5.0")) == pytest.approx(IDS_2V_5V, rel=1e-15)


def test_forward_lambda_zero_drops_vds(dev):
    d0 = dev.with_lambda(0.0)
    assert ids_forward(d0, 2.0, 5.0) == ids_forward(d0, 2.0, 9.0)
    assert ids_forward(d0, 2.0, 5.0) == pytest.approx(IDS_2V_5V_LAM0, rel=1e-12)


def test_forward_vanishes_at_threshold(dev):
    assert ids_forward(dev, dev.vth + 1e-6, 7.0) < 1e-15


@pytest.mark.parametrize("vgs", [0.74, 0.5, 0.0])
def test_device_off(dev, vgs):
    with pytest.raises(DeviceOffError):
        ids_forward(dev, vgs, 5.0)


@pytest.mark.parametrize(
    "kw",
    [dict(kprime=0, vth=0.7, lam=0.01), dict(kprime=1e-4, vth=0, lam=0.01), dict(kprime=1e-4, vth=0.7, lam=-1e-3)],
)
def test_param_validation(kw):
    with pytest.raises(ConfigError):
        MosfetParams(**kw)


def test_invert_examples(dev):
    assert invert_vds(dev, 2.0, IDS_2V_5V) == pytest.approx(5.0, abs=1e-9)
    assert invert_vds(dev, 2.0, IDS_2V_5V_LAM0) == pytest.approx(0.0, abs=1e-9)
    # on the 2.25 V curve a current from the 2.0 V curve maps to negative Vds
    i = ids_forward(dev, 2.0, 9.5)
    assert invert_vds(dev, 2.25, i) == pytest.approx(-1.593796858, abs=1e-8)


def test_invert_errors(dev):
    with pytest.raises(InversionError):
        invert_vds(dev.with_lambda(0.0), 2.0, 1e-4)
    with pytest.raises(DeviceOffError):
        invert_vds(dev, 0.5, 1e-4)


def test_slopes(dev):
    assert curve_slope_exact(dev, 2.0) == pytest.approx(4.552443e-6, rel=1e-12)
    assert curve_slope_exact(dev.with_lambda(0.0), 3.0) == 0.0
    assert approx_slope_from_currents(dev, 1e-4, 1e-4) == pytest.approx(3.7e-6, rel=1e-12)
    assert approx_slope_from_currents(dev, IDS_2V_5V, IDS_2V_5P1V) == pytest.approx(5.40306697455e-6, rel=1e-9)
    assert approx_slope_from_currents(dev.with_lambda(0.0), 1e-4, 2e-4) == 0.0


vgs_st = st.floats(0.75, 6.0)
vds_st = st.floats(0.0, 20.0)
lam_st = st.floats(1e-3, 0.2)


def _dev(lam):
    return MosfetParams(155e-6, 0.74, lam)


@given(vgs_st, vgs_st, vds_st, lam_st)
def test_monotone_in_vgs(a, b, vds, lam):
    if abs(a - b) < 1e-6:
        return
    lo, hi = sorted((a, b))
    assert ids_forward(_dev(lam), lo, vds) < ids_forward(_dev(lam), hi, vds)


@given(vgs_st, vds_st, vds_st, lam_st)
def test_monotone_in_vds(vgs, a, b, lam):
    if abs(a - b) < 1e-6:
        return
    lo, hi = sorted((a, b))
    assert ids_forward(_dev(lam), vgs, lo) < ids_forward(_dev(lam), vgs, hi)


@given(vgs_st, vds_st, lam_st)
def test_inversion_roundtrip(vgs, vds, lam):
    p = _dev(lam)
    assert abs(invert_vds(p, vgs, ids_forward(p, vgs, vds)) - vds) <= 1e-9


@given(vgs_st, vds_st, vds_st, lam_st)
def test_two_point_slope_identity(vgs, v1, v2, lam):
    if abs(v1 - v2) < 1e-3:
        return
    p = _dev(lam)
    two_point = (ids_forward(p, vgs, v2) - ids_forward(p, vgs, v1)) / (v2 - v1)
    assert math.isclose(two_point, curve_slope_exact(p, vgs), rel_tol=1e-9)


@given(vgs_st, vds_st, lam_st)
def test_approximation_error_is_lambda_vds(vgs, vds, lam):
    p = _dev(lam)
    i = ids_forward(p, vgs, vds)
    exact = curve_slope_exact(p, vgs)
    rel = abs(approx_slope_from_currents(p, i, i) - exact) / exact
    assert rel == pytest.approx(lam * vds, rel=1e-9, abs=1e-12)
