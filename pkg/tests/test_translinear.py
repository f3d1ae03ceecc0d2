import numpy as np
import pytest
from hypothesis import given, strategies as st

from cosine_am.device import MosfetParams, vgs_for_current
from cosine_am.translinear import (
    TranslinearConfig, certify_operating_region, certify_rows, row_similarities, squared_ratio,
)

CFG = TranslinearConfig()
LO, HI = CFG.current_window


def test_window_from_voltage_limits():
    # floor 3 * eta * V_T -> exp(3) nA; ceiling v0 / 2 = 0.3 V -> exp(0.3 / 0.0387) nA
    assert LO == pytest.approx(np.exp(3) * 1e-9)
    assert HI == pytest.approx(np.exp(0.3 / 0.0387) * 1e-9)


def test_squared_ratio_hand_values():
    out = squared_ratio(300e-9, 600e-9)
    assert out.iz == pytest.approx(150e-9) and out.in_region
    assert not squared_ratio(5e-9, 600e-9).in_region


def test_mirror_ratio_scales_output():
    cfg = TranslinearConfig(mirror_ratio=0.5)
    assert squared_ratio(200e-9, 400e-9, cfg).iz == pytest.approx(0.5 * 100e-9)


def test_soft_saturation_clips_at_window_edge():
    cfg = TranslinearConfig(soft_saturation=True)
    lo, hi = cfg.current_window
    out = squared_ratio(10 * hi, 20 * hi, cfg)
    assert out.iz == pytest.approx(hi * hi / (20 * hi))
    assert not out.in_region


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        squared_ratio(1e-7, 0.0)
    with pytest.raises(ValueError):
        squared_ratio(-1e-7, 1e-7)
    with pytest.raises(ValueError):
        TranslinearConfig(ix_min=1e-6, ix_max=1e-7)


@given(st.floats(LO, HI), st.floats(1.0, 4.0))
def test_loop_residual_vanishes(ix, ratio):
    iz, ok, residual, vgs = certify_rows(np.array([ix]), np.array([ix * ratio]))
    assert abs(residual[0]) < 1e-12
    assert vgs["M1"][0] == pytest.approx(vgs_for_current(ix))


def test_report_names_violations():
    r = certify_operating_region(3e-6, 3e-6)
    assert not r.in_region
    assert any("stack" in s for s in r.reasons)
    r = certify_operating_region(0.0, 1e-7)
    assert not r.in_region and r.reasons == ["non-positive input current"]


def test_report_in_region():
    r = certify_operating_region(300e-9, 600e-9)
    assert r.in_region and r.reasons == []
    assert set(r.to_dict()["vgs"]) == {"M1", "M2", "M4", "M5"}


def test_row_similarities_zero_ix_rows():
    iz, ok = row_similarities(np.array([0.0, 300e-9]), np.array([100e-9, 600e-9]))
    assert iz[0] == 0 and not ok[0] and ok[1]


def test_mosfet_corner_shifts_window():
    cfg = TranslinearConfig().with_mosfet(MosfetParams(i0=2e-9))
    assert cfg.current_window[0] == pytest.approx(2 * LO)
