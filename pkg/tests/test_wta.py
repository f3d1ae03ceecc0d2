import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cosine_am.wta import (
    WtaConfig, equal_input_slopes, input_margin, resolve_winner, solve_static,
    verify_sensitivities, winner_share,
)

OPEN = WtaConfig(feedback_gain=0.0)


def bisect_common_node(iz, cfg):
    """Independent oracle: total output current falls monotonically in V_c."""
    iz = np.asarray(iz, dtype=float)
    u, v_a = cfg.u, cfg.mosfet.v_a

    def excess(vc):
        v = v_a * (iz / (cfg.i_s * math.exp(vc / u)) - 1.0)
        with np.errstate(over="ignore"):  # +inf still compares correctly
            return cfg.i_o * np.exp((v - vc) / u).sum() - cfg.i_bias

    lo, hi = u * math.log(iz.max() / cfg.i_s) - 1.0, u * math.log(iz.max() / cfg.i_s) + 0.5
    assert excess(lo) > 0 > excess(hi)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        lo, hi = (mid, hi) if excess(mid) > 0 else (lo, mid)
    vc = 0.5 * (lo + hi)
    return vc, v_a * (iz / (cfg.i_s * math.exp(vc / u)) - 1.0)


@pytest.mark.parametrize("iz", [[100e-9, 90e-9], [300e-9, 299e-9], [20e-9, 500e-9]])
def test_matches_bisection_oracle(iz):
    sol = solve_static(iz, OPEN)
    vc, v = bisect_common_node(iz, OPEN)
    assert sol.converged
    assert sol.v_common == pytest.approx(vc, abs=1e-9)
    assert np.allclose(sol.v_rails, v, atol=1e-7)


def test_kcl_at_common_node():
    sol = solve_static([1e-7, 2e-7, 3e-7, 0.5e-7], OPEN)
    assert sol.i_out.sum() == pytest.approx(OPEN.i_bias, rel=1e-9)


def test_feedback_sharpens_winner():
    iz = [100e-9, 99e-9, 50e-9]
    open_ = solve_static(iz, OPEN)
    closed = solve_static(iz, WtaConfig())
    assert closed.converged and closed.feedback_iterations >= 1
    share = lambda s: s.i_out[0] / s.i_out.sum()
    assert share(closed) > share(open_)
    assert closed.is_resolvable(2.0)


def test_ties_go_low_and_are_unresolvable():
    w, ok = resolve_winner([5e-8, 1e-7, 1e-7])
    assert w == 1 and not ok


def test_rejects_bad_inputs():
    with pytest.raises(ValueError):
        solve_static([1e-7])
    with pytest.raises(ValueError):
        solve_static([1e-7, 0.0])
    with pytest.raises(ValueError):
        solve_static([1e-7, 2e-7], WtaConfig(m=3))
    with pytest.raises(ValueError):
        WtaConfig(dominance=0.5)


def test_margin_definition():
    assert input_margin([2.0, 1.0, 1.5]) == pytest.approx(0.25)


def test_winner_share_logistic():
    v = np.array([0.1, 0.0])
    assert winner_share(v, 0, 0.0387) == pytest.approx(1 / (1 + math.exp(-0.1 / 0.0387)))


@pytest.mark.parametrize("m", [2, 4, 8, 16])
def test_equal_input_slope(m):
    iz = np.full(m, 200e-9)
    res = verify_sensitivities(iz, h=1e-5)
    rail, _ = equal_input_slopes(m, 200e-9, OPEN.mosfet.v_a)
    assert res["fd"][0] == pytest.approx(rail, rel=0.02)


def test_two_rail_slope_is_half_va_over_iz():
    rail, other = equal_input_slopes(2, 1e-7, 20.0)
    assert rail == pytest.approx(20.0 / (2 * 1e-7))
    assert other == pytest.approx(-rail)


def test_sensitivities_interior_point():
    # interior: inputs within 2% so every |V_i| << V_A
    res = verify_sensitivities([150e-9, 149e-9, 148e-9, 147.5e-9])
    assert np.abs(res["operating_point"].v_rails).max() < 0.05 * OPEN.mosfet.v_a
    assert res["max_rel_dev"] < 0.05


def test_small_signal_form_fails_far_from_balance():
    # a 20% margin drives losing rails toward -V_A, outside the linearization
    res = verify_sensitivities([150e-9, 120e-9, 80e-9, 60e-9])
    assert res["rel_dev"][0] < 0.01
    assert res["max_rel_dev"] > 0.1


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 12), st.floats(0.01, 0.5), st.integers(0, 2**31))
def test_resolution_property(m, margin, seed):
    rng = np.random.default_rng(seed)
    top = rng.uniform(20e-9, 1e-6)
    iz = rng.uniform(0.05, 1 - margin, m) * top
    iz[0], iz[1] = top, top * (1 - margin)
    iz = rng.permutation(iz)
    w, ok = resolve_winner(iz)
    assert iz[w] == top and ok


def test_deterministic():
    a = solve_static([1e-7, 1.01e-7, 3e-8])
    b = solve_static([1e-7, 1.01e-7, 3e-8])
    assert np.array_equal(a.v_rails, b.v_rails) and a.winner == b.winner == 1


def test_to_dict_verbosity():
    sol = solve_static([1e-7, 2e-7])
    assert "v_rails" not in sol.to_dict() and "v_rails" in sol.to_dict(verbose=True)
