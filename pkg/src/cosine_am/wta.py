"""M-rail current-mode winner-take-all network, solved at DC.

Per rail i the sourcing transistor (gate on the common node V_c, drain on
V_i) carries the input current and the output transistor (gate V_i, source
V_c) carries the output current; the output currents share the bias:

    iz_i = I_s * exp(V_c / U) * (1 + V_i / V_A)
    Io_i = I_o * exp((V_i - V_c) / U)
    sum(Io_i) = I_c

with U = eta * V_T. The optional feedback mirrors add ``alpha * Io_i`` back
onto each input, iterated to a fixed point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .device import MosfetParams


class WtaConvergenceError(RuntimeError):
    pass


@dataclass(frozen=True)
class WtaConfig:
    m: int | None = None
    i_bias: float = 100e-9
    mosfet: MosfetParams = field(default_factory=MosfetParams)
    source_w_over_l: float = 1.0
    output_w_over_l: float = 10.0
    feedback_gain: float = 1.0
    feedback_iters: int = 100
    feedback_tol: float = 1e-6
    resolution_target: float = 0.01
    dominance: float = 2.0
    newton_tol: float = 1e-10
    newton_max_iter: int = 200
    max_halvings: int = 20

    def __post_init__(self):
        if self.m is not None and self.m < 2:
            raise ValueError("a WTA needs m >= 2 rails")
        if not self.i_bias > 0:
            raise ValueError("i_bias must be positive")
        if self.feedback_gain < 0:
            raise ValueError("feedback_gain must be >= 0")
        if not self.dominance >= 1:
            raise ValueError("dominance must be >= 1")
        if self.feedback_iters < 1:
            raise ValueError("feedback_iters must be >= 1")

    @property
    def u(self) -> float:
        """Exponential slope voltage eta * V_T used by every WTA transistor."""
        return self.mosfet.n_vt

    @property
    def i_s(self) -> float:
        return self.mosfet.i_spec * self.source_w_over_l

    @property
    def i_o(self) -> float:
        return self.mosfet.i_spec * self.output_w_over_l

    def with_mosfet(self, mosfet: MosfetParams) -> "WtaConfig":
        return replace(self, mosfet=mosfet)


@dataclass
class WtaSolution:
    v_rails: np.ndarray
    v_common: float
    i_out: np.ndarray
    winner: int
    margin: float
    converged: bool
    newton_residual: float
    iz_input: np.ndarray
    iz_effective: np.ndarray
    newton_iterations: int = 0
    feedback_iterations: int = 0
    winner_share_history: list = field(default_factory=list)

    @property
    def i_bias(self) -> float:
        return float(self.i_out.sum())

    def is_resolvable(self, dominance: float = 2.0) -> bool:
        if not self.converged or self.margin <= 0:
            return False
        others = np.delete(self.i_out, self.winner)
        return bool(self.i_out[self.winner] >= dominance * others.max())

    def to_dict(self, verbose: bool = False) -> dict:
        d = {
            "winner": int(self.winner),
            "margin": float(self.margin),
            "converged": bool(self.converged),
            "newton_residual": float(self.newton_residual),
            "feedback_iterations": int(self.feedback_iterations),
        }
        if verbose:
            d.update(
                v_rails=[float(v) for v in self.v_rails],
                v_common=float(self.v_common),
                i_out=[float(i) for i in self.i_out],
                iz_effective=[float(i) for i in self.iz_effective],
            )
        return d


def input_margin(iz) -> float:
    """(largest - second largest) / largest."""
    top = np.sort(np.asarray(iz, dtype=float))[::-1]
    return float((top[0] - top[1]) / top[0])


def _lse(x):
    mx = np.max(x)
    if not np.isfinite(mx):
        return mx
    return mx + math.log(np.exp(x - mx).sum())


def _residuals(y, vc, log_iz, cfg):
    u = cfg.u
    v = cfg.mosfet.v_a * np.expm1(y)
    r_rail = y + vc / u - (log_iz - math.log(cfg.i_s))
    log_out = math.log(cfg.i_o) + (v - vc) / u
    r_c = _lse(log_out) - math.log(cfg.i_bias)
    return r_rail, r_c, log_out


def _newton(iz, cfg, y0=None, vc0=None):
    """Damped Newton on (y, V_c) with y_i = ln(1 + V_i / V_A).

    In these coordinates the rail equations are linear and the Jacobian is an
    arrowhead matrix, so each step is O(M).
    """
    u = cfg.u
    v_a = cfg.mosfet.v_a
    log_iz = np.log(iz)
    if y0 is None:
        y = np.zeros_like(iz)
        vc = u * (log_iz.max() - math.log(cfg.i_s))
    else:
        y, vc = y0.copy(), float(vc0)
    r_rail, r_c, log_out = _residuals(y, vc, log_iz, cfg)
    res = max(np.abs(r_rail).max(), abs(r_c))
    it = 0
    while res >= cfg.newton_tol and it < cfg.newton_max_iter:
        it += 1
        w = np.exp(log_out - _lse(log_out))
        g = w * v_a * np.exp(y) / u
        dvc = (r_c - np.dot(g, r_rail)) * u / (1.0 + g.sum())
        dy = -r_rail - dvc / u
        step = 1.0
        for _ in range(cfg.max_halvings + 1):
            y_new = y + step * dy
            vc_new = vc + step * dvc
            with np.errstate(over="ignore", invalid="ignore"):
                rr, rc, lo = _residuals(y_new, vc_new, log_iz, cfg)
                new = max(np.abs(rr).max(), abs(rc))
            if np.isfinite(new) and new < res:
                break
            step *= 0.5
        else:
            break
        y, vc, r_rail, r_c, log_out, res = y_new, vc_new, rr, rc, lo, new
    return y, vc, log_out, float(res), it


def _solve_once(iz, cfg, warm=None):
    y0, vc0 = warm if warm is not None else (None, None)
    y, vc, log_out, res, it = _newton(iz, cfg, y0, vc0)
    v = cfg.mosfet.v_a * np.expm1(y)
    i_out = np.exp(log_out)
    return v, vc, i_out, res, it, (y, vc)


def _argmax_first(x) -> int:
    return int(np.flatnonzero(x == x.max())[0])


def solve_static(iz, cfg: WtaConfig = WtaConfig()) -> WtaSolution:
    """DC operating point of the WTA for input currents ``iz``.

    With ``feedback_gain > 0`` the mirror loop is closed by fixed-point
    iteration on ``iz_eff = iz + alpha * i_out`` until the outputs move by
    less than ``feedback_tol * i_bias``. Non-convergence is reported through
    ``converged`` rather than raised.
    """
    iz = np.asarray(iz, dtype=float)
    if iz.ndim != 1 or iz.size < 2:
        raise ValueError("need a 1-D array of at least two input currents")
    if cfg.m is not None and iz.size != cfg.m:
        raise ValueError(f"expected {cfg.m} rails, got {iz.size}")
    if np.any(~(iz > 0)):
        raise ValueError("WTA input currents must be positive")

    v, vc, i_out, res, it, warm = _solve_once(iz, cfg)
    total_it = it
    ok = res < cfg.newton_tol
    lead = _argmax_first(iz)
    history = [float(i_out[lead] / i_out.sum())]
    iz_eff = iz
    fb_iters = 0
    if cfg.feedback_gain > 0 and ok:
        settled = False
        for fb_iters in range(1, cfg.feedback_iters + 1):
            iz_eff = iz + cfg.feedback_gain * i_out
            v, vc, new_out, res, it, warm = _solve_once(iz_eff, cfg, warm)
            total_it += it
            delta = np.abs(new_out - i_out).max()
            i_out = new_out
            history.append(float(i_out[lead] / i_out.sum()))
            if res >= cfg.newton_tol:
                break
            if delta < cfg.feedback_tol * cfg.i_bias:
                settled = True
                break
        ok = settled and res < cfg.newton_tol

    return WtaSolution(
        v_rails=v,
        v_common=float(vc),
        i_out=i_out,
        winner=_argmax_first(i_out),
        margin=input_margin(iz),
        converged=bool(ok),
        newton_residual=res,
        iz_input=iz,
        iz_effective=np.asarray(iz_eff, dtype=float),
        newton_iterations=total_it,
        feedback_iterations=fb_iters,
        winner_share_history=history,
    )


def resolve_winner(iz, cfg: WtaConfig = WtaConfig()):
    """``(winner, resolvable)`` after feedback settling.

    Exact ties are never resolvable and go to the lowest index.
    """
    sol = solve_static(iz, cfg)
    return sol.winner, sol.is_resolvable(cfg.dominance)


def winner_share(v_rails, rail: int, u: float) -> float:
    """I_o[rail] / I_c from rail voltages alone (logistic form)."""
    v = np.asarray(v_rails, dtype=float)
    others = np.delete(v, rail)
    return float(1.0 / (1.0 + np.exp((others - v[rail]) / u).sum()))


def small_signal_sensitivities(op: WtaSolution, perturbed_rail: int = 0,
                               cfg: WtaConfig = WtaConfig()):
    """Closed-form dV/dIz for a small change of one input, feedback excluded.

    Returns ``(dv_rail, dv_others)``: the perturbed rail's slope
    ``(U + V_A * (1 - share)) / Iz`` and the common slope of every other
    rail ``-V_A * share / Iz``, where ``share`` is the perturbed rail's
    fraction of the bias current.
    """
    k = perturbed_rail
    share = winner_share(op.v_rails, k, cfg.u)
    i_z = float(op.iz_effective[k])
    v_a = cfg.mosfet.v_a
    dv_rail = (cfg.u + v_a * (1.0 - share)) / i_z
    dv_other = -v_a * share / i_z
    return dv_rail, [dv_other] * (op.v_rails.size - 1)


def equal_input_slopes(m: int, i_z: float, v_a: float):
    """Equal-input limit: ((M-1)/M) V_A / Iz for the rail, -V_A/(M Iz) for the rest."""
    return (m - 1) / m * v_a / i_z, -v_a / (m * i_z)


def verify_sensitivities(iz, cfg: WtaConfig = WtaConfig(), h: float = 1e-4,
                         perturbed_rail: int = 0) -> dict:
    """Central finite differences of the rail voltages against the closed form.

    Feedback is switched off: the closed form describes the open loop.
    """
    cfg = replace(cfg, feedback_gain=0.0)
    iz = np.asarray(iz, dtype=float)
    k = perturbed_rail
    op = solve_static(iz, cfg)
    step = h * iz[k]
    up, dn = iz.copy(), iz.copy()
    up[k] += step
    dn[k] -= step
    s_up = solve_static(up, cfg)
    s_dn = solve_static(dn, cfg)
    if not (op.converged and s_up.converged and s_dn.converged):
        raise WtaConvergenceError("solver did not converge at the operating point")
    fd = (s_up.v_rails - s_dn.v_rails) / (2 * step)
    dv_rail, dv_others = small_signal_sensitivities(op, k, cfg)
    analytic = np.empty_like(fd)
    analytic[k] = dv_rail
    analytic[np.arange(iz.size) != k] = dv_others
    dev = np.abs(fd - analytic) / np.abs(analytic)
    return {
        "fd": fd,
        "analytic": analytic,
        "rel_dev": dev,
        "max_rel_dev": float(dev.max()),
        "share": winner_share(op.v_rails, k, cfg.u),
        "operating_point": op,
    }
