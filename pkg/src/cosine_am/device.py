"""Analog primitives: subthreshold MOSFET law and the 1FeFET1R memory cell.

Units are SI throughout (A, V, ohm). The FeFET is treated as a binary
storage element: low-V_TH stores 1, high-V_TH stores 0.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace

import numpy as np

THERMAL_VOLTAGE_300K = 0.0258


class OutOfSubthresholdWarning(UserWarning):
    """A gate-source voltage reached the subthreshold validity bound."""


@dataclass(frozen=True)
class MosfetParams:
    i0: float = 1e-9
    w_over_l: float = 1.0
    eta: float = 1.5
    v_t: float = THERMAL_VOLTAGE_300K
    v_a: float = 20.0
    vth_mos: float = 0.45

    def __post_init__(self):
        if not self.i0 > 0:
            raise ValueError(f"i0 must be positive, got {self.i0}")
        if not self.w_over_l > 0:
            raise ValueError(f"w_over_l must be positive, got {self.w_over_l}")
        if not self.eta >= 1:
            raise ValueError(f"eta must be >= 1, got {self.eta}")
        if not self.v_t > 0:
            raise ValueError(f"v_t must be positive, got {self.v_t}")
        if not self.v_a > 0:
            raise ValueError(f"v_a must be positive, got {self.v_a}")
        if not self.vth_mos > 0:
            raise ValueError(f"vth_mos must be positive, got {self.vth_mos}")

    @property
    def i_spec(self) -> float:
        """Drain current at V_GS = 0, i.e. I0 * W/L."""
        return self.i0 * self.w_over_l

    @property
    def n_vt(self) -> float:
        return self.eta * self.v_t


def in_subthreshold(v_gs, p: MosfetParams):
    return np.asarray(v_gs) < p.vth_mos


def subthreshold_current(v_gs, v_ds=0.0, p: MosfetParams = MosfetParams()):
    """Weak-inversion drain current with a linear Early-effect term.

    Works elementwise on arrays. Gate voltages at or above ``p.vth_mos``
    still return the exponential value but raise
    :class:`OutOfSubthresholdWarning`.
    """
    v_gs = np.asarray(v_gs, dtype=float)
    v_ds = np.asarray(v_ds, dtype=float)
    if np.any(~in_subthreshold(v_gs, p)):
        warnings.warn(
            f"v_gs >= vth_mos ({p.vth_mos} V): out of subthreshold region",
            OutOfSubthresholdWarning,
            stacklevel=2,
        )
    early = 1.0 + v_ds / p.v_a
    out = p.i_spec * np.exp(v_gs / p.n_vt) * early
    return out if out.ndim else float(out)


def vgs_for_current(i_ds, p: MosfetParams = MosfetParams()):
    """Inverse of :func:`subthreshold_current` at V_DS = 0."""
    i_ds = np.asarray(i_ds, dtype=float)
    if np.any(~(i_ds > 0)):
        raise ValueError("drain current must be positive to invert the subthreshold law")
    out = p.n_vt * np.log(i_ds / p.i_spec)
    return out if out.ndim else float(out)


# ---------------------------------------------------------------------------
# 1FeFET1R cell

# 1024-bit all-ones word reads ~600 nA on its wordline at unit scale.
DEFAULT_I_ON = 600e-9 / 1024


@dataclass(frozen=True)
class CellParams:
    """Nominal 1FeFET1R cell.

    ``v_read`` is the effective wordline read voltage across the cell; the
    FeFET channel resistance is whatever remains of ``v_read / i_on`` after
    the series resistor, so a large ``r_series`` puts the cell in the clamp
    regime where ``i_on`` tracks ``1 / r_series``.
    """

    i_on: float = DEFAULT_I_ON
    r_series: float = 0.995 * 0.1 / DEFAULT_I_ON
    i_off: float = 0.0
    vth_low: float = 0.2
    vth_high: float = 1.4
    v_read: float = 0.1
    n_vt: float = 1.5 * THERMAL_VOLTAGE_300K  # leakage slope for high-V_TH cells

    def __post_init__(self):
        if not self.i_on > self.i_off >= 0:
            raise ValueError(f"need i_on > i_off >= 0, got i_on={self.i_on}, i_off={self.i_off}")
        if not self.vth_low < self.vth_high:
            raise ValueError("vth_low must be below vth_high")
        if not self.r_series > 0:
            raise ValueError("r_series must be positive")
        if self.v_read / self.i_on < self.r_series * (1 - 1e-12):
            raise ValueError("r_series exceeds v_read / i_on; channel resistance would be negative")

    @property
    def r_channel(self) -> float:
        return max(self.v_read / self.i_on - self.r_series, 0.0)

    @classmethod
    def from_resistor(cls, r_series: float, v_read: float = 0.1, r_channel: float = 0.0, **kw):
        """Build a cell whose ON current is set by the series resistor."""
        return cls(i_on=v_read / (r_series + r_channel), r_series=r_series, v_read=v_read, **kw)

    def with_on_current(self, i_on: float) -> "CellParams":
        """Retune the resistor for a new ON current, keeping the clamp ratio."""
        ratio = self.r_series / (self.v_read / self.i_on)
        return replace(self, i_on=i_on, r_series=ratio * self.v_read / i_on,
                       i_off=min(self.i_off, 0.5 * i_on))


@dataclass(frozen=True)
class VariationSpec:
    """Statistical spreads of every varied quantity.

    ``fefet_attenuation`` (k) sets how much FeFET V_TH spread leaks through
    the resistor clamp into the ON current:
    ``sigma_cell_current_rel = sqrt(sigma_r_rel**2 + k * (sigma_vth_low / fefet_overdrive)**2)``.
    """

    sigma_vth_low: float = 0.054
    sigma_vth_high: float = 0.082
    sigma_r_rel: float = 0.08
    sigma_mos_size_rel: float = 0.10
    sigma_mos_vth_rel: float = 0.10
    sigma_supply_rel: float = 0.10
    fefet_attenuation: float = 0.0
    fefet_overdrive: float = 0.5
    truncation: float = 4.0
    rng_seed: int = 0

    def __post_init__(self):
        for name in ("sigma_vth_low", "sigma_vth_high", "sigma_r_rel", "sigma_mos_size_rel",
                     "sigma_mos_vth_rel", "sigma_supply_rel", "fefet_attenuation"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not self.fefet_overdrive > 0:
            raise ValueError("fefet_overdrive must be positive")
        if not self.truncation > 0:
            raise ValueError("truncation must be positive")

    @classmethod
    def none(cls, rng_seed: int = 0) -> "VariationSpec":
        return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0, rng_seed=rng_seed)

    @property
    def fefet_current_rel(self) -> float:
        """ON-current spread contributed by FeFET V_TH variation after clamping."""
        return math.sqrt(self.fefet_attenuation) * self.sigma_vth_low / self.fefet_overdrive

    @property
    def sigma_cell_current_rel(self) -> float:
        return math.hypot(self.sigma_r_rel, self.fefet_current_rel)

    @property
    def is_zero(self) -> bool:
        return not any((self.sigma_vth_low, self.sigma_vth_high, self.sigma_r_rel,
                        self.sigma_mos_size_rel, self.sigma_mos_vth_rel,
                        self.sigma_supply_rel, self.fefet_current_rel))


def make_rng(rng=None, spec: VariationSpec | None = None) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    if rng is None:
        rng = spec.rng_seed if spec is not None else 0
    return np.random.default_rng(rng)


def truncated_normal(rng: np.random.Generator, size=None, bound: float = 4.0):
    """Standard normal draws, redrawn until |z| <= bound."""
    z = rng.standard_normal(size)
    if np.ndim(z) == 0:
        while abs(z) > bound:
            z = rng.standard_normal()
        return float(z)
    bad = np.abs(z) > bound
    while bad.any():
        z[bad] = rng.standard_normal(int(bad.sum()))
        bad = np.abs(z) > bound
    return z


def relative_factor(rng: np.random.Generator, sigma: float, size=None, bound: float = 4.0):
    """Samples of ``1 + sigma * z`` with z truncated and the result kept positive."""
    z = truncated_normal(rng, size, bound)
    f = 1.0 + sigma * np.asarray(z)
    bad = f <= 0
    while bad.any():
        if f.ndim == 0:
            f = np.asarray(1.0 + sigma * truncated_normal(rng, None, bound))
        else:
            f[bad] = 1.0 + sigma * truncated_normal(rng, int(bad.sum()), bound)
        bad = f <= 0
    return f if f.ndim else float(f)


def sample_cell_currents(cell: CellParams, spec: VariationSpec, rng: np.random.Generator,
                         shape=(), leakage: bool | None = None):
    """Vectorized per-cell sampling.

    Returns ``(i_on, i_off)`` arrays of the given shape. Draw order is fixed:
    resistor factors, then FeFET residual factors, then (leakage mode only)
    high-V_TH shifts.
    """
    bound = spec.truncation
    r_fac = relative_factor(rng, spec.sigma_r_rel, shape, bound)
    r = cell.r_series * np.asarray(r_fac)
    r_ch = cell.r_channel
    i_on = cell.i_on * (cell.r_series + r_ch) / (r + r_ch)
    i_on = i_on * np.asarray(relative_factor(rng, spec.fefet_current_rel, shape, bound))
    if leakage is None:
        leakage = cell.i_off > 0
    if leakage:
        dv = spec.sigma_vth_high * np.asarray(truncated_normal(rng, shape, bound))
        i_off = cell.i_off * np.exp(-dv / cell.n_vt)
    else:
        i_off = np.zeros(shape)
    return i_on, i_off


def sample_cell(nominal: CellParams, spec: VariationSpec, rng_state=None) -> CellParams:
    """One variation-sampled cell. ``rng_state`` may be a Generator or a seed."""
    rng = make_rng(rng_state, spec)
    r_fac = relative_factor(rng, spec.sigma_r_rel, None, spec.truncation)
    i_on, i_off = _cell_from_factor(nominal, spec, rng, r_fac)
    return replace(nominal, i_on=i_on, i_off=i_off, r_series=nominal.r_series * r_fac,
                   v_read=i_on * (nominal.r_series * r_fac + nominal.r_channel))


def _cell_from_factor(cell, spec, rng, r_fac):
    r = cell.r_series * r_fac
    i_on = cell.i_on * (cell.r_series + cell.r_channel) / (r + cell.r_channel)
    i_on *= relative_factor(rng, spec.fefet_current_rel, None, spec.truncation)
    i_off = cell.i_off
    if i_off > 0:
        i_off *= math.exp(-spec.sigma_vth_high * truncated_normal(rng, None, spec.truncation)
                          / cell.n_vt)
    return float(i_on), float(i_off)


def sample_mosfet(p: MosfetParams, spec: VariationSpec, rng: np.random.Generator) -> MosfetParams:
    """Die-level MOSFET corner: one size factor and one threshold shift.

    The threshold shift moves the subthreshold bound and rescales I0 through
    the exponential law. Every transistor on the die shares the draw.
    """
    size = relative_factor(rng, spec.sigma_mos_size_rel, None, spec.truncation)
    dvth = p.vth_mos * spec.sigma_mos_vth_rel * truncated_normal(rng, None, spec.truncation)
    return replace(p, w_over_l=p.w_over_l * size, i0=p.i0 * math.exp(-dvth / p.n_vt),
                   vth_mos=max(p.vth_mos + dvth, 1e-3))


def sample_supply(spec: VariationSpec, rng: np.random.Generator) -> float:
    return relative_factor(rng, spec.sigma_supply_rel, None, spec.truncation)
