"""Current-mode squarer-divider: Iz = Ix**2 / Iy per row.

The stage is modelled functionally. :func:`certify_operating_region` checks
where that idealisation holds by evaluating the loop transistors' V_GS.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .device import MosfetParams, vgs_for_current

LOOP_CW = ("M1", "M4")
LOOP_CCW = ("M2", "M5")


@dataclass(frozen=True)
class TranslinearConfig:
    """Squarer-divider settings.

    ``v0`` bounds the stacked clockwise pair: V_GS(M1) + V_GS(M4) <= v0.
    ``vgs_floor`` is the lowest V_GS still treated as controlled weak
    inversion (default 3 * eta * V_T). Leave ``ix_min``/``ix_max`` as None
    to derive them from those voltage limits.
    """

    v0: float = 0.6
    mosfet: MosfetParams = field(default_factory=MosfetParams)
    mirror_ratio: float = 1.0
    vgs_floor: float | None = None
    ix_min: float | None = None
    ix_max: float | None = None
    soft_saturation: bool = False

    def __post_init__(self):
        if not self.v0 > 0:
            raise ValueError("v0 must be positive")
        if not self.mirror_ratio > 0:
            raise ValueError("mirror_ratio must be positive")
        lo, hi = self.current_window
        if not lo < hi:
            raise ValueError(f"empty operating window: ix_min={lo}, ix_max={hi}")

    @property
    def floor(self) -> float:
        return 3.0 * self.mosfet.n_vt if self.vgs_floor is None else self.vgs_floor

    @property
    def vgs_ceiling(self) -> float:
        return min(self.mosfet.vth_mos, 0.5 * self.v0)

    @property
    def current_window(self) -> tuple[float, float]:
        """Certified input range ``(ix_min, ix_max)`` before the input mirror."""
        m = self.mosfet
        lo = self.ix_min
        hi = self.ix_max
        if lo is None:
            lo = m.i_spec * np.exp(self.floor / m.n_vt) / self.mirror_ratio
        if hi is None:
            hi = m.i_spec * np.exp(self.vgs_ceiling / m.n_vt) / self.mirror_ratio
        return float(lo), float(hi)

    def with_mosfet(self, mosfet: MosfetParams) -> "TranslinearConfig":
        return replace(self, mosfet=mosfet)


@dataclass(frozen=True)
class TranslinearOutput:
    iz: float
    in_region: bool


@dataclass
class RegionReport:
    ix: float
    iy: float
    iz: float
    vgs: dict
    loop_residual: float
    in_region: bool
    reasons: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "ix": self.ix,
            "iy": self.iy,
            "iz": self.iz,
            "vgs": dict(self.vgs),
            "loop_residual": self.loop_residual,
            "in_region": self.in_region,
            "reasons": list(self.reasons),
        }


def _check_inputs(ix, iy):
    ix = np.asarray(ix, dtype=float)
    iy = np.asarray(iy, dtype=float)
    if np.any(~(iy > 0)):
        raise ValueError("iy must be positive")
    if np.any(ix < 0):
        raise ValueError("ix must be non-negative")
    return ix, iy


def _ideal(ix, iy, cfg):
    r = cfg.mirror_ratio
    return (r * ix) ** 2 / (r * iy)


def _saturate(ix, iy, iz, cfg):
    lo, hi = cfg.current_window
    clipped = np.clip(ix, lo, hi)
    return np.where(clipped != ix, _ideal(clipped, iy, cfg), iz)


def squared_ratio(ix: float, iy: float, cfg: TranslinearConfig = TranslinearConfig()) -> TranslinearOutput:
    """Ideal output ``mirror_ratio * ix**2 / iy`` with an operating-region flag.

    Out-of-window inputs keep the ideal value unless ``cfg.soft_saturation``
    is set, in which case Iz is held at its value on the window edge.
    """
    ix, iy = _check_inputs(ix, iy)
    iz = _ideal(ix, iy, cfg)
    lo, hi = cfg.current_window
    ok = bool(lo <= ix <= hi)
    if cfg.soft_saturation and not ok:
        iz = _saturate(ix, iy, iz, cfg)
    return TranslinearOutput(float(iz), ok)


def _loop_vgs(ix, iy, iz, cfg):
    r = cfg.mirror_ratio
    m = cfg.mosfet
    v_x = vgs_for_current(r * ix, m)
    return {
        "M1": v_x,
        "M4": v_x,
        "M2": vgs_for_current(r * iz, m),
        "M5": vgs_for_current(r * iy, m),
    }


def certify_rows(ix, iy, cfg: TranslinearConfig = TranslinearConfig()):
    """Vectorized certification.

    Returns ``(iz, in_region, loop_residual, vgs)`` where ``vgs`` maps each
    loop transistor to an array of gate-source voltages. A row is in region
    when every V_GS lies in ``[floor, vth_mos)`` and the clockwise stack fits
    under ``v0``.
    """
    ix, iy = _check_inputs(ix, iy)
    if np.any(~(ix > 0)):
        raise ValueError("certification needs ix > 0")
    iz = _ideal(ix, iy, cfg)
    vgs = _loop_vgs(ix, iy, iz, cfg)
    residual = sum(vgs[t] for t in LOOP_CW) - sum(vgs[t] for t in LOOP_CCW)
    stack = np.asarray(vgs["M1"] + vgs["M4"])
    ok = stack <= cfg.v0
    for v in vgs.values():
        v = np.asarray(v)
        ok = ok & (v >= cfg.floor) & (v < cfg.mosfet.vth_mos)
    return iz, ok, residual, vgs


def certify_operating_region(ix: float, iy: float, cfg: TranslinearConfig = TranslinearConfig()) -> RegionReport:
    if not (ix > 0 and iy > 0):
        # log divergence: report instead of raising
        iz = float(_ideal(max(ix, 0.0), iy, cfg)) if iy > 0 else float("nan")
        return RegionReport(float(ix), float(iy), iz, {}, float("nan"), False,
                            ["non-positive input current"])
    iz, ok, residual, vgs = certify_rows(ix, iy, cfg)
    vgs = {k: float(v) for k, v in vgs.items()}
    reasons = []
    for name, v in vgs.items():
        if v < cfg.floor:
            reasons.append(f"{name} V_GS {v:.4f} V below floor {cfg.floor:.4f} V")
        if v >= cfg.mosfet.vth_mos:
            reasons.append(f"{name} V_GS {v:.4f} V at or above vth_mos {cfg.mosfet.vth_mos} V")
    if vgs["M1"] + vgs["M4"] > cfg.v0:
        reasons.append(f"clockwise stack {vgs['M1'] + vgs['M4']:.4f} V exceeds v0 {cfg.v0} V")
    return RegionReport(float(ix), float(iy), float(iz), vgs, float(residual), bool(ok), reasons)


def row_similarities(ix, iy, cfg: TranslinearConfig = TranslinearConfig()):
    """Per-row ``(iz, in_region)`` arrays."""
    ix, iy = _check_inputs(ix, iy)
    if ix.shape != iy.shape:
        raise ValueError(f"ix and iy differ in shape: {ix.shape} vs {iy.shape}")
    iz = _ideal(ix, iy, cfg)
    ok = np.zeros(ix.shape, dtype=bool)
    live = ix > 0
    if live.any():
        ok[live] = certify_rows(ix[live], iy[live], cfg)[1]
    if cfg.soft_saturation:
        iz = _saturate(ix, iy, iz, cfg)
    return iz, ok

