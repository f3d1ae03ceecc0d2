"""Run configuration: a YAML file mapped onto the component dataclasses.

Every section is optional and falls back to the component defaults; any
key that no component knows is an error.
"""

from __future__ import annotations

import dataclasses
import os
from dataclasses import dataclass, field
from pathlib import Path

import yaml

from .cost import CostParams
from .device import CellParams, MosfetParams, VariationSpec
from .pipeline import SearchChain
from .translinear import TranslinearConfig
from .variation import DEFAULT_SWEEP_NORMS, McExperiment
from .wta import WtaConfig

CONFIG_ENV = "COSINE_AM_CONFIG"
VERBOSITY = ("quiet", "normal", "verbose")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ArraySection:
    target_iy: float | None = 600e-9
    scale_factor: float = 1.0


@dataclass(frozen=True)
class McSection:
    trials: int = 1000
    scenario: str = "worst_case_pair"
    dim: int = 1024
    worst_case_dot: int = 2
    sweep_norms: tuple = DEFAULT_SWEEP_NORMS
    workers: int = 1
    keep_log: bool = False


@dataclass(frozen=True)
class SweepSection:
    rows: tuple = (4, 8, 16, 32, 64, 128, 256)
    dims: tuple = (64, 128, 256, 512, 1024)
    margins: tuple = (0.001, 0.002, 0.005, 0.01, 0.02, 0.05, 0.1)
    margin_rails: int = 8
    margin_trials: int = 200


@dataclass(frozen=True)
class HdcSection:
    dataset: str = "isolet"
    data_dir: str | None = None
    test_fraction: float = 0.2
    dims: tuple = (256, 512, 1024)
    metrics: tuple = ("cosine", "hamming")
    seeds: tuple = (0, 1, 2, 3, 4)
    quantization: int = 0
    error_rate: float = 0.1
    error_mode: str = "contested"


@dataclass(frozen=True)
class DeviceSection:
    mosfet: MosfetParams = field(default_factory=MosfetParams)
    cell: CellParams = field(default_factory=CellParams)


@dataclass(frozen=True)
class RunConfig:
    device: DeviceSection = field(default_factory=DeviceSection)
    array: ArraySection = field(default_factory=ArraySection)
    translinear: TranslinearConfig = field(default_factory=TranslinearConfig)
    wta: WtaConfig = field(default_factory=WtaConfig)
    variation: VariationSpec = field(default_factory=VariationSpec)
    cost: CostParams = field(default_factory=CostParams)
    hdc: HdcSection = field(default_factory=HdcSection)
    mc: McSection = field(default_factory=McSection)
    sweep: SweepSection = field(default_factory=SweepSection)
    master_seed: int = 0
    output_dir: str = "out"
    verbosity: str = "normal"

    def __post_init__(self):
        if self.verbosity not in VERBOSITY:
            raise ConfigError(f"verbosity must be one of {VERBOSITY}")

    def chain(self) -> SearchChain:
        m = self.device.mosfet
        return SearchChain(
            cell=self.device.cell,
            mosfet=m,
            translinear=self.translinear.with_mosfet(m),
            wta=self.wta.with_mosfet(m),
            target_iy=self.array.target_iy,
            scale_factor=self.array.scale_factor,
        )

    def experiment(self, **overrides) -> McExperiment:
        mc = self.mc
        kw = dict(trials=mc.trials, spec=self.variation, scenario=mc.scenario, dim=mc.dim,
                  master_seed=self.master_seed, chain=self.chain(),
                  worst_case_dot=mc.worst_case_dot, sweep_norms=tuple(mc.sweep_norms),
                  keep_log=mc.keep_log, workers=mc.workers)
        kw.update(overrides)
        return McExperiment(**kw)

    def to_dict(self) -> dict:
        return _plain(self)


# the loader fills these from device.mosfet, so they are not echoed
_SKIP = {"translinear": ("mosfet",), "wta": ("mosfet",)}
_SKIP_TYPES = (TranslinearConfig, WtaConfig)


def _plain(obj):
    if dataclasses.is_dataclass(obj):
        drop = ("mosfet",) if isinstance(obj, _SKIP_TYPES) else ()
        return {f.name: _plain(getattr(obj, f.name)) for f in dataclasses.fields(obj)
                if f.name not in drop}
    if isinstance(obj, (tuple, list)):
        return [_plain(v) for v in obj]
    return obj


def _build(cls, data, where: str, skip=()):
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected a mapping, got {type(data).__name__}")
    names = {f.name: f for f in dataclasses.fields(cls) if f.name not in skip}
    unknown = sorted(set(data) - set(names))
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {unknown}; allowed {sorted(names)}")
    kw = {}
    for k, v in data.items():
        default = names[k].default
        if isinstance(v, list) or isinstance(default, tuple):
            v = tuple(v) if isinstance(v, (list, tuple)) else v
        kw[k] = v
    try:
        return cls(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _cell(data) -> CellParams:
    data = dict(data or {})
    if "i_on" in data and "r_series" not in data:
        # keep the default clamp ratio when only the ON current is given
        base = _build(CellParams, {k: v for k, v in data.items() if k != "i_on"}, "device.cell")
        try:
            return base.with_on_current(float(data["i_on"]))
        except ValueError as exc:
            raise ConfigError(f"device.cell: {exc}") from None
    return _build(CellParams, data, "device.cell")


def from_dict(data: dict | None) -> RunConfig:
    data = dict(data or {})
    top = {f.name for f in dataclasses.fields(RunConfig)}
    unknown = sorted(set(data) - top)
    if unknown:
        raise ConfigError(f"unknown top-level key(s) {unknown}; allowed {sorted(top)}")
    dev = data.get("device") or {}
    if not isinstance(dev, dict):
        raise ConfigError("device: expected a mapping")
    bad = sorted(set(dev) - {"mosfet", "cell"})
    if bad:
        raise ConfigError(f"device: unknown key(s) {bad}; allowed ['cell', 'mosfet']")
    device = DeviceSection(_build(MosfetParams, dev.get("mosfet"), "device.mosfet"), _cell(dev.get("cell")))
    kw = {"device": device}
    for name, cls in (("array", ArraySection), ("translinear", TranslinearConfig),
                      ("wta", WtaConfig), ("variation", VariationSpec), ("cost", CostParams),
                      ("hdc", HdcSection), ("mc", McSection), ("sweep", SweepSection)):
        kw[name] = _build(cls, data.get(name), name, _SKIP.get(name, ()))
    for name in ("master_seed", "output_dir", "verbosity"):
        if name in data:
            kw[name] = data[name]
    if not isinstance(kw.get("master_seed", 0), int):
        raise ConfigError("master_seed must be an integer")
    try:
        return RunConfig(**kw)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load(path) -> RunConfig:
    path = Path(path)
    try:
        data = yaml.safe_load(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    if data is not None and not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping")
    return from_dict(data)


def find_config(explicit=None) -> Path | None:
    """``explicit``, else ``$COSINE_AM_CONFIG``, else None."""
    if explicit:
        return Path(explicit)
    env = os.environ.get(CONFIG_ENV)
    return Path(env) if env else None


def dump(cfg: RunConfig) -> str:
    return yaml.safe_dump(cfg.to_dict(), sort_keys=True)
