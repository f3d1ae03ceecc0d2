"""Energy, latency and area of a search, scaled from calibrated reference numbers.

This is a lookup-and-scale model. Reference costs come in as parameters and
the model only applies the scaling rules: energy linear in rows and flat in
word length (cell current retuned per word length), latency flat in both,
area linear in cell count.
"""

from __future__ import annotations

import csv
from dataclasses import asdict, dataclass
from importlib import resources

from .array import ArrayGeometry

SELF_NAME = "Cosine AM (this model)"


@dataclass(frozen=True)
class CostParams:
    energy_per_bit: float = 0.286e-15  # J
    latency: float = 3e-9  # s
    area_ref: float = 0.0198e-6  # m^2, for area_rows_ref x area_dim_ref cells
    wta_energy_share: float = 0.56
    translinear_energy_share: float = 0.43
    rows_ref: int = 256
    dim_ref: int = 1024
    area_rows_ref: int = 256
    area_dim_ref: int = 256

    def __post_init__(self):
        if self.wta_energy_share < 0 or self.translinear_energy_share < 0:
            raise ValueError("energy shares must be non-negative")
        if self.wta_energy_share + self.translinear_energy_share > 1:
            raise ValueError("energy shares sum past 1")
        for name in ("energy_per_bit", "latency", "area_ref"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if min(self.rows_ref, self.dim_ref, self.area_rows_ref, self.area_dim_ref) < 1:
            raise ValueError("reference geometry must be positive")


@dataclass(frozen=True)
class CostReport:
    rows: int
    dim: int
    energy: float
    latency: float
    area: float
    energy_wta: float
    energy_translinear: float
    energy_other: float

    @property
    def energy_per_bit(self) -> float:
        return self.energy / (self.rows * self.dim)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["energy_per_bit"] = self.energy_per_bit
        return d


@dataclass(frozen=True)
class BaselineEntry:
    name: str
    technology: str
    metric: str
    energy_per_bit: float  # J
    latency: float  # s
    area: float  # m^2
    process: str


def estimate(geometry: ArrayGeometry, p: CostParams = CostParams()) -> CostReport:
    energy = p.energy_per_bit * p.rows_ref * p.dim_ref * (geometry.rows / p.rows_ref)
    area = p.area_ref * (geometry.rows * geometry.dim) / (p.area_rows_ref * p.area_dim_ref)
    e_wta = energy * p.wta_energy_share
    e_tl = energy * p.translinear_energy_share
    return CostReport(
        rows=geometry.rows,
        dim=geometry.dim,
        energy=energy,
        latency=p.latency,
        area=area,
        energy_wta=e_wta,
        energy_translinear=e_tl,
        energy_other=energy - e_wta - e_tl,
    )


def load_baselines(path=None) -> dict[str, BaselineEntry]:
    """Read the comparison table (bundled copy unless ``path`` is given)."""
    if path is None:
        fh = resources.files("cosine_am.data").joinpath("baselines.csv").open()
    else:
        fh = open(path)
    with fh:
        rows = list(csv.DictReader(fh))
    out = {}
    for r in rows:
        out[r["name"]] = BaselineEntry(
            name=r["name"],
            technology=r["technology"],
            metric=r["metric"],
            energy_per_bit=float(r["energy_fJ_per_bit"]) * 1e-15,
            latency=float(r["latency_ns"]) * 1e-9,
            area=float(r["area_mm2"]) * 1e-6,
            process=r["process_nm"],
        )
    return out


def reference_entry(p: CostParams = CostParams()) -> BaselineEntry:
    """This model at its reference geometry, expressed as a table row."""
    r = estimate(ArrayGeometry(p.area_rows_ref, p.area_dim_ref), p)
    return BaselineEntry(SELF_NAME, "FeFET", "Cosine", p.energy_per_bit, r.latency, r.area, "45")


def compare_to_baselines(ours: BaselineEntry | CostReport, baselines: dict, names=None) -> list[dict]:
    """Baseline / ours ratios for energy per bit, latency and area.

    ``ours`` may be a table row or a :class:`CostReport`. A report's area is
    only comparable when it was estimated at the table's 256 x 256 geometry.
    """
    if isinstance(ours, CostReport):
        ours = BaselineEntry(SELF_NAME, "FeFET", "Cosine", ours.energy_per_bit,
                             ours.latency, ours.area, "45")
    names = list(baselines) if names is None else names
    table = []
    for name in names:
        try:
            b = baselines[name]
        except KeyError:
            raise KeyError(f"no baseline named {name!r}; have {sorted(baselines)}") from None
        table.append({
            "name": b.name,
            "metric": b.metric,
            "energy_ratio": b.energy_per_bit / ours.energy_per_bit,
            "latency_ratio": b.latency / ours.latency,
            "area_ratio": b.area / ours.area,
        })
    return table


def sweep_rows(rows, dim: int = 1024, p: CostParams = CostParams()) -> list[CostReport]:
    return [estimate(ArrayGeometry(r, dim), p) for r in rows]


def sweep_dims(dims, rows: int = 256, p: CostParams = CostParams()) -> list[CostReport]:
    return [estimate(ArrayGeometry(rows, d), p) for d in dims]
