"""Arrays -> squarer-divider -> WTA, for one programmed die."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .array import ArrayGeometry, ArrayInstance, as_bits, program, row_currents, tuned_scale_factor
from .device import CellParams, MosfetParams, VariationSpec, make_rng, sample_mosfet
from .translinear import TranslinearConfig, row_similarities
from .wta import WtaConfig, WtaSolution, solve_static


@dataclass(frozen=True)
class SearchChain:
    """Component settings for a full search.

    ``target_iy`` retunes the cell resistors so the densest stored word reads
    that norm current; set it to None to use ``scale_factor`` as given.
    """

    cell: CellParams = field(default_factory=CellParams)
    mosfet: MosfetParams = field(default_factory=MosfetParams)
    translinear: TranslinearConfig = field(default_factory=TranslinearConfig)
    wta: WtaConfig = field(default_factory=WtaConfig)
    target_iy: float | None = 600e-9
    scale_factor: float = 1.0

    def geometry_for(self, stored) -> ArrayGeometry:
        rows, dim = stored.shape
        n = self.scale_factor if self.target_iy is None else tuned_scale_factor(stored, self.cell, self.target_iy)
        return ArrayGeometry(rows, dim, n)

    def build(self, stored, spec: VariationSpec | None = None, rng=None) -> "ProgrammedChain":
        """Sample one die: MOSFET corner first, then both arrays."""
        stored = np.atleast_2d(as_bits(stored))
        spec = spec if spec is not None else VariationSpec.none()
        rng = make_rng(rng, spec)
        mos = sample_mosfet(self.mosfet, spec, rng)
        arr = program(stored, self.geometry_for(stored), self.cell, spec, rng)
        return ProgrammedChain(arr, self.translinear.with_mosfet(mos), self.wta.with_mosfet(mos))

    def search(self, stored, query, spec: VariationSpec | None = None, rng=None) -> "SearchResult":
        return self.build(stored, spec, rng).search(query)


@dataclass
class SearchResult:
    ix: np.ndarray
    iy: np.ndarray
    iz: np.ndarray
    in_region: np.ndarray
    solution: WtaSolution | None
    winner: int
    resolvable: bool
    converged: bool

    def to_dict(self, verbose: bool = False) -> dict:
        return {
            "ix": self.ix.tolist(),
            "iy": self.iy.tolist(),
            "iz": self.iz.tolist(),
            "in_region": [bool(b) for b in self.in_region],
            "winner": int(self.winner),
            "resolvable": bool(self.resolvable),
            "converged": bool(self.converged),
            "wta": self.solution.to_dict(verbose) if self.solution is not None else None,
        }


@dataclass(frozen=True, eq=False)
class ProgrammedChain:
    array: ArrayInstance
    translinear: TranslinearConfig
    wta: WtaConfig

    def search(self, query) -> SearchResult:
        ix, iy = row_currents(self.array, query)
        live = iy > 0
        iz = np.zeros_like(ix)
        ok = np.zeros(ix.shape, dtype=bool)
        if live.any():
            iz[live], ok[live] = row_similarities(ix[live], iy[live], self.translinear)
        # rows with no cell current still need a positive WTA input; a floor
        # six decades under the largest input keeps them losing
        floor = 1e-6 * max(float(iz.max()), 1e-15)
        sol = solve_static(np.maximum(iz, floor), self.wta)
        return SearchResult(ix, iy, iz, ok, sol, sol.winner,
                            sol.is_resolvable(self.wta.dominance), sol.converged)
