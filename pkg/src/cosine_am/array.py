"""Twin FeFET arrays producing the dot-product current Ix and norm current Iy.

Binary words are plain ``numpy`` uint8 arrays: a single word is shape
``(D,)`` and a stored set is ``(M, D)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .device import (
    CellParams,
    VariationSpec,
    make_rng,
    sample_cell_currents,
    sample_supply,
)


class ShapeError(ValueError):
    pass


class WordFormatError(ValueError):
    """A word file line is not a clean string of '0'/'1' characters."""

    def __init__(self, path, lineno: int, message: str):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {message}")


def as_bits(x) -> np.ndarray:
    """Coerce a string like ``"1011"`` or a 0/1 sequence to a uint8 array."""
    if isinstance(x, str):
        if not x or set(x) - {"0", "1"}:
            raise ValueError(f"not a bit string: {x!r}")
        return np.frombuffer(x.encode(), dtype=np.uint8) - ord("0")
    arr = np.asarray(x)
    if arr.size == 0:
        raise ValueError("empty bit vector")
    if not np.isin(arr, (0, 1)).all():
        raise ValueError("bit vectors must contain only 0 and 1")
    return arr.astype(np.uint8)


def bits_to_str(bits) -> str:
    return "".join("1" if b else "0" for b in np.asarray(bits).ravel())


def parse_words(lines, source="<words>") -> np.ndarray:
    words = []
    width = None
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if set(line) - {"0", "1"}:
            bad = sorted(set(line) - {"0", "1"})
            raise WordFormatError(source, lineno, f"unexpected characters {bad!r}")
        if width is None:
            width = len(line)
        elif len(line) != width:
            raise WordFormatError(source, lineno, f"word length {len(line)} != {width}")
        words.append(as_bits(line))
    if not words:
        raise WordFormatError(source, 0, "no words found")
    return np.vstack(words)


def read_words(path) -> np.ndarray:
    """Read a word file: one word per line, characters '0'/'1'."""
    path = Path(path)
    with path.open() as fh:
        return parse_words(fh, source=path)


def write_words(path, words) -> None:
    words = np.atleast_2d(words)
    Path(path).write_text("".join(bits_to_str(w) + "\n" for w in words))


@dataclass(frozen=True)
class ArrayGeometry:
    rows: int
    dim: int
    scale_factor: float = 1.0

    def __post_init__(self):
        if self.rows < 2:
            raise ValueError("an array needs at least two rows to search")
        if self.dim < 1:
            raise ValueError("dim must be >= 1")
        if not self.scale_factor > 0:
            raise ValueError("scale_factor must be positive")


@dataclass(frozen=True, eq=False)
class ArrayInstance:
    """A programmed (and possibly variation-sampled) pair of arrays.

    ``on_x``/``on_y`` hold per-cell ON currents of the dot-product and norm
    arrays; ``off_x``/``off_y`` the per-cell leakage. Both arrays store the
    same words but are sampled independently.
    """

    geometry: ArrayGeometry
    stored: np.ndarray
    on_x: np.ndarray
    on_y: np.ndarray
    off_x: np.ndarray
    off_y: np.ndarray
    i_cell_nominal: float


def tuned_scale_factor(stored, cell: CellParams = CellParams(), target_iy: float = 600e-9) -> float:
    """Resistor-tuning divisor putting the densest row's Iy at ``target_iy``."""
    ones = int(np.atleast_2d(stored).sum(axis=1).max())
    if ones == 0:
        return 1.0
    return cell.i_on * ones / target_iy


def program(stored, geometry: ArrayGeometry | None = None, cell: CellParams = CellParams(),
            spec: VariationSpec | None = None, rng=None) -> ArrayInstance:
    """Write ``stored`` into both arrays and sample every cell.

    The per-cell ON current is ``cell.i_on / geometry.scale_factor`` before
    variation. A die-level supply factor is drawn first and applied to all
    cells of both arrays.
    """
    stored = np.atleast_2d(as_bits(stored))
    if geometry is None:
        geometry = ArrayGeometry(*stored.shape)
    if stored.shape != (geometry.rows, geometry.dim):
        raise ShapeError(f"stored words have shape {stored.shape}, geometry expects "
                         f"({geometry.rows}, {geometry.dim})")
    spec = spec if spec is not None else VariationSpec.none()
    rng = make_rng(rng, spec)
    tuned = cell.with_on_current(cell.i_on / geometry.scale_factor)

    supply = sample_supply(spec, rng)
    leakage = cell.i_off > 0
    on_x, off_x = sample_cell_currents(tuned, spec, rng, stored.shape, leakage)
    on_y, off_y = sample_cell_currents(tuned, spec, rng, stored.shape, leakage)
    if supply != 1.0:
        on_x, off_x, on_y, off_y = (a * supply for a in (on_x, off_x, on_y, off_y))
    for a in (on_x, on_y, off_x, off_y):
        a.flags.writeable = False
    stored = stored.copy()
    stored.flags.writeable = False
    return ArrayInstance(geometry, stored, on_x, on_y, off_x, off_y, tuned.i_on)


def row_currents(arr: ArrayInstance, query):
    """Wordline currents ``(ix, iy)`` for one query.

    A cell conducts its ON current when it stores 1 and its gate is high;
    a high-V_TH cell with a high gate conducts its leakage current. The norm
    array has every gate high.
    """
    q = as_bits(query)
    if q.shape != (arr.geometry.dim,):
        raise ShapeError(f"query length {q.size} != array dim {arr.geometry.dim}")
    b = arr.stored.astype(bool)
    qb = q.astype(bool)
    ix = np.where(b, arr.on_x, arr.off_x)[:, qb].sum(axis=1)
    iy = np.where(b, arr.on_y, arr.off_y).sum(axis=1)
    return ix, iy


def widen_words(words, k: int) -> np.ndarray:
    """Repeat every bit ``k`` times along the word."""
    return np.repeat(np.atleast_2d(as_bits(words)), k, axis=1)


def scaled_equivalence_check(base: ArrayInstance, scaled: ArrayInstance, query, scaled_query,
                             transfer=None, rtol: float = 1e-9) -> bool:
    """True iff both arrays feed identical Iz per original row.

    ``scaled`` is the k-times-wider array whose cell current is divided by k
    (see :func:`widen_words`). ``transfer`` maps ``(ix, iy)`` to Iz and
    defaults to the ideal squarer-divider.
    """
    if transfer is None:
        def transfer(ix, iy):
            return ix * ix / iy
    if base.geometry.rows != scaled.geometry.rows:
        return False
    ix0, iy0 = row_currents(base, query)
    ix1, iy1 = row_currents(scaled, scaled_query)
    z0 = transfer(ix0, iy0)
    z1 = transfer(ix1, iy1)
    return bool(np.allclose(z1, z0, rtol=rtol, atol=0.0))
