import numpy as np
import pytest

from cosine_am.array import (
    ArrayGeometry, ShapeError, WordFormatError, as_bits, bits_to_str, parse_words, program,
    read_words, row_currents, scaled_equivalence_check, tuned_scale_factor, widen_words,
    write_words,
)
from cosine_am.device import CellParams, VariationSpec


def test_bits_round_trip():
    assert bits_to_str(as_bits("0110")) == "0110"
    with pytest.raises(ValueError):
        as_bits("01a")
    with pytest.raises(ValueError):
        as_bits([0, 2])


def test_parse_reports_line_number():
    with pytest.raises(WordFormatError) as e:
        parse_words(["# header", "0101", "01x1"], source="w.txt")
    assert e.value.lineno == 3 and "w.txt:3" in str(e.value)


def test_parse_rejects_ragged_words():
    with pytest.raises(WordFormatError, match="length"):
        parse_words(["0101", "011"])


def test_file_round_trip(tmp_path):
    w = np.array([[1, 0, 1], [0, 0, 1]], dtype=np.uint8)
    write_words(tmp_path / "w.txt", w)
    assert np.array_equal(read_words(tmp_path / "w.txt"), w)


def test_geometry_validation():
    with pytest.raises(ValueError):
        ArrayGeometry(1, 8)


def test_row_currents_count_cells():
    stored = as_bits("1100") , as_bits("1011")
    stored = np.vstack(stored)
    arr = program(stored, cell=CellParams())
    ix, iy = row_currents(arr, as_bits("1010"))
    i = CellParams().i_on
    assert np.allclose(ix, [1 * i, 2 * i], rtol=1e-15)
    assert np.allclose(iy, [2 * i, 3 * i], rtol=1e-15)


def test_leakage_adds_off_current():
    cell = CellParams(i_off=1e-13)
    arr = program(np.array([[1, 0, 0, 0], [0, 0, 0, 0]]), cell=cell)
    ix, iy = row_currents(arr, as_bits("1100"))
    assert ix[0] == pytest.approx(cell.i_on + 1e-13)
    assert iy[1] == pytest.approx(4e-13)


def test_shape_errors():
    arr = program(np.zeros((2, 4), dtype=np.uint8))
    with pytest.raises(ShapeError):
        row_currents(arr, as_bits("101"))
    with pytest.raises(ShapeError):
        program(np.zeros((2, 4), dtype=np.uint8), ArrayGeometry(2, 5))


def test_tuning_puts_densest_row_at_target():
    stored = np.zeros((3, 64), dtype=np.uint8)
    stored[0, :10] = 1
    stored[1, :40] = 1
    n = tuned_scale_factor(stored, CellParams(), 600e-9)
    arr = program(stored, ArrayGeometry(3, 64, n))
    _, iy = row_currents(arr, np.ones(64, dtype=np.uint8))
    assert iy.max() == pytest.approx(600e-9, rel=1e-12)


def test_variation_is_independent_between_arrays():
    arr = program(np.ones((4, 32), dtype=np.uint8), spec=VariationSpec(), rng=0)
    assert not np.array_equal(arr.on_x, arr.on_y)
    assert not arr.on_x.flags.writeable


@pytest.mark.parametrize("k", [2, 4, 8])
def test_widening_preserves_iz(k):
    rng = np.random.default_rng(k)
    stored = rng.integers(0, 2, (6, 48)).astype(np.uint8)
    query = rng.integers(0, 2, 48).astype(np.uint8)
    base = program(stored, cell=CellParams())
    wide = program(widen_words(stored, k), ArrayGeometry(6, 48 * k, k), CellParams())
    assert scaled_equivalence_check(base, wide, query, widen_words(query, k)[0])
