import json
import math

import pytest
from hypothesis import given, strategies as st

from ptcomb.lattice import (
    CellError,
    Coupling,
    UnitCell,
    cell_from_json,
    check_pt,
    load_cell,
    make_pt_cell,
    save_cell,
)

finite = st.floats(min_value=-50, max_value=50, allow_nan=False)
pairs = st.tuples(finite, finite)


def test_make_pt_cell_even():
    cell = make_pt_cell([(5, 4)])
    assert cell.couplings == (Coupling(5, 4), Coupling(5, -4))
    assert cell.n == 2
    assert cell.pt_ordered


def test_make_pt_cell_odd():
    cell = make_pt_cell([(3, 5)], middle=2)
    assert cell.couplings == (Coupling(3, 5), Coupling(2, 0), Coupling(3, -5))
    assert cell.pt_ordered


def test_make_pt_cell_real():
    cell = make_pt_cell([(1, 0)])
    assert cell.couplings == (Coupling(1, 0), Coupling(1, 0))
    assert cell.c == (1 + 0j, 1 + 0j)


@pytest.mark.parametrize("couplings, expected", [
    ([(5, 4), (5, -4)], True),
    ([(5, 4), (5, 4)], False),
    ([(3, 0), (2, 0), (3, 0)], True),
    ([(3, 1), (2, 0.5), (3, -1)], False),
    ([(1, 0)], True),
    ([(1, 2)], False),
])
def test_check_pt(couplings, expected):
    assert check_pt(UnitCell(couplings)) is expected
    assert UnitCell(couplings).pt_ordered is expected


@pytest.mark.parametrize("bad", [
    [(math.nan, 0)], [(1, math.inf)], [],
])
def test_rejects_invalid(bad):
    with pytest.raises(CellError):
        UnitCell(bad)


def test_make_pt_cell_rejects():
    with pytest.raises(CellError):
        make_pt_cell([])
    with pytest.raises(CellError):
        make_pt_cell([(1, math.nan)])
    with pytest.raises(CellError):
        make_pt_cell([(1, 1)], middle=1 + 2j)


@given(st.lists(pairs, min_size=1, max_size=6), st.one_of(st.none(), finite))
def test_pt_constructor_always_pt(half, middle):
    cell = make_pt_cell(half, middle)
    assert check_pt(cell)
    assert cell.n == 2 * len(half) + (middle is not None)
    # closed under conjugation
    assert sorted((c.r, c.s) for c in cell.couplings) == sorted(
        (c.r, -c.s) for c in cell.couplings
    )


def test_json_forms(tmp_path):
    assert cell_from_json({"half": [[3, 5]], "middle": 2}) == make_pt_cell([(3, 5)], 2)
    assert cell_from_json({"couplings": [[1, 2], [3, 4]]}) == UnitCell([(1, 2), (3, 4)])
    with pytest.raises(CellError):
        cell_from_json({"foo": 1})
    with pytest.raises(CellError):
        cell_from_json({"couplings": [[1, 2]], "half": [[1, 2]]})
    bad = tmp_path / "bad.json"
    bad.write_text("{nope")
    with pytest.raises(CellError):
        load_cell(bad)


@given(st.lists(pairs, min_size=1, max_size=8))
def test_json_round_trip(couplings):
    cell = UnitCell(couplings)
    again = cell_from_json(json.loads(json.dumps(cell.to_json())))
    assert again == cell
    assert again.pt_ordered == cell.pt_ordered


def test_save_load(tmp_path):
    cell = make_pt_cell([(5, 3), (4, 1.5)], 1.25)
    path = tmp_path / "cell.json"
    save_cell(cell, path)
    assert load_cell(path) == cell
