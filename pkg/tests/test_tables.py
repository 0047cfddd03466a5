"""
Replay of the built-in sequence tables
"""

import pytest

from dickepulse.core.chain import SystemConfig, fidelity, phase_maximized_fidelity
from dickepulse.core.optimizer import area_scaling_bound
from dickepulse.core.tables import DICKE, NOON, PUBLISHED_ROWS, all_rows, parse_row_key, table_row

DICKE_ROWS = [table_row(DICKE, n) for n in range(3, 11)]
NOON_ROWS = [table_row(NOON, n) for n in range(3, 11)]


def test_every_row_present():
    assert len(PUBLISHED_ROWS) == 16
    assert [row.key for row in all_rows()][:2] == ["dicke:3", "dicke:4"]
    assert all_rows()[-1].key == "noon:10"


@pytest.mark.parametrize("row", DICKE_ROWS, ids=lambda r: r.key)
def test_dicke_rows(row):
    config = SystemConfig(row.n_ions)
    assert len(row.sequence) == row.n_ions
    assert fidelity(config, row.sequence, row.target()) >= 0.98


@pytest.mark.parametrize("row", DICKE_ROWS, ids=lambda r: r.key)
def test_dicke_rows_near_unity(row):
    assert fidelity(SystemConfig(row.n_ions), row.sequence, row.target()) >= 0.998


def test_dicke_excitation_numbers():
    for row in DICKE_ROWS:
        expected = (row.n_ions + 1) // 2 if row.n_ions in (7, 9) else row.n_ions // 2
        assert row.excitation == expected
        assert row.target().label == f"dicke:{expected}"


@pytest.mark.parametrize("row", NOON_ROWS, ids=lambda r: r.key)
def test_noon_rows(row):
    config = SystemConfig(row.n_ions)
    target = row.target()
    assert target.phase_free
    assert phase_maximized_fidelity(config, row.sequence, target) >= 0.98
    assert fidelity(config, row.sequence, target) >= 0.998


@pytest.mark.parametrize("row", DICKE_ROWS + NOON_ROWS, ids=lambda r: r.key)
def test_printed_total_area(row):
    assert row.sequence.total_area == pytest.approx(row.total_area, abs=0.01)


@pytest.mark.parametrize("n_ions", [8, 9, 10])
def test_area_scaling(n_ions):
    assert table_row(DICKE, n_ions).sequence.total_area <= area_scaling_bound(DICKE, n_ions)
    assert table_row(NOON, n_ions).sequence.total_area <= area_scaling_bound(NOON, n_ions)


def test_first_phase_is_reference():
    for row in all_rows():
        assert row.sequence[0].phase == 0.0


def test_lookup_errors():
    with pytest.raises(ValueError, match="available"):
        table_row(DICKE, 11)
    with pytest.raises(ValueError, match="unknown table kind"):
        table_row("ghz", 4)
    with pytest.raises(ValueError):
        parse_row_key("dicke")
    assert parse_row_key(" NOON:4".strip()).key == "noon:4"
