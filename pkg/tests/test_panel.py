"""Tests for panel ingest, aggregation and schedules."""

import numpy as np
import pandas as pd
import pytest

from panel import (
    IndividualRow,
    StaggerPolicy,
    aggregate_cells,
    derive_schedule,
    filter_to_staggered,
    load_panel,
    materialize,
    panel_to_frame,
    read_panel_csv,
    save_panel_csv,
)
from utils.errors import (
    DuplicateCell,
    EmptyInput,
    MixedTreatmentInCell,
    NonBinaryTreatment,
    TreatedAtBaseline,
    TreatmentReversal,
)


def series_rows(d_series, s=1, r=1):
    return [{"s": s, "r": r, "t": t, "y": float(t), "d": d} for t, d in enumerate(d_series, start=1)]


class TestLoadPanel:
    def test_full_grid(self, toy_panel):
        assert toy_panel.shape == (2, 2, 2)
        assert toy_panel.is_balanced
        assert toy_panel.y[0, 0, 1] == 5.0
        assert toy_panel.d.sum() == 1

    def test_duplicate_cell(self, toy_frame):
        frame = pd.concat([toy_frame, toy_frame.iloc[[0]]])
        with pytest.raises(DuplicateCell):
            load_panel(frame)

    def test_non_binary_treatment(self, toy_frame):
        toy_frame.loc[0, "d"] = 0.5
        with pytest.raises(NonBinaryTreatment):
            load_panel(toy_frame)

    def test_empty_input(self):
        with pytest.raises(EmptyInput):
            load_panel([])

    def test_missing_cells_are_masked(self, toy_frame):
        panel = load_panel(toy_frame.iloc[1:])
        assert not panel.is_balanced
        assert not panel.mask[0, 0, 0]
        assert np.isnan(panel.y[0, 0, 0])

    def test_arrays_are_read_only(self, toy_panel):
        with pytest.raises(ValueError):
            toy_panel.y[0, 0, 0] = 1.0


class TestAggregateCells:
    def test_cell_mean(self):
        rows = [
            IndividualRow(unit="a", s=1, r=1, t=1, y=1.0, d=0),
            IndividualRow(unit="b", s=1, r=1, t=1, y=3.0, d=0),
        ]
        panel = aggregate_cells(rows)
        assert panel.y[0, 0, 0] == 2.0
        assert panel.d[0, 0, 0] == 0
        assert panel.unit_counts[0, 0] == 2

    def test_mixed_treatment(self):
        rows = [
            {"unit": "a", "s": 1, "r": 1, "t": 1, "y": 1.0, "d": 0},
            {"unit": "b", "s": 1, "r": 1, "t": 1, "y": 3.0, "d": 1},
        ]
        with pytest.raises(MixedTreatmentInCell):
            aggregate_cells(rows)

    def test_single_row_per_cell_is_identity(self, toy_frame):
        frame = toy_frame.assign(unit=[f"u{i}" for i in range(len(toy_frame))])
        assert np.array_equal(aggregate_cells(frame).y, load_panel(toy_frame).y)

    def test_row_order_invariance(self):
        rng = np.random.default_rng(3)
        frame = pd.DataFrame({
            "unit": [f"u{i % 5}" for i in range(40)],
            "s": rng.integers(1, 3, 40),
            "r": rng.integers(1, 3, 40),
            "t": rng.integers(1, 4, 40),
            "y": rng.standard_normal(40),
            "d": 0,
        })
        shuffled = frame.sample(frac=1.0, random_state=7)
        a, b = aggregate_cells(frame), aggregate_cells(shuffled)
        assert np.array_equal(a.y, b.y, equal_nan=True)
        assert np.array_equal(a.unit_counts, b.unit_counts)


class TestSchedule:
    def test_first_treated_period(self):
        schedule = derive_schedule(load_panel(series_rows([0, 0, 1, 1])))
        assert schedule.g[0, 0] == 3

    def test_never_treated(self):
        schedule = derive_schedule(load_panel(series_rows([0, 0, 0, 0])))
        assert schedule.g[0, 0] == schedule.never == 5

    def test_reversal(self):
        with pytest.raises(TreatmentReversal):
            derive_schedule(load_panel(series_rows([0, 1, 0, 1])))

    def test_treated_at_baseline(self):
        with pytest.raises(TreatedAtBaseline):
            derive_schedule(load_panel(series_rows([1, 1, 1])))

    def test_materialize_round_trip(self, random_panels):
        for panel, schedule in random_panels[:10]:
            assert derive_schedule(materialize(schedule, panel)) == schedule


class TestFilterToStaggered:
    def test_drops_offending_prefix(self):
        panel = load_panel(series_rows([1, 1, 0, 0, 1, 1]))
        filtered = filter_to_staggered(panel)
        assert filtered.mask[0, 0].tolist() == [False, False, True, True, True, True]
        assert derive_schedule(filtered).g[0, 0] == 5

    def test_staggered_input_unchanged(self):
        panel = load_panel(series_rows([0, 0, 1, 1]))
        assert filter_to_staggered(panel) is panel

    def test_error_policy(self):
        with pytest.raises(TreatmentReversal):
            filter_to_staggered(load_panel(series_rows([0, 1, 0])), StaggerPolicy.ERROR)

    def test_output_passes_derive_schedule(self):
        rng = np.random.default_rng(11)
        rows = []
        for s in range(1, 4):
            rows += series_rows(rng.integers(0, 2, size=6).tolist(), s=s)
        filtered = filter_to_staggered(load_panel(rows))
        derive_schedule(filtered)


class TestCsv:
    def test_round_trip(self, toy_panel, tmp_path):
        path = str(tmp_path / "panel.csv")
        save_panel_csv(path, toy_panel)
        loaded = read_panel_csv(path)
        assert np.array_equal(loaded.y, toy_panel.y)
        assert np.array_equal(loaded.d, toy_panel.d)

    def test_schedule_header(self, tmp_path):
        path = tmp_path / "panel.csv"
        path.write_text("s,r,t,y,g\n1,1,1,0.5,2\n1,1,2,1.5,2\n2,1,1,0.1,\n2,1,2,0.2,\n", encoding="utf-8")
        panel = read_panel_csv(str(path))
        assert panel.d[:, 0, :].tolist() == [[0, 1], [0, 0]]

    def test_unit_column_aggregates_rows(self, tmp_path):
        path = tmp_path / "individuals.csv"
        path.write_text(
            "unit,s,r,t,y,g\n"
            "a,1,1,1,1.0,2\na,1,1,2,3.0,2\nb,1,1,1,2.0,2\nb,1,1,2,5.0,2\n"
            "c,2,1,1,0.0,\nc,2,1,2,1.0,\n",
            encoding="utf-8",
        )
        panel = read_panel_csv(str(path))
        assert panel.y[:, 0, :].tolist() == [[1.5, 4.0], [0.0, 1.0]]
        assert panel.d[:, 0, :].tolist() == [[0, 1], [0, 0]]
        assert panel.unit_counts[:, 0].tolist() == [2, 1]

    def test_frame_columns(self, toy_panel):
        assert list(panel_to_frame(toy_panel).columns) == ["s", "r", "t", "y", "d"]
