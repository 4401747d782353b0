from __future__ import annotations

import tempfile
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from happymetrics.data_model import (
    MICRO_FIELDS,
    MICRO_VARIABLES,
    CategoricalTerm,
    DesignMatrix,
    DummySpec,
    MacroSeries,
    MicroDataset,
    ModelSpec,
    encode_design_matrix,
    load_macro_csv,
    load_micro_csv,
    summarize,
    write_micro_csv,
)
from happymetrics.errors import DataError, SpecError

MICRO_HEADER = "year,happy,age,sex,race,educ,marital,health,workstatus,income,childs"


def write_lines(path: Path, lines) -> Path:
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    return path


def valid_row(year=1990, happy=2, age=30, sex=1, race=1, educ=12, marital=2, health=3,
              work=2, income=4, childs=1) -> str:
    return f"{year},{happy},{age},{sex},{race},{educ},{marital},{health},{work},{income},{childs}"


# --------------------------------------------------------------------------
# micro ingestion
# --------------------------------------------------------------------------


def test_load_micro_rejects_out_of_range_happy(tmp_path):
    lines = [MICRO_HEADER] + [valid_row(happy=h) for h in (1, 2, 3, 2)] + [valid_row(happy=4)]
    data = load_micro_csv(write_lines(tmp_path / "m.csv", lines))
    assert data.n == 4
    assert data.n_rejected == 1
    assert data.n_source_rows == 5
    (reject,) = data.rejects
    assert reject.row_number == 5
    assert reject.column == "happy"
    assert "happy out of range" in reject.reason


def test_load_micro_header_only(tmp_path):
    data = load_micro_csv(write_lines(tmp_path / "m.csv", [MICRO_HEADER]))
    assert data.n == 0
    assert data.n_rejected == 0


def test_load_micro_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        load_micro_csv(tmp_path / "nope.csv")


def test_load_micro_missing_column(tmp_path):
    lines = ["year,happy,age,sex,race,educ,marital,health,workstatus,income", valid_row()]
    with pytest.raises(DataError, match="childs"):
        load_micro_csv(write_lines(tmp_path / "m.csv", lines))


def test_load_micro_unparseable_cell_reports_row(tmp_path):
    lines = [MICRO_HEADER, valid_row(), valid_row(age="abc")]
    data = load_micro_csv(write_lines(tmp_path / "m.csv", lines))
    assert data.n == 1
    (reject,) = data.rejects
    assert reject.row_number == 2
    assert "unparseable" in reject.reason


def test_load_micro_missing_value_rejected(tmp_path):
    lines = [MICRO_HEADER, valid_row(), "1990,2,30,1,1,12,2,3,2,4,"]
    data = load_micro_csv(write_lines(tmp_path / "m.csv", lines))
    assert data.n == 1
    assert data.rejects[0].reason == "missing value"
    assert data.reject_counts_by_column() == {"childs": 1}


def test_load_micro_schema_rename(tmp_path):
    header = MICRO_HEADER.replace("workstatus", "wrkstat")
    data = load_micro_csv(
        write_lines(tmp_path / "m.csv", [header, valid_row()]),
        schema={"work_status": "wrkstat"},
    )
    assert data.n == 1


def test_load_micro_unknown_schema_field(tmp_path):
    path = write_lines(tmp_path / "m.csv", [MICRO_HEADER, valid_row()])
    with pytest.raises(SpecError, match="unknown fields"):
        load_micro_csv(path, schema={"wages": "wage"})


def test_micro_dataset_invariant_rejects_bad_code():
    cols = {f: np.array([v]) for f, v in zip(
        MICRO_FIELDS, (1990, 2, 30, 1, 1, 12, 2, 3, 2, 4, 1))}
    cols["health"] = np.array([9])
    with pytest.raises(DataError, match="health"):
        MicroDataset(columns=cols)


def test_micro_dataset_columns_immutable(tmp_path):
    data = load_micro_csv(write_lines(tmp_path / "m.csv", [MICRO_HEADER, valid_row()]))
    with pytest.raises(ValueError):
        data.columns["happy"][0] = 3


# --------------------------------------------------------------------------
# macro ingestion
# --------------------------------------------------------------------------

MACRO_HEADER = "year,unemployment,inflation,gdp_per_capita,party,disaster,tech"


def test_load_macro_ok(tmp_path):
    lines = [MACRO_HEADER, "1990,5.6,4.2,23000,1,0,0", "1991,6.8,4.0,23500,0,1,0"]
    series = load_macro_csv(write_lines(tmp_path / "M.csv", lines))
    assert series.n == 2
    assert list(series.years) == [1990, 1991]
    assert series.unemployment[0] == 5.6


def test_load_macro_sorts_rows(tmp_path):
    lines = [MACRO_HEADER, "1991,6.8,4.0,23500,0,1,0", "1990,5.6,4.2,23000,1,0,0"]
    series = load_macro_csv(write_lines(tmp_path / "M.csv", lines))
    assert list(series.years) == [1990, 1991]


def test_load_macro_duplicate_year(tmp_path):
    lines = [MACRO_HEADER, "1990,5.6,4.2,23000,1,0,0", "1990,6.8,4.0,23500,0,1,0"]
    with pytest.raises(DataError, match="duplicate year 1990"):
        load_macro_csv(write_lines(tmp_path / "M.csv", lines))


def test_load_macro_bad_dummy_names_row_and_column(tmp_path):
    lines = [MACRO_HEADER, "1990,5.6,4.2,23000,2,0,0"]
    with pytest.raises(DataError, match=r"party.*row 1|row 1.*party"):
        load_macro_csv(write_lines(tmp_path / "M.csv", lines))


def test_load_macro_missing_value(tmp_path):
    lines = [MACRO_HEADER, "1990,5.6,,23000,1,0,0"]
    with pytest.raises(DataError, match="inflation"):
        load_macro_csv(write_lines(tmp_path / "M.csv", lines))


def test_macro_subset_missing_year():
    series = MacroSeries(
        years=np.array([1990, 1991]),
        unemployment=np.array([5.0, 6.0]),
        inflation=np.array([3.0, 4.0]),
        gdp_per_capita=np.array([20000.0, 21000.0]),
        party=np.array([0, 1]),
        disaster=np.array([0, 0]),
        tech=np.array([1, 0]),
    )
    with pytest.raises(DataError, match="1992"):
        series.subset([1990, 1992])


# --------------------------------------------------------------------------
# summaries
# --------------------------------------------------------------------------


def test_summarize_hand_checkable(tmp_path):
    lines = [MICRO_HEADER] + [valid_row(happy=h) for h in (1, 2, 3)]
    table = summarize(load_micro_csv(write_lines(tmp_path / "m.csv", lines)))
    row = {r.name: r for r in table.rows}["happy"]
    assert row.obs == 3
    assert row.mean == pytest.approx(2.0)
    assert row.sd == pytest.approx(1.0)
    assert (row.min, row.max) == (1.0, 3.0)


def test_summarize_degenerate_spread(tmp_path):
    lines = [MICRO_HEADER] + [valid_row(income=5)] * 5
    table = summarize(load_micro_csv(write_lines(tmp_path / "m.csv", lines)))
    row = {r.name: r for r in table.rows}["income"]
    assert row.mean == 5.0
    assert row.sd == 0.0
    assert row.min == row.max == 5.0


def test_summarize_empty_errors(tmp_path):
    data = load_micro_csv(write_lines(tmp_path / "m.csv", [MICRO_HEADER]))
    with pytest.raises(DataError):
        summarize(data)


def test_summarize_renders_text_and_csv(tmp_path):
    lines = [MICRO_HEADER] + [valid_row(happy=h) for h in (1, 2, 3)]
    table = summarize(load_micro_csv(write_lines(tmp_path / "m.csv", lines)))
    text = table.to_text()
    assert "happy" in text and "mean" in text
    csv_text = table.to_csv()
    assert csv_text.splitlines()[0] == "variable,obs,mean,sd,min,max"


# --------------------------------------------------------------------------
# dummy coding and design matrices
# --------------------------------------------------------------------------


def micro_from_arrays(**overrides) -> MicroDataset:
    n = len(next(iter(overrides.values()))) if overrides else 4
    base = {
        "year": [1990] * n,
        "happy": [2] * n,
        "age": [30, 40, 50, 60][:n],
        "sex": [0, 1, 0, 1][:n],
        "race": [1, 2, 3, 1][:n],
        "educ": [12] * n,
        "marital": [0, 1, 2, 2][:n],
        "health": [1, 2, 3, 4][:n],
        "work_status": [0, 1, 2, 2][:n],
        "income": [1, 2, 3, 6][:n],
        "childs": [0, 1, 2, 3][:n],
    }
    base.update(overrides)
    return MicroDataset(columns={k: np.array(v, dtype=np.int64) for k, v in base.items()})


def test_dummy_spec_base_never_emits():
    spec = DummySpec.for_variable("health")
    assert spec.base_code == 2
    assert [name for _, name in spec.columns] == ["d_excellent", "d_good", "d_poor"]


def test_dummy_spec_rebased():
    spec = DummySpec.for_variable("health", base_code=4)
    assert [name for _, name in spec.columns] == ["d_good", "d_poor", "d_fair"]


def test_dummy_spec_invalid_base():
    with pytest.raises(SpecError, match="base code 7"):
        DummySpec.for_variable("health", base_code=7)


def test_encode_binary_dummy_is_raw_column():
    data = micro_from_arrays()
    spec = ModelSpec(dependent="happy", categorical=(CategoricalTerm("sex"),))
    design = encode_design_matrix(data, spec)
    assert design.names == ("constant", "d_male")
    np.testing.assert_array_equal(design.X[:, 1], data.columns["sex"].astype(float))


def test_encode_health_three_columns_fair_none():
    data = micro_from_arrays()
    spec = ModelSpec(dependent="happy", categorical=(CategoricalTerm("health"),))
    design = encode_design_matrix(data, spec)
    assert design.names == ("constant", "d_excellent", "d_good", "d_poor")
    # row with health=2 (fair) is all zeros across the dummies
    fair_row = np.where(data.columns["health"] == 2)[0][0]
    assert design.X[fair_row, 1:].sum() == 0


def test_encode_full_spec_column_count_24_years():
    # constant + age/childs/educ + 15 category dummies + 23 time dummies
    # (24 distinct years, first omitted) = 42 columns
    rng = np.random.default_rng(0)
    n = 24 * 30
    years = np.repeat(np.arange(1972, 1996), 30)
    data = micro_from_arrays(
        year=years,
        happy=rng.integers(1, 4, n),
        age=rng.integers(18, 90, n),
        sex=rng.integers(0, 2, n),
        race=rng.integers(1, 4, n),
        educ=rng.integers(0, 21, n),
        marital=rng.integers(0, 3, n),
        health=rng.integers(1, 5, n),
        work_status=rng.integers(0, 3, n),
        income=rng.integers(1, 7, n),
        childs=rng.integers(0, 9, n),
    )
    from happymetrics.pipeline import default_micro_spec

    design = encode_design_matrix(data, default_micro_spec(time_dummies=True))
    assert design.k == 42
    assert design.names[0] == "constant"
    assert design.names[1:4] == ("age", "childs", "educ")
    assert sum(p.startswith("time:") for p in design.provenance) == 23
    assert sum(p.startswith("dummy:") for p in design.provenance) == 15


def test_encode_empty_dummy_raises_or_drops():
    data = micro_from_arrays(work_status=[0, 0, 2, 2])  # nobody unemployed
    spec = ModelSpec(dependent="happy", categorical=(CategoricalTerm("work_status"),))
    with pytest.raises(SpecError, match="d_unemp"):
        encode_design_matrix(data, spec)
    design = encode_design_matrix(data, spec, drop_empty_dummies=True)
    assert design.dropped == ("d_unemp",)
    assert "d_unemp" not in design.names


def test_encode_unknown_variable():
    data = micro_from_arrays()
    with pytest.raises(SpecError, match="wage"):
        encode_design_matrix(data, ModelSpec(dependent="happy", continuous=("wage",)))


def test_encode_trend_column():
    data = micro_from_arrays(year=[1990, 1990, 1994, 1999])
    spec = ModelSpec(dependent="happy", continuous=("age",), include_trend=True)
    design = encode_design_matrix(data, spec)
    assert design.names[-1] == "t"
    np.testing.assert_array_equal(design.X[:, -1], [1.0, 1.0, 2.0, 3.0])


def test_design_matrix_rejects_identical_columns():
    X = np.column_stack([np.ones(4), np.arange(4.0), np.arange(4.0)])
    with pytest.raises(SpecError, match="identical"):
        DesignMatrix(names=("constant", "a", "b"), X=X, y=np.zeros(4),
                     provenance=("constant", "continuous:a", "continuous:b"))


def test_design_matrix_rejects_zero_column():
    X = np.column_stack([np.ones(4), np.zeros(4)])
    with pytest.raises(SpecError, match="identically zero"):
        DesignMatrix(names=("constant", "z"), X=X, y=np.zeros(4),
                     provenance=("constant", "continuous:z"))


def test_model_spec_dependent_not_regressor():
    with pytest.raises(SpecError):
        ModelSpec(dependent="happy", continuous=("happy",))


def test_model_spec_json_round_trip():
    spec = ModelSpec(
        dependent="happy",
        continuous=("age",),
        categorical=(CategoricalTerm("health"), CategoricalTerm("sex", base=1)),
        include_time_dummies=True,
        alpha=0.01,
    )
    assert ModelSpec.from_json_dict(spec.to_json_dict()) == spec


def test_atomic_writer_leaves_nothing_on_failure(tmp_path):
    from happymetrics.data_model import atomic_writer

    target = tmp_path / "out.csv"
    with pytest.raises(RuntimeError):
        with atomic_writer(target) as fh:
            fh.write("partial")
            raise RuntimeError("boom")
    assert not target.exists()
    assert list(tmp_path.iterdir()) == []


def test_encode_macro_series_design():
    years = np.arange(1980, 1992)
    n = len(years)
    series = MacroSeries(
        years=years,
        unemployment=5.0 + np.linspace(0, 3, n),
        inflation=2.0 + np.sin(np.arange(n)),
        gdp_per_capita=np.linspace(10000, 30000, n),
        party=np.tile([0, 1], n // 2),
        disaster=np.zeros(n, dtype=int),
        tech=np.ones(n, dtype=int) - np.tile([0, 1], n // 2),
    )
    spec = ModelSpec(dependent="unemployment", continuous=("inflation",), include_trend=True)
    design = encode_design_matrix(series, spec)
    assert design.names == ("constant", "inflation", "t")
    np.testing.assert_array_equal(design.X[:, 2], np.arange(1, n + 1, dtype=float))
    np.testing.assert_array_equal(design.y, series.unemployment)


def test_macro_load_then_summarize_reproduces_means(tmp_path):
    # a 24-year table built to average the published indicator values exactly
    n = 24
    unemp = np.full(n, 6.370833)
    unemp[0] += 0.5
    unemp[1] -= 0.5
    infl = np.full(n, 4.860837)
    infl[2] += 1.25
    infl[3] -= 1.25
    lines = [MACRO_HEADER]
    for i in range(n):
        party = 1 if i < 7 else 0  # 7/24 -> mean .2916667
        lines.append(f"{1972 + i},{unemp[i]:.6f},{infl[i]:.6f},{10000 + 500 * i},{party},0,1")
    table = summarize(load_macro_csv(write_lines(tmp_path / "M.csv", lines)))
    rows = {r.name: r for r in table.rows}
    assert rows["unemployment"].obs == 24
    assert rows["unemployment"].mean == pytest.approx(6.370833, abs=1e-6)
    assert rows["inflation"].mean == pytest.approx(4.860837, abs=1e-6)
    assert rows["party"].mean == pytest.approx(7 / 24, abs=1e-9)


# --------------------------------------------------------------------------
# properties
# --------------------------------------------------------------------------

code_columns = {
    "happy": st.integers(1, 3),
    "age": st.integers(18, 89),
    "sex": st.integers(0, 1),
    "race": st.integers(1, 3),
    "educ": st.integers(0, 20),
    "marital": st.integers(0, 2),
    "health": st.integers(1, 4),
    "work_status": st.integers(0, 2),
    "income": st.integers(1, 6),
    "childs": st.integers(0, 8),
    "year": st.integers(1972, 2010),
}


@st.composite
def micro_datasets(draw, min_rows=1, max_rows=40):
    n = draw(st.integers(min_rows, max_rows))
    cols = {
        name: np.array([draw(strategy) for _ in range(n)], dtype=np.int64)
        for name, strategy in code_columns.items()
    }
    return MicroDataset(columns=cols)


@given(micro_datasets())
@settings(max_examples=25, deadline=None)
def test_round_trip_micro_csv(data):
    with tempfile.TemporaryDirectory() as tmp:
        path = Path(tmp) / "m.csv"
        write_micro_csv(data, path)
        loaded = load_micro_csv(path)
    assert loaded.n == data.n
    assert loaded.n_rejected == 0
    for name in MICRO_FIELDS:
        np.testing.assert_array_equal(loaded.columns[name], data.columns[name])


@given(micro_datasets(min_rows=2))
@settings(max_examples=25, deadline=None)
def test_dummy_exclusivity(data):
    for var in ("sex", "race", "marital", "health", "work_status", "income"):
        dspec = DummySpec.for_variable(var)
        values = data.columns[var]
        indicators = np.column_stack(
            [(values == code).astype(int) for code, _ in dspec.columns]
        )
        row_sums = indicators.sum(axis=1)
        assert set(np.unique(row_sums)) <= {0, 1}
        np.testing.assert_array_equal(row_sums == 0, values == dspec.base_code)


@given(micro_datasets(min_rows=2))
@settings(max_examples=25, deadline=None)
def test_dummy_mean_is_sample_proportion(data):
    values = data.columns["health"]
    for code in (1, 3, 4):
        indicator = (values == code).astype(float)
        assert indicator.mean() == pytest.approx(np.mean(values == code))
