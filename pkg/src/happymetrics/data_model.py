"""Columnar micro/macro datasets, CSV ingestion, dummy encoding and summary statistics.

The micro side stores individual survey responses (happiness category plus
socio-demographic codes), the macro side one row of national indicators per
year.  Categorical variables are expanded into mutually exclusive indicator
columns with a declared omitted base group; the resulting design matrices feed
the estimators.
"""

from __future__ import annotations

import contextlib
import csv
import os
import tempfile
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple, Sequence, Union

import numpy as np

from .errors import DataError, SpecError

# --------------------------------------------------------------------------
# Variable registry: integer code sets and indicator-column naming
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class VariableDomain:
    """Declared code set of one categorical/integer survey variable."""

    name: str
    codes: tuple[int, ...]
    # indicator column name per code; empty for purely continuous-ish counts
    dummy_names: Mapping[int, str] = field(default_factory=dict)
    default_base: int | None = None
    # emission priority of dummy columns (all codes listed; base is skipped)
    dummy_order: tuple[int, ...] = ()

    def contains(self, value: int) -> bool:
        return value in self.codes


def _span(lo: int, hi: int) -> tuple[int, ...]:
    return tuple(range(lo, hi + 1))


MICRO_VARIABLES: dict[str, VariableDomain] = {
    "year": VariableDomain("year", codes=_span(1900, 2100)),
    "happy": VariableDomain("happy", codes=(1, 2, 3)),
    "age": VariableDomain("age", codes=_span(18, 89)),
    "sex": VariableDomain(
        "sex",
        codes=(0, 1),
        dummy_names={0: "d_female", 1: "d_male"},
        default_base=0,
        dummy_order=(1, 0),
    ),
    "race": VariableDomain(
        "race",
        codes=(1, 2, 3),
        dummy_names={1: "d_white", 2: "d_black", 3: "d_other"},
        default_base=3,
        dummy_order=(1, 2, 3),
    ),
    "educ": VariableDomain("educ", codes=_span(0, 20)),
    "marital": VariableDomain(
        "marital",
        codes=(0, 1, 2),
        dummy_names={0: "d_dws", 1: "d_never_married", 2: "d_married"},
        default_base=1,
        dummy_order=(2, 0, 1),
    ),
    "health": VariableDomain(
        "health",
        codes=(1, 2, 3, 4),
        dummy_names={1: "d_poor", 2: "d_fair", 3: "d_good", 4: "d_excellent"},
        default_base=2,
        dummy_order=(4, 3, 1, 2),
    ),
    "work_status": VariableDomain(
        "work_status",
        codes=(0, 1, 2),
        dummy_names={0: "d_not_in_lf", 1: "d_unemp", 2: "d_work"},
        default_base=0,
        dummy_order=(2, 1, 0),
    ),
    "income": VariableDomain(
        "income",
        codes=_span(1, 6),
        dummy_names={c: f"d_income{c}" for c in _span(1, 6)},
        default_base=1,
        dummy_order=_span(1, 6)[1:] + (1,),
    ),
    "childs": VariableDomain("childs", codes=_span(0, 8)),
}

MICRO_FIELDS: tuple[str, ...] = tuple(MICRO_VARIABLES)

# logical field name -> default CSV header name
DEFAULT_MICRO_SCHEMA: dict[str, str] = {f: f for f in MICRO_FIELDS}
DEFAULT_MICRO_SCHEMA["work_status"] = "workstatus"

MACRO_COLUMNS: tuple[str, ...] = (
    "year",
    "unemployment",
    "inflation",
    "gdp_per_capita",
    "party",
    "disaster",
    "tech",
)
MACRO_DUMMIES: tuple[str, ...] = ("party", "disaster", "tech")


# --------------------------------------------------------------------------
# Datasets
# --------------------------------------------------------------------------


class RejectedRow(NamedTuple):
    """One row dropped during ingestion (1-based data-row number)."""

    row_number: int
    column: str
    reason: str


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr)
    arr.flags.writeable = False
    return arr


@dataclass(frozen=True)
class MicroDataset:
    """Individual-level survey records, stored column-wise.

    ``columns`` holds the core integer fields (see :data:`MICRO_FIELDS`);
    ``extra`` carries optional auxiliary float columns (e.g. a synthetic
    latent outcome) that are not part of the CSV contract.  Instances are
    immutable after construction.
    """

    columns: dict[str, np.ndarray]
    extra: dict[str, np.ndarray] = field(default_factory=dict)
    n_source_rows: int = 0
    rejects: tuple[RejectedRow, ...] = ()

    def __post_init__(self):
        missing = [f for f in MICRO_FIELDS if f not in self.columns]
        if missing:
            raise DataError(f"micro dataset missing columns: {', '.join(missing)}")
        n = len(self.columns["year"])
        for name in MICRO_FIELDS:
            col = np.asarray(self.columns[name], dtype=np.int64)
            if len(col) != n:
                raise DataError(f"column '{name}' length {len(col)} != {n}")
            domain = MICRO_VARIABLES[name]
            bad = ~np.isin(col, domain.codes)
            if bad.any():
                i = int(np.argmax(bad))
                raise DataError(
                    f"column '{name}' value {col[i]} at row {i} outside declared codes"
                )
            self.columns[name] = _freeze(col)
        for name, col in self.extra.items():
            col = np.asarray(col, dtype=float)
            if len(col) != n:
                raise DataError(f"extra column '{name}' length {len(col)} != {n}")
            self.extra[name] = _freeze(col)
        if self.n_source_rows == 0 and not self.rejects:
            object.__setattr__(self, "n_source_rows", n)

    @property
    def n(self) -> int:
        return len(self.columns["year"])

    @property
    def n_rejected(self) -> int:
        return len(self.rejects)

    def column(self, name: str) -> np.ndarray:
        if name in self.columns:
            return self.columns[name]
        if name in self.extra:
            return self.extra[name]
        raise SpecError(f"unknown micro variable '{name}'")

    def years(self) -> np.ndarray:
        return np.unique(self.columns["year"])

    def filter_year(self, year: int) -> "MicroDataset":
        mask = self.columns["year"] == year
        return MicroDataset(
            columns={k: v[mask] for k, v in self.columns.items()},
            extra={k: v[mask] for k, v in self.extra.items()},
        )

    def reject_counts_by_column(self) -> dict[str, int]:
        counts: dict[str, int] = {}
        for rej in self.rejects:
            counts[rej.column] = counts.get(rej.column, 0) + 1
        return counts


@dataclass(frozen=True)
class MacroSeries:
    """Year-indexed national indicators: one row per year, strictly increasing."""

    years: np.ndarray
    unemployment: np.ndarray
    inflation: np.ndarray
    gdp_per_capita: np.ndarray
    party: np.ndarray
    disaster: np.ndarray
    tech: np.ndarray

    def __post_init__(self):
        years = np.asarray(self.years, dtype=np.int64)
        n = len(years)
        if n and (np.diff(years) <= 0).any():
            dup = years[1:][np.diff(years) <= 0][0]
            raise DataError(f"macro years not strictly increasing at year {dup}")
        object.__setattr__(self, "years", _freeze(years))
        for name in ("unemployment", "inflation", "gdp_per_capita"):
            col = np.asarray(getattr(self, name), dtype=float)
            if len(col) != n:
                raise DataError(f"macro column '{name}' length {len(col)} != {n}")
            if not np.isfinite(col).all():
                raise DataError(f"macro column '{name}' contains non-finite values")
            object.__setattr__(self, name, _freeze(col))
        for name in MACRO_DUMMIES:
            col = np.asarray(getattr(self, name))
            if len(col) != n:
                raise DataError(f"macro column '{name}' length {len(col)} != {n}")
            if not np.isin(col, (0, 1)).all():
                bad = col[~np.isin(col, (0, 1))][0]
                raise DataError(f"macro dummy '{name}' value {bad} not in {{0,1}}")
            object.__setattr__(self, name, _freeze(col.astype(np.int64)))

    @property
    def n(self) -> int:
        return len(self.years)

    def column(self, name: str) -> np.ndarray:
        if name not in MACRO_COLUMNS:
            raise SpecError(f"unknown macro variable '{name}'")
        return getattr(self, "years" if name == "year" else name)

    def subset(self, years: Sequence[int]) -> "MacroSeries":
        """Rows for exactly `years` (ascending); error when a year is absent."""
        years = np.asarray(sorted(years), dtype=np.int64)
        missing = np.setdiff1d(years, self.years)
        if missing.size:
            raise DataError(f"macro series missing year(s): {', '.join(map(str, missing))}")
        idx = np.searchsorted(self.years, years)
        return MacroSeries(
            years=self.years[idx],
            unemployment=self.unemployment[idx],
            inflation=self.inflation[idx],
            gdp_per_capita=self.gdp_per_capita[idx],
            party=self.party[idx],
            disaster=self.disaster[idx],
            tech=self.tech[idx],
        )


Dataset = Union[MicroDataset, MacroSeries]


# --------------------------------------------------------------------------
# Model specification and dummy coding
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DummySpec:
    """Indicator coding of one categorical variable with an omitted base group."""

    variable: str
    columns: tuple[tuple[int, str], ...]  # (code, column name), emission order
    base_code: int

    def __post_init__(self):
        codes = [c for c, _ in self.columns]
        if self.base_code in codes:
            raise SpecError(
                f"base code {self.base_code} of '{self.variable}' must not emit a column"
            )
        if len(set(codes)) != len(codes):
            raise SpecError(f"duplicate dummy codes for '{self.variable}'")

    @classmethod
    def for_variable(cls, name: str, base_code: int | None = None) -> "DummySpec":
        try:
            domain = MICRO_VARIABLES[name]
        except KeyError:
            raise SpecError(f"unknown categorical variable '{name}'") from None
        if not domain.dummy_names:
            raise SpecError(f"variable '{name}' has no dummy coding")
        base = domain.default_base if base_code is None else base_code
        if base not in domain.codes:
            raise SpecError(f"base code {base} not a declared code of '{name}'")
        cols = tuple(
            (code, domain.dummy_names[code]) for code in domain.dummy_order if code != base
        )
        return cls(variable=name, columns=cols, base_code=base)


@dataclass(frozen=True)
class CategoricalTerm:
    name: str
    base: int | None = None  # None -> registry default


@dataclass(frozen=True)
class ModelSpec:
    """Declarative regression specification.

    `continuous` regressors enter as-is; each `categorical` term expands into
    indicator columns omitting its base group.  Time dummies add one indicator
    per distinct year (ascending, first year omitted); the trend column is the
    1-based index of the observation's year among the distinct years.
    """

    dependent: str
    continuous: tuple[str, ...] = ()
    categorical: tuple[CategoricalTerm, ...] = ()
    include_time_dummies: bool = False
    include_trend: bool = False
    include_constant: bool = True
    alpha: float = 0.05

    def __post_init__(self):
        regs = set(self.continuous) | {t.name for t in self.categorical}
        if self.dependent in regs:
            raise SpecError(f"dependent '{self.dependent}' also listed as regressor")
        if not 0 < self.alpha < 1:
            raise SpecError(f"significance level {self.alpha} outside (0, 1)")

    def dummy_specs(self) -> tuple[DummySpec, ...]:
        return tuple(DummySpec.for_variable(t.name, t.base) for t in self.categorical)

    def to_json_dict(self) -> dict:
        return {
            "dependent": self.dependent,
            "continuous": list(self.continuous),
            "categorical": [
                {"name": t.name, **({} if t.base is None else {"base": t.base})}
                for t in self.categorical
            ],
            "time_dummies": self.include_time_dummies,
            "trend": self.include_trend,
            "constant": self.include_constant,
            "alpha": self.alpha,
        }

    @classmethod
    def from_json_dict(cls, d: Mapping) -> "ModelSpec":
        try:
            dependent = d["dependent"]
        except KeyError:
            raise SpecError("model spec missing 'dependent'") from None
        cats = tuple(
            CategoricalTerm(name=c["name"], base=c.get("base")) for c in d.get("categorical", ())
        )
        return cls(
            dependent=dependent,
            continuous=tuple(d.get("continuous", ())),
            categorical=cats,
            include_time_dummies=bool(d.get("time_dummies", False)),
            include_trend=bool(d.get("trend", False)),
            include_constant=bool(d.get("constant", True)),
            alpha=float(d.get("alpha", 0.05)),
        )


# --------------------------------------------------------------------------
# Design matrices
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class DesignMatrix:
    """Numeric regression inputs: named columns, dependent vector, provenance.

    Provenance tags are one of ``constant``, ``continuous:<var>``,
    ``dummy:<var>=<code>``, ``time:<year>``, ``trend``.
    """

    names: tuple[str, ...]
    X: np.ndarray
    y: np.ndarray
    provenance: tuple[str, ...]
    dependent_name: str = "y"
    dropped: tuple[str, ...] = ()

    def __post_init__(self):
        X = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if X.ndim != 2:
            raise SpecError("design matrix must be 2-dimensional")
        n, k = X.shape
        if len(y) != n:
            raise SpecError(f"dependent length {len(y)} != {n} rows")
        if len(self.names) != k or len(self.provenance) != k:
            raise SpecError("names/provenance length mismatch with design columns")
        for j in range(k):
            if not X[:, j].any():
                raise SpecError(f"design column '{self.names[j]}' is identically zero")
        for j in range(k):
            for i in range(j):
                if np.array_equal(X[:, i], X[:, j]):
                    raise SpecError(
                        f"design columns '{self.names[i]}' and '{self.names[j]}' are identical"
                    )
        object.__setattr__(self, "X", _freeze(X))
        object.__setattr__(self, "y", _freeze(y))

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def k(self) -> int:
        return self.X.shape[1]

    @property
    def constant_index(self) -> int | None:
        try:
            return self.provenance.index("constant")
        except ValueError:
            return None

    def without_column(self, name: str) -> "DesignMatrix":
        j = self.names.index(name)
        keep = [i for i in range(self.k) if i != j]
        return DesignMatrix(
            names=tuple(self.names[i] for i in keep),
            X=self.X[:, keep],
            y=self.y,
            provenance=tuple(self.provenance[i] for i in keep),
            dependent_name=self.dependent_name,
            dropped=self.dropped + (name,),
        )


def encode_design_matrix(
    data: Dataset,
    spec: ModelSpec,
    drop_empty_dummies: bool = False,
) -> DesignMatrix:
    """Expand a :class:`ModelSpec` against a dataset into a numeric design matrix.

    Column order: constant, continuous regressors, categorical dummies in spec
    order, time dummies ascending (first year omitted), trend last.  A dummy
    column that would be identically zero in this data slice raises
    :class:`SpecError` unless ``drop_empty_dummies`` is set, in which case it
    is omitted and recorded in ``DesignMatrix.dropped``.
    """
    y = np.asarray(data.column(spec.dependent), dtype=float)
    n = len(y)
    names: list[str] = []
    cols: list[np.ndarray] = []
    prov: list[str] = []
    dropped: list[str] = []

    if spec.include_constant:
        names.append("constant")
        cols.append(np.ones(n))
        prov.append("constant")

    for var in spec.continuous:
        names.append(var)
        cols.append(np.asarray(data.column(var), dtype=float))
        prov.append(f"continuous:{var}")

    for dspec in spec.dummy_specs():
        values = np.asarray(data.column(dspec.variable))
        for code, colname in dspec.columns:
            indicator = (values == code).astype(float)
            if not indicator.any():
                if drop_empty_dummies:
                    dropped.append(colname)
                    continue
                raise SpecError(
                    f"dummy column '{colname}' ({dspec.variable}={code}) is identically zero"
                )
            names.append(colname)
            cols.append(indicator)
            prov.append(f"dummy:{dspec.variable}={code}")

    if spec.include_time_dummies or spec.include_trend:
        years = np.asarray(data.column("year"))
        distinct = np.unique(years)
        if spec.include_time_dummies:
            for year in distinct[1:]:  # first year is the omitted base
                names.append(f"d_{year}")
                cols.append((years == year).astype(float))
                prov.append(f"time:{year}")
        if spec.include_trend:
            index = {int(yr): i + 1 for i, yr in enumerate(distinct)}
            names.append("t")
            cols.append(np.array([index[int(yr)] for yr in years], dtype=float))
            prov.append("trend")

    if not cols:
        raise SpecError("model spec produced an empty design matrix")
    return DesignMatrix(
        names=tuple(names),
        X=np.column_stack(cols),
        y=y,
        provenance=tuple(prov),
        dependent_name=spec.dependent,
        dropped=tuple(dropped),
    )


# --------------------------------------------------------------------------
# CSV ingestion / emission
# --------------------------------------------------------------------------


@contextlib.contextmanager
def atomic_writer(path):
    """Open a temp file beside `path` and rename into place on success.

    An exception while writing removes the temp file, so a failed run never
    leaves a partial output behind.
    """
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-write-")
    try:
        with os.fdopen(fd, "w", newline="", encoding="utf-8") as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _open_reader(path) -> tuple[list[str], list[list[str]]]:
    try:
        fh = open(path, newline="", encoding="utf-8")
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"empty file (no header): {path}") from None
        rows = list(reader)
    return [h.strip() for h in header], rows


def load_micro_csv(path, schema: Mapping[str, str] | None = None) -> MicroDataset:
    """Load individual survey records, listwise-deleting invalid rows.

    ``schema`` maps logical field names to CSV header names and defaults to
    :data:`DEFAULT_MICRO_SCHEMA`.  A row is rejected (and accounted for in
    ``rejects``) when any cell is missing, unparseable, or outside its
    declared code set; file-level problems raise :class:`DataError`.
    """
    colmap = dict(DEFAULT_MICRO_SCHEMA)
    if schema:
        unknown = set(schema) - set(MICRO_FIELDS)
        if unknown:
            raise SpecError(f"schema names unknown fields: {', '.join(sorted(unknown))}")
        colmap.update(schema)

    header, rows = _open_reader(path)
    positions: dict[str, int] = {}
    for logical, csv_name in colmap.items():
        try:
            positions[logical] = header.index(csv_name)
        except ValueError:
            raise DataError(f"missing column '{csv_name}' in {path}") from None

    kept: dict[str, list[int]] = {f: [] for f in MICRO_FIELDS}
    rejects: list[RejectedRow] = []
    for i, row in enumerate(rows, start=1):
        parsed: dict[str, int] = {}
        problem: RejectedRow | None = None
        for logical in MICRO_FIELDS:
            pos = positions[logical]
            cell = row[pos].strip() if pos < len(row) else ""
            if not cell:
                problem = RejectedRow(i, logical, "missing value")
                break
            try:
                value = int(cell)
            except ValueError:
                problem = RejectedRow(i, logical, f"unparseable cell '{cell}'")
                break
            if not MICRO_VARIABLES[logical].contains(value):
                problem = RejectedRow(i, logical, f"{logical} out of range ({value})")
                break
            parsed[logical] = value
        if problem is not None:
            rejects.append(problem)
            continue
        for logical, value in parsed.items():
            kept[logical].append(value)

    return MicroDataset(
        columns={f: np.array(kept[f], dtype=np.int64) for f in MICRO_FIELDS},
        n_source_rows=len(rows),
        rejects=tuple(rejects),
    )


def write_micro_csv(dataset: MicroDataset, path) -> None:
    """Emit the core columns using the default header names (round-trip safe)."""
    with atomic_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow([DEFAULT_MICRO_SCHEMA[f] for f in MICRO_FIELDS])
        table = [dataset.columns[f] for f in MICRO_FIELDS]
        for i in range(dataset.n):
            writer.writerow([int(col[i]) for col in table])


def load_macro_csv(path) -> MacroSeries:
    """Load the per-year indicator table; any bad cell aborts with its location.

    Unlike micro ingestion (bulk survey data, listwise deletion) the macro
    table is small and curated, so problems are fatal.  Rows are sorted by
    year; duplicate years are an error.
    """
    header, rows = _open_reader(path)
    positions: dict[str, int] = {}
    for name in MACRO_COLUMNS:
        try:
            positions[name] = header.index(name)
        except ValueError:
            raise DataError(f"missing column '{name}' in {path}") from None

    records: list[dict[str, float]] = []
    for i, row in enumerate(rows, start=1):
        rec: dict[str, float] = {}
        for name in MACRO_COLUMNS:
            pos = positions[name]
            cell = row[pos].strip() if pos < len(row) else ""
            if not cell:
                raise DataError(f"missing value at row {i}, column '{name}'")
            try:
                value = float(cell)
            except ValueError:
                raise DataError(f"unparseable cell '{cell}' at row {i}, column '{name}'") from None
            if name == "year":
                if value != int(value):
                    raise DataError(f"non-integer year at row {i}")
                value = int(value)
            if name in MACRO_DUMMIES and value not in (0.0, 1.0):
                raise DataError(f"dummy '{name}' value {cell} at row {i} not in {{0,1}}")
            rec[name] = value
        records.append(rec)

    records.sort(key=lambda r: r["year"])
    years = [int(r["year"]) for r in records]
    for prev, cur in zip(years, years[1:]):
        if prev == cur:
            raise DataError(f"duplicate year {cur}")
    return MacroSeries(
        years=np.array(years, dtype=np.int64),
        unemployment=np.array([r["unemployment"] for r in records]),
        inflation=np.array([r["inflation"] for r in records]),
        gdp_per_capita=np.array([r["gdp_per_capita"] for r in records]),
        party=np.array([int(r["party"]) for r in records]),
        disaster=np.array([int(r["disaster"]) for r in records]),
        tech=np.array([int(r["tech"]) for r in records]),
    )


def write_macro_csv(series: MacroSeries, path) -> None:
    with atomic_writer(path) as fh:
        writer = csv.writer(fh)
        writer.writerow(MACRO_COLUMNS)
        for i in range(series.n):
            writer.writerow(
                [
                    int(series.years[i]),
                    repr(float(series.unemployment[i])),
                    repr(float(series.inflation[i])),
                    repr(float(series.gdp_per_capita[i])),
                    int(series.party[i]),
                    int(series.disaster[i]),
                    int(series.tech[i]),
                ]
            )


# --------------------------------------------------------------------------
# Summary statistics
# --------------------------------------------------------------------------


class SummaryRow(NamedTuple):
    name: str
    obs: int
    mean: float
    sd: float
    min: float
    max: float


@dataclass(frozen=True)
class SummaryTable:
    rows: tuple[SummaryRow, ...]

    def to_text(self) -> str:
        from .report import format_number

        headers = ("variable", "obs", "mean", "sd", "min", "max")
        table = [headers] + [
            (r.name, str(r.obs), *(format_number(v) for v in (r.mean, r.sd, r.min, r.max)))
            for r in self.rows
        ]
        widths = [max(len(row[j]) for row in table) for j in range(len(headers))]
        lines = []
        for i, row in enumerate(table):
            lines.append(
                "  ".join(
                    cell.ljust(widths[j]) if j == 0 else cell.rjust(widths[j])
                    for j, cell in enumerate(row)
                )
            )
            if i == 0:
                lines.append("-" * len(lines[0]))
        return "\n".join(lines) + "\n"

    def to_csv(self) -> str:
        from .report import format_number

        lines = ["variable,obs,mean,sd,min,max"]
        for r in self.rows:
            lines.append(
                ",".join(
                    [r.name, str(r.obs)]
                    + [format_number(v) for v in (r.mean, r.sd, r.min, r.max)]
                )
            )
        return "\n".join(lines) + "\n"


def _summary_row(name: str, values: np.ndarray) -> SummaryRow:
    values = np.asarray(values, dtype=float)
    n = len(values)
    sd = float(np.std(values, ddof=1)) if n > 1 else 0.0
    return SummaryRow(
        name=name,
        obs=n,
        mean=float(np.mean(values)),
        sd=sd,
        min=float(np.min(values)),
        max=float(np.max(values)),
    )


def summarize(data: Dataset) -> SummaryTable:
    """Observation count, mean, sample s.d. (n-1), min and max per variable."""
    if isinstance(data, MicroDataset):
        if data.n == 0:
            raise DataError("cannot summarize an empty dataset")
        order = [f for f in MICRO_FIELDS if f != "year"]
        rows = [_summary_row(name, data.columns[name]) for name in order]
        rows += [_summary_row(name, col) for name, col in data.extra.items()]
    else:
        if data.n == 0:
            raise DataError("cannot summarize an empty series")
        rows = [_summary_row(name, data.column(name)) for name in MACRO_COLUMNS[1:]]
    return SummaryTable(rows=tuple(rows))
