"""Two-stage happiness regression: per-year micro intercepts, then macro regression.

Stage one fits the micro model separately for each survey year; the intercept
of each fit is that year's mean happiness net of the weighted average of the
socio-demographic regressors (the least-squares identity
intercept = ybar - sum_j beta_j xbar_j makes that interpretation exact).
Stage two regresses those yearly intercepts on national indicators, replacing
GDP per capita by its first difference and adding a linear trend.  The effect
helpers turn coefficients into percent-of-baseline statements and combine the
personal and aggregate unemployment effects into one net number.
"""

from __future__ import annotations

import csv
import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Mapping

import numpy as np

from .data_model import (
    CategoricalTerm,
    DesignMatrix,
    MacroSeries,
    MicroDataset,
    ModelSpec,
    atomic_writer,
    encode_design_matrix,
)
from .errors import DataError, EstimationError, SpecError
from .estimators import OlsResult, OrderedProbitResult, ols_fit, ordered_probit_fit

DEFAULT_MIN_YEAR_OBS = 100
STAGE_TWO_MIN_YEARS = 10


def default_micro_spec(
    time_dummies: bool = False, dependent: str = "happy", constant: bool = True
) -> ModelSpec:
    """The standard individual-level happiness specification.

    Continuous age, number of children and schooling years, plus indicator
    groups for sex, health, marital status, work status, income bracket and
    race, each against its conventional base group.
    """
    return ModelSpec(
        dependent=dependent,
        continuous=("age", "childs", "educ"),
        categorical=(
            CategoricalTerm("sex"),
            CategoricalTerm("health"),
            CategoricalTerm("marital"),
            CategoricalTerm("work_status"),
            CategoricalTerm("income"),
            CategoricalTerm("race"),
        ),
        include_time_dummies=time_dummies,
        include_constant=constant,
    )


def load_model_spec(path) -> ModelSpec:
    try:
        with open(path, encoding="utf-8") as fh:
            payload = json.load(fh)
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid spec JSON in {path}: {exc}") from None
    return ModelSpec.from_json_dict(payload)


# --------------------------------------------------------------------------
# Stage one
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class YearlyValue:
    year: int
    beta0: float
    n_year: int
    dropped: tuple[str, ...] = ()


@dataclass(frozen=True)
class YearlyHappinessSeries:
    """Year -> stage-one intercept (mean yearly happiness net of regressors)."""

    entries: tuple[YearlyValue, ...]
    fits: Mapping[int, OlsResult] = field(default_factory=dict)
    skipped: Mapping[int, str] = field(default_factory=dict)

    def __post_init__(self):
        years = [e.year for e in self.entries]
        if any(after <= before for before, after in zip(years, years[1:])):
            raise DataError("yearly series must be strictly increasing in year")

    @property
    def n(self) -> int:
        return len(self.entries)

    def years(self) -> np.ndarray:
        return np.array([e.year for e in self.entries], dtype=np.int64)

    def beta0(self) -> np.ndarray:
        return np.array([e.beta0 for e in self.entries], dtype=float)

    def to_csv(self, path) -> None:
        with atomic_writer(path) as fh:
            writer = csv.writer(fh)
            writer.writerow(["year", "beta0", "n_year", "dropped_columns"])
            for e in self.entries:
                writer.writerow([e.year, repr(e.beta0), e.n_year, ";".join(e.dropped)])

    @classmethod
    def from_csv(cls, path) -> "YearlyHappinessSeries":
        try:
            fh = open(path, newline="", encoding="utf-8")
        except FileNotFoundError:
            raise DataError(f"file not found: {path}") from None
        entries = []
        with fh:
            reader = csv.DictReader(fh)
            required = {"year", "beta0"}
            if reader.fieldnames is None or not required <= set(reader.fieldnames):
                raise DataError(f"beta0 file {path} must have columns year,beta0")
            for i, row in enumerate(reader, start=1):
                try:
                    year = int(row["year"])
                    beta0 = float(row["beta0"])
                except (TypeError, ValueError):
                    raise DataError(f"unparseable beta0 row {i} in {path}") from None
                n_year = int(row.get("n_year") or 0)
                dropped = tuple(d for d in (row.get("dropped_columns") or "").split(";") if d)
                entries.append(YearlyValue(year, beta0, n_year, dropped))
        entries.sort(key=lambda e: e.year)
        return cls(entries=tuple(entries))


def _fit_one_year(
    micro: MicroDataset, spec: ModelSpec, year: int
) -> tuple[YearlyValue, OlsResult]:
    data = micro.filter_year(int(year))
    design = encode_design_matrix(data, spec, drop_empty_dummies=True)
    fit = ols_fit(design, alpha=spec.alpha)
    const = design.constant_index
    if const is None:
        raise SpecError("stage one requires a constant column (the yearly intercept)")
    return (
        YearlyValue(
            year=int(year),
            beta0=float(fit.coefficients[const]),
            n_year=data.n,
            dropped=design.dropped,
        ),
        fit,
    )


def stage_one(
    micro: MicroDataset,
    spec: ModelSpec,
    min_year_obs: int = DEFAULT_MIN_YEAR_OBS,
    max_workers: int | None = None,
) -> YearlyHappinessSeries:
    """Fit the micro model year by year; the intercepts form the happiness series.

    Years with fewer than `min_year_obs` respondents are skipped; dummy
    columns empty within a year are dropped for that year only and recorded.
    A year whose fit still fails (rank deficiency after the drop rule) is
    skipped with the reason logged, without aborting the remaining years.
    Per-year fits are independent, so `max_workers` > 1 runs them in a thread
    pool; results are merged in ascending year order either way.
    """
    if spec.include_time_dummies:
        raise SpecError("stage one fits each year separately; time dummies are not allowed")
    years = [int(y) for y in micro.years()]
    eligible = []
    skipped: dict[int, str] = {}
    year_col = micro.columns["year"]
    for year in years:
        n_year = int(np.sum(year_col == year))
        if n_year < min_year_obs:
            skipped[year] = f"n={n_year} below threshold {min_year_obs}"
        else:
            eligible.append(year)

    def run(year: int):
        try:
            return year, _fit_one_year(micro, spec, year), None
        except (SpecError, EstimationError, DataError) as exc:
            return year, None, str(exc)

    if max_workers and max_workers > 1 and len(eligible) > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            outcomes = list(pool.map(run, eligible))
    else:
        outcomes = [run(y) for y in eligible]

    entries: list[YearlyValue] = []
    fits: dict[int, OlsResult] = {}
    for year, ok, reason in sorted(outcomes, key=lambda o: o[0]):
        if ok is None:
            skipped[year] = reason
        else:
            value, fit = ok
            entries.append(value)
            fits[year] = fit
    if not entries:
        raise EstimationError("no year qualifies for stage one")
    return YearlyHappinessSeries(entries=tuple(entries), fits=fits, skipped=skipped)


def intercept_identity_check(fit: OlsResult, design: DesignMatrix) -> float:
    """|intercept - (ybar - sum_j beta_j xbar_j)| over non-constant columns.

    An algebraic identity of least squares with a constant: the discrepancy
    is pure floating-point noise (< 1e-9) for any valid fit.
    """
    const = design.constant_index
    if const is None:
        raise SpecError("fit has no constant column")
    ybar = float(np.mean(design.y))
    acc = 0.0
    for j in range(design.k):
        if j != const:
            acc += float(fit.coefficients[j]) * float(np.mean(design.X[:, j]))
    return abs(float(fit.coefficients[const]) - (ybar - acc))


# --------------------------------------------------------------------------
# Stage two
# --------------------------------------------------------------------------

STAGE_TWO_EVENT_DUMMIES = ("party", "disaster", "tech")


@dataclass(frozen=True)
class StageTwoFit:
    fit: OlsResult
    design: DesignMatrix
    years: np.ndarray  # usable years (first series year lost to differencing)
    dropped: tuple[str, ...] = ()  # event dummies constant over the usable years


def stage_two(
    series: YearlyHappinessSeries,
    macro: MacroSeries,
    use_event_dummies: bool = False,
    use_raw_gdp: bool = False,
) -> StageTwoFit:
    """Regress yearly intercepts on unemployment, inflation, GDP change and trend.

    GDP per capita enters as the difference between consecutive series years
    (attributed to the later year), so the first year drops out; the trend
    counts usable years 1, 2, 3, ...  With `use_raw_gdp` the level enters
    instead and no year is lost.  Event dummies add party, disaster and tech.
    """
    years = [int(y) for y in series.years()]
    if len(set(years)) != len(years):
        raise DataError("duplicate years in beta0 series")
    aligned = macro.subset(years)  # raises when a series year is missing
    beta0 = series.beta0()

    if use_raw_gdp:
        usable = slice(0, len(years))
        gdp_col = aligned.gdp_per_capita
        gdp_name, gdp_prov = "gdp_per_capita", "continuous:gdp_per_capita"
    else:
        if len(years) < 2:
            raise EstimationError("need at least 2 years to difference GDP")
        usable = slice(1, len(years))
        gdp_col = np.diff(aligned.gdp_per_capita)
        gdp_name, gdp_prov = "gdpd", "continuous:gdpd"

    usable_years = np.asarray(years)[usable]
    n = len(usable_years)
    if n < STAGE_TWO_MIN_YEARS:
        raise EstimationError(f"only {n} usable years; need at least {STAGE_TWO_MIN_YEARS}")

    names = ["constant", "unemployment", "inflation", gdp_name, "t"]
    cols = [
        np.ones(n),
        aligned.unemployment[usable],
        aligned.inflation[usable],
        gdp_col,
        np.arange(1, n + 1, dtype=float),
    ]
    prov = ["constant", "continuous:unemployment", "continuous:inflation", gdp_prov, "trend"]
    dropped: list[str] = []
    if use_event_dummies:
        for name in STAGE_TWO_EVENT_DUMMIES:
            col = aligned.column(name)[usable].astype(float)
            if np.ptp(col) == 0:
                # never (or always) firing over the usable years: nothing to
                # identify, so drop it rather than fail on a degenerate column
                dropped.append(name)
                continue
            names.append(name)
            cols.append(col)
            prov.append(f"dummy:{name}=1")

    design = DesignMatrix(
        names=tuple(names),
        X=np.column_stack(cols),
        y=beta0[usable],
        provenance=tuple(prov),
        dependent_name="beta0",
        dropped=tuple(dropped),
    )
    return StageTwoFit(
        fit=ols_fit(design), design=design, years=usable_years, dropped=tuple(dropped)
    )


# --------------------------------------------------------------------------
# Pooled micro fits
# --------------------------------------------------------------------------


def attach_macro_columns(micro: MicroDataset, macro: MacroSeries) -> MicroDataset:
    """Per-row national indicators by survey year, as extra continuous columns."""
    years = [int(y) for y in micro.years()]
    aligned = macro.subset(years)
    pos = {int(y): i for i, y in enumerate(aligned.years)}
    idx = np.array([pos[int(y)] for y in micro.columns["year"]])
    extra = dict(micro.extra)
    extra["unemployment"] = aligned.unemployment[idx]
    extra["inflation"] = aligned.inflation[idx]
    extra["gdp_per_capita"] = aligned.gdp_per_capita[idx]
    return MicroDataset(
        columns=dict(micro.columns),
        extra=extra,
        n_source_rows=micro.n_source_rows,
        rejects=micro.rejects,
    )


def pooled_micro_fit(
    micro: MicroDataset,
    spec: ModelSpec,
    macro: MacroSeries | None = None,
    estimator: str = "ols",
) -> OlsResult | OrderedProbitResult:
    """Pooled fit over all years: OLS or ordered probit, optionally with macro columns.

    Time dummies and year-constant macro regressors are perfectly collinear,
    so requesting both is an error.
    """
    if estimator not in ("ols", "oprobit"):
        raise SpecError(f"unknown estimator '{estimator}'")
    if macro is not None:
        if spec.include_time_dummies:
            raise SpecError(
                "time dummies and year-constant macro regressors (unemployment, "
                "inflation, gdp_per_capita) are perfectly collinear; request one, not both"
            )
        micro = attach_macro_columns(micro, macro)
        extra_regs = ("unemployment", "inflation", "gdp_per_capita")
        spec = replace(spec, continuous=tuple(spec.continuous) + extra_regs)
    if estimator == "oprobit":
        spec = replace(spec, include_constant=False)
        design = encode_design_matrix(micro, spec)
        return ordered_probit_fit(design)
    design = encode_design_matrix(micro, spec)
    return ols_fit(design, alpha=spec.alpha)


# --------------------------------------------------------------------------
# Effect arithmetic
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class EffectReport:
    regressor: str
    coefficient: float
    baseline: float
    percent: float  # coefficient / baseline * 100


@dataclass(frozen=True)
class Decomposition:
    personal: float  # micro unemployment-dummy magnitude
    aggregate: float  # stage-two unemployment magnitude
    delta_u: float  # change in the unemployment rate, in rate points / 100
    baseline: float
    net_effect: float  # delta_u * personal + aggregate
    percent: float


def percent_effect(coefficient: float, baseline: float, regressor: str = "") -> EffectReport:
    """Coefficient expressed as a percentage of a baseline happiness level."""
    if not baseline > 0:
        raise SpecError(f"baseline must be positive, got {baseline}")
    return EffectReport(
        regressor=regressor,
        coefficient=coefficient,
        baseline=baseline,
        percent=coefficient / baseline * 100.0,
    )


DEFAULT_MICRO_BASELINE = 2.0  # sample-mean happiness, rounded as conventionally quoted
DEFAULT_MACRO_BASELINE = 1.7  # mean yearly intercept, rounded likewise
DEFAULT_DELTA_U = 0.01


@dataclass(frozen=True)
class PipelineOutputs:
    """Everything the one-shot run produces, ready for rendering."""

    pooled: OlsResult
    pooled_time: OlsResult | None
    pooled_design: DesignMatrix
    series: YearlyHappinessSeries
    stage2: "StageTwoFit"
    bp: "TestReport"
    durbin: "TestReport"
    rho: "AutocorrEstimate"
    micro_effects: tuple[EffectReport, ...]
    macro_effects: tuple[EffectReport, ...]
    income_top: tuple[EffectReport, ...]  # both pooled variants when available
    net: Decomposition | None
    micro_baseline: float
    macro_baseline: float


def run_pipeline(
    micro: MicroDataset,
    macro: MacroSeries,
    spec: ModelSpec | None = None,
    event_dummies: bool = True,
    min_year_obs: int = DEFAULT_MIN_YEAR_OBS,
    micro_baseline: float = DEFAULT_MICRO_BASELINE,
    macro_baseline: float = DEFAULT_MACRO_BASELINE,
    delta_u: float = DEFAULT_DELTA_U,
    max_workers: int | None = None,
    fit_time_dummies_variant: bool = True,
) -> PipelineOutputs:
    """Pooled micro fit, per-year intercepts, macro regression, diagnostics, effects.

    The pooled fit without time dummies supplies the personal unemployment
    coefficient for the net-effect decomposition; the time-dummy variant is
    fitted alongside (when requested) so bracket effects can be quoted under
    both specifications rather than silently picking one.
    """
    from .diagnostics import breusch_pagan, durbin_alternative, durbin_rho

    if spec is None:
        spec = default_micro_spec()
    base_spec = replace(spec, include_time_dummies=False)

    pooled_design = encode_design_matrix(micro, base_spec, drop_empty_dummies=True)
    pooled = ols_fit(pooled_design, alpha=base_spec.alpha)
    pooled_time = None
    if fit_time_dummies_variant and len(micro.years()) > 1:
        time_design = encode_design_matrix(
            micro, replace(spec, include_time_dummies=True), drop_empty_dummies=True
        )
        pooled_time = ols_fit(time_design, alpha=spec.alpha)

    series = stage_one(micro, base_spec, min_year_obs=min_year_obs, max_workers=max_workers)
    s2 = stage_two(series, macro, use_event_dummies=event_dummies)
    bp = breusch_pagan(s2.fit, s2.design)
    durbin = durbin_alternative(s2.fit, s2.design, lags=1)
    rho = durbin_rho(s2.fit, s2.design)

    skip = {"constant"}
    micro_effects = tuple(
        percent_effect(float(pooled.coefficients[j]), micro_baseline, pooled.names[j])
        for j in range(pooled.k)
        if pooled.names[j] not in skip
    )
    macro_effects = tuple(
        percent_effect(s2.fit.coefficient(name), macro_baseline, name)
        for name in ("unemployment", "inflation")
    )
    income_top = []
    for fit in (pooled, pooled_time):
        if fit is not None and "d_income6" in fit.names:
            income_top.append(
                percent_effect(fit.coefficient("d_income6"), micro_baseline, "d_income6")
            )
    net = None
    if "d_unemp" in pooled.names:
        net = unemployment_net_effect(
            personal=abs(pooled.coefficient("d_unemp")),
            aggregate=abs(s2.fit.coefficient("unemployment")),
            delta_u=delta_u,
            baseline=macro_baseline,
        )
    return PipelineOutputs(
        pooled=pooled,
        pooled_time=pooled_time,
        pooled_design=pooled_design,
        series=series,
        stage2=s2,
        bp=bp,
        durbin=durbin,
        rho=rho,
        micro_effects=micro_effects,
        macro_effects=macro_effects,
        income_top=tuple(income_top),
        net=net,
        micro_baseline=micro_baseline,
        macro_baseline=macro_baseline,
    )


def unemployment_net_effect(
    personal: float, aggregate: float, delta_u: float, baseline: float
) -> Decomposition:
    """Net happiness reduction from a rise in unemployment.

    delta_u * personal prices the extra individuals who become unemployed;
    the aggregate term is the economy-wide fear effect on everyone.  Both
    inputs are magnitudes (reductions).
    """
    if delta_u < 0:
        raise SpecError(f"delta_u must be nonnegative, got {delta_u}")
    if not baseline > 0:
        raise SpecError(f"baseline must be positive, got {baseline}")
    net = delta_u * personal + aggregate
    return Decomposition(
        personal=personal,
        aggregate=aggregate,
        delta_u=delta_u,
        baseline=baseline,
        net_effect=net,
        percent=net / baseline * 100.0,
    )
