"""Deterministic plain-text and CSV rendering of fits, diagnostics and effects.

All numbers print with 7 significant digits and a '.' decimal point so that
identical inputs always yield byte-identical reports.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

from .diagnostics import AutocorrEstimate, TestReport
from .estimators import OlsResult, OrderedProbitResult
from .pipeline import Decomposition, EffectReport, YearlyHappinessSeries

SIG_DIGITS = 7


def format_number(x: float, digits: int = SIG_DIGITS) -> str:
    if isinstance(x, bool):
        return str(int(x))
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if float(x) == int(x) and abs(x) < 1e15:
        return str(int(x))
    return f"{x:.{digits}g}"


def _two_line_rows(names: Sequence[str], coefs, ses, stars) -> list[str]:
    width = max((len(n) for n in names), default=0)
    val_width = max(
        [len(format_number(c)) + 1 for c in coefs] + [len(f"({format_number(s)})") for s in ses]
    )
    lines = []
    for name, coef, se, star in zip(names, coefs, ses, stars):
        value = format_number(coef) + ("*" if star else " ")
        lines.append(f"{name.ljust(width)}  {value.rjust(val_width)}")
        lines.append(f"{' ' * width}  {('(' + format_number(se) + ')').rjust(val_width)}")
    return lines


def ols_report_text(result: OlsResult, title: str = "OLS") -> str:
    lines = [
        f"{title}: n = {result.n}, k = {result.k}",
        "",
    ]
    lines += _two_line_rows(
        result.names, result.coefficients, result.standard_errors, result.significant
    )
    lines += [
        "",
        f"R-squared           {format_number(result.r_squared)}",
        f"adjusted R-squared  {format_number(result.adj_r_squared)}",
        f"residual SS         {format_number(result.rss)}",
        f"* significant at the {format_number(result.alpha * 100)}% level (two-sided)",
    ]
    return "\n".join(lines) + "\n"


def oprobit_report_text(result: OrderedProbitResult, title: str = "Ordered probit") -> str:
    names = list(result.names) + [f"cut{j + 1}" for j in range(len(result.cut_points))]
    coefs = list(result.coefficients) + list(result.cut_points)
    ses = list(result.standard_errors)
    stars = [False] * len(names)
    lines = [f"{title}: n = {result.n}, k = {result.k}, categories = {result.n_categories}", ""]
    lines += _two_line_rows(names, coefs, ses, stars)
    lines += [
        "",
        f"log-likelihood      {format_number(result.loglike)}",
        f"null log-likelihood {format_number(result.loglike_null)}",
        f"pseudo R-squared    {format_number(result.pseudo_r_squared)}",
        f"LR statistic        {format_number(result.lr_statistic)}",
        f"iterations          {result.iterations} (converged: {'yes' if result.converged else 'no'})",
    ]
    return "\n".join(lines) + "\n"


def fit_report_csv(result: OlsResult) -> str:
    lines = ["name,coef,se,t,p,sig"]
    for j, name in enumerate(result.names):
        lines.append(
            ",".join(
                [
                    name,
                    format_number(result.coefficients[j]),
                    format_number(result.standard_errors[j]),
                    format_number(result.t_values[j]),
                    format_number(result.p_values[j]),
                    "1" if result.significant[j] else "0",
                ]
            )
        )
    return "\n".join(lines) + "\n"


def oprobit_report_csv(result: OrderedProbitResult) -> str:
    lines = ["name,coef,se"]
    values = list(zip(result.names, result.coefficients)) + [
        (f"cut{j + 1}", c) for j, c in enumerate(result.cut_points)
    ]
    for (name, coef), se in zip(values, result.standard_errors):
        lines.append(",".join([name, format_number(coef), format_number(se)]))
    return "\n".join(lines) + "\n"


def test_reports_text(reports: Iterable[TestReport]) -> str:
    rows = [("test", "statistic", "distribution", "p", "decision")]
    for r in reports:
        rows.append(
            (
                r.name,
                format_number(r.statistic),
                r.distribution,
                format_number(r.p_value),
                "reject at 5%" if r.reject_at_5pct else "fail to reject",
            )
        )
    widths = [max(len(row[j]) for row in rows) for j in range(5)]
    lines = []
    for i, row in enumerate(rows):
        lines.append("  ".join(cell.ljust(widths[j]) for j, cell in enumerate(row)).rstrip())
        if i == 0:
            lines.append("-" * (sum(widths) + 8))
    return "\n".join(lines) + "\n"


def autocorr_text(label: str, est: AutocorrEstimate) -> str:
    flag = "  [|rho|>1.05: check the series]" if est.flagged else ""
    return (
        f"{label}: rho_hat = {format_number(est.rho_hat)} "
        f"({format_number(est.standard_error)}), {est.n_pairs} pairs{flag}"
    )


def yearly_series_text(series: YearlyHappinessSeries) -> str:
    lines = ["year  beta0          n     dropped"]
    lines.append("-" * len(lines[0]))
    for e in series.entries:
        dropped = ";".join(e.dropped) if e.dropped else "-"
        lines.append(f"{e.year}  {format_number(e.beta0).ljust(13)}  {str(e.n_year).ljust(4)}  {dropped}")
    for year in sorted(series.skipped):
        lines.append(f"{year}  skipped: {series.skipped[year]}")
    return "\n".join(lines) + "\n"


def effect_text(effect: EffectReport) -> str:
    return (
        f"{effect.regressor}: coefficient {format_number(effect.coefficient)} "
        f"over baseline {format_number(effect.baseline)} -> "
        f"{format_number(effect.percent)}%"
    )


def decomposition_text(d: Decomposition) -> str:
    return (
        f"unemployment net effect: {format_number(d.delta_u)} x "
        f"{format_number(d.personal)} (personal) + {format_number(d.aggregate)} (aggregate) "
        f"= {format_number(d.net_effect)} reduction "
        f"({format_number(d.percent)}% of baseline {format_number(d.baseline)})"
    )


def _section(title: str) -> list[str]:
    return ["", "=" * 64, title, "=" * 64, ""]


def pipeline_report_text(outputs) -> str:
    """One deterministic text report for the whole two-stage run."""
    parts: list[str] = ["Two-stage happiness regression report"]
    parts += _section("Pooled micro fit (no time dummies)")
    parts.append(ols_report_text(outputs.pooled, title="OLS, pooled over years"))
    if outputs.pooled_time is not None:
        parts += _section("Pooled micro fit (with time dummies)")
        parts.append(ols_report_text(outputs.pooled_time, title="OLS, pooled with time dummies"))
    parts += _section("Stage one: yearly intercepts (beta0)")
    parts.append(yearly_series_text(outputs.series))
    parts += _section("Stage two: beta0 on national indicators")
    parts.append(ols_report_text(outputs.stage2.fit, title="OLS, yearly intercepts"))
    if outputs.stage2.dropped:
        parts.append(
            "dropped event dummies (constant over usable years): "
            + ", ".join(outputs.stage2.dropped)
        )
    parts += _section("Diagnostics (stage two)")
    parts.append(test_reports_text([outputs.bp, outputs.durbin]))
    parts.append(autocorr_text("serial correlation rho_hat (one-lag auxiliary)", outputs.rho))
    parts += _section("Percent effects")
    parts.append(f"micro baseline {format_number(outputs.micro_baseline)}:")
    for eff in outputs.micro_effects:
        parts.append("  " + effect_text(eff))
    parts.append(f"macro baseline {format_number(outputs.macro_baseline)}:")
    for eff in outputs.macro_effects:
        parts.append("  " + effect_text(eff))
    if len(outputs.income_top) == 2:
        parts.append(
            "top income bracket, both pooled variants: "
            f"{format_number(outputs.income_top[0].percent)}% (no time dummies) / "
            f"{format_number(outputs.income_top[1].percent)}% (time dummies)"
        )
    if outputs.net is not None:
        parts.append(decomposition_text(outputs.net))
    return "\n".join(parts) + "\n"


def stage2_report_text(stage2, bp: TestReport, durbin: TestReport, rho: AutocorrEstimate) -> str:
    parts = [ols_report_text(stage2.fit, title="Stage two: beta0 on national indicators")]
    parts.append(f"usable years: {stage2.years[0]}-{stage2.years[-1]} (n = {len(stage2.years)})")
    if stage2.dropped:
        parts.append(f"dropped event dummies (constant over usable years): {', '.join(stage2.dropped)}")
    parts.append("")
    parts.append(test_reports_text([bp, durbin]))
    parts.append(autocorr_text("serial correlation rho_hat (one-lag auxiliary)", rho))
    return "\n".join(parts) + "\n"


def write_atomic(path, text: str) -> None:
    """Write via a temp file in the target directory plus rename: all or nothing."""
    from .data_model import atomic_writer

    with atomic_writer(path) as fh:
        fh.write(text)
