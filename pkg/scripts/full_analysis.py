#!/usr/bin/env python3
"""Complete analysis on user-supplied survey and indicator data.

Produces every table in one pass: summary statistics, pooled OLS with and
without time dummies, pooled ordered probit, pooled OLS with attached macro
columns, the per-year intercept series, the macro regression with and without
event dummies, and the full diagnostic battery for each macro fit.

Usage:
    python scripts/full_analysis.py --micro micro.csv --macro macro.csv [--out report.txt]
"""

from __future__ import annotations

import argparse
import sys

from happymetrics.data_model import load_macro_csv, load_micro_csv, summarize
from happymetrics.diagnostics import breusch_pagan, durbin_alternative, durbin_rho
from happymetrics.errors import HappymetricsError
from happymetrics.pipeline import (
    default_micro_spec,
    pooled_micro_fit,
    stage_one,
    stage_two,
)
from happymetrics.report import (
    ols_report_text,
    oprobit_report_text,
    stage2_report_text,
    write_atomic,
    yearly_series_text,
)


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--micro", required=True)
    parser.add_argument("--macro", required=True)
    parser.add_argument("--min-year-obs", type=int, default=100)
    parser.add_argument("--out")
    args = parser.parse_args()

    micro = load_micro_csv(args.micro)
    macro = load_macro_csv(args.macro)
    parts = []

    parts.append(f"micro rows kept {micro.n} (rejected {micro.n_rejected} of {micro.n_source_rows})\n")
    parts.append(summarize(micro).to_text())
    parts.append(summarize(macro).to_text())

    parts.append(ols_report_text(pooled_micro_fit(micro, default_micro_spec()),
                                 title="(1) pooled OLS, no time dummies"))
    parts.append(ols_report_text(pooled_micro_fit(micro, default_micro_spec(time_dummies=True)),
                                 title="(2) pooled OLS, time dummies"))
    parts.append(oprobit_report_text(
        pooled_micro_fit(micro, default_micro_spec(time_dummies=True), estimator="oprobit"),
        title="(3) pooled ordered probit, time dummies"))
    parts.append(ols_report_text(pooled_micro_fit(micro, default_micro_spec(), macro=macro),
                                 title="(4) pooled OLS with per-year macro columns"))

    series = stage_one(micro, default_micro_spec(), min_year_obs=args.min_year_obs)
    parts.append(yearly_series_text(series))

    for label, dummies in (("(D1) no event dummies", False), ("(D2) event dummies", True)):
        result = stage_two(series, macro, use_event_dummies=dummies)
        bp = breusch_pagan(result.fit, result.design)
        durbin = durbin_alternative(result.fit, result.design)
        rho = durbin_rho(result.fit, result.design)
        parts.append(label + "\n" + stage2_report_text(result, bp, durbin, rho))

    text = "\n".join(parts)
    if args.out:
        write_atomic(args.out, text)
        print(f"report written to {args.out}")
    else:
        sys.stdout.write(text)
    return 0


if __name__ == "__main__":
    try:
        raise SystemExit(main())
    except HappymetricsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        raise SystemExit(2)
