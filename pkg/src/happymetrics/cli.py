"""Command-line front end: load, fit, diagnose, report.

Exit codes: 0 success, 1 usage error, 2 data or convergence error.  Reports
are written atomically (temp file plus rename) so an aborted run never leaves
a partial file behind.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field, replace as dc_replace

from . import synth as synthmod
from .data_model import (
    MicroDataset,
    load_macro_csv,
    load_micro_csv,
    summarize,
    write_macro_csv,
    write_micro_csv,
)
from .diagnostics import (
    breusch_pagan,
    difference,
    durbin_alternative,
    durbin_rho,
    first_order_autocorr,
    linear_detrend,
    time_trend_test,
)
from .errors import HappymetricsError
from .pipeline import (
    DEFAULT_DELTA_U,
    DEFAULT_MACRO_BASELINE,
    DEFAULT_MICRO_BASELINE,
    DEFAULT_MIN_YEAR_OBS,
    YearlyHappinessSeries,
    default_micro_spec,
    load_model_spec,
    pooled_micro_fit,
    run_pipeline,
    stage_one,
    stage_two,
)
from . import report as rpt

USAGE_EXIT = 1
DATA_EXIT = 2


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage problems; this toolkit reserves 2
    # for data errors, so remap to 1
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"error: {message}", file=sys.stderr)
        raise SystemExit(USAGE_EXIT)


@dataclass
class RunConfig:
    """Validated invocation: every referenced input path is checked up front."""

    command: str
    inputs: dict[str, str] = field(default_factory=dict)
    out: str | None = None
    fmt: str = "text"

    def validate(self) -> None:
        import os

        for label, path in self.inputs.items():
            if path is not None and not os.path.exists(path):
                raise HappymetricsError(f"{label} file not found: {path}")


def _emit(text: str, out: str | None) -> None:
    if out:
        rpt.write_atomic(out, text)
    else:
        sys.stdout.write(text)


def _load_spec(args):
    return load_model_spec(args.spec) if args.spec else default_micro_spec()


def _micro_accounting(dataset: MicroDataset) -> str:
    return (
        f"loaded {dataset.n} rows "
        f"({dataset.n_rejected} rejected of {dataset.n_source_rows} data rows)\n"
    )


def _cmd_summarize(args) -> int:
    if not args.micro and not args.macro:
        raise HappymetricsError("summarize needs --micro and/or --macro")
    RunConfig("summarize", {"micro": args.micro, "macro": args.macro}).validate()
    chunks = []
    if args.micro:
        data = load_micro_csv(args.micro)
        table = summarize(data)
        body = table.to_csv() if args.format == "csv" else table.to_text()
        chunks.append(_micro_accounting(data) + body if args.format == "text" else body)
    if args.macro:
        table = summarize(load_macro_csv(args.macro))
        chunks.append(table.to_csv() if args.format == "csv" else table.to_text())
    _emit("\n".join(chunks), args.out)
    return 0


def _cmd_fit_micro(args) -> int:
    RunConfig(
        "fit-micro", {"micro": args.micro, "spec": args.spec, "macro": args.macro}
    ).validate()
    micro = load_micro_csv(args.micro)
    macro = load_macro_csv(args.macro) if args.macro else None
    fit = pooled_micro_fit(micro, _load_spec(args), macro=macro, estimator="ols")
    text = rpt.fit_report_csv(fit) if args.format == "csv" else rpt.ols_report_text(
        fit, title="OLS, pooled over years"
    )
    _emit(text, args.out)
    return 0


def _cmd_fit_oprobit(args) -> int:
    RunConfig("fit-oprobit", {"micro": args.micro, "spec": args.spec}).validate()
    micro = load_micro_csv(args.micro)
    fit = pooled_micro_fit(micro, _load_spec(args), estimator="oprobit")
    text = rpt.oprobit_report_csv(fit) if args.format == "csv" else rpt.oprobit_report_text(fit)
    _emit(text, args.out)
    return 0


def _cmd_stage1(args) -> int:
    RunConfig("stage1", {"micro": args.micro, "spec": args.spec}).validate()
    micro = load_micro_csv(args.micro)
    series = stage_one(
        micro, _load_spec(args), min_year_obs=args.min_year_obs, max_workers=args.jobs
    )
    if args.out:
        series.to_csv(args.out)
    else:
        sys.stdout.write(rpt.yearly_series_text(series))
    return 0


def _stage2_pieces(args):
    series = YearlyHappinessSeries.from_csv(args.beta0)
    macro = load_macro_csv(args.macro)
    s2 = stage_two(
        series, macro, use_event_dummies=args.event_dummies, use_raw_gdp=args.raw_gdp
    )
    return series, macro, s2


def _cmd_stage2(args) -> int:
    RunConfig("stage2", {"beta0": args.beta0, "macro": args.macro}).validate()
    _, _, s2 = _stage2_pieces(args)
    bp = breusch_pagan(s2.fit, s2.design)
    durbin = durbin_alternative(s2.fit, s2.design)
    rho = durbin_rho(s2.fit, s2.design)
    _emit(rpt.stage2_report_text(s2, bp, durbin, rho), args.out)
    return 0


def _cmd_diagnose(args) -> int:
    RunConfig("diagnose", {"beta0": args.beta0, "macro": args.macro}).validate()
    series, macro, s2 = _stage2_pieces(args)
    reports = [
        breusch_pagan(s2.fit, s2.design),
        durbin_alternative(s2.fit, s2.design),
    ]
    aligned = macro.subset([int(y) for y in series.years()])
    lines = [rpt.test_reports_text(reports)]
    lines.append(rpt.autocorr_text("stage-two rho_hat", durbin_rho(s2.fit, s2.design)))
    detrended = linear_detrend(aligned.gdp_per_capita)
    lines.append(rpt.autocorr_text("detrended GDP per capita", first_order_autocorr(detrended)))
    gdpd = difference(aligned.gdp_per_capita)
    lines.append(rpt.autocorr_text("GDP change (one-year difference)", first_order_autocorr(gdpd)))
    lines.append(rpt.autocorr_text("unemployment", first_order_autocorr(aligned.unemployment)))
    lines.append(rpt.autocorr_text("inflation", first_order_autocorr(aligned.inflation)))
    trend_reports = []
    for label, values in (
        ("time trend: GDP change", gdpd),
        ("time trend: inflation", aligned.inflation),
        ("time trend: unemployment", aligned.unemployment),
    ):
        trend_reports.append(dc_replace(time_trend_test(values), name=label))
    lines.append("")
    lines.append(rpt.test_reports_text(trend_reports))
    _emit("\n".join(lines), args.out)
    return 0


def _cmd_pipeline(args) -> int:
    RunConfig(
        "pipeline", {"micro": args.micro, "macro": args.macro, "spec": args.spec}
    ).validate()
    micro = load_micro_csv(args.micro)
    macro = load_macro_csv(args.macro)
    outputs = run_pipeline(
        micro,
        macro,
        spec=load_model_spec(args.spec) if args.spec else None,
        event_dummies=args.event_dummies,
        min_year_obs=args.min_year_obs,
        micro_baseline=args.micro_baseline,
        macro_baseline=args.macro_baseline,
        delta_u=args.delta_u,
        max_workers=args.jobs,
    )
    _emit(rpt.pipeline_report_text(outputs), args.out)
    return 0


def _cmd_synth(args) -> int:
    if args.dgp:
        RunConfig("synth", {"dgp": args.dgp}).validate()
    if args.mode == "micro":
        dgp = synthmod.load_micro_dgp(args.dgp) if args.dgp else synthmod.default_micro_dgp()
        generated = synthmod.generate_micro(dgp, n_per_year=args.n_per_year, seed=args.seed)
        write_micro_csv(generated.dataset, args.out)
    else:
        dgp = synthmod.load_macro_dgp(args.dgp) if args.dgp else synthmod.default_macro_dgp()
        macro, series = synthmod.generate_macro(dgp, seed=args.seed)
        write_macro_csv(macro, args.out)
        if args.beta0_out:
            series.to_csv(args.beta0_out)
    return 0


def build_parser() -> _Parser:
    parser = _Parser(
        prog="happymetrics",
        description="Two-stage happiness regression toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    def add_out(p, fmt=True):
        p.add_argument("--out", help="output path (atomic write); default stdout")
        if fmt:
            p.add_argument("--format", choices=("text", "csv"), default="text")

    p = sub.add_parser("summarize", help="per-variable summary statistics")
    p.add_argument("--micro")
    p.add_argument("--macro")
    add_out(p)
    p.set_defaults(fn=_cmd_summarize)

    p = sub.add_parser("fit-micro", help="pooled OLS on the micro data")
    p.add_argument("--micro", required=True)
    p.add_argument("--spec", help="model spec JSON; default standard happiness spec")
    p.add_argument("--macro", help="attach per-year national indicators as regressors")
    add_out(p)
    p.set_defaults(fn=_cmd_fit_micro)

    p = sub.add_parser("fit-oprobit", help="pooled ordered probit on the micro data")
    p.add_argument("--micro", required=True)
    p.add_argument("--spec")
    add_out(p)
    p.set_defaults(fn=_cmd_fit_oprobit)

    p = sub.add_parser("stage1", help="per-year intercepts (beta0 series)")
    p.add_argument("--micro", required=True)
    p.add_argument("--spec")
    p.add_argument("--min-year-obs", type=int, default=DEFAULT_MIN_YEAR_OBS)
    p.add_argument("--jobs", type=int, default=1, help="parallel per-year fits")
    p.add_argument("--out", help="beta0 CSV (year,beta0,n_year,dropped_columns)")
    p.set_defaults(fn=_cmd_stage1)

    p = sub.add_parser("stage2", help="regress beta0 on national indicators")
    p.add_argument("--beta0", required=True)
    p.add_argument("--macro", required=True)
    p.add_argument("--event-dummies", action="store_true")
    p.add_argument("--raw-gdp", action="store_true", help="GDP level instead of difference")
    add_out(p, fmt=False)
    p.set_defaults(fn=_cmd_stage2)

    p = sub.add_parser("diagnose", help="heteroskedasticity/serial-correlation reports")
    p.add_argument("--beta0", required=True)
    p.add_argument("--macro", required=True)
    p.add_argument("--event-dummies", action="store_true")
    p.add_argument("--raw-gdp", action="store_true")
    add_out(p, fmt=False)
    p.set_defaults(fn=_cmd_diagnose)

    p = sub.add_parser("pipeline", help="both stages plus diagnostics and effects")
    p.add_argument("--micro", required=True)
    p.add_argument("--macro", required=True)
    p.add_argument("--spec")
    p.add_argument("--event-dummies", dest="event_dummies", action="store_true", default=True)
    p.add_argument("--no-event-dummies", dest="event_dummies", action="store_false")
    p.add_argument("--min-year-obs", type=int, default=DEFAULT_MIN_YEAR_OBS)
    p.add_argument("--micro-baseline", type=float, default=DEFAULT_MICRO_BASELINE)
    p.add_argument("--macro-baseline", type=float, default=DEFAULT_MACRO_BASELINE)
    p.add_argument("--delta-u", type=float, default=DEFAULT_DELTA_U)
    p.add_argument("--jobs", type=int, default=1)
    add_out(p, fmt=False)
    p.set_defaults(fn=_cmd_pipeline)

    p = sub.add_parser("synth", help="generate synthetic micro/macro CSV data")
    p.add_argument("mode", choices=("micro", "macro"))
    p.add_argument("--dgp", help="DGP JSON; default built-in DGP")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--n-per-year", type=int, default=500)
    p.add_argument("--out", required=True)
    p.add_argument("--beta0-out", help="also write the implied beta0 series (macro mode)")
    p.set_defaults(fn=_cmd_synth)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.fn(args)
    except HappymetricsError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return DATA_EXIT


if __name__ == "__main__":
    sys.exit(main())
