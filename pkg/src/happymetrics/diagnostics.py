"""Time-series and residual diagnostics for the macro regression stage.

Covers first-order autocorrelation (as a lag regression so a standard error
is available), linear detrending and the associated trend t test, first
differencing, the Breusch-Pagan heteroskedasticity test in its F form, and
Durbin's alternative test for serial correlation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data_model import DesignMatrix
from .errors import EstimationError
from .estimators import OlsResult, f_distribution_sf, ols_fit, t_distribution_sf


@dataclass(frozen=True)
class AutocorrEstimate:
    """First-order autocorrelation estimated as the slope of x_t on x_{t-1}."""

    rho_hat: float
    standard_error: float
    n_pairs: int

    @property
    def flagged(self) -> bool:
        # estimation noise can push |rho| slightly past 1; more than that is suspect
        return abs(self.rho_hat) > 1.05


@dataclass(frozen=True)
class TestReport:
    name: str
    statistic: float
    distribution: str  # e.g. "F(7, 15)" or "t(17)"
    p_value: float
    reject_at_5pct: bool

    def __post_init__(self):
        if not math.isnan(self.p_value):
            assert 0.0 <= self.p_value <= 1.0
            assert self.reject_at_5pct == (self.p_value < 0.05)


def _tiny_design(names, cols, y, provenance) -> DesignMatrix:
    return DesignMatrix(
        names=tuple(names),
        X=np.column_stack(cols),
        y=np.asarray(y, dtype=float),
        provenance=tuple(provenance),
    )


def first_order_autocorr(series: np.ndarray) -> AutocorrEstimate:
    """Regress x_t on x_{t-1} with a constant; the slope is rho_hat.

    Uses exactly n-1 lagged pairs.
    """
    x = np.asarray(series, dtype=float)
    if len(x) < 3:
        raise EstimationError(f"autocorrelation needs length >= 3, got {len(x)}")
    lagged, current = x[:-1], x[1:]
    if np.ptp(lagged) == 0:
        raise EstimationError("zero-variance series: autocorrelation undefined")
    design = _tiny_design(
        ["constant", "lag1"], [np.ones(len(lagged)), lagged], current, ["constant", "continuous:lag1"]
    )
    fit = ols_fit(design)
    return AutocorrEstimate(
        rho_hat=float(fit.coefficients[1]),
        standard_error=float(fit.standard_errors[1]),
        n_pairs=len(lagged),
    )


def _trend_fit(series: np.ndarray) -> OlsResult:
    x = np.asarray(series, dtype=float)
    idx = np.arange(1, len(x) + 1, dtype=float)
    design = _tiny_design(
        ["constant", "t"], [np.ones(len(x)), idx], x, ["constant", "trend"]
    )
    return ols_fit(design)


def linear_detrend(series: np.ndarray) -> np.ndarray:
    """Residuals of the series after OLS on a constant and a linear index."""
    x = np.asarray(series, dtype=float)
    if len(x) < 3:
        raise EstimationError(f"detrending needs length >= 3, got {len(x)}")
    if np.ptp(x) == 0:
        return np.zeros(len(x))
    return _trend_fit(x).residuals


def time_trend_test(series: np.ndarray) -> TestReport:
    """t test of the linear-index coefficient in the detrending regression."""
    x = np.asarray(series, dtype=float)
    if len(x) < 4:
        raise EstimationError(f"trend test needs length >= 4, got {len(x)}")
    if np.ptp(x) == 0:
        raise EstimationError("degenerate fit: zero-variance residuals (constant series)")
    fit = _trend_fit(x)
    slope = float(fit.coefficients[1])
    se = float(fit.standard_errors[1])
    df = fit.df_resid
    if se == 0.0:
        if slope == 0.0:
            raise EstimationError("degenerate fit: zero-variance residuals")
        stat = math.inf if slope > 0 else -math.inf
        p = 0.0
    else:
        stat = slope / se
        p = 2.0 * t_distribution_sf(abs(stat), df)
    return TestReport(
        name="time trend",
        statistic=stat,
        distribution=f"t({df})",
        p_value=p,
        reject_at_5pct=p < 0.05,
    )


def difference(series: np.ndarray) -> np.ndarray:
    """First differences, length n-1; element i is x_{i+1} - x_i.

    The difference is attributed to the later period: output element i
    describes the change into period i+1 of the input.
    """
    x = np.asarray(series, dtype=float)
    if len(x) < 2:
        raise EstimationError(f"differencing needs length >= 2, got {len(x)}")
    return np.diff(x)


def breusch_pagan(fit: OlsResult, design: DesignMatrix) -> TestReport:
    """Breusch-Pagan heteroskedasticity test, F form.

    Squared residuals are regressed on the original non-constant regressors;
    the statistic is [R2/k] / [(1-R2)/(n-k-1)] against F(k, n-k-1).
    """
    if len(fit.residuals) != design.n:
        raise EstimationError("fit and design sizes disagree")
    e2 = fit.residuals**2
    const_idx = design.constant_index
    keep = [j for j in range(design.k) if j != const_idx]
    k_aux = len(keep)
    if k_aux == 0:
        raise EstimationError("Breusch-Pagan needs at least one non-constant regressor")
    n = design.n
    df2 = n - k_aux - 1
    dist = f"F({k_aux}, {df2})"
    if np.ptp(e2) <= 1e-12 * max(float(np.max(e2)), 1e-300):
        # squared residuals identical up to rounding: nothing to explain
        return TestReport("Breusch-Pagan", 0.0, dist, 1.0, False)
    aux = _tiny_design(
        ["constant"] + [design.names[j] for j in keep],
        [np.ones(n)] + [design.X[:, j] for j in keep],
        e2,
        ["constant"] + [design.provenance[j] for j in keep],
    )
    aux_fit = ols_fit(aux)
    r2 = aux_fit.r_squared
    stat = (r2 / k_aux) / ((1.0 - r2) / df2)
    p = f_distribution_sf(stat, k_aux, df2)
    return TestReport("Breusch-Pagan", stat, dist, p, p < 0.05)


def durbin_alternative(fit: OlsResult, design: DesignMatrix, lags: int = 1) -> TestReport:
    """Durbin's alternative test for serial correlation of regression errors.

    Residuals are regressed on their own lags plus every original regressor;
    missing initial lag values are zero-filled so no observation is lost.
    With one lag the report is a t test on the lagged-residual coefficient
    (reported alongside its standard error as rho_hat); with more lags it is
    the joint F test on all lag coefficients.
    """
    if lags < 1:
        raise EstimationError("lags must be >= 1")
    e = fit.residuals
    n = design.n
    if len(e) != n:
        raise EstimationError("fit and design sizes disagree")
    scale = max(1.0, float(np.max(np.abs(fit.fitted))))
    if np.max(np.abs(e)) <= 1e-12 * scale:
        raise EstimationError("degenerate residuals: all zero (perfect fit)")
    if n <= design.k + lags:
        raise EstimationError(f"n={n} too small for {design.k} regressors plus {lags} lags")

    lag_cols = []
    for ell in range(1, lags + 1):
        col = np.zeros(n)
        col[ell:] = e[:-ell]
        lag_cols.append(col)
    names = [f"resid_lag{ell}" for ell in range(1, lags + 1)] + list(design.names)
    prov = [f"continuous:resid_lag{ell}" for ell in range(1, lags + 1)] + list(design.provenance)
    aux = _tiny_design(names, lag_cols + [design.X[:, j] for j in range(design.k)], e, prov)
    aux_fit = ols_fit(aux)

    if lags == 1:
        rho = float(aux_fit.coefficients[0])
        se = float(aux_fit.standard_errors[0])
        df = aux_fit.df_resid
        if se == 0.0:
            stat = math.inf if rho > 0 else (-math.inf if rho < 0 else 0.0)
            p = 0.0 if rho != 0 else 1.0
        else:
            stat = rho / se
            p = 2.0 * t_distribution_sf(abs(stat), df)
        return TestReport("Durbin alternative", stat, f"t({df})", p, p < 0.05)

    # joint F on the lag coefficients: restricted model drops all lags
    restricted = _tiny_design(
        design.names, [design.X[:, j] for j in range(design.k)], e, design.provenance
    )
    rss_r = ols_fit(restricted).rss
    rss_u = aux_fit.rss
    df2 = aux_fit.df_resid
    stat = ((rss_r - rss_u) / lags) / (rss_u / df2)
    p = f_distribution_sf(stat, lags, df2)
    return TestReport("Durbin alternative", stat, f"F({lags}, {df2})", p, p < 0.05)


def durbin_rho(fit: OlsResult, design: DesignMatrix) -> AutocorrEstimate:
    """The lag coefficient and standard error from the one-lag Durbin regression.

    This is the serial-correlation rho_hat row reported next to macro fits.
    """
    e = fit.residuals
    n = design.n
    lag = np.zeros(n)
    lag[1:] = e[:-1]
    aux = _tiny_design(
        ["resid_lag1"] + list(design.names),
        [lag] + [design.X[:, j] for j in range(design.k)],
        e,
        ["continuous:resid_lag1"] + list(design.provenance),
    )
    aux_fit = ols_fit(aux)
    return AutocorrEstimate(
        rho_hat=float(aux_fit.coefficients[0]),
        standard_error=float(aux_fit.standard_errors[0]),
        n_pairs=n - 1,
    )
