"""Ordinary least squares with full inference, and ordered-probit maximum likelihood.

OLS is solved by QR decomposition (never by inverting X'X directly); the
inverse needed for standard errors is reconstructed from the triangular
factor.  The ordered probit maximizes the categorical likelihood by
Newton-Raphson with analytic gradient and Hessian, step halving, and a
monotone reparameterization of the cut points.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special
from scipy.linalg import solve_triangular

from .data_model import DesignMatrix
from .errors import ConvergenceError, DataError, EstimationError, SeparationError, SpecError

RANK_TOL = 1e-10
OPROBIT_MAX_ITER = 200
OPROBIT_LL_TOL = 1e-10
OPROBIT_GRAD_TOL = 1e-8
_P_FLOOR = 1e-300


# --------------------------------------------------------------------------
# Distribution plumbing
# --------------------------------------------------------------------------


def normal_cdf(x: float | np.ndarray) -> float | np.ndarray:
    """Standard normal CDF via the complementary error function."""
    arr = np.asarray(x, dtype=float)
    if not np.isfinite(arr).all():
        raise EstimationError("normal_cdf requires finite input")
    out = special.ndtr(arr)
    return float(out) if np.isscalar(x) or arr.ndim == 0 else out


def normal_pdf(x: np.ndarray) -> np.ndarray:
    return np.exp(-0.5 * np.square(x)) / math.sqrt(2.0 * math.pi)


def t_distribution_sf(t: float, df: int) -> float:
    """Upper-tail probability of Student-t; two-sided p = 2 * sf(|t|)."""
    if df < 1:
        raise EstimationError(f"degrees of freedom {df} < 1")
    if math.isnan(t):
        raise EstimationError("t statistic is not finite")
    if math.isinf(t):
        return 0.0 if t > 0 else 1.0
    from scipy import stats

    return float(stats.t.sf(t, df))


def f_distribution_sf(f: float, df1: int, df2: int) -> float:
    if math.isnan(f):
        raise EstimationError("F statistic is not finite")
    if math.isinf(f):
        return 0.0
    from scipy import stats

    return float(stats.f.sf(f, df1, df2))


# --------------------------------------------------------------------------
# Ordinary least squares
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OlsResult:
    names: tuple[str, ...]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    t_values: np.ndarray
    p_values: np.ndarray
    significant: np.ndarray  # two-sided at `alpha`
    residuals: np.ndarray
    fitted: np.ndarray
    n: int
    k: int
    r_squared: float
    adj_r_squared: float
    rss: float
    tss: float
    alpha: float = 0.05

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])

    def standard_error(self, name: str) -> float:
        return float(self.standard_errors[self.names.index(name)])

    @property
    def df_resid(self) -> int:
        return self.n - self.k


def _qr_rank_check(X: np.ndarray, names: tuple[str, ...]) -> tuple[np.ndarray, np.ndarray]:
    """QR of X; raise naming the offending column pair when rank deficient.

    Column j is declared collinear when its residual norm after projection on
    columns 0..j-1 (|R[j,j]| for unpivoted QR) falls below RANK_TOL times its
    own norm.
    """
    Q, R = np.linalg.qr(X)
    col_norms = np.linalg.norm(X, axis=0)
    diag = np.abs(np.diag(R))
    for j in range(X.shape[1]):
        if diag[j] < RANK_TOL * col_norms[j]:
            # most correlated earlier column is the most useful thing to name
            best, best_cos = 0, -1.0
            for i in range(j):
                denom = col_norms[i] * col_norms[j]
                cos = abs(float(X[:, i] @ X[:, j])) / denom if denom > 0 else 0.0
                if cos > best_cos:
                    best, best_cos = i, cos
            raise EstimationError(
                f"design is rank deficient: column '{names[j]}' is collinear "
                f"with '{names[best]}'"
            )
    return Q, R


def ols_fit(design: DesignMatrix, alpha: float = 0.05) -> OlsResult:
    """Least-squares fit with homoskedastic standard errors s^2 (X'X)^-1.

    p values come from Student-t with n-k degrees of freedom; the significance
    flags are two-sided at `alpha`.
    """
    X, y = design.X, design.y
    n, k = X.shape
    if n <= k:
        raise EstimationError(f"n={n} observations cannot identify k={k} coefficients")
    Q, R = _qr_rank_check(X, design.names)
    beta = solve_triangular(R, Q.T @ y)
    fitted = X @ beta
    residuals = y - fitted
    rss = float(residuals @ residuals)
    tss = float(np.sum((y - y.mean()) ** 2))

    s2 = rss / (n - k)
    r_inv = solve_triangular(R, np.eye(k))
    xtx_inv = r_inv @ r_inv.T
    variances = s2 * np.diag(xtx_inv)
    se = np.sqrt(np.clip(variances, 0.0, None))

    with np.errstate(divide="ignore", invalid="ignore"):
        t_values = np.where(se > 0, beta / se, np.where(beta == 0, 0.0, np.inf * np.sign(beta)))
    p_values = np.array([2.0 * t_distribution_sf(abs(t), n - k) for t in t_values])
    if tss > 0:
        r2 = 1.0 - rss / tss
    else:
        r2 = float("nan")
    adj = 1.0 - (1.0 - r2) * (n - 1) / (n - k)
    return OlsResult(
        names=design.names,
        coefficients=beta,
        standard_errors=se,
        t_values=t_values,
        p_values=p_values,
        significant=p_values < alpha,
        residuals=residuals,
        fitted=fitted,
        n=n,
        k=k,
        r_squared=r2,
        adj_r_squared=adj,
        rss=rss,
        tss=tss,
        alpha=alpha,
    )


# --------------------------------------------------------------------------
# Ordered probit
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class OrderedProbitResult:
    names: tuple[str, ...]
    coefficients: np.ndarray
    cut_points: np.ndarray  # strictly increasing, K-1 of them
    standard_errors: np.ndarray  # for coefficients then cut points
    loglike: float
    loglike_null: float
    pseudo_r_squared: float  # McFadden: 1 - l/l0
    lr_statistic: float  # 2 (l - l0)
    n: int
    k: int
    n_categories: int
    iterations: int
    converged: bool
    probs: np.ndarray  # n x K predicted category probabilities at the MLE

    def coefficient(self, name: str) -> float:
        return float(self.coefficients[self.names.index(name)])


def _cuts_from_raw(raw_cuts: np.ndarray) -> np.ndarray:
    """First cut free, each later cut = previous + exp(delta): always ordered.

    The exponent is capped so an absurd trial step from an ill-conditioned
    Newton iteration yields a terrible finite likelihood (and is rejected by
    the line search) instead of overflowing.
    """
    cuts = np.empty_like(raw_cuts)
    cuts[0] = raw_cuts[0]
    for j in range(1, len(raw_cuts)):
        cuts[j] = cuts[j - 1] + math.exp(min(raw_cuts[j], 700.0))
    return cuts


def _raw_from_cuts(cuts: np.ndarray) -> np.ndarray:
    raw = np.empty_like(cuts)
    raw[0] = cuts[0]
    raw[1:] = np.log(np.diff(cuts))
    return raw


def _op_bounds(cuts: np.ndarray, xb: np.ndarray, y_index: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ext = np.concatenate(([-np.inf], cuts, [np.inf]))
    return ext[y_index + 1] - xb, ext[y_index] - xb


def _op_loglike(theta: np.ndarray, X: np.ndarray, y_index: np.ndarray, n_cuts: int) -> float:
    k = X.shape[1]
    beta, cuts = theta[:k], _cuts_from_raw(theta[k:])
    xb = X @ beta if k else np.zeros(len(y_index))
    hi, lo = _op_bounds(cuts, xb, y_index)
    p = special.ndtr(hi) - special.ndtr(lo)
    return float(np.sum(np.log(np.maximum(p, _P_FLOOR))))


def _op_score_pieces(
    beta: np.ndarray, cuts: np.ndarray, X: np.ndarray, y_index: np.ndarray
) -> dict:
    """Shared per-observation quantities for gradient and Hessian."""
    k = X.shape[1]
    xb = X @ beta if k else np.zeros(len(y_index))
    hi, lo = _op_bounds(cuts, xb, y_index)
    p = np.maximum(special.ndtr(hi) - special.ndtr(lo), _P_FLOOR)
    pdf_hi = np.where(np.isfinite(hi), normal_pdf(np.where(np.isfinite(hi), hi, 0.0)), 0.0)
    pdf_lo = np.where(np.isfinite(lo), normal_pdf(np.where(np.isfinite(lo), lo, 0.0)), 0.0)
    zp_hi = np.where(np.isfinite(hi), hi, 0.0) * pdf_hi  # z*phi(z) -> 0 at +-inf
    zp_lo = np.where(np.isfinite(lo), lo, 0.0) * pdf_lo
    return dict(p=p, pdf_hi=pdf_hi, pdf_lo=pdf_lo, zp_hi=zp_hi, zp_lo=zp_lo)


def _op_grad_hess_natural(
    beta: np.ndarray, cuts: np.ndarray, X: np.ndarray, y_index: np.ndarray
) -> tuple[np.ndarray, np.ndarray]:
    """Gradient and Hessian of the log-likelihood in (beta, cuts) coordinates."""
    n, k = X.shape
    n_cuts = len(cuts)
    pieces = _op_score_pieces(beta, cuts, X, y_index)
    p, pdf_hi, pdf_lo = pieces["p"], pieces["pdf_hi"], pieces["pdf_lo"]
    zp_hi, zp_lo = pieces["zp_hi"], pieces["zp_lo"]
    inv_p = 1.0 / p
    rows = np.arange(n)
    hi_idx = y_index        # 0-based index of the upper bounding cut, valid when < n_cuts
    lo_idx = y_index - 1    # lower bounding cut, valid when >= 0
    hi_valid = hi_idx < n_cuts
    lo_valid = lo_idx >= 0

    # dP/dbeta_k = -x_k (phi_hi - phi_lo); dP/dc_m = phi_hi [m=j] - phi_lo [m=j-1]
    dP_beta = -X * (pdf_hi - pdf_lo)[:, None] if k else np.zeros((n, 0))
    dP_cut = np.zeros((n, n_cuts))
    dP_cut[rows[hi_valid], hi_idx[hi_valid]] += pdf_hi[hi_valid]
    dP_cut[rows[lo_valid], lo_idx[lo_valid]] -= pdf_lo[lo_valid]
    dP = np.hstack([dP_beta, dP_cut])
    grad = (dP * inv_p[:, None]).sum(axis=0)

    # H = sum_i [ d2P_i / P_i - (dP_i/P_i)(dP_i/P_i)' ]
    hess = np.zeros((k + n_cuts, k + n_cuts))
    if k:
        # d2P/dbeta dbeta' = -x x' (z_hi phi_hi - z_lo phi_lo)
        hess[:k, :k] = -(X * ((zp_hi - zp_lo) * inv_p)[:, None]).T @ X
    if n_cuts:
        # d2P/dc_m^2 = -[m=j] z_hi phi_hi + [m=j-1] z_lo phi_lo (off-diagonal zero)
        d2_cut = np.zeros((n, n_cuts))
        d2_cut[rows[hi_valid], hi_idx[hi_valid]] += -zp_hi[hi_valid]
        d2_cut[rows[lo_valid], lo_idx[lo_valid]] += zp_lo[lo_valid]
        hess[k:, k:] = np.diag((d2_cut * inv_p[:, None]).sum(axis=0))
    if k and n_cuts:
        # d2P/dbeta_k dc_m = x_k (z_hi phi_hi [m=j] - z_lo phi_lo [m=j-1])
        cross = np.zeros((n, n_cuts))
        cross[rows[hi_valid], hi_idx[hi_valid]] += zp_hi[hi_valid]
        cross[rows[lo_valid], lo_idx[lo_valid]] -= zp_lo[lo_valid]
        bc = (X * inv_p[:, None]).T @ cross
        hess[:k, k:] = bc
        hess[k:, :k] = bc.T
    scaled = dP * inv_p[:, None]
    hess -= scaled.T @ scaled
    return grad, hess


def _op_grad_hess_raw(
    theta: np.ndarray, X: np.ndarray, y_index: np.ndarray, n_cuts: int
) -> tuple[np.ndarray, np.ndarray]:
    """Chain rule from (beta, cuts) to the optimizer's raw parameterization."""
    k = X.shape[1]
    raw_cuts = theta[k:]
    cuts = _cuts_from_raw(raw_cuts)
    grad_nat, hess_nat = _op_grad_hess_natural(theta[:k], cuts, X, y_index)

    # J[k+m, k+j] = dc_m/draw_j = 1 for j = 0, exp(raw_j) for 1 <= j <= m, else 0
    J = np.eye(k + n_cuts)
    for m_ in range(n_cuts):
        J[k + m_, k] = 1.0
        for j in range(1, m_ + 1):
            J[k + m_, k + j] = math.exp(raw_cuts[j])
    grad = J.T @ grad_nat
    hess = J.T @ hess_nat @ J
    # curvature of the map: d2c_m/draw_j^2 = exp(raw_j) for m >= j >= 1
    for j in range(1, n_cuts):
        hess[k + j, k + j] += math.exp(raw_cuts[j]) * float(np.sum(grad_nat[k + j :]))
    return grad, hess


def _null_cuts_loglike(y_index: np.ndarray, n_categories: int) -> tuple[np.ndarray, float]:
    """Closed-form cuts-only MLE: inverse normal CDF of cumulative proportions."""
    n = len(y_index)
    counts = np.bincount(y_index, minlength=n_categories).astype(float)
    props = counts / n
    cum = np.cumsum(props)[:-1]
    cuts = special.ndtri(cum)
    ll0 = float(np.sum(counts[counts > 0] * np.log(props[counts > 0])))
    return cuts, ll0


def ordered_probit_fit(
    design: DesignMatrix,
    y: np.ndarray | None = None,
    n_categories: int | None = None,
    max_iter: int = OPROBIT_MAX_ITER,
) -> OrderedProbitResult:
    """Maximum-likelihood ordered probit for categories 1..K.

    The design must not contain a constant column (it is absorbed by the cut
    points).  Starting values are beta = 0 with the closed-form cuts-only
    solution, so the first iterate already prices the null model.  Newton
    steps are halved whenever the likelihood would decrease; when the Hessian
    is not negative definite the step falls back to scaled gradient ascent.
    Standard errors come from the observed information matrix in the natural
    (beta, cuts) coordinates.
    """
    if design.constant_index is not None:
        raise SpecError("ordered probit design must not contain a constant column")
    X = design.X
    n, k = X.shape
    y_arr = design.y if y is None else np.asarray(y, dtype=float)
    if len(y_arr) != n:
        raise DataError(f"dependent length {len(y_arr)} != {n} rows")
    y_int = y_arr.astype(np.int64)
    if not np.array_equal(y_int, y_arr):
        raise DataError("ordered probit dependent must hold integer categories")
    K = int(n_categories if n_categories is not None else y_int.max())
    if K < 2:
        raise DataError("ordered probit needs at least 2 categories")
    counts = np.bincount(y_int, minlength=K + 1)[1:]
    empty = np.nonzero(counts == 0)[0]
    if y_int.min() < 1 or y_int.max() > K or empty.size:
        missing = (empty + 1).tolist() if empty.size else sorted(set(y_int) - set(range(1, K + 1)))
        raise DataError(f"empty category: every category 1..{K} must appear (problem: {missing})")
    n_cuts = K - 1
    if n <= k + n_cuts:
        raise EstimationError(f"n={n} too small for k={k} coefficients plus {n_cuts} cuts")
    if k:
        _qr_rank_check(X, design.names)

    y_index = y_int - 1
    cuts0, ll0 = _null_cuts_loglike(y_index, K)
    theta = np.concatenate([np.zeros(k), _raw_from_cuts(cuts0)])
    ll = _op_loglike(theta, X, y_index, n_cuts)

    converged = False
    iterations = 0
    grad = np.zeros_like(theta)
    for iterations in range(1, max_iter + 1):
        grad, hess = _op_grad_hess_raw(theta, X, y_index, n_cuts)
        if np.max(np.abs(grad)) < OPROBIT_GRAD_TOL:
            converged = True
            break
        step = None
        try:
            # negative definite check via Cholesky of -H
            np.linalg.cholesky(-hess)
            step = np.linalg.solve(-hess, grad)
        except np.linalg.LinAlgError:
            norm = np.linalg.norm(grad)
            step = grad / norm  # gradient ascent, unit step then halving
        new_ll = None
        for _ in range(40):
            candidate = theta + step
            cand_ll = _op_loglike(candidate, X, y_index, n_cuts)
            if cand_ll > ll:
                new_ll = cand_ll
                theta = candidate
                break
            step = step / 2.0
        if new_ll is None:
            converged = True  # no ascent direction improves: at a maximum
            break
        if np.linalg.norm(theta) > 1e8:
            raise SeparationError(
                "likelihood appears unbounded: parameter norm diverged "
                "(perfect separation of categories)",
                iterations=iterations,
                loglike=new_ll,
                grad_norm=float(np.max(np.abs(grad))),
            )
        improvement = new_ll - ll
        ll = new_ll
        if improvement < OPROBIT_LL_TOL:
            converged = True
            break

    if not converged:
        raise ConvergenceError(
            f"ordered probit did not converge in {max_iter} iterations",
            iterations=iterations,
            loglike=ll,
            grad_norm=float(np.max(np.abs(grad))),
        )

    beta = theta[:k]
    cuts = _cuts_from_raw(theta[k:])
    # scale-free separation checks: a log-likelihood at its supremum (0) means
    # every category is predicted perfectly, and cuts far outside the latent
    # scale mean boundary categories have been driven to probability 0/1
    if ll > -1e-6 * n or np.max(np.abs(cuts)) > 40.0:
        raise SeparationError(
            "likelihood is unbounded: categories are perfectly separated "
            f"(log-likelihood {ll:.3g}, cut magnitude {np.max(np.abs(cuts)):.3g})",
            iterations=iterations,
            loglike=ll,
            grad_norm=float(np.max(np.abs(grad))),
        )
    _, hess_nat = _op_grad_hess_natural(beta, cuts, X, y_index)
    try:
        cov = np.linalg.inv(-hess_nat)
        se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    except np.linalg.LinAlgError:
        se = np.full(k + n_cuts, np.nan)

    xb = X @ beta if k else np.zeros(n)
    ext = np.concatenate(([-np.inf], cuts, [np.inf]))
    probs = special.ndtr(ext[None, 1:] - xb[:, None]) - special.ndtr(ext[None, :-1] - xb[:, None])

    return OrderedProbitResult(
        names=design.names,
        coefficients=beta,
        cut_points=cuts,
        standard_errors=se,
        loglike=ll,
        loglike_null=ll0,
        pseudo_r_squared=1.0 - ll / ll0,
        lr_statistic=2.0 * (ll - ll0),
        n=n,
        k=k,
        n_categories=K,
        iterations=iterations,
        converged=converged,
        probs=probs,
    )
