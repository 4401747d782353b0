"""Cross-checks against statsmodels, when it happens to be installed.

These are belt-and-braces checks on top of the hand-rolled oracles; the suite
stays green without statsmodels.
"""

from __future__ import annotations

import numpy as np
import pytest

sm = pytest.importorskip("statsmodels.api")

from happymetrics.data_model import DesignMatrix
from happymetrics.diagnostics import breusch_pagan
from happymetrics.estimators import ols_fit, ordered_probit_fit


@pytest.fixture(scope="module")
def hetero_fit():
    rng = np.random.default_rng(1000)
    n = 150
    X = np.column_stack([np.ones(n), rng.normal(size=(n, 3))])
    y = X @ np.array([1.0, 0.5, -0.8, 0.2]) + rng.normal(size=n) * (1 + 0.4 * np.abs(X[:, 1]))
    design = DesignMatrix(
        names=("constant", "x1", "x2", "x3"),
        X=X,
        y=y,
        provenance=("constant", "continuous:x1", "continuous:x2", "continuous:x3"),
    )
    return design, ols_fit(design)


def test_ols_matches_statsmodels(hetero_fit):
    design, mine = hetero_fit
    theirs = sm.OLS(design.y, design.X).fit()
    np.testing.assert_allclose(mine.coefficients, theirs.params, atol=1e-12)
    np.testing.assert_allclose(mine.standard_errors, theirs.bse, atol=1e-12)
    np.testing.assert_allclose(mine.p_values, theirs.pvalues, atol=1e-12)
    assert mine.r_squared == pytest.approx(theirs.rsquared, abs=1e-12)
    assert mine.adj_r_squared == pytest.approx(theirs.rsquared_adj, abs=1e-12)


def test_breusch_pagan_f_form_matches_statsmodels(hetero_fit):
    from statsmodels.stats.diagnostic import het_breuschpagan

    design, mine = hetero_fit
    _, _, f_stat, f_p = het_breuschpagan(mine.residuals, design.X)
    report = breusch_pagan(mine, design)
    assert report.statistic == pytest.approx(f_stat, abs=1e-10)
    assert report.p_value == pytest.approx(f_p, abs=1e-10)


def test_ordered_probit_matches_statsmodels():
    from statsmodels.miscmodels.ordinal_model import OrderedModel

    rng = np.random.default_rng(2000)
    n = 3000
    X = rng.normal(size=(n, 2))
    latent = X @ np.array([0.6, -0.4]) + rng.normal(size=n)
    y = 1 + (latent > -0.5).astype(int) + (latent > 0.8).astype(int)
    design = DesignMatrix(
        names=("x1", "x2"), X=X, y=y.astype(float),
        provenance=("continuous:x1", "continuous:x2"),
    )
    mine = ordered_probit_fit(design)
    theirs = OrderedModel(y, X, distr="probit").fit(method="bfgs", disp=False)
    their_beta = theirs.params[:2]
    their_cuts = np.array([theirs.params[2], theirs.params[2] + np.exp(theirs.params[3])])
    np.testing.assert_allclose(mine.coefficients, their_beta, atol=1e-4)
    np.testing.assert_allclose(mine.cut_points, their_cuts, atol=1e-4)
    np.testing.assert_allclose(mine.standard_errors[:2], theirs.bse[:2], atol=1e-4)
    assert mine.loglike >= theirs.llf - 1e-6  # the Newton solver converges at least as tightly
