"""Synthetic survey and indicator data with known ground truth.

The real survey microdata is not shipped, so estimator-recovery tests need a
generator whose true coefficients are known.  Generation uses numpy's
default_rng (PCG64) with an explicit seed and a fixed sampling order, making
every dataset reproducible from (dgp, n, seed) alone:

  per year, in year order:
    1. age        ~ integer uniform over age_range
    2. educ       ~ categorical over educ probabilities (codes 0..20)
    3. childs     ~ categorical over childs probabilities (codes 0..8)
    4. sex, race, marital, health, work_status, income ~ categorical draws,
       in that order, each over its code probabilities
    5. latent     = year intercept + sum_j coef_j * column_j + N(0, noise_sd)
    6. happy      = 1 + [latent > threshold_1] + [latent > threshold_2]

The generator touches only these documented equations, never the estimators,
so recovery tests are genuinely two-sided.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Mapping, Sequence

import numpy as np

from .data_model import MICRO_VARIABLES, MacroSeries, MicroDataset
from .errors import DataError, SpecError
from .pipeline import YearlyHappinessSeries, YearlyValue

MACRO_MIN_YEARS = 12


# --------------------------------------------------------------------------
# Micro DGP
# --------------------------------------------------------------------------

_DEFAULT_CATEGORY_PROBS: dict[str, dict[int, float]] = {
    "sex": {0: 0.55, 1: 0.45},
    "race": {1: 0.81, 2: 0.13, 3: 0.06},
    "marital": {0: 0.22, 1: 0.21, 2: 0.57},
    "health": {1: 0.32, 2: 0.44, 3: 0.17, 4: 0.07},
    "work_status": {0: 0.31, 1: 0.06, 2: 0.63},
    "income": {1: 0.08, 2: 0.10, 3: 0.13, 4: 0.14, 5: 0.12, 6: 0.43},
    "childs": {0: 0.28, 1: 0.17, 2: 0.22, 3: 0.14, 4: 0.09, 5: 0.05, 6: 0.03, 7: 0.01, 8: 0.01},
    "educ": {c: p for c, p in zip(range(0, 21), (
        0.002, 0.002, 0.003, 0.004, 0.005, 0.008, 0.012, 0.018, 0.035,
        0.04, 0.06, 0.08, 0.28, 0.075, 0.09, 0.05, 0.11, 0.04, 0.035,
        0.02, 0.031))},
}

# mild positive effects of health/marriage/income, penalties for unemployment:
# echoes the usual survey findings without copying any particular estimate
_DEFAULT_COEFFICIENTS: dict[str, float] = {
    "age": 0.004,
    "childs": -0.005,
    "educ": 0.003,
    "d_male": -0.04,
    "d_excellent": 0.38,
    "d_good": 0.19,
    "d_poor": -0.17,
    "d_married": 0.19,
    "d_dws": -0.09,
    "d_work": -0.05,
    "d_unemp": -0.17,
    "d_income2": 0.002,
    "d_income3": 0.03,
    "d_income4": 0.03,
    "d_income5": 0.05,
    "d_income6": 0.10,
    "d_white": 0.02,
    "d_black": -0.08,
}

# calibrated so the default DGP discretizes near (0.13, 0.55, 0.32) category
# shares, i.e. a mean around 2.19
_DEFAULT_THRESHOLDS = (1.51, 2.57)


@dataclass(frozen=True)
class MicroDGP:
    """Ground truth for individual-level data generation."""

    year_intercepts: Mapping[int, float]
    coefficients: Mapping[str, float] = field(default_factory=lambda: dict(_DEFAULT_COEFFICIENTS))
    noise_sd: float = 0.6
    thresholds: tuple[float, float] = _DEFAULT_THRESHOLDS
    category_probs: Mapping[str, Mapping[int, float]] = field(
        default_factory=lambda: {k: dict(v) for k, v in _DEFAULT_CATEGORY_PROBS.items()}
    )
    age_range: tuple[int, int] = (18, 89)

    def __post_init__(self):
        if not self.year_intercepts:
            raise SpecError("micro DGP needs at least one year intercept")
        c1, c2 = self.thresholds
        if not c1 < c2:
            raise SpecError(f"thresholds must be strictly increasing, got {self.thresholds}")
        if self.noise_sd < 0:
            raise SpecError("noise_sd must be nonnegative")
        lo, hi = self.age_range
        if not (18 <= lo <= hi <= 89):
            raise SpecError(f"age_range must lie within 18..89, got {self.age_range}")
        for var, probs in self.category_probs.items():
            domain = MICRO_VARIABLES[var]
            for code in probs:
                if not domain.contains(code):
                    raise SpecError(f"probability given for unknown {var} code {code}")
            total = sum(probs.values())
            if abs(total - 1.0) > 1e-9:
                raise SpecError(f"{var} probabilities sum to {total}, not 1")


@dataclass(frozen=True)
class SyntheticMicro:
    """Generated dataset plus its continuous latent outcome.

    `dataset.columns['happy']` holds the discretized categories (the ordered
    probit target); `latent` (also mirrored in `dataset.extra['latent']`) is
    the continuous outcome for least-squares recovery.
    """

    dataset: MicroDataset
    latent: np.ndarray
    dgp: MicroDGP


def _draw_categorical(rng: np.random.Generator, probs: Mapping[int, float], n: int) -> np.ndarray:
    codes = np.array(sorted(probs), dtype=np.int64)
    p = np.array([probs[int(c)] for c in codes])
    return rng.choice(codes, size=n, p=p)


def generate_micro(dgp: MicroDGP, n_per_year: int, seed: int) -> SyntheticMicro:
    """Deterministic synthetic survey data for a fixed (dgp, n_per_year, seed)."""
    if n_per_year < 1:
        raise SpecError("n_per_year must be >= 1")
    rng = np.random.default_rng(seed)
    columns: dict[str, list[np.ndarray]] = {name: [] for name in MICRO_VARIABLES}
    latents: list[np.ndarray] = []
    c1, c2 = dgp.thresholds

    for year in sorted(dgp.year_intercepts):
        n = n_per_year
        draws: dict[str, np.ndarray] = {
            "year": np.full(n, year, dtype=np.int64),
            "age": rng.integers(dgp.age_range[0], dgp.age_range[1] + 1, size=n),
            "educ": _draw_categorical(rng, dgp.category_probs["educ"], n),
            "childs": _draw_categorical(rng, dgp.category_probs["childs"], n),
        }
        for var in ("sex", "race", "marital", "health", "work_status", "income"):
            draws[var] = _draw_categorical(rng, dgp.category_probs[var], n)

        xb = np.zeros(n)
        for col, coef in dgp.coefficients.items():
            xb += coef * _dummy_or_raw(draws, col)
        latent = dgp.year_intercepts[year] + xb
        if dgp.noise_sd > 0:
            latent = latent + rng.normal(0.0, dgp.noise_sd, size=n)
        happy = 1 + (latent > c1).astype(np.int64) + (latent > c2).astype(np.int64)
        draws["happy"] = happy

        for name in MICRO_VARIABLES:
            columns[name].append(draws[name])
        latents.append(latent)

    latent_all = np.concatenate(latents)
    dataset = MicroDataset(
        columns={name: np.concatenate(parts) for name, parts in columns.items()},
        extra={"latent": latent_all.copy()},
    )
    return SyntheticMicro(dataset=dataset, latent=latent_all, dgp=dgp)


def _dummy_or_raw(draws: Mapping[str, np.ndarray], column: str) -> np.ndarray:
    """Resolve a coefficient key to its numeric column (raw variable or indicator)."""
    if column in draws:
        return draws[column].astype(float)
    for var, domain in MICRO_VARIABLES.items():
        for code, name in domain.dummy_names.items():
            if name == column:
                return (draws[var] == code).astype(float)
    raise SpecError(f"coefficient refers to unknown column '{column}'")


# --------------------------------------------------------------------------
# Macro DGP
# --------------------------------------------------------------------------


@dataclass(frozen=True)
class MacroDGP:
    """Ground truth for the yearly-intercept equation and its indicator paths."""

    years: tuple[int, ...]
    intercept: float = 2.6
    coefficients: Mapping[str, float] = field(
        default_factory=lambda: {
            "unemployment": -0.07,
            "inflation": -0.045,
            "gdpd": -0.00006,
            "t": -0.014,
            "party": -0.2,
            "disaster": -0.05,
            "tech": 0.18,
        }
    )
    noise_sd: float = 0.05
    noise_rho: float = 0.0  # AR(1) coefficient of the disturbance
    paths: Mapping[str, Sequence[float]] | None = None  # optional explicit indicator paths

    def __post_init__(self):
        if len(self.years) < MACRO_MIN_YEARS:
            raise SpecError(f"macro DGP needs >= {MACRO_MIN_YEARS} years, got {len(self.years)}")
        if any(b <= a for a, b in zip(self.years, self.years[1:])):
            raise SpecError("macro DGP years must be strictly increasing")
        if self.noise_sd < 0:
            raise SpecError("noise_sd must be nonnegative")
        if abs(self.noise_rho) >= 1:
            raise SpecError("noise_rho must lie in (-1, 1)")


def _mean_reverting(
    rng: np.random.Generator, n: int, level: float, rho: float, sd: float
) -> np.ndarray:
    x = np.empty(n)
    x[0] = level + rng.normal(0.0, sd)
    for i in range(1, n):
        x[i] = level + rho * (x[i - 1] - level) + rng.normal(0.0, sd)
    return x


def generate_macro(dgp: MacroDGP, seed: int) -> tuple[MacroSeries, YearlyHappinessSeries]:
    """Indicator paths plus the yearly-intercept series implied by the DGP equation.

    The intercept series follows the stage-two equation exactly: for usable
    years (all but the first), beta0 = intercept + coefficients on
    unemployment, inflation, the one-year GDP difference, trend 1,2,3,...,
    and the event dummies, plus (optionally AR(1)) noise.  The first year has
    no GDP difference; its beta0 uses zero in that slot.
    """
    rng = np.random.default_rng(seed)
    n = len(dgp.years)
    if dgp.paths is not None:
        paths = {k: np.asarray(v, dtype=float) for k, v in dgp.paths.items()}
        for k, v in paths.items():
            if len(v) != n:
                raise SpecError(f"path '{k}' length {len(v)} != {n} years")
    else:
        # mean-reverting paths: plausible levels without ever flatlining
        paths = {
            "unemployment": _mean_reverting(rng, n, level=6.0, rho=0.7, sd=0.7),
            "inflation": _mean_reverting(rng, n, level=4.5, rho=0.7, sd=0.9),
            "gdp_per_capita": 8000.0 * np.cumprod(1.045 + rng.normal(0.0, 0.02, n)),
            "party": (rng.random(n) < 0.3).astype(float),
            "disaster": (rng.random(n) < 0.25).astype(float),
            "tech": (rng.random(n) < 0.15).astype(float),
        }

    macro = MacroSeries(
        years=np.array(dgp.years, dtype=np.int64),
        unemployment=paths["unemployment"],
        inflation=paths["inflation"],
        gdp_per_capita=paths["gdp_per_capita"],
        party=paths["party"].astype(np.int64),
        disaster=paths["disaster"].astype(np.int64),
        tech=paths["tech"].astype(np.int64),
    )

    innovations = rng.normal(0.0, dgp.noise_sd, n) if dgp.noise_sd > 0 else np.zeros(n)
    noise = np.zeros(n)
    for i in range(n):
        noise[i] = (dgp.noise_rho * noise[i - 1] if i else 0.0) + innovations[i]

    coef = dict(dgp.coefficients)
    gdpd = np.concatenate(([0.0], np.diff(macro.gdp_per_capita)))
    trend = np.concatenate(([0.0], np.arange(1, n, dtype=float)))
    beta0 = (
        dgp.intercept
        + coef.get("unemployment", 0.0) * macro.unemployment
        + coef.get("inflation", 0.0) * macro.inflation
        + coef.get("gdpd", 0.0) * gdpd
        + coef.get("t", 0.0) * trend
        + coef.get("party", 0.0) * macro.party
        + coef.get("disaster", 0.0) * macro.disaster
        + coef.get("tech", 0.0) * macro.tech
        + noise
    )
    entries = tuple(
        YearlyValue(year=int(y), beta0=float(b), n_year=0) for y, b in zip(dgp.years, beta0)
    )
    return macro, YearlyHappinessSeries(entries=entries)


# --------------------------------------------------------------------------
# Defaults and JSON loading (CLI surface)
# --------------------------------------------------------------------------

DEFAULT_YEARS = tuple(range(1980, 1996))  # 16 years, shared by both defaults


def default_micro_dgp(years: Sequence[int] = DEFAULT_YEARS) -> MicroDGP:
    base = 1.9
    intercepts = {int(y): float(base + 0.25 * np.sin(i / 2.0)) for i, y in enumerate(years)}
    return MicroDGP(year_intercepts=intercepts)


def default_macro_dgp(years: Sequence[int] = DEFAULT_YEARS) -> MacroDGP:
    return MacroDGP(years=tuple(int(y) for y in years))


def load_micro_dgp(path) -> MicroDGP:
    payload = _load_json(path)
    kwargs: dict = {}
    if "year_intercepts" in payload:
        kwargs["year_intercepts"] = {int(k): float(v) for k, v in payload["year_intercepts"].items()}
    else:
        raise DataError("micro DGP JSON must declare 'year_intercepts'")
    if "coefficients" in payload:
        kwargs["coefficients"] = {str(k): float(v) for k, v in payload["coefficients"].items()}
    if "noise_sd" in payload:
        kwargs["noise_sd"] = float(payload["noise_sd"])
    if "thresholds" in payload:
        c1, c2 = payload["thresholds"]
        kwargs["thresholds"] = (float(c1), float(c2))
    if "category_probs" in payload:
        kwargs["category_probs"] = {
            var: {int(code): float(p) for code, p in probs.items()}
            for var, probs in payload["category_probs"].items()
        }
    if "age_range" in payload:
        lo, hi = payload["age_range"]
        kwargs["age_range"] = (int(lo), int(hi))
    return MicroDGP(**kwargs)


def load_macro_dgp(path) -> MacroDGP:
    payload = _load_json(path)
    if "years" not in payload:
        raise DataError("macro DGP JSON must declare 'years'")
    kwargs: dict = {"years": tuple(int(y) for y in payload["years"])}
    for key in ("intercept", "noise_sd", "noise_rho"):
        if key in payload:
            kwargs[key] = float(payload[key])
    if "coefficients" in payload:
        kwargs["coefficients"] = {str(k): float(v) for k, v in payload["coefficients"].items()}
    if "paths" in payload:
        kwargs["paths"] = {str(k): [float(x) for x in v] for k, v in payload["paths"].items()}
    return MacroDGP(**kwargs)


def _load_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise DataError(f"file not found: {path}") from None
    except json.JSONDecodeError as exc:
        raise DataError(f"invalid DGP JSON in {path}: {exc}") from None
