"""Monte-Carlo comparison of categorical and PoB classifiers on Dirichlet-sampled parameters.

Every sampled classifier draws from its own random stream
``RngSeed(master_seed, classifier_index)``, so serial and parallel runs give
identical records, and outputs are always ordered by classifier index.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence, TypeVar

import numpy as np

from .errors import BadConfig, BadK, BadStep, OneHotNBError, UndefinedRho
from .models import NBParams, categorical_posterior, map_class, pob_posterior
from .qfactor import lower_bound, upper_bound
from .simplex import ProbVector, RngSeed, dirichlet_draws

SKIP_THRESHOLD = 1e-300

T = TypeVar("T")


@dataclass(frozen=True)
class ExperimentConfig:
    """Sampling protocol for one (C, K, alpha) cell.

    ``alpha_theta`` is the symmetric concentration for every conditional
    table row and ``alpha_pi`` the one for the class prior.
    """

    n_classes: int = 4
    n_values: int = 3
    alpha_theta: float = 1.0
    alpha_pi: float = 1.0
    n_samples: int = 100
    master_seed: int = 0

    def __post_init__(self):
        if not (isinstance(self.n_classes, (int, np.integer)) and self.n_classes >= 2):
            raise BadConfig(f"n_classes must be an integer >= 2, got {self.n_classes!r}")
        if not (isinstance(self.n_values, (int, np.integer)) and self.n_values >= 2):
            raise BadConfig(f"n_values must be an integer >= 2, got {self.n_values!r}")
        if not (isinstance(self.n_samples, (int, np.integer)) and self.n_samples >= 1):
            raise BadConfig(f"n_samples must be an integer >= 1, got {self.n_samples!r}")
        for name in ("alpha_theta", "alpha_pi"):
            value = getattr(self, name)
            if not (value > 0 and math.isfinite(value)):
                raise BadConfig(f"{name} must be a positive number, got {value!r}")
        if not 0 <= self.master_seed < 2**64:
            raise BadConfig(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed!r}")


@dataclass(frozen=True)
class ScatterRecord:
    classifier_index: int
    j: int
    c: int
    d: int
    log_theta_ratio: float
    log_f_ratio: float


@dataclass(frozen=True)
class ComparisonRecord:
    classifier_index: int
    j: int
    categorical: ProbVector
    pob: ProbVector
    categorical_map: int
    pob_map: int
    max_categorical: float
    max_pob: float

    @property
    def disagree(self) -> bool:
        return self.categorical_map != self.pob_map


@dataclass(frozen=True)
class SummaryStats:
    n_cases: int
    pct_pob_max_higher: float
    pct_map_disagree: float


@dataclass(frozen=True)
class ScatterResult:
    records: list[ScatterRecord]
    n_skipped: int = 0


@dataclass(frozen=True)
class WinningClassRecord:
    categorical_winner: int
    pob_winner: int
    rho: float
    log_rho: float
    log_theta_ratio: float
    log_f_ratio: float
    flipped: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "flipped", self.categorical_winner != self.pob_winner)


def sample_classifier(config: ExperimentConfig, stream_index: int) -> NBParams:
    """Draw a prior from Dir(alpha_pi) and C table rows from Dir(alpha_theta)."""
    rng = RngSeed(config.master_seed, stream_index).generator()
    prior = dirichlet_draws(config.alpha_pi, config.n_classes, 1, rng)[0]
    table = dirichlet_draws(config.alpha_theta, config.n_values, config.n_classes, rng)
    return NBParams(ProbVector(prior), (table,))


def _run_indexed(
    fn: Callable[[ExperimentConfig, int], T], config: ExperimentConfig, workers: int
) -> list[T]:
    indices = range(config.n_samples)
    if workers <= 1:
        return [fn(config, i) for i in indices]
    chunk = max(1, config.n_samples // (4 * workers))
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, [config] * config.n_samples, indices, chunksize=chunk))


# --------------------------------------------------------------------------
# Scatter of PoB log-ratio against categorical log-ratio
# --------------------------------------------------------------------------


def _log_f(table: np.ndarray) -> np.ndarray:
    """``log f_j(theta_i)`` for every class row ``i`` and value ``j``."""
    with np.errstate(divide="ignore"):
        log_off = np.log1p(-table)
        # sum over k != j by exclusion, not subtraction: log_off may hold -inf
        log_q = np.column_stack([np.delete(log_off, j, axis=1).sum(axis=1) for j in range(table.shape[1])])
        return np.log(table) + log_q


def _scatter_one(config: ExperimentConfig, index: int) -> tuple[list[ScatterRecord], int]:
    table = sample_classifier(config, index).tables[0]
    with np.errstate(divide="ignore"):
        log_theta = np.log(table)
    log_f = _log_f(table)
    records = []
    skipped = 0
    n_classes, n_values = table.shape
    for j in range(n_values):
        for c in range(n_classes):
            for d in range(n_classes):
                if c == d:
                    continue
                if table[c, j] < SKIP_THRESHOLD or table[d, j] < SKIP_THRESHOLD:
                    skipped += 1
                    continue
                x = float(log_theta[c, j] - log_theta[d, j])
                y = float(log_f[c, j] - log_f[d, j])
                if not (math.isfinite(x) and math.isfinite(y)):
                    skipped += 1
                    continue
                records.append(ScatterRecord(index, j, c, d, x, y))
    return records, skipped


def run_scatter(config: ExperimentConfig, workers: int = 1) -> ScatterResult:
    """All ordered class pairs for every classifier and value.

    Each unordered pair contributes both orderings, i.e. the point ``(x, y)``
    and its mirror ``(-x, -y)``.  Pairs with a table entry below 1e-300 are
    skipped and counted once per ordering.
    """
    parts = _run_indexed(_scatter_one, config, workers)
    records = [r for recs, _ in parts for r in recs]
    return ScatterResult(records, sum(s for _, s in parts))


def restricted_slope(records: Sequence[ScatterRecord], window: float = 1.0) -> float:
    """Least-squares slope of log f-ratio on log theta-ratio for ``|x| < window``."""
    x = np.array([r.log_theta_ratio for r in records])
    y = np.array([r.log_f_ratio for r in records])
    keep = np.abs(x) < window
    if keep.sum() < 2:
        raise OneHotNBError("fewer than two scatter points inside the slope window")
    slope, _ = np.polyfit(x[keep], y[keep], 1)
    return float(slope)


def slope_two_band_fraction(records: Sequence[ScatterRecord], x_min: float = 2.0, band: float = 0.1) -> float:
    """Fraction of points with ``x > x_min`` lying within ``band`` of the line ``y = 2x``."""
    x = np.array([r.log_theta_ratio for r in records])
    y = np.array([r.log_f_ratio for r in records])
    keep = x > x_min
    if not keep.any():
        return 0.0
    return float(np.mean(np.abs(y[keep] - 2.0 * x[keep]) < band))


# --------------------------------------------------------------------------
# Posterior comparison
# --------------------------------------------------------------------------


def compare_classifier(params: NBParams, classifier_index: int = 0) -> list[ComparisonRecord]:
    """One record per value ``j`` of a single-feature classifier."""
    records = []
    for j in range(params.n_values[0]):
        cat = categorical_posterior(params, j)
        pob = pob_posterior(params, j)
        records.append(
            ComparisonRecord(
                classifier_index=classifier_index,
                j=j,
                categorical=cat,
                pob=pob,
                categorical_map=map_class(cat),
                pob_map=map_class(pob),
                max_categorical=float(cat.values.max()),
                max_pob=float(pob.values.max()),
            )
        )
    return records


def _compare_one(config: ExperimentConfig, index: int) -> list[ComparisonRecord]:
    return compare_classifier(sample_classifier(config, index), index)


def summarize(records: Sequence[ComparisonRecord]) -> SummaryStats:
    n = len(records)
    if n == 0:
        return SummaryStats(0, 0.0, 0.0)
    higher = sum(1 for r in records if r.max_pob > r.max_categorical)
    disagree = sum(1 for r in records if r.disagree)
    return SummaryStats(n, 100.0 * higher / n, 100.0 * disagree / n)


def run_posterior_comparison(
    config: ExperimentConfig, workers: int = 1
) -> tuple[list[ComparisonRecord], SummaryStats]:
    parts = _run_indexed(_compare_one, config, workers)
    records = [r for recs in parts for r in recs]
    return records, summarize(records)


def disagreement_by_confidence(
    records: Sequence[ComparisonRecord], low: float = 0.5, high: float = 0.9
) -> tuple[float, float]:
    """MAP-disagreement rates among records with categorical max ``< low`` and ``> high``.

    Returns ``nan`` for an empty bucket.
    """
    lo = [r.disagree for r in records if r.max_categorical < low]
    hi = [r.disagree for r in records if r.max_categorical > high]
    rate = lambda xs: float(np.mean(xs)) if xs else float("nan")  # noqa: E731
    return rate(lo), rate(hi)


# --------------------------------------------------------------------------
# Two-class winner analysis
# --------------------------------------------------------------------------


def winning_class_analysis(params: NBParams, j: int) -> WinningClassRecord:
    """Compare winners for ``x = j`` in a two-class problem.

    ``c`` is the categorical winner and ``d`` the other class; ``rho`` is the
    prior ratio ``pi_d / pi_c``.  Under the categorical model ``c`` wins iff
    ``log(theta_jc / theta_jd) > log rho``; under PoB the same test applies to
    the f-ratio, so a flip happens when the two ratios straddle ``log rho``.
    """
    if params.n_classes != 2:
        raise BadConfig(f"winning-class analysis needs exactly 2 classes, got {params.n_classes}")
    cat_winner = map_class(categorical_posterior(params, j))
    pob_winner = map_class(pob_posterior(params, j))
    c, d = cat_winner, 1 - cat_winner
    pi = params.prior.values
    if pi[c] == 0:
        raise UndefinedRho("prior of the winning class is zero")
    rho = float(pi[d] / pi[c])
    table = params.tables[0]
    with np.errstate(divide="ignore"):
        log_rho = math.log(rho) if rho > 0 else -math.inf
        log_theta = np.log(table[:, j])
        log_f = _log_f(table)[:, j]
    return WinningClassRecord(
        categorical_winner=cat_winner,
        pob_winner=pob_winner,
        rho=rho,
        log_rho=log_rho,
        log_theta_ratio=float(log_theta[c] - log_theta[d]),
        log_f_ratio=float(log_f[c] - log_f[d]),
    )


# --------------------------------------------------------------------------
# Figure datasets
# --------------------------------------------------------------------------


def _divisions(step: float) -> int:
    if not (isinstance(step, (int, float)) and 0 < step <= 0.5):
        raise BadStep(f"step must lie in (0, 0.5], got {step!r}")
    n = round(1.0 / step)
    if abs(n * step - 1.0) > 1e-9:
        raise BadStep(f"step {step!r} does not divide 1 into a whole number of intervals")
    return n


def surface_grid(step: float) -> list[tuple[float, float, float, float]]:
    """Barycentric grid of ``(theta1, theta2, theta3, Q)`` with ``Q = prod (1 - theta_i)``.

    This is ``Q^{-4}`` on the face ``theta_4 = 0``.  The exact centre point is
    appended when the lattice does not contain it.
    """
    n = _divisions(step)
    rows = []
    for a in range(n + 1):
        for b in range(n + 1 - a):
            t = (a / n, b / n, (n - a - b) / n)
            rows.append((*t, (1 - t[0]) * (1 - t[1]) * (1 - t[2])))
    if n % 3:
        third = 1.0 / 3.0
        rows.append((third, third, third, 8.0 / 27.0))
    return rows


def bound_curves(k: int, step: float) -> list[tuple[float, float, float]]:
    """``(theta_j, lower, upper)`` for ``theta_j`` from 0 to 1 inclusive."""
    if not (isinstance(k, (int, np.integer)) and k >= 2):
        raise BadK(f"K must be an integer >= 2, got {k!r}")
    n = _divisions(step)
    t = np.arange(n + 1) / n
    lo = lower_bound(t)
    up = upper_bound(t, k)
    return [(float(a), float(b), float(c)) for a, b, c in zip(t, lo, up)]
