"""Categorical Naive Bayes and the product-of-Bernoullis model one-hot encoding induces.

Both classifiers share one parameter set (:class:`NBParams`): maximum-likelihood
fitting gives the one-hot bit marginals exactly the categorical table values,
so the only difference between the two posteriors is the extra factor
``Q^{-j}_i = prod_{k != j} (1 - theta_ki)`` the PoB model multiplies in for the
bits that are off.

Indices for classes, features and values are 0-based throughout.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    EmptyData,
    IndexOutOfRange,
    LabelOutOfRange,
    LengthMismatch,
    NotOneHot,
    OneHotNBError,
    TooShort,
    ZeroEvidence,
)
from .simplex import ProbVector, make_prob_vector

Observation = tuple[int, ...]
BitPattern = tuple[int, ...]


class Model(str, enum.Enum):
    CATEGORICAL = "categorical"
    POB = "pob"


class Layout(str, enum.Enum):
    ORDINAL = "ordinal"
    ONE_HOT = "one-hot"


@dataclass(frozen=True, eq=False)
class NBParams:
    """Class prior plus one ``(C, K_f)`` conditional table per feature.

    ``tables[f][i, j]`` is ``p(x_f = j | y = i)``.  Rows are validated as
    probability vectors and renormalized; the arrays are made read-only.
    """

    prior: ProbVector
    tables: tuple[np.ndarray, ...]

    def __post_init__(self):
        prior = self.prior if isinstance(self.prior, ProbVector) else make_prob_vector(self.prior)
        n_classes = len(prior)
        if not self.tables:
            raise OneHotNBError("NBParams needs at least one feature table")
        tables = []
        for f, table in enumerate(self.tables):
            arr = np.asarray(table, dtype=np.float64)
            if arr.ndim != 2 or arr.shape[0] != n_classes:
                raise LengthMismatch(
                    f"table for feature {f} must have shape (C={n_classes}, K), got {arr.shape}"
                )
            if arr.shape[1] < 2:
                raise TooShort(f"feature {f} needs at least 2 values, got {arr.shape[1]}")
            rows = np.vstack([make_prob_vector(row).values for row in arr])
            rows.setflags(write=False)
            tables.append(rows)
        object.__setattr__(self, "prior", prior)
        object.__setattr__(self, "tables", tuple(tables))

    @property
    def n_classes(self) -> int:
        return len(self.prior)

    @property
    def n_features(self) -> int:
        return len(self.tables)

    @property
    def n_values(self) -> tuple[int, ...]:
        return tuple(t.shape[1] for t in self.tables)

    def __eq__(self, other) -> bool:
        if not isinstance(other, NBParams):
            return NotImplemented
        return (
            self.prior == other.prior
            and len(self.tables) == len(other.tables)
            and all(np.array_equal(a, b) for a, b in zip(self.tables, other.tables))
        )

    __hash__ = None


def _check_index(j: int, k: int, what: str = "value index") -> int:
    if not (isinstance(j, (int, np.integer)) and 0 <= j < k):
        raise IndexOutOfRange(f"{what} {j!r} out of range for K={k}")
    return int(j)


def validate_observation(params: NBParams, obs: Sequence[int]) -> Observation:
    obs = tuple(obs)
    if len(obs) != params.n_features:
        raise LengthMismatch(f"observation has {len(obs)} values, model has {params.n_features} features")
    for f, (j, k) in enumerate(zip(obs, params.n_values)):
        _check_index(j, k, f"value for feature {f}")
    return tuple(int(j) for j in obs)


def q_factor(theta: Sequence[float], j: int) -> float:
    """Probability that every bit except bit ``j`` is off: ``prod_{k != j} (1 - theta_k)``."""
    theta = np.asarray(theta, dtype=np.float64)
    j = _check_index(j, theta.shape[0])
    return float(np.prod(1.0 - np.delete(theta, j)))


def pob_likelihood(theta: Sequence[float], pattern: Sequence[int]) -> float:
    """Probability of an arbitrary bit pattern when bits are independent Bernoullis.

    Non-one-hot patterns are admitted; for ``pattern = e_j`` the result is
    ``theta_j * q_factor(theta, j)``.
    """
    theta = np.asarray(theta, dtype=np.float64)
    bits = np.asarray(pattern)
    if bits.shape != theta.shape:
        raise LengthMismatch(f"pattern length {bits.shape[0]} != K={theta.shape[0]}")
    if not np.all((bits == 0) | (bits == 1)):
        raise OneHotNBError(f"pattern entries must be 0 or 1: {bits.tolist()}")
    return float(np.prod(np.where(bits == 1, theta, 1.0 - theta)))


def _feature_table(params: NBParams, feature: int) -> np.ndarray:
    if not 0 <= feature < params.n_features:
        raise IndexOutOfRange(f"feature {feature} out of range for {params.n_features} features")
    return params.tables[feature]


def _class_q_factors(table: np.ndarray, j: int) -> np.ndarray:
    return np.prod(1.0 - np.delete(table, j, axis=1), axis=1)


def _normalize_weights(weights: np.ndarray, params: NBParams, feature: int, j: int, model: Model) -> ProbVector:
    total = weights.sum()
    if total > 0:
        return ProbVector(weights / total)
    # All-zero weights are either genuine (ZeroEvidence) or an underflow; the log path decides.
    single = NBParams(params.prior, (params.tables[feature],))
    return multi_feature_posterior(single, (j,), model)


def categorical_posterior(params: NBParams, j: int, feature: int = 0) -> ProbVector:
    """Posterior over classes for ``x = j`` under the categorical model."""
    table = _feature_table(params, feature)
    j = _check_index(j, table.shape[1])
    weights = params.prior.values * table[:, j]
    return _normalize_weights(weights, params, feature, j, Model.CATEGORICAL)


def pob_posterior(params: NBParams, j: int, feature: int = 0) -> ProbVector:
    """Posterior over classes for the one-hot pattern ``e_j`` under the PoB model.

    The per-class Q factors are scaled by their maximum before use; this keeps
    them away from underflow and makes a class-independent Q cancel exactly.
    """
    table = _feature_table(params, feature)
    j = _check_index(j, table.shape[1])
    q = _class_q_factors(table, j)
    q_max = q.max()
    if q_max > 0:
        q = q / q_max
    weights = params.prior.values * q * table[:, j]
    return _normalize_weights(weights, params, feature, j, Model.POB)


def class_log_scores(params: NBParams, obs: Sequence[int], model: Model | str) -> np.ndarray:
    """Unnormalized per-class log joint ``log p(y = i) + sum_f log p(x_f | y = i)``."""
    model = Model(model)
    obs = validate_observation(params, obs)
    with np.errstate(divide="ignore"):
        scores = np.log(params.prior.values)
        for table, j in zip(params.tables, obs):
            scores = scores + np.log(table[:, j])
            if model is Model.POB:
                scores = scores + np.log1p(-np.delete(table, j, axis=1)).sum(axis=1)
    return scores


def multi_feature_posterior(params: NBParams, obs: Sequence[int], model: Model | str) -> ProbVector:
    """Posterior for a full observation, accumulated in log space with a max shift."""
    scores = class_log_scores(params, obs, model)
    top = scores.max()
    if top == -np.inf:
        raise ZeroEvidence(f"every class assigns zero probability to observation {tuple(obs)}")
    weights = np.exp(scores - top)
    return ProbVector(weights / weights.sum())


def map_class(posterior: Sequence[float]) -> int:
    """Index of the largest posterior entry, ties going to the lowest index."""
    return int(np.argmax(np.asarray(posterior, dtype=np.float64)))


# --------------------------------------------------------------------------
# Maximum-likelihood fitting
# --------------------------------------------------------------------------


def _as_arrays(data: Iterable[tuple[Sequence[int], int]]) -> tuple[np.ndarray, np.ndarray]:
    rows = list(data)
    if not rows:
        raise EmptyData("cannot fit a model to an empty dataset")
    obs = np.asarray([tuple(o) for o, _ in rows], dtype=np.int64)
    labels = np.asarray([y for _, y in rows], dtype=np.int64)
    if obs.ndim != 2:
        raise LengthMismatch("observations must all have the same number of features")
    return obs, labels


def _check_labels(labels: np.ndarray, n_classes: int) -> None:
    bad = (labels < 0) | (labels >= n_classes)
    if bad.any():
        raise LabelOutOfRange(f"label {int(labels[bad][0])} out of range for C={n_classes}")


def _prior_from_counts(class_counts: np.ndarray, smoothing: float) -> np.ndarray:
    n_classes = class_counts.shape[0]
    return (class_counts + smoothing) / (class_counts.sum() + n_classes * smoothing)


def _estimate(value_count, class_count: float, k: int, smoothing: float):
    """``(count + s) / (class_count + K s)``; shared by both layouts so they agree bit for bit."""
    denom = class_count + k * smoothing
    if denom == 0:
        # Unobserved class with no smoothing: its prior is 0, a uniform row stands in.
        return np.full(np.shape(value_count), 1.0 / k)
    return (np.asarray(value_count, dtype=np.float64) + smoothing) / denom


def _resolve_n_values(n_values: int | Sequence[int], n_features: int) -> tuple[int, ...]:
    if isinstance(n_values, (int, np.integer)):
        return (int(n_values),) * n_features
    n_values = tuple(int(k) for k in n_values)
    if len(n_values) != n_features:
        raise LengthMismatch(f"got {len(n_values)} value counts for {n_features} features")
    return n_values


def fit_mle(
    data: Iterable[tuple[Sequence[int], int]],
    n_classes: int,
    n_values: int | Sequence[int],
    layout: Layout | str = Layout.ORDINAL,
    smoothing: float = 0.0,
) -> NBParams:
    """Fit class prior and conditional tables by (smoothed) maximum likelihood.

    Parameters
    ----------
    data : iterable of (observation, label)
        Observations are tuples of 0-based value indices, one per feature.
    n_classes : int
    n_values : int or sequence of int
        Number of values per feature (a single int applies to all).
    layout : {"ordinal", "one-hot"}
        ``"ordinal"`` counts values directly.  ``"one-hot"`` encodes every
        observation to bits and estimates each bit's Bernoulli parameter on
        its own; the result is the same table because the count of a bit being
        on equals the count of its value.
    smoothing : float
        Additive pseudo-count; 0 gives the plain MLE.  In the one-hot layout
        the per-bit denominator uses ``K * smoothing`` so both layouts remain
        the same estimator.

    Returns
    -------
    NBParams
    """
    if smoothing < 0 or not np.isfinite(smoothing):
        raise OneHotNBError(f"smoothing must be a nonnegative number, got {smoothing!r}")
    obs, labels = _as_arrays(data)
    _check_labels(labels, n_classes)
    ks = _resolve_n_values(n_values, obs.shape[1])
    for f, k in enumerate(ks):
        bad = (obs[:, f] < 0) | (obs[:, f] >= k)
        if bad.any():
            raise IndexOutOfRange(f"value {int(obs[bad, f][0])} for feature {f} out of range for K={k}")
    if Layout(layout) is Layout.ONE_HOT:
        from .encoding import encode_matrix

        bits = encode_matrix(obs, ks)
        return fit_mle_encoded(bits, labels, ks, n_classes, smoothing)

    class_counts = np.bincount(labels, minlength=n_classes).astype(np.float64)
    tables = []
    for f, k in enumerate(ks):
        counts = np.zeros((n_classes, k))
        np.add.at(counts, (labels, obs[:, f]), 1.0)
        tables.append(np.vstack([_estimate(counts[i], class_counts[i], k, smoothing) for i in range(n_classes)]))
    return NBParams(ProbVector(_prior_from_counts(class_counts, smoothing)), tuple(tables))


def fit_mle_encoded(
    bits: np.ndarray,
    labels: Sequence[int],
    group_sizes: Sequence[int],
    n_classes: int,
    smoothing: float = 0.0,
) -> NBParams:
    """Per-bit Bernoulli MLE on a one-hot bit matrix.

    ``group_sizes`` lists how many consecutive columns belong to each feature.
    Every row must be one-hot within every group.
    """
    bits = np.asarray(bits)
    labels = np.asarray(labels, dtype=np.int64)
    if bits.shape[0] == 0:
        raise EmptyData("cannot fit a model to an empty dataset")
    if bits.shape[0] != labels.shape[0]:
        raise LengthMismatch(f"{bits.shape[0]} bit rows but {labels.shape[0]} labels")
    if bits.shape[1] != sum(group_sizes):
        raise LengthMismatch(f"{bits.shape[1]} bit columns but groups cover {sum(group_sizes)}")
    _check_labels(labels, n_classes)
    class_counts = np.bincount(labels, minlength=n_classes).astype(np.float64)
    tables = []
    start = 0
    for f, k in enumerate(group_sizes):
        block = bits[:, start : start + k]
        start += k
        if not np.all(block.sum(axis=1) == 1):
            raise NotOneHot(f"feature {f} has rows that are not one-hot")
        rows = np.empty((n_classes, k))
        for i in range(n_classes):
            in_class = block[labels == i]
            for b in range(k):
                # Bernoulli MLE for this bit alone: how often it is on within class i.
                on = float(np.count_nonzero(in_class[:, b]))
                rows[i, b] = _estimate(on, class_counts[i], k, smoothing)
        tables.append(rows)
    return NBParams(ProbVector(_prior_from_counts(class_counts, smoothing)), tuple(tables))


def all_patterns(k: int) -> Iterable[BitPattern]:
    """Every one of the ``2**k`` bit patterns of length ``k``."""
    return itertools.product((0, 1), repeat=k)
