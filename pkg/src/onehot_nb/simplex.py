"""Probability vectors on the simplex and seeded symmetric-Dirichlet sampling."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import BadAlpha, BadSum, NegativeEntry, TooShort

SUM_TOLERANCE = 1e-9


class ProbVector:
    """Immutable nonnegative vector summing to one.

    Construct with :func:`make_prob_vector`; an input that drifts from 1 by
    more than rounding is divided by its sum, so downstream arithmetic sees a
    self-consistent vector.  Indexing, ``len`` and ``np.asarray`` behave like a 1-D array.
    """

    __slots__ = ("_values",)

    def __init__(self, values: np.ndarray):
        values = np.array(values, dtype=np.float64)
        values.setflags(write=False)
        self._values = values

    @property
    def values(self) -> np.ndarray:
        return self._values

    def __len__(self) -> int:
        return self._values.shape[0]

    def __getitem__(self, idx):
        return self._values[idx]

    def __iter__(self):
        return iter(self._values.tolist())

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._values
        return self._values.astype(dtype)

    def __eq__(self, other) -> bool:
        if isinstance(other, ProbVector):
            return np.array_equal(self._values, other._values)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._values.tobytes())

    def __repr__(self) -> str:
        inner = ", ".join(repr(float(v)) for v in self._values)
        return f"ProbVector({inner})"

    def tolist(self) -> list[float]:
        return self._values.tolist()


def make_prob_vector(raw: Sequence[float]) -> ProbVector:
    """Validate ``raw`` and return it renormalized as a :class:`ProbVector`.

    Raises
    ------
    TooShort
        Fewer than two entries.
    NegativeEntry
        Any entry below zero (NaN counts as invalid).
    BadSum
        ``|sum - 1| > 1e-9``.
    """
    arr = np.asarray(raw, dtype=np.float64).reshape(-1)
    if arr.shape[0] < 2:
        raise TooShort(f"probability vector needs at least 2 entries, got {arr.shape[0]}")
    if not np.all(arr >= 0):
        raise NegativeEntry(f"probability vector has a negative or NaN entry: {arr.tolist()}")
    total = float(arr.sum())
    if not abs(total - 1.0) <= SUM_TOLERANCE:
        raise BadSum(f"probability vector sums to {total!r}, not 1")
    # Leave rounding-level drift alone so that normalizing is idempotent and
    # values written with repr read back bit for bit.
    if abs(total - 1.0) <= arr.shape[0] * np.finfo(np.float64).eps:
        return ProbVector(arr)
    return ProbVector(arr / total)


def _normalize_rows(arr: np.ndarray) -> np.ndarray:
    return arr / arr.sum(axis=-1, keepdims=True)


@dataclass(frozen=True)
class RngSeed:
    """Address of one reproducible random stream.

    The same ``(master_seed, stream_index)`` always yields the same stream,
    and different stream indices are statistically independent, so work keyed
    by stream index can be farmed out in any order.
    """

    master_seed: int = 0
    stream_index: int = 0

    def __post_init__(self):
        if not 0 <= self.master_seed < 2**64:
            raise ValueError(f"master_seed must be a 64-bit unsigned integer, got {self.master_seed}")
        if self.stream_index < 0:
            raise ValueError(f"stream_index must be nonnegative, got {self.stream_index}")

    def generator(self) -> np.random.Generator:
        return np.random.default_rng(np.random.SeedSequence([self.master_seed, self.stream_index]))


SeedLike = Union[RngSeed, np.random.Generator]


def as_generator(seed: SeedLike) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    return seed.generator()


def dirichlet_draws(alpha: float, dim: int, size: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``size`` symmetric Dirichlet(alpha) vectors as rows of an array.

    Uses independent Gamma(alpha, 1) draws normalized by their row sum.  Rows
    whose gammas all underflow to zero (only plausible for tiny alpha) are
    redrawn from the same generator.
    """
    if not (alpha > 0 and np.isfinite(alpha)):
        raise BadAlpha(f"Dirichlet concentration must be positive, got {alpha!r}")
    if dim < 2:
        raise TooShort(f"Dirichlet dimension must be at least 2, got {dim}")
    g = rng.standard_gamma(alpha, size=(size, dim))
    sums = g.sum(axis=1)
    bad = np.flatnonzero(sums == 0)
    while bad.size:
        g[bad] = rng.standard_gamma(alpha, size=(bad.size, dim))
        sums[bad] = g[bad].sum(axis=1)
        bad = bad[sums[bad] == 0]
    return g / sums[:, None]


def sample_dirichlet(alpha: float, dim: int, seed: SeedLike) -> ProbVector:
    """One symmetric Dirichlet(alpha) draw of length ``dim``.

    ``seed`` is either an :class:`RngSeed` (fresh stream) or a live generator
    to continue drawing from an existing stream.
    """
    rng = as_generator(seed)
    return ProbVector(dirichlet_draws(alpha, dim, 1, rng)[0])
