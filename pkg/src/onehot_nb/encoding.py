"""Synthetic datasets, one-hot encoding, and recovery of one-hot column groups.

Group detection uses the exact criterion: a set of columns is a one-hot group
when every row has exactly one 1 among them.  Columns are represented as
Python integers used as row bitsets, so disjointness and coverage are single
``&``/``|`` operations regardless of the row count.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import IndexOutOfRange, LengthMismatch, NotOneHot
from .models import BitPattern, NBParams, Observation
from .simplex import RngSeed, SeedLike, as_generator


@dataclass(frozen=True)
class OneHotGroup:
    columns: tuple[int, ...]
    ambiguous: bool = False

    @property
    def k(self) -> int:
        return len(self.columns)


def _draw_categorical(probs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """One index per row of ``probs`` by inverse-CDF sampling."""
    cdf = np.cumsum(probs, axis=-1)
    u = rng.random(probs.shape[0])
    idx = (u[:, None] >= cdf).sum(axis=1)
    return np.minimum(idx, probs.shape[1] - 1)


def generate_dataset_arrays(params: NBParams, n_rows: int, seed: SeedLike = RngSeed()) -> tuple[np.ndarray, np.ndarray]:
    """Sample ``(observations, labels)`` arrays of shape ``(n, F)`` and ``(n,)``."""
    if n_rows < 1:
        raise ValueError(f"n_rows must be at least 1, got {n_rows}")
    rng = as_generator(seed)
    prior = np.broadcast_to(params.prior.values, (n_rows, params.n_classes))
    labels = _draw_categorical(prior, rng)
    obs = np.empty((n_rows, params.n_features), dtype=np.int64)
    for f, table in enumerate(params.tables):
        obs[:, f] = _draw_categorical(table[labels], rng)
    return obs, labels


def generate_dataset(params: NBParams, n_rows: int, seed: SeedLike = RngSeed()) -> list[tuple[Observation, int]]:
    """Draw ``y ~ prior`` then each ``x_f ~ tables[f][y]``, ``n_rows`` times."""
    obs, labels = generate_dataset_arrays(params, n_rows, seed)
    return [(tuple(int(v) for v in row), int(y)) for row, y in zip(obs, labels)]


def one_hot_encode(obs: Sequence[int], n_values: Sequence[int]) -> tuple[BitPattern, ...]:
    if len(obs) != len(n_values):
        raise LengthMismatch(f"{len(obs)} values for {len(n_values)} features")
    patterns = []
    for f, (j, k) in enumerate(zip(obs, n_values)):
        if not 0 <= j < k:
            raise IndexOutOfRange(f"value {j} for feature {f} out of range for K={k}")
        patterns.append(tuple(1 if b == j else 0 for b in range(k)))
    return tuple(patterns)


def one_hot_decode(patterns: Sequence[Sequence[int]]) -> Observation:
    obs = []
    for f, pattern in enumerate(patterns):
        on = [b for b, bit in enumerate(pattern) if bit]
        if len(on) != 1 or any(bit not in (0, 1) for bit in pattern):
            raise NotOneHot(f"feature {f} pattern {tuple(pattern)} is not one-hot")
        obs.append(on[0])
    return tuple(obs)


def encode_matrix(obs: np.ndarray, n_values: Sequence[int]) -> np.ndarray:
    """Vectorized one-hot encoding of an ``(n, F)`` value array into an ``(n, sum K)`` bit array."""
    obs = np.asarray(obs, dtype=np.int64)
    blocks = []
    for f, k in enumerate(n_values):
        col = obs[:, f]
        if np.any((col < 0) | (col >= k)):
            raise IndexOutOfRange(f"feature {f} has values outside 0..{k - 1}")
        blocks.append((col[:, None] == np.arange(k)[None, :]).astype(np.uint8))
    return np.hstack(blocks)


def decode_matrix(bits: np.ndarray, group_sizes: Sequence[int]) -> np.ndarray:
    bits = np.asarray(bits)
    out = np.empty((bits.shape[0], len(group_sizes)), dtype=np.int64)
    start = 0
    for f, k in enumerate(group_sizes):
        block = bits[:, start : start + k]
        start += k
        if not np.all(block.sum(axis=1) == 1) or not np.all((block == 0) | (block == 1)):
            raise NotOneHot(f"feature {f} has rows that are not one-hot")
        out[:, f] = block.argmax(axis=1)
    return out


# --------------------------------------------------------------------------
# Group detection
# --------------------------------------------------------------------------


def _column_masks(m: np.ndarray) -> list[int]:
    masks = []
    for col in m.T:
        packed = np.packbits(col.astype(np.uint8), bitorder="little")
        masks.append(int.from_bytes(packed.tobytes(), "little"))
    return masks


def _exact_covers(
    start: int, candidates: list[int], masks: list[int], full: int
) -> Iterator[tuple[int, ...]]:
    """Exact covers of all rows that use column ``start``, in lowest-index-first order.

    Branches on the lowest uncovered row, trying the columns that cover it in
    ascending order.
    """

    def search(chosen: list[int], covered: int) -> Iterator[tuple[int, ...]]:
        if covered == full:
            yield tuple(sorted(chosen))
            return
        free = full & ~covered
        row_bit = free & -free
        for c in candidates:
            mc = masks[c]
            if mc & row_bit and not mc & covered:
                chosen.append(c)
                yield from search(chosen, covered | mc)
                chosen.pop()

    yield from search([start], masks[start])


def detect_one_hot_groups(m: np.ndarray) -> list[OneHotGroup]:
    """Find column sets (size >= 2) with exactly one set bit per row.

    Groups are built greedily from the lowest unassigned column; each column
    joins at most one group.  All-zero columns are never grouped since they
    could be added to any group.  A group is flagged ``ambiguous`` when its
    starting column admits more than one valid column set.
    """
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] < 1:
        raise ValueError("bit matrix must be 2-D with at least one row")
    if not np.all((m == 0) | (m == 1)):
        raise ValueError("bit matrix entries must be 0 or 1")
    n_rows, n_cols = m.shape
    full = (1 << n_rows) - 1
    masks = _column_masks(m)
    assigned: set[int] = set()
    groups = []
    for start in range(n_cols):
        if start in assigned or masks[start] == 0 or masks[start] == full:
            continue
        candidates = [c for c in range(start + 1, n_cols) if c not in assigned and masks[c]]
        covers = _exact_covers(start, candidates, masks, full)
        first = next(covers, None)
        if first is None:
            continue
        ambiguous = next(covers, None) is not None
        groups.append(OneHotGroup(first, ambiguous))
        assigned.update(first)
    return groups
