"""Closed-form analysis of the Q factor and of ``f_j(theta) = theta_j * Q^{-j}(theta)``.

For a fixed ``theta_j`` the off-``j`` mass ``1 - theta_j`` can sit anywhere on
a smaller simplex.  ``Q^{-j}`` is smallest (equal to ``theta_j``) when that
mass is concentrated on one coordinate and largest when it is spread evenly,
which gives the envelope

    theta_j**2 <= f_j(theta) <= theta_j * ((K - 2 + theta_j) / (K - 1))**(K - 1).

The bound functions accept scalars or arrays; scalars come back as ``float``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import BadK, OutOfUnitInterval, ZeroTheta
from .models import q_factor


@dataclass(frozen=True)
class BoundPair:
    lower: float
    upper: float

    def __post_init__(self):
        if not self.lower <= self.upper:
            raise ValueError(f"lower bound {self.lower} exceeds upper bound {self.upper}")

    def __contains__(self, value: float) -> bool:
        return self.lower <= value <= self.upper


def _unit(theta_j, name: str = "theta_j") -> np.ndarray:
    arr = np.asarray(theta_j, dtype=np.float64)
    if not np.all((arr >= 0) & (arr <= 1)):
        raise OutOfUnitInterval(f"{name} must lie in [0, 1], got {theta_j!r}")
    return arr


def _check_k(k: int) -> int:
    if not (isinstance(k, (int, np.integer)) and k >= 2):
        raise BadK(f"K must be an integer >= 2, got {k!r}")
    return int(k)


def _out(arr: np.ndarray):
    return float(arr) if arr.ndim == 0 else arr


def f_j(theta: Sequence[float], j: int) -> float:
    """Effective PoB evidence for value ``j``: ``theta_j * Q^{-j}(theta)``."""
    theta = np.asarray(theta, dtype=np.float64)
    q = q_factor(theta, j)
    return float(theta[j]) * q


def lower_bound(theta_j):
    """``theta_j**2``; attained at the simplex corners."""
    t = _unit(theta_j)
    return _out(t * t)


def q_optimum(theta_j, k: int):
    """Largest ``Q^{-j}`` for fixed ``theta_j``, reached when the other ``K - 1`` entries are equal."""
    t = _unit(theta_j)
    k = _check_k(k)
    return _out(((k - 2 + t) / (k - 1)) ** (k - 1))


def upper_bound(theta_j, k: int):
    """``theta_j * q_optimum(theta_j, K)``; equals :func:`lower_bound` when K = 2."""
    t = _unit(theta_j)
    return _out(t * np.asarray(q_optimum(t, k)))


def centre_configuration(theta_j: float, k: int, j: int = 0) -> np.ndarray:
    """The length-``K`` vector with ``theta_j`` at ``j`` and the rest spread evenly."""
    k = _check_k(k)
    t = float(_unit(theta_j))
    theta = np.full(k, (1.0 - t) / (k - 1))
    theta[j] = t
    return theta


def corner_configuration(theta_j: float, k: int, j: int = 0, corner: int | None = None) -> np.ndarray:
    """The length-``K`` vector with ``theta_j`` at ``j`` and all remaining mass on ``corner``."""
    k = _check_k(k)
    t = float(_unit(theta_j))
    corner = (j + 1) % k if corner is None else corner
    if corner == j:
        raise ValueError("corner must differ from j")
    theta = np.zeros(k)
    theta[j] = t
    theta[corner] = 1.0 - t
    return theta


def _positive(theta, name: str) -> float:
    t = float(_unit(theta, name))
    if t == 0:
        raise ZeroTheta(f"{name} must be strictly positive for a ratio bound")
    return t


def ratio_bounds(theta_jc: float, theta_jd: float, k: int) -> BoundPair:
    """Range of ``f_j(theta_c) / f_j(theta_d)`` given only ``theta_jc``, ``theta_jd`` and K.

    lower = l(theta_jc) / u(theta_jd), upper = u(theta_jc) / l(theta_jd).
    """
    c = _positive(theta_jc, "theta_jc")
    d = _positive(theta_jd, "theta_jd")
    k = _check_k(k)
    lower = lower_bound(c) / upper_bound(d, k)
    upper = upper_bound(c, k) / lower_bound(d)
    return BoundPair(lower, upper)


def extremeness_threshold(theta_jd: float, k: int) -> float:
    return q_optimum(_positive(theta_jd, "theta_jd"), k)


def extremeness_guaranteed(theta_jc: float, theta_jd: float, k: int) -> bool:
    """True when ``theta_jc`` exceeds ``q_optimum(theta_jd, K)``.

    In that case every realizable PoB ratio ``f_j(theta_c) / f_j(theta_d)`` is
    larger than the categorical ratio ``theta_jc / theta_jd``.
    """
    c = _positive(theta_jc, "theta_jc")
    return c > extremeness_threshold(theta_jd, k)


# Vectorized helpers for sampled batches (rows of theta on the simplex).


def q_factor_rows(thetas: np.ndarray, j: int) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=np.float64)
    return np.prod(1.0 - np.delete(thetas, j, axis=-1), axis=-1)


def f_j_rows(thetas: np.ndarray, j: int) -> np.ndarray:
    thetas = np.asarray(thetas, dtype=np.float64)
    return thetas[..., j] * q_factor_rows(thetas, j)
