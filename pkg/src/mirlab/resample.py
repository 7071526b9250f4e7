"""Spearman correlation, percentile bootstrap and grouped jackknife.

All randomness goes through :func:`make_rng`, a numpy ``Generator`` on the
PCG64 bit generator, so intervals are reproducible from the seed alone.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
from scipy import stats

from mirlab.distributions import DegenerateInputError

DEFAULT_SEED = 20260501
DEFAULT_BOOT = 1000


def make_rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(seed))


def percentile_interval(replicates: np.ndarray, level: float = 0.95) -> tuple[float, float]:
    tail = 100.0 * (1.0 - level) / 2.0
    lo, hi = np.percentile(replicates, [tail, 100.0 - tail])
    return float(lo), float(hi)


def spearman(x: Sequence[float], y: Sequence[float]) -> tuple[float, float]:
    """Spearman's rho with average ranks for ties, and a two-sided p-value.

    The p-value uses the t approximation with n - 2 degrees of freedom.
    """
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("spearman needs two 1-D sequences of equal length")
    n = x.size
    if n < 3:
        raise DegenerateInputError(f"spearman needs at least 3 pairs, got {n}")
    rx = stats.rankdata(x)
    ry = stats.rankdata(y)
    dx = rx - rx.mean()
    dy = ry - ry.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if sxx == 0 or syy == 0:
        raise DegenerateInputError("spearman is undefined when either input is constant")
    rho = float(np.clip((dx @ dy) / np.sqrt(sxx * syy), -1.0, 1.0))
    if abs(rho) == 1.0:
        return rho, 0.0
    t = rho * np.sqrt((n - 2) / (1.0 - rho * rho))
    p = float(2.0 * stats.t.sf(abs(t), n - 2))
    return rho, p


def condensed(matrix: np.ndarray) -> np.ndarray:
    """Upper-triangle entries (i < j) of a square matrix, row-major."""
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError("expected a square matrix")
    return m[np.triu_indices(m.shape[0], k=1)]


@dataclass(frozen=True)
class JackknifeReport:
    rho_point: float
    rho_jack: float
    se_jack: float
    ci_lo: float
    ci_hi: float
    leave_out_values: tuple[tuple[str, float], ...]

    def most_influential(self) -> str:
        """Unit whose removal moves rho furthest from the full-sample value."""
        return max(self.leave_out_values, key=lambda kv: abs(kv[1] - self.rho_point))[0]

    def to_dict(self) -> dict:
        return {
            "rho_point": self.rho_point,
            "rho_jack": self.rho_jack,
            "se_jack": self.se_jack,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
            "leave_out_values": [{"label": k, "rho": v} for k, v in self.leave_out_values],
            "most_influential": self.most_influential(),
        }


DistanceFn = Callable[[Sequence[str]], np.ndarray]


def jackknife_spearman(
    units: Sequence[str],
    distance_a: DistanceFn,
    distance_b: DistanceFn,
) -> JackknifeReport:
    """Leave-one-unit-out jackknife of the Spearman correlation between two
    pairwise distance matrices.

    ``distance_a`` and ``distance_b`` receive the retained unit labels and
    return a square distance matrix in that order; they are re-evaluated on
    every leave-out so quantities such as standardisation are recomputed.
    The interval is ``rho_jack +/- 1.96 * se_jack`` and is not clamped.
    """
    units = list(units)
    n = len(units)
    if n < 4:
        raise DegenerateInputError(f"jackknife needs at least 4 units, got {n}")
    if len(set(units)) != n:
        raise ValueError("unit labels must be distinct")

    def rho_for(subset: list[str]) -> float:
        a = condensed(distance_a(subset))
        b = condensed(distance_b(subset))
        return spearman(a, b)[0]

    rho_point = rho_for(units)
    leave = np.array([rho_for(units[:i] + units[i + 1 :]) for i in range(n)])
    rho_jack = float(leave.mean())
    se = float(np.sqrt((n - 1) / n * np.sum((leave - rho_jack) ** 2)))
    return JackknifeReport(
        rho_point=rho_point,
        rho_jack=rho_jack,
        se_jack=se,
        ci_lo=rho_jack - 1.96 * se,
        ci_hi=rho_jack + 1.96 * se,
        leave_out_values=tuple(zip(units, leave.tolist())),
    )


def bootstrap_mean_ci(
    values: Sequence[float],
    n_boot: int = DEFAULT_BOOT,
    seed: int = DEFAULT_SEED,
    level: float = 0.95,
) -> tuple[float, float, float]:
    """Sample mean with a percentile bootstrap interval: ``(mean, lo, hi)``."""
    v = np.asarray(values, dtype=np.float64)
    if v.ndim != 1 or v.size < 3:
        raise DegenerateInputError(f"bootstrap needs at least 3 values, got {v.size}")
    if n_boot < 100:
        raise ValueError(f"n_boot must be >= 100, got {n_boot}")
    rng = make_rng(seed)
    idx = rng.integers(0, v.size, size=(n_boot, v.size))
    reps = v[idx].mean(axis=1)
    lo, hi = percentile_interval(reps, level)
    return float(v.mean()), lo, hi
