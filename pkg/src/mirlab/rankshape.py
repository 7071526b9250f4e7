"""Zipf rank-frequency fits and Gini inequality scores."""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from mirlab.distributions import DegenerateInputError


@dataclass(frozen=True)
class ZipfFit:
    alpha: float
    r_squared: float
    n_ranks: int

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "r_squared": self.r_squared, "n_ranks": self.n_ranks}


@dataclass(frozen=True)
class GiniReport:
    per_dimension: tuple[tuple[str, float | None], ...]
    errors: dict[str, str]

    def to_dict(self) -> dict:
        return {
            "per_dimension": [{"label": k, "gini": g} for k, g in self.per_dimension],
            "errors": dict(self.errors),
        }


def zipf_fit(freqs: Sequence[float]) -> ZipfFit:
    """Fit ``f_r ~ 1 / r**alpha`` by least squares on log2 frequency vs log2 rank.

    Zero frequencies are dropped before ranking. A flat profile gives
    ``alpha = 0`` and ``r_squared = 1``.
    """
    f = np.asarray(freqs, dtype=np.float64).ravel()
    if np.any(f < 0) or not np.all(np.isfinite(f)):
        raise ValueError("frequencies must be finite and non-negative")
    f = np.sort(f[f > 0])[::-1]
    n = f.size
    if n < 3:
        raise DegenerateInputError(f"zipf fit needs at least 3 positive frequencies, got {n}")
    x = np.log2(np.arange(1, n + 1, dtype=np.float64))
    y = np.log2(f)
    dx = x - x.mean()
    dy = y - y.mean()
    syy = float(dy @ dy)
    if syy == 0.0:
        return ZipfFit(alpha=0.0, r_squared=1.0, n_ranks=n)
    slope = float(dx @ dy) / float(dx @ dx)
    resid = dy - slope * dx
    r2 = 1.0 - float(resid @ resid) / syy
    return ZipfFit(alpha=-slope, r_squared=min(max(r2, 0.0), 1.0), n_ranks=n)


def gini(values: Sequence[float]) -> float:
    """Gini coefficient ``sum_ij |x_i - x_j| / (2 n sum x)``.

    Evaluated through the sorted form ``sum_i (2i - n - 1) x_(i) / (n sum x)``.
    """
    x = np.sort(np.asarray(values, dtype=np.float64).ravel())
    n = x.size
    if n < 2:
        raise DegenerateInputError(f"gini needs at least 2 values, got {n}")
    if np.any(x < 0) or not np.all(np.isfinite(x)):
        raise ValueError("gini values must be finite and non-negative")
    total = math.fsum(x)
    if total == 0:
        raise DegenerateInputError("gini is undefined for an all-zero input")
    weights = 2 * np.arange(1, n + 1) - n - 1
    return math.fsum(weights * x) / (n * total)


def gini_multi(matrix: Sequence[Sequence[float]] | np.ndarray, labels: Sequence[str]) -> GiniReport:
    """Per-column Gini of an observations x dimensions matrix.

    A column that cannot be scored (e.g. all zeros) is reported in
    ``errors`` and carries ``None``; the other columns are still computed.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2:
        raise ValueError("gini_multi expects a 2-D matrix")
    if m.shape[0] < 2:
        raise DegenerateInputError(f"gini_multi needs at least 2 rows, got {m.shape[0]}")
    labels = [str(lab) for lab in labels]
    if len(labels) != m.shape[1]:
        raise ValueError(f"{len(labels)} labels for {m.shape[1]} columns")
    if len(set(labels)) != len(labels):
        raise ValueError("column labels must be distinct")
    out: list[tuple[str, float | None]] = []
    errors: dict[str, str] = {}
    for j, lab in enumerate(labels):
        try:
            out.append((lab, gini(m[:, j])))
        except ValueError as exc:
            out.append((lab, None))
            errors[lab] = str(exc)
    return GiniReport(tuple(out), errors)
