"""Segment-wise chi-squared stationarity and Higuchi fractal dimension."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import asdict, dataclass

import numpy as np
from scipy import stats

from mirlab.distributions import Alphabet, DegenerateInputError, collapse_duplicates

DEFAULT_SEGMENTS = 4
MIN_EXPECTED = 5.0


@dataclass(frozen=True)
class StationarityResult:
    chi2: float
    p_value: float
    cramers_v: float
    n_segments: int
    df: int
    n_categories: int
    low_expected_count: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class FractalDimension:
    d: float
    r_squared: float
    k_max: int

    def to_dict(self) -> dict:
        return asdict(self)


def segment_table(codes: np.ndarray, n_categories: int, n_segments: int) -> np.ndarray:
    """Contingency table of segment x category; the last segment takes the remainder."""
    seg_len = codes.size // n_segments
    if seg_len == 0:
        raise DegenerateInputError(
            f"sequence of length {codes.size} is too short for {n_segments} segments"
        )
    seg_id = np.minimum(np.arange(codes.size) // seg_len, n_segments - 1)
    table = np.zeros((n_segments, n_categories), dtype=np.int64)
    np.add.at(table, (seg_id, codes), 1)
    return table


def chi2_independence(table: np.ndarray) -> tuple[float, int, float, bool]:
    """Pearson chi-squared (no continuity correction) on a table with
    positive margins. Returns ``(chi2, df, cramers_v, low_expected)``."""
    t = np.asarray(table, dtype=np.float64)
    total = t.sum()
    expected = np.outer(t.sum(axis=1), t.sum(axis=0)) / total
    chi2 = float(np.sum((t - expected) ** 2 / expected))
    r, c = t.shape
    df = (r - 1) * (c - 1)
    v = float(np.sqrt(chi2 / (total * (min(r, c) - 1))))
    return chi2, df, min(v, 1.0), bool(np.any(expected < MIN_EXPECTED))


def stationarity_test(
    seq: Sequence[str],
    alphabet: Alphabet,
    n_segments: int = DEFAULT_SEGMENTS,
    collapse: bool = False,
) -> StationarityResult:
    """Test whether the symbol profile is the same across consecutive segments.

    Symbols that never occur are dropped before the test. Expected cell
    counts below 5 set ``low_expected_count`` instead of raising.
    """
    if n_segments < 2:
        raise ValueError(f"n_segments must be >= 2, got {n_segments}")
    if len(seq) == 0:
        raise DegenerateInputError("stationarity test needs a non-empty sequence")
    if collapse:
        seq = collapse_duplicates(seq)
    codes = alphabet.encode(seq)
    table = segment_table(codes, alphabet.size, n_segments)
    table = table[:, table.sum(axis=0) > 0]
    if table.shape[1] < 2:
        raise DegenerateInputError("stationarity test needs at least 2 distinct symbols")
    chi2, df, v, low = chi2_independence(table)
    p = float(stats.chi2.sf(chi2, df))
    return StationarityResult(
        chi2=chi2,
        p_value=p,
        cramers_v=v,
        n_segments=n_segments,
        df=df,
        n_categories=int(table.shape[1]),
        low_expected_count=low,
    )


def default_k_max(n: int) -> int:
    return min(16, n // 4)


def higuchi_curve_lengths(x: np.ndarray, k_max: int) -> np.ndarray:
    """Mean normalised curve length L(k) for k = 1..k_max."""
    n = x.size
    out = np.empty(k_max)
    for k in range(1, k_max + 1):
        lengths = np.empty(k)
        for m in range(k):
            sub = x[m::k]
            n_steps = sub.size - 1
            lengths[m] = np.abs(np.diff(sub)).sum() * (n - 1) / (n_steps * k * k)
        out[k - 1] = lengths.mean()
    return out


def higuchi_fractal_dimension(x: Sequence[float], k_max: int | None = None) -> FractalDimension:
    """Higuchi (1988) fractal dimension: slope of log L(k) against log(1/k)."""
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError("higuchi expects a 1-D series")
    if k_max is None:
        k_max = default_k_max(x.size)
    if k_max < 2:
        raise DegenerateInputError(f"k_max must be >= 2 (series length {x.size})")
    if x.size < 4 * k_max:
        raise DegenerateInputError(f"series too short: need >= {4 * k_max} samples for k_max={k_max}")
    if np.all(x == x[0]):
        raise DegenerateInputError("zero curve length: series is constant")
    lengths = higuchi_curve_lengths(x, k_max)
    lx = np.log(1.0 / np.arange(1, k_max + 1))
    ly = np.log(lengths)
    dx = lx - lx.mean()
    dy = ly - ly.mean()
    slope = float(dx @ dy) / float(dx @ dx)
    resid = dy - slope * dx
    r2 = 1.0 - float(resid @ resid) / float(dy @ dy)
    return FractalDimension(d=slope, r_squared=max(r2, 0.0), k_max=k_max)
