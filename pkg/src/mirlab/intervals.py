"""Exponential / Laplace fits to melodic-interval distributions."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

from mirlab.distributions import DegenerateInputError
from mirlab.resample import DEFAULT_BOOT, DEFAULT_SEED, make_rng, percentile_interval

MIN_INTERVALS = 20


@dataclass(frozen=True)
class IntervalAnalysis:
    family: str
    params: dict[str, float]
    log_likelihood: float
    ks_distance: float
    n: int
    mean_log_likelihood: dict[str, float | None]

    def to_dict(self) -> dict:
        return {
            "family": self.family,
            "params": dict(self.params),
            "log_likelihood": self.log_likelihood,
            "ks_distance": self.ks_distance,
            "n": self.n,
            "mean_log_likelihood": dict(self.mean_log_likelihood),
        }


def intervals_from_sequence(codes: Sequence[int]) -> list[int]:
    """Successive differences of a numerically encoded sequence."""
    if len(codes) < 2:
        raise DegenerateInputError("interval extraction needs at least 2 items")
    c = np.asarray(codes, dtype=np.int64)
    return np.diff(c).tolist()


def _check(intervals: Sequence[float]) -> np.ndarray:
    x = np.asarray(intervals, dtype=np.float64).ravel()
    if not np.all(np.isfinite(x)):
        raise ValueError("intervals must be finite")
    if x.size < MIN_INTERVALS:
        raise DegenerateInputError(f"interval fit needs at least {MIN_INTERVALS} intervals, got {x.size}")
    if np.all(x == x[0]):
        raise DegenerateInputError("all intervals are identical; no distribution to fit")
    return x


def fit_exponential(x: np.ndarray) -> float:
    """Rate of an exponential fitted to the nonzero magnitudes."""
    mags = np.abs(x[x != 0])
    if mags.size == 0:
        raise DegenerateInputError("exponential fit needs at least one nonzero interval")
    return float(1.0 / mags.mean())


def fit_laplace(x: np.ndarray) -> tuple[float, float]:
    """Location (median) and scale (mean absolute deviation about it)."""
    mu = float(np.median(x))
    b = float(np.abs(x - mu).mean())
    if b == 0:
        raise DegenerateInputError("laplace scale is zero")
    return mu, b


def exponential_cdf(y: np.ndarray, rate: float) -> np.ndarray:
    return -np.expm1(-rate * np.maximum(y, 0.0))


def laplace_cdf(y: np.ndarray, mu: float, b: float) -> np.ndarray:
    z = (y - mu) / b
    return np.where(z < 0, 0.5 * np.exp(np.minimum(z, 0.0)), 1.0 - 0.5 * np.exp(-np.maximum(z, 0.0)))


def ks_distance(sample: np.ndarray, cdf) -> float:
    """Two-sided sup-distance between the empirical CDF and ``cdf``."""
    s = np.sort(sample)
    n = s.size
    f = cdf(s)
    # compare against the ECDF just after and just before each jump
    after = np.searchsorted(s, s, side="right") / n
    before = np.searchsorted(s, s, side="left") / n
    return float(min(max(np.max(after - f), np.max(f - before)), 1.0))


def interval_analysis(intervals: Sequence[float]) -> IntervalAnalysis:
    """Fit both families and keep the one with the higher mean log-likelihood
    per nonzero interval.

    The exponential is fitted to the nonzero magnitudes and, having one-sided
    support, only competes when every nonzero interval has the same sign
    (otherwise its likelihood is zero). The Laplace is fitted to the signed
    values, zeros included.
    """
    x = _check(intervals)
    nz = x[x != 0]
    lam = fit_exponential(x)
    mu, b = fit_laplace(x)

    mags = np.abs(nz)
    one_sided = bool(np.all(nz > 0) or np.all(nz < 0))
    exp_score = float(np.mean(np.log(lam) - lam * mags)) if one_sided else None
    lap_score = float(np.mean(-np.log(2.0 * b) - np.abs(nz - mu) / b))
    scores = {"exponential": exp_score, "laplace": lap_score}
    if exp_score is not None and exp_score > lap_score:
        full_ll = float(np.sum(np.log(lam) - lam * mags))
        return IntervalAnalysis(
            family="exponential",
            params={"rate": lam},
            log_likelihood=full_ll,
            ks_distance=ks_distance(mags, lambda y: exponential_cdf(y, lam)),
            n=int(x.size),
            mean_log_likelihood=scores,
        )
    full_ll = float(np.sum(-np.log(2.0 * b) - np.abs(x - mu) / b))
    return IntervalAnalysis(
        family="laplace",
        params={"location": mu, "scale": b},
        log_likelihood=full_ll,
        ks_distance=ks_distance(x, lambda y: laplace_cdf(y, mu, b)),
        n=int(x.size),
        mean_log_likelihood=scores,
    )


def _index_chunks(rng: np.random.Generator, n: int, n_boot: int, cells: int = 2_000_000):
    """Resampling indices in blocks of replicates, drawn in replicate order."""
    step = max(1, cells // n)
    for start in range(0, n_boot, step):
        yield start, rng.integers(0, n, size=(min(step, n_boot - start), n))


def interval_param_bootstrap(
    intervals: Sequence[float],
    n_boot: int = DEFAULT_BOOT,
    seed: int = DEFAULT_SEED,
    level: float = 0.95,
    family: str | None = None,
) -> dict[str, tuple[float, float, float]]:
    """Percentile intervals for the parameters of the selected family.

    Returns ``{param: (estimate, lo, hi)}``. ``family`` overrides the
    automatic selection.
    """
    x = _check(intervals)
    if n_boot < 100:
        raise ValueError(f"n_boot must be >= 100, got {n_boot}")
    fit = interval_analysis(x)
    family = family or fit.family
    rng = make_rng(seed)
    n = x.size
    if family == "exponential":
        lam = fit_exponential(x)
        mags = np.abs(x)
        nonzero = (x != 0).astype(np.float64)
        reps = np.empty(n_boot)
        for start, idx in _index_chunks(rng, n, n_boot):
            reps[start : start + len(idx)] = nonzero[idx].sum(axis=1) / mags[idx].sum(axis=1)
        return {"rate": (lam, *percentile_interval(reps, level))}
    if family == "laplace":
        mu, scale = fit_laplace(x)
        mus = np.empty(n_boot)
        bs = np.empty(n_boot)
        for start, idx in _index_chunks(rng, n, n_boot):
            for row, sel in enumerate(idx, start):
                s = x[sel]
                mus[row] = np.median(s)
                bs[row] = np.abs(s - mus[row]).mean()
        return {
            "location": (mu, *percentile_interval(mus, level)),
            "scale": (scale, *percentile_interval(bs, level)),
        }
    raise ValueError(f"unknown family {family!r}")
