"""Spectral analysis and classification of per-beat tempo curves.

The classifier is a priority table; the first rule that fires wins:

1. sigma < metronomic_sigma          -> metronomic (no spectrum computed)
2. periodicity ratio > periodic_ratio -> periodic
3. periodicity ratio > quasi_ratio    -> quasi_periodic
4. sigma > free_sigma                 -> free
5. otherwise                          -> metronomic
"""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import asdict, dataclass, replace

import numpy as np

from mirlab.distributions import DegenerateInputError
from mirlab.resample import DEFAULT_BOOT, DEFAULT_SEED, bootstrap_mean_ci

CATEGORIES = ("metronomic", "free", "quasi_periodic", "periodic")
MIN_SAMPLES = 32
PEAK_FLOOR = 0.1
MAX_PERIODS = 3
SWEEP_MULTIPLIERS = (0.8, 0.9, 1.1, 1.2)


class ShortCurveError(DegenerateInputError):
    """Tempo curve below the minimum analysable length."""


@dataclass(frozen=True)
class ClassifierThresholds:
    metronomic_sigma: float = 0.5
    free_sigma: float = 3.0
    quasi_ratio: float = 0.3
    periodic_ratio: float = 0.5

    def __post_init__(self) -> None:
        if not 0 < self.metronomic_sigma < self.free_sigma:
            raise ValueError("thresholds need 0 < metronomic_sigma < free_sigma")
        if not 0 < self.quasi_ratio < self.periodic_ratio < 1:
            raise ValueError("thresholds need 0 < quasi_ratio < periodic_ratio < 1")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DominantPeriod:
    period_beats: float
    power_norm: float


@dataclass(frozen=True)
class RubatoAnalysis:
    category: str
    sigma_bpm: float
    periodicity_ratio: float | None
    dominant_periods: tuple[DominantPeriod, ...]

    def to_dict(self) -> dict:
        return {
            "category": self.category,
            "sigma_bpm": self.sigma_bpm,
            "periodicity_ratio": self.periodicity_ratio,
            "dominant_periods": [asdict(p) for p in self.dominant_periods],
        }


@dataclass(frozen=True)
class Spectrum:
    """Non-DC power of the centred curve; ``power[i]`` belongs to rfft bin ``i + 1``."""

    n: int
    power: np.ndarray
    peaks: np.ndarray

    @property
    def periodicity_ratio(self) -> float:
        total = self.power.sum()
        if total <= 0:
            return 0.0
        return float(min(self.power[self.peaks].sum() / total, 1.0))

    def dominant_periods(self, limit: int = MAX_PERIODS) -> tuple[DominantPeriod, ...]:
        if self.peaks.size == 0:
            return ()
        top = self.power.max()
        # stable sort keeps lower frequency first on equal power
        order = self.peaks[np.argsort(-self.power[self.peaks], kind="stable")][:limit]
        return tuple(
            DominantPeriod(period_beats=self.n / (i + 1), power_norm=float(self.power[i] / top))
            for i in order
        )


def check_curve(bpm: Sequence[float], min_samples: int = MIN_SAMPLES) -> np.ndarray:
    x = np.asarray(bpm, dtype=np.float64)
    if x.ndim != 1 or x.size < 1:
        raise ValueError("tempo curve must be a non-empty 1-D series")
    if not np.all(np.isfinite(x)) or np.any(x <= 0):
        raise ValueError("tempo curve samples must be finite and positive BPM values")
    if x.size < min_samples:
        raise ShortCurveError(
            f"tempo curve has {x.size} samples, below min_samples={min_samples}; excluded"
        )
    return x


def find_peaks(power: np.ndarray, floor: float) -> np.ndarray:
    """Indices of strict local maxima above ``floor``; edge bins compare
    against their single neighbour."""
    n = power.size
    if n == 0:
        return np.zeros(0, dtype=int)
    left = np.empty(n, dtype=bool)
    right = np.empty(n, dtype=bool)
    left[0] = True
    right[-1] = True
    left[1:] = power[1:] > power[:-1]
    right[:-1] = power[:-1] > power[1:]
    return np.flatnonzero(left & right & (power > floor))


def power_spectrum(bpm: np.ndarray) -> Spectrum:
    """Squared rfft magnitudes of the mean-removed curve, DC bin excluded."""
    x = bpm - bpm.mean()
    power = np.abs(np.fft.rfft(x)[1:]) ** 2
    top = power.max() if power.size else 0.0
    peaks = find_peaks(power, PEAK_FLOOR * top) if top > 0 else np.zeros(0, dtype=int)
    return Spectrum(n=bpm.size, power=power, peaks=peaks)


def classify(sigma: float, ratio: float | None, thresholds: ClassifierThresholds) -> str:
    if sigma < thresholds.metronomic_sigma:
        return "metronomic"
    if ratio is None:
        raise ValueError("a periodicity ratio is required once sigma clears the metronomic ceiling")
    if ratio > thresholds.periodic_ratio:
        return "periodic"
    if ratio > thresholds.quasi_ratio:
        return "quasi_periodic"
    if sigma > thresholds.free_sigma:
        return "free"
    return "metronomic"


def rubato_spectral(
    bpm: Sequence[float],
    thresholds: ClassifierThresholds | None = None,
    min_samples: int = MIN_SAMPLES,
) -> RubatoAnalysis:
    """Classify a per-beat BPM curve from its sigma and FFT periodicity ratio.

    ``sigma_bpm`` is the population standard deviation. Dominant periods are
    ``N / bin`` beats for the (up to) three strongest peaks.
    """
    thresholds = thresholds or ClassifierThresholds()
    x = check_curve(bpm, min_samples)
    sigma = float(x.std())
    if sigma < thresholds.metronomic_sigma:
        return RubatoAnalysis("metronomic", sigma, None, ())
    spec = power_spectrum(x)
    ratio = spec.periodicity_ratio
    return RubatoAnalysis(classify(sigma, ratio, thresholds), sigma, ratio, spec.dominant_periods())


@dataclass(frozen=True)
class CurveProfile:
    """Threshold-independent summary of one curve, computed once per curve."""

    label: str
    curve_id: str
    n: int
    mean_bpm: float
    sigma_bpm: float
    periodicity_ratio: float | None
    dominant_periods: tuple[DominantPeriod, ...]

    def analysis(self, thresholds: ClassifierThresholds) -> RubatoAnalysis:
        category = classify(self.sigma_bpm, self.periodicity_ratio, thresholds)
        if self.sigma_bpm < thresholds.metronomic_sigma:
            return RubatoAnalysis(category, self.sigma_bpm, None, ())
        return RubatoAnalysis(category, self.sigma_bpm, self.periodicity_ratio, self.dominant_periods)


def curve_profile(label: str, curve_id: str, bpm: Sequence[float], min_samples: int = MIN_SAMPLES) -> CurveProfile:
    x = check_curve(bpm, min_samples)
    sigma = float(x.std())
    if sigma == 0.0:
        ratio, periods = None, ()
    else:
        spec = power_spectrum(x)
        ratio, periods = spec.periodicity_ratio, spec.dominant_periods()
    return CurveProfile(label, curve_id, int(x.size), float(x.mean()), sigma, ratio, periods)


@dataclass(frozen=True)
class CorpusClassification:
    thresholds: ClassifierThresholds
    table: dict[str, dict[str, int]]
    analyses: tuple[tuple[str, str, RubatoAnalysis], ...]
    excluded: tuple[tuple[str, str, str], ...]

    def to_dict(self) -> dict:
        return {
            "thresholds": self.thresholds.to_dict(),
            "table": self.table,
            "curves": [
                {"label": lab, "curve": cid, **a.to_dict()} for lab, cid, a in self.analyses
            ],
            "excluded": [{"label": lab, "curve": cid, "reason": why} for lab, cid, why in self.excluded],
        }


TempoCorpus = Sequence[tuple[str, str, Sequence[float]]]


def profile_corpus(
    curves: TempoCorpus, min_samples: int = MIN_SAMPLES
) -> tuple[list[CurveProfile], list[tuple[str, str, str]]]:
    """Profile ``(label, curve_id, bpm)`` triples, separating out short curves."""
    profiles: list[CurveProfile] = []
    excluded: list[tuple[str, str, str]] = []
    for label, cid, bpm in curves:
        try:
            profiles.append(curve_profile(label, cid, bpm, min_samples))
        except ShortCurveError as exc:
            excluded.append((label, cid, str(exc)))
    return profiles, excluded


def tabulate_profiles(
    profiles: Sequence[CurveProfile],
    excluded: Sequence[tuple[str, str, str]],
    thresholds: ClassifierThresholds,
) -> CorpusClassification:
    if not profiles:
        raise DegenerateInputError("no analysable tempo curves (all below min_samples)")
    table: dict[str, dict[str, int]] = {}
    analyses = []
    for prof in profiles:
        a = prof.analysis(thresholds)
        row = table.setdefault(prof.label, dict.fromkeys(CATEGORIES, 0))
        row[a.category] += 1
        analyses.append((prof.label, prof.curve_id, a))
    return CorpusClassification(thresholds, table, tuple(analyses), tuple(excluded))


def classify_corpus(
    curves: TempoCorpus,
    thresholds: ClassifierThresholds | None = None,
    min_samples: int = MIN_SAMPLES,
) -> CorpusClassification:
    """Label x category contingency table over ``(label, curve_id, bpm)`` triples."""
    profiles, excluded = profile_corpus(curves, min_samples)
    return tabulate_profiles(profiles, excluded, thresholds or ClassifierThresholds())


@dataclass(frozen=True)
class SensitivityRun:
    name: str
    axis: str | None
    multiplier: float
    result: CorpusClassification
    ratios: tuple[float | None, ...]

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "axis": self.axis,
            "multiplier": self.multiplier,
            "periodicity_ratios": list(self.ratios),
            **self.result.to_dict(),
        }


def threshold_sensitivity(
    curves: TempoCorpus,
    base: ClassifierThresholds | None = None,
    min_samples: int = MIN_SAMPLES,
    multipliers: Sequence[float] = SWEEP_MULTIPLIERS,
) -> list[SensitivityRun]:
    """Baseline plus one-axis-at-a-time perturbations of each threshold.

    Spectra are computed once; every run re-classifies the cached
    ``(sigma, ratio)`` pairs.
    """
    base = base or ClassifierThresholds()
    profiles, excluded = profile_corpus(curves, min_samples)
    ratios = tuple(p.periodicity_ratio for p in profiles)
    runs = [SensitivityRun("baseline", None, 1.0, tabulate_profiles(profiles, excluded, base), ratios)]
    for axis in ("metronomic_sigma", "free_sigma", "quasi_ratio", "periodic_ratio"):
        for mult in multipliers:
            th = replace(base, **{axis: getattr(base, axis) * mult})
            runs.append(
                SensitivityRun(f"{axis}x{mult:g}", axis, mult, tabulate_profiles(profiles, excluded, th), ratios)
            )
    return runs


def paired_delta_ci(
    pairs: Sequence[tuple[float, float]],
    n_boot: int = DEFAULT_BOOT,
    seed: int = DEFAULT_SEED,
    level: float = 0.95,
) -> tuple[float, float, float]:
    """Mean of ``after - before`` with a percentile bootstrap interval over pairs."""
    arr = np.asarray(pairs, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError("pairs must be a sequence of (before, after) tuples")
    if arr.shape[0] < 3:
        raise DegenerateInputError(f"paired deltas need at least 3 pairs, got {arr.shape[0]}")
    return bootstrap_mean_ci(arr[:, 1] - arr[:, 0], n_boot, seed, level)


def group_profiles(profiles: Sequence[CurveProfile]) -> Mapping[str, list[CurveProfile]]:
    out: dict[str, list[CurveProfile]] = {}
    for p in profiles:
        out.setdefault(p.label, []).append(p)
    return out
