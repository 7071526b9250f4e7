import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from mirlab.distributions import DegenerateInputError
from mirlab.rubato import (
    CATEGORIES,
    ClassifierThresholds,
    ShortCurveError,
    classify,
    classify_corpus,
    find_peaks,
    paired_delta_ci,
    power_spectrum,
    rubato_spectral,
    threshold_sensitivity,
)


def sine_curve(period, n, amp=10.0, base=120.0):
    t = np.arange(n)
    return base + amp * np.sin(2 * np.pi * t / period)


def free_curve(seed, n=1024):
    # one weak sinusoid over broadband noise keeps peak power well below 30%
    rng = np.random.default_rng(seed)
    return 120 + 4 * np.sin(2 * np.pi * np.arange(n) / 16) + rng.normal(0, 6, n)


def reference_classify(sigma, ratio, th):
    if sigma < th.metronomic_sigma:
        return "metronomic"
    if ratio > th.periodic_ratio:
        return "periodic"
    if ratio > th.quasi_ratio:
        return "quasi_periodic"
    if sigma > th.free_sigma:
        return "free"
    return "metronomic"


@pytest.mark.parametrize("period", [8, 16, 20, 32, 64])
def test_sinusoid_recovers_period(period):
    a = rubato_spectral(sine_curve(period, period * 8))
    assert a.category == "periodic"
    assert a.dominant_periods[0].period_beats == period
    assert a.dominant_periods[0].power_norm == 1.0
    assert a.sigma_bpm == pytest.approx(10 / np.sqrt(2), rel=1e-9)


def test_constant_curve_is_metronomic_without_spectrum():
    a = rubato_spectral(np.full(64, 100.0))
    assert a.category == "metronomic"
    assert a.periodicity_ratio is None
    assert a.dominant_periods == ()


@pytest.mark.parametrize("seed", range(5))
def test_free_curve(seed):
    a = rubato_spectral(free_curve(seed))
    assert a.periodicity_ratio < 0.3
    assert a.category == "free"


def test_white_noise_concentrates_power_in_peaks():
    # raw broadband noise has many local maxima above the 10% floor
    a = rubato_spectral(120 + np.random.default_rng(0).normal(0, 5, 512))
    assert a.periodicity_ratio > 0.5


def test_short_curve_rejected():
    with pytest.raises(ShortCurveError, match="min_samples=32"):
        rubato_spectral(np.full(31, 100.0))
    assert rubato_spectral(np.full(8, 100.0), min_samples=8).category == "metronomic"
    with pytest.raises(ValueError):
        rubato_spectral([100.0] * 40 + [-1.0])


def test_power_spectrum_matches_direct_dft():
    x = np.random.default_rng(1).normal(100, 4, 40)
    spec = power_spectrum(x)
    c = x - x.mean()
    t = np.arange(40)
    direct = [abs(np.sum(c * np.exp(-2j * np.pi * k * t / 40))) ** 2 for k in range(1, 21)]
    assert np.allclose(spec.power, direct, rtol=1e-10)


@settings(max_examples=50)
@given(st.integers(32, 200), st.integers(0, 2**31))
def test_folded_parseval(n, seed):
    x = np.random.default_rng(seed).normal(100, 3, n)
    power = power_spectrum(x).power
    folded = 2 * power.sum()
    if n % 2 == 0:
        folded -= power[-1]
    assert folded == pytest.approx(n * n * x.var(), rel=1e-9)


def test_find_peaks():
    p = np.array([5.0, 1.0, 3.0, 3.0, 0.5, 2.0, 0.1])
    # plateau at 3,3 is not a strict maximum; edges compare to one neighbour
    assert find_peaks(p, 0.0).tolist() == [0, 5]
    assert find_peaks(p, 2.5).tolist() == [0]


@given(st.floats(0, 10), st.floats(0, 1))
def test_classify_matches_reference(sigma, ratio):
    th = ClassifierThresholds()
    assert classify(sigma, ratio, th) == reference_classify(sigma, ratio, th)


def test_classify_worked_case():
    assert classify(5.0, 0.6, ClassifierThresholds()) == "periodic"
    assert classify(5.0, 0.2, ClassifierThresholds()) == "free"
    assert classify(2.0, 0.2, ClassifierThresholds()) == "metronomic"
    assert classify(0.4, 0.9, ClassifierThresholds()) == "metronomic"
    with pytest.raises(ValueError):
        classify(1.0, None, ClassifierThresholds())


@pytest.mark.parametrize("kw", [{"metronomic_sigma": 4.0}, {"quasi_ratio": 0.6}, {"periodic_ratio": 1.0}])
def test_thresholds_validation(kw):
    with pytest.raises(ValueError):
        ClassifierThresholds(**kw)


def corpus():
    curves = []
    for i in range(6):
        curves.append(("A", f"a{i}", sine_curve(16, 128)))
        curves.append(("B", f"b{i}", free_curve(i)))
    curves.append(("B", "short", np.full(10, 100.0)))
    curves.append(("A", "flat", np.full(64, 90.0)))
    return curves


def test_classify_corpus_table():
    res = classify_corpus(corpus())
    assert res.table["A"] == {"metronomic": 1, "free": 0, "quasi_periodic": 0, "periodic": 6}
    assert res.table["B"]["free"] == 6
    assert [e[1] for e in res.excluded] == ["short"]
    d = res.to_dict()
    assert len(d["curves"]) == 13
    assert set(d["table"]["A"]) == set(CATEGORIES)


def test_classify_corpus_all_short():
    with pytest.raises(DegenerateInputError):
        classify_corpus([("A", "x", np.full(5, 100.0))])


def test_sensitivity_sweep():
    runs = threshold_sensitivity(corpus())
    assert len(runs) == 17
    assert runs[0].name == "baseline"
    assert {r.ratios for r in runs} == {runs[0].ratios}
    assert {r.axis for r in runs[1:]} == {"metronomic_sigma", "free_sigma", "quasi_ratio", "periodic_ratio"}
    tweaked = [r for r in runs if r.axis == "free_sigma" and r.multiplier == 1.2][0]
    assert tweaked.result.thresholds.free_sigma == pytest.approx(3.6)


def test_paired_delta_ci():
    pairs = [(1.0, 2.0), (2.0, 2.5), (3.0, 4.5), (0.0, 1.0)]
    m, lo, hi = paired_delta_ci(pairs, 500, 3)
    assert m == pytest.approx(1.0)
    assert 0.5 <= lo <= m <= hi <= 1.5
    with pytest.raises(DegenerateInputError):
        paired_delta_ci(pairs[:2])
    with pytest.raises(ValueError):
        paired_delta_ci([(1, 2, 3)] * 4)


@settings(max_examples=30)
@given(st.integers(0, 2**31), st.floats(-50, 50))
def test_spectrum_mean_invariance(seed, shift):
    x = 120 + np.random.default_rng(seed).normal(0, 4, 96)
    a, b = rubato_spectral(x), rubato_spectral(x + shift)
    assert a.periodicity_ratio == pytest.approx(b.periodicity_ratio, abs=1e-9)
    assert [p.period_beats for p in a.dominant_periods] == [p.period_beats for p in b.dominant_periods]
