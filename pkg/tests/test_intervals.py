import numpy as np
import pytest
from scipy import stats

from mirlab.distributions import DegenerateInputError
from mirlab.intervals import (
    exponential_cdf,
    fit_exponential,
    fit_laplace,
    interval_analysis,
    interval_param_bootstrap,
    intervals_from_sequence,
    ks_distance,
    laplace_cdf,
)


def test_intervals_from_sequence():
    assert intervals_from_sequence([0, 2, 1, 1, 5]) == [2, -1, 0, 4]
    with pytest.raises(DegenerateInputError):
        intervals_from_sequence([3])


def test_fits_match_scipy():
    x = np.random.default_rng(0).laplace(1.0, 2.0, 501)
    mu, b = fit_laplace(x)
    ref_mu, ref_b = stats.laplace.fit(x)
    assert mu == pytest.approx(ref_mu, abs=1e-9)
    assert b == pytest.approx(ref_b, rel=1e-9)
    y = np.random.default_rng(1).exponential(1 / 1.5, 400)
    assert fit_exponential(y) == pytest.approx(1 / stats.expon.fit(y, floc=0)[1], rel=1e-12)


def test_cdfs_match_scipy():
    y = np.linspace(-5, 5, 41)
    assert np.allclose(laplace_cdf(y, 0.3, 1.7), stats.laplace.cdf(y, 0.3, 1.7), atol=1e-15)
    assert np.allclose(exponential_cdf(y, 2.0), stats.expon.cdf(y, scale=0.5), atol=1e-15)


def test_ks_distance_matches_scipy():
    rng = np.random.default_rng(2)
    for _ in range(20):
        x = rng.laplace(0, 1.5, 200)
        ours = ks_distance(x, lambda y: laplace_cdf(y, 0.0, 1.5))
        assert ours == pytest.approx(stats.kstest(x, stats.laplace(0, 1.5).cdf).statistic, abs=1e-12)
    ints = rng.integers(-3, 4, 100).astype(float)
    ours = ks_distance(ints, lambda y: laplace_cdf(y, 0.0, 1.0))
    assert 0 <= ours <= 1


def test_selects_laplace_for_signed_data():
    x = np.random.default_rng(3).laplace(0, 2, 3000)
    a = interval_analysis(x)
    assert a.family == "laplace"
    assert a.params["scale"] == pytest.approx(2.0, abs=0.15)
    assert a.mean_log_likelihood["exponential"] is None
    assert a.ks_distance < 0.05


def test_selects_exponential_for_one_sided_data():
    x = np.random.default_rng(4).exponential(1 / 1.5, 3000)
    a = interval_analysis(x)
    assert a.family == "exponential"
    assert a.params["rate"] == pytest.approx(1.5, abs=0.1)
    ll = a.mean_log_likelihood
    assert ll["exponential"] > ll["laplace"]
    assert a.log_likelihood == pytest.approx(np.sum(stats.expon.logpdf(x, scale=1 / a.params["rate"])))
    neg = interval_analysis(-x)
    assert neg.family == "exponential"
    assert neg.params["rate"] == pytest.approx(a.params["rate"])


@pytest.mark.parametrize("x", [[1.0] * 30, [0, 1] * 5, [0.0] * 25, [1.0, np.inf] * 15])
def test_interval_analysis_rejects(x):
    with pytest.raises(ValueError):
        interval_analysis(x)


def test_bootstrap_reproducible_and_brackets():
    x = np.random.default_rng(5).laplace(0, 2, 500)
    a = interval_param_bootstrap(x, 300, seed=9)
    assert a == interval_param_bootstrap(x, 300, seed=9)
    for est, lo, hi in a.values():
        assert lo <= est <= hi
    e = interval_param_bootstrap(np.abs(x) + 0.1, 300, seed=9)
    assert set(e) == {"rate"}
    forced = interval_param_bootstrap(np.abs(x) + 0.1, 300, seed=9, family="laplace")
    assert set(forced) == {"location", "scale"}
    with pytest.raises(ValueError):
        interval_param_bootstrap(x, 50)
    with pytest.raises(ValueError):
        interval_param_bootstrap(x, 200, family="normal")


def test_sign_symmetry_and_two_point():
    x = np.random.default_rng(6).laplace(0.7, 1.3, 400)
    a, b = interval_analysis(x), interval_analysis(-x)
    assert b.params["scale"] == pytest.approx(a.params["scale"], abs=1e-12)
    assert b.params["location"] == pytest.approx(-a.params["location"], abs=1e-12)
    two = interval_analysis([-1, 1] * 15)
    assert two.family == "laplace"
    assert two.params["location"] == 0.0
    lam = fit_exponential(x)
    assert lam * np.abs(x[x != 0]).mean() == pytest.approx(1.0, abs=1e-15)
