import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats

from oucutoff import stable
from oucutoff.rng import RandomStream
from oucutoff.stable import StableLaw, from_sigma

mp.mp.dps = 25


def _mp_series(alpha, x, kind):
    """Convergent power series of the standard law, summed at 60 digits.

    For ``alpha < 1`` the expansion at infinity converges for every ``x > 0``;
    for ``alpha > 1`` the expansion at zero converges everywhere. Neither
    shares code or representation with the library's integral route.
    """
    with mp.workdps(60):
        x, a = mp.mpf(x), mp.mpf(alpha)
        if x == 0 and kind == "pdf":
            return float(mp.gamma(1 + 1 / a) / mp.pi)
        total = mp.mpf(0)
        recent = []
        for k in range(0, 5000):
            if alpha < 1:
                k1 = k + 1
                g = mp.gamma(k1 * a + (1 if kind == "pdf" else 0)) / mp.factorial(k1) * mp.sin(k1 * mp.pi * a / 2)
                term = (-1) ** k * g * x ** (-k1 * a - (1 if kind == "pdf" else 0))
            else:
                if kind == "pdf":
                    term = (-1) ** k * mp.gamma((2 * k + 1) / a) / mp.factorial(2 * k) * x ** (2 * k) / a
                else:
                    term = -((-1) ** k) * mp.gamma((2 * k + 1) / a) / mp.factorial(2 * k + 1) * x ** (2 * k + 1) / a
            total += term
            # some terms vanish identically, so judge convergence on a window
            recent = (recent + [abs(term)])[-8:]
            if k > 10 and max(recent) < mp.mpf(10) ** -40 * abs(total):
                break
        else:
            raise RuntimeError("series did not converge")
        total /= mp.pi
        if kind == "sf" and alpha > 1:
            total += mp.mpf(0.5)
        return float(total)


def _mp_pdf(alpha, x):
    return _mp_series(alpha, x, "pdf")


def _mp_sf(alpha, x):
    return _mp_series(alpha, x, "sf")


def _mp_series_sf(alpha, x, terms=60):
    # Bergstrom expansion at infinity, summed until its terms stop shrinking
    x, alpha = mp.mpf(x), mp.mpf(alpha)
    total, prev = mp.mpf(0), mp.inf
    for k in range(1, terms):
        term = (-1) ** (k + 1) * mp.gamma(k * alpha) / mp.factorial(k) * mp.sin(k * mp.pi * alpha / 2) * x ** (-k * alpha)
        if abs(term) > prev:
            break
        total += term
        prev = abs(term)
    return float(total / mp.pi)


def test_law_validation():
    with pytest.raises(ValueError):
        StableLaw(0.0)
    with pytest.raises(ValueError):
        StableLaw(2.1)
    with pytest.raises(ValueError):
        StableLaw(1.5, 0.0)


def test_sigma_roundtrip():
    law = from_sigma(1.5, 2.0)
    assert law.c == pytest.approx(2.0**1.5)
    assert law.sigma == pytest.approx(2.0)


def test_char_fn():
    law = StableLaw(1.3, 0.7)
    assert stable.char_fn(law, 2.0) == pytest.approx(math.exp(-0.7 * 2.0**1.3))


def test_gaussian_is_variance_2c():
    law = StableLaw(2.0, 0.5)
    xs = np.linspace(-6, 6, 25)
    np.testing.assert_allclose(stable.density(law, xs), stats.norm.pdf(xs), rtol=1e-14)
    np.testing.assert_allclose(stable.cdf(law, xs), stats.norm.cdf(xs), rtol=1e-13, atol=1e-300)


def test_cauchy_is_scale_c():
    law = StableLaw(1.0, 2.0)
    xs = np.array([-1e6, -3.0, 0.0, 0.5, 7.0, 1e8])
    np.testing.assert_allclose(stable.density(law, xs), stats.cauchy.pdf(xs, scale=2.0), rtol=1e-14)
    np.testing.assert_allclose(stable.log_density(law, xs), stats.cauchy.logpdf(xs, scale=2.0), rtol=1e-13)
    np.testing.assert_allclose(stable.sf(law, xs), stats.cauchy.sf(xs, scale=2.0), rtol=1e-13)


def test_cauchy_log_density_no_overflow():
    assert stable.log_density(StableLaw(1.0), 1e200) == pytest.approx(-math.log(math.pi) - 400 * math.log(10), rel=1e-14)


# each series is used where it converges in a few thousand terms
SERIES_POINTS = [(a, x) for a in (0.5, 0.7, 1.5, 1.9) for x in (0.3, 1.0, 2.5, 6.0)] + [
    (0.9, 2.5), (0.9, 6.0), (0.9, 20.0), (1.1, 0.3), (1.1, 1.0),
]


@pytest.mark.parametrize("alpha, x", SERIES_POINTS + [(1.3, 0.0)])
def test_density_matches_series_oracle(alpha, x):
    assert stable.density(StableLaw(alpha), x) == pytest.approx(_mp_pdf(alpha, x), rel=1e-11)


@pytest.mark.parametrize("alpha, x", SERIES_POINTS)
def test_sf_matches_series_oracle(alpha, x):
    assert stable.sf(StableLaw(alpha), x) == pytest.approx(_mp_sf(alpha, x), rel=1e-11)


@pytest.mark.parametrize("alpha", [0.6, 1.3, 1.7])
@pytest.mark.parametrize("x", [60.0, 1e3, 1e6])
def test_tail_matches_series(alpha, x):
    assert stable.sf(StableLaw(alpha), x) == pytest.approx(_mp_series_sf(alpha, x), rel=1e-11)


@pytest.mark.parametrize("alpha", [0.7, 1.5])
def test_scaling_in_c(alpha):
    law = StableLaw(alpha, 3.0)
    s = law.sigma
    assert stable.density(law, 2.0) == pytest.approx(stable.density(StableLaw(alpha), 2.0 / s) / s, rel=1e-13)


def test_inversion_oracle_agrees():
    law = StableLaw(1.5, 1.0)
    for x in (0.0, 1.0, 3.0):
        assert stable.density_inversion(law, x) == pytest.approx(stable.density(law, x), rel=1e-9)


@pytest.mark.parametrize("alpha", [0.8, 1.5])
def test_tail_constant(alpha):
    law = StableLaw(alpha, 2.0)
    x = 1e8
    assert stable.density(law, x) * x ** (1 + alpha) == pytest.approx(stable.tail_constant(law), rel=1e-6)
    with pytest.raises(ValueError):
        stable.tail_constant(StableLaw(2.0))


def test_stable_constant_cauchy():
    assert stable.stable_constant(1.0) == pytest.approx(1.0 / math.pi, rel=1e-15)


@pytest.mark.parametrize("alpha", [0.7, 1.0, 1.5, 2.0])
def test_cdf_symmetry_and_range(alpha):
    law = StableLaw(alpha)
    xs = np.array([-50.0, -2.0, -0.1, 0.0, 0.1, 2.0, 50.0])
    F = stable.cdf(law, xs)
    np.testing.assert_allclose(F + F[::-1], 1.0, atol=1e-14)
    assert np.all(np.diff(F) > 0)


@pytest.mark.parametrize("alpha", [0.7, 1.5])
def test_table_path_matches_scalar(alpha):
    law = StableLaw(alpha)
    xs = np.linspace(-40, 40, 600)
    vec = stable.log_sf(law, xs)
    ref = np.array([stable.log_sf(law, float(v)) for v in xs[::37]])
    np.testing.assert_allclose(vec[::37], ref, rtol=1e-10, atol=1e-12)


@settings(max_examples=25, deadline=None)
@given(st.sampled_from([0.6, 1.0, 1.5, 2.0]), st.floats(1e-6, 1 - 1e-6))
def test_quantile_roundtrip(alpha, p):
    law = StableLaw(alpha, 0.8)
    assert stable.cdf(law, stable.quantile(law, p)) == pytest.approx(p, rel=1e-9, abs=1e-14)


def test_quantile_domain():
    with pytest.raises(ValueError):
        stable.quantile(StableLaw(1.5), 1.0)


@pytest.mark.parametrize("alpha", [0.6, 1.0, 1.5, 2.0])
def test_sampler_ks(alpha):
    law = StableLaw(alpha, 0.7)
    xs = stable.sample(law, RandomStream(7, (int(alpha * 10),)), 20_000)
    res = stats.kstest(xs, lambda v: stable.cdf(law, v))
    assert res.pvalue > 1e-3


def test_sampler_reproducible():
    law = StableLaw(1.5)
    a = stable.sample(law, RandomStream(1, (3,)), 100)
    b = stable.sample(law, RandomStream(1, (3,)), 100)
    np.testing.assert_array_equal(a, b)
    assert stable.sample(law, RandomStream(1), 0).size == 0
