import math
import warnings

import mpmath as mp
import numpy as np
import pytest

from oucutoff.cutoff import (
    CutoffSchedule,
    PreconditionWarning,
    coupling_bound,
    cutoff_shape_scan,
    cutoff_time,
    distance_Dn,
    distance_dn,
    no_cutoff_scan,
    profile_G,
    profile_scan,
    profile_shift,
    reflect_min,
    scale_ratio,
    shift_in_units,
    theta_window,
    union_bound,
    window_phi,
)
from oucutoff.extremes import GUMBEL, LogCount, default_normalization, tv_affine_pair
from oucutoff.ou import OUParams
from oucutoff.stable import StableLaw

GAUSS = OUParams(1.0, 1.0, StableLaw(2.0, 0.5))
CAUCHY = OUParams(1.0, 1.0, StableLaw(1.0, 1.0))


def _mp_tv_max(n, lam, x0, t, kind="max"):
    """TV between max (or min) of n Gaussian OU marginals at t and at equilibrium, c = 1/2, in raw units."""
    with mp.workdps(30):
        t = mp.mpf(t)
        m = mp.exp(-lam * t) * x0
        s = mp.sqrt((1 - mp.exp(-2 * lam * t)) / (2 * lam))
        s_inf = mp.sqrt(1 / mp.mpf(2 * lam))

        def dens(x, loc, sc):
            z = (x - loc) / sc
            F = mp.ncdf(z) if kind == "max" else mp.ncdf(-z)
            return n * F ** (n - 1) * mp.npdf(z) / sc

        d = lambda x: dens(x, m, s) - dens(x, 0, s_inf)
        # |f - g| has kinks at the crossings: locate them on a grid and split there
        lo, hi = min(m - 15 * s, -15 * s_inf), max(m + 15 * s, 15 * s_inf)
        grid = [lo + (hi - lo) * k / 2000 for k in range(2001)]
        vals = [d(x) for x in grid]
        cuts = [mp.findroot(d, (grid[k], grid[k + 1]), solver="anderson")
                for k in range(2000) if vals[k] * vals[k + 1] < 0]
        edges = [-mp.inf] + cuts + [mp.inf]
        return float(sum(abs(mp.quad(d, [a, m, b] if a < m < b else [a, b])) for a, b in zip(edges[:-1], edges[1:])) / 2)


@pytest.mark.parametrize("t", [1e-9, 1e-3, 0.5, 30.0])
def test_scale_ratio_cancellation_free(t):
    p = OUParams(0.8, 0.0, StableLaw(1.5))
    r, one_minus_r = scale_ratio(p, t)
    with mp.workdps(40):
        rr = (1 - mp.exp(-0.8 * 1.5 * mp.mpf(t))) ** (1 / mp.mpf(1.5))
        assert r == pytest.approx(float(rr), rel=1e-14)
        assert one_minus_r == pytest.approx(float(1 - rr), rel=1e-13)
    assert scale_ratio(p, 0.0) == (0.0, 1.0)
    assert scale_ratio(p, math.inf) == (1.0, 0.0)


def test_window_phi_asymptotics():
    # e^{2 lam t} phi_t -> 1/2
    assert math.exp(40.0) * window_phi(1.0, 20.0) == pytest.approx(0.5, abs=1e-8)
    assert window_phi(1.0, 1e-12) == pytest.approx(1.0 - math.sqrt(2e-12), rel=1e-6)


@pytest.mark.parametrize("ln_n", [5.0, 1e3])
@pytest.mark.parametrize("t", [0.1, 2.0, 8.0])
def test_shift_agrees_with_window_form(ln_n, t):
    count = LogCount(ln_n)
    a = shift_in_units(GAUSS, t, default_normalization(GAUSS.noise, count))
    assert a == pytest.approx(theta_window(GAUSS, count, t), rel=1e-12, abs=1e-12)


@pytest.mark.parametrize("n, t", [(1, 0.4), (3, 0.2), (10, 1.0), (50, 2.0)])
def test_dn_against_raw_mpmath(n, t):
    est = distance_dn(GAUSS, LogCount.from_n(n), t)
    assert est.value == pytest.approx(_mp_tv_max(n, 1.0, 1.0, t), abs=1e-9)


@pytest.mark.parametrize("n, t", [(5, 0.3), (20, 1.0)])
def test_min_via_reflection(n, t):
    est = distance_dn(reflect_min(GAUSS), LogCount.from_n(n), t)
    assert est.value == pytest.approx(_mp_tv_max(n, 1.0, 1.0, t, kind="min"), abs=1e-9)
    assert reflect_min(GAUSS).x0 == -1.0


def test_dn_limits_in_time():
    count = LogCount(10.0)
    assert distance_dn(GAUSS, count, 1e-6).value >= 0.999
    assert distance_dn(GAUSS, count, 50.0).value <= 1e-8
    with pytest.raises(ValueError):
        distance_dn(GAUSS, count, 0.0)


def test_dn_cauchy_small_time():
    assert distance_dn(CAUCHY, LogCount.from_n(100), 1e-6).value >= 0.999


def test_zero_start_symmetry():
    p = GAUSS.with_x0(0.0)
    count = LogCount(20.0)
    a = distance_dn(p, count, 1.0).value
    b = distance_dn(OUParams(1.0, -0.0, StableLaw(2.0, 0.5)), count, 1.0).value
    assert a == b


def test_union_bound_n1_equals_dn():
    count = LogCount(0.0)
    for t in (0.2, 1.0):
        assert union_bound(GAUSS, count, t) == pytest.approx(distance_dn(GAUSS, count, t).value, abs=1e-9)
    assert union_bound(GAUSS, LogCount(1e6), 1.0) == math.inf


def test_profile_shift_constant():
    # with c = 1/2 the derived constant sqrt(2 lam / c) equals 2 sqrt(lam)
    lam, x0, b = 1.7, 0.8, 0.3
    p = OUParams(lam, x0, StableLaw(2.0, 0.5))
    ref = 2 * math.sqrt(lam) * math.exp(-lam * b) * x0 - math.exp(-2 * lam * b)
    assert profile_shift(p, 1.0, b) == pytest.approx(ref, rel=1e-14)
    q = OUParams(lam, x0, StableLaw(2.0, 2.0))
    assert profile_shift(q, 1.0, b) == pytest.approx(math.sqrt(lam) * math.exp(-lam * b) * x0 - math.exp(-2 * lam * b))


@pytest.mark.parametrize("b", [-2.0, -1.0, 0.0, 1.0, 2.0])
def test_profile_G_equals_gumbel_quadrature(b):
    theta = profile_shift(GAUSS, 1.0, b)
    assert profile_G(GAUSS, 1.0, b) == pytest.approx(tv_affine_pair(GUMBEL, theta, 1.0).value, abs=1e-8)


def test_profile_G_limits_and_domain():
    assert profile_G(GAUSS, 1.0, -10.0) > 0.999
    assert profile_G(GAUSS, 1.0, 10.0) < 1e-3
    assert profile_G(GAUSS, 1.0, -1e4) == 1.0
    with pytest.raises(ValueError):
        profile_G(CAUCHY, 1.0, 0.0)
    with pytest.raises(ValueError):
        theta_window(CAUCHY, LogCount(10.0), 1.0)


def test_theta_converges_to_profile_shift():
    b = 0.5
    prev = math.inf
    for ln_n in (1e2, 1e4, 1e6):
        count = LogCount(ln_n)
        t = cutoff_time(GAUSS, count).time_at(b)
        gap = abs(theta_window(GAUSS, count, t) - profile_shift(GAUSS, 1.0, b))
        assert gap < prev
        prev = gap
    assert prev < 1e-3


def test_cutoff_time_and_schedule():
    s = cutoff_time(GAUSS, LogCount(math.e**2), kappa=2.0, window_correction=0.5)
    assert s.t_n == pytest.approx(1.0)
    assert s.time_at(1.0) == pytest.approx(3.5)
    with pytest.raises(ValueError):
        cutoff_time(GAUSS, LogCount(1.0))
    with pytest.raises(ValueError):
        CutoffSchedule(1.0, kappa=0.0)


def test_profile_scan_rows():
    rows = profile_scan(GAUSS, [LogCount(10.0), LogCount(100.0)], [-2.0, 0.0])
    assert [(r.ln_n, r.b) for r in rows] == [(10.0, -2.0), (10.0, 0.0), (100.0, -2.0), (100.0, 0.0)]
    # t_n + b is negative for ln n = 10, b = -2: recorded, not raised
    assert rows[0].error and rows[0].d_n is None
    assert all(not r.error for r in rows[1:])
    assert rows[1].G_b == rows[3].G_b


def test_coupling_inequality_small_grid():
    count = LogCount(50.0)
    bound = coupling_bound(GAUSS, count)
    for b in (-1.0, 0.0, 1.0):
        t = cutoff_time(GAUSS, count).time_at(b)
        d, D = distance_dn(GAUSS, count, t), distance_Dn(GAUSS, count, t)
        assert abs(d.value - D.value) <= bound.value + 3 * (d.error_bound + D.error_bound + bound.error_bound)


def test_Dn_cauchy_uses_frechet():
    # D_n at t -> inf vanishes, at small t it is near one
    count = LogCount.from_n(1000)
    assert distance_Dn(CAUCHY, count, 40.0).value < 1e-8
    assert distance_Dn(CAUCHY, count, 1e-6).value > 0.999


def test_shape_scan_and_warning():
    rows = cutoff_shape_scan(GAUSS, LogCount(1e4), [0.5, 1.0, 2.0])
    vals = [e.value for _, e in rows]
    assert vals[0] > vals[1] > vals[2]
    with pytest.warns(PreconditionWarning):
        cutoff_shape_scan(CAUCHY, LogCount(10.0), [1.0])
    with pytest.raises(ValueError):
        cutoff_shape_scan(GAUSS, LogCount(0.5), [1.0])


def test_no_cutoff_scan_flags():
    sched = {LogCount.from_n(10**k): math.log(math.log(10**k)) for k in (2, 4)}
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        rows = no_cutoff_scan(CAUCHY, sched)
    assert rows[0][1].value > rows[1][1].value
    with pytest.warns(PreconditionWarning):
        no_cutoff_scan(CAUCHY, {LogCount.from_n(100): 1.0, LogCount.from_n(1000): 1.0})
    with pytest.warns(PreconditionWarning):
        no_cutoff_scan(GAUSS, sched)
