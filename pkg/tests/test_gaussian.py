import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ceoleak import gaussian as gb
from ceoleak.geometry import RateTuple, evaluate

INF = math.inf
TWO_PI_E = 2 * math.pi * math.e
ROW1 = gb.GaussianCeoParams(2.0, 1.0, 1.0)
ROW3 = gb.GaussianCeoParams(5.0, 1.0, 1.0)


def pair(S, K):
    return gb.SubsetPair(frozenset(S), frozenset(K))


def hand_variance(sx, s1, s2, active, r1, r2):
    prec = 1 / sx
    if 1 in active:
        prec += (1 - 2 ** (-2 * r1)) / s1
    if 2 in active:
        prec += (1 - 2 ** (-2 * r2)) / s2
    return 1 / prec


# -- constraint family -------------------------------------------------------------

def test_nine_pairs():
    labels = [p.label for p in gb.PAIRS]
    assert len(labels) == 9 == len(set(labels))
    assert "S={},K={}" in labels and "S={1,2},K={2}" in labels
    assert {p.label for p in gb.RATE_DISTORTION_PAIRS} == {
        "S={},K={}", "S={1},K={1}", "S={2},K={2}", "S={1,2},K={1,2}"}
    with pytest.raises(ValueError, match="not a subset"):
        pair({1}, {2})


def test_coefficients_follow_subsets():
    assert pair({1, 2}, {2}).coeffs == (0, 1, 1, 0)
    assert pair({1}, set()).coeffs == (0, 0, 1, 0)
    assert pair(set(), set()).coeffs == (0, 0, 0, 0)


def test_row1_rhs_by_hand_at_r_03():
    r1 = r2 = 0.3
    cs = gb.all_constraints(ROW1, gb.AuxRates(r1, r2), gb.LOGLOSS)
    assert len(cs) == 9
    for p in gb.PAIRS:
        v = hand_variance(2, 1, 1, p.Sc, r1, r2)
        expected = sum(r1 if k == 1 else r2 for k in p.K) + 0.5 * math.log2(TWO_PI_E * v)
        assert cs[p.label].rhs == pytest.approx(expected, abs=1e-13), p.label
    # with both agents dropped only the prior variance remains
    assert cs["S={1,2},K={}"].rhs == pytest.approx(0.5 * math.log2(TWO_PI_E * 2), abs=1e-13)


def test_quadratic_l1_only_constraint_example():
    # sigma_x^2 = 2, r2 = 0.5: D >= 2^{-2 L1} / (1/2 + 1/2)
    for L1 in (0.0, 0.3, 1.0):
        b = gb.distortion_bounds(ROW1, 0.7, 0.5, 0.0, 0.0, L1, 0.0, gb.QUADRATIC)
        assert float(b["S={1},K={}"]) == pytest.approx(2 ** (-2 * L1), abs=1e-14)


def test_infinite_rates_reach_noise_floor():
    cs = gb.all_constraints(ROW1, gb.AuxRates(INF, INF))
    floor = 0.5 * math.log2(TWO_PI_E / (1 / 2 + 1 + 1))
    assert cs["S={},K={}"].rhs == pytest.approx(floor, abs=1e-14)
    assert cs["S={1},K={1}"].rhs == INF


def test_metric_validation():
    with pytest.raises(ValueError, match="metric"):
        gb.all_constraints(ROW1, gb.AuxRates(0.1, 0.1), "absolute")
    with pytest.raises(ValueError):
        gb.AuxRates(-0.1, 0)
    with pytest.raises(ValueError):
        gb.GaussianCeoParams(0, 1, 1)


@settings(max_examples=60, deadline=None)
@given(st.floats(0, 3), st.floats(0, 3), st.floats(0.01, 1), st.sampled_from(gb.PAIRS),
       st.sampled_from(gb.METRICS))
def test_rhs_monotonicity(r1, r2, bump, p, metric):
    base = gb.gaussian_rhs(ROW3, gb.AuxRates(r1, r2), p, metric).rhs
    for k in (1, 2):
        up = gb.AuxRates(r1 + bump if k == 1 else r1, r2 + bump if k == 2 else r2)
        v = gb.gaussian_rhs(ROW3, up, p, metric).rhs
        if k in p.K:
            assert v > base
        elif k in p.Sc:
            assert v <= base + 1e-12
        else:
            assert v == pytest.approx(base, abs=1e-14)


# -- conversions and closed forms ------------------------------------------------------

def test_beta_r_examples():
    assert gb.beta_to_r(1.0, 1.0) == pytest.approx(0.5, abs=1e-15)
    assert gb.beta_to_r(3.0, 3.0) == pytest.approx(0.5, abs=1e-15)
    assert gb.r_to_beta(1.0, 1.0) == pytest.approx(1 / 3, abs=1e-15)
    assert gb.r_to_beta(1.0, 0.0) == INF and gb.beta_to_r(1.0, INF) == 0.0
    with pytest.raises(ValueError):
        gb.beta_to_r(1.0, 0.0)
    with pytest.raises(ValueError):
        gb.r_to_beta(1.0, -1.0)


def test_beta_round_trip():
    for beta in np.logspace(-6, 6, 1001):
        back = gb.r_to_beta(1.0, gb.beta_to_r(1.0, beta))
        assert abs(back - beta) / beta < 1e-10


def test_cond_entropy_examples():
    hx = 0.5 * math.log2(TWO_PI_E * 2)
    assert gb.gaussian_cond_entropy(ROW1, set(), gb.AuxRates(1, 1)) == pytest.approx(hx, abs=1e-14)
    assert gb.gaussian_cond_entropy(ROW1, {1}, gb.AuxRates(0, 0)) == pytest.approx(hx, abs=1e-14)
    # r1 = inf on agent 1 alone: h(X|Y1), posterior variance (1/2 + 1)^{-1}
    assert gb.gaussian_cond_entropy(ROW1, {1}, gb.AuxRates(INF, 0)) == pytest.approx(
        0.5 * math.log2(TWO_PI_E * 2 / 3), abs=1e-14)


@settings(max_examples=100, deadline=None)
@given(st.floats(0, 50))
def test_cond_entropy_bracket(r):
    hx = 0.5 * math.log2(TWO_PI_E * 5)
    hxy = 0.5 * math.log2(TWO_PI_E / (1 / 5 + 1))
    h = gb.gaussian_cond_entropy(ROW3, {1}, gb.AuxRates(r, 0))
    assert hxy - 1e-12 <= h <= hx + 1e-12


# -- optimizer -------------------------------------------------------------------------

def test_golden_min_on_kinked_function():
    x, fx = gb.golden_min(lambda t: abs(t - 0.3) + 0.1, 0.0, 1.0, 1e-12)
    assert x == pytest.approx(0.3, abs=1e-10) and fx == pytest.approx(0.1, abs=1e-10)


def brute_min(params, R1, R2, L1, L2, metric, top=3.0, n=1501):
    r = np.linspace(0, top, n)
    best = INF
    for chunk in np.array_split(r, 10):
        vals = gb.min_distortion_at(params, chunk[:, None], r[None, :], R1, R2, L1, L2, metric)
        best = min(best, float(vals.min()))
    return best, top / (n - 1)


@pytest.mark.parametrize("metric", gb.METRICS)
@pytest.mark.parametrize("R1,R2,L1,L2", [(0.5, 0.5, 0.2, INF), (1.0, 0.5, 0.6, INF),
                                          (0.4, 0.8, 0.1, 0.3), (0.5, 0.5, INF, INF)])
def test_min_distortion_against_brute_grid(metric, R1, R2, L1, L2):
    row = gb.min_distortion(ROW1, R1, R2, L1, None if L2 == INF else L2, metric)
    brute, h = brute_min(ROW1, R1, R2, L1, L2, metric)
    # the brute grid can only do worse, by at most a Lipschitz constant times the step
    lip = 3.0 if metric == gb.LOGLOSS else 8.0
    assert row.min_D <= brute + 1e-12
    assert brute - row.min_D <= lip * h
    assert float(gb.min_distortion_at(ROW1, row.r1, row.r2, R1, R2, L1, L2, metric)) == \
        pytest.approx(row.min_D, abs=1e-12)


@pytest.mark.parametrize("metric", gb.METRICS)
def test_membership_against_grid(metric):
    rng = np.random.default_rng(11)
    r = np.linspace(0, 4, 2001)
    for _ in range(6):
        R1, R2, L1, L2 = rng.uniform(0, 1.2, 4)
        d_min = gb.min_distortion(ROW1, R1, R2, L1, L2, metric).min_D
        for D in (d_min * 1.05 + 1e-3, max(d_min - 0.05, 1e-3)):
            p = RateTuple(R1, R2, L1, L2, D)
            res = gb.membership(ROW1, p, metric)
            worst = gb.min_distortion_at(ROW1, r[:, None], r[None, :], R1, R2, L1, L2, metric)
            grid_ok = bool((worst <= D).any())
            if grid_ok:
                assert res.verdict
            if res.verdict:
                cs = gb.all_constraints(ROW1, res.witness, metric)
                assert evaluate(cs, p).verdict
            else:
                assert not grid_ok and res.max_violation > 0
            assert res.verdict == (D >= d_min - 1e-9)


def test_quadratic_membership_rejects_zero_distortion():
    res = gb.membership(ROW1, RateTuple(5, 5, 5, 5, 0), gb.QUADRATIC)
    assert not res.verdict and "D > 0" in res.message


# -- curves ---------------------------------------------------------------------------

def test_rate_distortion_reduction():
    for metric in gb.METRICS:
        full = gb.min_distortion(ROW1, 0.5, 0.5, INF, None, metric).min_D
        rd = gb.min_distortion(ROW1, 0.5, 0.5, INF, None, metric,
                               pairs=gb.RATE_DISTORTION_PAIRS).min_D
        assert full == pytest.approx(rd, abs=1e-9)


def test_useless_observations_saturate_immediately():
    params = gb.GaussianCeoParams(2.0, 1e9, 1e9)
    sat = gb.saturation_analysis(params, 0.5, 0.5, grid=gb.l1_grid(0, 1, 0.25))
    assert sat.l1_star == 0.0


@pytest.mark.parametrize("metric", gb.METRICS)
def test_curve_nonincreasing_and_more_rate_helps(metric):
    grid = gb.l1_grid(0, 1.5, 0.1)
    low = gb.leakage_curve(ROW1, 0.5, 0.5, grid, metric)
    high = gb.leakage_curve(ROW1, 1.0, 0.5, grid, metric)
    d = [r.min_D for r in low]
    assert all(b <= a + 1e-9 for a, b in zip(d, d[1:]))
    assert all(h.min_D <= l.min_D + 1e-9 for h, l in zip(high, low))


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 1.5), st.floats(0, 1.5), st.floats(0, 1), st.floats(0.01, 0.5))
def test_min_distortion_nonincreasing_in_rates(R1, R2, L1, bump):
    base = gb.min_distortion(ROW1, R1, R2, L1).min_D
    assert gb.min_distortion(ROW1, R1 + bump, R2, L1).min_D <= base + 1e-9
    assert gb.min_distortion(ROW1, R1, R2, L1 + bump).min_D <= base + 1e-9


def test_parallel_curve_matches_serial():
    grid = gb.l1_grid(0, 0.4, 0.1)
    serial = gb.leakage_curve(ROW1, 0.5, 0.5, grid, workers=1)
    parallel = gb.leakage_curve(ROW1, 0.5, 0.5, grid, workers=2)
    assert serial == parallel


def test_worker_count_env(monkeypatch):
    monkeypatch.setenv("CEOLEAK_WORKERS", "3")
    assert gb.worker_count() == 3
    monkeypatch.setenv("CEOLEAK_WORKERS", "x")
    with pytest.raises(ValueError):
        gb.worker_count()
