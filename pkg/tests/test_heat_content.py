import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatcontent.errors import DomainError
from heatcontent.heat_content import (CutoffFunction, GridError, QSample, bump_cutoff,
                                      chi_log_integral, default_workers, log_case_prediction,
                                      q_ball, q_ball_eigen, q_grid, q_halfline, q_interval,
                                      q_interval_gap)
from heatcontent.special_fns import log_case_constant

# eigen series with closed-form Fourier coefficients, 40 digits (tests/oracles.py)
BALL_ORACLE = {
    ((1.8, 1.4), 0.01): 6344.7423540332348992,
    ((1.8, 1.4), 0.05): 918.64888508829681142,
    ((0.5, 0.5), 0.01): 13.50943919350017384,
    ((0.5, 0.5), 0.05): 5.8222238928618572917,
    ((1.3, -0.3), 0.01): 18.658584013920894908,
    ((1.3, -0.3), 0.05): 8.8788909659589003448,
}


@pytest.mark.parametrize("key", sorted(BALL_ORACLE))
def test_q_ball_oracle(key):
    ap, t = key
    assert q_ball(ap, 1.0, t).value == pytest.approx(BALL_ORACLE[key], rel=1e-12)


def test_q_ball_eigen_path():
    vals = q_ball_eigen((1.8, 1.4), 1.0, [0.01, 0.05], terms=200)
    assert vals[0] == pytest.approx(BALL_ORACLE[((1.8, 1.4), 0.01)], rel=1e-12)
    assert vals[1] == pytest.approx(BALL_ORACLE[((1.8, 1.4), 0.05)], rel=1e-12)


def test_q_ball_scaling():
    # Q_{B_lam}(lam^2 t) = lam^(3 - s) Q_{B_1}(t)
    lam, t, ap = 1.7, 0.02, (0.5, 0.9)
    lhs = q_ball(ap, lam, lam * lam * t).value
    assert lhs == pytest.approx(lam ** (3 - 1.4) * q_ball(ap, 1.0, t).value, rel=1e-11)


@pytest.mark.parametrize("a,t", [(1.0, 1e-3), (1.0, 1e-2), (2.5, 0.05)])
def test_smooth_interval_closed_form(a, t):
    # exponentially small corrections only
    q = q_interval((0.0, 0.0), None, None, a, t)
    assert q.value == pytest.approx(a - 4 * math.sqrt(t / math.pi), rel=1e-12)
    assert q.err < 1e-9


def test_swap_symmetry_bit_exact():
    c1, c2 = bump_cutoff(0.1, 0.2), bump_cutoff(0.05, 0.3)
    for t in (1e-4, 3e-3):
        a = q_interval((0.3, 0.6), c1, c2, 1.0, t).value
        b = q_interval((0.6, 0.3), c2, c1, 1.0, t).value
        assert a == b
    assert q_ball((1.8, 1.4), 1.0, 0.01).value == q_ball((1.4, 1.8), 1.0, 0.01).value


def test_interval_equals_twice_halfline_for_small_t():
    chi = bump_cutoff(0.1, 0.2)
    qi = q_interval((0.5, 0.5), chi, chi, 1.0, 0.005).value
    qh = q_halfline((0.5, 0.5), chi, chi, 0.005).value
    assert abs(qi - 2 * qh) <= 1e-8 * qi


def test_gap_matches_difference_when_resolvable():
    chi = bump_cutoff(0.3, 0.49)
    t = 0.005
    gap = q_interval_gap((0.5, 0.5), chi, chi, 1.0, t).value
    diff = q_interval((0.5, 0.5), chi, chi, 1.0, t).value - 2 * q_halfline((0.5, 0.5), chi, chi, t).value
    assert gap == pytest.approx(diff, rel=1e-8)


def test_gap_decreases_with_length():
    chi = bump_cutoff(0.1, 0.2)
    gaps = [abs(q_interval_gap((0.5, 0.5), chi, chi, a, 0.005).value) for a in (1.0, 2.0, 4.0)]
    assert gaps[0] > gaps[1] > gaps[2] > 0


def test_halfline_scaling():
    # Q_H(alpha; chi(./lam); lam^2 t) = lam^(1 - s) Q_H(alpha; chi; t)
    lam, t, ap = 2.0, 1e-3, (0.3, 0.4)
    base = q_halfline(ap, bump_cutoff(0.1, 0.2), bump_cutoff(0.05, 0.25), t).value
    big = q_halfline(ap, bump_cutoff(0.2, 0.4), bump_cutoff(0.1, 0.5), lam * lam * t).value
    assert big == pytest.approx(lam ** (1 - 0.7) * base, rel=1e-11)


def test_q_interval_errors():
    chi = bump_cutoff(0.1, 0.2)
    with pytest.raises(DomainError):
        q_interval((0.5, 0.5), chi, None, 1.0, 0.01)
    with pytest.raises(DomainError):
        q_interval((0.5, 0.5), chi, chi, 0.3, 0.01)
    with pytest.raises(DomainError):
        q_interval((0.5, 0.5), chi, chi, 1.0, -1.0)
    with pytest.raises(DomainError):
        q_ball((0.5, 0.5), 0.0, 0.01)


def test_cutoff_shape():
    chi = CutoffFunction(0.1, 0.3)
    x = np.linspace(0, 0.5, 501)
    y = chi(x)
    assert np.all(y[x <= 0.1] == 1.0) and np.all(y[x >= 0.3] == 0.0)
    assert np.all(np.diff(y) <= 0)
    assert chi(0.2) == pytest.approx(0.5)
    # derivatives of order 1 / width, not steeper
    assert np.max(np.abs(np.diff(y) / np.diff(x))) < 10.0 / 0.2


def test_cutoff_equality_and_errors():
    assert bump_cutoff(0.1, 0.2) == CutoffFunction(0.1, 0.2)
    assert hash(bump_cutoff(0.1, 0.2)) == hash(CutoffFunction(0.1, 0.2))
    assert bump_cutoff(0.1, 0.2) != bump_cutoff(0.1, 0.25)
    with pytest.raises(DomainError):
        CutoffFunction(0.2, 0.1)
    with pytest.raises(DomainError):
        CutoffFunction(0.0, 0.1)


def _mp_bump(x, ei, eo):
    if x <= ei:
        return mp.mpf(1)
    if x >= eo:
        return mp.mpf(0)
    w = eo - ei
    up, down = mp.exp(-w / (eo - x)), mp.exp(-w / (x - ei))
    return up / (up + down)


def test_chi_log_integral_oracle():
    mp.mp.dps = 30
    c1, c2 = bump_cutoff(0.1, 0.3), bump_cutoff(0.15, 0.4)
    f = lambda x: _mp_bump(x, 0.1, 0.3) * _mp_bump(x, 0.15, 0.4) / x
    ref = 2 * mp.quad(f, [0.1, 0.15, 0.3, 0.4, 0.5])
    assert chi_log_integral(c1, c2, 1.0) == pytest.approx(float(ref), rel=1e-13)


def test_log_case_prediction():
    chi = bump_cutoff(0.2, 0.45)
    slope, const = log_case_prediction((0.5, 0.5), chi, chi, 1.0)
    assert slope == 1.0
    expected = 2 * math.log(0.2) + log_case_constant(0.5, chi_log_integral(chi, chi, 1.0))
    assert const == pytest.approx(expected, rel=1e-15)
    with pytest.raises(DomainError):
        log_case_prediction((0.5, 0.4), chi, chi, 1.0)


def test_log_case_epsilon_is_fictitious():
    # enlarging the region where chi = 1 changes both pieces but not Q
    c1, c2 = bump_cutoff(0.1, 0.3), bump_cutoff(0.2, 0.3)
    t = 1e-6
    for chi in (c1, c2):
        q = q_interval((0.5, 0.5), chi, chi, 1.0, t).value
        _, const = log_case_prediction((0.5, 0.5), chi, chi, 1.0)
        # remainder is O(t) with a modest coefficient for these cutoffs
        assert q == pytest.approx(math.log(1 / t) + const, abs=5e-4)


def test_q_grid_order_and_threads(monkeypatch):
    ts = [0.3, 0.1, 0.2]
    f = lambda t: QSample(t, 2 * t, 0.0)
    assert [s.t for s in q_grid(f, ts, workers=3)] == ts
    assert q_grid(f, ts, workers=3) == q_grid(f, ts, workers=1)
    assert q_grid(f, []) == []
    monkeypatch.setenv("HC_THREADS", "2")
    assert default_workers() == 2
    monkeypatch.setenv("HC_THREADS", "0")
    assert default_workers() >= 1
    monkeypatch.setenv("HC_THREADS", "x")
    with pytest.raises(DomainError):
        default_workers()


def test_q_grid_collects_failures():
    def f(t):
        if t > 0.15:
            raise ValueError("boom")
        return QSample(t, t, 0.0)
    with pytest.raises(GridError) as info:
        q_grid(f, [0.1, 0.2, 0.3], workers=2)
    assert [i for i, _, _ in info.value.failures] == [1, 2]


def test_q_grid_rejects_bad_t():
    with pytest.raises(DomainError):
        q_grid(lambda t: QSample(t, t, 0.0), [0.1, 0.0])


@settings(max_examples=15, deadline=None)
@given(st.floats(-0.9, 0.9), st.floats(-0.9, 0.9), st.floats(1e-4, 1e-2))
def test_interval_positive_and_swap_symmetric(a1, a2, t):
    chi = bump_cutoff(0.1, 0.2)
    q = q_interval((a1, a2), chi, chi, 1.0, t).value
    assert q > 0
    assert q_interval((a2, a1), chi, chi, 1.0, t).value == q
