import math
import random
import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from heatcontent.asymptotics import (Column, IllConditionedWarning, build_log_template,
                                     build_template, column_label, compare, custom_template,
                                     fit_series, ball_prediction)
from heatcontent.errors import FitError, TemplateError
from heatcontent.heat_content import QSample
from heatcontent.special_fns import c_coef


def _samples(tmpl, coef, ts, err=0.0):
    y = tmpl.design(ts) @ np.asarray(coef)
    return [QSample(float(t), float(v), err) for t, v in zip(ts, y)]


def test_generic_template_exponents():
    tm = build_template((0.7, 0.8), 2, 1)
    assert tm.exponents == pytest.approx([-0.25, 0.0, 0.25, 0.75, 1.0])
    assert not tm.has_log
    assert tm.origins["t^-0.25"] == "boundary j=0"
    assert tm.origins["t^1"] == "interior n=1"


def test_template_refusals():
    with pytest.raises(TemplateError, match="log"):
        build_template((0.5, 0.5), 2, 1)
    with pytest.raises(TemplateError):
        build_template((1.0, 1.0), 2, 1)
    with pytest.raises(TemplateError, match="collide"):
        build_template((0.25, 0.75 + 1e-7), 2, 1)
    with pytest.raises(TemplateError):
        build_template((0.7, 0.8), -1, 1)
    with pytest.raises(TemplateError):
        build_log_template(7)
    with pytest.raises(TemplateError):
        custom_template([0.5, 0.5])


def test_log_template():
    assert build_log_template(0).labels == ["t^0 log(1/t)", "t^0"]
    assert build_log_template(1).labels == ["t^0 log(1/t)", "t^0", "t^0.5 log(1/t)", "t^0.5"]
    assert build_log_template(0).has_log
    assert Column(0.0, 1)(1.0) == 0.0


def test_column_label_normalises():
    assert column_label(-0.0) == "t^0"
    assert column_label((2 - 3.2) / 2) == "t^-0.6"
    assert column_label(0.5, 1) == "t^0.5 log(1/t)"


def test_guard_columns():
    tm = build_template((1.8, 1.4), 2, 1).with_guard([2])
    assert "t^2" in tm.labels and tm.origins["t^2"] == "guard"


def test_exact_recovery_generic():
    tm = build_template((0.7, 0.8), 2, 1)
    coef = [1.5, -2.0, 3.0, 0.25, -4.0]
    fit = fit_series(_samples(tm, coef, np.logspace(-4, -1, 25)), tm)
    assert np.allclose(fit.coef, coef, rtol=1e-10, atol=1e-10)
    assert fit.n_samples == 25


def test_exact_recovery_log():
    tm = build_log_template(0)
    ts = np.logspace(-5, -2, 10)
    samples = [QSample(float(t), 2 * math.log(1 / t) + 7, 0.0) for t in ts]
    fit = fit_series(samples, tm)
    assert fit.get(0.0, 1) == pytest.approx(2.0, abs=1e-10)
    assert fit.get(0.0) == pytest.approx(7.0, abs=1e-10)


def test_order_invariance():
    tm = build_log_template(1)
    s = _samples(tm, [1.0, -2.0, 0.5, 3.0], np.logspace(-4, -2, 12))
    shuffled = s[:]
    random.Random(3).shuffle(shuffled)
    assert np.array_equal(fit_series(s, tm).coef, fit_series(shuffled, tm).coef)


def test_weights_downweight_noisy_points():
    tm = custom_template([0.0, 0.5])
    ts = np.logspace(-4, -2, 12)
    s = _samples(tm, [1.0, 2.0], ts, err=1e-12)
    bad = s[5]
    s[5] = QSample(bad.t, bad.value + 1.0, 1e6)
    fit = fit_series(s, tm)
    assert fit.coef == pytest.approx([1.0, 2.0], rel=1e-6)


def test_fit_errors():
    tm = custom_template([0.0, 0.5])
    with pytest.raises(FitError):
        fit_series([QSample(0.1, 1.0, 0.0)] * 3, tm)
    ts = np.logspace(-3, -1, 6)
    s = _samples(tm, [1.0, 2.0], ts)
    with pytest.raises(FitError):
        fit_series(s[:-1] + [QSample(s[0].t, 1.0, 0.0)], tm)
    with pytest.raises(FitError):
        fit_series(s[:-1] + [QSample(0.2, math.nan, 0.0)], tm)


def test_ill_conditioned_warning():
    tm = custom_template([0.0, 1e-5, 2e-5, 3e-5])
    with pytest.warns(IllConditionedWarning):
        fit_series(_samples(tm, [1.0] * 4, np.logspace(-3, -1, 10)), tm)


def test_compare_and_report():
    tm = custom_template([0.0, 0.5])
    fit = fit_series(_samples(tm, [1.0, 2.0], np.logspace(-3, -1, 8)), tm)
    rep = compare(fit, {0.0: 1.0, "t^0.5": 2.2}, {0.0: 1e-8, "t^0.5": 0.05})
    assert [r.passed for r in rep.rows] == [True, False]
    assert not rep.passed
    assert "FAIL" in rep.as_text()
    assert rep.as_csv().splitlines()[0] == "term,fitted,predicted,rel_err,tol,passed"
    info = compare(fit, {(0.5, 0): 3.0})
    assert info.passed and info.rows[0].tol is None
    with pytest.raises(TemplateError):
        compare(fit, {1.0: 1.0})


def test_ball_prediction_keys():
    pred = ball_prediction((1.8, 1.4))
    assert set(pred) == {"t^-1.1", "t^-0.6", "t^-0.1", "t^0", "t^1"}
    assert pred["t^-1.1"] == pytest.approx(4 * math.pi * c_coef((1.8, 1.4)), rel=1e-15)


def test_to_dict_round_trip():
    tm = custom_template([0.0, 0.5])
    fit = fit_series(_samples(tm, [1.0, 2.0], np.logspace(-3, -1, 8)), tm)
    d = fit.to_dict()
    assert d["coefficients"]["t^0.5"] == pytest.approx(2.0)
    assert d["n_samples"] == 8


@settings(max_examples=40, deadline=None)
@given(st.lists(st.floats(-10, 10), min_size=6, max_size=6), st.integers(0, 2))
def test_recovery_in_span(coef, which):
    tm = [build_template((0.7, 0.8), 2, 1).with_guard([2]), build_log_template(2),
          custom_template([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])][which]
    assert len(tm) == 6
    coef = np.array(coef)
    if np.max(np.abs(coef)) < 1e-3:
        return
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IllConditionedWarning)
        fit = fit_series(_samples(tm, coef, np.logspace(-4, -1, 30)), tm)
    assert np.max(np.abs(fit.coef - coef)) <= 1e-9 * np.max(np.abs(coef))
