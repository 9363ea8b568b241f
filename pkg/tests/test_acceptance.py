"""The nine acceptance criteria, each at its stated tolerance and runtime budget.

Every test appends one pass/fail line that pytest prints in its summary.
"""

import time

import mpmath as mp
import pytest

import conftest
import oracles
from heatcontent import heat_content as hc
from heatcontent import verify as v


def _record(number, name, passed, elapsed, budget):
    ok = passed and elapsed <= budget
    line = f"criterion {number} [{'PASS' if ok else 'FAIL'}] {name} ({elapsed:.1f}s, budget {budget:g}s)"
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def _run(number, budget, fn):
    t0 = time.perf_counter()
    check = fn()
    elapsed = time.perf_counter() - t0
    print(check.as_text())
    assert _record(number, check.name, check.passed, elapsed, budget), check.as_text()


def test_criterion_1_c_continuation():
    _run(1, 10, v.check_c_paths)


def test_criterion_2_smooth_anchor():
    _run(2, 120, v.check_smooth)


def test_criterion_3_ball_expansion():
    _run(3, 300, v.check_ball_fit)


def test_criterion_4_epsilon_algebra():
    _run(4, 5, v.check_epsilon)


@pytest.mark.parametrize("pair", v.LOG_PAIRS)
def test_criterion_5_log_case(pair):
    _run(5, 300, lambda: v.check_log_case(pair))


def test_criterion_6_interval_halfline():
    _run(6, 60, v.check_gap)


def test_criterion_7_kernel_properties():
    _run(7, 30, v.check_kernels)


def test_criterion_8_radial_oracle():
    # independent mpmath oracle from tests/oracles.py, not the package's own series
    t0 = time.perf_counter()
    ts = (0.01, 0.05)
    worst = 0.0
    lines = []
    for pair in ((1.8, 1.4), (0.5, 0.5), (1.3, -0.3)):
        ref = oracles.q_ball_series(*pair, ts, terms=200)
        for t, r in zip(ts, ref):
            q = hc.q_ball(pair, 1.0, t).value
            err = abs(q - float(r)) / abs(float(r))
            worst = max(worst, err)
            lines.append(f"alpha={pair} t={t}: rel {err:.3e}")
    elapsed = time.perf_counter() - t0
    print("\n".join(lines))
    assert _record(8, "radial reduction vs 200-term eigen series", worst <= 1e-8,
                   elapsed, 60), f"worst {worst:.3e}"


def test_criterion_9_fit_engine():
    _run(9, 1, v.check_fit_engine)
