"""Acceptance checks shared by ``heatcontent verify`` and the test suite.

Each check returns a :class:`Check` whose ``lines`` hold the numbers behind
the verdict.  Reports contain no timings or other run-dependent data, so two
runs of the same suite produce identical text.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import asymptotics as asy
from . import heat_content as hc
from .invariants import epsilon_table, relation_residuals, solve_epsilon
from .kernels1d import Domain1D, kernel
from .quadrature import integrate_1d
from .special_fns import AlphaPair, c_coef

SEED = 20240917

# Q(t) samples of the suites, kept for optional figures
BALL_ALPHA = (1.8, 1.4)
BALL_GRID = (1e-4, 1e-2, 20)
BALL_TOLS = (1e-3, 1e-2, 5e-2)
LOG_PAIRS = ((0.5, 0.5), (1.3, -0.3))
LOG_GRID = (1e-5, 1e-3, 20)
LOG_CUTOFF = (0.3, 0.49)
LOG_ORDER = 5
GAP_CUTOFF = (0.1, 0.2)


@dataclass
class Check:
    name: str
    passed: bool
    lines: list = field(default_factory=list)
    data: dict = field(default_factory=dict, repr=False)

    def as_text(self):
        head = f"[{'PASS' if self.passed else 'FAIL'}] {self.name}"
        return "\n".join([head] + ["    " + ln for ln in self.lines])


@dataclass
class Report:
    suite: str
    checks: list

    @property
    def passed(self):
        return all(c.passed for c in self.checks)

    def as_text(self):
        body = "\n".join(c.as_text() for c in self.checks)
        n_ok = sum(c.passed for c in self.checks)
        return f"{body}\nsuite {self.suite}: {n_ok}/{len(self.checks)} checks passed\n"

    def to_dict(self):
        return {"suite": self.suite, "passed": self.passed,
                "checks": [{"name": c.name, "passed": c.passed, "lines": c.lines}
                           for c in self.checks]}


def _e(x):
    return f"{x:.3e}"


def _random_pairs(rng, n, s_lo, s_hi):
    out = []
    while len(out) < n:
        s = rng.uniform(s_lo, s_hi)
        a1 = rng.uniform(s - 1.6, 1.6)
        out.append(AlphaPair(float(a1), float(s - a1)))
    return out


# -- coefficients ------------------------------------------------------------

def check_c_paths(n=20, seed=SEED):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for ap in _random_pairs(rng, n, 1.05, 1.9):
        x = c_coef(ap)
        y = c_coef(ap, method="direct")
        worst = max(worst, abs(x - y) / abs(y))
    return Check("c continuation vs direct quadrature", worst <= 1e-9,
                 [f"{n} random pairs, s in (1.05, 1.9): max rel err {_e(worst)} (tol 1e-9)"])


def smooth_samples():
    ts = np.logspace(-4, -2, 15)
    return [hc.q_interval((0.0, 0.0), None, None, 1.0, float(t)) for t in ts]


def check_smooth(samples=None):
    exact = -2.0 / math.sqrt(math.pi)
    c00 = c_coef((0.0, 0.0))
    err_c = abs(c00 - exact) / abs(exact)
    samples = samples if samples is not None else smooth_samples()
    fit = asy.fit_series(samples, asy.custom_template([0.0, 0.5, 1.0, 1.5]))
    half = fit.get(0.5)
    err_fit = abs(half - 2.0 * c00) / abs(2.0 * c00)
    ok = err_c <= 1e-8 and err_fit <= 1e-3
    return Check("smooth case anchor", ok, [
        f"c(0,0) = {c00:.17g}, rel err vs -2/sqrt(pi) {_e(err_c)} (tol 1e-8)",
        f"fitted t^0.5 coefficient {half:.17g}, rel err vs 2 c(0,0) {_e(err_fit)} (tol 1e-3)",
    ], {"samples": samples, "fit": fit})


def check_epsilon(n=10, seed=SEED):
    rng = np.random.default_rng(seed + 1)
    worst_id = worst_res = worst_solve = 0.0
    for ap in _random_pairs(rng, n, 1.05, 1.95):
        tab = epsilon_table(ap)
        c11 = c_coef(ap.shifted(1, 1))
        worst_id = max(worst_id, abs(4 * tab[10] + 2 * tab[11] - c11) / max(1.0, abs(c11)))
        worst_res = max(worst_res, max(abs(v) for v in relation_residuals(tab).values()))
        sol, _ = solve_epsilon(ap)
        scale = max(1.0, max(abs(v) for v in tab.eps))
        worst_solve = max(worst_solve, max(abs(a - b) for a, b in zip(sol.eps, tab.eps)) / scale)
    ok = worst_id <= 1e-12 and worst_res <= 1e-12 and worst_solve <= 1e-10
    return Check("epsilon algebra", ok, [
        f"{n} random pairs: 4 eps10 + 2 eps11 - c(a1-1,a2-1): {_e(worst_id)} (tol 1e-12)",
        f"relation residuals at the table: {_e(worst_res)} (tol 1e-12)",
        f"solve_epsilon vs table: {_e(worst_solve)} (tol 1e-10)",
    ])


def check_fit_engine(seed=SEED):
    rng = np.random.default_rng(seed + 2)
    ts = np.logspace(-4, -1, 30)
    cases = [
        ("generic", asy.build_template((0.7, 0.8), 2, 1)),
        ("guarded", asy.build_template((1.8, 1.4), 2, 1).with_guard([2])),
        ("log N=0", asy.build_log_template(0)),
        ("log N=2", asy.build_log_template(2)),
        ("custom", asy.custom_template([0.0, 0.5, 1.0], [1.0])),
    ]
    worst = 0.0
    lines = []
    for name, tm in cases:
        coef = rng.uniform(-5.0, 5.0, len(tm))
        y = tm.design(ts) @ coef
        samples = [hc.QSample(float(t), float(v), 0.0) for t, v in zip(ts, y)]
        fit = asy.fit_series(samples, tm)
        err = float(np.max(np.abs(fit.coef - coef)) / np.max(np.abs(coef)))
        worst = max(worst, err)
        lines.append(f"{name:<8} {len(tm)} columns: max coefficient error {_e(err)}")
    lines.append(f"worst {_e(worst)} (tol 1e-10)")
    return Check("fit engine synthetic recovery", worst <= 1e-10, lines)


# -- kernels -----------------------------------------------------------------

def _dyadic_grid(a, n=50, den=128):
    k = np.unique(np.round(np.linspace(0, den, n)).astype(int))
    return a * k / den


def check_kernels():
    lines = []
    ok = True
    a = 1.0
    ts = (0.001, 0.01, 0.05, 0.2, 1.5)
    x = _dyadic_grid(a)
    X, Y = np.meshgrid(x, x, indexing="ij")
    I, H, R = Domain1D.interval(a), Domain1D.half_line(), Domain1D.full_line()
    sym = refl = mono = 0.0
    neg = 0.0
    for t in ts:
        p = kernel(I, X, Y, t).value
        scale = max(1.0, float(np.max(np.abs(p))))
        sym = max(sym, float(np.max(np.abs(p - kernel(I, Y, X, t).value))) / scale)
        refl = max(refl, float(np.max(np.abs(p - kernel(I, a - X, a - Y, t).value))) / scale)
        ph = kernel(H, X, Y, t).value
        pr = kernel(R, X, Y, t).value
        sym = max(sym, float(np.max(np.abs(ph - kernel(H, Y, X, t).value))) / scale)
        neg = max(neg, float(np.max(-p)))
        mono = max(mono, float(np.max(p - ph)), float(np.max(ph - pr)))
    ok &= sym <= 1e-14 and refl <= 1e-14 and neg <= 1e-14 and mono <= 1e-14
    lines.append(f"symmetry {_e(sym)}, reflection {_e(refl)} (tol 1e-14)")
    lines.append(f"monotonicity 0 <= p_I <= p_H <= p_R on {len(x)}x{len(x)}x{len(ts)}: "
                 f"worst violation {_e(max(neg, mono))} (slack 1e-14)")

    # semigroup: int p(x, z; s) p(z, y; u) dz = p(x, y; s + u)
    semi = 0.0
    for s, u in ((0.01, 0.02), (0.05, 0.05), (0.3, 0.9)):
        for xx, yy in ((0.1, 0.35), (0.5, 0.52), (0.9, 0.2)):
            f = lambda z: kernel(I, xx, z, s).value * kernel(I, z, yy, u).value
            pts = sorted({0.0, xx, yy, a})
            val = sum(integrate_1d(f, lo, hi, 1e-15, rtol=1e-14).value
                      for lo, hi in zip(pts[:-1], pts[1:]))
            ref = kernel(I, xx, yy, s + u).value
            semi = max(semi, abs(val - ref) / abs(ref))
    ok &= semi <= 1e-10
    lines.append(f"semigroup max rel err {_e(semi)} (tol 1e-10)")
    return Check("kernel properties", bool(ok), lines)


# -- ball --------------------------------------------------------------------

def ball_samples(workers=None):
    ap = AlphaPair(*BALL_ALPHA)
    ts = np.logspace(math.log10(BALL_GRID[0]), math.log10(BALL_GRID[1]), BALL_GRID[2])
    return hc.q_grid(lambda t: hc.q_ball(ap, 1.0, t), ts, workers)


def check_ball_fit(samples=None, workers=None):
    ap = AlphaPair(*BALL_ALPHA)
    samples = samples if samples is not None else ball_samples(workers)
    tm = asy.build_template(ap, 2, 1).with_guard([2])
    fit = asy.fit_series(samples, tm)
    s = ap.s
    tols = {asy.column_label((1 + j - s) / 2.0): tol for j, tol in enumerate(BALL_TOLS)}
    rep = asy.compare(fit, asy.ball_prediction(ap), tols)
    lines = rep.as_text().splitlines() + [f"condition estimate {fit.condition_estimate:.3e}"]
    return Check(f"ball expansion a=1 alpha={BALL_ALPHA}", rep.passed, lines,
                 {"samples": samples, "fit": fit, "report": rep})


def check_ball_oracle(pairs=((1.8, 1.4), (0.5, 0.5), (1.3, -0.3)), ts=(0.01, 0.05)):
    worst = 0.0
    lines = []
    for pair in pairs:
        ref = hc.q_ball_eigen(pair, 1.0, ts, terms=200)
        for t, r in zip(ts, ref):
            q = hc.q_ball(pair, 1.0, t).value
            err = abs(q - r) / abs(r)
            worst = max(worst, err)
            lines.append(f"alpha={pair} t={t:g}: q_ball {q:.17g} series {r:.17g} rel {_e(err)}")
    lines.append(f"worst {_e(worst)} (tol 1e-8)")
    return Check("radial reduction vs 200-term eigen series", worst <= 1e-8, lines)


# -- log case ----------------------------------------------------------------

def log_samples(pair, workers=None):
    chi = hc.bump_cutoff(*LOG_CUTOFF)
    ts = np.logspace(math.log10(LOG_GRID[0]), math.log10(LOG_GRID[1]), LOG_GRID[2])
    return hc.q_grid(lambda t: hc.q_interval(pair, chi, chi, 1.0, t), ts, workers)


def check_log_case(pair, samples=None, workers=None):
    chi = hc.bump_cutoff(*LOG_CUTOFF)
    samples = samples if samples is not None else log_samples(pair, workers)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", asy.IllConditionedWarning)
        fit = asy.fit_series(samples, asy.build_log_template(LOG_ORDER))
    slope, const = hc.log_case_prediction(pair, chi, chi, 1.0)
    d_log = abs(fit.get(0.0, 1) - slope)
    d_const = abs(fit.get(0.0) - const)
    ok = d_log <= 1e-3 and d_const <= 5e-3
    return Check(f"log case alpha={pair}", ok, [
        f"cutoffs {LOG_CUTOFF}, log template N={LOG_ORDER}, t in [{LOG_GRID[0]:g}, {LOG_GRID[1]:g}]",
        f"log(1/t) coefficient {fit.get(0.0, 1):.10f} vs 1: {_e(d_log)} (tol 1e-3)",
        f"constant {fit.get(0.0):.10f} vs {const:.10f}: {_e(d_const)} (tol 5e-3)",
    ], {"samples": samples, "fit": fit, "predicted": (slope, const)})


def check_gap():
    chi = hc.bump_cutoff(*GAP_CUTOFF)
    ap = (0.5, 0.5)
    t = 0.005
    qi = hc.q_interval(ap, chi, chi, 1.0, t).value
    qh = hc.q_halfline(ap, chi, chi, t).value
    rel = abs(qi - 2.0 * qh) / abs(qi)
    gaps = [abs(hc.q_interval_gap(ap, chi, chi, a, t).value) for a in (1.0, 2.0, 4.0)]
    mono = all(g2 < g1 for g1, g2 in zip(gaps[:-1], gaps[1:]))
    ok = rel <= 1e-8 and mono
    return Check("interval vs twice half-line", ok, [
        f"cutoffs {GAP_CUTOFF}, t={t}: |q_I - 2 q_H| / q_I = {_e(rel)} (tol 1e-8)",
        "gap for a = 1, 2, 4: " + ", ".join(_e(g) for g in gaps)
        + (" (decreasing)" if mono else " (NOT decreasing)"),
    ])


SUITES = {
    "coeffs": (check_c_paths, check_smooth, check_epsilon, check_fit_engine),
    "kernels": (check_kernels,),
    "ball": (check_ball_oracle, check_ball_fit),
    "logcase": (check_gap, lambda: check_log_case(LOG_PAIRS[0]),
                lambda: check_log_case(LOG_PAIRS[1])),
}
SUITE_NAMES = ("all",) + tuple(SUITES)


def run_suite(name="all"):
    if name not in SUITE_NAMES:
        raise ValueError(f"unknown suite {name!r}; choose from {SUITE_NAMES}")
    names = tuple(SUITES) if name == "all" else (name,)
    checks = [fn() for n in names for fn in SUITES[n]]
    return Report(name, checks)
