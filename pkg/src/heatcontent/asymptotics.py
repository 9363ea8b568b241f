"""Series templates for small-t expansions and least squares coefficient extraction.

A template is a list of basis columns t**e log(1/t)**p (p in {0, 1}).  Fits
are weighted by the quadrature error of each sample, columns are scaled to
unit norm before solving, and the condition number of the scaled matrix is
reported with the result.
"""

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import FitError, IllConditionedWarning, TemplateError
from .special_fns import AlphaPair, ball_b_coeffs, c_coef

COLLISION = 1e-6
COND_LIMIT = 1e12
# relative floor on per-sample errors used as fit weights
ERR_FLOOR = 1e-13


@dataclass(frozen=True)
class Column:
    exponent: float
    log_power: int = 0
    tag: str = ""

    @property
    def label(self):
        return column_label(self.exponent, self.log_power)

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        out = t ** self.exponent
        if self.log_power:
            out = out * np.log(1.0 / t) ** self.log_power
        return out


def column_label(exponent, log_power=0):
    e = float(f"{exponent:.10g}")
    e = 0.0 if e == 0 else e
    base = f"t^{e:g}"
    return base + " log(1/t)" * int(log_power)


@dataclass(frozen=True)
class SeriesTemplate:
    columns: tuple

    @property
    def exponents(self):
        return sorted({c.exponent for c in self.columns})

    @property
    def has_log(self):
        return any(c.log_power for c in self.columns)

    @property
    def labels(self):
        return [c.label for c in self.columns]

    @property
    def origins(self):
        return {c.label: c.tag for c in self.columns}

    def __len__(self):
        return len(self.columns)

    def with_guard(self, exponents, log_power=0):
        """Template with extra columns whose coefficients are fitted then ignored."""
        extra = tuple(Column(float(e), log_power, "guard") for e in exponents)
        return _make(self.columns + extra)

    def design(self, t):
        t = np.asarray(t, dtype=float)
        return np.column_stack([c(t) for c in self.columns])


def _make(columns):
    cols = sorted(columns, key=lambda c: (c.exponent, -c.log_power))
    for prev, cur in zip(cols[:-1], cols[1:]):
        if cur.log_power == prev.log_power and abs(cur.exponent - prev.exponent) < COLLISION:
            raise TemplateError(
                f"exponents {prev.exponent:g} ({prev.tag}) and {cur.exponent:g} ({cur.tag}) collide")
    return SeriesTemplate(tuple(cols))


def build_template(ap, J, N):
    """Boundary exponents (1 + j - s)/2, j <= J, and interior powers n <= N."""
    ap = ap if isinstance(ap, AlphaPair) else AlphaPair(*ap)
    for name, v in (("J", J), ("N", N)):
        if int(v) != v or not 0 <= v <= 6:
            raise TemplateError(f"{name} must be an integer in [0, 6]")
    if ap.is_log_case:
        raise TemplateError("alpha1 + alpha2 = 1 is the log case; use build_log_template")
    if ap.is_integer_sum:
        raise TemplateError(f"alpha1 + alpha2 = {ap.s:g} is an integer; exponents collide")
    cols = [Column(float(n), 0, f"interior n={n}") for n in range(int(N) + 1)]
    cols += [Column((1.0 + j - ap.s) / 2.0, 0, f"boundary j={j}") for j in range(int(J) + 1)]
    return _make(cols)


def build_log_template(N):
    """log(1/t), 1 and, per half-power k/2 up to N/2, t^(k/2) log(1/t) and t^(k/2)."""
    if int(N) != N or not 0 <= N <= 6:
        raise TemplateError("N must be an integer in [0, 6]")
    cols = []
    for k in range(int(N) + 1):
        cols.append(Column(k / 2.0, 1, f"log order {k}"))
        cols.append(Column(k / 2.0, 0, f"order {k}"))
    return _make(cols)


def custom_template(exponents, log_exponents=(), tag="custom"):
    cols = [Column(float(e), 0, tag) for e in exponents]
    cols += [Column(float(e), 1, tag) for e in log_exponents]
    return _make(cols)


@dataclass
class FitResult:
    template: SeriesTemplate
    coef: np.ndarray
    stderr: np.ndarray
    residual_norm: float
    weighted_residual: float
    condition_estimate: float
    covariance: np.ndarray = field(repr=False)
    n_samples: int = 0

    @property
    def coefficients(self):
        return {lab: float(v) for lab, v in zip(self.template.labels, self.coef)}

    @property
    def uncertainties(self):
        return {lab: float(v) for lab, v in zip(self.template.labels, self.stderr)}

    def get(self, exponent, log_power=0):
        return self.coefficients[column_label(exponent, log_power)]

    def to_dict(self):
        return {
            "coefficients": self.coefficients,
            "stderr": self.uncertainties,
            "origins": self.template.origins,
            "residual_norm": self.residual_norm,
            "weighted_residual": self.weighted_residual,
            "condition_estimate": self.condition_estimate,
            "n_samples": self.n_samples,
        }


def fit_series(samples, tmpl, err_floor=ERR_FLOOR):
    """Weighted linear least squares of Q(t) samples against a template.

    Weights are 1 / max(err, err_floor |value|).  Samples are sorted by t
    first, so the result does not depend on their order.
    """
    samples = sorted(samples, key=lambda s: s.t)
    m, p = len(samples), len(tmpl)
    if m < p + 2:
        raise FitError(f"{m} samples for {p} basis columns; need at least {p + 2}")
    t = np.array([s.t for s in samples], dtype=float)
    y = np.array([s.value for s in samples], dtype=float)
    err = np.array([s.err for s in samples], dtype=float)
    if np.any(t <= 0) or not np.all(np.isfinite(t)):
        raise FitError("t values must be positive and finite")
    if np.any(np.diff(t) == 0):
        raise FitError("t values must be distinct")
    if not np.all(np.isfinite(y)):
        raise FitError("sample values must be finite")

    A = tmpl.design(t)
    sigma = np.maximum(np.maximum(err, err_floor * np.abs(y)), 1e-300)
    w = 1.0 / sigma
    Aw = A * w[:, None]
    yw = y * w
    norms = np.linalg.norm(Aw, axis=0)
    if np.any(norms == 0):
        raise FitError("a basis column vanishes on the sample grid")
    As = Aw / norms
    x, _, rank, sv = np.linalg.lstsq(As, yw, rcond=None)
    cond = float(sv[0] / sv[-1]) if sv[-1] > 0 else math.inf
    if cond > COND_LIMIT:
        warnings.warn(f"fit condition estimate {cond:.3e} exceeds {COND_LIMIT:.0e}",
                      IllConditionedWarning, stacklevel=2)
    coef = x / norms
    r_w = yw - As @ x
    dof = max(m - p, 1)
    s2 = float(r_w @ r_w) / dof
    _, _, vt = np.linalg.svd(As, full_matrices=False)
    inv_sv2 = np.where(sv > 0, 1.0 / np.where(sv > 0, sv, 1.0) ** 2, 0.0)
    cov_s = (vt.T * inv_sv2) @ vt
    cov = s2 * cov_s / np.outer(norms, norms)
    return FitResult(
        template=tmpl,
        coef=coef,
        stderr=np.sqrt(np.maximum(np.diag(cov), 0.0)),
        residual_norm=float(np.linalg.norm(y - A @ coef)),
        weighted_residual=float(np.linalg.norm(r_w)),
        condition_estimate=cond,
        covariance=cov,
        n_samples=m,
    )


@dataclass(frozen=True)
class ComparisonRow:
    label: str
    fitted: float
    predicted: float
    rel_err: float
    tol: float = None
    passed: bool = True


@dataclass(frozen=True)
class ComparisonReport:
    rows: tuple

    @property
    def passed(self):
        return all(r.passed for r in self.rows)

    def as_text(self):
        lines = [f"{'term':<22}{'fitted':>26}{'predicted':>26}{'rel_err':>12}{'tol':>10}  ok"]
        for r in self.rows:
            tol = "-" if r.tol is None else f"{r.tol:.1e}"
            ok = "-" if r.tol is None else ("PASS" if r.passed else "FAIL")
            lines.append(f"{r.label:<22}{r.fitted:>26.17g}{r.predicted:>26.17g}"
                         f"{r.rel_err:>12.3e}{tol:>10}  {ok}")
        return "\n".join(lines)

    def as_csv(self):
        lines = ["term,fitted,predicted,rel_err,tol,passed"]
        for r in self.rows:
            tol = "" if r.tol is None else f"{r.tol:.17e}"
            lines.append(f"{r.label},{r.fitted:.17e},{r.predicted:.17e},{r.rel_err:.17e},"
                         f"{tol},{int(r.passed)}")
        return "\n".join(lines) + "\n"


def _rel(fitted, predicted):
    if predicted == 0:
        return abs(fitted)
    return abs(fitted - predicted) / abs(predicted)


def compare(fit, predicted, tolerances=None):
    """Relative error of fitted against predicted coefficients.

    ``predicted`` maps column labels (or (exponent, log_power) pairs, or bare
    exponents) to values; ``tolerances`` maps the same keys to relative
    tolerances; keys without one are reported only.
    """
    coefs = fit.coefficients
    tolerances = tolerances or {}
    rows = []
    # rows without a tolerance are reported but never fail
    for key, value in predicted.items():
        label = _key_label(key)
        if label not in coefs:
            raise TemplateError(f"no fitted column {label!r}; have {sorted(coefs)}")
        tol = tolerances.get(key, tolerances.get(label))
        rel = _rel(coefs[label], float(value))
        if tol is None:
            rows.append(ComparisonRow(label, coefs[label], float(value), rel))
        else:
            tol = float(tol)
            rows.append(ComparisonRow(label, coefs[label], float(value), rel, tol, rel <= tol))
    return ComparisonReport(tuple(rows))


def _key_label(key):
    if isinstance(key, str):
        return key
    if isinstance(key, tuple):
        return column_label(*key)
    return column_label(key)


def ball_prediction(ap, a=1.0, c=c_coef):
    """Predicted coefficients of the ball expansion, keyed by column label.

    Boundary terms 4 pi c a^2, -4 pi (c_{a1-1,a2} + c_{a1,a2-1}) a, 4 pi c_{a1-1,a2-1}
    at exponents (1 + j - s)/2, and b_j a^(3-j-s) at t^(j/2) for j = 0, 2.
    """
    ap = ap if isinstance(ap, AlphaPair) else AlphaPair(*ap)
    s = ap.s
    out = {
        column_label((1.0 - s) / 2.0): 4.0 * math.pi * c(ap) * a * a,
        column_label((2.0 - s) / 2.0): -4.0 * math.pi * (c(ap.shifted(1, 0)) + c(ap.shifted(0, 1))) * a,
        column_label((3.0 - s) / 2.0): 4.0 * math.pi * c(ap.shifted(1, 1)),
    }
    b = ball_b_coeffs(ap)
    out[column_label(0.0)] = b.b0 * a ** b.radius_power[0]
    out[column_label(1.0)] = b.b2 * a ** b.radius_power[2]
    return out
