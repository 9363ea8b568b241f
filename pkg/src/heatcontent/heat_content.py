"""Heat content Q(t) on the interval, the half-line and the ball in R^3.

All three reduce to integrals over a square [0, L]^2 of a one-dimensional
Dirichlet kernel against a product of weights.  The square is cut at the
cutoff breakpoints (and at a/2 for the interval), and each point is described
by its distance to the nearest endpoint.  The kernel is used in reduced form,
p / (xh yh), and each weight is multiplied by its own xh.  Powers like
xh**(1 - alpha) stay bounded for alpha < 2 even at nodes 1e-150 from the
boundary.

Diagonal cells are integrated over one collapsed triangle with the
symmetrised weight g1(x) g2(y) + g2(x) g1(y), and off-diagonal cells over the
pair (i, j) with i < j using the same symmetrised weight.  Swapping the two
weights therefore gives bit-for-bit the same value.
"""

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, HeatContentError
from .kernels1d import halfline_reduced, image_count, interval_reduced, pair_reduced
from .quadrature import integrate_1d, integrate_2d
from .special_fns import AlphaPair, log_case_constant


@dataclass(frozen=True)
class QSample:
    t: float
    value: float
    err: float


class CutoffFunction:
    """Smooth cutoff equal to 1 on [0, eps_in] and 0 on [eps_out, inf).

    chi(x) = h(eps_out - x) / (h(eps_out - x) + h(x - eps_in)),
    h(u) = exp(-1/u) for u > 0 and 0 otherwise.
    """

    def __init__(self, eps_in, eps_out):
        eps_in, eps_out = float(eps_in), float(eps_out)
        if not (0.0 < eps_in < eps_out and math.isfinite(eps_out)):
            raise DomainError(f"need 0 < eps_in < eps_out, got {eps_in}, {eps_out}")
        self.eps_in = eps_in
        self.eps_out = eps_out

    def __repr__(self):
        return f"CutoffFunction({self.eps_in!r}, {self.eps_out!r})"

    def __eq__(self, other):
        return (isinstance(other, CutoffFunction)
                and (self.eps_in, self.eps_out) == (other.eps_in, other.eps_out))

    def __hash__(self):
        return hash((self.eps_in, self.eps_out))

    @staticmethod
    def _h(u):
        with np.errstate(divide="ignore", over="ignore"):
            return np.where(u > 0.0, np.exp(-1.0 / np.where(u > 0.0, u, 1.0)), 0.0)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        w = self.eps_out - self.eps_in
        up = self._h((self.eps_out - x) / w)
        down = self._h((x - self.eps_in) / w)
        out = up / np.where(up + down > 0.0, up + down, 1.0)
        out = np.where(x <= self.eps_in, 1.0, np.where(x >= self.eps_out, 0.0, out))
        return float(out) if out.ndim == 0 else out

    @property
    def breakpoints(self):
        return (self.eps_in, self.eps_out)


def bump_cutoff(eps_in, eps_out):
    return CutoffFunction(eps_in, eps_out)


def _pair(ap):
    return ap if isinstance(ap, AlphaPair) else AlphaPair(*ap)


def _check_t(t):
    if not (t > 0 and math.isfinite(t)):
        raise DomainError(f"t must be positive and finite, got {t}")


def _cells(breaks):
    return [(lo, hi) for lo, hi in zip(breaks[:-1], breaks[1:]) if hi > lo]


def _square_integral(kern, weights, cells, side_of, edge_of, tol, rtol):
    """Sum of symmetrised cell integrals over the square cut into ``cells``.

    kern(xh, yh, same_side, v) -> reduced kernel
    weights = (h1, h2), each h(xh, side) = xh * psi(x)
    side_of(cell) -> 0 if distances are measured from 0, 1 if from the far end
    edge_of(cell) -> distance of the cell edge nearest that endpoint
    """
    h1, h2 = weights
    n = len(cells)
    pairs = [(i, j) for i in range(n) for j in range(i, n)]
    cell_tol = tol / max(1, len(pairs))
    value, err = 0.0, 0.0

    def hat(lo_off, hi_off, side, edge):
        return edge + (lo_off if side == 0 else hi_off)

    for i, j in pairs:
        ci, cj = cells[i], cells[j]
        si, sj = side_of(ci), side_of(cj)
        ei, ej = edge_of(ci), edge_of(cj)
        same = si == sj

        if i == j:
            def f(x, y, off, si=si, ei=ei):
                xh = hat(off.x_lo, off.x_hi, si, ei)
                yh = hat(off.y_lo, off.y_hi, si, ei)
                sym = h1(xh, si) * h2(yh, si) + h2(xh, si) * h1(yh, si)
                return kern(xh, yh, True, off.x_minus_y) * sym

            est = integrate_2d(f, (ci, ci), cell_tol, rtol=rtol, diagonal="lower",
                               distances=True)
        else:
            def f(x, y, off, si=si, sj=sj, ei=ei, ej=ej, same=same):
                xh = hat(off.x_lo, off.x_hi, si, ei)
                yh = hat(off.y_lo, off.y_hi, sj, ej)
                sym = h1(xh, si) * h2(yh, sj) + h2(xh, si) * h1(yh, sj)
                return kern(xh, yh, same, xh - yh) * sym

            est = integrate_2d(f, (ci, cj), cell_tol, rtol=rtol, distances=True)
        value += est.value
        err += est.err
    return value, err


def _interval_cells(a, chis):
    half = 0.5 * a
    if chis is None:
        return [(0.0, half), (half, a)]
    pts = {0.0}
    for chi in chis:
        pts.update(chi.breakpoints)
    left = sorted(pts)
    right = sorted(a - p for p in left)
    return _cells(left) + _cells(right)


def _interval_sides(a):
    half = 0.5 * a
    side_of = lambda c: 0 if c[1] <= half else 1
    edge_of = lambda c: c[0] if c[1] <= half else a - c[1]
    return side_of, edge_of


def _cutoff_weight(alpha, chi):
    def h(xh, side):
        w = xh ** (1.0 - alpha)
        return w if chi is None else w * chi(xh)
    return h


def _check_supports(chis, a):
    for chi in chis:
        if not chi.eps_out < 0.5 * a:
            raise DomainError(f"cutoff support [0, {chi.eps_out}] must lie inside [0, a/2)")


def _interval_kern(t, a, tol):
    n = image_count(a, t, tol).n

    def kern(xh, yh, same, v):
        return interval_reduced(xh, yh, t, a, same, n, v=v)
    return kern


def q_interval(ap, chi1, chi2, a, t, tol=1e-10, rtol=1e-13):
    """Interval heat content with weights chi_i(delta) delta**-alpha_i.

    delta(x) = min(x, a - x).  Pass ``chi1 = chi2 = None`` for the plain
    weights delta**-alpha_i on the whole interval.
    """
    ap = _pair(ap)
    _check_t(t)
    if not a > 0:
        raise DomainError("a must be positive")
    if (chi1 is None) != (chi2 is None):
        raise DomainError("give both cutoffs or neither")
    chis = None if chi1 is None else (chi1, chi2)
    if chis is not None:
        _check_supports(chis, a)
    cells = _interval_cells(a, chis)
    side_of, edge_of = _interval_sides(a)
    weights = (_cutoff_weight(ap.alpha1, chi1), _cutoff_weight(ap.alpha2, chi2))
    value, err = _square_integral(_interval_kern(t, a, 1e-300), weights, cells,
                                  side_of, edge_of, tol, rtol)
    return QSample(t, value, err)


def q_interval_gap(ap, chi1, chi2, a, t, tol=1e-30, rtol=1e-10):
    """q_interval - 2 q_halfline, integrated directly from the image terms.

    Near-corner blocks contribute -sum_m P_{2ma}; opposite-end blocks carry
    the full kernel.  Both are exponentially small, so the difference is
    resolved far below the rounding level of either heat content.
    """
    ap = _pair(ap)
    _check_t(t)
    chis = (chi1, chi2)
    _check_supports(chis, a)
    n = image_count(a, t, 1e-300).n

    def kern(xh, yh, same, v):
        if same:
            out = 0.0
            for m in range(1, n + 1):
                out = out - pair_reduced(xh, yh, 2.0 * m * a, t, v)
            return out
        return interval_reduced(xh, yh, t, a, False, n, v=v)

    cells = _interval_cells(a, chis)
    side_of, edge_of = _interval_sides(a)
    weights = (_cutoff_weight(ap.alpha1, chi1), _cutoff_weight(ap.alpha2, chi2))
    value, err = _square_integral(kern, weights, cells, side_of, edge_of, tol, rtol)
    return QSample(t, value, err)


def q_halfline(ap, chi1, chi2, t, tol=1e-10, rtol=1e-13):
    """Half-line heat content with weights chi_i(x) x**-alpha_i (no factor 2)."""
    ap = _pair(ap)
    _check_t(t)
    pts = {0.0, *chi1.breakpoints, *chi2.breakpoints}
    cells = _cells(sorted(pts))

    def kern(xh, yh, same, v):
        return halfline_reduced(xh, yh, t, v)

    weights = (_cutoff_weight(ap.alpha1, chi1), _cutoff_weight(ap.alpha2, chi2))
    value, err = _square_integral(kern, weights, cells, lambda c: 0, lambda c: c[0], tol, rtol)
    return QSample(t, value, err)


def _ball_weight(alpha, a):
    # psi(u) = u**-alpha (a - u) r-factor, u the distance to the sphere
    def h(xh, side):
        if side == 0:
            return xh ** (1.0 - alpha) * (a - xh)
        return xh * xh * (a - xh) ** (-alpha)
    return h


def q_ball(ap, a, t, tol=1e-10, rtol=1e-13):
    """Heat content of the ball B_a in R^3 with weights delta**-alpha_i.

    Radial functions f(r) on B_a evolve as (r f)(r) under the interval kernel,
    so Q = 4 pi int int p_{[0,a]}(r1, r2; t) psi1 psi2 r1 r2 dr1 dr2.  Written
    in the distance u = a - r and using p(a - u1, a - u2) = p(u1, u2):
    Q = 4 pi int int p(u1, u2) u1**-a1 u2**-a2 (a - u1)(a - u2) du1 du2.
    """
    ap = _pair(ap)
    _check_t(t)
    if not a > 0:
        raise DomainError("a must be positive")
    cells = _interval_cells(a, None)
    side_of, edge_of = _interval_sides(a)
    weights = (_ball_weight(ap.alpha1, a), _ball_weight(ap.alpha2, a))
    value, err = _square_integral(_interval_kern(t, a, 1e-300), weights, cells,
                                  side_of, edge_of, tol / (4.0 * math.pi), rtol)
    return QSample(t, 4.0 * math.pi * value, 4.0 * math.pi * err)


def ball_fourier(alpha, n, a=1.0, dps=30):
    """int_0^a (a - r)**-alpha sin(n pi r / a) r dr in closed form (mpmath).

    With u = a - r this is (-1)**(n+1) Im[a J(1 - alpha) - J(2 - alpha)],
    J(b) = int_0^a u**(b-1) exp(i k u) du = (-ik)**-b gamma(b, -ika), k = n pi / a.
    """
    import mpmath as mp

    with mp.workdps(dps):
        alpha, a = mp.mpf(alpha), mp.mpf(a)
        z = -1j * n * mp.pi / a

        def J(b):
            return z ** (-b) * mp.gammainc(b, 0, z * a)

        val = mp.im(a * J(1 - alpha) - J(2 - alpha))
        return float(val if n % 2 == 1 else -val)


def q_ball_eigen(ap, a, t_values, terms=200, dps=30):
    """Q(t) on B_a from the Dirichlet sine series of the radial problem.

    Independent of the image-sum path used by :func:`q_ball`; slow, meant as
    an oracle.  Returns one float per entry of ``t_values``.
    """
    ap = _pair(ap)
    f1 = [ball_fourier(ap.alpha1, n, a, dps) for n in range(1, terms + 1)]
    f2 = f1 if ap.alpha2 == ap.alpha1 else [ball_fourier(ap.alpha2, n, a, dps)
                                             for n in range(1, terms + 1)]
    out = []
    for t in t_values:
        _check_t(t)
        total = 0.0
        # smallest terms first
        for n in range(terms, 0, -1):
            total += math.exp(-((n * math.pi / a) ** 2) * t) * f1[n - 1] * f2[n - 1]
        out.append(8.0 * math.pi / a * total)
    return out


class GridError(HeatContentError):
    """One or more t values of a grid evaluation failed."""

    def __init__(self, failures):
        self.failures = failures
        msg = "; ".join(f"[{i}] t={t:g}: {e}" for i, t, e in failures)
        super().__init__(f"{len(failures)} grid point(s) failed: {msg}")


def default_workers():
    raw = os.environ.get("HC_THREADS", "0").strip() or "0"
    try:
        n = int(raw)
    except ValueError:
        raise DomainError(f"HC_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise DomainError("HC_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def q_grid(evaluate, t_grid, workers=None):
    """Evaluate ``evaluate(t) -> QSample`` on each t, preserving input order.

    ``workers`` caps the thread fan-out (default from HC_THREADS, 0 = cpu
    count).  Failures are collected and raised together as :class:`GridError`.
    """
    ts = [float(t) for t in t_grid]
    for t in ts:
        _check_t(t)
    if not ts:
        return []
    workers = default_workers() if workers is None else max(1, int(workers))

    def safe(t):
        try:
            return evaluate(t), None
        except Exception as e:  # collected and re-raised below
            return None, e

    if workers == 1 or len(ts) == 1:
        results = [safe(t) for t in ts]
    else:
        with ThreadPoolExecutor(max_workers=min(workers, len(ts))) as pool:
            results = list(pool.map(safe, ts))
    failures = [(i, t, e) for i, (t, (_, e)) in enumerate(zip(ts, results)) if e is not None]
    if failures:
        raise GridError(failures)
    return [s for s, _ in results]


def chi_log_integral(chi1, chi2, a, tol=1e-14):
    """2 int_eps^{a/2} chi1 chi2 / x dx, eps = min(eps_in of both cutoffs)."""
    eps = min(chi1.eps_in, chi2.eps_in)
    pts = sorted({eps, *chi1.breakpoints, *chi2.breakpoints, 0.5 * a})
    pts = [p for p in pts if eps <= p <= 0.5 * a]
    f = lambda x: chi1(x) * chi2(x) / x
    return 2.0 * sum(integrate_1d(f, lo, hi, tol).value for lo, hi in _cells(pts))


def log_case_prediction(ap, chi1, chi2, a):
    """(log(1/t) coefficient, constant) predicted for the log case s = 1."""
    ap = _pair(ap)
    if not ap.is_log_case:
        raise DomainError(f"log case needs alpha1 + alpha2 = 1, got {ap.s}")
    eps = min(chi1.eps_in, chi2.eps_in)
    const = 2.0 * math.log(eps) + log_case_constant(ap.alpha1, chi_log_integral(chi1, chi2, a))
    return 1.0, const
