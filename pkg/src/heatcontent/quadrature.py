"""Tanh-sinh (double exponential) quadrature on finite intervals and rectangles.

The rule lives on (0, 1) with the map

    x(t) = 1 / (1 + exp(-pi sinh t)),    dx/dt = pi cosh t x (1 - x),

sampled at t = k h with h = 2**(1 - level).  Both x and 1 - x are computed
directly from t, so distances to either endpoint stay exact down to about
1e-300.  Integrands that need those distances (algebraic endpoint powers, or
kernels that vanish on the boundary) can ask for them instead of forming
``b - x`` themselves.
"""

import math
import warnings
from collections import namedtuple
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DomainError, IntegrationWarning

MIN_LEVEL = 1
MAX_LEVEL = 12

# Smallest endpoint distance the 1-D rule reaches (relative to the interval).
FLOOR_1D = 1e-300
# 2-D integrands multiply two endpoint powers; a shallower floor keeps the
# product of two x**-0.99 factors inside double range.
FLOOR_2D = 1e-150

# Points per evaluation chunk in 2-D, to bound memory at high levels.
_CHUNK = 1 << 20


@dataclass(frozen=True)
class QuadratureRule:
    """Nodes and weights on (0, 1).

    ``complements`` holds 1 - nodes computed without cancellation.  Nodes
    closer to 1 than the double spacing round to 1.0, so strict ordering is
    carried by the pair (nodes, complements): along the rule either the node
    increases or the complement decreases.
    """

    nodes: np.ndarray
    complements: np.ndarray
    weights: np.ndarray
    level: int

    def __len__(self):
        return len(self.nodes)


@dataclass(frozen=True)
class Estimate:
    value: float
    err: float
    evaluations: int
    level: int = 0
    converged: bool = True


Offsets = namedtuple("Offsets", ["x_lo", "x_hi", "y_lo", "y_hi", "x_minus_y"])
Offsets.__doc__ = """Exact distances of 2-D nodes to the cell edges, and x - y."""


def _check_level(level):
    if not (MIN_LEVEL <= level <= MAX_LEVEL) or int(level) != level:
        raise DomainError(f"level must be an integer in [{MIN_LEVEL}, {MAX_LEVEL}], got {level}")


def _tmax(floor):
    return math.asinh(math.log(1.0 / floor) / math.pi)


def _abscissae(level, floor, odd_only=False):
    h = 2.0 ** (1 - level)
    n = int(_tmax(floor) / h)
    k = np.arange(-n, n + 1)
    if odd_only:
        k = k[k % 2 != 0]
    return k * h, h


def _points(t, h):
    z = math.pi * np.sinh(t)
    x = 1.0 / (1.0 + np.exp(-z))
    xc = 1.0 / (1.0 + np.exp(z))
    w = h * math.pi * np.cosh(t) * x * xc
    return x, xc, w


@lru_cache(maxsize=64)
def _rule(level, floor):
    t, h = _abscissae(level, floor)
    x, xc, w = _points(t, h)
    for arr in (x, xc, w):
        arr.flags.writeable = False
    return QuadratureRule(x, xc, w, level)


def de_rule(level, floor=FLOOR_1D):
    """Tanh-sinh rule on (0, 1) at the given level (1..12).

    Parameters
    ----------
    level : int
        Step h = 2**(1 - level); each level doubles the node count.
    floor : float
        Smallest endpoint distance kept; the rule is truncated where
        x(1 - x) would fall below it.
    """
    _check_level(level)
    if not (0.0 < floor < 0.5):
        raise DomainError("floor must lie in (0, 0.5)")
    return _rule(int(level), float(floor))


def _call_1d(f, a, b, u, uc, distances):
    L = b - a
    x = a + L * u
    if distances:
        return np.asarray(f(x, L * u, L * uc), dtype=float)
    return np.asarray(f(x), dtype=float)


def integrate_1d(f, a, b, tol=1e-12, *, rtol=0.0, distances=False,
                 min_level=4, max_level=MAX_LEVEL, floor=FLOOR_1D):
    """Integrate a vectorised ``f`` over (a, b) by level escalation.

    The error estimate is the difference between consecutive levels.  Each
    new level only evaluates the odd nodes, halving the previous sum.
    With ``distances=True`` the integrand is called as ``f(x, x - a, b - x)``.

    Returns an :class:`Estimate`; ``converged`` is False (and an
    :class:`IntegrationWarning` is issued) when ``max_level`` is reached
    without meeting ``max(tol, rtol * |value|)``.
    """
    _check_level(min_level)
    _check_level(max_level)
    if not (math.isfinite(a) and math.isfinite(b)):
        raise DomainError("integration limits must be finite")
    if a == b:
        return Estimate(0.0, 0.0, 0, min_level)
    if b < a:
        est = integrate_1d(f, b, a, tol, rtol=rtol, distances=distances,
                           min_level=min_level, max_level=max_level, floor=floor)
        return Estimate(-est.value, est.err, est.evaluations, est.level, est.converged)

    L = b - a
    rule = de_rule(min_level, floor)
    vals = _call_1d(f, a, b, rule.nodes, rule.complements, distances)
    value = L * float(np.dot(rule.weights, vals))
    evals = len(rule)
    err = math.inf
    level = min_level
    while level < max_level:
        level += 1
        t, h = _abscissae(level, floor, odd_only=True)
        u, uc, w = _points(t, h)
        vals = _call_1d(f, a, b, u, uc, distances)
        evals += len(u)
        new = 0.5 * value + L * float(np.dot(w, vals))
        err = abs(new - value)
        value = new
        if err <= max(tol, rtol * abs(value)):
            return Estimate(value, err, evals, level, True)
    if not math.isfinite(value):
        raise DomainError("integrand produced non-finite values")
    warnings.warn(f"integrate_1d: err {err:.3e} above tolerance at level {level}",
                  IntegrationWarning, stacklevel=2)
    return Estimate(value, err, evals, level, False)


def _cell_nodes(rect, rx, ry, diagonal):
    """Nodes, weights and offsets of one 2-D rule on a rectangle or triangle."""
    (a, b), (c, d) = rect
    Lx, Ly = b - a, d - c
    if diagonal is None:
        xl = Lx * rx.nodes[:, None]
        xh = Lx * rx.complements[:, None]
        yl = Ly * ry.nodes[None, :]
        yh = Ly * ry.complements[None, :]
        shape = (len(rx), len(ry))
        xl, xh, yl, yh = (np.broadcast_to(v, shape) for v in (xl, xh, yl, yh))
        x = a + xl
        y = c + yl
        w = Lx * Ly * rx.weights[:, None] * ry.weights[None, :]
        return x, y, w, Offsets(xl, xh, yl, yh, x - y)

    # Collapsed (Duffy) map of the triangle below the diagonal of a square:
    # x = a + L xi, y = a + L xi eta, Jacobian L^2 xi.  The diagonal sits at
    # eta = 1, where the rule clusters nodes.
    L = Lx
    xi = rx.nodes[:, None]
    xic = rx.complements[:, None]
    eta = ry.nodes[None, :]
    etac = ry.complements[None, :]
    p_lo = L * xi * np.ones_like(eta)
    p_hi = L * xic * np.ones_like(eta)
    q_lo = L * xi * eta
    q_hi = L * (xic + xi * etac)
    gap = L * xi * etac
    w = L * L * xi * rx.weights[:, None] * ry.weights[None, :]
    if diagonal == "lower":
        return a + p_lo, a + q_lo, w, Offsets(p_lo, p_hi, q_lo, q_hi, gap)
    return a + q_lo, a + p_lo, w, Offsets(q_lo, q_hi, p_lo, p_hi, -gap)


def _quad_2d(f, rect, lx, ly, diagonal, distances, floor):
    rx = de_rule(lx, floor)
    ry = de_rule(ly, floor)
    x, y, w, off = _cell_nodes(rect, rx, ry, diagonal)
    rows = max(1, _CHUNK // len(ry))
    total = 0.0
    for i in range(0, len(rx), rows):
        s = slice(i, i + rows)
        if distances:
            sub = Offsets(*(v[s] for v in off))
            vals = f(x[s], y[s], sub)
        else:
            vals = f(x[s], y[s])
        total += float(np.sum(w[s] * np.asarray(vals, dtype=float)))
    return total, len(rx) * len(ry)


def integrate_2d(f, rect, tol=1e-12, *, rtol=0.0, diagonal=None, distances=False,
                 min_level=4, max_level=9, floor=FLOOR_2D):
    """Tensor-product tanh-sinh over a rectangle with per-axis escalation.

    Parameters
    ----------
    f : callable
        Vectorised integrand ``f(x, y)``, or ``f(x, y, offsets)`` when
        ``distances`` is set (see :class:`Offsets`).
    rect : ((a, b), (c, d))
        Integration box.
    diagonal : {None, "lower", "upper"}
        Restrict to the triangle y <= x ("lower") or y >= x ("upper") of a
        square box.  A collapsed map puts the diagonal on a rule endpoint, so
        kernels concentrated near x = y are resolved by endpoint clustering.

    Each step compares the refinement in x and in y against the current
    grid; the axis with the larger change is refined.  The error estimate is
    the sum of both changes.
    """
    (a, b), (c, d) = rect
    if diagonal not in (None, "lower", "upper"):
        raise DomainError(f"unknown diagonal option {diagonal!r}")
    if diagonal is not None and (a, b) != (c, d):
        raise DomainError("diagonal integration needs a square box")
    _check_level(min_level)
    _check_level(max_level)
    if a == b or c == d:
        return Estimate(0.0, 0.0, 0, min_level)

    cache = {}
    evals = 0

    def Q(lx, ly):
        nonlocal evals
        if (lx, ly) not in cache:
            val, n = _quad_2d(f, rect, lx, ly, diagonal, distances, floor)
            cache[lx, ly] = val
            evals += n
        return cache[lx, ly]

    # refinement pairs (lx, ly) -> (lx + 1, ly) / (lx, ly + 1) stay within max_level
    lx = ly = min(min_level, max_level - 1)
    while True:
        q = Q(lx, ly)
        qx, qy = Q(lx + 1, ly), Q(lx, ly + 1)
        ex, ey = abs(qx - q), abs(qy - q)
        err = ex + ey
        value = qx + qy - q
        if not math.isfinite(value):
            raise DomainError("integrand produced non-finite values")
        if err <= max(tol, rtol * abs(value)):
            return Estimate(value, err, evals, max(lx, ly) + 1, True)
        can_x, can_y = lx + 2 <= max_level, ly + 2 <= max_level
        if not (can_x or can_y):
            break
        if (ex >= ey and can_x) or not can_y:
            lx += 1
        else:
            ly += 1
    warnings.warn(f"integrate_2d: err {err:.3e} above tolerance at levels ({lx + 1}, {ly + 1})",
                  IntegrationWarning, stacklevel=2)
    return Estimate(value, err, evals, max(lx, ly) + 1, False)
