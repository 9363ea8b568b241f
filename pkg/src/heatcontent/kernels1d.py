"""Dirichlet heat kernels on the line, half-line, left ray and interval.

The interval kernel is written around the corner nearest to the two points.
With u = x + y, v = x - y and D a multiple of a, the image sum groups into

    P_D(x, y) = G(D - u) + G(D + u) - G(D - v) - G(D + v)

so that, for x, y measured from the same endpoint,

    p(x, y) = G(v) - G(u) - sum_{m >= 1} P_{2ma}(x, y),

and for x measured from 0 and y from a (points near opposite ends),

    p(x, a - y) = sum_{k >= 1} P_{(2k-1)a}(x, y).

Every term vanishes linearly in x and in y, and the "reduced" kernels below
return p / (x y) with that factor cancelled analytically.  Integrands carrying
weights like x**-alpha with alpha close to 2 need this to stay finite at nodes
1e-150 away from the boundary.
"""

import math
from collections import namedtuple
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConvergenceError, DomainError

IMAGE_CAP = 64

# Above this value of t / a**2 the interval kernel uses its sine series.
EIGEN_SWITCH = 1.0

ImageCount = namedtuple("ImageCount", ["n", "capped", "bound"])


class DomainKind(str, Enum):
    FULL_LINE = "full_line"
    HALF_LINE = "half_line"
    LEFT_RAY = "left_ray"
    INTERVAL = "interval"


@dataclass(frozen=True)
class Domain1D:
    kind: DomainKind
    a: float = None

    def __post_init__(self):
        kind = DomainKind(self.kind)
        object.__setattr__(self, "kind", kind)
        if kind in (DomainKind.LEFT_RAY, DomainKind.INTERVAL):
            if self.a is None or not (self.a > 0 and math.isfinite(self.a)):
                raise DomainError(f"{kind.value} needs a finite length a > 0")

    @classmethod
    def full_line(cls):
        return cls(DomainKind.FULL_LINE)

    @classmethod
    def half_line(cls):
        return cls(DomainKind.HALF_LINE)

    @classmethod
    def left_ray(cls, a):
        return cls(DomainKind.LEFT_RAY, float(a))

    @classmethod
    def interval(cls, a):
        return cls(DomainKind.INTERVAL, float(a))

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind is DomainKind.FULL_LINE:
            return np.isfinite(x)
        if self.kind is DomainKind.HALF_LINE:
            return x >= 0.0
        if self.kind is DomainKind.LEFT_RAY:
            return x <= self.a
        return (x >= 0.0) & (x <= self.a)


@dataclass(frozen=True)
class KernelEval:
    value: object
    images_used: int
    truncation_bound: float


def _norm(t):
    return 1.0 / math.sqrt(4.0 * math.pi * t)


def gauss(z, t):
    """Full-line heat kernel (4 pi t)**-1/2 exp(-z**2 / 4t)."""
    z = np.asarray(z, dtype=float)
    return _norm(t) * np.exp(-z * z / (4.0 * t))


def _ratio(fn, z):
    """fn(z) / z with the value 1 at z = 0 (fn one of expm1, log1p, sinh)."""
    z = np.asarray(z, dtype=float)
    zero = z == 0.0
    safe = np.where(zero, 1.0, z)
    return np.where(zero, 1.0, fn(safe) / safe)


def expm1c(z):
    return _ratio(np.expm1, z)


def log1pc(z):
    return _ratio(np.log1p, z)


def sinhc(z):
    return _ratio(np.sinh, z)


def image_tail_bound(a, t, n):
    """Majorant for the plain image sum truncated to |n'| <= n.

    For x1, x2 in [0, a] the discarded terms with |n'| = k > n are bounded by
    four Gaussians, each at most (4 pi t)**-1/2 exp(-((2k - 2) a)**2 / 4t).
    """
    total = 0.0
    k = n + 1
    c4 = 4.0 * _norm(t)
    while True:
        term = c4 * math.exp(-((2 * k - 2) * a) ** 2 / (4.0 * t))
        total += term
        if term <= 1e-17 * total or term == 0.0:
            return total
        k += 1


def image_count(a, t, tol, cap=IMAGE_CAP):
    """Smallest n >= 1 whose image-sum tail bound is <= tol.

    Returns ``ImageCount(n, capped, bound)``; ``capped`` is set (with
    n = cap) when the tolerance would need more than ``cap`` images.
    """
    if not (a > 0 and t > 0 and tol > 0):
        raise DomainError("image_count needs a, t, tol > 0")
    for n in range(1, cap + 1):
        bound = image_tail_bound(a, t, n)
        if bound <= tol:
            return ImageCount(n, False, bound)
    return ImageCount(cap, True, image_tail_bound(a, t, cap))


def eigen_terms(a, t, tol):
    """Sine-series length for the interval kernel at large t."""
    return 1 + math.ceil(a * math.sqrt(abs(math.log(tol)) / t) / math.pi)


def halfline_reduced(x, y, t, v=None):
    """p_{R+}(x, y; t) / (x y)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if v is None:
        v = x - y
    return gauss(v, t) * expm1c(-x * y / t) / t


def pair_reduced(x, y, D, t, v=None):
    """P_D(x, y) / (x y) for x, y >= 0 (see module docstring)."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if v is None:
        v = x - y
    u = x + y
    c = _norm(t)
    k = D / (2.0 * t)
    A, B = k * x, k * y
    lo = np.minimum(A, B)
    hi = np.maximum(A, B)
    xmin = np.minimum(x, y)
    xmax = np.maximum(x, y)
    small = lo < 1.0
    with np.errstate(over="ignore", invalid="ignore", divide="ignore", under="ignore"):
        # min(A, B) < 1: P_D = pref * expm1(-xy/t + log1p(r)) with
        # r = 2 sinh A sinh B / cosh(A - B) >= 0, all in reduced form
        pref = c * (np.exp(-(D + v) ** 2 / (4.0 * t)) + np.exp(-(D - v) ** 2 / (4.0 * t)))
        moderate = hi < 20.0
        Am = np.where(moderate, A, 0.0)
        Bm = np.where(moderate, B, 0.0)
        r_xy_mod = 2.0 * k * k * sinhc(Am) * sinhc(Bm) / np.cosh(Am - Bm)
        e = np.exp(-2.0 * (hi - lo))
        lo_s = np.where(small, lo, 0.0)
        r_ymin = (D / t) * (expm1c(2.0 * lo_s) - e * expm1c(-2.0 * lo_s)) / (1.0 + e)
        r_xy_big = r_ymin / np.where(xmax > 0.0, xmax, 1.0)
        r_xy = np.where(moderate, r_xy_mod, r_xy_big)
        r = r_xy * x * y
        w_xy = -1.0 / t + log1pc(r) * r_xy
        w = w_xy * x * y
        reduced_small = pref * expm1c(w) * w_xy

        # min(A, B) >= 1: no cancellation, sum the four Gaussians directly
        g = lambda z: np.exp(-z * z / (4.0 * t))
        direct = c * (g(D - u) + g(D + u) - g(D - v) - g(D + v))
        xy = np.where(small, 1.0, x * y)
        reduced_big = direct / xy
    return np.where(small, reduced_small, reduced_big)


def interval_reduced(xh, yh, t, a, same_side=True, n_images=None, tol=1e-300, v=None):
    """p_{[0,a]} / (xh yh) in corner coordinates.

    ``xh``, ``yh`` are the distances of the two points to the endpoint each is
    measured from; ``same_side`` says whether that endpoint is the same one
    (both from 0 or both from a) or opposite ones.  For t > a**2 the sine
    series is used instead of images.
    """
    xh = np.asarray(xh, dtype=float)
    yh = np.asarray(yh, dtype=float)
    if t / (a * a) > EIGEN_SWITCH:
        return _eigen_reduced(xh, yh, t, a, same_side, tol)
    if n_images is None:
        n_images = image_count(a, t, tol).n
    if v is None:
        v = xh - yh
    if same_side:
        out = halfline_reduced(xh, yh, t, v)
        for m in range(1, n_images + 1):
            out = out - pair_reduced(xh, yh, 2.0 * m * a, t, v)
        return out
    out = 0.0
    for k in range(1, n_images + 2):
        out = out + pair_reduced(xh, yh, (2.0 * k - 1.0) * a, t, v)
    return out


def _eigen_reduced(xh, yh, t, a, same_side, tol):
    n = eigen_terms(a, t, tol)
    out = np.zeros(np.broadcast(xh, yh).shape)
    for k in range(1, n + 1):
        lam = (k * math.pi / a) ** 2
        # sin(k pi x / a) / x = (k pi / a) sinc(k x / a)
        term = (2.0 / a) * math.exp(-lam * t) * lam * np.sinc(k * xh / a) * np.sinc(k * yh / a)
        out = out + (term if (same_side or k % 2 == 1) else -term)
    return out


def _corner_coords(x, a):
    x = np.asarray(x, dtype=float)
    right = x > 0.5 * a
    return np.where(right, a - x, x), right


def interval_kernel(x1, x2, t, a, tol=1e-15, cap=IMAGE_CAP):
    """p_{[0,a]}(x1, x2; t) for array arguments, with its truncation data."""
    xh, xr = _corner_coords(x1, a)
    yh, yr = _corner_coords(x2, a)
    same = xr == yr
    if t / (a * a) > EIGEN_SWITCH:
        n = eigen_terms(a, t, tol)
        bound = (2.0 / a) * math.exp(-((n + 1) * math.pi / a) ** 2 * t)
        bound /= -math.expm1(-((math.pi / a) ** 2) * t * (2 * n + 3))
        red_same = _eigen_reduced(xh, yh, t, a, True, tol)
        red_diff = _eigen_reduced(xh, yh, t, a, False, tol)
    else:
        n, capped, bound = image_count(a, t, tol, cap)
        if capped:
            raise ConvergenceError(f"interval kernel needs more than {cap} images for tol={tol}")
        red_same = interval_reduced(xh, yh, t, a, True, n)
        red_diff = interval_reduced(xh, yh, t, a, False, n)
    value = np.where(same, red_same, red_diff) * xh * yh
    return value, n, bound


def kernel(dom, x1, x2, t, tol=1e-15, cap=IMAGE_CAP):
    """Dirichlet heat kernel of ``dom`` at (x1, x2; t).

    Accepts scalars or broadcastable arrays.  Returns a :class:`KernelEval`
    whose ``value`` is a float for scalar input.
    """
    if not (t > 0 and math.isfinite(t)):
        raise DomainError("t must be positive and finite")
    if not tol > 0:
        raise DomainError("tol must be positive")
    x1a = np.asarray(x1, dtype=float)
    x2a = np.asarray(x2, dtype=float)
    if not (np.all(dom.contains(x1a)) and np.all(dom.contains(x2a))):
        raise DomainError(f"points outside the closure of {dom.kind.value}")
    kind = dom.kind
    images, bound = 0, 0.0
    if kind is DomainKind.FULL_LINE:
        value = gauss(x1a - x2a, t)
    elif kind is DomainKind.HALF_LINE:
        value = gauss(x1a - x2a, t) * -np.expm1(-x1a * x2a / t)
    elif kind is DomainKind.LEFT_RAY:
        a = dom.a
        value = gauss(x1a - x2a, t) * -np.expm1(-(a - x1a) * (a - x2a) / t)
    else:
        value, images, bound = interval_kernel(x1a, x2a, t, dom.a, tol, cap)
    if np.ndim(value) == 0:
        value = float(value)
    return KernelEval(value, images, bound)
