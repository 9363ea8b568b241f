"""Closed-form coefficients: Gamma, c(alpha1, alpha2), ball constants, log-case constant.

The boundary coefficient is

    c(a1, a2) = 2**-s pi**-1/2 Gamma((2 - s)/2)
                * int_0^1 (r**-a1 + r**-a2) ((1 - r)**(s-2) - (1 + r)**(s-2)) dr,

s = a1 + a2, which converges for 1 < s (and a1, a2 < 2).  For s <= 1 the
integral is continued analytically: on [1/2, 1] the Taylor polynomial of
g(r) = r**-a1 + r**-a2 about r = 1 is removed from the (1 - r)**(s-2) factor
and integrated in closed form, leaving a remainder that quadrature handles.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, PoleError
from .quadrature import integrate_1d

EULER_GAMMA = 0.57721566490153286061

# Refuse evaluation this close to a pole.
POLE_GUARD = 1e-8

# Taylor terms kept when evaluating the subtracted remainder as a series.
_SERIES_TERMS = 120


@dataclass(frozen=True)
class AlphaPair:
    """Singularity exponents of the two weights delta**-alpha."""

    alpha1: float
    alpha2: float

    def __post_init__(self):
        for name in ("alpha1", "alpha2"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise DomainError(f"{name} must be finite")
            if v >= 2.0:
                raise DomainError(f"{name} = {v} must be < 2")

    @property
    def s(self):
        return self.alpha1 + self.alpha2

    @property
    def is_integer_sum(self):
        return abs(self.s - round(self.s)) < POLE_GUARD

    @property
    def is_log_case(self):
        return abs(self.s - 1.0) < POLE_GUARD

    def swapped(self):
        return AlphaPair(self.alpha2, self.alpha1)

    def shifted(self, k1, k2):
        return AlphaPair(self.alpha1 - k1, self.alpha2 - k2)


@dataclass(frozen=True)
class BallCoeffs:
    b0: float
    b1: float
    b2: float
    b3: float
    radius_power: dict = field(default_factory=dict)


def _as_pair(ap, alpha2=None):
    if isinstance(ap, AlphaPair):
        return ap
    if alpha2 is None:
        return AlphaPair(*ap)
    return AlphaPair(ap, alpha2)


def gamma_fn(x):
    """Gamma function; raises :class:`PoleError` at 0, -1, -2, ..."""
    x = float(x)
    if x <= 0 and x == math.floor(x):
        raise PoleError(f"Gamma has a pole at {x}")
    return math.gamma(x)


def _prefactor(s):
    return 2.0 ** (-s) / math.sqrt(math.pi) * gamma_fn((2.0 - s) / 2.0)


def _check_c_poles(s):
    if abs(s - 2.0) < POLE_GUARD:
        raise PoleError(f"c has a pole at s = 2 (s = {s})")
    # (1 - r)**(s-2) against the k-th Taylor coefficient: pole at s = 1 - k,
    # removable for odd k because the coefficient vanishes there.
    if s < 1.0 + POLE_GUARD:
        k = round(1.0 - s)
        if k % 2 == 0 and abs(s - (1.0 - k)) < POLE_GUARD:
            raise PoleError(f"c has a pole at s = {1 - k} (s = {s})")


def _taylor_coeffs(a1, a2, n):
    """Coefficients of (1 - u)**-a1 + (1 - u)**-a2 in powers of u."""
    out = np.empty(n)
    p1 = p2 = 1.0
    for k in range(n):
        out[k] = p1 + p2
        p1 *= (a1 + k) / (k + 1)
        p2 *= (a2 + k) / (k + 1)
    return out


def _odd_term_over_pole(a1, s, k):
    """[(a1)_k + (s - a1)_k] / (k! (s - 1 + k)) for odd k, without cancellation.

    With s0 = 1 - k, (a1)_k = -(s0 - a1)_k, so the numerator is a divided
    difference of the polynomial (z)_k between z = s - a1 and z = s0 - a1,
    which telescopes into a sum of products.
    """
    x = s - a1
    y = (1.0 - k) - a1
    total = 0.0
    for j in range(k):
        term = 1.0
        for i in range(j):
            term *= y + i
        for i in range(j + 1, k):
            term *= x + i
        total += term
    return total / math.factorial(k)


def expm1c(z):
    """expm1(z) / z, equal to 1 at z = 0."""
    z = np.asarray(z, dtype=float)
    safe = np.where(z == 0.0, 1.0, z)
    return np.where(z == 0.0, 1.0, np.expm1(safe) / safe)


def _bracket_over_r(r, s):
    # (1 - r)**(s-2) - (1 + r)**(s-2) = (1 + r)**(s-2) expm1(-2 (s-2) atanh r),
    # divided by r so that the r -> 0 zero is cancelled analytically
    z = -2.0 * (s - 2.0) * np.arctanh(r)
    return (1.0 + r) ** (s - 2.0) * expm1c(z) * (-2.0 * (s - 2.0)) * (np.arctanh(r) / r)


def _lower_half(a1, a2, s, tol):
    # int_0^1/2 g(r) [(1-r)^(s-2) - (1+r)^(s-2)] dr; integrand ~ r**(1 - a) at 0
    f = lambda r: (r ** (1.0 - a1) + r ** (1.0 - a2)) * _bracket_over_r(r, s)
    return integrate_1d(f, 0.0, 0.5, tol, rtol=tol).value


def _plus_branch(a1, a2, s, tol):
    # int_1/2^1 g(r) (1 + r)^(s-2) dr, a smooth integrand
    f = lambda r: (r ** -a1 + r ** -a2) * (1.0 + r) ** (s - 2.0)
    return integrate_1d(f, 0.5, 1.0, tol, rtol=tol).value


def _c_integral_continued(a1, a2, tol=1e-14):
    s = a1 + a2
    K = max(0, math.ceil(1.0 - s) + 1)
    coeffs = _taylor_coeffs(a1, a2, K + _SERIES_TERMS)

    subtracted = 0.0
    for k in range(K):
        if k % 2 == 1 and abs(s - (1.0 - k)) < 0.5:
            subtracted += _odd_term_over_pole(a1, s, k) * 0.5 ** (s - 1.0 + k)
        else:
            subtracted += coeffs[k] * 0.5 ** (s - 1.0 + k) / (s - 1.0 + k)

    # remainder sum_{k>=K} a_k u^k, evaluated as a series so that it keeps
    # full relative accuracy as u -> 0 (u = 1 - r <= 1/2)
    tail = coeffs[K:][::-1]

    def rem(u):
        return np.polyval(tail, u) * u ** (K + s - 2.0)

    remainder = integrate_1d(rem, 0.0, 0.5, tol, rtol=tol).value
    return (_lower_half(a1, a2, s, tol) + subtracted + remainder
            - _plus_branch(a1, a2, s, tol))


def _c_integral_direct(a1, a2, tol=1e-14):
    s = a1 + a2
    # (1 - r) is taken from the rule's exact endpoint distance
    f = lambda r, left, right: (r ** -a1 + r ** -a2) * right ** (s - 2.0)
    upper = integrate_1d(f, 0.5, 1.0, tol, rtol=tol, distances=True).value
    return _lower_half(a1, a2, s, tol) + upper - _plus_branch(a1, a2, s, tol)


def c_coef(ap, alpha2=None, *, method="continuation"):
    """Boundary coefficient c(alpha1, alpha2).

    Parameters
    ----------
    ap : AlphaPair or float
        The pair, or alpha1 when ``alpha2`` is given.
    method : {"continuation", "direct"}
        "continuation" works for every s off the poles; "direct" integrates
        the defining integral as written and needs 1 < s.
    """
    ap = _as_pair(ap, alpha2)
    a1, a2, s = ap.alpha1, ap.alpha2, ap.s
    _check_c_poles(s)
    if method == "direct":
        if s <= 1.0:
            raise DomainError("the direct integral converges only for s > 1")
        integral = _c_integral_direct(a1, a2)
    elif method == "continuation":
        # sort so that swapped pairs run the identical computation
        lo, hi = sorted((a1, a2))
        integral = _c_integral_continued(lo, hi)
    else:
        raise DomainError(f"unknown method {method!r}")
    return _prefactor(s) * integral


def ball_b_coeffs(ap, alpha2=None):
    """Constants b0..b3 of the ball expansion (b1 = b3 = 0)."""
    ap = _as_pair(ap, alpha2)
    s = ap.s
    for bad in (-1.0, 0.0, 1.0, 2.0, 3.0):
        if abs(s - bad) < POLE_GUARD:
            raise PoleError(f"ball coefficients are singular at s = {bad:g}")
    b0 = -8.0 * math.pi / ((s - 1.0) * (s - 2.0) * (s - 3.0))
    b2 = 8.0 * math.pi * ap.alpha1 * ap.alpha2 / ((s + 1.0) * s * (s - 1.0))
    powers = {j: 3.0 - j - s for j in range(4)}
    return BallCoeffs(b0, 0.0, b2, 0.0, powers)


def _check_log_alpha(alpha1):
    if not (-1.0 < alpha1 < 2.0):
        raise DomainError(f"alpha1 = {alpha1} outside (-1, 2)")


def _q_bracket_over_q(q, alpha):
    """Bracket / q on [0, 1/2], with the q -> 0 cancellation 1 + 1 - 2 removed.

    With L = log((1+q)/(1-q)) = 2 atanh q the bracket is
    expm1((alpha-1) L) + expm1(-alpha L) + 2 (q + q**2/(1 + r)) / r,
    r = sqrt(1 + q**2); each piece is O(q) and is divided by q analytically.
    """
    L_over_q = 2.0 * np.arctanh(q) / q
    L = L_over_q * q
    r = np.sqrt(1.0 + q * q)
    return ((alpha - 1.0) * expm1c((alpha - 1.0) * L) * L_over_q
            - alpha * expm1c(-alpha * L) * L_over_q
            + 2.0 * (1.0 + q / (1.0 + r)) / r)


def _q_bracket(q, log_qc, qc, alpha):
    # log((1+q)/(1-q)) with log(1 - q) supplied by the caller
    L = np.log1p(q) - log_qc
    return (np.exp((alpha - 1.0) * L) + np.exp(-alpha * L)
            - 2.0 * qc / np.sqrt(1.0 + q * q))


def q_integrand(q, alpha1):
    """Integrand of the log-case q-integral (measure dq/q), for q in (0, 1)."""
    q = np.asarray(q, dtype=float)
    small = q <= 0.5
    qs = np.where(small, q, 0.25)
    ql = np.where(small, 0.75, q)
    qc = 1.0 - ql
    return np.where(small, _q_bracket_over_q(qs, alpha1),
                    _q_bracket(ql, np.log(qc), qc, alpha1) / ql)


def q_integral(alpha1, tol=1e-13):
    """I(alpha) = int_0^1 q**-1 {((1+q)/(1-q))**(alpha-1) + ((1-q)/(1+q))**alpha
    - 2 (1-q) (1+q**2)**-1/2} dq, with alpha = alpha1 and alpha2 = 1 - alpha1.

    On [1/2, 1] the substitution 1 - q = u**m is used.  The endpoint powers
    are (1-q)**(1-alpha) and (1-q)**alpha; m = 2 (q = 1 - u**2) suffices unless
    the smaller power p is below -1/2, where m = 1/(p + 1) makes the
    transformed integrand bounded at u = 0.
    """
    alpha1 = float(alpha1)
    _check_log_alpha(alpha1)
    p = min(1.0 - alpha1, alpha1)
    m = max(2.0, 1.0 / (p + 1.0))

    def near_zero(q):
        return _q_bracket_over_q(q, alpha1)

    def near_one(u):
        # Jacobian m u**(m-1) folded into the exponentials to avoid overflow
        log_u = np.log(u)
        qc = u ** m
        q = 1.0 - qc
        L = np.log1p(q) - m * log_u
        jac = math.log(m) + (m - 1.0) * log_u
        terms = (np.exp((alpha1 - 1.0) * L + jac) + np.exp(-alpha1 * L + jac)
                 - 2.0 * m * qc * u ** (m - 1.0) / np.sqrt(1.0 + q * q))
        return terms / q

    lo = integrate_1d(near_zero, 0.0, 0.5, tol, rtol=tol)
    hi = integrate_1d(near_one, 0.0, 0.5 ** (1.0 / m), tol, rtol=tol)
    return lo.value + hi.value


def log_case_constant(alpha1, chi_integral):
    """t-independent constant of the log-case expansion.

    gamma + 4 log(sqrt 2 - 1) + 4 log 2 + chi_integral + I(alpha1), where
    ``chi_integral`` is 2 int_eps^{a/2} chi1 chi2 / x dx for the cutoffs in use.
    The full small-t form is log(eps**2 / t) plus this constant.
    """
    base = EULER_GAMMA + 4.0 * math.log(math.sqrt(2.0) - 1.0) + 4.0 * math.log(2.0)
    return base + chi_integral + q_integral(alpha1)
