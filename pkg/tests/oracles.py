"""High-precision reference values, computed with mpmath independently of the package.

Run ``python tests/oracles.py`` to regenerate the numbers frozen in the tests.
Nothing in here imports ``heatcontent``.
"""

import mpmath as mp

mp.mp.dps = 50


def c_direct(a1, a2):
    """Brute-force quadrature of the defining rho-integral (needs a1 + a2 > 1)."""
    a1, a2 = mp.mpf(a1), mp.mpf(a2)
    s = a1 + a2

    def f(r):
        # the bracket cancels to O(r) near 0; extra digits keep it meaningful
        with mp.workdps(400):
            return (r ** -a1 + r ** -a2) * ((1 - r) ** (s - 2) - (1 + r) ** (s - 2))

    # geometric breakpoints resolve the r^(1 - a) endpoint behaviour
    pts = [0] + [mp.mpf(10) ** -k for k in range(30, 0, -1)] + [mp.mpf(1) / 2, 1]
    integral = mp.quad(f, pts)
    return 2 ** -s / mp.sqrt(mp.pi) * mp.gamma((2 - s) / 2) * integral


def c_closed(a1, a2):
    """Beta/hypergeometric form, valid by analytic continuation for any s off the poles."""
    a1, a2 = mp.mpf(a1), mp.mpf(a2)
    s = a1 + a2
    total = mp.mpf(0)
    for a in (a1, a2):
        total += mp.gamma(1 - a) * mp.gamma(s - 1) / mp.gamma(s - a)
        total -= mp.hyp2f1(2 - s, 1 - a, 2 - a, -1) / (1 - a)
    return 2 ** -s / mp.sqrt(mp.pi) * mp.gamma((2 - s) / 2) * total


def q_integral(alpha):
    """Log-case q-integral with measure dq/q, via q = 1 - u^2 on [1/2, 1]."""
    alpha = mp.mpf(alpha)

    def br(q, qc):
        return (((1 + q) / qc) ** (alpha - 1) + (qc / (1 + q)) ** alpha
                - 2 * qc / mp.sqrt(1 + q * q))

    def left_f(q):
        with mp.workdps(400):
            return br(q, 1 - q) / q

    left = mp.quad(left_f, [0, mp.mpf(1) / 2])
    right = mp.quad(lambda u: br(1 - u * u, u * u) / (1 - u * u) * 2 * u,
                    [0, mp.sqrt(mp.mpf(1) / 2)])
    return left + right


def q_integral_phi(alpha):
    """Same constant written as the angular integral over [0, pi/4]."""
    alpha = mp.mpf(alpha)

    def f(p):
        c, s = mp.cos(p), mp.sin(p)
        big = (c + s) ** (alpha - 1) / (c - s) ** (alpha - 1) + (c - s) ** alpha / (c + s) ** alpha
        return (big - 2 * (c - s)) / (c * s)

    return mp.quad(f, [0, mp.pi / 8, mp.pi / 4])


def ball_fourier(alpha, n, a=1):
    """int_0^a (a-r)^-alpha sin(n pi r / a) r dr, closed form.

    With u = a - r this is (-1)**(n+1) Im[a J(1 - alpha) - J(2 - alpha)],
    J(b) = int_0^a u**(b-1) e^{i k u} du = (-ik)**-b gamma(b, -ika).
    """
    alpha, a = mp.mpf(alpha), mp.mpf(a)
    k = n * mp.pi / a
    z = -1j * k

    def J(b):
        return z ** (-b) * mp.gammainc(b, 0, z * a)

    sign = 1 if n % 2 == 1 else -1
    return sign * mp.im(a * J(1 - alpha) - J(2 - alpha))


def interval_kernel(x, y, t, a=1, images=30):
    """Plain image sum for the Dirichlet kernel on [0, a]."""
    x, y, t, a = (mp.mpf(v) for v in (x, y, t, a))
    g = lambda z: mp.exp(-z * z / (4 * t)) / mp.sqrt(4 * mp.pi * t)
    return mp.fsum(g(x - y + 2 * n * a) - g(x + y + 2 * n * a) for n in range(-images, images + 1))


def q_ball_series(a1, a2, ts, a=1, terms=60):
    """Eigenfunction series for the ball; ``ts`` is a sequence of times."""
    a = mp.mpf(a)
    coef = []
    for n in range(1, terms + 1):
        lam = (n * mp.pi / a) ** 2
        coef.append((lam, 8 * mp.pi / a * ball_fourier(a1, n, a) * ball_fourier(a2, n, a)))
    return [mp.fsum(mp.exp(-lam * mp.mpf(t)) * f for lam, f in coef) for t in ts]


if __name__ == "__main__":
    print("c_direct(0.7,0.8)  ", mp.nstr(c_direct(0.7, 0.8), 20))
    print("c_closed(0.7,0.8)  ", mp.nstr(c_closed(0.7, 0.8), 20))
    print("c_closed(0,0)      ", mp.nstr(c_closed(mp.mpf("1e-30"), mp.mpf("1e-30")), 20),
          mp.nstr(-2 / mp.sqrt(mp.pi), 20))
    for pair in [(0.3, 0.4), (-0.5, 0.2), (1.8, 1.4), (0.8, 1.4), (1.8, 0.4), (0.8, 0.4),
                 (-1.3, 0.8), (0.7, -1.2), (-0.3, -1.2)]:
        print("c_closed", pair, mp.nstr(c_closed(*pair), 20))
    for pair in [(1.8, 1.4), (0.8, 1.4), (1.8, 0.4)]:
        print("c_direct", pair, mp.nstr(c_direct(*pair), 20))
    for al in (0.5, 1.3, -0.3, 0.3, 0.8):
        print("I", al, mp.nstr(mp.re(q_integral(al)), 20), mp.nstr(mp.re(q_integral_phi(al)), 20))
    for pair in [(1.8, 1.4), (0.5, 0.5), (1.3, -0.3)]:
        for t, q in zip((0.01, 0.05), q_ball_series(*pair, (0.01, 0.05), terms=200)):
            print("Q_ball", pair, t, mp.nstr(q, 20))
