"""Independent reference computations used by several test modules."""

import math

import numpy as np
from scipy import integrate, optimize


def sign_convolution_quad(exact, n, x):
    """``int_0^{2pi} K(x - u) sgn sin(nu) du`` by adaptive quadrature of the closed form.

    The integrand is split at the sign changes of ``sin(nu)`` and at the
    kernel's possible jump ``u = x``.
    """
    total = 0.0
    for k in range(2 * n):
        lo, hi = k * math.pi / n, (k + 1) * math.pi / n
        s = 1.0 if k % 2 == 0 else -1.0
        pts = [x % (2 * math.pi)] if lo < x % (2 * math.pi) < hi else None
        val, _ = integrate.quad(lambda u: float(exact(np.array([x - u]))[0]), lo, hi, points=pts,
                                epsabs=1e-13, epsrel=1e-13, limit=200)
        total += s * val
    return total


def sign_convolution_sup(exact, n, samples=64):
    """``max_x |(K*phi_n)(x)|`` from the quadrature oracle, refined by Brent's method."""
    xs = np.linspace(0, 2 * math.pi / n, samples, endpoint=False)
    vals = np.array([abs(sign_convolution_quad(exact, n, x)) for x in xs])
    j = int(np.argmax(vals))
    h = xs[1] - xs[0]
    res = optimize.minimize_scalar(lambda x: -abs(sign_convolution_quad(exact, n, x)),
                                   bounds=(xs[j] - h, xs[j] + h), method="bounded",
                                   options={"xatol": 1e-10})
    return max(vals[j], -res.fun)


def favard_series(r, terms=200000):
    """``K_r = (4/pi) sum_j (-1)^{j(r+1)} / (2j+1)^{r+1}`` summed directly."""
    j = np.arange(terms, dtype=float)
    return 4 / math.pi * float(np.sum((-1.0) ** (j * (r + 1)) / (2 * j + 1) ** (r + 1)))
