"""Independent reference computations used as test oracles.

Each helper here avoids the package code path it checks: plain bisection
instead of the bracketed Newton solver, mpmath quadrature instead of scipy,
brute-force scans instead of closed forms.
"""

import math

import mpmath

K_B = 6.02214076e23 * (1.602176634e-19) ** 2 / (8 * math.pi * 8.8541878128e-12) * 1e7


def bisect_lambda(eps, lo=0.0, hi=10.0, iters=200):
    f = lambda x: x * x * (1 + x) ** 4 - 16 * eps
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if f(mid) > 0:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def charging_ratio_mp(h1):
    mpmath.mp.dps = 30
    val = mpmath.quad(lambda q: q / (1 + h1 * mpmath.sqrt(q)), [0, 1])
    return float(2 * (1 + h1) * val)


def golden_min(f, a, b, tol=1e-9):
    """Golden-section minimiser; resolves the argument only to about sqrt(eps)."""
    g = (math.sqrt(5) - 1) / 2
    c, d = b - g * (b - a), a + g * (b - a)
    while abs(b - a) > tol:
        if f(c) < f(d):
            b = d
        else:
            a = c
        c, d = b - g * (b - a), a + g * (b - a)
    return 0.5 * (a + b)


def bisect_root(f, a, b, iters=200):
    """Root of an increasing function on [a, b] by plain bisection."""
    for _ in range(iters):
        m = 0.5 * (a + b)
        if f(m) > 0:
            b = m
        else:
            a = m
    return 0.5 * (a + b)


def conductor_sphere_energy(r, R, q=1.0):
    """Reaction energy of a charge at distance r from the centre of a grounded sphere."""
    return -K_B * q * q * R / (R * R - r * r)


def central_diff(f, x, h):
    return (f(x + h) - f(x - h)) / (2 * h)
