"""Reference values for the integration tests, computed with mpmath.

Run: python3 oracle.py
"""
from mpmath import mp, mpf, besseli, exp, cos, pi, quad, inf, gamma, sqrt

mp.dps = 30
BREAKS = [0, 1, 10, 100, 1000, 10**4, 10**5, 10**6, inf]


def g(d, x):
    """g(0, x) on Z^d, normalized by pi = 2d."""
    f = lambda t: exp(-t) * mp.fprod(besseli(abs(c), t / d) for c in x)
    return quad(f, BREAKS) / (2 * d)


def orthant_diag(d):
    """2d G_O(0, 0)."""
    f = lambda t: exp(-t) * (besseli(0, t / d) + besseli(1, t / d)) ** d
    return quad(f, BREAKS)


def strip(d, width, x, y):
    """Strip Green's function with the images summed inside the integral."""
    r1 = y[0] - x[0]
    r2 = 1 + x[0] + y[0]
    period = 2 * width
    thetas = [pi * j / width for j in range(period)]

    def f(t):
        z = t / d
        kernel = sum(exp(z * cos(th)) * (cos(th * r1) + cos(th * r2)) for th in thetas) / period
        rest = mp.fprod(besseli(abs(b - a), z) for a, b in zip(x[1:], y[1:]))
        return exp(-t) * kernel * rest

    return quad(f, BREAKS) / (2 * d)


watson = sqrt(6) / (32 * pi**3) * gamma(mpf(1) / 24) * gamma(mpf(5) / 24) \
    * gamma(mpf(7) / 24) * gamma(mpf(11) / 24)
print("watson", watson)
print("g3(0)", g(3, (0, 0, 0)))
print("g3(e1)", g(3, (1, 0, 0)))
print("g3(1,1,0)", g(3, (1, 1, 0)))
print("g3(1,1,1)", g(3, (1, 1, 1)))
print("g3(5,0,0)", g(3, (5, 0, 0)))
print("g3(8e1)", g(3, (8, 0, 0)))
print("g3(16e1)", g(3, (16, 0, 0)))
print("g4(0)", g(4, (0, 0, 0, 0)))
print("g5(2,1,0,0,1)", g(5, (2, 1, 0, 0, 1)))
for d in range(3, 11):
    print("2d G_O(0,0) d=%d" % d, orthant_diag(d))
print("strip(4,2) 0,0", strip(4, 2, (0, 0, 0, 0), (0, 0, 0, 0)))
print("strip(4,3) (1,0,0,0),(2,1,0,0)", strip(4, 3, (1, 0, 0, 0), (2, 1, 0, 0)))
print("strip(5,4) (0,0,0,0,0),(3,0,1,0,0)", strip(5, 4, (0, 0, 0, 0, 0), (3, 0, 1, 0, 0)))
