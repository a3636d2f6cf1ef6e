"""Independent reference computations used only by the tests.

None of these share code with the package: the d-matrix comes from Wigner's
factorial sum (exact rationals, small N) or from ``scipy.linalg.expm`` of the
dense S_y matrix, and correlations come from an explicit N**2 state vector.
"""
from fractions import Fraction
from math import factorial, sqrt, cos, sin

import numpy as np
from scipy.linalg import expm


def spin_y(two_s):
    """Dense S_y, basis ordered m = -s..+s."""
    s = two_s / 2
    m = np.arange(two_s + 1) - s
    raise_ = np.diag(np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] + 1)), -1)  # <m+1|S+|m>
    return (raise_ - raise_.T) / 2j


def d_expm(two_s, theta):
    d = expm(-1j * theta * spin_y(two_s))
    assert np.abs(d.imag).max() < 1e-10
    return d.real


def d_factorial(two_s, theta):
    """Wigner's explicit sum; exact coefficients, float trig factors."""
    N = two_s + 1
    c, s_ = cos(theta / 2), sin(theta / 2)
    out = np.zeros((N, N))
    for i in range(N):
        for j in range(N):
            # doubled quantum numbers: J = 2j, A = 2m', B = 2m
            J, A, B = two_s, 2 * i - two_s, 2 * j - two_s
            jpa, jma, jpb, jmb = (J + A) // 2, (J - A) // 2, (J + B) // 2, (J - B) // 2
            norm = factorial(jpa) * factorial(jma) * factorial(jpb) * factorial(jmb)
            total = 0.0
            for k in range(0, J + 1):
                d1, d2, d3 = jpb - k, jma - k, k + (A - B) // 2
                if min(d1, d2, d3) < 0:
                    continue
                coef = Fraction((-1) ** d3, factorial(d1) * factorial(k) * factorial(d2) * factorial(d3))
                total += float(coef) * c ** (J - 2 * k + (B - A) // 2) * s_ ** (2 * k + (A - B) // 2)
            out[i, j] = sqrt(norm) * total
    return out


def singlet(two_s):
    """|Psi> = N**-1/2 sum_m (-1)**(s-m) |m, -m> as an N*N vector."""
    N = two_s + 1
    psi = np.zeros(N * N)
    for i in range(N):  # m = i - s, -m has index N-1-i, s - m = two_s - i
        psi[i * N + (N - 1 - i)] = (-1) ** (two_s - i)
    return psi / np.sqrt(N)


def brute_correlation(two_s, P, theta):
    """<Psi| O(a) (x) O(b) |Psi> with O(b) = d diag(signs) d^T."""
    N = two_s + 1
    signs = np.array([1 - 2 * ((P >> i) & 1) for i in range(N)], dtype=float)
    oa = np.diag(signs)
    d = d_expm(two_s, theta)
    ob = d @ oa @ d.T
    psi = singlet(two_s)
    return float(psi @ np.kron(oa, ob) @ psi)
