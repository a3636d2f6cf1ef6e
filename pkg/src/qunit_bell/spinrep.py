"""Spin bookkeeping, Wigner small-d matrices and Clebsch-Gordan coefficients.

Spins are stored exactly as ``two_s = 2s``.  Basis index ``i`` of every
N x N array corresponds to the magnetic quantum number ``m = i - s``, so row
0 is ``m = -s`` and the last row is ``m = +s``.

The signed rotation matrix ``d^s(theta) = exp(-i theta S_y)`` is built from
the eigendecomposition of the spin generator rather than from the factorial
sum, which loses all precision long before N = 50.  ``S_y`` is unitarily
equivalent to the real symmetric tridiagonal ``S_x`` through the diagonal
phase ``diag((-i)**k)``, so only a real tridiagonal eigenproblem is solved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import numpy as np
from scipy.linalg import eigh_tridiagonal

__all__ = [
    "SpinLabel",
    "RotationTable",
    "wigner_d",
    "wigner_d_stack",
    "wigner_d_squared",
    "wigner_d_squared_stack",
    "unique_element_count",
    "cg_coefficient",
    "twice",
]


def twice(x) -> int:
    """Return ``2*x`` as an int, rejecting anything that is not a half-integer."""
    if isinstance(x, SpinLabel):
        return x.two_s
    if isinstance(x, str):
        x = Fraction(x)
    if isinstance(x, float):
        if not math.isfinite(x):
            raise ValueError(f"not a half-integer: {x!r}")
        x = Fraction(x)
    if not isinstance(x, Rational):
        raise TypeError(f"expected a half-integer, got {type(x).__name__}")
    doubled = Fraction(x) * 2
    if doubled.denominator != 1:
        raise ValueError(f"not a half-integer: {x}")
    return int(doubled)


@dataclass(frozen=True, order=True)
class SpinLabel:
    """Exact spin ``s`` held as ``two_s``; the Hilbert space has N = two_s + 1 levels."""

    two_s: int

    def __post_init__(self):
        if not isinstance(self.two_s, (int, np.integer)) or isinstance(self.two_s, bool):
            raise TypeError("two_s must be an integer")
        if self.two_s < 1:
            raise ValueError(f"two_s must be >= 1 (N >= 2), got {self.two_s}")
        object.__setattr__(self, "two_s", int(self.two_s))

    @classmethod
    def parse(cls, text) -> "SpinLabel":
        """Build from ``"3/2"``, ``"2"``, ``1.5`` or a Fraction."""
        return cls(twice(text))

    @property
    def s(self) -> Fraction:
        return Fraction(self.two_s, 2)

    @property
    def N(self) -> int:
        return self.two_s + 1

    @property
    def is_integer(self) -> bool:
        return self.two_s % 2 == 0

    def m_values(self) -> np.ndarray:
        return np.arange(self.N) - self.two_s / 2

    def __str__(self):
        return str(self.s)


def _as_spin(spin) -> SpinLabel:
    return spin if isinstance(spin, SpinLabel) else SpinLabel.parse(spin)


@lru_cache(maxsize=None)
def _generator_eigensystem(two_s: int):
    # S_x couples m and m+1 with 0.5*sqrt(s(s+1) - m(m+1)); m runs -s..s-1.
    s = two_s / 2
    m = np.arange(two_s) - s
    offdiag = 0.5 * np.sqrt(s * (s + 1) - m * (m + 1))
    _, vecs = eigh_tridiagonal(np.zeros(two_s + 1), offdiag)
    # the spectrum is exactly -s..s; use it verbatim instead of the rounded values
    eigvals = np.arange(two_s + 1) - s
    k = np.arange(two_s + 1)
    phase = (k[:, None] - k[None, :]) % 4
    cos_sign = np.select([phase == 0, phase == 2], [1.0, -1.0], 0.0)
    sin_sign = np.select([phase == 1, phase == 3], [-1.0, 1.0], 0.0)
    for arr in (vecs, eigvals, cos_sign, sin_sign):
        arr.setflags(write=False)
    return eigvals, vecs, cos_sign, sin_sign


def wigner_d_stack(spin, thetas) -> np.ndarray:
    """Signed d-matrices for an array of angles, shape ``(len(thetas), N, N)``."""
    spin = _as_spin(spin)
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    if not np.all(np.isfinite(thetas)):
        raise ValueError("rotation angle must be finite")
    eigvals, vecs, cos_sign, sin_sign = _generator_eigensystem(spin.two_s)
    arg = thetas[:, None] * eigvals[None, :]
    re = np.einsum("jl,gl,kl->gjk", vecs, np.cos(arg), vecs)
    im = np.einsum("jl,gl,kl->gjk", vecs, np.sin(arg), vecs)
    return re * cos_sign + im * sin_sign


def wigner_d(spin, theta: float) -> np.ndarray:
    """Signed matrix ``d[m'+s, n+s] = <m'| exp(-i theta S_y) |n>``."""
    return wigner_d_stack(spin, [theta])[0]


def wigner_d_squared_stack(spin, thetas) -> np.ndarray:
    """``|d|**2`` for an array of angles, shape ``(len(thetas), N, N)``."""
    return np.square(wigner_d_stack(spin, thetas))


@dataclass(frozen=True)
class RotationTable:
    """Squared rotation elements ``sq[m'+s, n+s] = |d^s_{m',n}(theta)|**2``."""

    spin: SpinLabel
    theta: float
    sq: np.ndarray

    def entry(self, m_prime, n) -> float:
        s2 = self.spin.two_s
        i, j = twice(m_prime) + s2, twice(n) + s2
        if i % 2 or j % 2 or not (0 <= i <= 2 * s2 and 0 <= j <= 2 * s2):
            raise ValueError(f"({m_prime}, {n}) not valid for spin {self.spin}")
        return float(self.sq[i // 2, j // 2])


@lru_cache(maxsize=2048)
def _cached_table(two_s: int, theta: float) -> RotationTable:
    sq = wigner_d_squared_stack(SpinLabel(two_s), [theta])[0]
    sq.setflags(write=False)
    return RotationTable(SpinLabel(two_s), theta, sq)


def wigner_d_squared(spin, theta: float) -> RotationTable:
    """Memoized squared-element table for one angle.

    The returned array is read-only; repeated calls with the same spin and
    angle return the same object.
    """
    spin = _as_spin(spin)
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError("rotation angle must be finite")
    return _cached_table(spin.two_s, theta)


def unique_element_count(spin) -> int:
    """Independent entries of the squared d table.

    Off-diagonal index pairs are grouped under (a,b)~(b,a)~(-a,-b)~(-b,-a);
    diagonal entries are not counted because each row sums to one.
    """
    N = _as_spin(spin).N
    reps = set()
    for a in range(N):
        for b in range(N):
            if a == b:
                continue
            ra, rb = N - 1 - a, N - 1 - b
            reps.add(min((a, b), (b, a), (ra, rb), (rb, ra)))
    return len(reps)


def _fact(n: int) -> int:
    return math.factorial(n)


def cg_coefficient(j1, j2, j, m1, m2, m) -> float:
    """Clebsch-Gordan coefficient ``<j1 m1; j2 m2 | j m>`` (Condon-Shortley).

    Evaluated with Racah's closed form in exact integer arithmetic; only the
    final square root is taken in floating point.
    """
    J1, J2, J, M1, M2, M = (twice(x) for x in (j1, j2, j, m1, m2, m))
    for jj, mm in ((J1, M1), (J2, M2), (J, M)):
        if jj < 0:
            raise ValueError("angular momenta must be non-negative")
        if (jj - mm) % 2:
            raise ValueError("m - j must be an integer")
        if abs(mm) > jj:
            raise ValueError(f"|m| = {mm / 2} exceeds j = {jj / 2}")
    if (J1 + J2 + J) % 2 or not abs(J1 - J2) <= J <= J1 + J2:
        raise ValueError(f"({J1 / 2}, {J2 / 2}, {J / 2}) violates the triangle rule")
    if M != M1 + M2:
        return 0.0

    # all quantities below are integers once halved
    a = (J1 + J2 - J) // 2
    b = (J1 - M1) // 2
    c = (J2 + M2) // 2
    d = (J - J2 + M1) // 2
    e = (J - J1 - M2) // 2
    pref = Fraction(
        (J + 1) * _fact((J + J1 - J2) // 2) * _fact((J - J1 + J2) // 2) * _fact(a),
        _fact((J1 + J2 + J) // 2 + 1),
    )
    pref *= (
        _fact((J + M) // 2) * _fact((J - M) // 2)
        * _fact((J1 - M1) // 2) * _fact((J1 + M1) // 2)
        * _fact((J2 - M2) // 2) * _fact((J2 + M2) // 2)
    )
    total = Fraction(0)
    for k in range(max(0, -d, -e), min(a, b, c) + 1):
        denom = _fact(k) * _fact(a - k) * _fact(b - k) * _fact(c - k) * _fact(d + k) * _fact(e + k)
        total += Fraction((-1) ** k, denom)
    if total == 0:
        return 0.0
    return math.copysign(math.sqrt(pref * total * total), total)
