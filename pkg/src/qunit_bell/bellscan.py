"""Bell function in the planar geometry and its maximization over the angle.

With detector angles ``theta_ab = theta_a'b = theta_a'b' = theta`` and
``theta_ab' = 3 theta`` the Bell function reduces to

    B(theta) = |C(theta) - C(3 theta)| + 2 |C(theta)|.

B is even and 2*pi periodic, so the search runs over (0, pi].  It has kinks
wherever one of the absolute values changes sign, hence a dense grid first
and golden-section refinement only inside the winning bracket.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .correlator import NumericalGuardError, correlation, correlation_grid
from .parityobs import MAX_EVALUATION_N, ParityMask, _as_mask, sign_matrix
from .spinrep import SpinLabel, _as_spin

__all__ = [
    "CIRELSON",
    "FAMILIES",
    "BellResult",
    "bell_value",
    "bell_value_general",
    "bell_max",
    "bell_max_many",
    "golden_section_max",
    "family_mask",
    "classical_limit_scan",
]

CIRELSON = 2 * math.sqrt(2)
PLANAR = "planar(theta, 3theta, theta, theta)"
FAMILIES = ("near-identity", "alternating", "end-bits")
_MASK_BLOCK = 64
_INV_PHI = (math.sqrt(5) - 1) / 2


@dataclass(frozen=True)
class BellResult:
    mask: ParityMask
    theta_star: float
    b_max: float
    geometry: str = PLANAR
    violates: bool = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "theta_star", float(self.theta_star))
        object.__setattr__(self, "b_max", float(self.b_max))
        if not 0 <= self.b_max <= CIRELSON + 1e-9:
            raise NumericalGuardError(
                f"B={self.b_max!r} for P={self.mask.bits} outside [0, 2*sqrt(2)]"
            )
        object.__setattr__(self, "violates", bool(self.b_max > 2))

    @property
    def margin(self) -> float:
        """Distance above the local bound; negative means no violation."""
        return self.b_max - 2.0

    def to_dict(self) -> dict:
        return {
            "spin": str(self.mask.spin),
            "two_s": self.mask.spin.two_s,
            "P": self.mask.bits,
            "theta_star": self.theta_star,
            "b_max": self.b_max,
            "violates": self.violates,
            "margin": self.margin,
            "geometry": self.geometry,
        }


def _planar(c1, c3):
    return np.abs(c1 - c3) + 2 * np.abs(c1)


def bell_value(spin, mask, theta: float) -> float:
    mask = _as_mask(spin, mask)
    c1 = correlation(mask.spin, mask, theta)
    c3 = correlation(mask.spin, mask, 3 * theta)
    return float(_planar(c1, c3))


def bell_value_general(spin, mask, theta_ab, theta_ab2, theta_a2b, theta_a2b2) -> float:
    """``|C(ab) - C(ab')| + |C(a'b) + C(a'b')|`` for four free angles."""
    mask = _as_mask(spin, mask)
    c = [correlation(mask.spin, mask, t) for t in (theta_ab, theta_ab2, theta_a2b, theta_a2b2)]
    return abs(c[0] - c[1]) + abs(c[2] + c[3])


def golden_section_max(f, a: float, b: float, tol: float):
    """Maximize a unimodal ``f`` on ``[a, b]``; returns ``(x, f(x))``."""
    x1 = b - _INV_PHI * (b - a)
    x2 = a + _INV_PHI * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > tol:
        if f1 >= f2:
            b, x2, f2 = x2, x1, f1
            x1 = b - _INV_PHI * (b - a)
            f1 = f(x1)
        else:
            a, x1, f1 = x1, x2, f2
            x2 = a + _INV_PHI * (b - a)
            f2 = f(x2)
    return (x1, f1) if f1 >= f2 else (x2, f2)


def _grid(grid_points: int) -> np.ndarray:
    if grid_points < 64:
        raise ValueError("grid_points must be >= 64")
    return np.pi * np.arange(1, grid_points + 1) / grid_points


def _bell_on_grid(spin: SpinLabel, signs: np.ndarray, thetas: np.ndarray) -> np.ndarray:
    c = correlation_grid(spin, signs, np.concatenate([thetas, 3 * thetas]))
    g = thetas.size
    return _planar(c[:, :g], c[:, g:])


def _refine(spin: SpinLabel, sign: np.ndarray, thetas: np.ndarray, row: np.ndarray, tol: float):
    j = int(np.argmax(row))
    lo = thetas[j - 1] if j > 0 else 0.0
    hi = thetas[min(j + 1, thetas.size - 1)]
    sign = sign[None, :]

    def f(t):
        return float(_bell_on_grid(spin, sign, np.array([t]))[0, 0])

    t, b = golden_section_max(f, lo, hi, tol)
    if b >= row[j]:
        return t, b
    return float(thetas[j]), float(row[j])


def bell_max_many(spin, masks, grid_points: int = 4096, refine_tol: float = 1e-9,
                  threads: int = 1) -> list[BellResult]:
    """``bell_max`` for many masks of one spin, sharing the grid tables.

    Masks are processed in fixed blocks so results do not depend on
    ``threads``.
    """
    spin = _as_spin(spin)
    if spin.N > MAX_EVALUATION_N:
        raise ValueError(f"evaluation capped at N = {MAX_EVALUATION_N}")
    masks = [_as_mask(spin, m) for m in masks]
    thetas = _grid(grid_points)

    def block(lo):
        chunk = masks[lo:lo + _MASK_BLOCK]
        signs = sign_matrix(chunk)
        rows = _bell_on_grid(spin, signs, thetas)
        out = []
        for mask, sign, row in zip(chunk, signs, rows):
            t, b = _refine(spin, sign, thetas, row, refine_tol)
            out.append(BellResult(mask, t, b))
        return out

    starts = range(0, len(masks), _MASK_BLOCK)
    if threads > 1 and len(masks) > _MASK_BLOCK:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            blocks = list(pool.map(block, starts))
    else:
        blocks = [block(lo) for lo in starts]
    return [r for b in blocks for r in b]


def bell_max(spin, mask, grid_points: int = 4096, refine_tol: float = 1e-9) -> BellResult:
    """Maximize B over (0, pi]: uniform grid, then golden section in the best bracket."""
    return bell_max_many(spin, [mask], grid_points, refine_tol)[0]


def family_mask(family: str, spin) -> ParityMask:
    """Mask of a named family at the given spin.

    ``near-identity``  P = 2**N - 2 (every f_m set except m = -s)
    ``alternating``    f_m set on every other level, starting from m = +s
    ``end-bits``       f_m set only at m = -s and m = +s
    """
    spin = _as_spin(spin)
    N = spin.N
    if family == "near-identity":
        P = (1 << N) - 2
    elif family == "alternating":
        P = sum(1 << i for i in range(N - 1, -1, -2))
    elif family == "end-bits":
        P = (1 << (N - 1)) | 1
    else:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    return ParityMask(spin, P)


def classical_limit_scan(family: str, spins, grid_points: int = 4096,
                         refine_tol: float = 1e-9) -> list[tuple[int, BellResult]]:
    """``(N, BellResult)`` for one mask family across a list of spins."""
    if family not in FAMILIES:
        raise ValueError(f"unknown family {family!r}; choose from {', '.join(FAMILIES)}")
    out = []
    for spin in spins:
        spin = _as_spin(spin)
        res = bell_max(spin, family_mask(family, spin), grid_points, refine_tol)
        out.append((spin.N, res))
    return out
