"""Singlet correlation functions of parity-bit observables.

For the singlet ``|Psi> = N**-1/2 sum_m (-1)**(s-m) |m, -m>`` and the same
diagonal observable measured along two axes at angle theta,

    C(theta) = (1/N) sum_{m,n} sign(m) sign(n) |d^s_{-m,n}(theta)|**2,

a quadratic form of the sign vector over the row-reversed squared d table.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components
from scipy.spatial import cKDTree

from .parityobs import (
    CanonicalMask,
    ParityMask,
    _as_mask,
    enumerate_independent,
    sign_matrix,
)
from .spinrep import SpinLabel, _as_spin, wigner_d_squared, wigner_d_squared_stack

__all__ = [
    "NumericalGuardError",
    "CosPoly",
    "CorrelationFingerprint",
    "correlation",
    "correlation_grid",
    "correlation_poly",
    "fingerprint",
    "fingerprint_matrix",
    "distinct_correlations",
    "DEDUP_TOL",
    "DEDUP_GUARD",
    "MAX_DEDUP_TWO_S",
]

log = logging.getLogger(__name__)

DEDUP_TOL = 1e-9
DEDUP_GUARD = 1e-4
MAX_DEDUP_TWO_S = 28
POLY_RESIDUAL_TOL = 1e-9
POLY_RESIDUAL_LIMIT = 1e-6
_ANGLE_CHUNK = 256


class NumericalGuardError(RuntimeError):
    """A numerical self-check failed (ambiguous dedup, bad polynomial fit)."""


def correlation(spin, mask, theta: float) -> float:
    """C(theta) for one mask; ``mask`` may be a ParityMask or its integer P."""
    mask = _as_mask(spin, mask)
    sq = wigner_d_squared(mask.spin, theta).sq
    sgn = mask.signs()
    return float(sgn @ sq[::-1] @ sgn) / mask.N


def correlation_grid(spin, signs: np.ndarray, thetas) -> np.ndarray:
    """Correlations for a ``(K, N)`` sign matrix at every angle, shape ``(K, G)``.

    Tables are built in fixed angle chunks so the arithmetic for any one
    (mask, angle) pair does not depend on how many masks are batched.
    """
    spin = _as_spin(spin)
    signs = np.atleast_2d(np.asarray(signs, dtype=float))
    thetas = np.atleast_1d(np.asarray(thetas, dtype=float))
    out = np.empty((signs.shape[0], thetas.size))
    for lo in range(0, thetas.size, _ANGLE_CHUNK):
        sq = wigner_d_squared_stack(spin, thetas[lo:lo + _ANGLE_CHUNK])[:, ::-1, :]
        y = sq @ signs.T                                   # (g, N, K)
        out[:, lo:lo + _ANGLE_CHUNK] = np.einsum("kn,gnk->kg", signs, y)
    return out / spin.N


@dataclass(frozen=True)
class CosPoly:
    """``C(theta) = sum_k coeffs[k] * cos(theta)**k``."""

    spin: SpinLabel
    coeffs: np.ndarray

    def __call__(self, x):
        return np.polynomial.polynomial.polyval(x, self.coeffs)

    def at_theta(self, theta):
        return self(np.cos(theta))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __str__(self):
        terms = []
        for k, c in enumerate(self.coeffs):
            if abs(c) < 1e-12:
                continue
            x = "" if k == 0 else ("x" if k == 1 else f"x^{k}")
            terms.append(f"{c:+.12g}{'*' if x else ''}{x}")
        return " ".join(terms) if terms else "0"


def correlation_poly(spin, mask) -> CosPoly:
    """Exact degree-(N-1) polynomial in cos(theta) by Chebyshev interpolation."""
    mask = _as_mask(spin, mask)
    N = mask.N
    nodes = np.pi * (np.arange(N) + 0.5) / N
    sgn = mask.signs()[None, :]
    values = correlation_grid(mask.spin, sgn, nodes)[0]
    cheb = chebyshev.chebfit(np.cos(nodes), values, N - 1)
    coeffs = chebyshev.cheb2poly(cheb)
    coeffs = np.pad(coeffs, (0, N - coeffs.size))
    poly = CosPoly(mask.spin, coeffs)

    check = np.pi * (np.arange(3 * N) + 1 / 3) / (3 * N)
    residual = np.max(np.abs(poly.at_theta(check) - correlation_grid(mask.spin, sgn, check)[0]))
    if residual > POLY_RESIDUAL_LIMIT:
        raise NumericalGuardError(
            f"cos-polynomial fit for P={mask.bits}, s={mask.spin}: off-node residual {residual:.3g}"
        )
    if residual > POLY_RESIDUAL_TOL:
        log.warning("cos-polynomial residual %.3g for P=%d, s=%s", residual, mask.bits, mask.spin)
    return poly


@dataclass(frozen=True)
class CorrelationFingerprint:
    spin: SpinLabel
    values: np.ndarray

    def distance(self, other: "CorrelationFingerprint") -> float:
        return float(np.max(np.abs(self.values - other.values)))


def probe_angles(spin) -> np.ndarray:
    M = _as_spin(spin).N + 2
    return np.pi * (np.arange(M) + 0.5) / (M + 1)


def fingerprint_matrix(spin, masks) -> np.ndarray:
    spin = _as_spin(spin)
    return correlation_grid(spin, sign_matrix(masks), probe_angles(spin))


def fingerprint(spin, mask) -> CorrelationFingerprint:
    mask = _as_mask(spin, mask)
    return CorrelationFingerprint(mask.spin, fingerprint_matrix(mask.spin, [mask])[0])


def group_by_fingerprint(values: np.ndarray, tol: float = DEDUP_TOL,
                         guard: float = DEDUP_GUARD) -> np.ndarray:
    """Label rows of ``values`` so rows within ``tol`` (max-norm) share a label.

    Labels are numbered by first occurrence.  Raises NumericalGuardError when
    a group spreads wider than ``tol`` or two groups sit closer than ``guard``.
    """
    n = values.shape[0]
    tree = cKDTree(values)
    pairs = tree.query_pairs(tol, p=np.inf, output_type="ndarray")
    graph = coo_matrix((np.ones(len(pairs)), (pairs[:, 0], pairs[:, 1])), shape=(n, n))
    _, raw = connected_components(graph, directed=False)
    # renumber by first occurrence so labels follow input order
    _, first = np.unique(raw, return_index=True)
    order = np.argsort(first)
    relabel = np.empty_like(order)
    relabel[order] = np.arange(order.size)
    labels = relabel[raw]

    reps = np.sort(first)
    spread = np.max(np.abs(values - values[reps][labels]))
    if spread > tol:
        raise NumericalGuardError(f"fingerprint group spread {spread:.3g} exceeds {tol:g}")
    if reps.size > 1:
        dist, _ = cKDTree(values[reps]).query(values[reps], k=2, p=np.inf)
        closest = float(dist[:, 1].min())
        if closest <= guard:
            raise NumericalGuardError(
                f"distinct correlation functions only {closest:.3g} apart (guard {guard:g})"
            )
    return labels


def distinct_correlations(spin, masks=None, tol: float = DEDUP_TOL,
                          guard: float = DEDUP_GUARD) -> list[list[CanonicalMask]]:
    """Partition masks (default: every canonical mask) into equal-C(theta) groups.

    Groups are ordered by their smallest P and each group is sorted by P.
    """
    spin = _as_spin(spin)
    if spin.two_s > MAX_DEDUP_TWO_S:
        raise ValueError(f"exhaustive dedup is capped at two_s = {MAX_DEDUP_TWO_S}")
    masks = enumerate_independent(spin) if masks is None else sorted(masks)
    labels = group_by_fingerprint(fingerprint_matrix(spin, masks), tol, guard)
    groups: list[list[ParityMask]] = [[] for _ in range(labels.max() + 1)]
    for mask, lab in zip(masks, labels):
        groups[lab].append(mask)
    return groups
