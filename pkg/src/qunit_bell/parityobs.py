"""Diagonal +/-1 observables labelled by a parity bit integer.

Bit ``i`` of the integer ``P`` stores ``f_m`` for ``m = i - s`` and the
observable is ``sum_m (-1)**f_m |m><m|``.  This is the ordering under which
the near-identity observable ``I - 2|-s><-s|`` carries the labels 6 and 14
for s = 1 and 3/2 (as the complement of ``f_m = 1 - delta_{m,-s}``).

A global sign flip (bitwise complement) leaves every correlation unchanged,
so each class ``{P, ~P}`` is represented by the member with the ``m = +s``
bit set.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spinrep import SpinLabel, _as_spin, cg_coefficient

__all__ = [
    "MAX_ENUMERATION_N",
    "MAX_EVALUATION_N",
    "ParityMask",
    "CanonicalMask",
    "mask_from_integer",
    "canonicalize",
    "enumerate_independent",
    "identity_overlap",
    "tensor_overlap",
    "sign_matrix",
]

MAX_ENUMERATION_N = 63
MAX_EVALUATION_N = 50


@dataclass(frozen=True, order=True)
class ParityMask:
    spin: SpinLabel
    bits: int

    def __post_init__(self):
        if not isinstance(self.bits, (int, np.integer)) or isinstance(self.bits, bool):
            raise TypeError("parity bit integer must be an int")
        object.__setattr__(self, "bits", int(self.bits))
        if not 0 <= self.bits < 1 << self.spin.N:
            raise ValueError(
                f"P={self.bits} out of range [0, {(1 << self.spin.N) - 1}] for spin {self.spin}"
            )

    @property
    def N(self) -> int:
        return self.spin.N

    @property
    def full(self) -> int:
        return (1 << self.N) - 1

    def bit_array(self) -> np.ndarray:
        """``f_m`` for m = -s..+s."""
        if self.N <= 63:
            return (self.bits >> np.arange(self.N, dtype=np.int64)) & 1
        return np.array([(self.bits >> i) & 1 for i in range(self.N)], dtype=np.int64)

    def signs(self) -> np.ndarray:
        """Eigenvalues ``(-1)**f_m`` for m = -s..+s, as floats."""
        return 1.0 - 2.0 * self.bit_array()

    def complement(self) -> "ParityMask":
        return ParityMask(self.spin, self.full ^ self.bits)

    def mirror(self) -> "ParityMask":
        """Reflect ``f_m -> f_{-m}``."""
        rev = int("".join(map(str, self.bit_array())), 2)
        return ParityMask(self.spin, rev)

    @property
    def is_trivial(self) -> bool:
        return self.bits in (0, self.full)

    def to_dict(self) -> dict:
        return {
            "spin": str(self.spin),
            "two_s": self.spin.two_s,
            "P": self.bits,
            "f": self.bit_array().tolist(),
            "signs": [int(x) for x in self.signs()],
        }


@dataclass(frozen=True, order=True)
class CanonicalMask(ParityMask):
    """Representative of ``{P, complement(P)}`` with the m = +s bit set."""

    def __post_init__(self):
        super().__post_init__()
        top = 1 << (self.N - 1)
        if not self.bits & top or self.bits == self.full:
            raise ValueError(f"P={self.bits} is not a canonical mask for spin {self.spin}")


def mask_from_integer(spin, P: int) -> ParityMask:
    return ParityMask(_as_spin(spin), P)


def _as_mask(spin, mask) -> ParityMask:
    if isinstance(mask, ParityMask):
        if spin is not None and mask.spin != _as_spin(spin):
            raise ValueError(f"mask belongs to spin {mask.spin}, not {spin}")
        return mask
    return mask_from_integer(spin, mask)


def canonicalize(mask: ParityMask) -> CanonicalMask:
    if mask.is_trivial:
        raise ValueError(
            f"P={mask.bits} is a trivial (+/- identity) observable and has no canonical form"
        )
    top = 1 << (mask.N - 1)
    bits = mask.bits if mask.bits & top else mask.full ^ mask.bits
    return CanonicalMask(mask.spin, bits)


def enumerate_independent(spin) -> list[CanonicalMask]:
    """All canonical masks for ``spin``, ascending by P (2**(N-1) - 1 of them)."""
    spin = _as_spin(spin)
    if spin.N > MAX_ENUMERATION_N:
        raise ValueError(f"enumeration capped at N = {MAX_ENUMERATION_N}")
    lo = 1 << (spin.N - 1)
    return [CanonicalMask(spin, P) for P in range(lo, 2 * lo - 1)]


def sign_matrix(masks) -> np.ndarray:
    """Stack the sign vectors of ``masks`` into a ``(K, N)`` float array."""
    masks = list(masks)
    if not masks:
        raise ValueError("no masks given")
    return np.stack([m.signs() for m in masks])


def identity_overlap(mask: ParityMask) -> int:
    """Trace of the observable, ``N - 2 * popcount(P)``."""
    return mask.N - 2 * bin(mask.bits).count("1")


def tensor_overlap(mask: ParityMask, k: int) -> float:
    """Overlap of the observable with the rank-k tensor moment T^k_0.

    Returns ``sum_m (-1)**f_m <s m; k 0 | s m>``; the reduced matrix element
    ``<s||T^k||s>`` is common to every mask and is left out.  The CG
    coefficient carries its m dependence here (``C(s k s; m 0 m)``).
    """
    s2 = mask.spin.two_s
    if not 1 <= k <= s2:
        raise ValueError(f"rank k={k} outside 1..{s2}")
    signs = mask.signs()
    s = mask.spin.s
    total = 0.0
    for i, sign in enumerate(signs):
        m = i - s
        total += sign * cg_coefficient(s, k, s, m, 0, m)
    return total
