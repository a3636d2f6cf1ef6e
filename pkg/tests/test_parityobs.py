import math

import pytest
from hypothesis import given, strategies as st
from sympy import Rational
from sympy.physics.quantum.cg import CG

from qunit_bell.parityobs import (
    CanonicalMask,
    ParityMask,
    canonicalize,
    enumerate_independent,
    identity_overlap,
    mask_from_integer,
    tensor_overlap,
)
from qunit_bell.spinrep import SpinLabel

SPIN1, SPIN32 = SpinLabel(2), SpinLabel(3)


@st.composite
def nontrivial_masks(draw, max_two_s=14):
    two_s = draw(st.integers(1, max_two_s))
    N = two_s + 1
    return ParityMask(SpinLabel(two_s), draw(st.integers(1, (1 << N) - 2)))


def test_peres_mask_bits():
    m = mask_from_integer(SPIN1, 5)
    assert m.bit_array().tolist() == [1, 0, 1]
    assert m.signs().tolist() == [-1, 1, -1]


def test_near_identity_label_at_spin_three_halves():
    # f_{-3/2}=0 and the rest set
    assert mask_from_integer(SPIN32, 14).bit_array().tolist() == [0, 1, 1, 1]


def test_zero_is_identity():
    assert mask_from_integer(SPIN1, 0).signs().tolist() == [1, 1, 1]


@pytest.mark.parametrize("P", [-1, 8])
def test_out_of_range(P):
    with pytest.raises(ValueError):
        mask_from_integer(SPIN1, P)


@pytest.mark.parametrize("spin,P,expected", [(SPIN1, 2, 5), (SPIN32, 9, 9), (SPIN1, 4, 4)])
def test_canonicalize(spin, P, expected):
    c = canonicalize(mask_from_integer(spin, P))
    assert isinstance(c, CanonicalMask) and c.bits == expected


@pytest.mark.parametrize("P", [0, 7])
def test_canonicalize_rejects_trivial(P):
    with pytest.raises(ValueError):
        canonicalize(mask_from_integer(SPIN1, P))


def test_canonical_mask_validates():
    with pytest.raises(ValueError):
        CanonicalMask(SPIN1, 3)


@pytest.mark.parametrize("spin,expected", [(SPIN1, [4, 5, 6]), (SPIN32, list(range(8, 15)))])
def test_enumerate_small(spin, expected):
    assert [m.bits for m in enumerate_independent(spin)] == expected


@pytest.mark.parametrize("two_s,count", list(zip(range(2, 15), [3, 7, 15, 31, 63, 127, 255, 511, 1023,
                                                                2047, 4095, 8191, 16383])))
def test_enumerate_counts(two_s, count):
    masks = enumerate_independent(SpinLabel(two_s))
    assert len(masks) == count == (1 << two_s) - 1
    assert masks[0].bits == 1 << two_s and masks[-1].bits == (1 << (two_s + 1)) - 2


@pytest.mark.parametrize("spin,P,trace", [(SPIN1, 6, -1), (SPIN32, 14, -2), (SPIN1, 0, 3), (SPIN32, 0, 4)])
def test_identity_overlap(spin, P, trace):
    assert identity_overlap(mask_from_integer(spin, P)) == trace


def test_identity_overlap_near_identity_magnitude():
    # |Tr O| = 2s - 1 for I - 2|-s><-s|
    for two_s in range(2, 20):
        m = ParityMask(SpinLabel(two_s), (1 << (two_s + 1)) - 2)
        assert abs(identity_overlap(m)) == two_s - 1


@pytest.mark.parametrize("two_s", [2, 3, 6])
def test_tensor_overlap_constant_masks_vanish(two_s):
    spin = SpinLabel(two_s)
    for P in (0, (1 << spin.N) - 1):
        for k in range(1, two_s + 1):
            assert tensor_overlap(ParityMask(spin, P), k) == pytest.approx(0, abs=1e-13)


def _sympy_overlap(two_s, P, k):
    s = Rational(two_s, 2)
    total = 0
    for i in range(two_s + 1):
        sign = 1 - 2 * ((P >> i) & 1)
        m = i - s
        total += sign * CG(s, m, k, 0, s, m).doit()
    return float(total)


def test_tensor_overlap_peres_rank2():
    got = tensor_overlap(mask_from_integer(SPIN1, 5), 2)
    assert got == pytest.approx(-2 * math.sqrt(10) / 5, abs=1e-14)
    assert got == pytest.approx(_sympy_overlap(2, 5, 2), abs=1e-14)


@pytest.mark.parametrize("two_s,P,k", [(3, 9, 2), (3, 14, 1), (3, 14, 3), (4, 17, 4), (5, 54, 5)])
def test_tensor_overlap_against_sympy(two_s, P, k):
    assert tensor_overlap(ParityMask(SpinLabel(two_s), P), k) == pytest.approx(
        _sympy_overlap(two_s, P, k), abs=1e-13)


def test_tensor_overlap_parity_selection_rule():
    # <s -m; k 0|s -m> = (-1)**k <s m; k 0|s m>, so odd ranks vanish on mirror-symmetric
    # masks and even ranks on masks whose mirror is their complement; otherwise nonzero
    for two_s in range(1, 7):
        for m in enumerate_independent(SpinLabel(two_s)):
            for k in range(1, two_s + 1):
                forced_zero = m.mirror().bits == (m if k % 2 else m.complement()).bits
                value = tensor_overlap(m, k)
                if forced_zero:
                    assert value == pytest.approx(0, abs=1e-13)
                elif k == two_s:
                    assert abs(value) > 1e-8


@pytest.mark.parametrize("k", [0, 3])
def test_tensor_overlap_rank_range(k):
    with pytest.raises(ValueError):
        tensor_overlap(mask_from_integer(SPIN1, 5), k)


@given(nontrivial_masks())
def test_complement_involution(mask):
    assert canonicalize(mask) == canonicalize(mask.complement())
    assert mask.complement().complement() == mask


@given(nontrivial_masks())
def test_identity_overlap_antisymmetric(mask):
    assert identity_overlap(mask) + identity_overlap(mask.complement()) == 0


@given(nontrivial_masks(max_two_s=8), st.data())
def test_tensor_overlap_antisymmetric(mask, data):
    k = data.draw(st.integers(1, mask.spin.two_s))
    assert tensor_overlap(mask, k) == pytest.approx(-tensor_overlap(mask.complement(), k), abs=1e-12)


@given(nontrivial_masks())
def test_mirror_involution(mask):
    assert mask.mirror().mirror() == mask
    assert mask.mirror().bit_array().tolist() == mask.bit_array().tolist()[::-1]
