"""Parity of the ultimate iterate as a linear functional of initial parities.

For each depth i there is a position set J_i, containing 1 and i+1, such that
the ultimate iterate of (a_1, ..., a_{i+1}) is congruent mod 2 to the sum of
a_j over j in J_i.  The sets obey J_i = J_{i-1} xor (J_{i-1} + 1) starting
from J_1 = {1, 2}, which packed into an int is a single shift-XOR per step --
the rows of Pascal's triangle mod 2.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

_masks: list[int] = [1, 0b11]  # bits of J_0 = {1}, J_1 = {1, 2}; bit k <-> position k+1
_masks_lock = threading.Lock()


@dataclass(frozen=True)
class ParityMask:
    """J_i as a packed bitmask; bit k set means position k+1 is a member."""

    i: int
    bits: int

    @property
    def members(self) -> frozenset[int]:
        """1-based positions, subset of {1, ..., i+1}."""
        return frozenset(k + 1 for k in range(self.i + 1) if (self.bits >> k) & 1)

    @property
    def size(self) -> int:
        return self.bits.bit_count()


def mask(i: int) -> ParityMask:
    """J_i from the shift-XOR recurrence; i = 0 is the identity mask {1}.

    Masks are memoized up to the largest depth requested; extending the table
    is idempotent, so concurrent readers are safe.
    """
    if i < 0:
        raise ValueError("depth must be >= 0")
    if i >= len(_masks):
        with _masks_lock:
            m = _masks[-1]
            while i >= len(_masks):
                m ^= m << 1
                _masks.append(m)
    return ParityMask(i, _masks[i])


def mask_via_binomial(i: int) -> ParityMask:
    """J_i by binomial parity: position j is a member iff C(i, j-1) is odd.

    By Lucas' theorem C(i, k) is odd iff k is a bit-submask of i; this is the
    verified fast path for isolated large depths.
    """
    if i < 0:
        raise ValueError("depth must be >= 0")
    bits = 0
    k = i
    while True:  # enumerate submasks of i, descending
        bits |= 1 << k
        if k == 0:
            break
        k = (k - 1) & i
    return ParityMask(i, bits)


def parity_of_ultimate(row: Sequence[int]) -> int:
    """Parity of the ultimate iterate, from initial parities alone."""
    n = len(row)
    if n == 0:
        raise ValueError("row must have length >= 1")
    packed = 0
    for j, v in enumerate(row):
        packed |= (int(v) & 1) << j
    return (mask(n - 1).bits & packed).bit_count() & 1


def prob_even(C: int, i: int) -> Fraction:
    """Exact probability that i.i.d. uniform draws on {0,...,C-1} ultimately iterate to an even value.

    The ultimate parity is the XOR of |J_i| independent bits, each odd with
    probability q = floor(C/2)/C, so the even-probability is
    (1 + (1 - 2q)**|J_i|) / 2.
    """
    if C < 2:
        raise ValueError("alphabet size must be >= 2")
    if i < 1:
        raise ValueError("depth must be >= 1")
    m = mask(i).size
    bias = Fraction(C - 2 * (C // 2), C)  # 1 - 2q
    return (1 + bias**m) / 2
