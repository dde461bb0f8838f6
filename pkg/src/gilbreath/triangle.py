"""Absolute-difference triangle engine.

One differencing step maps a row (a_1, ..., a_n) of non-negative integers to
(|a_1 - a_2|, ..., |a_{n-1} - a_n|).  Repeating the step builds the difference
triangle; a row of length n collapses to a single value (its "ultimate
iterate") after n - 1 steps.  Scalar operations work on Python lists, batch
helpers on 2-D numpy arrays where throughput matters.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np

Row = list[int]


class RowExhaustedError(ValueError):
    """Raised when a differencing step is asked for on a length-1 row."""


def validate_row(values: Sequence[int]) -> Row:
    """Check row invariants (length >= 1, all entries >= 0) and return a list copy."""
    row = [int(v) for v in values]
    if not row:
        raise ValueError("row must have length >= 1")
    if any(v < 0 for v in row):
        raise ValueError("row entries must be non-negative")
    return row


def diff_step(row: Sequence[int]) -> Row:
    """One differencing step: [|row[j] - row[j+1]| for j]."""
    if len(row) < 2:
        raise RowExhaustedError("row exhausted: cannot difference a length-1 row")
    return [abs(a - b) for a, b in zip(row, row[1:])]


def ultimate_iterate(row: Sequence[int]) -> int:
    """The single value a row reduces to after len(row) - 1 differencing steps."""
    cur = list(row)
    if not cur:
        raise ValueError("row must have length >= 1")
    while len(cur) > 1:
        cur = diff_step(cur)
    return cur[0]


def step_array(row: np.ndarray) -> np.ndarray:
    """Differencing step on a 1-D array, safe for unsigned dtypes."""
    a, b = row[:-1], row[1:]
    # max - min instead of abs(diff): no intermediate negatives, so uint8/uint16
    # rows never wrap.
    return np.maximum(a, b) - np.minimum(a, b)


def batch_step(rows: np.ndarray) -> np.ndarray:
    """Differencing step applied to every row of a 2-D signed-int array."""
    return np.abs(rows[:, 1:] - rows[:, :-1])


def batch_ultimate(rows: np.ndarray) -> np.ndarray:
    """Ultimate iterate of every row of a 2-D array (rows share one length)."""
    work = np.asarray(rows, dtype=np.int64)
    while work.shape[1] > 1:
        work = batch_step(work)
    return work[:, 0]


def enumerate_rows(alphabet: int, length: int) -> np.ndarray:
    """All alphabet**length rows over {0,...,alphabet-1} as a 2-D int64 array.

    Row r is the base-`alphabet` expansion of r, most significant digit first,
    so lexicographic order matches tuple order.
    """
    n = alphabet**length
    codes = np.arange(n, dtype=np.int64)
    out = np.empty((n, length), dtype=np.int64)
    for j in range(length - 1, -1, -1):
        codes, out[:, j] = np.divmod(codes, alphabet)
    return out


class StopKind(Enum):
    ALL_LE_ONE = "all_le_one"
    ALL_IN_ZERO_D = "all_in_zero_d"
    FIRST_NOT_ONE = "first_not_one"
    STABLE_TAIL = "stable_tail"  # leading 1, every later entry 0 or 2


@dataclass(frozen=True)
class StopRule:
    """Closed enumeration of iteration stop predicates (keeps fast paths possible)."""

    kind: StopKind
    d: int | None = None

    @classmethod
    def all_le_one(cls) -> "StopRule":
        return cls(StopKind.ALL_LE_ONE)

    @classmethod
    def all_in_zero_d(cls, d: int) -> "StopRule":
        return cls(StopKind.ALL_IN_ZERO_D, d=d)

    @classmethod
    def first_not_one(cls) -> "StopRule":
        return cls(StopKind.FIRST_NOT_ONE)

    @classmethod
    def stable_tail(cls) -> "StopRule":
        return cls(StopKind.STABLE_TAIL)

    def matches(self, row: np.ndarray) -> bool:
        if self.kind is StopKind.ALL_LE_ONE:
            return bool((row <= 1).all())
        if self.kind is StopKind.ALL_IN_ZERO_D:
            return bool(((row == 0) | (row == self.d)).all())
        if self.kind is StopKind.FIRST_NOT_ONE:
            return bool(row[0] != 1)
        tail = row[1:]
        return bool(row[0] == 1 and ((tail == 0) | (tail == 2)).all())


@dataclass
class TriangleHistory:
    """Successive rows of a difference triangle, rows[k+1] = diff_step(rows[k])."""

    rows: list[Row] = field(default_factory=list)

    def check(self) -> None:
        for upper, lower in zip(self.rows, self.rows[1:]):
            if lower != diff_step(upper):
                raise ValueError("history rows are not successive difference iterates")

    @classmethod
    def from_row(cls, row: Sequence[int], depth: int | None = None) -> "TriangleHistory":
        """Build the triangle under `row`, down to length 1 or `depth` iterations."""
        cur = validate_row(row)
        rows = [cur]
        while len(cur) > 1 and (depth is None or len(rows) <= depth):
            cur = diff_step(cur)
            rows.append(cur)
        return cls(rows)


@dataclass
class IterationResult:
    iterations: int
    row: Row
    reason: str  # "stop" | "exhausted" | "budget"
    history: TriangleHistory | None = None


def iterate_until(
    row: Sequence[int],
    stop: StopRule,
    max_iters: int,
    retain: bool = False,
) -> IterationResult:
    """Difference until `stop` matches, the row shrinks to length 1, or the budget runs out.

    The stop predicate is tested before each step, so a row that already
    matches reports 0 iterations.  `reason` says which condition fired first.
    """
    if max_iters < 0:
        raise ValueError("max_iters must be >= 0")
    cur = np.asarray(validate_row(row), dtype=np.int64)
    rows = [cur.tolist()] if retain else None
    iters = 0
    while True:
        if stop.matches(cur):
            reason = "stop"
            break
        if cur.size == 1:
            reason = "exhausted"
            break
        if iters >= max_iters:
            reason = "budget"
            break
        cur = step_array(cur)
        iters += 1
        if retain:
            rows.append(cur.tolist())
    history = TriangleHistory(rows) if retain else None
    return IterationResult(iters, cur.tolist(), reason, history)


@dataclass(frozen=True)
class ParityRow:
    """A row reduced mod 2, packed into an int (bit j = parity of position j)."""

    bits: int
    length: int

    @classmethod
    def from_row(cls, row: Sequence[int]) -> "ParityRow":
        bits = 0
        for j, v in enumerate(row):
            bits |= (int(v) & 1) << j
        return cls(bits, len(row))

    def step(self) -> "ParityRow":
        """Adjacent-XOR step; commutes with differencing then reducing mod 2."""
        if self.length < 2:
            raise RowExhaustedError("row exhausted: cannot step a length-1 parity row")
        n = self.length - 1
        return ParityRow((self.bits ^ (self.bits >> 1)) & ((1 << n) - 1), n)

    def to_list(self) -> list[int]:
        return [(self.bits >> j) & 1 for j in range(self.length)]


def parity_step(p: ParityRow) -> ParityRow:
    return p.step()
