from itertools import product

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from gilbreath.blocks import (
    BlockSpec,
    check_block_destruction,
    check_inverse_iterates,
    detect_event_cascade,
    longest_block,
)
from gilbreath.triangle import TriangleHistory, diff_step


def brute_longest_block(row, allowed, witness=None):
    # Quadratic scan over all contiguous segments.
    best = 0
    start = 0
    n = len(row)
    for i in range(n):
        for j in range(i + 1, n + 1):
            seg = row[i:j]
            if all(v in allowed for v in seg) and (witness is None or witness in seg):
                if j - i > best:
                    best, start = j - i, i + 1
    return best, start


def test_longest_block_examples():
    rep = longest_block([1, 0, 2, 2, 2], BlockSpec(frozenset({0, 2})))
    assert (rep.max_length, rep.start_index) == (4, 2)
    rep = longest_block([1, 2, 2, 4, 2, 4], BlockSpec(frozenset({0, 4}), require_witness=4))
    assert rep.max_length == 1 and rep.witness_present
    rep = longest_block([1, 2, 3], BlockSpec(frozenset({7})))
    assert rep.max_length == 0 and rep.start_index == 0


def test_blockspec_rejects_empty():
    with pytest.raises(ValueError):
        BlockSpec(frozenset())


@given(
    st.lists(st.integers(0, 4), min_size=1, max_size=30),
    st.sets(st.integers(0, 4), min_size=1, max_size=3),
    st.one_of(st.none(), st.integers(0, 4)),
)
def test_longest_block_matches_bruteforce(row, allowed, witness):
    rep = longest_block(row, BlockSpec(frozenset(allowed), require_witness=witness))
    expect_len, expect_start = brute_longest_block(row, allowed, witness)
    assert (rep.max_length, rep.start_index) == (expect_len, expect_start)


def test_longest_block_bruteforce_seeded_sweep():
    rng = np.random.default_rng(3)
    for _ in range(1000):
        row = rng.integers(0, 6, size=rng.integers(1, 40)).tolist()
        allowed = set(rng.choice(6, size=rng.integers(1, 4), replace=False).tolist())
        rep = longest_block(row, BlockSpec(frozenset(allowed)))
        assert (rep.max_length, rep.start_index) == brute_longest_block(row, allowed)


def test_destruction_prime_row():
    v = check_block_destruction([1, 2, 2, 4, 2, 4])
    assert v.applicable and v.holds
    assert (v.d, v.block_length, v.observed_max) == (4, 1, 2)


def test_destruction_not_applicable():
    v = check_block_destruction([0, 3, 0])
    assert not v.applicable and v.holds is None
    assert (v.d, v.block_length) == (3, 3)


def test_destruction_degenerate():
    with pytest.raises(ValueError, match="degenerate"):
        check_block_destruction([0, 0, 0])


def test_destruction_exhaustive_alphabet3_len9():
    for row in product(range(3), repeat=9):
        if max(row) == 0:
            continue
        v = check_block_destruction(list(row))
        assert (not v.applicable) or v.holds, row


def test_destruction_random_length64():
    rng = np.random.default_rng(5)
    for _ in range(10_000):
        row = rng.integers(0, 8, size=64).tolist()
        if max(row) == 0:
            continue
        v = check_block_destruction(row)
        assert (not v.applicable) or v.holds, row


def test_block_decay_is_monotone():
    # A {0,d}-block with a d can only have come from a longer one, so the
    # longest such block never grows while d stays the max.
    rng = np.random.default_rng(9)
    for _ in range(500):
        row = rng.integers(0, 5, size=32).tolist()
        d = max(row)
        if d == 0:
            continue
        spec = BlockSpec(frozenset({0, d}), require_witness=d)
        prev = longest_block(row, spec).max_length
        while len(row) > 1 and max(row) == d and prev > 0:
            row = diff_step(row)
            cur = longest_block(row, spec).max_length
            if max(row) == d:
                assert cur < prev
            prev = cur


def history_of(row):
    return TriangleHistory.from_row(row)


def test_inverse_iterates_all_multiples():
    h = history_of([3, 0, 3, 0, 3])
    # every row is 3Z-valued; the initial row carries the full-length block
    v = check_inverse_iterates(h, i=2, d=3, L=3)
    assert v.holds and v.branch == 1 and v.row_index == 0 and v.block_length == 5


def test_inverse_iterates_tautology_at_i0():
    h = history_of([6, 1, 4])
    v = check_inverse_iterates(h, i=0, d=2, L=1)
    assert v.holds and v.branch == 1


def test_inverse_iterates_precondition():
    h = history_of([1, 1, 1])
    with pytest.raises(ValueError, match="no dZ-block"):
        check_inverse_iterates(h, i=0, d=5, L=2)


def test_inverse_iterates_randomized_histories():
    rng = np.random.default_rng(17)
    for _ in range(1000):
        row = rng.integers(0, 5, size=12).tolist()
        h = history_of(row)
        for i, r in enumerate(h.rows):
            for d in (2, 3, 4):
                runs = _maximal_multiple_runs(r, d)
                for L in runs:
                    v = check_inverse_iterates(h, i, d, L)
                    assert v.holds, (row, i, d, L)


def _maximal_multiple_runs(row, d):
    runs = []
    length = 0
    for v in row:
        if v % d == 0:
            length += 1
        else:
            if length:
                runs.append(length)
            length = 0
    if length:
        runs.append(length)
    return runs


def test_event_cascade_all_zero_row():
    h = history_of([0] * 10)
    reports = detect_event_cascade(h, C=3, R=5)
    assert reports[0].status == "fired"  # j=1 at iteration 0


def test_event_cascade_prime_row():
    h = history_of([2, 3, 5, 7, 11, 13, 17])
    reports = detect_event_cascade(h, C=5, R=2)
    by_j = {r.j: r for r in reports}
    assert by_j[1].status == "absent"  # no {0,4}-block of length 2 in row 0
    assert by_j[3].status == "insufficient_history"  # needs iteration 8, depth is 6


def test_event_cascade_bound_check():
    # Frequency of the j=1 event is far below the union bound M*(2/3)**R.
    rng = np.random.default_rng(23)
    M, R, trials = 10_000, 20, 50
    fired = 0
    for _ in range(trials):
        row = rng.integers(0, 3, size=M).tolist()
        h = TriangleHistory([row])
        if detect_event_cascade(h, C=3, R=R)[0].status == "fired":
            fired += 1
    assert fired / trials <= M * (2 / 3) ** R
