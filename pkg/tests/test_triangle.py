import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gilbreath.triangle import (
    ParityRow,
    RowExhaustedError,
    StopRule,
    TriangleHistory,
    batch_ultimate,
    diff_step,
    enumerate_rows,
    iterate_until,
    parity_step,
    ultimate_iterate,
    validate_row,
)

rows = st.lists(st.integers(0, 50), min_size=1, max_size=40)
rows2 = st.lists(st.integers(0, 50), min_size=2, max_size=40)


def brute_triangle(row):
    # Independent of the library: direct nested evaluation of the recurrence.
    out = [list(row)]
    while len(out[-1]) > 1:
        prev = out[-1]
        out.append([abs(prev[j] - prev[j + 1]) for j in range(len(prev) - 1)])
    return out


def test_diff_step_prime_rows():
    assert diff_step([2, 3, 5, 7, 11, 13, 17]) == [1, 2, 2, 4, 2, 4]
    assert diff_step([1, 2, 2, 4, 2, 4]) == [1, 0, 2, 2, 2]
    assert diff_step([5, 5, 5, 5]) == [0, 0, 0]


def test_diff_step_rejects_short_row():
    with pytest.raises(RowExhaustedError, match="row exhausted"):
        diff_step([7])


def test_validate_row_rejects_bad_input():
    with pytest.raises(ValueError):
        validate_row([])
    with pytest.raises(ValueError):
        validate_row([1, -2])


def test_ultimate_iterate():
    assert ultimate_iterate([2, 3, 5, 7, 11, 13, 17]) == 1
    assert ultimate_iterate([9]) == 9
    assert ultimate_iterate([7, 2, 9]) == abs(abs(7 - 2) - abs(2 - 9))
    assert ultimate_iterate([7, 2, 9]) == 2


def test_iterate_until_prime_row():
    res = iterate_until([2, 3, 5, 7, 11, 13, 17], StopRule.all_le_one(), 100)
    assert (res.iterations, res.row, res.reason) == (6, [1], "stop")


def test_iterate_until_already_stopped():
    res = iterate_until([1, 0, 1], StopRule.all_le_one(), 5)
    assert res.iterations == 0 and res.reason == "stop"


def test_iterate_until_3030():
    # 3,0,3,0 -> 3,3,3 -> 0,0: the all<=1 stop fires at iteration 2.
    res = iterate_until([3, 0, 3, 0], StopRule.all_le_one(), 10, retain=True)
    assert (res.iterations, res.row, res.reason) == (2, [0, 0], "stop")
    assert res.history.rows == brute_triangle([3, 0, 3, 0])[:3]


def test_iterate_until_budget():
    res = iterate_until([3, 0, 3, 0, 3], StopRule.all_le_one(), 1)
    assert res.reason == "budget" and res.iterations == 1


def test_iterate_until_exhausted():
    res = iterate_until([5, 0], StopRule.all_le_one(), 10)
    assert (res.row, res.reason) == ([5], "exhausted")


def test_history_from_row_checks():
    h = TriangleHistory.from_row([2, 3, 5, 7, 11, 13, 17])
    assert len(h.rows) == 7
    h.check()
    with pytest.raises(ValueError):
        TriangleHistory([[1, 2], [3]]).check()


def test_parity_step_examples():
    assert parity_step(ParityRow.from_row([1, 0, 1, 1])).to_list() == [1, 1, 0]
    assert parity_step(ParityRow.from_row([0, 0, 0, 0])).to_list() == [0, 0, 0]
    p = ParityRow.from_row([2, 3, 5, 7, 11, 13, 17]).step()
    assert p.to_list() == [1, 0, 0, 0, 0, 0]
    with pytest.raises(RowExhaustedError):
        ParityRow.from_row([1]).step()


@given(rows2)
def test_length_drops_and_max_non_increasing(row):
    out = diff_step(row)
    assert len(out) == len(row) - 1
    assert max(out) <= max(row)


@given(rows)
def test_reversal_invariance(row):
    assert ultimate_iterate(row[::-1]) == ultimate_iterate(row)


@given(rows, st.integers(0, 9))
def test_scaling(row, k):
    assert ultimate_iterate([k * v for v in row]) == k * ultimate_iterate(row)


@given(rows2, st.integers(0, 100))
def test_shift_invariance(row, c):
    assert diff_step([v + c for v in row]) == diff_step(row)


@given(st.integers(1, 20), st.lists(st.booleans(), min_size=2, max_size=30))
def test_zero_d_closure(d, picks):
    row = [d if p else 0 for p in picks]
    assert set(diff_step(row)) <= {0, d}


@given(rows2)
def test_parity_commutes_with_diff(row):
    direct = ParityRow.from_row(diff_step(row))
    stepped = ParityRow.from_row(row).step()
    assert direct == stepped


@settings(max_examples=30)
@given(st.integers(2, 4), st.integers(1, 6))
def test_enumerate_rows_and_batch_ultimate(C, length):
    mat = enumerate_rows(C, length)
    assert mat.shape == (C**length, length)
    assert int(mat.min()) == 0 and int(mat.max()) == C - 1
    # against the scalar path
    ults = batch_ultimate(mat)
    for idx in range(0, mat.shape[0], max(1, mat.shape[0] // 50)):
        assert int(ults[idx]) == ultimate_iterate(mat[idx].tolist())


def test_parity_commutation_bulk():
    rng = np.random.default_rng(7)
    for _ in range(10_000):
        row = rng.integers(0, 50, size=rng.integers(2, 40)).tolist()
        assert ParityRow.from_row(diff_step(row)) == ParityRow.from_row(row).step()
