"""Preimage enumeration and upward lifting toward exotic initial sequences.

A row r' of length n+1 is a preimage of r when diff_step(r') = r.  Fixing the
first entry forces each next one up to a sign, so preimages are enumerated by
DFS over the two candidates a_{j+1} = a_j +- r[j].  Lifting a {0,d}-valued
seed row upward within an alphabet cap searches for initial sequences whose
triangle falls back into the difference-closed set {0,d} -- the obstruction
that keeps the max from decaying.
"""

from __future__ import annotations

import json
import random
from dataclasses import dataclass
from typing import Iterator, Sequence

from .triangle import Row, diff_step, validate_row


def preimages(row: Sequence[int], cap: int) -> Iterator[Row]:
    """All rows r' with entries in [0, cap] and diff_step(r') = row.

    Deterministic order: first entry ascending, then the +difference branch
    before the -difference branch at each position.
    """
    if cap < 0:
        raise ValueError("cap must be >= 0")
    target = validate_row(row)

    def extend(prefix: list[int], j: int) -> Iterator[Row]:
        if j == len(target):
            yield list(prefix)
            return
        base = prefix[-1]
        d = target[j]
        candidates = (base + d,) if d == 0 else (base + d, base - d)
        for nxt in candidates:
            if 0 <= nxt <= cap:
                prefix.append(nxt)
                yield from extend(prefix, j + 1)
                prefix.pop()

    for start in range(cap + 1):
        yield from extend([start], 0)


@dataclass(frozen=True)
class LiftConstraint:
    alphabet_max: int
    width_goal: int

    def __post_init__(self) -> None:
        if self.alphabet_max < 1:
            raise ValueError("alphabet_max must be >= 1")
        if self.width_goal < 1:
            raise ValueError("width_goal must be >= 1")


@dataclass(frozen=True)
class ExoticCertificate:
    """An initial row whose triangle reaches a row valued only in {0, d}."""

    d: int
    initial: tuple[int, ...]
    depth_checked: int
    first_pure_row: int

    def to_json(self) -> str:
        return json.dumps(
            {
                "d": self.d,
                "initial": list(self.initial),
                "depth_checked": self.depth_checked,
                "first_pure_row": self.first_pure_row,
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, text: str) -> "ExoticCertificate":
        obj = json.loads(text)
        return cls(obj["d"], tuple(obj["initial"]), obj["depth_checked"], obj["first_pure_row"])


def verify_certificate(cert: ExoticCertificate) -> bool:
    """Iterate the certificate's initial row all the way down and re-check that
    some row is {0,d}-only and every later row stays {0,d}-only."""
    allowed = {0, cert.d}
    row = list(cert.initial)
    depth = 0
    first_pure = 0 if all(v in allowed for v in row) else None
    while len(row) > 1:
        row = diff_step(row)
        depth += 1
        pure = all(v in allowed for v in row)
        if pure and first_pure is None:
            first_pure = depth
        if not pure and first_pure is not None:
            return False  # closure broken: would contradict |a-b| in {0,d} for a,b in {0,d}
    if first_pure is None or depth < cert.depth_checked:
        return False
    return first_pure == cert.first_pure_row


def lift_search(
    seed_row: Sequence[int],
    constraint: LiftConstraint,
    budget: int,
    rng: random.Random,
) -> ExoticCertificate | None:
    """DFS upward from a {0,d}-valued seed row, one preimage level at a time,
    until the row reaches width_goal or `budget` nodes have been expanded.

    Child order is shuffled by `rng`; results are deterministic for a fixed
    seed and single worker.  Returns None when the budget is exhausted.
    """
    seed = validate_row(seed_row)
    d = max(seed)
    if any(v not in (0, d) for v in seed):
        raise ValueError("seed row must be {0,d}-valued")

    nodes = 0

    def dfs(row: Row) -> Row | None:
        nonlocal nodes
        if len(row) >= constraint.width_goal:
            return row
        if nodes >= budget:
            return None
        nodes += 1
        level = list(preimages(row, constraint.alphabet_max))
        rng.shuffle(level)
        for parent in level:
            found = dfs(parent)
            if found is not None:
                return found
        return None

    top = dfs(seed)
    if top is None:
        return None
    # Re-derive the pure depth by explicit iteration rather than trusting the
    # construction.
    depth_to_seed = len(top) - len(seed)
    row = list(top)
    first_pure = 0 if all(v in (0, d) for v in row) else None
    for depth in range(1, len(top)):
        row = diff_step(row)
        if first_pure is None and all(v in (0, d) for v in row):
            first_pure = depth
    if first_pure is None or first_pure > depth_to_seed:
        return None
    cert = ExoticCertificate(d, tuple(top), len(top) - 1, first_pure)
    return cert if verify_certificate(cert) else None
