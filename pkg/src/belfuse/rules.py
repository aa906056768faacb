"""Classic combination rules: conjunctive, Dempster-Shafer, conflict
redistribution and PCR5."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache, reduce
from typing import Callable

from .frame import (
    FrameMismatchError,
    MassFunction,
    Proposition,
)

TOTAL_CONFLICT_TOL = 1e-12


class TotalConflictError(ValueError):
    """Dempster-Shafer normalization is undefined at total conflict."""


class RedistributionError(ValueError):
    """A redistribution function violates its defining constraints."""


def _check_pair(m1: MassFunction, m2: MassFunction) -> None:
    if m1.frame != m2.frame:
        raise FrameMismatchError("mass functions live on different frames")
    m1.require_valid()
    m2.require_valid()


@lru_cache(maxsize=256)
def _conjunctive_table(m1: MassFunction, m2: MassFunction) -> tuple[tuple[int, float], ...]:
    out: dict[int, float] = {}
    for b1, v1 in m1._items:
        for b2, v2 in m2._items:
            key = b1 & b2
            out[key] = out.get(key, 0.0) + v1 * v2
    return tuple(sorted(out.items()))


def conjunctive(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Product combination on intersections; output is an open-world bba."""
    _check_pair(m1, m2)
    return MassFunction(m1.frame, _conjunctive_table(m1, m2), world="open")


def conflict_degree(m1: MassFunction, m2: MassFunction) -> float:
    """Conjunctive mass landing on the empty proposition."""
    _check_pair(m1, m2)
    return dict(_conjunctive_table(m1, m2)).get(0, 0.0)


def dempster_shafer(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Conjunctive combination with the conflict normalized away."""
    _check_pair(m1, m2)
    table = dict(_conjunctive_table(m1, m2))
    z = table.pop(0, 0.0)
    if 1.0 - z < TOTAL_CONFLICT_TOL:
        raise TotalConflictError(f"total conflict (degree {z:.12g}), cannot normalize")
    scale = 1.0 / (1.0 - z)
    return MassFunction(
        m1.frame, {b: v * scale for b, v in table.items()}, world="closed"
    )


@dataclass(frozen=True)
class RedistributionFunction:
    """Conflict reallocation law r(X | m1, m2).

    Must evaluate to -1 on the empty proposition and sum to zero over the
    power set.  ``relaxed`` laws may go negative on nonempty propositions.
    """

    name: str
    evaluator: Callable[[Proposition, MassFunction, MassFunction], float]
    relaxed: bool = False


def _r_ds_evaluator(x: Proposition, m1: MassFunction, m2: MassFunction) -> float:
    if x.is_empty:
        return -1.0
    table = dict(_conjunctive_table(m1, m2))
    z = table.get(0, 0.0)
    if 1.0 - z < TOTAL_CONFLICT_TOL:
        raise TotalConflictError("total conflict, proportional redistribution undefined")
    return table.get(x.bits, 0.0) / (1.0 - z)


R_DEMPSTER_SHAFER = RedistributionFunction("dempster-shafer", _r_ds_evaluator)

R_ALL_TO_TOP = RedistributionFunction(
    "all-to-top",
    lambda x, m1, m2: -1.0 if x.is_empty else (1.0 if x.is_top else 0.0),
)


def redistribute(
    m1: MassFunction,
    m2: MassFunction,
    r: RedistributionFunction,
    *,
    check: bool = True,
    tol: float = 1e-9,
) -> MassFunction:
    """Conjunctive combination plus r(X)-proportional reallocation of the conflict."""
    _check_pair(m1, m2)
    frame = m1.frame
    table = dict(_conjunctive_table(m1, m2))
    z = table.get(0, 0.0)
    values = {p.bits: r.evaluator(p, m1, m2) for p in frame.all_props()}
    if check:
        if abs(values[0] + 1.0) > tol:
            raise RedistributionError(
                f"r({frame.empty!r}) = {values[0]:g}, expected -1"
            )
        total = sum(values.values())
        if abs(total) > tol:
            raise RedistributionError(f"r sums to {total:g}, expected 0")
        if not r.relaxed:
            bad = [b for b, v in values.items() if b != 0 and v < -tol]
            if bad:
                raise RedistributionError(
                    f"r negative on {Proposition(frame, bad[0])!r} without relaxed flag"
                )
    out: dict[int, float] = dict(table)
    for bits, rv in values.items():
        if rv != 0.0:
            out[bits] = out.get(bits, 0.0) + rv * z
    world = "closed" if abs(out.get(0, 0.0)) <= tol else "open"
    if world == "closed":
        out.pop(0, None)
    return MassFunction(frame, out, world=world)


def pcr5(m1: MassFunction, m2: MassFunction) -> MassFunction:
    """Proportional conflict redistribution: each conflicting product
    m1(X)m2(Y) is split back onto X and Y proportionally to their masses."""
    _check_pair(m1, m2)
    if m1.world != "closed" or m2.world != "closed":
        raise ValueError("pcr5 expects closed-world inputs")
    out = dict(_conjunctive_table(m1, m2))
    out.pop(0, None)
    for b1, v1 in m1._items:
        for b2, v2 in m2._items:
            if b1 & b2 != 0:
                continue
            denom = v1 + v2
            if denom <= 0.0:
                continue
            product = v1 * v2
            out[b1] = out.get(b1, 0.0) + v1 * product / denom
            out[b2] = out.get(b2, 0.0) + v2 * product / denom
    return MassFunction(m1.frame, out, world="closed")


def conjunctive_many(ms: list[MassFunction]) -> MassFunction:
    """Fold of the (associative) conjunctive rule over two or more inputs."""
    if len(ms) < 2:
        raise ValueError("need at least two mass functions")
    return reduce(conjunctive, ms)


def dempster_shafer_many(ms: list[MassFunction]) -> MassFunction:
    if len(ms) < 2:
        raise ValueError("need at least two mass functions")
    return reduce(dempster_shafer, ms)
