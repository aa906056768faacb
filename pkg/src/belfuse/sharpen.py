"""Mass-transport order on belief functions.

A sharpening from m1 to m2 is a nonnegative transport plan r(X, Y),
supported on pairs with Y inside X, whose row sums reproduce m1 and whose
column sums reproduce m2.  Existence of such a witness defines a partial
order: m2 refines (sharpens) m1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import simplex
from .frame import (
    FrameMismatchError,
    MassFunction,
    Proposition,
    credibility_table,
    is_probability_density,
)

MARGIN_TOL = 1e-9


class Sharpening:
    """Sparse transport plan between two mass functions on one frame."""

    __slots__ = ("source", "target", "_entries")

    def __init__(self, source: MassFunction, target: MassFunction, entries):
        if source.frame != target.frame:
            raise FrameMismatchError("source and target live on different frames")
        self.source = source
        self.target = target
        frame = source.frame
        table: dict[tuple[int, int], float] = {}
        items = entries.items() if hasattr(entries, "items") else entries
        for (x, y), value in items:
            xb = x.bits if isinstance(x, Proposition) else frame.prop(x).bits
            yb = y.bits if isinstance(y, Proposition) else frame.prop(y).bits
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"non-finite transport mass {value!r}")
            if value != 0.0:
                table[(xb, yb)] = table.get((xb, yb), 0.0) + value
        self._entries = tuple(sorted(table.items()))

    def entry_items(self) -> tuple[tuple[tuple[int, int], float], ...]:
        return self._entries

    def items(self) -> list[tuple[tuple[Proposition, Proposition], float]]:
        frame = self.source.frame
        return [
            ((Proposition(frame, xb), Proposition(frame, yb)), v)
            for (xb, yb), v in self._entries
        ]

    def value(self, x, y) -> float:
        frame = self.source.frame
        xb = x.bits if isinstance(x, Proposition) else frame.prop(x).bits
        yb = y.bits if isinstance(y, Proposition) else frame.prop(y).bits
        return dict(self._entries).get((xb, yb), 0.0)

    def __eq__(self, other):
        return (
            isinstance(other, Sharpening)
            and self.source == other.source
            and self.target == other.target
            and self._entries == other._entries
        )

    def __repr__(self):
        return f"Sharpening(entries={len(self._entries)})"


@dataclass(frozen=True)
class SharpeningReport:
    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def identity_sharpening(m: MassFunction) -> Sharpening:
    """The unique witness from a bba to itself: the diagonal plan."""
    return Sharpening(m, m, {(p, p): v for p, v in m.items()})


def verify_sharpening(r: Sharpening, *, tol: float = MARGIN_TOL) -> SharpeningReport:
    """Check nonnegativity, subset support and both marginal constraints."""
    frame = r.source.frame
    violations = []
    rows: dict[int, float] = {}
    cols: dict[int, float] = {}
    for (xb, yb), v in r.entry_items():
        if v < 0.0:
            violations.append(
                f"negative transport {v:g} on ({Proposition(frame, xb)!r}, "
                f"{Proposition(frame, yb)!r})"
            )
        if yb & ~xb:
            violations.append(
                f"support violation: {Proposition(frame, yb)!r} is not inside "
                f"{Proposition(frame, xb)!r}"
            )
        rows[xb] = rows.get(xb, 0.0) + v
        cols[yb] = cols.get(yb, 0.0) + v
    for xb in set(rows) | {b for b, _ in r.source._items}:
        expected = r.source.mass(xb)
        got = rows.get(xb, 0.0)
        if abs(got - expected) > tol:
            violations.append(
                f"row sum {got:.12g} != source mass {expected:.12g} on "
                f"{Proposition(frame, xb)!r}"
            )
    for yb in set(cols) | {b for b, _ in r.target._items}:
        expected = r.target.mass(yb)
        got = cols.get(yb, 0.0)
        if abs(got - expected) > tol:
            violations.append(
                f"column sum {got:.12g} != target mass {expected:.12g} on "
                f"{Proposition(frame, yb)!r}"
            )
    return SharpeningReport(tuple(violations))


def exists_sharpening(
    m1: MassFunction, m2: MassFunction, *, tol: float = MARGIN_TOL
) -> Sharpening | None:
    """A witness that m2 sharpens m1, or None when the transport
    polytope with subset support is empty."""
    if m1.frame != m2.frame:
        raise FrameMismatchError("mass functions live on different frames")
    m1.require_valid()
    m2.require_valid()
    supp1 = m1.focal_bits()
    supp2 = m2.focal_bits()
    variables = [(xb, yb) for xb in supp1 for yb in supp2 if yb & ~xb == 0]
    if not variables:
        return None
    n = len(variables)
    rows = []
    rhs = []
    for xb in supp1:
        row = np.zeros(n)
        for j, (vx, _) in enumerate(variables):
            if vx == xb:
                row[j] = 1.0
        rows.append(row)
        rhs.append(m1.mass(xb))
    for yb in supp2:
        row = np.zeros(n)
        for j, (_, vy) in enumerate(variables):
            if vy == yb:
                row[j] = 1.0
        rows.append(row)
        rhs.append(m2.mass(yb))
    vertex = simplex.feasible_vertex(np.array(rows), np.array(rhs), feas_tol=tol)
    if vertex is None:
        return None
    entries = {
        (xb, yb): v
        for (xb, yb), v in zip(variables, vertex)
        if v > 1e-15
    }
    return Sharpening(m1, m2, entries)


def compose(r12: Sharpening, r23: Sharpening, *, tol: float = MARGIN_TOL) -> Sharpening:
    """Chain two witnesses: r13(X, Z) = sum_Y r12(X, Y) r23(Y, Z) / m2(Y),
    with 0/0 read as 0."""
    mid_out = r12.target
    mid_in = r23.source
    if mid_out.frame != mid_in.frame:
        raise ValueError("witnesses chain through different frames")
    keys = {b for b, _ in mid_out._items} | {b for b, _ in mid_in._items}
    for b in keys:
        if abs(mid_out.mass(b) - mid_in.mass(b)) > tol:
            raise ValueError("mass mismatch between the two witnesses")
    by_mid: dict[int, list[tuple[int, float]]] = {}
    for (yb, zb), v in r23.entry_items():
        if v != 0.0:
            by_mid.setdefault(yb, []).append((zb, v))
    entries: dict[tuple[int, int], float] = {}
    for (xb, yb), v12 in r12.entry_items():
        if v12 == 0.0:
            continue
        denom = mid_out.mass(yb)
        if denom <= 0.0:
            continue
        for zb, v23 in by_mid.get(yb, []):
            key = (xb, zb)
            entries[key] = entries.get(key, 0.0) + v12 * v23 / denom
    return Sharpening(r12.source, r23.target, entries)


def dominates_pointwise(m1: MassFunction, m2: MassFunction, *, tol: float = MARGIN_TOL) -> bool:
    """True when the credibility of m1 never exceeds that of m2, checked
    exhaustively over the power set."""
    if m1.frame != m2.frame:
        raise FrameMismatchError("mass functions live on different frames")
    t1 = credibility_table(m1)
    t2 = credibility_table(m2)
    return all(a <= b + tol for a, b in zip(t1, t2))


def is_minimal_probability(m: MassFunction) -> bool:
    """Probability densities are the minimal elements of the order: any
    witness out of one must be the identity."""
    m.require_valid()
    return is_probability_density(m)
