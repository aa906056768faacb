"""Power-set frames of discernment, propositions and mass functions.

A frame is an ordered tuple of distinct atom labels.  Propositions are
subsets of the atoms, stored as bitmasks over the frame.  A mass function
(basic belief assignment) maps propositions to nonnegative masses summing
to one, under either the open-world or the closed-world hypothesis.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Iterator

DEFAULT_ATOM_CAP = 16
SUM_TOLERANCE = 1e-9


class FrameError(ValueError):
    """Invalid frame or proposition construction."""


class FrameMismatchError(FrameError):
    """Operands belong to different frames."""


class InvalidMassError(ValueError):
    """An operation required a valid mass function and got an invalid one."""


class Frame:
    """Ordered finite set of atom labels; its subsets carry belief."""

    __slots__ = ("atoms", "_index")

    def __init__(self, atoms: Iterable[str], *, atom_cap: int = DEFAULT_ATOM_CAP):
        atoms = tuple(atoms)
        if not atoms:
            raise FrameError("a frame needs at least one atom")
        if len(set(atoms)) != len(atoms):
            raise FrameError("atom labels must be pairwise distinct")
        if len(atoms) > atom_cap:
            raise FrameError(
                f"frame has {len(atoms)} atoms, exceeding the cap of {atom_cap}"
            )
        self.atoms = atoms
        self._index = {a: i for i, a in enumerate(atoms)}

    @property
    def size(self) -> int:
        return len(self.atoms)

    @property
    def full_bits(self) -> int:
        return (1 << len(self.atoms)) - 1

    def bit_of(self, label: str) -> int:
        try:
            return 1 << self._index[label]
        except KeyError:
            raise FrameError(f"unknown atom {label!r}") from None

    def prop(self, members: Iterable[str] | str) -> "Proposition":
        """Proposition over this frame from atom labels (a bare str is one atom)."""
        if isinstance(members, str):
            members = (members,)
        bits = 0
        for label in members:
            bits |= self.bit_of(label)
        return Proposition(self, bits)

    def atom(self, label: str) -> "Proposition":
        return Proposition(self, self.bit_of(label))

    @property
    def empty(self) -> "Proposition":
        return Proposition(self, 0)

    @property
    def top(self) -> "Proposition":
        return Proposition(self, self.full_bits)

    def from_bits(self, bits: int) -> "Proposition":
        if bits < 0 or bits > self.full_bits:
            raise FrameError(f"bitmask {bits:#x} outside frame of size {self.size}")
        return Proposition(self, bits)

    def all_props(self) -> Iterator["Proposition"]:
        """Every proposition of the power set, the empty set first."""
        for bits in range(self.full_bits + 1):
            yield Proposition(self, bits)

    def __eq__(self, other):
        return isinstance(other, Frame) and self.atoms == other.atoms

    def __hash__(self):
        return hash(self.atoms)

    def __repr__(self):
        return f"Frame({list(self.atoms)!r})"


class Proposition:
    """A subset of a frame's atoms, with the usual set algebra."""

    __slots__ = ("frame", "bits")

    def __init__(self, frame: Frame, bits: int):
        self.frame = frame
        self.bits = bits

    @property
    def members(self) -> tuple[str, ...]:
        return tuple(a for i, a in enumerate(self.frame.atoms) if self.bits >> i & 1)

    @property
    def is_empty(self) -> bool:
        return self.bits == 0

    @property
    def is_top(self) -> bool:
        return self.bits == self.frame.full_bits

    def __and__(self, other):
        return prop_and(self, other)

    def __or__(self, other):
        return prop_or(self, other)

    def __invert__(self):
        return prop_not(self)

    def __le__(self, other):
        return prop_subset(self, other)

    def __eq__(self, other):
        return (
            isinstance(other, Proposition)
            and self.frame == other.frame
            and self.bits == other.bits
        )

    def __hash__(self):
        return hash((self.frame.atoms, self.bits))

    def __repr__(self):
        if self.is_empty:
            return "{}"
        return "{" + ",".join(self.members) + "}"


def _same_frame(a: Proposition, b: Proposition) -> Frame:
    if a.frame != b.frame:
        raise FrameMismatchError("propositions belong to different frames")
    return a.frame


def prop_and(a: Proposition, b: Proposition) -> Proposition:
    return Proposition(_same_frame(a, b), a.bits & b.bits)


def prop_or(a: Proposition, b: Proposition) -> Proposition:
    return Proposition(_same_frame(a, b), a.bits | b.bits)


def prop_not(a: Proposition) -> Proposition:
    return Proposition(a.frame, a.frame.full_bits & ~a.bits)


def prop_subset(a: Proposition, b: Proposition) -> bool:
    _same_frame(a, b)
    return a.bits & ~b.bits == 0


def _key_to_bits(frame: Frame, key) -> int:
    if isinstance(key, Proposition):
        if key.frame != frame:
            raise FrameMismatchError("proposition from a different frame")
        return key.bits
    if isinstance(key, bool):
        raise FrameError(f"invalid proposition key {key!r}")
    if isinstance(key, int):
        if key < 0 or key > frame.full_bits:
            raise FrameError(f"bitmask {key:#x} outside frame of size {frame.size}")
        return key
    if isinstance(key, str):
        return frame.bit_of(key)
    bits = 0
    for label in key:
        bits |= frame.bit_of(label)
    return bits


class MassFunction:
    """Sparse basic belief assignment: proposition -> mass, absent means 0."""

    __slots__ = ("frame", "world", "_masses", "_items")

    def __init__(self, frame: Frame, masses, world: str = "closed"):
        if world not in ("open", "closed"):
            raise ValueError(f"world must be 'open' or 'closed', got {world!r}")
        self.frame = frame
        self.world = world
        table: dict[int, float] = {}
        items = masses.items() if hasattr(masses, "items") else masses
        for key, value in items:
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"non-finite mass {value!r}")
            bits = _key_to_bits(frame, key)
            value = table.get(bits, 0.0) + value
            if value == 0.0:
                table.pop(bits, None)
            else:
                table[bits] = value
        self._masses = table
        self._items = tuple(sorted(table.items()))

    def mass(self, key) -> float:
        return self._masses.get(_key_to_bits(self.frame, key), 0.0)

    def items(self) -> list[tuple[Proposition, float]]:
        return [(Proposition(self.frame, b), v) for b, v in self._items]

    def focal(self) -> list[Proposition]:
        return [Proposition(self.frame, b) for b, v in self._items if v > 0.0]

    def focal_bits(self) -> list[int]:
        return [b for b, v in self._items if v > 0.0]

    def total(self) -> float:
        return math.fsum(v for _, v in self._items)

    def require_valid(self, *, tol: float = SUM_TOLERANCE) -> "MassFunction":
        report = validate_mass(self, tol=tol)
        if not report.ok:
            raise InvalidMassError("; ".join(report.violations))
        return self

    def __eq__(self, other):
        return (
            isinstance(other, MassFunction)
            and self.frame == other.frame
            and self.world == other.world
            and self._items == other._items
        )

    def __hash__(self):
        return hash((self.frame.atoms, self.world, self._items))

    def __repr__(self):
        body = ", ".join(f"{Proposition(self.frame, b)!r}: {v:g}" for b, v in self._items)
        return f"MassFunction({{{body}}}, world={self.world!r})"


@dataclass(frozen=True)
class MassReport:
    """Validation outcome; empty violation list means the bba is valid."""

    violations: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_mass(m: MassFunction, *, tol: float = SUM_TOLERANCE) -> MassReport:
    """Check nonnegativity, unit total and the closed-world constraint."""
    violations = []
    for bits, value in m._items:
        if value < 0.0:
            violations.append(
                f"negative mass {value:g} on {Proposition(m.frame, bits)!r}"
            )
    total = m.total()
    if abs(total - 1.0) > tol:
        violations.append(f"masses sum to {total:.12g}, expected 1")
    if m.world == "closed" and abs(m._masses.get(0, 0.0)) > 0.0:
        violations.append("closed world requires zero mass on the empty proposition")
    return MassReport(tuple(violations))


def credibility(m: MassFunction, x: Proposition) -> float:
    """Pessimistic belief bound: total mass of nonempty propositions inside x."""
    if x.frame != m.frame:
        raise FrameMismatchError("proposition from a different frame")
    xb = x.bits
    return math.fsum(v for b, v in m._items if b != 0 and b & ~xb == 0)


def plausibility(m: MassFunction, x: Proposition) -> float:
    """Optimistic belief bound: one minus the credibility of the complement."""
    return 1.0 - credibility(m, prop_not(x))


def credibility_table(m: MassFunction) -> list[float]:
    """Credibility of every proposition, indexed by bitmask (subset-sum transform)."""
    n = m.frame.size
    table = [0.0] * (1 << n)
    for bits, value in m._items:
        if bits != 0:
            table[bits] = value
    for i in range(n):
        bit = 1 << i
        for mask in range(1 << n):
            if mask & bit:
                table[mask] += table[mask ^ bit]
    return table


def is_probabilistic(m: MassFunction) -> bool:
    """True when the focal elements are pairwise disjoint and cover the top."""
    seen = 0
    for bits in m.focal_bits():
        if bits == 0 or bits & seen:
            return False
        seen |= bits
    return seen == m.frame.full_bits


def is_probability_density(m: MassFunction) -> bool:
    """True when the mass function is probabilistic with atomic focal elements."""
    if not is_probabilistic(m):
        return False
    return all(bits.bit_count() == 1 for bits in m.focal_bits())


def total_ignorance(frame: Frame, world: str = "closed") -> MassFunction:
    """The vacuous bba: all mass on the full proposition."""
    return MassFunction(frame, {frame.top: 1.0}, world=world)
