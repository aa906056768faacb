"""Entropy-maximizing fusion of closed-world mass functions.

The fused bba is the projection of the joint mass of maximal entropy
subject to (a) each input being a marginal of the joint and (b) zero mass
on every tuple of propositions with empty intersection.  Infeasibility of
those constraints means the sources are fundamentally incompatible and
the combination is rejected rather than forced.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import maxent, simplex
from .frame import (
    Frame,
    FrameMismatchError,
    InvalidMassError,
    MassFunction,
    Proposition,
    credibility,
)
from .maxent import ConvergenceError, SolverConfig
from .sharpen import Sharpening, verify_sharpening

__all__ = [
    "JointMass",
    "SolverConfig",
    "FusionOutcome",
    "FusionRejectedError",
    "ConvergenceError",
    "entropy",
    "feasible_point",
    "emr_fuse",
    "gradient_step",
    "ipf_oracle",
    "dominated_feasible_point",
    "disjoint_family_bound",
]

MASS_CLAMP = 1e-12

CONFLICT_FREE = "conflict-free"
UNCONSTRAINED = "unconstrained"


class FusionRejectedError(ValueError):
    """The fusion constraints admit no solution."""


def _and_all(bits_tuple: tuple[int, ...]) -> int:
    out = ~0
    for b in bits_tuple:
        out &= b
    return out


class JointMass:
    """Sparse joint mass over tuples of propositions.

    Entries map arity-s tuples to nonnegative masses summing to one.
    Explicit zero entries are kept: they document the index space, which
    matters when a joint is used as an optimization iterate.
    """

    __slots__ = ("frame", "arity", "support_policy", "_entries")

    def __init__(self, frame: Frame, arity: int, entries, support_policy: str = CONFLICT_FREE):
        if support_policy not in (CONFLICT_FREE, UNCONSTRAINED):
            raise ValueError(f"unknown support policy {support_policy!r}")
        if arity < 1:
            raise ValueError("arity must be at least 1")
        self.frame = frame
        self.arity = arity
        self.support_policy = support_policy
        table: dict[tuple[int, ...], float] = {}
        items = entries.items() if hasattr(entries, "items") else entries
        for key, value in items:
            bits = tuple(self._tuple_bits(key))
            if len(bits) != arity:
                raise ValueError(f"tuple {key!r} does not match arity {arity}")
            value = float(value)
            if not math.isfinite(value):
                raise ValueError(f"non-finite joint mass {value!r}")
            table[bits] = table.get(bits, 0.0) + value
        self._entries = tuple(sorted(table.items()))
        self._validate()

    def _tuple_bits(self, key):
        for part in key:
            if isinstance(part, Proposition):
                if part.frame != self.frame:
                    raise FrameMismatchError("proposition from a different frame")
                yield part.bits
            elif isinstance(part, int) and not isinstance(part, bool):
                if part < 0 or part > self.frame.full_bits:
                    raise ValueError(f"bitmask {part:#x} outside the frame")
                yield part
            else:
                yield self.frame.prop(part).bits

    def _validate(self, tol: float = 1e-9):
        total = math.fsum(v for _, v in self._entries)
        if abs(total - 1.0) > tol:
            raise ValueError(f"joint masses sum to {total:.12g}, expected 1")
        for bits, value in self._entries:
            if value < 0.0:
                raise ValueError(f"negative joint mass {value:g}")
            if self.support_policy == CONFLICT_FREE and value > 0.0 and _and_all(bits) == 0:
                raise ValueError(
                    "conflict-free joint carries mass on a tuple with empty intersection"
                )

    def items(self) -> list[tuple[tuple[Proposition, ...], float]]:
        return [
            (tuple(Proposition(self.frame, b) for b in bits), v)
            for bits, v in self._entries
        ]

    def bit_items(self) -> tuple[tuple[tuple[int, ...], float], ...]:
        return self._entries

    def mass(self, key) -> float:
        bits = tuple(self._tuple_bits(key))
        return dict(self._entries).get(bits, 0.0)

    def marginal(self, i: int) -> MassFunction:
        """Projection of the joint onto coordinate i as an open-world bba."""
        acc: dict[int, float] = {}
        for bits, v in self._entries:
            acc[bits[i]] = acc.get(bits[i], 0.0) + v
        return MassFunction(self.frame, acc, world="open")

    def __eq__(self, other):
        return (
            isinstance(other, JointMass)
            and self.frame == other.frame
            and self.arity == other.arity
            and self.support_policy == other.support_policy
            and self._entries == other._entries
        )

    def __repr__(self):
        return f"JointMass(arity={self.arity}, entries={len(self._entries)})"


@dataclass(frozen=True)
class FusionOutcome:
    """Result of an entropy-maximizing fusion attempt."""

    status: str  # "fused" | "rejected"
    fused: MassFunction | None
    joint: JointMass | None
    iterations: int
    final_entropy: float | None


def entropy(f: JointMass) -> float:
    """-sum f ln f over the joint entries, with 0 ln 0 = 0."""
    return maxent.entropy_vec([v for _, v in f.bit_items()])


def _validated_inputs(ms, *, closed_required=True) -> Frame:
    ms = list(ms)
    if not ms:
        raise ValueError("need at least one mass function")
    frame = ms[0].frame
    for m in ms:
        if m.frame != frame:
            raise FrameMismatchError("mass functions live on different frames")
        m.require_valid()
        if closed_required and m.world != "closed":
            raise InvalidMassError("fusion requires closed-world inputs")
    return frame


def _index_space(ms, *, conflict_free=True):
    supports = [m.focal_bits() for m in ms]
    tuples = [
        t
        for t in itertools.product(*supports)
        if not conflict_free or _and_all(t) != 0
    ]
    blocks = []
    for i, supp in enumerate(supports):
        position = {b: j for j, b in enumerate(supp)}
        groups = tuple(position[t[i]] for t in tuples)
        targets = tuple(ms[i].mass(b) for b in supp)
        blocks.append((groups, targets))
    return tuples, blocks


def feasible_point(ms, *, tol: float = 1e-9) -> JointMass | None:
    """Any vertex of the fusion polytope, or None when it is empty."""
    ms = list(ms)
    frame = _validated_inputs(ms)
    tuples, blocks = _index_space(ms)
    if not tuples:
        return None
    A, b = maxent.assemble_rows(len(tuples), blocks)
    vertex = simplex.feasible_vertex(A, b, feas_tol=tol)
    if vertex is None:
        return None
    return JointMass(frame, len(ms), zip(tuples, vertex), CONFLICT_FREE)


def _project_fused(frame: Frame, tuples, f) -> MassFunction:
    acc: dict[int, float] = {}
    for bits, value in zip(tuples, f):
        if value > 0.0:
            key = _and_all(bits)
            acc[key] = acc.get(key, 0.0) + value
    kept = {b: v for b, v in acc.items() if v >= MASS_CLAMP}
    total = math.fsum(kept.values())
    return MassFunction(frame, {b: v / total for b, v in kept.items()}, world="closed")


def emr_fuse(ms, cfg: SolverConfig | None = None) -> FusionOutcome:
    """Simultaneous entropy-maximizing combination of the inputs."""
    ms = list(ms)
    frame = _validated_inputs(ms)
    cfg = cfg or SolverConfig()
    tuples, blocks = _index_space(ms)
    if not tuples:
        return FusionOutcome("rejected", None, None, 0, None)
    result = maxent.maxent_maximize(len(tuples), blocks, cfg)
    if result is None:
        return FusionOutcome("rejected", None, None, 0, None)
    joint_entries = {t: v for t, v in zip(tuples, result.f) if v > 0.0}
    joint = JointMass(frame, len(ms), joint_entries, CONFLICT_FREE)
    fused = _project_fused(frame, tuples, result.f)
    return FusionOutcome("fused", fused, joint, result.iterations, result.entropy)


def gradient_step(f_t: JointMass, theta_t: float) -> dict[tuple[Proposition, ...], float]:
    """One quadratic-program step of the projected-gradient scheme.

    Minimizes sum (theta (1 + ln f) + df)^2 over increments that keep all
    marginals unchanged, keep f + df nonnegative, and stay zero on tuples
    with empty intersection.  The index space is the set of entries
    present in the joint, including explicit zeros.
    """
    if theta_t <= 0:
        raise ValueError("theta must be positive")
    entries = f_t.bit_items()
    free = [i for i, (bits, _) in enumerate(entries) if _and_all(bits) != 0]
    values = np.array([entries[i][1] for i in free])
    rows = []
    for coord in range(f_t.arity):
        seen: dict[int, list[int]] = {}
        for j, i in enumerate(free):
            seen.setdefault(entries[i][0][coord], []).append(j)
        for members in seen.values():
            row = np.zeros(len(free))
            row[members] = 1.0
            rows.append(row)
    A = np.array(rows) if rows else np.zeros((0, len(free)))
    d = -theta_t * (1.0 + np.log(np.maximum(values, maxent.LOG_FLOOR)))
    delta = maxent.project_to_polytope(d, A, -values)
    out: dict[tuple[Proposition, ...], float] = {}
    for (bits, _), _v in zip(entries, range(len(entries))):
        out[tuple(Proposition(f_t.frame, b) for b in bits)] = 0.0
    for j, i in enumerate(free):
        bits = entries[i][0]
        out[tuple(Proposition(f_t.frame, b) for b in bits)] = float(delta[j])
    return out


def ipf_oracle(ms, *, support_policy: str = CONFLICT_FREE) -> JointMass | None:
    """Iterative-scaling solution of the same program; independent of the
    projected-gradient path.  Unconstrained support reproduces the plain
    product joint of the conjunctive rule."""
    ms = list(ms)
    conflict_free = support_policy == CONFLICT_FREE
    frame = _validated_inputs(ms, closed_required=conflict_free)
    tuples, blocks = _index_space(ms, conflict_free=conflict_free)
    if not tuples:
        return None
    f = maxent.ipf_fit(len(tuples), blocks)
    if f is None:
        return None
    entries = {t: v for t, v in zip(tuples, f) if v > 0.0}
    return JointMass(frame, len(ms), entries, support_policy)


def dominated_feasible_point(ms, m: MassFunction, rs) -> JointMass:
    """Feasible joint built from witnesses that each input weakens m.

    f(X_1..X_s) = sum_X m(X)^(1-s) prod_i r_i(X_i, X), with terms at
    m(X) = 0 taken as zero.
    """
    ms = list(ms)
    rs = list(rs)
    frame = _validated_inputs(ms)
    if len(rs) != len(ms):
        raise ValueError("need one sharpening witness per input")
    m.require_valid()
    if m.world != "closed":
        raise InvalidMassError("the dominating bba must be closed-world")
    for i, r in enumerate(rs):
        if not isinstance(r, Sharpening):
            raise ValueError("witnesses must be Sharpening instances")
        if r.source != ms[i] or r.target != m:
            raise ValueError(f"witness {i} does not map input {i} onto m")
        report = verify_sharpening(r)
        if not report.ok:
            raise ValueError(f"witness {i} is invalid: {'; '.join(report.violations)}")
    s = len(ms)
    acc: dict[tuple[int, ...], float] = {}
    columns = [
        {}
        for _ in range(s)
    ]
    for i, r in enumerate(rs):
        for (xb, yb), v in r.entry_items():
            if v > 0.0:
                columns[i].setdefault(yb, []).append((xb, v))
    for xb in m.focal_bits():
        weight = m.mass(xb) ** (1 - s)
        choices = [columns[i].get(xb, []) for i in range(s)]
        if any(not c for c in choices):
            continue
        for combo in itertools.product(*choices):
            key = tuple(c[0] for c in combo)
            value = weight * math.prod(c[1] for c in combo)
            acc[key] = acc.get(key, 0.0) + value
    return JointMass(frame, s, acc, CONFLICT_FREE)


def disjoint_family_bound(ms, family, *, tol: float = 1e-9) -> bool:
    """Necessary condition for fusion to exist: over any disjoint family,
    the best credibilities must not overcommit past total mass one."""
    ms = list(ms)
    frame = _validated_inputs(ms)
    family = list(family)
    if not family:
        raise ValueError("family must not be empty")
    seen = 0
    for x in family:
        if x.frame != frame:
            raise FrameMismatchError("family proposition from a different frame")
        if x.is_empty:
            raise ValueError("family propositions must be nonempty")
        if x.bits & seen:
            raise ValueError("family propositions must be pairwise disjoint")
        seen |= x.bits
    total = math.fsum(max(credibility(m, x) for m in ms) for x in family)
    return total <= 1.0 + tol
