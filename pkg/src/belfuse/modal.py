"""Finite model of a multi-source modal logic, and its belief bridge.

Points of the model are pairs (actual world atom, one observed atom set
per source).  Two universes are built: the unrestricted one, and the
truth-grounded one that keeps only points whose actual atom lies in every
source's observation (the semantic counterpart of axiom T and of the
closed-world hypothesis).

A source group J knows a classical proposition at a point when the
intersection of the group's observations entails it.  The intrinsic part
of that knowledge (what J attributes to a proposition and to nothing
strictly smaller) partitions the universe; fusing those partitions under
maximum entropy reproduces the belief-level combination rules, which is
used here as an independent cross-check.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, NamedTuple

from .emr import FusionRejectedError
from .frame import Frame, MassFunction
from .maxent import SolverConfig, maxent_maximize

WITH_T = "with-t"
WITHOUT_T = "without-t"

DEFAULT_ATOM_CAP = 4
DEFAULT_SOURCE_CAP = 3

MASS_CLAMP = 1e-12


class LogicError(ValueError):
    """Invalid signature, source group or classical context."""


class ParseError(ValueError):
    """Formula syntax error, annotated with a character position."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class LogicSignature:
    """Atomic propositions (a partition of the world) plus n sources."""

    __slots__ = ("atoms", "n_sources", "_index")

    def __init__(
        self,
        atoms: Iterable[str],
        n_sources: int,
        *,
        atom_cap: int = DEFAULT_ATOM_CAP,
        source_cap: int = DEFAULT_SOURCE_CAP,
    ):
        atoms = tuple(atoms)
        if not atoms:
            raise LogicError("need at least one atomic proposition")
        if len(set(atoms)) != len(atoms):
            raise LogicError("atomic propositions must be distinct")
        if len(atoms) > atom_cap:
            raise LogicError(
                f"{len(atoms)} atomic propositions exceed the cap of {atom_cap}"
            )
        if n_sources < 1:
            raise LogicError("need at least one source")
        if n_sources > source_cap:
            raise LogicError(f"{n_sources} sources exceed the cap of {source_cap}")
        self.atoms = atoms
        self.n_sources = n_sources
        self._index = {a: i for i, a in enumerate(atoms)}

    @property
    def n_atoms(self) -> int:
        return len(self.atoms)

    @property
    def full_bits(self) -> int:
        return (1 << len(self.atoms)) - 1

    @property
    def sources(self) -> range:
        return range(1, self.n_sources + 1)

    def atom_bit(self, label: str) -> int:
        try:
            return 1 << self._index[label]
        except KeyError:
            raise LogicError(f"unknown atomic proposition {label!r}") from None

    def subset_bits(self, labels: Iterable[str]) -> int:
        bits = 0
        for label in labels:
            bits |= self.atom_bit(label)
        return bits

    def __eq__(self, other):
        return (
            isinstance(other, LogicSignature)
            and self.atoms == other.atoms
            and self.n_sources == other.n_sources
        )

    def __hash__(self):
        return hash((self.atoms, self.n_sources))

    def __repr__(self):
        return f"LogicSignature(atoms={list(self.atoms)!r}, n_sources={self.n_sources})"


class ModelPoint(NamedTuple):
    actual: int  # index of the true world atom
    observed: tuple[int, ...]  # one atom-set bitmask per source


@lru_cache(maxsize=64)
def _point_list(sig: LogicSignature, t_mode: str) -> tuple[ModelPoint, ...]:
    if t_mode not in (WITH_T, WITHOUT_T):
        raise LogicError(f"unknown t-mode {t_mode!r}")
    n_subsets = 1 << sig.n_atoms
    points = []
    for observed in itertools.product(range(n_subsets), repeat=sig.n_sources):
        joint = sig.full_bits
        for e in observed:
            joint &= e
        for actual in range(sig.n_atoms):
            if t_mode == WITH_T and not (joint >> actual) & 1:
                continue
            points.append(ModelPoint(actual, observed))
    return tuple(points)


@dataclass(frozen=True)
class ModelSet:
    """A set of model points, stored as a bitmask over the enumerated
    universe so the heavy set algebra stays cheap."""

    signature: LogicSignature
    t_mode: str
    mask: int

    def _check(self, other: "ModelSet") -> None:
        if self.signature != other.signature or self.t_mode != other.t_mode:
            raise LogicError("model sets from different universes")

    def __and__(self, other):
        self._check(other)
        return ModelSet(self.signature, self.t_mode, self.mask & other.mask)

    def __or__(self, other):
        self._check(other)
        return ModelSet(self.signature, self.t_mode, self.mask | other.mask)

    def __sub__(self, other):
        self._check(other)
        return ModelSet(self.signature, self.t_mode, self.mask & ~other.mask)

    def complement(self) -> "ModelSet":
        full = universe(self.signature, self.t_mode)
        return ModelSet(self.signature, self.t_mode, full.mask & ~self.mask)

    def issubset(self, other: "ModelSet") -> bool:
        self._check(other)
        return self.mask & ~other.mask == 0

    @property
    def is_empty(self) -> bool:
        return self.mask == 0

    def __len__(self):
        return self.mask.bit_count()

    @property
    def points(self) -> frozenset[ModelPoint]:
        universe_points = _point_list(self.signature, self.t_mode)
        return frozenset(
            p for i, p in enumerate(universe_points) if (self.mask >> i) & 1
        )

    def __repr__(self):
        return f"ModelSet({self.t_mode}, {len(self)} points)"


def universe(sig: LogicSignature, t_mode: str) -> ModelSet:
    points = _point_list(sig, t_mode)
    return ModelSet(sig, t_mode, (1 << len(points)) - 1)


@lru_cache(maxsize=4096)
def atom_set_model(sig: LogicSignature, t_mode: str, e_bits: int) -> ModelSet:
    """Denotation of a classical proposition given as an atom set."""
    mask = 0
    for i, p in enumerate(_point_list(sig, t_mode)):
        if (e_bits >> p.actual) & 1:
            mask |= 1 << i
    return ModelSet(sig, t_mode, mask)


def _group_bits(sig: LogicSignature, sources: Iterable[int]) -> frozenset[int]:
    group = frozenset(sources)
    if not group:
        raise LogicError("source group must not be empty")
    for j in group:
        if not isinstance(j, int) or j < 1 or j > sig.n_sources:
            raise LogicError(f"source {j!r} outside 1..{sig.n_sources}")
    return group


@lru_cache(maxsize=8192)
def _modal_cached(sig: LogicSignature, t_mode: str, group: frozenset[int], e_bits: int) -> ModelSet:
    mask = 0
    for i, p in enumerate(_point_list(sig, t_mode)):
        joint = sig.full_bits
        for j in group:
            joint &= p.observed[j - 1]
        if joint & ~e_bits == 0:
            mask |= 1 << i
    return ModelSet(sig, t_mode, mask)


def modal_model(sources, e_bits: int, sig: LogicSignature, t_mode: str) -> ModelSet:
    """Denotation of [J]X for a classical X given by its atom set: the
    points where group J's joint observation entails X."""
    return _modal_cached(sig, t_mode, _group_bits(sig, sources), e_bits)


def _proper_submasks(e_bits: int):
    if e_bits == 0:
        return
    sub = (e_bits - 1) & e_bits
    while True:
        yield sub
        if sub == 0:
            return
        sub = (sub - 1) & e_bits


@lru_cache(maxsize=8192)
def _bla_cached(sig: LogicSignature, t_mode: str, group: frozenset[int], e_bits: int) -> ModelSet:
    base = _modal_cached(sig, t_mode, group, e_bits)
    below = 0
    for sub in _proper_submasks(e_bits):
        below |= _modal_cached(sig, t_mode, group, sub).mask
    return ModelSet(sig, t_mode, base.mask & ~below)


def bla_model(sources, e_bits: int, sig: LogicSignature, t_mode: str) -> ModelSet:
    """Denotation of the intrinsic assignment (J)X: group J knows X but
    does not know any strictly smaller classical proposition."""
    return _bla_cached(sig, t_mode, _group_bits(sig, sources), e_bits)


def logical_combine(j_sources, k_sources, e_bits: int, sig: LogicSignature, t_mode: str) -> ModelSet:
    """Right-hand side of the combination identity: the union of joint
    intrinsic assignments (J)F and (K)G over pairs with F inter G = E."""
    group_j = _group_bits(sig, j_sources)
    group_k = _group_bits(sig, k_sources)
    if group_j & group_k:
        raise LogicError("source groups must be disjoint for combination")
    comp = sig.full_bits & ~e_bits
    mask = 0
    f_extra = comp
    while True:
        g_space = comp & ~f_extra
        g_extra = g_space
        while True:
            fa = _bla_cached(sig, t_mode, group_j, e_bits | f_extra)
            fb = _bla_cached(sig, t_mode, group_k, e_bits | g_extra)
            mask |= fa.mask & fb.mask
            if g_extra == 0:
                break
            g_extra = (g_extra - 1) & g_space
        if f_extra == 0:
            break
        f_extra = (f_extra - 1) & comp
    return ModelSet(sig, t_mode, mask)


# -- formulas -----------------------------------------------------------

@dataclass(frozen=True)
class Falsum:
    pass


@dataclass(frozen=True)
class Atom:
    name: str


@dataclass(frozen=True)
class Implies:
    antecedent: "Formula"
    consequent: "Formula"


@dataclass(frozen=True)
class Modal:
    sources: frozenset[int]
    body: "Formula"


@dataclass(frozen=True)
class Bla:
    sources: frozenset[int]
    body: "Formula"


Formula = Falsum | Atom | Implies | Modal | Bla

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<arrow>->)|(?P<ident>[A-Za-z_]\w*)|(?P<int>\d+)|(?P<punct>[()\[\],&|~]))"
)


def _tokenize(text: str):
    tokens = []
    pos = 0
    while pos < len(text):
        match = _TOKEN_RE.match(text, pos)
        if match is None:
            stripped = text[pos:].lstrip()
            if not stripped:
                break
            raise ParseError(f"unexpected character {stripped[0]!r}", len(text) - len(stripped))
        if match.lastgroup == "arrow":
            tokens.append(("->", "->", match.start(match.lastgroup)))
        elif match.lastgroup == "ident":
            tokens.append(("ident", match.group("ident"), match.start("ident")))
        elif match.lastgroup == "int":
            tokens.append(("int", int(match.group("int")), match.start("int")))
        else:
            tokens.append((match.group("punct"), match.group("punct"), match.start("punct")))
        pos = match.end()
    tokens.append(("end", None, len(text)))
    return tokens


class _Parser:
    """Recursive descent for the simple modal fragment.

    Grammar, loosest first:  implication (right associative), then `|`,
    then `&`, then prefixes `~`, `[J]`, `(J)` and atoms.  `true` and
    `false` are keywords.  Modal bodies must be classical: a modality
    inside one is rejected where it occurs.
    """

    def __init__(self, text: str, sig: LogicSignature):
        self.tokens = _tokenize(text)
        self.sig = sig
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def next(self):
        token = self.tokens[self.i]
        self.i += 1
        return token

    def expect(self, kind):
        token = self.next()
        if token[0] != kind:
            raise ParseError(f"expected {kind!r}, found {token[1]!r}", token[2])
        return token

    def parse(self) -> Formula:
        formula = self.implication(False)
        token = self.peek()
        if token[0] != "end":
            raise ParseError(f"unexpected trailing {token[1]!r}", token[2])
        return formula

    def implication(self, in_modal: bool) -> Formula:
        lhs = self.disjunction(in_modal)
        if self.peek()[0] == "->":
            self.next()
            rhs = self.implication(in_modal)
            return Implies(lhs, rhs)
        return lhs

    def disjunction(self, in_modal: bool) -> Formula:
        out = self.conjunction(in_modal)
        while self.peek()[0] == "|":
            self.next()
            rhs = self.conjunction(in_modal)
            # X | Y  desugars to  ~X -> Y
            out = Implies(Implies(out, Falsum()), rhs)
        return out

    def conjunction(self, in_modal: bool) -> Formula:
        out = self.unary(in_modal)
        while self.peek()[0] == "&":
            self.next()
            rhs = self.unary(in_modal)
            # X & Y  desugars to  ~(X -> ~Y)
            out = Implies(Implies(out, Implies(rhs, Falsum())), Falsum())
        return out

    def _source_list(self, closer: str) -> frozenset[int]:
        ids = []
        while True:
            token = self.next()
            if token[0] != "int":
                raise ParseError("expected a source number", token[2])
            ids.append(token[1])
            token = self.next()
            if token[0] == closer:
                break
            if token[0] != ",":
                raise ParseError(f"expected ',' or {closer!r}", token[2])
        return frozenset(ids)

    def unary(self, in_modal: bool) -> Formula:
        token = self.peek()
        kind, value, pos = token
        if kind == "~":
            self.next()
            return Implies(self.unary(in_modal), Falsum())
        if kind == "[":
            if in_modal:
                raise ParseError("nested modality is not allowed", pos)
            self.next()
            sources = self._source_list("]")
            if not sources:
                raise ParseError("empty source group", pos)
            body = self.unary(True)
            return Modal(sources, body)
        if kind == "(":
            if self.tokens[self.i + 1][0] == "int":
                if in_modal:
                    raise ParseError("nested modality is not allowed", pos)
                self.next()
                sources = self._source_list(")")
                body = self.unary(True)
                return Bla(sources, body)
            self.next()
            inner = self.implication(in_modal)
            self.expect(")")
            return inner
        if kind == "ident":
            self.next()
            if value == "false":
                return Falsum()
            if value == "true":
                return Implies(Falsum(), Falsum())
            if value not in self.sig.atoms:
                raise ParseError(f"unknown atom {value!r}", pos)
            return Atom(value)
        raise ParseError(f"unexpected {value!r}", pos)


def parse_formula(text: str, sig: LogicSignature) -> Formula:
    """Parse the textual syntax: atoms, `&`, `|`, `~`, `->`, modality
    `[1,2] phi` and intrinsic assignment `(1) phi`."""
    return _Parser(text, sig).parse()


def classical_bits(formula: Formula, sig: LogicSignature) -> int:
    """Canonical atom set of a classical formula (truth atom by atom)."""

    def truth(f: Formula, atom_index: int) -> bool:
        if isinstance(f, Falsum):
            return False
        if isinstance(f, Atom):
            return sig.atom_bit(f.name) == 1 << atom_index
        if isinstance(f, Implies):
            return (not truth(f.antecedent, atom_index)) or truth(f.consequent, atom_index)
        raise LogicError("modality inside a classical context")

    bits = 0
    for i in range(sig.n_atoms):
        if truth(formula, i):
            bits |= 1 << i
    return bits


def model_of(formula: Formula, sig: LogicSignature, t_mode: str) -> ModelSet:
    """Denotation of a simple modal formula in the chosen universe."""
    full = universe(sig, t_mode)
    if isinstance(formula, Falsum):
        return ModelSet(sig, t_mode, 0)
    if isinstance(formula, Atom):
        return atom_set_model(sig, t_mode, sig.atom_bit(formula.name))
    if isinstance(formula, Implies):
        a = model_of(formula.antecedent, sig, t_mode)
        b = model_of(formula.consequent, sig, t_mode)
        return (full - a) | b
    if isinstance(formula, Modal):
        return modal_model(formula.sources, classical_bits(formula.body, sig), sig, t_mode)
    if isinstance(formula, Bla):
        return bla_model(formula.sources, classical_bits(formula.body, sig), sig, t_mode)
    raise LogicError(f"unknown formula node {formula!r}")


# -- axiom verification -------------------------------------------------

@dataclass(frozen=True)
class AxiomReport:
    t_mode: str
    counts: tuple[tuple[str, int], ...]
    violations: tuple[tuple[str, str], ...]
    t_counterexamples: tuple[str, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def _nonempty_groups(sig: LogicSignature) -> list[frozenset[int]]:
    out = []
    for size in range(1, sig.n_sources + 1):
        for combo in itertools.combinations(sig.sources, size):
            out.append(frozenset(combo))
    return out


def _subset_name(sig: LogicSignature, bits: int) -> str:
    if bits == 0:
        return "{}"
    return "{" + ",".join(a for i, a in enumerate(sig.atoms) if (bits >> i) & 1) + "}"


def verify_axioms(sig: LogicSignature, t_mode: str) -> AxiomReport:
    """Exhaustively instantiate every axiom schema over atom subsets and
    source groups; an empty violation list is the expected outcome.  In
    the unrestricted universe the truth axiom is reported separately as
    counterexamples, since it is not part of that logic."""
    full = universe(sig, t_mode)
    groups = _nonempty_groups(sig)
    subsets = range(sig.full_bits + 1)
    counts = []
    violations = []
    t_counterexamples = []

    checked = 0
    for i in range(sig.n_atoms):
        for j in range(sig.n_atoms):
            if i < j:
                checked += 1
                inter = atom_set_model(sig, t_mode, 1 << i) & atom_set_model(sig, t_mode, 1 << j)
                if not inter.is_empty:
                    violations.append(
                        ("partition", f"atoms {sig.atoms[i]} and {sig.atoms[j]} overlap")
                    )
    checked += 1
    if atom_set_model(sig, t_mode, sig.full_bits).mask != full.mask:
        violations.append(("partition", "atoms do not cover the universe"))
    counts.append(("partition", checked))

    checked = 0
    for group in groups:
        checked += 1
        if modal_model(group, sig.full_bits, sig, t_mode).mask != full.mask:
            violations.append(("N", f"[{set(group)}]true is not the universe"))
    counts.append(("N", checked))

    checked = 0
    for group in groups:
        for ex in subsets:
            for ey in subsets:
                checked += 1
                imp = (sig.full_bits & ~ex) | ey
                lhs = modal_model(group, imp, sig, t_mode) & modal_model(group, ex, sig, t_mode)
                if not lhs.issubset(modal_model(group, ey, sig, t_mode)):
                    violations.append(
                        (
                            "K",
                            f"group {set(group)}, X={_subset_name(sig, ex)}, "
                            f"Y={_subset_name(sig, ey)}",
                        )
                    )
    counts.append(("K", checked))

    checked = 0
    for group in groups:
        for e in subsets:
            checked += 1
            holds = modal_model(group, e, sig, t_mode).issubset(atom_set_model(sig, t_mode, e))
            if not holds:
                detail = f"group {set(group)}, X={_subset_name(sig, e)}"
                if t_mode == WITH_T:
                    violations.append(("T", detail))
                elif len(t_counterexamples) < 5:
                    t_counterexamples.append(detail)
    counts.append(("T", checked))

    checked = 0
    for group_j in groups:
        for group_k in groups:
            for e in subsets:
                checked += 1
                if not modal_model(group_j, e, sig, t_mode).issubset(
                    modal_model(group_j | group_k, e, sig, t_mode)
                ):
                    violations.append(
                        ("Inc", f"groups {set(group_j)}, {set(group_k)}, X={_subset_name(sig, e)}")
                    )
    counts.append(("Inc", checked))

    checked = 0
    for group_j in groups:
        for group_k in groups:
            for e in subsets:
                checked += 1
                rhs_mask = 0
                for f_bits in subsets:
                    mj = modal_model(group_j, f_bits, sig, t_mode)
                    for g_bits in subsets:
                        if f_bits & g_bits & ~e:
                            continue
                        rhs_mask |= mj.mask & modal_model(group_k, g_bits, sig, t_mode).mask
                lhs = modal_model(group_j | group_k, e, sig, t_mode)
                if lhs.mask & ~rhs_mask:
                    violations.append(
                        ("Ind", f"groups {set(group_j)}, {set(group_k)}, E={_subset_name(sig, e)}")
                    )
    counts.append(("Ind", checked))

    return AxiomReport(t_mode, tuple(counts), tuple(violations), tuple(t_counterexamples))


def check_bla_partition(sig: LogicSignature, t_mode: str) -> list[str]:
    """Intrinsic assignments are pairwise disjoint and cover the universe
    for every source group; joint cells of disjoint groups do too."""
    issues = []
    full = universe(sig, t_mode)
    subsets = range(sig.full_bits + 1)
    for group in _nonempty_groups(sig):
        cover = 0
        for e in subsets:
            cell = bla_model(group, e, sig, t_mode)
            if cover & cell.mask:
                issues.append(f"group {set(group)}: assignments overlap at {_subset_name(sig, e)}")
            cover |= cell.mask
        if cover != full.mask:
            issues.append(f"group {set(group)}: assignments do not cover the universe")
    for group_j, group_k in itertools.combinations(_nonempty_groups(sig), 2):
        if group_j & group_k:
            continue
        cover = 0
        overlap = False
        for e in subsets:
            mj = bla_model(group_j, e, sig, t_mode)
            for f in subsets:
                cell = mj.mask & bla_model(group_k, f, sig, t_mode).mask
                if cover & cell:
                    overlap = True
                cover |= cell
        if overlap:
            issues.append(f"joint cells of {set(group_j)} and {set(group_k)} overlap")
        if cover != full.mask:
            issues.append(f"joint cells of {set(group_j)} and {set(group_k)} do not cover")
    return issues


def check_inversion(sig: LogicSignature, t_mode: str) -> list[str]:
    """Knowledge is recovered from intrinsic assignments: [J]X equals the
    union of (J)Y over Y inside X."""
    issues = []
    for group in _nonempty_groups(sig):
        for e in range(sig.full_bits + 1):
            mask = bla_model(group, e, sig, t_mode).mask
            for sub in _proper_submasks(e):
                mask |= bla_model(group, sub, sig, t_mode).mask
            if mask != modal_model(group, e, sig, t_mode).mask:
                issues.append(
                    f"group {set(group)}: inversion fails at {_subset_name(sig, e)}"
                )
    return issues


def check_combination(sig: LogicSignature, t_mode: str) -> list[str]:
    """Combination identity for disjoint groups, the entailment lemma
    behind it, and the simultaneous extension to all sources."""
    issues = []
    subsets = range(sig.full_bits + 1)
    pairs = [
        (gj, gk)
        for gj in _nonempty_groups(sig)
        for gk in _nonempty_groups(sig)
        if not gj & gk
    ]
    for group_j, group_k in pairs:
        for e in subsets:
            combined = logical_combine(group_j, group_k, e, sig, t_mode)
            direct = bla_model(group_j | group_k, e, sig, t_mode)
            if combined.mask != direct.mask:
                issues.append(
                    f"combination fails for {set(group_j)} u {set(group_k)} "
                    f"at {_subset_name(sig, e)}"
                )
            lemma_mask = 0
            for f_bits in subsets:
                mj = modal_model(group_j, f_bits, sig, t_mode)
                for g_bits in subsets:
                    if f_bits & g_bits & ~e:
                        continue
                    lemma_mask |= mj.mask & modal_model(group_k, g_bits, sig, t_mode).mask
            if lemma_mask != modal_model(group_j | group_k, e, sig, t_mode).mask:
                issues.append(
                    f"entailment lemma fails for {set(group_j)} u {set(group_k)} "
                    f"at {_subset_name(sig, e)}"
                )
    if sig.n_sources >= 2:
        singletons = [frozenset({j}) for j in sig.sources]
        whole = frozenset(sig.sources)
        n_subsets = sig.full_bits + 1
        for e in subsets:
            mask = 0
            for combo in itertools.product(range(n_subsets), repeat=sig.n_sources):
                inter = sig.full_bits
                for bits in combo:
                    inter &= bits
                if inter != e:
                    continue
                cell = universe(sig, t_mode).mask
                for j, bits in zip(singletons, combo):
                    cell &= bla_model(j, bits, sig, t_mode).mask
                mask |= cell
            if mask != bla_model(whole, e, sig, t_mode).mask:
                issues.append(
                    f"simultaneous combination fails at {_subset_name(sig, e)}"
                )
    return issues


# -- belief bridge ------------------------------------------------------

@lru_cache(maxsize=32)
def _bridge_cells(sig: LogicSignature, t_mode: str):
    """All joint intrinsic cells (one observed atom set per source) with
    their emptiness decided by model enumeration."""
    n_subsets = 1 << sig.n_atoms
    cells = list(itertools.product(range(n_subsets), repeat=sig.n_sources))
    nonempty = []
    for cell in cells:
        mask = universe(sig, t_mode).mask
        for i, e_bits in enumerate(cell):
            mask &= bla_model(frozenset({i + 1}), e_bits, sig, t_mode).mask
        nonempty.append(mask != 0)
    return cells, tuple(nonempty)


def logic_bridge_fuse(
    ms,
    world: str,
    cfg: SolverConfig | None = None,
) -> MassFunction:
    """Fuse mass functions through the logic model.

    Each input i is read as the distribution of source i's intrinsic
    assignments.  A maximum-entropy probability over the joint cells is
    computed under those marginals; in the closed world the cells that
    the truth-grounded model proves empty are constrained to zero.  The
    cell distribution is then projected back onto classical propositions.

    Raises FusionRejectedError when the closed-world constraints are
    infeasible.
    """
    ms = list(ms)
    if not ms:
        raise ValueError("need at least one mass function")
    if world not in ("open", "closed"):
        raise ValueError(f"world must be 'open' or 'closed', got {world!r}")
    frame = ms[0].frame
    for m in ms:
        if m.frame != frame:
            raise LogicError("mass functions live on different frames")
        m.require_valid()
        if world == "closed" and m.world != "closed":
            raise LogicError("closed-world bridge requires closed-world inputs")
    sig = LogicSignature(frame.atoms, len(ms))
    t_mode = WITH_T if world == "closed" else WITHOUT_T
    cells, nonempty = _bridge_cells(sig, t_mode)
    variables = [cell for cell, keep in zip(cells, nonempty) if keep]
    if not variables:
        raise FusionRejectedError("every joint cell is empty")
    n_subsets = 1 << sig.n_atoms
    blocks = []
    for i, m in enumerate(ms):
        groups = tuple(cell[i] for cell in variables)
        targets = tuple(m.mass(bits) for bits in range(n_subsets))
        blocks.append((groups, targets))
    result = maxent_maximize(len(variables), blocks, cfg or SolverConfig())
    if result is None:
        raise FusionRejectedError("the sources are incompatible under the closed world")
    acc: dict[int, float] = {}
    for cell, value in zip(variables, result.f):
        if value > 0.0:
            inter = frame.full_bits
            for bits in cell:
                inter &= bits
            acc[inter] = acc.get(inter, 0.0) + value
    kept = {b: v for b, v in acc.items() if v >= MASS_CLAMP}
    total = sum(kept.values())
    return MassFunction(frame, {b: v / total for b, v in kept.items()}, world=world)
