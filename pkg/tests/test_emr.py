import itertools
import math
import random

import pytest

from belfuse.emr import (
    JointMass,
    SolverConfig,
    disjoint_family_bound,
    dominated_feasible_point,
    emr_fuse,
    entropy,
    feasible_point,
    gradient_step,
    ipf_oracle,
)
from belfuse.frame import (
    Frame,
    InvalidMassError,
    MassFunction,
    credibility,
    credibility_table,
    total_ignorance,
    validate_mass,
)
from belfuse.rules import conflict_degree, conjunctive
from belfuse.sharpen import Sharpening, exists_sharpening, identity_sharpening
from conftest import ABC, mass_distance, random_mass


def table_pair(frame, a1, g1, b2, g2):
    m1 = MassFunction(frame, {"a": a1, "c": g1, frame.top: 1 - a1 - g1})
    m2 = MassFunction(frame, {"b": b2, "c": g2, frame.top: 1 - b2 - g2})
    return m1, m2


def example_11(frame):
    m1 = MassFunction(frame, {("a", "b"): 0.5, ("b", "c"): 0.5})
    m2 = MassFunction(frame, {("a", "b"): 0.5, ("b", "c"): 0.5})
    rho = MassFunction(frame, {"a": 0.5, "c": 0.5})
    return m1, m2, rho


def test_entropy_examples(abc):
    frame = abc
    point = JointMass(frame, 2, {(frame.prop("a"), frame.prop("a")): 1.0})
    assert entropy(point) == 0.0
    pairs = [(frame.prop("a"), frame.top), (frame.prop("b"), frame.top),
             (frame.prop("c"), frame.top), (frame.top, frame.top)]
    uniform = JointMass(frame, 2, {t: 0.25 for t in pairs})
    assert entropy(uniform) == pytest.approx(math.log(4))
    # the interior optimum of the (0.3, 0.1) family, evaluated directly
    values = [0.3, 0.3, 0.025, 0.075, 0.075, 0.225]
    direct = -sum(v * math.log(v) for v in values)
    top = frame.top
    c = frame.prop("c")
    joint = JointMass(frame, 2, {
        (frame.prop("a"), top): 0.3,
        (top, frame.prop("b")): 0.3,
        (c, c): 0.025,
        (c, top): 0.075,
        (top, c): 0.075,
        (top, top): 0.225,
    })
    assert entropy(joint) == pytest.approx(direct, abs=1e-12)


def test_joint_mass_validation(abc):
    with pytest.raises(ValueError):
        JointMass(abc, 2, {(abc.prop("a"), abc.prop("b")): 1.0})  # conflict tuple
    with pytest.raises(ValueError):
        JointMass(abc, 2, {(abc.prop("a"), abc.prop("a")): 0.5})  # bad total
    ok = JointMass(abc, 2, {(abc.prop("a"), abc.prop("b")): 0.0,
                            (abc.top, abc.top): 1.0})
    assert ok.mass((abc.top, abc.top)) == 1.0


def test_feasible_point_cases(abc):
    zadeh = table_pair(abc, 0.99, 0.01, 0.99, 0.01)
    assert feasible_point(zadeh) is None
    barely = table_pair(abc, 0.501, 0.0, 0.501, 0.0)
    assert feasible_point(barely) is None
    m = random_mass(random.Random(0), abc)
    single = feasible_point([m])
    assert single is not None
    assert mass_distance(single.marginal(0), m) <= 1e-12
    pair = table_pair(abc, 0.3, 0.1, 0.3, 0.1)
    joint = feasible_point(pair)
    assert joint is not None
    for i in (0, 1):
        assert mass_distance(joint.marginal(i), pair[i]) <= 1e-9


def test_reference_family_fusions(abc):
    cases = [
        ((0.99, 0.01, 0.99, 0.01), None),
        ((0.501, 0.0, 0.501, 0.0), None),
        ((0.499, 0.0, 0.499, 0.0), {"a": 0.499, "b": 0.499, "c": 0.0, "abc": 0.002}),
        ((0.3, 0.1, 0.3, 0.1), {"a": 0.3, "b": 0.3, "c": 0.175, "abc": 0.225}),
        ((0.3, 0.05, 0.3, 0.05), {"a": 0.3, "b": 0.3, "c": 0.09375, "abc": 0.30625}),
        ((0.3, 0.01, 0.3, 0.01), {"a": 0.3, "b": 0.3, "c": 0.01975, "abc": 0.38025}),
    ]
    for params, expected in cases:
        m1, m2 = table_pair(abc, *params)
        outcome = emr_fuse([m1, m2])
        if expected is None:
            assert outcome.status == "rejected"
            assert outcome.fused is None and outcome.joint is None
            continue
        assert outcome.status == "fused"
        for key, want in expected.items():
            got = outcome.fused.mass(abc.top if key == "abc" else key)
            assert got == pytest.approx(want, abs=1e-6)
        for i, m in enumerate((m1, m2)):
            assert mass_distance(outcome.joint.marginal(i), m) <= 1e-9


def test_neutral_element(abc):
    rng = random.Random(1)
    nu = total_ignorance(abc)
    for _ in range(8):
        m = random_mass(rng, abc)
        alone = emr_fuse([m])
        with_nu = emr_fuse([m, nu])
        assert alone.status == with_nu.status == "fused"
        assert mass_distance(alone.fused, m) <= 1e-9
        assert mass_distance(with_nu.fused, m) <= 1e-9
    # a rejected pair stays rejected when the vacuous bba joins in
    z1, z2 = table_pair(abc, 0.99, 0.01, 0.99, 0.01)
    assert emr_fuse([z1, z2, nu]).status == "rejected"


def test_idempotence_on_probabilistic(abc):
    m = MassFunction(abc, {"a": 0.5, ("b", "c"): 0.5})
    for copies in (2, 3):
        outcome = emr_fuse([m] * copies)
        assert outcome.status == "fused"
        assert mass_distance(outcome.fused, m) <= 1e-9


def test_open_world_inputs_rejected(abc):
    bad = MassFunction(abc, {abc.empty: 0.1, abc.top: 0.9}, world="open")
    good = random_mass(random.Random(2), abc)
    with pytest.raises(InvalidMassError):
        emr_fuse([good, bad])


def test_commutativity(abc):
    rng = random.Random(3)
    for _ in range(10):
        ms = [random_mass(rng, abc) for _ in range(3)]
        base = emr_fuse(ms)
        for perm in itertools.permutations(range(3)):
            other = emr_fuse([ms[i] for i in perm])
            assert other.status == base.status
            if base.status == "fused":
                assert mass_distance(other.fused, base.fused) <= 1e-9


def test_zero_conflict_equals_conjunctive(abc):
    rng = random.Random(4)
    count = 0
    while count < 12:
        m1, m2 = random_mass(rng, abc), random_mass(rng, abc)
        if conflict_degree(m1, m2) > 0:
            continue
        count += 1
        outcome = emr_fuse([m1, m2])
        assert outcome.status == "fused"
        assert mass_distance(outcome.fused, conjunctive(m1, m2)) <= 1e-9
    # shared-atom construction guarantees zero conflict
    for _ in range(10):
        masses1 = {(1 | b): v for b, v in random_mass(rng, abc)._masses.items()}
        masses2 = {(1 | b): v for b, v in random_mass(rng, abc)._masses.items()}
        m1 = MassFunction(abc, masses1)
        m2 = MassFunction(abc, masses2)
        assert conflict_degree(m1, m2) == 0.0
        outcome = emr_fuse([m1, m2])
        assert mass_distance(outcome.fused, conjunctive(m1, m2)) <= 1e-9


def test_example_11_scenario(abc):
    m1, m2, rho = example_11(abc)
    pair = emr_fuse([m1, m2])
    assert pair.status == "fused"
    # no conflict: coincides with the conjunctive combination
    assert pair.fused.mass(("a", "b")) == pytest.approx(0.25, abs=1e-9)
    assert pair.fused.mass(("b", "c")) == pytest.approx(0.25, abs=1e-9)
    assert pair.fused.mass("b") == pytest.approx(0.5, abs=1e-9)
    # fusing the pairwise result with the density is impossible...
    then_rho = emr_fuse([pair.fused, rho])
    assert then_rho.status == "rejected"
    # ...while the simultaneous three-way fusion exists and returns it
    threeway = emr_fuse([m1, m2, rho])
    assert threeway.status == "fused"
    assert mass_distance(threeway.fused, rho) <= 1e-9


def test_probabilistic_bound_random(abc):
    from conftest import random_density, random_weakening

    rng = random.Random(5)
    for _ in range(6):
        rho = random_density(rng, abc)
        sources = [random_weakening(rng, rho) for _ in range(rng.randint(1, 2))]
        outcome = emr_fuse(sources + [rho])
        assert outcome.status == "fused"
        assert mass_distance(outcome.fused, rho) <= 1e-9


def test_conservation_of_belief(abc):
    rng = random.Random(6)
    done = 0
    while done < 8:
        ms = [random_mass(rng, abc) for _ in range(2)]
        outcome = emr_fuse(ms)
        if outcome.status != "fused":
            continue
        done += 1
        tables = [credibility_table(m) for m in ms]
        fused_table = credibility_table(outcome.fused)
        for bits in range(1 << abc.size):
            assert fused_table[bits] >= max(t[bits] for t in tables) - 1e-9
        for m in ms:
            assert exists_sharpening(m, outcome.fused) is not None


def test_gradient_step_fixed_point(abc):
    pair = table_pair(abc, 0.3, 0.1, 0.3, 0.1)
    outcome = emr_fuse(pair)
    step = gradient_step(outcome.joint, 0.5)
    assert max(abs(v) for v in step.values()) < 1e-6


def test_gradient_step_pinned_problem(abc):
    m = MassFunction(abc, {"a": 0.5, ("b", "c"): 0.5})
    joint = JointMass(abc, 2, {
        (abc.prop("a"), abc.prop("a")): 0.5,
        (abc.prop(("b", "c")), abc.prop(("b", "c"))): 0.5,
    })
    step = gradient_step(joint, 1.0)
    assert max(abs(v) for v in step.values()) < 1e-12


def test_gradient_step_iteration_from_corner(abc):
    # start at the feasible corner f(c,c) = gamma and iterate with the
    # accept / halve-on-decrease schedule until the step stalls
    frame = abc
    top, c = frame.top, frame.prop("c")
    a, b = frame.prop("a"), frame.prop("b")
    current = {
        (a, top): 0.3, (top, b): 0.3,
        (c, c): 0.1, (c, top): 0.0, (top, c): 0.0,
        (top, top): 0.3,
    }
    joint = JointMass(frame, 2, current)
    theta = 1.0
    h = entropy(joint)
    for _ in range(2000):
        step = gradient_step(joint, theta)
        trial = {k: max(current[k] + d, 0.0) for k, d in step.items()}
        trial_joint = JointMass(frame, 2, trial)
        h_new = entropy(trial_joint)
        if h_new < h:
            theta *= 0.5
            if theta < 1e-14:
                break
            continue
        moved = max(abs(d) for d in step.values())
        current, joint, h = trial, trial_joint, h_new
        theta = min(theta * 2, 1.0)
        if moved < 1e-10:
            break
    assert current[(c, c)] == pytest.approx(0.025, abs=1e-6)
    assert current[(c, top)] == pytest.approx(0.075, abs=1e-6)
    assert current[(top, c)] == pytest.approx(0.075, abs=1e-6)
    assert current[(top, top)] == pytest.approx(0.225, abs=1e-6)


def test_ipf_oracle_cases(abc):
    pair = table_pair(abc, 0.3, 0.1, 0.3, 0.1)
    scaled = ipf_oracle(pair)
    solved = emr_fuse(pair)
    assert scaled is not None
    fused_scaled = {}
    for bits_tuple, v in scaled.bit_items():
        key = bits_tuple[0] & bits_tuple[1]
        fused_scaled[key] = fused_scaled.get(key, 0.0) + v
    for p, v in solved.fused.items():
        assert fused_scaled.get(p.bits, 0.0) == pytest.approx(v, abs=1e-6)

    assert ipf_oracle(table_pair(abc, 0.99, 0.01, 0.99, 0.01)) is None

    rng = random.Random(7)
    m1, m2 = random_mass(rng, abc), random_mass(rng, abc)
    product = ipf_oracle([m1, m2], support_policy="unconstrained")
    assert product is not None
    for (b1, b2), v in product.bit_items():
        assert v == pytest.approx(m1.mass(b1) * m2.mass(b2), abs=1e-9)


def test_oracle_equivalence_random(abc):
    rng = random.Random(8)
    frames = [Frame(("a", "b")), ABC, Frame(("a", "b", "c", "d"))]
    agreements = 0
    for trial in range(40):
        frame = frames[trial % len(frames)]
        s = 2 + (trial % 2)
        ms = [random_mass(rng, frame) for _ in range(s)]
        outcome = emr_fuse(ms)
        scaled = ipf_oracle(ms)
        assert (outcome.status == "fused") == (scaled is not None)
        if scaled is None:
            continue
        agreements += 1
        fused_scaled = {}
        for bits_tuple, v in scaled.bit_items():
            key = bits_tuple[0]
            for extra in bits_tuple[1:]:
                key &= extra
            fused_scaled[key] = fused_scaled.get(key, 0.0) + v
        tv = 0.5 * sum(
            abs(fused_scaled.get(b, 0.0) - outcome.fused.mass(b))
            for b in set(fused_scaled) | {p.bits for p in outcome.fused.focal()}
        )
        assert tv <= 1e-6
    assert agreements >= 10


def test_dominated_feasible_point(abc):
    m = random_mass(random.Random(9), abc)
    ident = identity_sharpening(m)
    single = dominated_feasible_point([m], m, [ident])
    assert mass_distance(single.marginal(0), m) <= 1e-12

    diag = dominated_feasible_point([m, m], m, [ident, ident])
    for (b1, b2), v in diag.bit_items():
        assert b1 == b2
        assert v == pytest.approx(m.mass(b1), abs=1e-12)

    m1, m2, rho = example_11(abc)
    witness1 = Sharpening(m1, rho, {(("a", "b"), "a"): 0.5, (("b", "c"), "c"): 0.5})
    witness2 = Sharpening(m2, rho, {(("a", "b"), "a"): 0.5, (("b", "c"), "c"): 0.5})
    joint = dominated_feasible_point([m1, m2], rho, [witness1, witness2])
    for i, m in enumerate((m1, m2)):
        assert mass_distance(joint.marginal(i), m) <= 1e-12


def test_disjoint_family_bound(abc):
    zadeh = table_pair(abc, 0.99, 0.01, 0.99, 0.01)
    family = [abc.prop("a"), abc.prop("b")]
    assert disjoint_family_bound(zadeh, family) is False
    okay = table_pair(abc, 0.499, 0.0, 0.499, 0.0)
    assert disjoint_family_bound(okay, family) is True
    assert disjoint_family_bound(zadeh, [abc.top]) is True
    with pytest.raises(ValueError):
        disjoint_family_bound(zadeh, [abc.prop(("a", "b")), abc.prop("b")])
    with pytest.raises(ValueError):
        disjoint_family_bound(zadeh, [abc.empty])


def test_bound_never_violated_by_successful_fusion(abc):
    rng = random.Random(10)
    checked = 0
    while checked < 10:
        ms = [random_mass(rng, abc) for _ in range(2)]
        outcome = emr_fuse(ms)
        if outcome.status != "fused":
            continue
        checked += 1
        atoms = [abc.prop(l) for l in abc.atoms]
        for size in (1, 2, 3):
            for family in itertools.combinations(atoms, size):
                assert disjoint_family_bound(ms, list(family)) is True


def test_start_point_independence(abc):
    from belfuse import maxent
    from belfuse.emr import _index_space

    pair = list(table_pair(abc, 0.3, 0.05, 0.3, 0.05))
    tuples, blocks = _index_space(pair)
    base = maxent.maxent_maximize(len(tuples), blocks)
    # a different feasible start: the corner with f(c,c) = gamma
    corner = {t: 0.0 for t in tuples}
    a, b, c, top = (abc.prop("a").bits, abc.prop("b").bits,
                    abc.prop("c").bits, abc.top.bits)
    corner[(a, top)] = 0.3
    corner[(top, b)] = 0.3
    corner[(c, c)] = 0.05
    corner[(top, top)] = 0.35
    import numpy as np

    start = np.array([corner[t] for t in tuples])
    moved = maxent.maxent_maximize(len(tuples), blocks, start=start)
    assert np.abs(base.f - moved.f).max() <= 1e-7
