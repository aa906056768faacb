"""Shared helpers: random mass functions and comparison utilities."""

from __future__ import annotations

import math
import random

import pytest

from belfuse.frame import Frame, MassFunction


ABC = Frame(("a", "b", "c"))


@pytest.fixture
def abc():
    return ABC


def random_mass(
    rng: random.Random,
    frame: Frame,
    *,
    max_focal: int = 4,
    min_mass: float = 0.05,
    world: str = "closed",
) -> MassFunction:
    """A valid random bba with a bounded number of focal elements."""
    n_props = frame.full_bits  # nonempty subsets: 1 .. full_bits
    k = rng.randint(1, min(max_focal, n_props))
    focal = rng.sample(range(1, n_props + 1), k)
    weights = [rng.uniform(min_mass, 1.0) for _ in focal]
    total = sum(weights)
    return MassFunction(
        frame, {bits: w / total for bits, w in zip(focal, weights)}, world=world
    )


def random_density(rng: random.Random, frame: Frame) -> MassFunction:
    """A random probability density: positive mass on every atom."""
    weights = [rng.uniform(0.1, 1.0) for _ in range(frame.size)]
    total = sum(weights)
    return MassFunction(
        frame, {1 << i: w / total for i, w in enumerate(weights)}, world="closed"
    )


def random_weakening(rng: random.Random, density: MassFunction) -> MassFunction:
    """A bba admitting a transport witness onto the given density: each
    atom's mass is split among random supersets of the atom."""
    frame = density.frame
    out: dict[int, float] = {}
    for bits, value in zip(density.focal_bits(), [density.mass(b) for b in density.focal_bits()]):
        supersets = [s for s in range(1, frame.full_bits + 1) if s & bits == bits]
        parts = rng.randint(1, 3)
        chosen = [rng.choice(supersets) for _ in range(parts)]
        weights = [rng.uniform(0.2, 1.0) for _ in range(parts)]
        total = sum(weights)
        for sup, w in zip(chosen, weights):
            out[sup] = out.get(sup, 0.0) + value * w / total
    return MassFunction(frame, out, world="closed")


def mass_distance(m1: MassFunction, m2: MassFunction) -> float:
    """Largest absolute mass difference over all propositions."""
    keys = {b for b, _ in m1._items} | {b for b, _ in m2._items}
    if not keys:
        return 0.0
    return max(abs(m1.mass(b) - m2.mass(b)) for b in keys)


def total_variation(m1: MassFunction, m2: MassFunction) -> float:
    keys = {b for b, _ in m1._items} | {b for b, _ in m2._items}
    return 0.5 * math.fsum(abs(m1.mass(b) - m2.mass(b)) for b in keys)
