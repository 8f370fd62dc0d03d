"""Shared test helpers: random rational curves and tree utilities."""

from __future__ import annotations

import random
import string
from fractions import Fraction

from logdisks.curves import INFTY, PARENT, Component, StableCurve


def random_rational(rng: random.Random, lo=-9, hi=9) -> Fraction:
    num = rng.randint(lo, hi)
    den = rng.randint(1, 4)
    return Fraction(num, den)


def nonzero_rational(rng: random.Random, lo=-9, hi=9) -> Fraction:
    while True:
        x = random_rational(rng, lo, hi)
        if x != 0:
            return x


def distinct_rationals(rng: random.Random, k: int) -> list[Fraction]:
    out: set[Fraction] = set()
    while len(out) < k:
        out.add(random_rational(rng))
    return list(out)


def random_curve(
    rng: random.Random,
    markings: list[str],
    max_components: int = 5,
) -> StableCurve:
    """A random stable curve: random tree shape, coordinates, and scalars."""
    n_comp = rng.randint(1, min(max_components, max(1, len(markings) - 1)))
    comp_ids = [f"c{i}" for i in range(n_comp)]
    parents = {comp_ids[i]: comp_ids[rng.randrange(i)] for i in range(1, n_comp)}
    # distribute markings so every component ends up with >= 3 special points
    slots: dict[str, list[str]] = {cid: [] for cid in comp_ids}
    for cid in comp_ids[1:]:
        slots[parents[cid]].append(cid)
    labels = list(markings)
    rng.shuffle(labels)
    # leaves of the component tree need >= 2 markings; give one to everyone
    # that is short on special points first
    def deficit(cid):
        return max(0, 2 - len(slots[cid]))

    for cid in comp_ids:
        for _ in range(deficit(cid)):
            if labels:
                slots[cid].append(labels.pop())
    while labels:
        slots[rng.choice(comp_ids)].append(labels.pop())
    if any(len(s) < 2 for s in slots.values()):
        # not enough markings to stabilize this shape; retry with fewer pieces
        return random_curve(rng, markings, max_components=max(1, n_comp - 1))
    comps = []
    for cid in comp_ids:
        coords = distinct_rationals(rng, len(slots[cid]))
        pts = [(PARENT, INFTY)] + list(zip(slots[cid], coords))
        comps.append(Component(cid, tuple(pts)))
    edges = tuple(
        (parents[cid], cid, nonzero_rational(rng)) for cid in comp_ids[1:]
    )
    return StableCurve(
        tuple(comps),
        comp_ids[0],
        edges,
        nonzero_rational(rng),
        frozenset(markings),
    )


def marking_names(k: int) -> list[str]:
    return list(string.ascii_lowercase[:k])
