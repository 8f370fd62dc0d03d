"""Tangential basepoints as virtual points of monomial log charts.

A tangential basepoint on an SNC chart is a point of the underlying scheme
together with a nonzero normal scalar for every divisor branch through it.
These are in bijection with virtual points: group homomorphisms on the
monoid sections fixing the units, encoded here by one nonzero value per
monoid generator.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Mapping, Optional

from .logmodel import (
    GroupSection,
    LogModel,
    MonomialVirtualMap,
    pullback_to_divisor,
    snc_chart,
)
from .rational import Poly


def _evaluate_alpha(model: LogModel, point: Mapping[str, Fraction]):
    """alpha of every generator evaluated at the point (reduced first)."""
    values = []
    for a in model.alpha:
        values.append(a.evaluate(point))
    return values


def _check_point(model: LogModel, point: Mapping[str, Fraction]) -> dict[str, Fraction]:
    pt = {v: Fraction(x) for v, x in point.items()}
    missing = set(model.ring.variables) - set(pt)
    if missing:
        raise ValueError(f"point misses coordinates {sorted(missing)}")
    for m in model.ring.ideal:
        val = Fraction(1)
        for v, e in m:
            val *= pt[v] ** e
        if val != 0:
            raise ValueError("point does not lie on the chart")
    return pt


@dataclass(frozen=True)
class TangentialBasepoint:
    """A point on the chart plus a nonzero scalar per vanishing branch."""

    model: LogModel
    point: tuple[tuple[str, Fraction], ...]
    vector: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        pt = _check_point(self.model, dict(self.point))
        object.__setattr__(
            self, "point", tuple(sorted((v, pt[v]) for v in pt))
        )
        vec = {v: Fraction(x) for v, x in self.vector}
        expected = {
            v for v in self.model.divisor_vars if pt[v] == 0
        }
        if set(vec) != expected:
            raise ValueError(
                f"vector must be indexed by the vanishing branches {sorted(expected)}"
            )
        if any(x == 0 for x in vec.values()):
            raise ValueError("normal scalars must be nonzero (inward pointing)")
        object.__setattr__(self, "vector", tuple(sorted(vec.items())))

    @property
    def branch_indices(self) -> frozenset[str]:
        return frozenset(v for v, _ in self.vector)

    def point_dict(self) -> dict[str, Fraction]:
        return dict(self.point)

    def vector_dict(self) -> dict[str, Fraction]:
        return dict(self.vector)

    def to_json(self) -> dict:
        order = list(self.model.ring.variables)
        pt = self.point_dict()
        return {
            "point": [str(pt[v]) for v in order],
            "vector": {v: str(x) for v, x in self.vector},
        }


@dataclass(frozen=True)
class VirtualPoint:
    """A point plus a group homomorphism on sections fixing the units."""

    model: LogModel
    point: tuple[tuple[str, Fraction], ...]
    gen_values: tuple[tuple[str, Fraction], ...]

    def __post_init__(self):
        pt = _check_point(self.model, dict(self.point))
        object.__setattr__(self, "point", tuple(sorted((v, pt[v]) for v in pt)))
        vals = {g: Fraction(x) for g, x in self.gen_values}
        if set(vals) != set(self.model.gen_names):
            raise ValueError("one value per monoid generator required")
        if any(x == 0 for x in vals.values()):
            raise ValueError("generator values must be invertible")
        alpha_vals = _evaluate_alpha(self.model, pt)
        for name, a in zip(self.model.gen_names, alpha_vals):
            if a != 0 and vals[name] != a:
                raise ValueError(
                    f"value of {name} must restrict to evaluation at the point"
                )
        # The assignment must be multiplicative on the relation lattice.
        for rel in self.model.monoid.relation_kernel():
            prod = Fraction(1)
            for coeff, name in zip(rel, self.model.gen_names):
                prod *= vals[name] ** coeff
            if prod != 1:
                raise ValueError(f"values break the monoid relation {rel}")
        object.__setattr__(self, "gen_values", tuple(sorted(vals.items())))

    def value(self, gen: str) -> Fraction:
        return dict(self.gen_values)[gen]

    def point_dict(self) -> dict[str, Fraction]:
        return dict(self.point)

    def evaluate_section(self, s: GroupSection) -> Fraction:
        vals = dict(self.gen_values)
        out = Fraction(s.coeff)
        for e, name in zip(s.exps, self.model.gen_names):
            out *= vals[name] ** e
        return out


def basepoint_to_virtual(b: TangentialBasepoint) -> VirtualPoint:
    """The canonical bijection: branch coordinates map to normal scalars."""
    pt = b.point_dict()
    vec = b.vector_dict()
    values = {}
    for name, a in zip(b.model.gen_names, b.model.alpha):
        v = a.evaluate(pt)
        if v != 0:
            values[name] = v
        else:
            if name not in vec:
                raise ValueError(
                    f"generator {name} vanishes but is not a declared branch"
                )
            values[name] = vec[name]
    return VirtualPoint(b.model, b.point, tuple(values.items()))


def virtual_to_basepoint(p: VirtualPoint) -> TangentialBasepoint:
    """Inverse of basepoint_to_virtual on SNC charts."""
    pt = p.point_dict()
    vec = {}
    for name, a in zip(p.model.gen_names, p.model.alpha):
        if a.evaluate(pt) == 0:
            if name not in p.model.divisor_vars:
                raise ValueError(
                    "chart has a vanishing non-coordinate generator; "
                    "no tangential basepoint form"
                )
            vec[name] = p.value(name)
    return TangentialBasepoint(p.model, p.point, tuple(vec.items()))


def enumerate_unit_points(
    X: LogModel,
    point: Mapping[str, Fraction],
    unit_group: Iterable[Fraction] = (Fraction(1), Fraction(-1)),
) -> list[VirtualPoint]:
    """All virtual points over the given point with values in a finite
    unit set, by brute force over assignments satisfying the relations."""
    pt = _check_point(X, {v: Fraction(x) for v, x in dict(point).items()})
    units = [Fraction(u) for u in unit_group]
    alpha_vals = _evaluate_alpha(X, pt)
    fixed: dict[str, Fraction] = {}
    free: list[str] = []
    for name, a in zip(X.gen_names, alpha_vals):
        if a != 0:
            fixed[name] = a
        else:
            free.append(name)
    out = []
    for combo in itertools.product(units, repeat=len(free)):
        values = dict(fixed)
        values.update(zip(free, combo))
        try:
            out.append(VirtualPoint(X, tuple(sorted(pt.items())), tuple(values.items())))
        except ValueError:
            continue
    return out


def strata_lift(
    X: LogModel,
    stratum: Iterable[str],
    sections: Mapping[str, tuple[Fraction, Mapping[str, int]]],
) -> MonomialVirtualMap:
    """Virtual lift of a coordinate stratum inclusion Y -> X.

    ``stratum`` lists the branches cut out; ``sections`` assigns to each of
    them an inward normal monomial c * prod(y^e) on Y (coefficient plus
    exponents over the remaining divisor branches).  The result factors
    through the pullback log structure on the stratum.
    """
    stratum = tuple(stratum)
    for s in stratum:
        if s not in X.divisor_vars:
            raise ValueError(f"{s} is not a divisor branch of the chart")
    if set(sections) != set(stratum):
        raise ValueError("one normal section per stratum branch required")
    remaining = tuple(v for v in X.ring.variables if v not in stratum)
    rem_divisors = tuple(v for v in remaining if v in X.divisor_vars)
    Y = snc_chart(remaining, rem_divisors)

    def section_on_Y(coeff, exps: Mapping[str, int]) -> GroupSection:
        if coeff == 0:
            raise ValueError("normal section has zero coefficient")
        for v in exps:
            if exps[v] and v not in rem_divisors:
                raise ValueError(
                    f"normal section must be invertible off the divisor of Y; "
                    f"{v} is not a branch of Y"
                )
        return Y.section(coeff, {v: e for v, e in exps.items() if e})

    pulls = []
    ring_map = []
    for name in X.gen_names:
        if name in stratum:
            coeff, exps = sections[name]
            pulls.append(section_on_Y(coeff, exps))
        else:
            pulls.append(Y.section(1, {name: 1}))
    for v in X.ring.variables:
        ring_map.append((v, Poly.const(0) if v in stratum else Poly.var(v)))
    lift = MonomialVirtualMap(Y, X, tuple(pulls), tuple(ring_map))
    check = lift.validate()
    if not check:
        raise ValueError(f"stratum lift is not a virtual morphism: {check.reason}")
    return lift


def stratum_pullback_factorization(
    X: LogModel, stratum: Iterable[str]
) -> tuple[LogModel, MonomialVirtualMap]:
    """The pullback model on the stratum and its ordinary map into X."""
    stratum = tuple(stratum)
    P = X
    for s in stratum:
        P = pullback_to_divisor(P, s)
    pulls = tuple(
        GroupSection(P, Fraction(1), tuple(1 if i == j else 0 for i in range(len(P.gen_names))))
        for j in range(len(X.gen_names))
    )
    ring_map = tuple(
        (v, Poly.const(0) if v in stratum else Poly.var(v)) for v in X.ring.variables
    )
    inclusion = MonomialVirtualMap(P, X, pulls, ring_map)
    return P, inclusion
