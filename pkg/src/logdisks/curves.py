"""Stable marked genus-zero curves with gluing data and a tangential
basepoint at infinity, over any exact field.

A curve is a rooted tree of projective lines.  Every component carries an
affine chart in which its attachment to the parent (for the root: the
distinguished marking "inf") sits at coordinate infinity; children and leaf
markings sit at finite, pairwise distinct coordinates.  Each tree edge
carries a nonzero gluing scalar a, meaning a * (d/dz' at the node) tensor
(d/dw'' at the child's infinity) in the chart bases, and the root carries
the basepoint scalar lambda * (d/dw at infinity).

Transport of tangent scalars between markers composes the canonical
two-point tensors on components with the gluing data; every elementary
step inverts, so transport is always a coefficient times inversion.
"""

from __future__ import annotations

import itertools
import json
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .logmodel import MonomialScaling
from .rational import Poly, RatFunc, format_scalar, parse_rational

FieldElement = Union[Fraction, RatFunc]

INF = "inf"
PARENT = "@parent"


class Infinity:
    """Coordinate at infinity of a component chart."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "INFTY"

    def __eq__(self, other):
        return isinstance(other, Infinity)

    def __hash__(self):
        return hash("INFTY")


INFTY = Infinity()

Coord = Union[Fraction, RatFunc, Infinity]


def _field(x) -> FieldElement:
    if isinstance(x, RatFunc):
        return x
    return Fraction(x)


def _is_zero(x) -> bool:
    return x.is_zero() if isinstance(x, RatFunc) else x == 0


def _inv(x):
    return x.inv() if isinstance(x, RatFunc) else 1 / x


def _coord(x) -> Coord:
    if isinstance(x, Infinity):
        return INFTY
    return _field(x)


@dataclass(frozen=True)
class Component:
    """One projective line: marker -> chart coordinate.

    Markers are leaf labels, child component ids, or PARENT (always at
    infinity; for the root component PARENT is the global marking "inf").
    """

    cid: str
    points: tuple[tuple[str, Coord], ...]

    def __post_init__(self):
        pts = {}
        for marker, coord in self.points:
            if marker in pts:
                raise ValueError(f"marker {marker} repeated on component {self.cid}")
            pts[marker] = _coord(coord)
        if PARENT not in pts:
            raise ValueError(f"component {self.cid} has no attachment point")
        if pts[PARENT] != INFTY:
            raise ValueError("the parent attachment must sit at infinity")
        finite = [c for m, c in pts.items() if m != PARENT]
        if any(isinstance(c, Infinity) for c in finite):
            raise ValueError("only the parent attachment may sit at infinity")
        for a, b in itertools.combinations(finite, 2):
            if a == b:
                raise ValueError(
                    f"special points on component {self.cid} must be distinct"
                )
        if len(pts) < 3:
            raise ValueError(f"component {self.cid} is unstable (< 3 special points)")
        object.__setattr__(self, "points", tuple(sorted(pts.items(), key=lambda kv: kv[0])))

    def coord(self, marker: str) -> Coord:
        for m, c in self.points:
            if m == marker:
                return c
        raise KeyError(f"no marker {marker} on component {self.cid}")

    def markers(self) -> list[str]:
        return [m for m, _ in self.points]


@dataclass(frozen=True)
class StableCurve:
    """Rooted tree of components with gluing scalars and a basepoint."""

    components: tuple[Component, ...]
    root: str
    edges: tuple[tuple[str, str, FieldElement], ...]  # (parent, child, scalar)
    basepoint: FieldElement
    markings: frozenset[str]

    def __post_init__(self):
        comp = {c.cid: c for c in self.components}
        if len(comp) != len(self.components):
            raise ValueError("component ids must be unique")
        if self.root not in comp:
            raise ValueError("root component missing")
        if _is_zero(self.basepoint):
            raise ValueError("the basepoint scalar must be nonzero")
        edges = tuple(
            (p, c, _field(a)) for p, c, a in self.edges
        )
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "basepoint", _field(self.basepoint))
        parents: dict[str, str] = {}
        for p, c, a in edges:
            if _is_zero(a):
                raise ValueError("gluing scalars must be nonzero")
            if c in parents:
                raise ValueError(f"component {c} has two parents")
            parents[c] = p
        if set(parents) != set(comp) - {self.root}:
            raise ValueError("edges must form a tree on the components")
        # reachability and consistency of attachment points
        seen = set()
        stack = [self.root]
        while stack:
            cid = stack.pop()
            if cid in seen:
                raise ValueError("component tree has a cycle")
            seen.add(cid)
            for p, c, _ in edges:
                if p == cid:
                    if c not in comp[p].markers():
                        raise ValueError(
                            f"child {c} has no attachment coordinate on {p}"
                        )
                    stack.append(c)
        if seen != set(comp):
            raise ValueError("not all components are attached to the root")
        # markings appear exactly once, on exactly one component
        found: dict[str, str] = {}
        child_ids = set(comp) | {PARENT}
        for c in self.components:
            for m in c.markers():
                if m in child_ids:
                    continue
                if c.cid == self.root and m == INF:
                    raise ValueError("'inf' is implicit at the root attachment")
                if m in found:
                    raise ValueError(f"marking {m} appears twice")
                found[m] = c.cid
        if set(found) != set(self.markings):
            raise ValueError(
                f"markings {sorted(self.markings)} do not match the points "
                f"{sorted(found)}"
            )

    # -- structure queries ----------------------------------------------

    def component(self, cid: str) -> Component:
        for c in self.components:
            if c.cid == cid:
                return c
        raise KeyError(cid)

    def parent_of(self, cid: str) -> Optional[str]:
        for p, c, _ in self.edges:
            if c == cid:
                return p
        return None

    def children_of(self, cid: str) -> list[str]:
        return [c for p, c, _ in self.edges if p == cid]

    def edge_scalar(self, parent: str, child: str) -> FieldElement:
        for p, c, a in self.edges:
            if p == parent and c == child:
                return a
        raise KeyError((parent, child))

    def component_of_marker(self, marker: str) -> str:
        if marker == INF:
            return self.root
        for c in self.components:
            if marker in c.markers() and marker not in {x.cid for x in self.components}:
                return c.cid
        raise KeyError(f"no marker {marker}")

    def marker_coord(self, marker: str) -> tuple[str, Coord]:
        """Component id and chart coordinate of a marker ('inf' allowed)."""
        if marker == INF:
            return self.root, INFTY
        cid = self.component_of_marker(marker)
        return cid, self.component(cid).coord(marker)

    def path_to_root(self, cid: str) -> list[str]:
        path = [cid]
        while (p := self.parent_of(path[-1])) is not None:
            path.append(p)
        return path

    def is_maximally_degenerate(self) -> bool:
        return all(len(c.points) == 3 for c in self.components)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        comps = []
        for c in self.components:
            pts = {}
            for m, coord in c.points:
                pts[m] = INF if isinstance(coord, Infinity) else format_scalar(coord)
            comps.append({"id": c.cid, "points": pts})
        return {
            "components": comps,
            "root": self.root,
            "edges": [
                {"parent": p, "child": c, "scalar": format_scalar(a)}
                for p, c, a in self.edges
            ],
            "basepoint": format_scalar(self.basepoint),
        }

    @staticmethod
    def from_json(data: Mapping) -> StableCurve:
        def parse_coord(s: str) -> Coord:
            if s == INF:
                return INFTY
            r = parse_rational(s)
            return r.constant_value() if r.is_constant() else r

        def parse_field(s: str) -> FieldElement:
            r = parse_rational(s)
            return r.constant_value() if r.is_constant() else r

        comps = tuple(
            Component(
                c["id"], tuple((m, parse_coord(v)) for m, v in c["points"].items())
            )
            for c in data["components"]
        )
        edges = tuple(
            (e["parent"], e["child"], parse_field(e["scalar"]))
            for e in data.get("edges", [])
        )
        comp_ids = {c.cid for c in comps}
        root = data.get("root")
        if root is None:
            children = {e[1] for e in edges}
            roots = [c for c in comp_ids if c not in children]
            if len(roots) != 1:
                raise ValueError("cannot infer a unique root component")
            root = roots[0]
        markings = set()
        for c in comps:
            for m in c.markers():
                if m not in comp_ids and m != PARENT:
                    markings.add(m)
        return StableCurve(
            comps, root, edges, parse_field(data["basepoint"]), frozenset(markings)
        )

    def __str__(self):
        return json.dumps(self.to_json())


def smooth_curve(points: Mapping[str, Coord], basepoint=1, cid: str = "c0") -> StableCurve:
    """A single projective line with the given finite markings."""
    pts = [(m, _coord(c)) for m, c in points.items()]
    pts.append((PARENT, INFTY))
    comp = Component(cid, tuple(pts))
    return StableCurve(
        (comp,), cid, (), _field(basepoint), frozenset(points.keys())
    )


# -- the canonical two-point tensor ---------------------------------------


@dataclass(frozen=True)
class TwoPointTensor:
    """The canonical element of T_p^v tensor T_q^v on one chart.

    Bases: dz at finite points, dw (w = 1/z) at infinity; ``value`` is the
    scalar in the tensor basis, or zero when p, q sit on different
    components (the zero flag)."""

    value: FieldElement
    basis_p: str  # "dz" | "dw"
    basis_q: str
    same_component: bool = True

    @staticmethod
    def zero_flag() -> TwoPointTensor:
        return TwoPointTensor(Fraction(0), "dz", "dz", same_component=False)


def s_tensor(p: Coord, q: Coord) -> TwoPointTensor:
    """Two-point tensor on a single chart via df at p tensor d(1/f) at q,
    for f the section vanishing at p with a pole at q."""
    p, q = _coord(p), _coord(q)
    if p == q:
        raise ValueError("the two points must be distinct")
    if isinstance(q, Infinity):
        # f = z - p: df|_p = dz, d(1/f)|_inf = dw
        return TwoPointTensor(Fraction(1), "dz", "dw")
    if isinstance(p, Infinity):
        return TwoPointTensor(Fraction(1), "dw", "dz")
    d = p - q
    return TwoPointTensor(-_inv(d * d), "dz", "dz")


def s_tensor_on_curve(C: StableCurve, p_marker: str, q_marker: str) -> TwoPointTensor:
    """The tensor for two markers of a stable curve; zero flag across nodes."""
    cp, p = C.marker_coord(p_marker)
    cq, q = C.marker_coord(q_marker)
    if cp != cq:
        return TwoPointTensor.zero_flag()
    return s_tensor(p, q)


def tensor_to_scaling(t: TwoPointTensor) -> MonomialScaling:
    """The induced virtual isomorphism of tangent lines: v -> (s v)^{-1}."""
    if not t.same_component:
        raise ValueError("tensor vanishes between different components")
    return MonomialScaling(_inv(t.value), -1)


# -- transport -------------------------------------------------------------


def transport_chain(C: StableCurve, p_marker: str, q_marker: str) -> list[MonomialScaling]:
    """Elementary steps of basepoint transport from one marker to another.

    Each step is an inversion (exponent -1): the within-component two-point
    tensors and the gluing data at the crossed nodes.
    """
    if p_marker == q_marker:
        raise ValueError("transport requires two distinct markers")
    cp, _ = C.marker_coord(p_marker)
    cq, _ = C.marker_coord(q_marker)
    up = C.path_to_root(cp)
    uq = C.path_to_root(cq)
    common = next(c for c in up if c in set(uq))
    path = up[: up.index(common) + 1] + list(reversed(uq[: uq.index(common)]))

    steps: list[MonomialScaling] = []
    # Position on the current component where the transported vector sits.
    cur = C.marker_coord(p_marker)[1]
    for i, cid in enumerate(path):
        if i + 1 < len(path):
            nxt = path[i + 1]
            if C.parent_of(cid) == nxt:
                # moving up: node sits at our infinity; on the parent it is
                # at the finite attachment coordinate of cid
                exit_coord: Coord = INFTY
                a = C.edge_scalar(nxt, cid)
                after: Coord = C.component(nxt).coord(cid)
            else:
                # moving down into child nxt: node is at the attachment
                # coordinate on cid, at infinity on the child
                exit_coord = C.component(cid).coord(nxt)
                a = C.edge_scalar(cid, nxt)
                after = INFTY
            steps.append(tensor_to_scaling(s_tensor(cur, exit_coord)))
            # crossing the edge: the gluing datum acts by v -> a / v in the
            # chart bases, in either direction (it is an involution)
            steps.append(MonomialScaling(a, -1))
            cur = after
        else:
            q = C.marker_coord(q_marker)[1]
            steps.append(tensor_to_scaling(s_tensor(cur, q)))
    return steps


def transport(C: StableCurve, p_marker: str, q_marker: str, v) -> FieldElement:
    """Transport a nonzero tangent scalar at p to one at q."""
    v = _field(v)
    if _is_zero(v):
        raise ValueError("transport needs a nonzero tangent scalar")
    out = v
    for step in transport_chain(C, p_marker, q_marker):
        out = step.apply(out)
    return out


def transport_scaling(C: StableCurve, p_marker: str, q_marker: str) -> MonomialScaling:
    """The whole transport as one scaling (coefficient and parity)."""
    total = MonomialScaling.identity()
    for step in transport_chain(C, p_marker, q_marker):
        total = step.compose(total)
    return total


# -- operadic composition ---------------------------------------------------


def _relabel_components(C: StableCurve, taken: set[str]) -> StableCurve:
    clash = {c.cid for c in C.components} & taken
    if not clash:
        return C
    mapping = {}
    for c in C.components:
        new = c.cid
        while new in taken:
            new = new + "x"
        mapping[c.cid] = new
        taken.add(new)

    def rn(m: str) -> str:
        return mapping.get(m, m)

    comps = tuple(
        Component(rn(c.cid), tuple((rn(m), coord) for m, coord in c.points))
        for c in C.components
    )
    edges = tuple((rn(p), rn(c), a) for p, c, a in C.edges)
    return StableCurve(comps, rn(C.root), edges, C.basepoint, C.markings)


def compose_unframed(C1: StableCurve, nu: str, C2: StableCurve) -> StableCurve:
    """Glue C2's root to the marking nu of C1.

    The new gluing scalar is the transported basepoint of C1 at nu times the
    basepoint of C2; the composite keeps C1's basepoint.
    """
    if nu not in C1.markings:
        raise ValueError(f"{nu} is not a marking of the first curve")
    overlap = C1.markings & C2.markings
    if overlap:
        raise ValueError(f"label collision: {sorted(overlap)}")
    taken = {c.cid for c in C1.components} | C1.markings | C2.markings
    C2r = _relabel_components(C2, taken)
    t = transport(C1, INF, nu, C1.basepoint)
    scalar = t * C2r.basepoint
    host = C1.component_of_marker(nu)
    comps = []
    for c in C1.components:
        if c.cid == host:
            pts = tuple(
                (C2r.root if m == nu else m, coord) for m, coord in c.points
            )
            comps.append(Component(c.cid, pts))
        else:
            comps.append(c)
    comps.extend(C2r.components)
    edges = C1.edges + ((host, C2r.root, scalar),) + C2r.edges
    markings = (C1.markings - {nu}) | C2r.markings
    return StableCurve(tuple(comps), C1.root, edges, C1.basepoint, frozenset(markings))


@dataclass(frozen=True)
class FramedCurve:
    """A stable curve with a nonzero tangent scalar at every marking."""

    curve: StableCurve
    frames: tuple[tuple[str, FieldElement], ...]

    def __post_init__(self):
        fr = {m: _field(v) for m, v in self.frames}
        if set(fr) != set(self.curve.markings):
            raise ValueError("one frame per marking required")
        if any(_is_zero(v) for v in fr.values()):
            raise ValueError("frame scalars must be nonzero")
        object.__setattr__(self, "frames", tuple(sorted(fr.items())))

    def frame(self, marking: str) -> FieldElement:
        return dict(self.frames)[marking]


def induce_frames(C: StableCurve) -> FramedCurve:
    """The canonical section: transport the basepoint to every marking."""
    frames = tuple(
        (m, transport(C, INF, m, C.basepoint)) for m in sorted(C.markings)
    )
    return FramedCurve(C, frames)


def compose_framed(F1: FramedCurve, nu: str, F2: FramedCurve) -> FramedCurve:
    """Framed gluing: the new edge scalar is frame(nu) * basepoint(C2).

    No transport and no inversion appears, which is what makes the framed
    composition ordinary.
    """
    C1, C2 = F1.curve, F2.curve
    if nu not in C1.markings:
        raise ValueError(f"{nu} is not a marking of the first curve")
    overlap = C1.markings & C2.markings
    if overlap:
        raise ValueError(f"label collision: {sorted(overlap)}")
    taken = {c.cid for c in C1.components} | C1.markings | C2.markings
    C2r = _relabel_components(C2, taken)
    scalar = F1.frame(nu) * C2r.basepoint
    host = C1.component_of_marker(nu)
    comps = []
    for c in C1.components:
        if c.cid == host:
            pts = tuple((C2r.root if m == nu else m, coord) for m, coord in c.points)
            comps.append(Component(c.cid, pts))
        else:
            comps.append(c)
    comps.extend(C2r.components)
    edges = C1.edges + ((host, C2r.root, scalar),) + C2r.edges
    markings = (C1.markings - {nu}) | C2r.markings
    curve = StableCurve(
        tuple(comps), C1.root, edges, C1.basepoint, frozenset(markings)
    )
    frames = tuple(
        [(m, v) for m, v in F1.frames if m != nu] + list(F2.frames)
    )
    return FramedCurve(curve, frames)


# -- forgetful maps (smooth one-component case) -----------------------------


def forget_marking(C: StableCurve, marking: str) -> StableCurve:
    """Drop one marking of a smooth curve, keeping the chart."""
    if len(C.components) != 1:
        raise ValueError("forgetting markings is implemented for smooth curves")
    if marking not in C.markings:
        raise KeyError(marking)
    if len(C.markings) <= 2:
        raise ValueError("forgetting would destabilize the curve")
    comp = C.components[0]
    pts = tuple((m, c) for m, c in comp.points if m != marking)
    return StableCurve(
        (Component(comp.cid, pts),),
        C.root,
        (),
        C.basepoint,
        frozenset(C.markings - {marking}),
    )


def two_marked_normal_form(C: StableCurve, a: str, b: str) -> FieldElement:
    """Basepoint scalar after moving (a, b) to (0, 1) by an affine map.

    The substitution z -> (z - z_a)/(z_b - z_a) fixes infinity and rescales
    the tangent vector there by (z_b - z_a)."""
    if len(C.components) != 1:
        raise ValueError("normal form applies to smooth curves")
    comp = C.components[0]
    za, zb = comp.coord(a), comp.coord(b)
    return C.basepoint * (zb - za)


# -- factorization of the two-point tensor under degeneration ---------------


def nodal_family_tensor(
    p_chart1: Coord, q_chart2, c, param: str = "g"
) -> RatFunc:
    """s_{p,q} on the smoothed two-chart family z' z'' = c*g, expressed in
    the chart bases adapted to the nodal limit (dz'' at q).

    p lives on the first chart (coordinate or infinity), q at a nonzero
    coordinate of the second chart.  Returns a rational function of the
    smoothing parameter.
    """
    g = RatFunc.var(param)
    c = _field(c)
    q2 = _field(q_chart2)
    if _is_zero(q2):
        raise ValueError("q must avoid the node")
    # On the smooth fibre, the point with second-chart coordinate q2 has
    # first-chart coordinate z' = c*g/q2.
    q_in_chart1 = c * g / q2
    t = s_tensor(p_chart1, q_in_chart1)
    # Basis change at q: dz' = (dz'/dz'')|_q dz'' with z' = c*g/z''.
    dz1_by_dz2 = -(c * g) / (q2 * q2)
    return RatFunc.of(t.value) * dz1_by_dz2


def nodal_composite_tensor(p_chart1: Coord, q_chart2, c) -> FieldElement:
    """The nodal-fibre composite s' . eta . s'' for the same configuration.

    s' on the first component (node at the origin of its chart), eta = c per
    unit of the smoothing parameter, s'' on the second component (node at
    the origin of its chart)."""
    q2 = _field(q_chart2)
    s1 = s_tensor(p_chart1, Fraction(0)).value
    s2 = s_tensor(Fraction(0), q2).value
    return s1 * _field(c) * s2


def leading_coefficient(r: RatFunc, param: str, order: int) -> FieldElement:
    """Coefficient of param^order in the expansion of r at param -> 0."""
    shifted = r * RatFunc.var(param) ** (-order)
    return shifted.restrict(param, 0).constant_value()


def factorization_family_check(p_chart1: Coord, q_chart2, c, param: str = "g") -> bool:
    """Verify that the family tensor degenerates to the nodal composite.

    Computes s_{p,q}(g) symbolically on the family z' z'' = c*g and compares
    its leading coefficient at g -> 0 with s' . eta . s'' on the nodal fibre;
    exact equality of field elements.
    """
    family = nodal_family_tensor(p_chart1, q_chart2, c, param)
    composite = nodal_composite_tensor(p_chart1, q_chart2, c)
    lead = leading_coefficient(family, param, 1)
    return lead == composite
