"""Monomial models of log charts and their virtual/ordinary morphisms.

A model is a chart ring K[vars]/I (monomial ideal I) together with a
finitely generated monoid of distinguished sections: each named generator
carries an affine lattice embedding (which encodes the monoid relations)
and a ring element alpha(g) (its value as a function).  Generators with
alpha(g) = 0 are phantoms; generators whose alpha is a declared divisor
coordinate give the SNC part of the chart.

Virtual morphisms pull the target generators back to group-completed
monomial sections lambda * prod(g_i^{e_i}) of the source and carry a
separate ring-level substitution; no compatibility between the two is
demanded beyond invertible functions, which is what distinguishes them
from ordinary morphisms.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Optional, Union

from .monoid import AffineMonoid
from .rational import Poly, RatFunc, format_scalar

FieldElement = Union[Fraction, RatFunc]

ExpMono = tuple[tuple[str, int], ...]  # sorted ((var, exp), ...), exp > 0


def _mono(exps: Mapping[str, int]) -> ExpMono:
    return tuple(sorted((v, e) for v, e in exps.items() if e))


def _mono_divides(a: ExpMono, b: ExpMono) -> bool:
    db = dict(b)
    return all(db.get(v, 0) >= e for v, e in a)


@dataclass(frozen=True)
class QuotientRing:
    """K[variables] modulo a monomial ideal."""

    variables: tuple[str, ...]
    ideal: tuple[ExpMono, ...] = ()

    def __post_init__(self):
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate ring variables")
        for m in self.ideal:
            if not m:
                raise ValueError("the unit ideal is not allowed")
            for v, e in m:
                if v not in self.variables:
                    raise ValueError(f"ideal monomial uses unknown variable {v}")
                if e <= 0:
                    raise ValueError("ideal monomials need positive exponents")

    def reduce(self, p: Poly) -> Poly:
        """Drop every monomial divisible by an ideal generator."""
        if not self.ideal:
            return p
        out = {}
        for mono, c in p.terms.items():
            if not any(_mono_divides(g, mono) for g in self.ideal):
                out[mono] = c
        return Poly(out)

    def is_zero(self, p: Poly) -> bool:
        return self.reduce(p).is_zero()

    def eq(self, p: Poly, q: Poly) -> bool:
        return self.is_zero(p - q)

    def is_unit(self, p: Poly) -> bool:
        """Unit test for monomial quotients: invertible constant term plus
        nilpotent rest."""
        p = self.reduce(p)
        c = p.terms.get((), Fraction(0))
        if c == 0:
            return False
        rest = Poly({m: k for m, k in p.terms.items() if m != ()})
        return all(self._mono_nilpotent(m) for m in rest.terms)

    def _mono_nilpotent(self, mono: ExpMono) -> bool:
        if not self.ideal:
            return False
        support = _mono({v: 1 for v, _ in mono})
        # m is nilpotent iff some power lies in the ideal, iff the ideal
        # contains a generator supported inside supp(m).
        return any(
            all(v in dict(support) for v, _ in g) for g in self.ideal
        )

    def is_domain(self) -> bool:
        """Exact: no ideal generator splits as a + b with both halves
        outside the ideal."""
        if not self.ideal:
            return True

        def outside(mono: ExpMono) -> bool:
            return not any(_mono_divides(g, mono) for g in self.ideal)

        for g in self.ideal:
            gd = dict(g)
            names = sorted(gd)
            ranges = [range(gd[v] + 1) for v in names]
            for pick in itertools.product(*ranges):
                a = _mono({v: e for v, e in zip(names, pick)})
                b = _mono({v: gd[v] - e for v, e in zip(names, pick)})
                if not a or not b:
                    continue
                if outside(a) and outside(b):
                    return False
        return True

    def is_reduced(self) -> bool:
        """Reduced iff the radical equals the ideal: all generators squarefree
        up to radical membership."""
        for g in self.ideal:
            radical = _mono({v: 1 for v, _ in g})
            if not any(_mono_divides(h, radical) for h in self.ideal):
                return False
        return True

    def minimal_primes(self) -> list[frozenset[str]]:
        """Minimal primes of the monomial ideal, as variable sets."""
        if not self.ideal:
            return [frozenset()]
        supports = [frozenset(v for v, _ in g) for g in self.ideal]
        hits: list[frozenset[str]] = []
        vars_involved = sorted(set().union(*supports))
        for size in range(0, len(vars_involved) + 1):
            for combo in itertools.combinations(vars_involved, size):
                s = frozenset(combo)
                if all(s & sup for sup in supports):
                    if not any(h <= s for h in hits):
                        hits.append(s)
        return hits

    def localize_ideal(self, prime: frozenset[str]) -> tuple[ExpMono, ...]:
        """Monomial ideal of the localization at a minimal prime."""
        out = []
        for g in self.ideal:
            restricted = _mono({v: e for v, e in g if v in prime})
            if restricted:
                out.append(restricted)
        return tuple(out)

    def is_zero_at(self, p: Poly, prime: frozenset[str]) -> bool:
        """Zero test in the local ring at a minimal prime."""
        local = self.localize_ideal(prime)
        for mono in self.reduce(p).terms:
            restricted = _mono({v: e for v, e in mono if v in prime})
            if not any(_mono_divides(g, restricted) for g in local):
                return False
        return True

    def eq_at(self, p: Poly, q: Poly, prime: frozenset[str]) -> bool:
        return self.is_zero_at(p - q, prime)


@dataclass(frozen=True)
class LogModel:
    """A monomial log chart Spec(M -> K[vars]/I)."""

    ring: QuotientRing
    monoid: AffineMonoid
    gen_names: tuple[str, ...]
    alpha: tuple[Poly, ...]
    divisor_vars: frozenset[str] = frozenset()
    field_params: tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.gen_names) != len(self.monoid.generators):
            raise ValueError("one name per monoid generator required")
        if len(set(self.gen_names)) != len(self.gen_names):
            raise ValueError("duplicate generator names")
        if len(self.alpha) != len(self.gen_names):
            raise ValueError("one alpha image per generator required")
        alphas = tuple(self.ring.reduce(a) for a in self.alpha)
        object.__setattr__(self, "alpha", alphas)
        for v in self.divisor_vars:
            if v not in self.ring.variables:
                raise ValueError(f"divisor variable {v} not a chart variable")
        self._check_alpha_relations()

    def _check_alpha_relations(self):
        # alpha must be well defined on the monoid: relations map to equalities.
        for rel in self.monoid.relation_kernel():
            pos = Poly.const(1)
            neg = Poly.const(1)
            for coeff, a in zip(rel, self.alpha):
                if coeff > 0:
                    pos = pos * a**coeff
                elif coeff < 0:
                    neg = neg * a ** (-coeff)
            if not self.ring.eq(pos, neg):
                raise ValueError(f"alpha does not respect monoid relation {rel}")

    # -- basic queries ---------------------------------------------------

    def gen_index(self, name: str) -> int:
        try:
            return self.gen_names.index(name)
        except ValueError:
            raise KeyError(f"no monoid generator named {name!r}") from None

    def alpha_of(self, name: str) -> Poly:
        return self.alpha[self.gen_index(name)]

    def is_phantom(self, name: str) -> bool:
        return self.ring.is_zero(self.alpha_of(name))

    def unit_generator_indices(self) -> tuple[int, ...]:
        """Generators whose alpha is a unit of the chart ring.

        Together with the coefficient field these generate the unit subgroup
        of the monomial sections; the identity is always a unit.
        """
        return tuple(
            i for i, a in enumerate(self.alpha) if self.ring.is_unit(a)
        )

    def section(self, coeff, exps: Mapping[str, int] | Iterable[int]) -> GroupSection:
        if isinstance(exps, Mapping):
            vec = [0] * len(self.gen_names)
            for name, e in exps.items():
                vec[self.gen_index(name)] = e
        else:
            vec = list(exps)
        return GroupSection(self, _field(coeff), tuple(int(e) for e in vec))

    def one(self) -> GroupSection:
        return self.section(1, [0] * len(self.gen_names))

    def sections_equal(self, s: GroupSection, t: GroupSection) -> bool:
        if s.coeff != t.coeff:
            return False
        diff = [a - b for a, b in zip(s.exps, t.exps)]
        kernel = self.monoid.relation_kernel()
        from . import intlinalg as il

        if not kernel:
            return all(x == 0 for x in diff)
        A = [[row[i] for row in kernel] for i in range(len(diff))]
        return il.solve(A, diff) is not None

    # -- JSON -------------------------------------------------------------

    def to_json(self) -> dict:
        return {
            "variables": list(self.ring.variables),
            "ideal": [dict(m) for m in self.ring.ideal],
            "ambient_rank": self.monoid.ambient_rank,
            "generators": {
                name: {
                    "embedding": list(vec),
                    "alpha": str(a),
                }
                for name, vec, a in zip(
                    self.gen_names, self.monoid.generators, self.alpha
                )
            },
            "divisor_vars": sorted(self.divisor_vars),
        }

    def __str__(self):
        ideal = ", ".join(
            "*".join(f"{v}^{e}" if e > 1 else v for v, e in m) for m in self.ring.ideal
        )
        ring = f"K[{', '.join(self.ring.variables)}]" + (f"/({ideal})" if ideal else "")
        gens = ", ".join(
            f"{n}->{a}" for n, a in zip(self.gen_names, self.alpha)
        )
        return f"LogModel({ring}; {gens})"


def _field(x) -> FieldElement:
    if isinstance(x, RatFunc):
        return x
    if isinstance(x, (int, Fraction)):
        return Fraction(x)
    raise TypeError(f"not a field element: {x!r}")


@dataclass(frozen=True)
class GroupSection:
    """Group-completed monomial section lambda * prod(gen_i^{e_i})."""

    model: LogModel
    coeff: FieldElement
    exps: tuple[int, ...]

    def __post_init__(self):
        if _is_zero_field(self.coeff):
            raise ValueError("section coefficient must be nonzero")
        if len(self.exps) != len(self.model.gen_names):
            raise ValueError("one exponent per monoid generator required")

    def is_monoid_element(self) -> bool:
        return all(e >= 0 for e in self.exps)

    def alpha_value(self) -> Optional[Poly]:
        """alpha of the section, when it lies in the monoid (else None)."""
        if not self.is_monoid_element():
            return None
        p = Poly.const(1)
        for e, a in zip(self.exps, self.model.alpha):
            if e:
                p = p * a**e
        p = self.model.ring.reduce(p)
        return _scale_poly(p, self.coeff)

    def __mul__(self, other: GroupSection) -> GroupSection:
        if other.model is not self.model and other.model != self.model:
            raise ValueError("sections live on different models")
        return GroupSection(
            self.model,
            _field_mul(self.coeff, other.coeff),
            tuple(a + b for a, b in zip(self.exps, other.exps)),
        )

    def __pow__(self, k: int) -> GroupSection:
        return GroupSection(
            self.model,
            _field_pow(self.coeff, k),
            tuple(e * k for e in self.exps),
        )

    def __str__(self):
        mono = "*".join(
            (n if e == 1 else f"{n}^{e}")
            for n, e in zip(self.model.gen_names, self.exps)
            if e
        )
        c = format_scalar(self.coeff)
        if not mono:
            return c
        return mono if c == "1" else f"{c}*{mono}"


def _is_zero_field(x) -> bool:
    return x.is_zero() if isinstance(x, RatFunc) else x == 0


def _field_mul(a, b):
    if isinstance(a, RatFunc) or isinstance(b, RatFunc):
        return RatFunc.of(a) * RatFunc.of(b)
    return a * b


def _field_pow(a, k: int):
    if isinstance(a, RatFunc):
        return a**k
    return Fraction(a) ** k


def _scale_poly(p: Poly, c) -> Poly:
    if isinstance(c, RatFunc):
        if c.den != Poly.const(1):
            raise ValueError("cannot scale a polynomial by a non-polynomial")
        return p * c.num
    return p * c


@dataclass(frozen=True)
class MonomialScaling:
    """The map lambda -> c * lambda^e with e in {+1, -1}.

    These are exactly the virtual automorphisms of a one-generator phantom
    chart, and the elementary steps of basepoint transport on curves.
    """

    coeff: FieldElement
    exponent: int

    def __post_init__(self):
        if self.exponent not in (1, -1):
            raise ValueError("exponent must be +1 or -1")
        if _is_zero_field(self.coeff):
            raise ValueError("coefficient must be nonzero")

    def apply(self, x):
        if self.exponent == 1:
            return _field_mul(self.coeff, x)
        return _field_mul(self.coeff, _field_pow(x, -1))

    def compose(self, other: MonomialScaling) -> MonomialScaling:
        """self after other: (c1,e1) o (c2,e2) = (c1 * c2^e1, e1 e2)."""
        return MonomialScaling(
            _field_mul(self.coeff, _field_pow(other.coeff, self.exponent)),
            self.exponent * other.exponent,
        )

    def inverse(self) -> MonomialScaling:
        if self.exponent == 1:
            return MonomialScaling(_field_pow(self.coeff, -1), 1)
        return MonomialScaling(self.coeff, -1)

    @staticmethod
    def identity() -> MonomialScaling:
        return MonomialScaling(Fraction(1), 1)

    def is_identity(self) -> bool:
        return self.exponent == 1 and self.coeff == Fraction(1)

    def __str__(self):
        e = "" if self.exponent == 1 else "^-1"
        return f"(x -> {format_scalar(self.coeff)}*x{e})"


@dataclass(frozen=True)
class Validation:
    valid: bool
    reason: str = ""

    def __bool__(self):
        return self.valid


@dataclass(frozen=True)
class MonomialVirtualMap:
    """Virtual morphism between monomial log models.

    pullbacks[j] is the section of the source that the j-th target generator
    pulls back to; ring_map sends each target chart variable to a source
    ring element.
    """

    source: LogModel
    target: LogModel
    pullbacks: tuple[GroupSection, ...]
    ring_map: tuple[tuple[str, Poly], ...]

    def __post_init__(self):
        ring_map = tuple(sorted((v, self.source.ring.reduce(p)) for v, p in dict(self.ring_map).items()))
        object.__setattr__(self, "ring_map", ring_map)

    @property
    def exponent_matrix(self) -> tuple[tuple[int, ...], ...]:
        """Rows indexed by target generators, columns by source generators."""
        return tuple(s.exps for s in self.pullbacks)

    @property
    def unit_factors(self) -> tuple[FieldElement, ...]:
        return tuple(s.coeff for s in self.pullbacks)

    def ring_map_dict(self) -> dict[str, Poly]:
        return dict(self.ring_map)

    def pull_ring_element(self, p: Poly) -> Poly:
        sub = {v: q for v, q in self.ring_map}
        missing = p.variables() - set(sub)
        # Field parameters pass through untouched.
        chart = set(self.target.ring.variables)
        bad = missing & chart
        if bad:
            raise ValueError(f"ring map does not cover variables {sorted(bad)}")
        return self.source.ring.reduce(p.subs(sub))

    def pull_section(self, coeff, exps: Iterable[int]) -> GroupSection:
        """Pull back a group section of the target through the monoid data."""
        out = GroupSection(self.source, _field(coeff), (0,) * len(self.source.gen_names))
        for e, s in zip(exps, self.pullbacks):
            if e:
                out = out * s**e
        return out

    # -- validation ------------------------------------------------------

    def validate(self) -> Validation:
        if len(self.pullbacks) != len(self.target.gen_names):
            return Validation(False, "one pullback per target generator required")
        for s in self.pullbacks:
            if s.model != self.source:
                return Validation(False, "pullback section on the wrong model")
        mapped = {v for v, _ in self.ring_map}
        missing = set(self.target.ring.variables) - mapped
        if missing:
            return Validation(False, f"ring map misses variables {sorted(missing)}")
        # Scheme-level condition: target ideal maps to zero in the source ring.
        for m in self.target.ring.ideal:
            p = Poly.monomial(dict(m))
            if not self.source.ring.is_zero(self.pull_ring_element(p)):
                return Validation(False, f"ideal monomial {dict(m)} does not map to 0")
        # Group-hom condition: target relations pull back to the identity.
        for rel in self.target.monoid.relation_kernel():
            coeff = Fraction(1)
            exps = [0] * len(self.source.gen_names)
            for c, s in zip(rel, self.pullbacks):
                coeff = _field_mul(coeff, _field_pow(s.coeff, c))
                for i, e in enumerate(s.exps):
                    exps[i] += c * e
            probe = GroupSection(self.source, Fraction(1), tuple(exps))
            if not (
                coeff == Fraction(1)
                and self.source.sections_equal(probe, self.source.one())
            ):
                name = "*".join(
                    f"{n}^{c}" for n, c in zip(self.target.gen_names, rel) if c
                )
                return Validation(False, f"relation {name} not respected")
        # Unit-compatibility square, on generators of the unit subgroup of
        # sections: generators whose alpha is a ring unit must pull back to
        # the ring-level pullback of that unit.
        for j in self.target.unit_generator_indices():
            a = self.target.alpha[j]
            pulled_fn = self.pull_ring_element(a)
            s = self.pullbacks[j]
            val = s.alpha_value() if s.is_monoid_element() else None
            if val is None or not self.source.ring.eq(val, pulled_fn):
                return Validation(
                    False,
                    f"unit generator {self.target.gen_names[j]} breaks the unit square",
                )
        return Validation(True)

    def is_ordinary(self) -> bool:
        """Ordinary iff exponents are non-negative and the full alpha square
        commutes on every target generator."""
        if not self.validate():
            raise ValueError("map is not a valid virtual morphism")
        for s in self.pullbacks:
            if any(e < 0 for e in s.exps):
                return False
        for j, name in enumerate(self.target.gen_names):
            lhs = self.pullbacks[j].alpha_value()
            if lhs is None:
                return False
            rhs = self.pull_ring_element(self.target.alpha[j])
            if not self.source.ring.eq(lhs, rhs):
                return False
        return True

    def __str__(self):
        pulls = ", ".join(
            f"{n} -> {s}" for n, s in zip(self.target.gen_names, self.pullbacks)
        )
        return f"VirtualMap({pulls})"


def identity_map(X: LogModel) -> MonomialVirtualMap:
    n = len(X.gen_names)
    pulls = tuple(
        GroupSection(X, Fraction(1), tuple(1 if i == j else 0 for i in range(n)))
        for j in range(n)
    )
    ring_map = tuple((v, Poly.var(v)) for v in X.ring.variables)
    return MonomialVirtualMap(X, X, pulls, ring_map)


def compose_maps(f: MonomialVirtualMap, g: MonomialVirtualMap) -> MonomialVirtualMap:
    """Composite of f then g (so pullbacks go right to left)."""
    if f.target != g.source:
        raise ValueError("target of first map must equal source of second")
    pulls = []
    for s in g.pullbacks:
        pulls.append(f.pull_section(s.coeff, s.exps))
    ring_map = []
    for v in g.target.ring.variables:
        q = g.ring_map_dict()[v]
        ring_map.append((v, f.pull_ring_element(q)))
    out = MonomialVirtualMap(f.source, g.target, tuple(pulls), tuple(ring_map))
    check = out.validate()
    if not check:
        raise ValueError(f"composite fails validation: {check.reason}")
    return out


# -- model constructors -------------------------------------------------


def trivial_model(variables: Iterable[str] = (), ideal: tuple[ExpMono, ...] = ()) -> LogModel:
    """Trivial log structure: no monoid generators beyond units."""
    return LogModel(
        ring=QuotientRing(tuple(variables), ideal),
        monoid=AffineMonoid(0, ()),
        gen_names=(),
        alpha=(),
    )


def log_point(gen: str = "t") -> LogModel:
    """Spec(t^N -> K), alpha(t) = 0."""
    return LogModel(
        ring=QuotientRing(()),
        monoid=AffineMonoid(1, ((1,),)),
        gen_names=(gen,),
        alpha=(Poly.const(0),),
    )


def log_line(var: str = "z") -> LogModel:
    """The affine line with divisorial log structure at the origin."""
    return LogModel(
        ring=QuotientRing((var,)),
        monoid=AffineMonoid(1, ((1,),)),
        gen_names=(var,),
        alpha=(Poly.var(var),),
        divisor_vars=frozenset({var}),
    )


def snc_chart(variables: Iterable[str], branches: Iterable[str]) -> LogModel:
    """Affine chart with a strict normal crossing divisor on coordinate
    branches; one free monoid generator per branch."""
    variables = tuple(variables)
    branches = tuple(branches)
    for b in branches:
        if b not in variables:
            raise ValueError(f"branch {b} is not a chart variable")
    k = len(branches)
    gens = tuple(tuple(1 if i == j else 0 for i in range(k)) for j in range(k))
    return LogModel(
        ring=QuotientRing(variables),
        monoid=AffineMonoid(k, gens),
        gen_names=branches,
        alpha=tuple(Poly.var(b) for b in branches),
        divisor_vars=frozenset(branches),
    )


def fat_point(var: str = "t") -> LogModel:
    """Spec(t^N -> K[t]/(t^2)): the first-order neighbourhood of the origin
    in the log line."""
    return LogModel(
        ring=QuotientRing((var,), (_mono({var: 2}),)),
        monoid=AffineMonoid(1, ((1,),)),
        gen_names=(var,),
        alpha=(Poly.var(var),),
    )


def log_point_endo(model: LogModel, coeff, exponent: int) -> MonomialVirtualMap:
    """Endomorphism t -> coeff * t^exponent of a one-generator point model."""
    if len(model.gen_names) != 1 or model.ring.variables:
        raise ValueError("log_point_endo expects the standard log point")
    return MonomialVirtualMap(
        model, model, (model.section(coeff, (exponent,)),), ()
    )


# -- the operations ------------------------------------------------------


def logify_sections(
    ring: QuotientRing,
    prelog: AffineMonoid,
    names: Iterable[str],
    images: Iterable[Poly],
    divisor_vars: Iterable[str] = (),
) -> LogModel:
    """Log model associated to a constant pre-log datum M -> K[vars]/I.

    Generators mapping to units are absorbed into the coefficient group (the
    pushout along alpha^{-1}(units)); the rest become honest generators.
    """
    names = tuple(names)
    images = tuple(ring.reduce(p) for p in images)
    keep = [i for i, p in enumerate(images) if not ring.is_unit(p)]
    drop = [i for i in range(len(names)) if i not in keep]
    if not drop:
        new_monoid = prelog
        new_gens = names
        new_alpha = images
    else:
        # Quotient the embedding lattice by the span of the absorbed
        # generators, so relations through units become coefficient data.
        from . import intlinalg as il
        import numpy as np

        unit_vecs = [list(prelog.generators[i]) for i in drop]
        basis = il.lattice_basis(unit_vecs) if unit_vecs else []
        n = prelog.ambient_rank
        if basis:
            A = np.array(basis, dtype=object).T
            U, D, V = il.smith_normal_form(A)
            # Coordinates in which the unit span is generated by multiples of
            # the first len(basis) basis vectors; project onto the rest.
            kept_vecs = []
            r = len(basis)
            for i in keep:
                w = U @ np.array(list(prelog.generators[i]), dtype=object)
                kept_vecs.append(tuple(int(x) for x in w[r:]))
            new_rank = n - r
        else:
            kept_vecs = [prelog.generators[i] for i in keep]
            new_rank = n
        seen = {}
        for i, vec in zip(keep, kept_vecs):
            seen.setdefault(vec, i)
        new_monoid = AffineMonoid(new_rank, tuple(dict.fromkeys(kept_vecs)))
        uniq = list(dict.fromkeys(kept_vecs))
        new_gens = tuple(names[seen[v]] for v in uniq)
        new_alpha = tuple(images[seen[v]] for v in uniq)
    return LogModel(
        ring=ring,
        monoid=new_monoid,
        gen_names=new_gens,
        alpha=new_alpha,
        divisor_vars=frozenset(divisor_vars),
    )


def pullback_to_divisor(X: LogModel, branch: str) -> LogModel:
    """Restrict the model to a declared divisor branch {branch = 0}.

    On a trivial log structure any chart coordinate may be restricted (the
    pullback of the trivial structure is trivial); otherwise the branch must
    be declared.
    """
    if branch not in X.divisor_vars:
        if X.gen_names or branch not in X.ring.variables:
            raise ValueError(f"{branch} is not a declared divisor branch")
    new_vars = tuple(v for v in X.ring.variables if v != branch)
    new_ideal = []
    for m in X.ring.ideal:
        if any(v == branch for v, _ in m):
            continue  # contains the killed variable: the relation is vacuous
        new_ideal.append(m)
    ring = QuotientRing(new_vars, tuple(new_ideal))
    alpha = tuple(ring.reduce(a.subs({branch: Poly.const(0)})) for a in X.alpha)
    return LogModel(
        ring=ring,
        monoid=X.monoid,
        gen_names=X.gen_names,
        alpha=alpha,
        divisor_vars=X.divisor_vars - {branch},
        field_params=X.field_params,
    )


def product(X: LogModel, Y: LogModel) -> tuple[LogModel, MonomialVirtualMap, MonomialVirtualMap]:
    """Product model with its two (ordinary) projections."""
    yvars = list(Y.ring.variables)
    ygens = list(Y.gen_names)
    rename_vars = {}
    rename_gens = {}
    for v in yvars:
        if v in X.ring.variables:
            rename_vars[v] = v + "_r"
    for g in ygens:
        if g in X.gen_names:
            rename_gens[g] = g + "_r"

    def rn_var(v):
        return rename_vars.get(v, v)

    def rn_gen(g):
        return rename_gens.get(g, g)

    def rn_poly(p: Poly) -> Poly:
        return p.subs({v: Poly.var(rn_var(v)) for v in p.variables() if v in rename_vars})

    variables = X.ring.variables + tuple(rn_var(v) for v in yvars)
    ideal = list(X.ring.ideal) + [
        _mono({rn_var(v): e for v, e in m}) for m in Y.ring.ideal
    ]
    ring = QuotientRing(variables, tuple(ideal))

    nx, ny = X.monoid.ambient_rank, Y.monoid.ambient_rank
    gens = [tuple(g) + (0,) * ny for g in X.monoid.generators]
    gens += [(0,) * nx + tuple(g) for g in Y.monoid.generators]
    monoid = AffineMonoid(nx + ny, tuple(gens))
    gen_names = X.gen_names + tuple(rn_gen(g) for g in Y.gen_names)
    alpha = tuple(X.alpha) + tuple(rn_poly(a) for a in Y.alpha)
    model = LogModel(
        ring=ring,
        monoid=monoid,
        gen_names=gen_names,
        alpha=alpha,
        divisor_vars=X.divisor_vars | {rn_var(v) for v in Y.divisor_vars},
        field_params=tuple(dict.fromkeys(X.field_params + Y.field_params)),
    )

    kx, ky = len(X.gen_names), len(Y.gen_names)
    proj_x = MonomialVirtualMap(
        model,
        X,
        tuple(
            GroupSection(model, Fraction(1), tuple(1 if i == j else 0 for i in range(kx + ky)))
            for j in range(kx)
        ),
        tuple((v, Poly.var(v)) for v in X.ring.variables),
    )
    proj_y = MonomialVirtualMap(
        model,
        Y,
        tuple(
            GroupSection(model, Fraction(1), tuple(1 if i == kx + j else 0 for i in range(kx + ky)))
            for j in range(ky)
        ),
        tuple((v, Poly.var(rn_var(v))) for v in Y.ring.variables),
    )
    return model, proj_x, proj_y


@dataclass(frozen=True)
class ContinuityEntry:
    generator: str
    component: frozenset[str]
    branch: str  # "zero" | "unit" | "violation"
    detail: str = ""


@dataclass(frozen=True)
class ContinuityReport:
    applicable: bool  # source is an integral domain
    entries: tuple[ContinuityEntry, ...]

    def violations(self) -> list[ContinuityEntry]:
        return [e for e in self.entries if e.branch == "violation"]

    def has_violation(self) -> bool:
        return bool(self.violations())


def continuity_check(m: MonomialVirtualMap) -> ContinuityReport:
    """Evaluate the invertible-or-zero dichotomy on every target generator.

    At the generic point of each source component, the pulled-back function
    alpha_Y(f) is either zero, or f is invertible near the image and the two
    pullbacks of alpha_Y(f) agree.  For non-integral sources the dichotomy is
    still evaluated and failures are flagged.
    """
    check = m.validate()
    if not check:
        raise ValueError(f"invalid map: {check.reason}")
    ring = m.source.ring
    applicable = ring.is_domain()
    entries = []
    for j, name in enumerate(m.target.gen_names):
        u = m.pull_ring_element(m.target.alpha[j])
        s = m.pullbacks[j]
        v = s.alpha_value()  # None when the pullback leaves the monoid
        for prime in ring.minimal_primes():
            if ring.is_zero_at(u, prime):
                entries.append(ContinuityEntry(name, prime, "zero"))
            elif v is not None and ring.eq_at(u, v, prime):
                entries.append(ContinuityEntry(name, prime, "unit"))
            else:
                have = "undefined" if v is None else str(ring.reduce(v))
                entries.append(
                    ContinuityEntry(
                        name,
                        prime,
                        "violation",
                        f"alpha(pullback) = {have} but ring pullback = {ring.reduce(u)}",
                    )
                )
    return ContinuityReport(applicable, tuple(entries))
