import itertools
from fractions import Fraction

import pytest

from logdisks.monoid import AffineMonoid
from logdisks.rational import Poly
from logdisks.logmodel import (
    LogModel,
    QuotientRing,
    compose_maps,
    log_line,
    snc_chart,
)
from logdisks.tangential import (
    TangentialBasepoint,
    VirtualPoint,
    basepoint_to_virtual,
    enumerate_unit_points,
    strata_lift,
    stratum_pullback_factorization,
    virtual_to_basepoint,
)


def cone_point_model() -> LogModel:
    """{uv = w^2} restricted to the origin: all three generators are
    phantoms there, and the relation lives in the monoid embedding."""
    return LogModel(
        ring=QuotientRing(()),
        monoid=AffineMonoid(2, ((2, 0), (0, 2), (1, 1))),
        gen_names=("u", "v", "w"),
        alpha=(Poly.const(0), Poly.const(0), Poly.const(0)),
    )


def three_lines_model() -> LogModel:
    """(A^2, three distinct lines through the origin): free rank-3 monoid."""
    x, y = Poly.var("x"), Poly.var("y")
    return LogModel(
        ring=QuotientRing(("x", "y")),
        monoid=AffineMonoid(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1))),
        gen_names=("l1", "l2", "l3"),
        alpha=(x, y, x + y),
    )


class TestBijection:
    def test_log_line_origin(self):
        line = log_line("z")
        b = TangentialBasepoint(line, (("z", Fraction(0)),), (("z", Fraction(5)),))
        p = basepoint_to_virtual(b)
        assert p.value("z") == 5
        assert virtual_to_basepoint(p) == b

    def test_interior_point_is_ordinary(self):
        line = log_line("z")
        b = TangentialBasepoint(line, (("z", Fraction(3)),), ())
        p = basepoint_to_virtual(b)
        assert p.value("z") == 3  # evaluation at the point

    def test_two_branch_origin(self):
        X = snc_chart(("z1", "z2"), ("z1", "z2"))
        b = TangentialBasepoint(
            X,
            (("z1", Fraction(0)), ("z2", Fraction(0))),
            (("z1", Fraction(2)), ("z2", Fraction(-3))),
        )
        p = basepoint_to_virtual(b)
        assert p.value("z1") == 2 and p.value("z2") == -3
        assert virtual_to_basepoint(p) == b

    def test_round_trip_random(self):
        import random

        random.seed(7)
        X = snc_chart(("z1", "z2", "z3"), ("z1", "z2"))
        for _ in range(25):
            z3 = Fraction(random.randint(-5, 5))
            v1 = Fraction(random.randint(1, 9))
            v2 = Fraction(-random.randint(1, 9))
            b = TangentialBasepoint(
                X,
                (("z1", Fraction(0)), ("z2", Fraction(0)), ("z3", z3)),
                (("z1", v1), ("z2", v2)),
            )
            assert virtual_to_basepoint(basepoint_to_virtual(b)) == b

    def test_vector_validation(self):
        line = log_line("z")
        with pytest.raises(ValueError):
            TangentialBasepoint(line, (("z", Fraction(0)),), ())  # missing scalar
        with pytest.raises(ValueError):
            TangentialBasepoint(
                line, (("z", Fraction(0)),), (("z", Fraction(0)),)
            )  # zero scalar


class TestEnumeration:
    def test_log_line_origin_over_sign_units(self):
        line = log_line("z")
        pts = enumerate_unit_points(line, {"z": 0})
        assert len(pts) == 2
        assert sorted(p.value("z") for p in pts) == [-1, 1]

    def test_projective_line_three_charts(self):
        # (P^1, {0,1,infty}) has three boundary points; each supports exactly
        # two sign tangential basepoints, six in total.
        total = 0
        for chart in range(3):
            line = log_line("z")
            total += len(enumerate_unit_points(line, {"z": 0}))
        assert total == 6

    def test_cone_point_count(self):
        # Brute-force oracle over {+-1}^3 with the relation ab = c^2.
        oracle = [
            (a, b, c)
            for a, b, c in itertools.product((1, -1), repeat=3)
            if a * b == c * c
        ]
        assert len(oracle) == 4
        X = cone_point_model()
        pts = enumerate_unit_points(X, {})
        assert len(pts) == 4
        got = {(p.value("u"), p.value("v"), p.value("w")) for p in pts}
        assert got == {(Fraction(a), Fraction(b), Fraction(c)) for a, b, c in oracle}

    def test_three_lines_count(self):
        X = three_lines_model()
        pts = enumerate_unit_points(X, {"x": 0, "y": 0})
        assert len(pts) == 8  # free monoid of rank three: {+-1}^3

    def test_invariance_under_branch_permutation(self):
        X = snc_chart(("z1", "z2"), ("z1", "z2"))
        Y = snc_chart(("z2", "z1"), ("z2", "z1"))
        nx = len(enumerate_unit_points(X, {"z1": 0, "z2": 0}))
        ny = len(enumerate_unit_points(Y, {"z1": 0, "z2": 0}))
        assert nx == ny == 4

    def test_interior_point_single(self):
        line = log_line("z")
        pts = enumerate_unit_points(line, {"z": 1})
        assert len(pts) == 1
        assert pts[0].value("z") == 1


class TestStrataLift:
    def test_constant_section(self):
        X = snc_chart(("z1", "z2"), ("z1",))
        lift = strata_lift(X, ("z1",), {"z1": (Fraction(1), {})})
        assert lift.validate()
        assert not lift.is_ordinary()  # the phantom gains the value 1

    def test_monomial_section(self):
        X = snc_chart(("z1", "z2"), ("z1", "z2"))
        lift = strata_lift(X, ("z1",), {"z1": (Fraction(1), {"z2": 1})})
        assert lift.validate()
        # pullback of z1 is the section z2 on Y
        j = lift.target.gen_index("z1")
        assert lift.pullbacks[j].exps == (1,) or str(lift.pullbacks[j]) == "z2"

    def test_zero_section_rejected(self):
        X = snc_chart(("z1", "z2"), ("z1",))
        with pytest.raises(ValueError):
            strata_lift(X, ("z1",), {"z1": (Fraction(0), {})})

    def test_section_vanishing_on_Y_rejected(self):
        # z3 is not a divisor branch of Y, so z3-dependence is not allowed.
        X = snc_chart(("z1", "z3"), ("z1",))
        with pytest.raises(ValueError):
            strata_lift(X, ("z1",), {"z1": (Fraction(1), {"z3": 1})})

    def test_factors_through_pullback(self):
        X = snc_chart(("z1", "z2"), ("z1", "z2"))
        lift = strata_lift(X, ("z1",), {"z1": (Fraction(3), {"z2": 2})})
        P, inclusion = stratum_pullback_factorization(X, ("z1",))
        # factored map Y -> P: the phantom z1 pulls back to the section
        Y = lift.source
        factored = type(lift)(
            Y,
            P,
            tuple(
                Y.section(Fraction(3), {"z2": 2})
                if name == "z1"
                else Y.section(1, {name: 1})
                for name in P.gen_names
            ),
            tuple((v, Poly.var(v)) for v in P.ring.variables),
        )
        assert factored.validate()
        comp = compose_maps(factored, inclusion)
        assert comp.exponent_matrix == lift.exponent_matrix
        assert comp.unit_factors == lift.unit_factors
