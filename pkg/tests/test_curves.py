import random
from fractions import Fraction

import pytest

from helpers import marking_names, nonzero_rational, random_curve, random_rational
from logdisks.curves import (
    INF,
    INFTY,
    PARENT,
    Component,
    StableCurve,
    compose_framed,
    compose_unframed,
    factorization_family_check,
    forget_marking,
    induce_frames,
    leading_coefficient,
    nodal_composite_tensor,
    nodal_family_tensor,
    s_tensor,
    s_tensor_on_curve,
    smooth_curve,
    transport,
    transport_chain,
    transport_scaling,
    two_marked_normal_form,
)
from logdisks.rational import Poly, RatFunc


def oracle_s_value(p, q):
    """Independent oracle: df at p times d(1/f) at q via symbolic derivatives.

    f = (z - p)/(z - q) for finite p, q; f = z - p when q is at infinity.
    The value at infinity is computed in the coordinate w = 1/z.
    """
    z, w = RatFunc.var("z"), RatFunc.var("w")
    if q is INFTY:
        f = z - RatFunc.const(p)
        df_p = f.derivative("z").evaluate({"z": p})
        finv_w = (RatFunc.const(1) / f).subs({"z": w.inv()})
        d_inv_q = finv_w.derivative("w").evaluate({"w": 0})
        return df_p * d_inv_q
    f = (z - RatFunc.const(p)) / (z - RatFunc.const(q))
    df_p = f.derivative("z").evaluate({"z": p})
    d_inv_q = (RatFunc.const(1) / f).derivative("z").evaluate({"z": q})
    return df_p * d_inv_q


class TestSTensor:
    def test_zero_to_infinity(self):
        t = s_tensor(Fraction(0), INFTY)
        assert t.value == oracle_s_value(Fraction(0), INFTY) == 1
        assert (t.basis_p, t.basis_q) == ("dz", "dw")

    def test_zero_one(self):
        t = s_tensor(Fraction(0), Fraction(1))
        assert t.value == oracle_s_value(Fraction(0), Fraction(1)) == -1

    def test_random_pairs_match_oracle(self):
        rng = random.Random(3)
        for _ in range(100):
            p = random_rational(rng)
            q = random_rational(rng)
            if p == q:
                continue
            assert s_tensor(p, q).value == oracle_s_value(p, q)
            assert s_tensor(p, INFTY).value == oracle_s_value(p, INFTY)

    def test_symmetry(self):
        rng = random.Random(4)
        for _ in range(50):
            p, q = random_rational(rng), random_rational(rng)
            if p == q:
                continue
            assert s_tensor(p, q).value == s_tensor(q, p).value

    def test_cross_component_zero_flag(self):
        C = two_component_curve(a=Fraction(1))
        t = s_tensor_on_curve(C, INF, "q")
        assert not t.same_component
        assert s_tensor_on_curve(C, "x", "q").same_component is False
        assert s_tensor_on_curve(C, "x", INF).same_component is True

    def test_equal_points_rejected(self):
        with pytest.raises(ValueError):
            s_tensor(Fraction(2), Fraction(2))


def two_component_curve(a: Fraction, lam=Fraction(1)) -> StableCurve:
    """Root chart with a child glued at p1 = 3; marking q at 5 on the child."""
    c0 = Component(
        "c0", ((PARENT, INFTY), ("c1", Fraction(3)), ("x", Fraction(0)))
    )
    c1 = Component(
        "c1", ((PARENT, INFTY), ("q", Fraction(5)), ("y", Fraction(7)))
    )
    return StableCurve(
        (c0, c1), "c0", (("c0", "c1", a),), lam, frozenset({"x", "q", "y"})
    )


class TestTransport:
    def test_single_line_to_infinity(self):
        rng = random.Random(5)
        for _ in range(100):
            p = random_rational(rng)
            lam = nonzero_rational(rng)
            C = smooth_curve({"p": p, "r": p + 1}, basepoint=1)
            out = transport(C, "p", INF, lam)
            assert out == 1 / lam

    def test_two_component_example(self):
        # transporting lambda from the root infinity to a marking behind a
        # node with gluing scalar a gives a^{-1} lambda^{-1}.
        for a, lam in [(Fraction(2), Fraction(3)), (Fraction(-1, 2), Fraction(5))]:
            C = two_component_curve(a, lam)
            got = transport(C, INF, "q", lam)
            assert got == 1 / (a * lam)

    def test_round_trip_and_parity(self):
        rng = random.Random(6)
        for _ in range(60):
            k = rng.randint(3, 6)
            C = random_curve(rng, marking_names(k))
            ms = sorted(C.markings)
            p, q = rng.sample(ms, 2)
            s = transport_scaling(C, p, q)
            assert s.exponent == -1  # always antilinear
            chain = transport_chain(C, p, q)
            assert len(chain) % 2 == 1
            v = nonzero_rational(rng)
            there = transport(C, p, q, v)
            back = transport(C, q, p, there)
            assert back == v

    def test_zero_vector_rejected(self):
        C = smooth_curve({"p": Fraction(0), "r": Fraction(1)})
        with pytest.raises(ValueError):
            transport(C, "p", INF, 0)


class TestComposeUnframed:
    def test_unit_scalars(self):
        C1 = smooth_curve({"n": Fraction(0), "a": Fraction(1)}, basepoint=1)
        C2 = smooth_curve({"b": Fraction(0), "c": Fraction(1)}, basepoint=1)
        glued = compose_unframed(C1, "n", C2)
        (edge,) = glued.edges
        assert edge[2] == 1
        assert glued.basepoint == 1
        assert glued.markings == {"a", "b", "c"}

    def test_scalar_arithmetic(self):
        # transport of lambda1 = 2 from infinity to 0 gives 1/2; tensored
        # with lambda2 = 3 the new edge carries 3/2.
        C1 = smooth_curve({"n": Fraction(0), "a": Fraction(1)}, basepoint=2)
        C2 = smooth_curve({"b": Fraction(0), "c": Fraction(1)}, basepoint=3)
        glued = compose_unframed(C1, "n", C2)
        (edge,) = glued.edges
        assert edge[2] == Fraction(3, 2)
        assert glued.basepoint == 2

    def test_label_collision_rejected(self):
        C1 = smooth_curve({"n": Fraction(0), "a": Fraction(1)})
        C2 = smooth_curve({"a": Fraction(0), "b": Fraction(1)})
        with pytest.raises(ValueError):
            compose_unframed(C1, "n", C2)

    def test_sequential_associativity(self):
        rng = random.Random(8)
        for _ in range(40):
            C1 = random_curve(rng, ["a", "b", "n"])
            C2 = random_curve(rng, ["c", "d", "m"])
            C3 = random_curve(rng, ["e", "f"])
            lhs = compose_unframed(compose_unframed(C1, "n", C2), "m", C3)
            rhs = compose_unframed(C1, "n", compose_unframed(C2, "m", C3))
            assert lhs == rhs

    def test_parallel_associativity(self):
        rng = random.Random(9)
        for _ in range(40):
            C1 = random_curve(rng, ["n", "m", "a"])
            C2 = random_curve(rng, ["b", "c"])
            C3 = random_curve(rng, ["d", "e"])
            lhs = compose_unframed(compose_unframed(C1, "n", C2), "m", C3)
            rhs = compose_unframed(compose_unframed(C1, "m", C3), "n", C2)
            assert lhs == rhs


class TestComposeFramed:
    def test_unit(self):
        F1 = induce_frames(smooth_curve({"n": Fraction(0), "a": Fraction(1)}, 1))
        C2 = smooth_curve({"b": Fraction(0), "c": Fraction(1)}, 1)
        F2 = induce_frames(C2)
        # frame at n from transport of 1 is 1; basepoint 1: edge scalar 1
        glued = compose_framed(F1, "n", F2)
        (edge,) = glued.curve.edges
        assert edge[2] == F1.frame("n") * 1

    def test_bilinearity(self):
        C1 = smooth_curve({"n": Fraction(0), "a": Fraction(1)})
        F1 = FramedOverride = None
        from logdisks.curves import FramedCurve

        F1 = FramedCurve(C1, (("n", Fraction(5)), ("a", Fraction(1))))
        C2 = smooth_curve({"b": Fraction(0), "c": Fraction(1)}, basepoint=2)
        F2 = induce_frames(C2)
        glued = compose_framed(F1, "n", F2)
        (edge,) = glued.curve.edges
        assert edge[2] == 10

    def test_section_intertwines_compositions(self):
        rng = random.Random(10)
        for _ in range(40):
            C1 = random_curve(rng, ["a", "b", "n"])
            C2 = random_curve(rng, ["c", "d"])
            framed = compose_framed(induce_frames(C1), "n", induce_frames(C2))
            unframed = compose_unframed(C1, "n", C2)
            assert framed.curve == unframed
            assert framed.frames == induce_frames(unframed).frames


class TestForgetAndNormalForm:
    def test_forget(self):
        C = smooth_curve({"a": Fraction(0), "b": Fraction(1), "c": Fraction(2)})
        out = forget_marking(C, "c")
        assert out.markings == {"a", "b"}
        with pytest.raises(ValueError):
            forget_marking(out, "a")

    def test_normal_form_scaling(self):
        # symbolic check: moving (a, b) to (0, 1) rescales the basepoint by
        # z_b - z_a.
        za, zb = RatFunc.var("za"), RatFunc.var("zb")
        C = smooth_curve({"a": za, "b": zb}, basepoint=1)
        assert two_marked_normal_form(C, "a", "b") == zb - za


class TestFactorization:
    def test_infinity_configuration_unit_smoothing(self):
        assert factorization_family_check(INFTY, Fraction(5), Fraction(1))

    def test_rescaled_smoothings(self):
        rng = random.Random(11)
        for c in (Fraction(1), Fraction(2), Fraction(-3)):
            for _ in range(20):
                q2 = nonzero_rational(rng)
                assert factorization_family_check(INFTY, q2, c)
                p1 = nonzero_rational(rng)
                assert factorization_family_check(p1, q2, c)

    def test_eta_scales_with_smoothing(self):
        q2 = Fraction(5)
        base = nodal_composite_tensor(INFTY, q2, Fraction(1))
        scaled = nodal_composite_tensor(INFTY, q2, Fraction(7))
        assert scaled == 7 * base

    def test_degenerate_request_rejected(self):
        with pytest.raises(ValueError):
            nodal_family_tensor(INFTY, Fraction(0), Fraction(1))
        with pytest.raises(ValueError):
            s_tensor(INFTY, INFTY)


class TestSerialization:
    def test_json_round_trip(self):
        rng = random.Random(12)
        for _ in range(20):
            C = random_curve(rng, marking_names(rng.randint(2, 5)))
            blob = C.to_json()
            back = StableCurve.from_json(blob)
            assert back == C

    def test_documented_format(self):
        data = {
            "components": [
                {"id": "c0", "points": {"a": "0", "b": "1", "@parent": "inf"}}
            ],
            "edges": [],
            "basepoint": "1",
        }
        C = StableCurve.from_json(data)
        assert C.markings == {"a", "b"}
        assert C.basepoint == 1
