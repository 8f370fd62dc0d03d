import itertools
import random

import pytest

from logdisks.monoid import (
    AffineMonoid,
    FinAbGroup,
    MonoidHom,
    group_completion,
    hom_compose,
    is_saturated,
)


def brute_members(gens, max_coeff, dim):
    """Oracle: all sums of at most max_coeff generators, coefficient-bounded."""
    out = set()
    for coeffs in itertools.product(range(max_coeff + 1), repeat=len(gens)):
        v = tuple(sum(c * g[i] for c, g in zip(coeffs, gens)) for i in range(dim))
        out.add(v)
    return out


class TestGroupCompletion:
    def test_free_monoid(self):
        M = AffineMonoid.free(2)
        assert group_completion(M) == FinAbGroup(2)

    def test_uv_w2_embedding_spans_even_sublattice(self):
        # Oracle: the lattice spanned by (2,0),(0,2),(1,1) is exactly the
        # parity-even sublattice of Z^2, hence free of rank 2.
        gens = [(2, 0), (0, 2), (1, 1)]
        spanned = set()
        for a, b, c in itertools.product(range(-4, 5), repeat=3):
            spanned.add((2 * a + c, 2 * b + c))
        box = [(x, y) for x in range(-4, 5) for y in range(-4, 5)]
        for v in box:
            even = (v[0] + v[1]) % 2 == 0
            assert ((v in spanned) == even) or not even
        M = AffineMonoid(2, tuple(gens))
        assert group_completion(M) == FinAbGroup(2)

    def test_index_two_monoid_on_line(self):
        M = AffineMonoid(1, ((2,),))
        assert group_completion(M) == FinAbGroup(1)

    def test_rank_bounded_by_ambient(self):
        random.seed(1)
        for _ in range(25):
            n = random.randint(1, 3)
            k = random.randint(1, 4)
            gens = set()
            while len(gens) < k:
                gens.add(tuple(random.randint(-3, 3) for _ in range(n)))
            M = AffineMonoid(n, tuple(gens))
            assert group_completion(M).rank <= n

    def test_invariance_under_permutation_and_redundant_generator(self):
        M = AffineMonoid(2, ((1, 0), (1, 1)))
        P = AffineMonoid(2, ((1, 1), (1, 0)))
        assert group_completion(M) == group_completion(P)
        # (2, 1) = (1,0) + (1,1) is already a member
        assert M.membership((2, 1)) is not None
        bigger = AffineMonoid(2, ((1, 0), (1, 1), (2, 1)))
        assert group_completion(bigger) == group_completion(M)


class TestMembership:
    def test_simple(self):
        M = AffineMonoid(1, ((2,), (3,)))
        assert M.contains((5,))
        assert M.contains((2,))
        assert not M.contains((1,))

    def test_against_brute_force(self):
        gens = [(1, 0), (1, 1), (1, 2)]
        M = AffineMonoid(2, tuple(gens))
        oracle = brute_members(gens, 4, 2)
        for v in itertools.product(range(0, 5), repeat=2):
            if v[0] <= 4 and v[1] <= 2 * v[0]:
                assert (v in oracle) == M.contains(v)


class TestSaturation:
    def test_free_saturated(self):
        assert is_saturated(AffineMonoid.free(2)).status == "saturated"

    def test_numerical_semigroup_not_saturated(self):
        # Oracle: 2*(1) = (2) lies in <2,3> but (1) does not.
        gens = [(2,), (3,)]
        members = brute_members(gens, 6, 1)
        assert (2,) in members and (1,) not in members
        res = is_saturated(AffineMonoid(1, tuple(gens)), search_bound=6)
        assert res.status == "not_saturated"
        assert res.witness == (1,)

    def test_height_one_slice_certifies_saturation(self):
        # Oracle: lattice points of the cone {x >= 0, 0 <= y <= 2x} at
        # height x = 1 are exactly the three generators.
        gens = [(1, 0), (1, 1), (1, 2)]
        slice_points = [(1, y) for y in range(0, 3)]
        assert set(slice_points) == set(gens)
        res = is_saturated(AffineMonoid(2, tuple(gens)))
        assert res.status == "saturated"

    def test_even_sublattice_cone_is_saturated_in_its_span(self):
        # Saturation is relative to the group completion (the even
        # sublattice), where the three generators form a unimodular fan.
        res = is_saturated(AffineMonoid(2, ((2, 0), (0, 2), (1, 1))))
        assert res.status == "saturated"

    def test_index_two_line_is_saturated(self):
        # <(2)> inside its own completion 2Z is all of the positive part.
        assert is_saturated(AffineMonoid(1, ((2,),))).status == "saturated"

    def test_witness_lies_in_span(self):
        res = is_saturated(AffineMonoid(2, ((2, 0), (1, 1))), search_bound=5)
        if res.status == "not_saturated":
            # k*w must be a member for some k
            M = AffineMonoid(2, ((2, 0), (1, 1)))
            assert not M.contains(res.witness)


class TestHoms:
    def test_identity_neutral(self):
        M = AffineMonoid(2, ((1, 0), (1, 1)))
        f = MonoidHom(M, M, ((1, 1), (0, 2)))
        ident = MonoidHom.identity(M)
        assert hom_compose(ident, f).coeff_matrix == f.coeff_matrix
        assert hom_compose(f, ident).coeff_matrix == f.coeff_matrix

    def test_exponent_additivity(self):
        N = AffineMonoid(1, ((1,),))
        double = MonoidHom(N, N, ((2,),))
        triple = MonoidHom(N, N, ((3,),))
        assert hom_compose(double, triple).images() == [(6,)]

    def test_doubling_after_embedding(self):
        U = AffineMonoid(3, ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
        # u, v, w with uv = w^2 realized inside N^2
        T = AffineMonoid(2, ((1, 0), (0, 1)))
        embed = MonoidHom(U, T, ((2, 0), (0, 2), (1, 1)))
        doubling = MonoidHom(T, T, ((2, 0), (0, 2)))
        comp = hom_compose(embed, doubling)
        assert comp.images() == [(4, 0), (0, 4), (2, 2)]

    def test_relations_enforced(self):
        # <u, v, w | uv = w^2>: images must satisfy the relation.
        M = AffineMonoid(2, ((2, 0), (0, 2), (1, 1)))
        N = AffineMonoid(1, ((1,),))
        MonoidHom(M, N, ((2,), (4,), (3,)))  # 2 + 4 = 2 * 3, fine
        with pytest.raises(ValueError):
            MonoidHom(M, N, ((2,), (4,), (5,)))

    def test_associativity(self):
        N = AffineMonoid(1, ((1,),))
        f = MonoidHom(N, N, ((2,),))
        g = MonoidHom(N, N, ((3,),))
        h = MonoidHom(N, N, ((5,),))
        lhs = hom_compose(hom_compose(f, g), h)
        rhs = hom_compose(f, hom_compose(g, h))
        assert lhs.coeff_matrix == rhs.coeff_matrix


class TestSerialization:
    def test_json_round_trip(self):
        import json

        M = AffineMonoid(2, ((2, 0), (0, 2), (1, 1)))
        blob = json.dumps(
            {"ambient_rank": M.ambient_rank, "generators": [list(g) for g in M.generators]}
        )
        data = json.loads(blob)
        back = AffineMonoid(data["ambient_rank"], tuple(map(tuple, data["generators"])))
        assert back == M
