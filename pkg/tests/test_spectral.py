import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import random_generic_classes
from tameds.multgroup import MultElement, ParamVector, prod
from tameds.roots import DimVector, RootKind, StarGraph, classify_root
from tameds.spectral import (
    ClassSpec,
    ValidationError,
    build_problem,
    char_compat,
    class_to_leg,
    compose_degenerations,
    degenerate_type,
    from_star,
    leg_to_eigenvalues,
    strictness,
    type_vector,
)

a, b, lam = MultElement.symbol("a"), MultElement.symbol("b"), MultElement.symbol("lam")
Z = MultElement.root_of_unity
ONE = MultElement()


class TestClassToLeg:
    def test_semisimple_gl2(self):
        dims, q = class_to_leg(ClassSpec.from_multiplicities([a, b], [1, 1]))
        assert dims == (2, 1) and q == (a, b / a)

    def test_scalar(self):
        dims, q = class_to_leg(ClassSpec.from_multiplicities([lam], [3]))
        assert dims == (3,) and q == (lam,)

    def test_jordan_block(self):
        dims, q = class_to_leg(ClassSpec((lam, lam), (2, 1)))
        assert dims == (2, 1) and q == (lam, ONE)

    def test_rejects_nondecreasing_ranks(self):
        with pytest.raises(ValidationError) as err:
            ClassSpec((a, b), (2, 2))
        assert err.value.pointer == "/ranks/1"

    def test_semisimple_needs_distinct(self):
        with pytest.raises(ValidationError):
            ClassSpec((a, a), (2, 1), semisimple=True)

    @given(st.lists(st.sampled_from([a, b, lam, Z(3), Z(2), a * b]), min_size=1, max_size=5))
    def test_round_trip(self, xi):
        ranks = tuple(range(len(xi) + 1, 1, -1))
        _, q = class_to_leg(ClassSpec(tuple(xi), ranks))
        assert leg_to_eigenvalues(q) == tuple(xi)


class TestBuildProblem:
    def test_four_gl2_classes(self):
        syms = [MultElement.symbol(f"x{i}") for i in range(8)]
        syms[7] = prod(syms[:7]).inverse()
        classes = [ClassSpec.from_multiplicities(syms[2 * j : 2 * j + 2], [1, 1]) for j in range(4)]
        p = build_problem(classes)
        assert p.graph.legs == (1, 1, 1, 1)
        assert p.d.entries == (2, 1, 1, 1, 1)
        assert p.q[0] == syms[0] * syms[2] * syms[4] * syms[6]
        assert p.q[1] == syms[1] / syms[0]
        assert p.char_is_one()

    def test_doubled_d4(self):
        syms = [MultElement.symbol(f"x{i}") for i in range(8)]
        syms[7] = prod(syms[:7]).inverse() * Z(2)  # det relation at multiplicity 2
        classes = [ClassSpec.from_multiplicities(syms[2 * j : 2 * j + 2], [2, 2]) for j in range(4)]
        p = build_problem(classes)
        assert p.d.entries == (4, 2, 2, 2, 2)

    def test_single_gl1(self):
        p = build_problem([ClassSpec.from_multiplicities([ONE], [1])])
        assert p.graph.legs == () and p.d.entries == (1,) and p.q.entries == (ONE,)

    def test_hypergeometric_shape(self):
        p = build_problem([ClassSpec.from_multiplicities([a, b], [1, 1])] * 2 + [ClassSpec.from_multiplicities([lam, (a * b) ** -2 / lam], [1, 1])])
        assert p.d.entries == (2, 1, 1, 1)
        assert classify_root(p.d).kind is RootKind.REAL

    def test_mismatched_sizes(self):
        with pytest.raises(ValidationError) as err:
            build_problem([ClassSpec.from_multiplicities([a, b], [1, 1]), ClassSpec.from_multiplicities([a], [3])])
        assert err.value.pointer == "/classes/1"

    def test_legs_sorted_ties_in_input_order(self):
        c3 = ClassSpec.from_multiplicities([a, b, lam], [1, 1, 1])
        c2 = ClassSpec.from_multiplicities([a, b], [2, 1])
        p = build_problem([c3, c2, c2])
        assert p.graph.legs == (1, 1, 2)
        assert p.leg_origin == (1, 2, 0)
        assert p.user_label(p.graph.vertex(2, 1)) == "1.1"

    def test_theta_labels(self):
        c = ClassSpec.from_multiplicities([a, b], [1, 1])
        p = build_problem([c, c, c], {"*": Fraction(1), "2.1": Fraction(-2)})
        assert p.theta == (1, 0, -2, 0)
        with pytest.raises(ValidationError):
            build_problem([c, c], {"9.1": Fraction(1)})

    @given(st.integers(0, 10_000))
    def test_determinant_identity(self, seed):
        rng = random.Random(seed)
        classes = random_generic_classes(rng, rng.randint(1, 4), rng.randint(1, 4))
        # twist one eigenvalue so that the determinant relation may fail
        if rng.random() < 0.5:
            c = classes[0]
            classes[0] = ClassSpec(tuple(x * Z(3) if i == 0 else x for i, x in enumerate(c.eigenvalues)), c.ranks, True)
        p = build_problem(classes)
        _, star = strictness(type_vector(p.d))
        total = prod(c.determinant() for c in classes)
        assert p.char_is_one() == total.is_one()
        assert all(sum(leg) == p.n for leg in star)

    @given(st.integers(0, 10_000))
    def test_char_compat_on_built_problems(self, seed):
        rng = random.Random(seed)
        classes = random_generic_classes(rng, rng.randint(1, 4), rng.randint(1, 4))
        if rng.random() < 0.5:
            classes.append(ClassSpec((lam, lam, lam), (3, 2, 1)) if classes[0].n == 3 else classes[0])
        classes = [c for c in classes if c.n == classes[0].n]
        p = build_problem(classes)
        assert char_compat(p.d, p.q)


class TestCharCompat:
    def test_equal_q_decreasing(self):
        g = StarGraph((2,))
        q = ParamVector(g, (lam, ONE, ONE))
        assert char_compat(DimVector(g, (3, 2, 1)), q)

    def test_equal_q_increasing(self):
        g = StarGraph((2,))
        q = ParamVector(g, (lam, ONE, ONE))
        assert not char_compat(DimVector(g, (4, 3, 1)), q)


class TestTypes:
    def test_strict(self):
        ok, star = strictness(((3, 2, 0), (3, 3)))
        assert ok and star == ((1, 2, 0), (0, 3))
        assert all(sum(leg) == 3 for leg in star)

    def test_not_strict(self):
        assert not strictness(((2, 3),))[0]

    def test_from_star_inverts(self):
        d = ((4, 2, 1), (4, 4), (4,))
        assert from_star(strictness(d)[1]) == d

    def test_identity_degeneration(self):
        d = ((3, 2, 1), (3, 1))
        assert degenerate_type(((0, 1, 2), (0, 1)), d) == d

    def test_full_collapse(self):
        assert degenerate_type(((0,), (0,)), ((3, 2, 1), (3, 1))) == ((3,), (3,))

    def test_drop_index(self):
        assert degenerate_type(((0, 2),), ((5, 3, 1),)) == ((5, 1),)

    def test_non_monotone(self):
        with pytest.raises(ValidationError):
            degenerate_type(((0, 2, 1),), ((5, 3, 1),))

    @given(st.data())
    def test_contravariant(self, data):
        nu = data.draw(st.lists(st.integers(0, 4), min_size=1, max_size=3))

        def sub(n_j):
            size = data.draw(st.integers(0, n_j))
            return (0,) + tuple(sorted(data.draw(st.sets(st.integers(1, n_j), min_size=size, max_size=size)))) if n_j else (0,)

        s2 = tuple(sub(n) for n in nu)  # tau(mu) -> tau(nu)
        mu = [len(s) - 1 for s in s2]
        s1 = tuple(sub(n) for n in mu)  # tau(lambda) -> tau(mu)
        d = tuple(tuple(data.draw(st.integers(0, 5)) for _ in range(n + 1)) for n in nu)
        lhs = degenerate_type(compose_degenerations(s2, s1), d)
        assert lhs == degenerate_type(s1, degenerate_type(s2, d))
