import itertools

import pytest
from hypothesis import given
from hypothesis import strategies as st

from tameds.roots import (
    AFFINE_DIAGRAMS,
    DimVector,
    GraphMismatchError,
    RootKind,
    StarGraph,
    affine_recognition,
    cartan_pairing,
    classify_root,
    enumerate_positive_roots_below,
    in_fundamental_region,
    is_root,
    p_value,
    simple_reflection,
)

D4 = AFFINE_DIAGRAMS["D4t"].graph()
DELTA_D4 = AFFINE_DIAGRAMS["D4t"].delta()


@st.composite
def graphs(draw):
    legs = draw(st.lists(st.integers(0, 3), min_size=1, max_size=4))
    return StarGraph.canonical(legs)


@st.composite
def graph_with_vectors(draw, count=2, lo=-4, hi=4):
    g = draw(graphs())
    vecs = [DimVector(g, tuple(draw(st.integers(lo, hi)) for _ in range(g.n_vertices))) for _ in range(count)]
    v = draw(st.integers(0, g.n_vertices - 1))
    return g, vecs, v


class TestStarGraph:
    def test_labels_and_indices(self):
        g = StarGraph((1, 2))
        assert [g.label(v) for v in range(g.n_vertices)] == ["*", "1.1", "2.1", "2.2"]
        assert all(g.index_of(g.label(v)) == v for v in range(g.n_vertices))

    def test_infinity_label(self):
        g = StarGraph((1, 1, 1, 2), infinity_leg=3)
        assert g.label(g.infinity_vertex) == "inf"
        assert g.index_of("inf") == g.infinity_vertex

    def test_unsorted_legs_rejected(self):
        with pytest.raises(ValueError):
            StarGraph((2, 1))

    def test_infinity_leg_needs_length_two(self):
        with pytest.raises(ValueError):
            StarGraph((1, 1), infinity_leg=0)

    def test_edges_form_a_tree(self):
        g = StarGraph((1, 2, 3))
        assert len(g.edges) == g.n_vertices - 1


class TestPairing:
    def test_simple_roots_have_norm_two(self):
        for v in range(D4.n_vertices):
            e = DimVector.simple(D4, v)
            assert cartan_pairing(e, e) == 2

    def test_star_and_first_vertex(self):
        g = StarGraph((1, 2))
        assert cartan_pairing(DimVector.simple(g, 0), DimVector.simple(g, g.vertex(0, 1))) == -1

    def test_delta_is_null(self):
        assert cartan_pairing(DELTA_D4, DELTA_D4) == 0

    def test_mismatched_graphs(self):
        with pytest.raises(GraphMismatchError):
            cartan_pairing(DELTA_D4, DimVector.simple(StarGraph((1,)), 0))

    @pytest.mark.parametrize(
        "d, expected",
        [(DimVector.simple(D4, 0), 0), (DELTA_D4, 1), (DimVector.zero(D4), 1), (DELTA_D4 * 2, 1)],
    )
    def test_p_values(self, d, expected):
        assert p_value(d) == expected


class TestReflections:
    def test_simple_root_flips(self):
        e = DimVector.simple(D4, 2)
        assert simple_reflection(2, e) == e * -1

    def test_delta_fixed(self):
        assert all(simple_reflection(v, DELTA_D4) == DELTA_D4 for v in range(D4.n_vertices))

    def test_star_reflection_on_ones(self):
        # (d, e_*) = 2 - 4 = -2, so the centre grows by 2
        d = DimVector(D4, (1, 1, 1, 1, 1))
        assert simple_reflection(0, d) == DimVector(D4, (3, 1, 1, 1, 1))

    @given(graph_with_vectors())
    def test_weyl_invariance(self, data):
        _, (d1, d2), v = data
        assert cartan_pairing(d1, d2) == cartan_pairing(d2, d1)
        assert cartan_pairing(simple_reflection(v, d1), simple_reflection(v, d2)) == cartan_pairing(d1, d2)
        assert p_value(simple_reflection(v, d1)) == p_value(d1)

    @given(graph_with_vectors(count=1))
    def test_involution(self, data):
        _, (d,), v = data
        assert simple_reflection(v, simple_reflection(v, d)) == d


class TestClassify:
    def test_simple_roots_are_real(self):
        for legs in [(1, 1, 1, 1), (2, 2, 2), (1, 2, 5), (3,)]:
            g = StarGraph(legs)
            assert all(classify_root(DimVector.simple(g, v)).kind is RootKind.REAL for v in range(g.n_vertices))

    def test_delta_isotropic(self):
        assert classify_root(DELTA_D4).kind is RootKind.ISOTROPIC
        assert in_fundamental_region(DELTA_D4)

    def test_disconnected_support(self):
        assert classify_root(DimVector(D4, (0, 1, 0, 1, 0))).kind is RootKind.NOT_ROOT

    def test_zero_rejected(self):
        with pytest.raises(ValueError):
            classify_root(DimVector.zero(D4))

    def test_hypergeometric_is_real(self):
        d = DimVector(StarGraph((1, 1, 1)), (2, 1, 1, 1))
        assert classify_root(d).kind is RootKind.REAL

    def test_anisotropic(self):
        # five GL_2 punctures: (d, d) = 18 - 20
        d = DimVector(StarGraph((1,) * 5), (2, 1, 1, 1, 1, 1))
        assert p_value(d) == 2
        assert classify_root(d).kind is RootKind.ANISOTROPIC

    @given(graph_with_vectors(count=1, lo=0, hi=3))
    def test_kind_matches_p(self, data):
        _, (d,), _ = data
        if d.is_zero():
            return
        kind = classify_root(d).kind
        if kind is RootKind.REAL:
            assert p_value(d) == 0
        elif kind is RootKind.ISOTROPIC:
            assert p_value(d) == 1
        elif kind is RootKind.ANISOTROPIC:
            assert p_value(d) > 1
        assert is_root(d) == kind.is_root

    @given(graph_with_vectors(count=1, lo=0, hi=3))
    def test_kind_is_weyl_invariant(self, data):
        _, (d,), v = data
        r = simple_reflection(v, d)
        if d.is_zero() or r.is_zero() or not r.is_nonnegative():
            return
        assert classify_root(r).kind == classify_root(d).kind


def _odometer(bound: DimVector):
    """Reference enumeration: every vector in the box, classified one at a time."""
    out = set()
    for entries in itertools.product(*(range(x + 1) for x in bound.entries)):
        d = DimVector(bound.graph, entries)
        if not d.is_zero() and is_root(d):
            out.add(d)
    return out


class TestEnumeration:
    def test_single_simple(self):
        e = DimVector.simple(D4, 3)
        assert [r for r, _ in enumerate_positive_roots_below(e)] == [e]

    def test_delta_bound_count(self):
        # 24 real roots below delta plus delta itself
        roots = enumerate_positive_roots_below(DELTA_D4)
        assert len(roots) == 25
        assert sum(rc.kind is RootKind.REAL for _, rc in roots) == 24

    @pytest.mark.parametrize(
        "legs, top",
        [((1, 1, 1, 1), (3, 2, 2, 1, 1)), ((2, 2, 2), (3, 2, 1, 2, 1, 1, 1)), ((1, 2), (3, 1, 2, 1)), ((1, 1, 3), (2, 1, 1, 2, 1, 1))],
    )
    def test_matches_odometer(self, legs, top):
        bound = DimVector(StarGraph(legs), top)
        assert {r for r, _ in enumerate_positive_roots_below(bound)} == _odometer(bound)

    def test_sorted_output(self):
        roots = [r for r, _ in enumerate_positive_roots_below(DELTA_D4 * 2)]
        assert roots == sorted(roots, key=lambda r: r.entries)


class TestAffine:
    def test_delta_values(self):
        assert {name: dg.delta()[0] for name, dg in AFFINE_DIAGRAMS.items()} == {"D4t": 2, "E6t": 3, "E7t": 4, "E8t": 6}

    def test_recognize_d4(self):
        match = affine_recognition(DELTA_D4)
        assert match.diagram.name == "D4t" and match.multiple == 1 and match.delta == DELTA_D4

    def test_recognize_multiple_e8(self):
        dg = AFFINE_DIAGRAMS["E8t"]
        match = affine_recognition(dg.delta() * 3)
        assert match.diagram.name == "E8t" and match.multiple == 3 and match.delta[0] == 6

    def test_simple_not_affine(self):
        assert affine_recognition(DimVector.simple(D4, 0)) is None

    def test_embedded_in_larger_star(self):
        g = StarGraph((1, 1, 1, 2))
        d = DimVector(g, (4, 2, 2, 2, 2, 0))
        match = affine_recognition(d)
        assert match.diagram.name == "D4t" and match.multiple == 2

    def test_null_vectors(self):
        for dg in AFFINE_DIAGRAMS.values():
            delta = dg.delta()
            assert p_value(delta) == 1
            assert classify_root(delta).kind is RootKind.ISOTROPIC
