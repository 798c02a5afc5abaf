import random

import pytest
from hypothesis import given, settings, strategies as st

from graphcensus.farey import layered_pair
from graphcensus.hypsolve import load_ideal
from graphcensus.perm import ALL_PERMS, EDGES
from graphcensus.triangulation import (
    EmbeddedGraph, MarkedTriangulation, StructureError, Triangulation, check_efficient,
    format_fixture, graph_type, is_closed_orientable, iso_signature, parse_fixture, relabel,
)


def test_valence_sum_and_partition(closed_upto3):
    for n, tris in closed_upto3.items():
        for tri in tris:
            cls = tri.classes
            assert sum(ec.valence for ec in cls.edges) == 6 * n
            slots = [s for ec in cls.edges for s in ec.slots]
            assert sorted(slots) == [(t, e) for t in range(n) for e in range(6)]
            corners = [c for vc in cls.vertices for c in vc.corners]
            assert sorted(corners) == [(t, c) for t in range(n) for c in range(4)]
            assert all(ec.distinct_tets <= ec.valence for ec in cls.edges)


def test_euler_characteristic_zero(closed_upto3):
    # F = 2n and T = n, so chi = 0 forces E = V + n
    count = 0
    for n, tris in closed_upto3.items():
        for tri in tris:
            assert len(tri.face_pairs()) == 2 * n
            assert len(tri.classes.edges) == len(tri.classes.vertices) + n
            count += 1
    assert count > 0


def test_layered_counts():
    mt, path = layered_pair(5, 2, 1, 0)
    assert path.k == 5
    assert mt.n == 2
    assert len(mt.classes.edges) == 3
    assert len(mt.classes.vertices) == 1


def test_torus_cusp_is_not_closed(ideal_path):
    tri = load_ideal(ideal_path("0_3_1.tri")).tri
    assert tri.is_closed and tri.is_oriented
    assert [vc.link_euler for vc in tri.classes.vertices] == [0]
    assert not is_closed_orientable(tri)


def test_even_gluing_is_not_orientable():
    swap = (1, 0, 3, 2)
    tri = Triangulation([[(0, swap), (0, swap), (0, (0, 1, 3, 2)), (0, (0, 1, 3, 2))]])
    assert not tri.is_oriented
    assert not is_closed_orientable(tri)


def test_layered_lens_space_is_closed_orientable():
    mt, _ = layered_pair(1, 0, 3, 1)
    assert is_closed_orientable(mt.tri)


def test_non_involution_rejected():
    rows = [[(0, (1, 0, 2, 3)), (0, (0, 1, 3, 2)), (0, (0, 1, 3, 2)), (0, (0, 1, 3, 2))]]
    with pytest.raises(StructureError):
        Triangulation(rows)


def random_relabel(mt, rng):
    n = mt.n
    tet_perm = list(range(n))
    rng.shuffle(tet_perm)
    corner = [rng.choice(ALL_PERMS) for _ in range(n)]
    tri, marked = relabel(mt.tri, tet_perm, corner, mt.marked)
    return MarkedTriangulation(tri, marked)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_signature_relabel_invariance(efficient_upto2, data):
    mt = data.draw(st.sampled_from(efficient_upto2))
    seed = data.draw(st.integers(0, 2**32 - 1))
    other = random_relabel(mt, random.Random(seed))
    assert other.signature == mt.signature
    assert check_efficient(other) is not None


def test_lens_8_3_slot_orderings_agree():
    mt, _ = layered_pair(1, 0, 8, 3)
    rng = random.Random(7)
    changed = 0
    for _ in range(10):
        other = random_relabel(mt, rng)
        changed += other.tri != mt.tri
        assert iso_signature(other.tri, other.marked) == iso_signature(mt.tri, mt.marked)
    assert changed > 0


def test_marking_changes_signature():
    mt, _ = layered_pair(1, 0, 8, 3)
    sigs = {iso_signature(mt.tri, {e}) for e in range(len(mt.classes.edges))}
    assert iso_signature(mt.tri) not in sigs


def _degrees_by_hand(mt):
    """Marked degree of every vertex class, read from edge slots directly."""
    cls = mt.classes
    deg = [0] * len(cls.vertices)
    loops = [0] * len(cls.vertices)
    for e in mt.marked:
        t, ei = cls.edges[e].slots[0]
        a, b = EDGES[ei]
        u, v = cls.vertex_of[t, a], cls.vertex_of[t, b]
        deg[u] += 1
        deg[v] += 1
        if u == v:
            loops[u] += 1
    return deg, loops


def test_efficiency_matches_degree_count(closed_upto3):
    checked = 0
    for n in (1, 2):
        for tri in closed_upto3[n]:
            ne = len(tri.classes.edges)
            for bits in range(1, 2 ** ne):
                mt = MarkedTriangulation(tri, [e for e in range(ne) if bits >> e & 1])
                deg, loops = _degrees_by_hand(mt)
                expect = all(d in (2, 3) for d in deg) and all(
                    loops[v] == 1 for v, d in enumerate(deg) if d == 2)
                assert (check_efficient(mt) is not None) == expect
                checked += 1
    assert checked > 100


def test_unmarked_vertex_not_efficient(closed_upto3):
    for tri in closed_upto3[2]:
        if len(tri.classes.vertices) >= 2:
            deg = MarkedTriangulation(tri, [0]).marked_degrees()
            if 0 in deg:
                assert check_efficient(MarkedTriangulation(tri, [0])) is None
                return
    pytest.fail("no two-vertex triangulation found")


def test_degree_one_vertex_not_efficient(closed_upto3):
    for n in (1, 2):
        for tri in closed_upto3[n]:
            ne = len(tri.classes.edges)
            for bits in range(1, 2 ** ne):
                mt = MarkedTriangulation(tri, [e for e in range(ne) if bits >> e & 1])
                if sorted(mt.marked_degrees()) == [1, 3]:
                    assert check_efficient(mt) is None
                    return
    pytest.fail("no marking with degrees 1 and 3 found")


def test_layered_knot_structure():
    mt, _ = layered_pair(5, 2, 1, 0)
    s = check_efficient(mt)
    assert s is not None
    assert len(s.knots) == 1 and s.vertices == ()
    assert graph_type(s) == "knot"


def test_graph_types():
    theta = EmbeddedGraph((0, 1), ((0, 1), (0, 1), (0, 1)), (), (0, 1, 2), ())
    handcuff = EmbeddedGraph((0, 1), ((0, 0), (0, 1), (1, 1)), (), (0, 1, 2), ())
    knot = EmbeddedGraph((), (), (0,), (), (0,))
    link = EmbeddedGraph((), (), (0, 1), (), (0, 1))
    k4 = EmbeddedGraph((0, 1, 2, 3), ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)), (), (), ())
    assert graph_type(theta) == "2t"
    assert graph_type(handcuff) == "2h"
    assert graph_type(knot) == "knot"
    assert graph_type(link) == "link2"
    assert graph_type(k4) == "4a"


def test_fixture_round_trip(efficient_upto2):
    for mt in efficient_upto2[:50]:
        back = parse_fixture(format_fixture(mt.tri, mt.marked))
        assert back.tri == mt.tri and back.marked == mt.marked


@pytest.mark.parametrize("text", [
    "tets 1\n0:1023 0:1023 0:1230\n",
    "tets 1\n0:1023 0:1023 0:1230 0:30x2\n",
    "tet 1\n",
    "tets 1\n0:1023 0:1023 0:1230 0:3012\nmarked 9\n",
])
def test_bad_fixtures(text):
    with pytest.raises(StructureError):
        parse_fixture(text)
