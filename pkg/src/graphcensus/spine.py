"""Dual-spine view of a marked triangulation and non-minimality tests.

The spine dual to a triangulation has one vertex per tetrahedron, one edge
per face and one region per edge class.  Only the detection side of the
simplifying moves is implemented: a marked triangulation carrying a witness
is discarded, the smaller spine is never built.
"""

from dataclasses import dataclass

from .perm import EDGES, EDGE_INDEX, INVERSE, compose, face_corners, transposition
from .triangulation import MarkedTriangulation, StructureError, Triangulation


@dataclass(frozen=True)
class SpineView:
    vertices: int
    edges: int
    regions: int
    pierced: tuple


def spine_view(mt):
    cls = mt.classes
    return SpineView(mt.n, 2 * mt.n, len(cls.edges), tuple(sorted(mt.marked)))


def is_collapsible_edge(ec, limit):
    """An edge of valence ``i`` running through ``i`` distinct tetrahedra, ``i <= limit``."""
    return ec.valence == ec.distinct_tets <= limit


def forced_marked(tri):
    """Edge classes that must lie in the graph for the dual spine to be minimal."""
    return frozenset(ec.id for ec in tri.classes.edges if is_collapsible_edge(ec, 3))


def low_valence_obstruction(mt):
    """First unmarked edge class admitting a 3-2, 2-0 or 1-0 move, as ``(id, i)``."""
    for ec in mt.classes.edges:
        if ec.id not in mt.marked and is_collapsible_edge(ec, 3):
            return ec.id, ec.distinct_tets
    return None


def apply_move23(tri, face, marked=()):
    """Replace the two tetrahedra sharing ``face = (t, f)`` by three around a new edge.

    Returns ``(new triangulation, transported marking)``; the new edge is
    unmarked.  Tetrahedra other than the two involved keep their order and
    the three new ones are appended.
    """
    t0, f0 = face
    g = tri.gluings[t0][f0]
    if g is None:
        raise StructureError("face is not glued")
    t1, p = g
    if t1 == t0:
        raise StructureError("2-3 move needs two distinct tetrahedra")
    f1 = p[f0]
    tri_corners = face_corners(f0)
    others = [t for t in range(tri.n) if t not in (t0, t1)]
    new_index = {t: i for i, t in enumerate(others)}
    base = len(others)
    new_tet = {i: base + k for k, i in enumerate(tri_corners)}
    # corner maps from t1 to the new tetrahedron N_i (which uses t0's labels,
    # with corner i standing for the far apex)
    psi = {i: compose(p, transposition(f0, i)) for i in tri_corners}

    def translate(t, f):
        """New slot and old->new corner map for old slot (t, f)."""
        if t == t0:
            return new_tet[f], f, (0, 1, 2, 3)
        if t == t1:
            i = INVERSE[p][f]
            return new_tet[i], f0, INVERSE[psi[i]]
        return new_index[t], f, (0, 1, 2, 3)

    rows = [[None] * 4 for _ in range(tri.n + 1)]
    for t in range(tri.n):
        for f in range(4):
            if (t, f) in ((t0, f0), (t1, f1)):
                continue
            nb, q = tri.gluings[t][f]
            s_t, s_f, m = translate(t, f)
            d_t, _, m2 = translate(nb, q[f])
            rows[s_t][s_f] = (d_t, compose(m2, compose(q, INVERSE[m])))
    for i in tri_corners:
        for j in tri_corners:
            if i != j:
                rows[new_tet[i]][j] = (new_tet[j], transposition(i, j))
    new = Triangulation(rows)
    new_marked = frozenset()
    if marked:
        cls = tri.classes
        ncls = new.classes
        out = set()
        for e in marked:
            t, ei = cls.edges[e].slots[0]
            a, b = EDGES[ei]
            if t == t0:
                i = next(c for c in tri_corners if c not in (a, b))
                slot = (new_tet[i], ei)
            elif t == t1:
                i = next(c for c in tri_corners if p[c] not in (a, b))
                m = INVERSE[psi[i]]
                slot = (new_tet[i], EDGE_INDEX[m[a], m[b]])
            else:
                slot = (new_index[t], ei)
            out.add(ncls.edge_of[slot])
        new_marked = frozenset(out)
    return new, new_marked


def expansions(mt):
    """All single 2-3 expansions of ``mt`` as MarkedTriangulations."""
    out = []
    for (t, f, nb, _, _) in mt.tri.face_pairs():
        if t == nb:
            continue
        new, marked = apply_move23(mt.tri, (t, f), mt.marked)
        out.append(MarkedTriangulation(new, marked))
    return out


def expand_and_test(mt):
    """True when some 2-3 expansion exposes an unmarked edge removable by a 1-0 or 2-0 move."""
    for ex in expansions(mt):
        for ec in ex.classes.edges:
            if ec.id not in ex.marked and is_collapsible_edge(ec, 2):
                return True
    return False


def complement_complexity_bound(mt):
    """Upper bound for the complexity of the complement of the marked graph."""
    if not mt.marked:
        raise ValueError("complement bound needs a nonempty marking")
    n = mt.n
    bound = n - 1
    if n >= 2 and any(mt.classes.edges[e].distinct_tets >= n - 1 for e in mt.marked):
        bound = min(bound, 1)
    return bound
