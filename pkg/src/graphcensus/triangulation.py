"""Closed orientable triangulations with marked edges.

A :class:`Triangulation` is a face-pairing of ``n`` tetrahedra.  Face ``f`` of a
tetrahedron is the face opposite corner ``f``; gluing face ``f`` of tetrahedron
``t`` by the permutation ``p`` identifies corner ``c`` of ``t`` with corner
``p[c]`` of the neighbour, and face ``f`` with face ``p[f]``.

Every tetrahedron carries the orientation of its corner order ``0123``, so a
gluing reverses orientation exactly when its permutation is odd.
"""

from dataclasses import dataclass
from functools import cached_property
from itertools import permutations

from .perm import (
    ALL_PERMS, EDGES, EDGE_INDEX, INVERSE, PARITY, compose, face_corners,
    format_perm, other_two, parse_perm,
)


class StructureError(ValueError):
    """Raised for gluing data that does not describe a triangulation."""


class _UnionFind:
    def __init__(self, size):
        self.parent = list(range(size))

    def find(self, x):
        parent = self.parent
        root = x
        while parent[root] != root:
            root = parent[root]
        while parent[x] != root:
            parent[x], x = root, parent[x]
        return root

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            if rx < ry:
                self.parent[ry] = rx
            else:
                self.parent[rx] = ry


@dataclass(frozen=True)
class EdgeClass:
    id: int
    slots: tuple          # (tet, edge index) incidences, sorted
    valence: int
    distinct_tets: int
    endpoints: tuple      # vertex class ids at the two ends of the first slot

    @property
    def is_loop(self):
        return self.endpoints[0] == self.endpoints[1]


@dataclass(frozen=True)
class VertexClass:
    id: int
    corners: tuple        # (tet, corner) incidences, sorted
    link_euler: int


class Classes:
    """Edge and vertex classes of a triangulation, plus slot lookup tables."""

    def __init__(self, edges, vertices, edge_of, edge_sign, vertex_of, valid_edges):
        self.edges = edges
        self.vertices = vertices
        self.edge_of = edge_of        # (tet, edge index) -> class id
        self.edge_sign = edge_sign    # (tet, edge index) -> +1/-1 against class direction
        self.vertex_of = vertex_of    # (tet, corner) -> class id
        self.valid_edges = valid_edges

    def __iter__(self):
        return iter((self.edges, self.vertices))


class Triangulation:
    """Face pairing of ``n`` tetrahedra.

    ``gluings[t][f]`` is ``(neighbour, perm)`` or ``None`` for an unglued face.
    Instances are treated as immutable.
    """

    __slots__ = ("n", "gluings", "__dict__")

    def __init__(self, gluings, check=True):
        self.gluings = tuple(
            tuple(None if g is None else (int(g[0]), tuple(g[1])) for g in row)
            for row in gluings
        )
        self.n = len(self.gluings)
        if check:
            self._check_involution()

    def _check_involution(self):
        for t, row in enumerate(self.gluings):
            if len(row) != 4:
                raise StructureError(f"tetrahedron {t} does not have 4 faces")
            for f, g in enumerate(row):
                if g is None:
                    continue
                nb, p = g
                if not 0 <= nb < self.n or sorted(p) != [0, 1, 2, 3]:
                    raise StructureError(f"bad gluing at ({t}, {f})")
                back = self.gluings[nb][p[f]]
                if back is None or back[0] != t or compose(back[1], p) != (0, 1, 2, 3):
                    raise StructureError(f"gluing at ({t}, {f}) is not an involution")

    # -- basic predicates -------------------------------------------------

    @property
    def is_closed(self):
        return all(g is not None for row in self.gluings for g in row)

    @property
    def is_oriented(self):
        return all(g is None or PARITY[g[1]] == 1 for row in self.gluings for g in row)

    def face_pairs(self):
        """Each glued face once, as ``(t, f, nb, g, perm)`` with ``(t, f) <= (nb, g)``."""
        out = []
        for t, row in enumerate(self.gluings):
            for f, gl in enumerate(row):
                if gl is None:
                    continue
                nb, p = gl
                if (t, f) <= (nb, p[f]):
                    out.append((t, f, nb, p[f], p))
        return out

    def __eq__(self, other):
        return isinstance(other, Triangulation) and self.gluings == other.gluings

    def __hash__(self):
        return hash(self.gluings)

    def __repr__(self):
        return f"Triangulation(n={self.n})"

    # -- classes ------------------------------------------------------------

    @cached_property
    def classes(self):
        return compute_classes(self)

    def edge_walk(self, t, a, b):
        """Cyclic walk of ``(tet, a, b, exit face)`` states around the edge ``ab`` of ``t``.

        Consecutive states are related by crossing the exit face.  The walk
        follows the orientation given by the ordered pair ``(a, b)`` together
        with the orientation of ``t``.
        """
        c, d = other_two(a, b)
        # exit through the face whose crossing turns positively about a->b
        if PARITY[(a, b, c, d)] == 1:
            c, d = d, c
        start = (t, a, b, c)
        state = start
        out = []
        while True:
            out.append(state)
            t, a, b, c = state
            d = 6 - a - b - c
            g = self.gluings[t][c]
            if g is None:
                raise StructureError("edge walk reached an unglued face")
            nb, p = g
            state = (nb, p[a], p[b], p[d])
            if state == start:
                return out
            if len(out) > 6 * self.n:
                raise StructureError("edge walk did not close up")


def compute_classes(tri):
    """Partition edge slots and corners of ``tri`` into classes.

    Classes are numbered by their smallest incidence.  Link Euler
    characteristics are computed from the corner triangles; edges identified
    with themselves in reverse are reported through ``valid_edges``.
    """
    n = tri.n
    edge_uf = _UnionFind(6 * n)
    corner_uf = _UnionFind(4 * n)
    end_uf = _UnionFind(16 * n)          # edge end (t, c, d): t*16 + c*4 + d
    for t, row in enumerate(tri.gluings):
        for f, g in enumerate(row):
            if g is None:
                continue
            nb, p = g
            fc = face_corners(f)
            for c in fc:
                corner_uf.union(4 * t + c, 4 * nb + p[c])
                for d in fc:
                    if d != c:
                        end_uf.union(16 * t + 4 * c + d, 16 * nb + 4 * p[c] + p[d])
            for i, j in ((fc[0], fc[1]), (fc[0], fc[2]), (fc[1], fc[2])):
                edge_uf.union(6 * t + EDGE_INDEX[i, j], 6 * nb + EDGE_INDEX[p[i], p[j]])

    # vertex classes
    vroots = {}
    vmembers = []
    for s in range(4 * n):
        r = corner_uf.find(s)
        if r not in vroots:
            vroots[r] = len(vmembers)
            vmembers.append([])
        vmembers[vroots[r]].append(divmod(s, 4))
    vertex_of = {}
    for vid, members in enumerate(vmembers):
        for tc in members:
            vertex_of[tc] = vid

    # link vertices are classes of edge ends
    end_class_vertex = {}
    for t in range(n):
        for c in range(4):
            for d in range(4):
                if c != d:
                    r = end_uf.find(16 * t + 4 * c + d)
                    end_class_vertex[r] = vertex_of[t, c]
    link_verts = [0] * len(vmembers)
    for vid in end_class_vertex.values():
        link_verts[vid] += 1
    vertices = []
    for vid, members in enumerate(vmembers):
        faces = len(members)
        # closed links have 3F/2 edges; open ones are flagged by a half-integer
        euler = link_verts[vid] - (3 * faces) / 2 + faces
        vertices.append(VertexClass(vid, tuple(members),
                                    int(euler) if euler == int(euler) else euler))

    # edge classes with orientation relative to the first slot
    eroots = {}
    emembers = []
    for s in range(6 * n):
        r = edge_uf.find(s)
        if r not in eroots:
            eroots[r] = len(emembers)
            emembers.append([])
        emembers[eroots[r]].append(divmod(s, 6))
    edge_of = {}
    edge_sign = {}
    edges = []
    valid = True
    for eid, members in enumerate(emembers):
        t0, e0 = members[0]
        a0, b0 = EDGES[e0]
        head = end_uf.find(16 * t0 + 4 * a0 + b0)
        tail = end_uf.find(16 * t0 + 4 * b0 + a0)
        if head == tail:
            valid = False
        for t, e in members:
            edge_of[t, e] = eid
            a, b = EDGES[e]
            edge_sign[t, e] = 1 if end_uf.find(16 * t + 4 * a + b) == head else -1
        endpoints = (vertex_of[t0, a0], vertex_of[t0, b0])
        edges.append(EdgeClass(eid, tuple(members), len(members),
                               len({t for t, _ in members}), endpoints))
    return Classes(edges, vertices, edge_of, edge_sign, vertex_of, valid)


def is_closed_orientable(tri):
    """True iff ``tri`` is a closed orientable 3-manifold with its reference orientation."""
    if not tri.is_closed or not tri.is_oriented:
        return False
    cls = tri.classes
    if not cls.valid_edges:
        return False
    return all(v.link_euler == 2 for v in cls.vertices)


def is_connected(tri):
    seen = {0}
    stack = [0]
    while stack:
        t = stack.pop()
        for g in tri.gluings[t]:
            if g is not None and g[0] not in seen:
                seen.add(g[0])
                stack.append(g[0])
    return len(seen) == tri.n


class MarkedTriangulation:
    """A triangulation with a set of marked edge classes (the embedded graph)."""

    __slots__ = ("tri", "marked", "__dict__")

    def __init__(self, tri, marked=()):
        self.tri = tri
        self.marked = frozenset(int(e) for e in marked)
        num = len(tri.classes.edges)
        for e in self.marked:
            if not 0 <= e < num:
                raise StructureError(f"marked edge class {e} does not exist")

    @property
    def n(self):
        return self.tri.n

    @property
    def classes(self):
        return self.tri.classes

    def marked_degrees(self):
        deg = [0] * len(self.classes.vertices)
        for e in self.marked:
            u, v = self.classes.edges[e].endpoints
            deg[u] += 1
            deg[v] += 1
        return deg

    @cached_property
    def signature(self):
        return iso_signature(self.tri, self.marked)

    def __repr__(self):
        return f"MarkedTriangulation(n={self.n}, marked={sorted(self.marked)})"


# -- isomorphism signatures ------------------------------------------------------

def _canonical_code(tri, start, sigma):
    """Breadth-first relabelling from ``start`` with corner map ``sigma``.

    Returns the code and the tetrahedron/corner maps used.
    """
    n = tri.n
    new_index = {start: 0}
    corner_map = {start: sigma}          # old corner -> new corner
    order = [start]
    code = []
    i = 0
    while i < len(order):
        t = order[i]
        s = corner_map[t]
        s_inv = INVERSE[s]
        for new_f in range(4):
            f = s_inv[new_f]
            g = tri.gluings[t][f]
            if g is None:
                code.append(-1)
                continue
            nb, p = g
            if nb not in new_index:
                new_index[nb] = len(order)
                order.append(nb)
                # neighbour labelled so that the gluing reads as the identity
                # on the shared face and sends new_f to itself
                corner_map[nb] = compose(s, INVERSE[p])
            code.append(new_index[nb])
            code.extend(compose(corner_map[nb], compose(p, s_inv)))
        i += 1
    if len(order) != n:
        raise StructureError("triangulation is not connected")
    return tuple(code), new_index, corner_map


def iso_signature(tri, marked=()):
    """Canonical string for a (marked) triangulation up to combinatorial isomorphism.

    Minimises over every start tetrahedron and all 24 corner relabellings; the
    marked edge classes are appended as their smallest slots under the
    minimising labelling.
    """
    marked = sorted(marked)
    cls = tri.classes if marked else None
    best = None
    for start in range(tri.n):
        for sigma in ALL_PERMS:
            code, new_index, corner_map = _canonical_code(tri, start, sigma)
            if best is not None and code > best[0]:
                continue
            mcode = ()
            if marked:
                slots = []
                for e in marked:
                    best_slot = None
                    for t, ei in cls.edges[e].slots:
                        a, b = EDGES[ei]
                        s = corner_map[t]
                        slot = (new_index[t], EDGE_INDEX[s[a], s[b]])
                        if best_slot is None or slot < best_slot:
                            best_slot = slot
                    slots.append(best_slot)
                mcode = tuple(sorted(slots))
            key = (code, mcode)
            if best is None or key < best:
                best = key
    code, mcode = best
    text = f"{tri.n}:" + ".".join(str(x) for x in code)
    if mcode:
        text += "|" + ".".join(f"{t}-{e}" for t, e in mcode)
    return text


def relabel(tri, tet_perm, corner_perms, marked=()):
    """Relabel tetrahedra by ``tet_perm`` (old -> new) and corners by ``corner_perms[old]``.

    Returns the new triangulation and the image of ``marked``.
    """
    n = tri.n
    rows = [None] * n
    for t in range(n):
        s = corner_perms[t]
        row = [None] * 4
        for f in range(4):
            g = tri.gluings[t][f]
            if g is None:
                continue
            nb, p = g
            row[s[f]] = (tet_perm[nb], compose(corner_perms[nb], compose(p, INVERSE[s])))
        rows[tet_perm[t]] = row
    new = Triangulation(rows)
    new_marked = []
    if marked:
        cls = tri.classes
        ncls = new.classes
        for e in marked:
            t, ei = cls.edges[e].slots[0]
            a, b = EDGES[ei]
            s = corner_perms[t]
            new_marked.append(ncls.edge_of[tet_perm[t], EDGE_INDEX[s[a], s[b]]])
    return new, frozenset(new_marked)


# -- efficiency and graph structure ------------------------------------------------

@dataclass(frozen=True)
class EmbeddedGraph:
    """Abstract structure of the marked graph of an efficient triangulation."""

    vertices: tuple       # vertex class ids of trivalent vertices
    edges: tuple          # (u, v) per marked class between trivalent vertices, sorted
    knots: tuple          # vertex class ids carrying one knot component each
    edge_classes: tuple   # marked edge class ids, same order as ``edges``
    knot_edges: tuple     # marked loop class id per knot component


def check_efficient(mt, require_nonempty=True):
    """Return the :class:`EmbeddedGraph` if ``mt`` is efficient, else ``None``."""
    if require_nonempty and not mt.marked:
        return None
    cls = mt.classes
    deg = mt.marked_degrees()
    if any(d not in (2, 3) for d in deg):
        return None
    loops_at = {}
    for e in mt.marked:
        ec = cls.edges[e]
        if ec.is_loop:
            loops_at.setdefault(ec.endpoints[0], []).append(e)
    knots = []
    knot_edges = []
    for v, d in enumerate(deg):
        if d == 2:
            if len(loops_at.get(v, ())) != 1:
                return None
            knots.append(v)
            knot_edges.append(loops_at[v][0])
    trivalent = tuple(v for v, d in enumerate(deg) if d == 3)
    items = []
    for e in sorted(mt.marked):
        if e in knot_edges:
            continue
        u, v = cls.edges[e].endpoints
        items.append(((min(u, v), max(u, v)), e))
    items.sort()
    return EmbeddedGraph(trivalent, tuple(x for x, _ in items), tuple(knots),
                         tuple(e for _, e in items), tuple(knot_edges))


def canonical_multigraph(vertices, edges):
    """Canonical form of a small multigraph (loops allowed) under vertex relabelling."""
    vertices = list(vertices)
    index = {v: i for i, v in enumerate(vertices)}
    best = None
    for perm in permutations(range(len(vertices))):
        form = tuple(sorted(
            tuple(sorted((perm[index[u]], perm[index[v]]))) for u, v in edges))
        if best is None or form < best:
            best = form
    return (len(vertices), best or ())


# Connected trivalent multigraphs with 2 and 4 vertices that receive names.
GRAPH_TYPE_FORMS = {
    (2, ((0, 1), (0, 1), (0, 1))): "2t",
    (2, ((0, 0), (0, 1), (1, 1))): "2h",
    # complete graph K4
    (4, ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))): "4a",
    # four-cycle with two opposite edges doubled
    (4, ((0, 1), (0, 1), (0, 2), (1, 3), (2, 3), (2, 3))): "4b",
    # triangle with one doubled side and a pendant loop
    (4, ((0, 0), (0, 1), (1, 2), (1, 3), (2, 3), (2, 3))): "4c",
}


def graph_type(structure):
    """Name of the abstract graph type of an :class:`EmbeddedGraph`."""
    if not structure.vertices:
        return {1: "knot", 2: "link2"}.get(len(structure.knots), "other")
    if structure.knots:
        return "other"
    form = canonical_multigraph(structure.vertices, structure.edges)
    return GRAPH_TYPE_FORMS.get(form, "other")


# -- fixture text format --------------------------------------------------------

def format_fixture(tri, marked=None, header="tets"):
    lines = [f"{header} {tri.n}"] if header == "tets" else [header, f"tets {tri.n}"]
    for row in tri.gluings:
        lines.append(" ".join(
            "-" if g is None else f"{g[0]}:{format_perm(g[1])}" for g in row))
    if marked:
        lines.append("marked " + " ".join(str(e) for e in sorted(marked)))
    return "\n".join(lines) + "\n"


def parse_gluing_lines(lines, n):
    rows = []
    for line in lines[:n]:
        parts = line.split()
        if len(parts) != 4:
            raise StructureError(f"expected 4 gluings, got {line!r}")
        row = []
        for part in parts:
            if part == "-":
                row.append(None)
                continue
            try:
                nb, perm = part.split(":")
                row.append((int(nb), parse_perm(perm)))
            except ValueError as exc:
                raise StructureError(f"bad gluing entry {part!r}") from exc
        rows.append(row)
    if len(rows) != n:
        raise StructureError(f"expected {n} tetrahedra, found {len(rows)}")
    return rows


def parse_fixture(text):
    """Parse the one-triangulation text format; returns a MarkedTriangulation."""
    lines = [ln.strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln and not ln.startswith("#")]
    if not lines or not lines[0].startswith("tets"):
        raise StructureError("fixture must start with 'tets N'")
    try:
        n = int(lines[0].split()[1])
    except (IndexError, ValueError) as exc:
        raise StructureError("bad 'tets' header") from exc
    tri = Triangulation(parse_gluing_lines(lines[1:], n))
    marked = ()
    for extra in lines[1 + n:]:
        if extra.startswith("marked"):
            marked = [int(x) for x in extra.split()[1:]]
        else:
            raise StructureError(f"unexpected line {extra!r}")
    return MarkedTriangulation(tri, marked)


def load_fixture(path):
    with open(path) as fh:
        return parse_fixture(fh.read())


def save_fixture(mt, path):
    with open(path, "w") as fh:
        fh.write(format_fixture(mt.tri, mt.marked))
