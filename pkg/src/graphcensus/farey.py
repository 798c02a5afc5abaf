"""Farey tessellation paths, layered lens-space triangulations and torus-knot data.

A slope is a pair ``(num, den)`` of coprime integers with ``den >= 0`` and
``1/0`` standing for infinity.  A Farey path from ``0/1`` to ``p/q`` is a
sequence of triangles ``f1..fk`` of the tessellation with consecutive
triangles sharing an edge, ``0/1`` a vertex of ``f1`` but not of ``f2`` and
``p/q`` a vertex of ``fk`` but not of ``f(k-1)``.
"""

from collections import deque
from dataclasses import dataclass
from math import gcd

from .perm import EDGES, EDGE_INDEX, INVERSE, PARITY
from .triangulation import MarkedTriangulation, Triangulation

ZERO = (0, 1)
INFINITY = (1, 0)


class FareyError(ValueError):
    pass


def slope(num, den=None):
    """Normalise a slope given as ``(num, den)`` or two integers."""
    if den is None:
        num, den = num
    num, den = int(num), int(den)
    g = gcd(num, den)
    if g == 0:
        raise FareyError("0/0 is not a slope")
    if g != 1:
        raise FareyError(f"{num}/{den} is not in lowest terms")
    if den < 0 or (den == 0 and num < 0):
        num, den = -num, -den
    return (num, den)


def _norm(v):
    num, den = v
    if den < 0 or (den == 0 and num < 0):
        return (-num, -den)
    return (num, den)


def format_slope(s):
    return f"{s[0]}/{s[1]}"


def is_farey_neighbor(s1, s2):
    return abs(s1[0] * s2[1] - s1[1] * s2[0]) == 1


def is_farey_triangle(tri):
    a, b, c = tri
    return is_farey_neighbor(a, b) and is_farey_neighbor(b, c) and is_farey_neighbor(a, c)


def triangle(a, b, c):
    return frozenset((a, b, c))


def third_vertices(a, b):
    """The two slopes forming a Farey triangle with the edge ``{a, b}``."""
    return (_norm((a[0] + b[0], a[1] + b[1])), _norm((a[0] - b[0], a[1] - b[1])))


def across(tri, a, b):
    """The triangle sharing edge ``{a, b}`` with ``tri``."""
    (c,) = tri - {a, b}
    u, v = third_vertices(a, b)
    return triangle(a, b, v if u == c else u)


def neighbors(tri):
    a, b, c = sorted(tri)
    return [across(tri, a, b), across(tri, a, c), across(tri, b, c)]


def triangles_at(s, bound):
    """Farey triangles with vertex ``s`` whose vertices stay within ``bound``."""
    # neighbours of s are r + j*s for a fixed neighbour r
    if s == ZERO:
        r = (1, 0)
    elif s == INFINITY:
        r = (0, 1)
    else:
        r = _bezout_neighbor(s)
    out = []
    limit = 2 * bound + 2
    for j in range(-limit, limit + 1):
        u = _norm((r[0] + j * s[0], r[1] + j * s[1]))
        w = _norm((r[0] + (j + 1) * s[0], r[1] + (j + 1) * s[1]))
        if _height(u) <= bound and _height(w) <= bound:
            out.append(triangle(s, u, w))
    return out


def _height(s):
    return max(abs(s[0]), abs(s[1]))


def _bezout_neighbor(s):
    a, b = s
    # find (c, d) with a*d - b*c = 1
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        k = old_r // r
        old_r, r = r, old_r - k * r
        old_x, x = x, old_x - k * x
        old_y, y = y, old_y - k * y
    # old_x*a + old_y*b = +-1
    sign = 1 if old_r == 1 else -1
    c, d = -old_y * sign, old_x * sign
    assert a * d - b * c == 1
    return _norm((c, d))


@dataclass(frozen=True)
class FareyPath:
    triangles: tuple      # frozensets of three slopes
    target: tuple         # p/q

    @property
    def k(self):
        return len(self.triangles)


def _search(target, via, bound, min_length):
    starts = triangles_at(ZERO, bound)
    # state: (triangle, via seen, previous triangle contains target, first)
    queue = deque()
    seen = set()
    for t in starts:
        st = (t, via is None or via in t, False, True)
        queue.append((st, 1, None))
        seen.add((st, 1 if min_length > 1 else 0))
    parents = {}
    while queue:
        st, level, parent = queue.popleft()
        parents[st, level] = parent
        tri, have_via, prev_has, first = st
        if have_via and target in tri and not prev_has and level >= min_length:
            path = []
            key = (st, level)
            while key is not None:
                path.append(key[0][0])
                key = parents[key]
            return FareyPath(tuple(reversed(path)), target)
        for nxt in neighbors(tri):
            if first and ZERO in nxt:
                continue
            if any(_height(s) > bound for s in nxt):
                continue
            nst = (nxt, have_via or (via in nxt), target in tri, False)
            lvl = level + 1
            key = (nst, lvl if lvl < min_length else 0)
            if key in seen:
                continue
            seen.add(key)
            queue.append((nst, lvl, (st, level)))
    return None


def shortest_path(p, q, via=None, min_length=1, bound=None):
    """Shortest Farey path from ``0/1`` to ``p/q``, through ``via`` if given.

    Returns ``(k, path)``.  The search is breadth-first inside a box of slopes
    of bounded height; the box doubles until a path is found.
    """
    target = slope(p, q)
    via = None if via is None else slope(via)
    if bound is None:
        bound = max(_height(target), _height(via) if via else 1, 2) + 2
    tries = 0
    while True:
        path = _search(target, via, bound, min_length)
        if path is not None:
            return path.k, path
        bound *= 2
        tries += 1
        if tries > 12:
            raise FareyError(f"no Farey path found within bound {bound}")


def lam(l, m, p, q):
    """Length of the shortest Farey path from 0/1 to p/q containing l/m."""
    return shortest_path(p, q, via=(l, m))[0]


def torus_knot_group_params(l, m, p, q):
    return abs(l), abs(p * m - q * l)


def is_irreducible_torus_knot(l, m, p, q):
    if (l == 0 or p * m - q * l == 0) and q != 0:
        return False
    if abs(l) <= 2 and p == 0:
        return False
    return True


def complexity_upper_bound(l, m, p, q):
    return max(lam(l, m, p, q) - 3, 0)


# -- layered triangulations --------------------------------------------------------

# Corners of a layered tetrahedron: faces 3 and 2 (corners 012, 013) lie on the
# lower torus and share the flipped edge 01; faces 0 and 1 (123, 023) lie on
# the upper torus and share the new edge 23.  Opposite edges 12/03 and 02/13
# carry the two slopes kept by the flip.


def _tet_labels(flipped, new, keep, bit):
    e1, e2 = keep if bit == 0 else keep[::-1]
    lab = {(0, 1): flipped, (2, 3): new, (1, 2): e1, (0, 3): e1, (0, 2): e2, (1, 3): e2}
    return [lab[e] for e in EDGES]


def _face_edges(labels, f):
    """Map slope -> corner opposite that slope's edge within face ``f``."""
    corners = [c for c in range(4) if c != f]
    out = {}
    for c in corners:
        a, b = [x for x in corners if x != c]
        out[labels[EDGE_INDEX[a, b]]] = c
    return out


def _face_map(labels_src, f, labels_dst, g, slope_map):
    """Corner bijection from face ``f`` to face ``g`` sending edges by ``slope_map``."""
    src = _face_edges(labels_src, f)
    dst = _face_edges(labels_dst, g)
    if len(src) != 3 or len(dst) != 3:
        return None
    perm = [None] * 4
    for s, c in src.items():
        t = slope_map.get(s, s)
        if t not in dst:
            return None
        perm[c] = dst[t]
    perm[f] = g
    return tuple(perm)


def build_layered(path, knot_slope):
    """Layered triangulation of the lens space of ``path`` with ``knot_slope`` marked.

    Returns ``(MarkedTriangulation, labels)`` where ``labels[t]`` lists the
    slope carried by each of the six edges of tetrahedron ``t``.
    """
    tris = path.triangles
    k = len(tris)
    if k < 4:
        raise FareyError("a layered triangulation needs a path of at least 4 triangles")
    knot_slope = slope(knot_slope)
    if knot_slope in (ZERO, path.target):
        raise FareyError("the knot slope bounds a meridian disc")
    if not any(knot_slope in f for f in tris[1:-1]):
        raise FareyError("knot slope is not a vertex of the path")
    n = k - 3
    flips = []
    for j in range(n):
        lower, upper = tris[j + 1], tris[j + 2]
        (flipped,) = lower - upper
        (new,) = upper - lower
        keep = tuple(sorted(lower & upper))
        flips.append((flipped, new, keep))

    # bottom fold: fix the vertex of f2 outside f1, swap the other two
    (z,) = tris[1] - tris[0]
    x, y = sorted(tris[0] & tris[1])
    bottom_map = {x: y, y: x, z: z}
    (zt,) = tris[-2] - tris[-1]
    xt, yt = sorted(tris[-2] & tris[-1])
    top_map = {xt: yt, yt: xt, zt: zt}

    def attempt(j, used, rows):
        # used: slope labels of the tetrahedra placed so far
        if j == n:
            return rows, used
        for bit in (0, 1):
            labels = _tet_labels(*flips[j], bit)
            new_rows = [list(r) for r in rows] + [[None] * 4]
            row = new_rows[j]
            if j == 0:
                p = _face_map(labels, 3, labels, 2, bottom_map)
                if p is None or PARITY[p] != 1:
                    continue
                row[3] = (0, p)
                row[2] = (0, INVERSE[p])
            else:
                ok = False
                for g0, g1 in ((3, 2), (2, 3)):
                    p0 = _face_map(used[-1], 0, labels, g0, {})
                    p1 = _face_map(used[-1], 1, labels, g1, {})
                    if p0 and p1 and PARITY[p0] == 1 and PARITY[p1] == 1:
                        new_rows[j - 1][0] = (j, p0)
                        new_rows[j - 1][1] = (j, p1)
                        row[g0] = (j - 1, INVERSE[p0])
                        row[g1] = (j - 1, INVERSE[p1])
                        ok = True
                        break
                if not ok:
                    continue
            if j == n - 1:
                p = _face_map(labels, 0, labels, 1, top_map)
                if p is None or PARITY[p] != 1:
                    continue
                row[0] = (j, p)
                row[1] = (j, INVERSE[p])
            result = attempt(j + 1, used + [labels], new_rows)
            if result is not None:
                return result
        return None

    result = attempt(0, [], [])
    if result is None:
        raise FareyError("no orientation-consistent layering found")
    rows, labels_all = result
    tri = Triangulation(rows)
    cls = tri.classes
    if len(cls.vertices) != 1 or len(cls.edges) != k - 2:
        raise FareyError("path does not give a one-vertex layered triangulation")
    marked = {cls.edge_of[t, e] for t, labels in enumerate(labels_all)
              for e, s in enumerate(labels) if s == knot_slope}
    if len(marked) != 1:
        raise FareyError("knot slope does not give a single edge class")
    return MarkedTriangulation(tri, marked), labels_all


def layered_pair(l, m, p, q, max_extra=4):
    """Shortest buildable layered triangulation of (L(p,q), K(l,m)).

    Paths that fold back onto their first triangle can give a degenerate
    complex; the minimum length is then raised until a build succeeds.
    """
    k0 = None
    for extra in range(max_extra + 1):
        k, path = shortest_path(p, q, via=(l, m), min_length=max(4, (k0 or 4) + extra))
        k0 = k0 or k
        try:
            mt, _ = build_layered(path, (l, m))
            return mt, path
        except FareyError:
            continue
    raise FareyError(f"no layered triangulation found for K({l},{m}) in L({p},{q})")
