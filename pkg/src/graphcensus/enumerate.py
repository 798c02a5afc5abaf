"""Enumeration of 4-valent graphs, face pairings and efficient markings.

A triangulation of a closed manifold by ``n`` tetrahedra has a dual graph
that is 4-valent with ``n`` vertices.  Each vertex carries a bijection from
its half-edges to the faces of its tetrahedron; only the parity of that
bijection matters once every gluing is required to reverse orientation,
leaving three gluings per graph edge.
"""

from collections import deque
from dataclasses import dataclass
from itertools import permutations, product

from .perm import ODD_PERMS, PARITY, INVERSE
from .spine import forced_marked
from .triangulation import (
    MarkedTriangulation, Triangulation, check_efficient, is_closed_orientable,
    iso_signature,
)

MAX_N = 5


def _check_n(n):
    if not 1 <= n <= MAX_N:
        raise ValueError(f"n must lie in 1..{MAX_N}, got {n}")


@dataclass(frozen=True)
class QuadGraph:
    """Connected 4-valent multigraph; ``orientation[v]`` is a parity bit or None."""

    n: int
    edges: tuple
    orientation: tuple = None

    def half_edges(self):
        """Half-edges ``(edge index, end)`` at each vertex, in a fixed order."""
        out = [[] for _ in range(self.n)]
        for i, (u, v) in enumerate(self.edges):
            out[u].append((i, 0))
            out[v].append((i, 1))
        return out


def canonical_form(n, edges):
    best = None
    for perm in permutations(range(n)):
        form = tuple(sorted(tuple(sorted((perm[u], perm[v]))) for u, v in edges))
        if best is None or form < best:
            best = form
    return best


def _connected(n, edges):
    adj = [set() for _ in range(n)]
    for u, v in edges:
        adj[u].add(v)
        adj[v].add(u)
    seen = {0}
    stack = [0]
    while stack:
        for w in adj[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == n


def _degree_completions(n):
    """All 4-regular multigraphs on n labelled vertices, built edge by edge
    from the lowest vertex with missing degree (no repetition of edge lists)."""
    out = []

    def rec(deg, edges):
        u = next((v for v in range(n) if deg[v] < 4), None)
        if u is None:
            out.append(tuple(edges))
            return
        last = edges[-1] if edges and edges[-1][0] == u else None
        for v in range(u, n):
            e = (u, v)
            if last is not None and e < last:
                continue
            need = 2 if u == v else 1
            if deg[u] + need > 4 or (u != v and deg[v] + 1 > 4):
                continue
            deg[u] += need
            if u != v:
                deg[v] += 1
            edges.append(e)
            rec(deg, edges)
            edges.pop()
            deg[u] -= need
            if u != v:
                deg[v] -= 1

    rec([0] * n, [])
    return out


def enumerate_quad_graphs(n):
    """Connected 4-valent multigraphs on ``n`` vertices up to isomorphism."""
    _check_n(n)
    seen = {}
    for edges in _degree_completions(n):
        if not _connected(n, edges):
            continue
        form = canonical_form(n, edges)
        if form not in seen:
            seen[form] = QuadGraph(n, form)
    return [seen[k] for k in sorted(seen)]


def _half_edge_generators(g):
    """Half-edge permutations generating the automorphism group of ``g``.

    Each is returned as ``(vertex map, half-edge map)``.
    """
    n, edges = g.n, g.edges
    by_ends = {}
    for i, e in enumerate(edges):
        by_ends.setdefault(e, []).append(i)
    gens = []
    identity_v = tuple(range(n))
    for perm in permutations(range(n)):
        mapped = {}
        ok = True
        for e, idx in by_ends.items():
            u, v = perm[e[0]], perm[e[1]]
            key = (min(u, v), max(u, v))
            if len(by_ends.get(key, ())) != len(idx):
                ok = False
                break
            for a, b in zip(idx, by_ends[key]):
                if u <= v:
                    mapped[a, 0], mapped[a, 1] = (b, 0), (b, 1)
                else:
                    mapped[a, 0], mapped[a, 1] = (b, 1), (b, 0)
        if ok:
            gens.append((perm, mapped))
    base = {(i, s): (i, s) for i in range(len(edges)) for s in (0, 1)}
    for e, idx in by_ends.items():
        for a, b in zip(idx, idx[1:]):
            m = dict(base)
            m[a, 0], m[a, 1], m[b, 0], m[b, 1] = (b, 0), (b, 1), (a, 0), (a, 1)
            gens.append((identity_v, m))
        if e[0] == e[1]:
            for a in idx:
                m = dict(base)
                m[a, 0], m[a, 1] = (a, 1), (a, 0)
                gens.append((identity_v, m))
    return gens


def _orientation_action(g, gens):
    """For each generator: vertex map and the parity flip it induces at each vertex."""
    halves = g.half_edges()
    pos = {}
    for v, hs in enumerate(halves):
        for k, h in enumerate(hs):
            pos[h] = k
    out = []
    for vmap, hmap in gens:
        flips = []
        for v, hs in enumerate(halves):
            pi = tuple(pos[hmap[h]] for h in hs)
            flips.append(PARITY[pi])
        out.append((vmap, flips))
    return out


def enumerate_oriented_quad_graphs(n, mirror=True):
    """4-valent graphs with a parity at each vertex, up to graph automorphism.

    With ``mirror`` the simultaneous flip of every parity is also allowed; it
    swaps a triangulation with its mirror image.
    """
    _check_n(n)
    out = []
    for g in enumerate_quad_graphs(n):
        action = _orientation_action(g, _half_edge_generators(g))
        if mirror:
            action.append((tuple(range(n)), [1] * n))
        seen = set()
        for o in product((0, 1), repeat=n):
            if o in seen:
                continue
            orbit = {o}
            queue = deque([o])
            while queue:
                cur = queue.popleft()
                for vmap, flips in action:
                    img = [0] * n
                    for v in range(n):
                        img[vmap[v]] = cur[v] ^ flips[v]
                    img = tuple(img)
                    if img not in orbit:
                        orbit.add(img)
                        queue.append(img)
            seen |= orbit
            out.append(QuadGraph(n, g.edges, min(orbit)))
    return out


# -- face pairings -------------------------------------------------------------------

def _face_assignment(g):
    """Face of the tetrahedron attached to each half-edge."""
    faces = {}
    for v, hs in enumerate(g.half_edges()):
        order = [0, 1, 2, 3]
        if g.orientation and g.orientation[v]:
            order[2], order[3] = order[3], order[2]
        for k, h in enumerate(hs):
            faces[h] = order[k]
    return faces


def _odd_with(f, target):
    return [p for p in ODD_PERMS if p[f] == target]


def raw_gluings(g):
    """All 9^n orientation-reversing face pairings on an oriented graph."""
    faces = _face_assignment(g)
    choices = []
    for i, (u, v) in enumerate(g.edges):
        choices.append(_odd_with(faces[i, 0], faces[i, 1]))
    for pick in product(*choices):
        rows = [[None] * 4 for _ in range(g.n)]
        for i, ((u, v), p) in enumerate(zip(g.edges, pick)):
            fu, fv = faces[i, 0], faces[i, 1]
            rows[u][fu] = (v, p)
            rows[v][fv] = (u, INVERSE[p])
        yield Triangulation(rows, check=False)


def enumerate_gluings(g, stats=None):
    """Closed orientable triangulations on ``g``, one per isomorphism class."""
    seen = {}
    raw = 0
    for tri in raw_gluings(g):
        raw += 1
        if not is_closed_orientable(tri):
            continue
        sig = iso_signature(tri)
        if sig not in seen:
            seen[sig] = tri
    if stats is not None:
        stats["raw"] = stats.get("raw", 0) + raw
        stats["closed"] = stats.get("closed", 0) + len(seen)
    return [seen[k] for k in sorted(seen)]


# -- markings ----------------------------------------------------------------------

def enumerate_markings(tri, prune=True, stats=None):
    """Efficient markings of ``tri`` with no unmarked collapsible edge.

    With ``prune`` the forced edges are fixed before subset enumeration;
    without it every subset is tried and filtered afterwards.
    """
    cls = tri.classes
    ids = [ec.id for ec in cls.edges]
    forced = forced_marked(tri)
    free = [e for e in ids if e not in forced] if prune else ids
    out = []
    tried = 0
    for bits in product((0, 1), repeat=len(free)):
        marked = {e for e, b in zip(free, bits) if b}
        if prune:
            marked |= forced
        tried += 1
        if not marked:
            continue
        if not prune and not forced <= marked:
            continue
        mt = MarkedTriangulation(tri, marked)
        if check_efficient(mt) is None:
            continue
        out.append(mt)
    if stats is not None:
        stats["markings_tried"] = stats.get("markings_tried", 0) + tried
        stats["efficient"] = stats.get("efficient", 0) + len(out)
    return out
