"""Group presentations from the dual spine, homology, and recognisers.

Words are tuples of non-zero integers: ``i`` stands for generator ``i`` and
``-i`` for its inverse, with generators numbered from 1.
"""

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import permutations, product

from .perm import EDGES, EDGE_INDEX, face_corners
from .triangulation import StructureError, check_efficient, graph_type

TIETZE_BUDGET = 10000
LENGTH_CAP = 512


# -- words -------------------------------------------------------------------

def free_reduce(word):
    out = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def cyclic_reduce(word):
    w = list(free_reduce(word))
    i, j = 0, len(w) - 1
    while i < j and w[i] == -w[j]:
        i += 1
        j -= 1
    return tuple(w[i:j + 1])


def invert(word):
    return tuple(-x for x in reversed(word))


def rotations(word):
    return [word[i:] + word[:i] for i in range(len(word))] or [word]


def canonical_cyclic(word):
    """Least rotation of the word or of its inverse."""
    if not word:
        return ()
    return min(rotations(word) + rotations(invert(word)))


def syllables(word):
    """Cyclic syllable decomposition ``[(generator, exponent), ...]`` of a reduced word."""
    if not word:
        return []
    w = list(word)
    if len(set(abs(x) for x in w)) > 1:
        # rotate so the word does not start in the middle of a syllable
        while abs(w[0]) == abs(w[-1]):
            w = w[1:] + w[:1]
    out = []
    for x in w:
        if out and out[-1][0] == abs(x):
            out[-1][1] += 1 if x > 0 else -1
        else:
            out.append([abs(x), 1 if x > 0 else -1])
    return [tuple(s) for s in out]


def _letter(i):
    if 1 <= i <= 26:
        return chr(ord("a") + i - 1)
    return f"x{i}"


def format_word(word):
    return " ".join(_letter(x) if x > 0 else _letter(-x).upper() for x in word)


def _parse_letter(tok):
    if tok.startswith(("x", "X")) and len(tok) > 1:
        i = int(tok[1:])
        return i if tok[0] == "x" else -i
    if len(tok) != 1 or not tok.isalpha():
        raise ValueError(f"bad letter {tok!r}")
    i = ord(tok.lower()) - ord("a") + 1
    return i if tok.islower() else -i


class GroupPresentation:
    """Finite presentation with ``g`` generators and a list of relator words."""

    def __init__(self, g, relators, flags=()):
        self.g = g
        self.relators = [free_reduce(tuple(r)) for r in relators]
        self.flags = tuple(flags)
        for r in self.relators:
            for x in r:
                if x == 0 or abs(x) > g:
                    raise ValueError(f"letter {x} outside 1..{g}")

    def __repr__(self):
        return f"GroupPresentation({self.format()!r})"

    def __eq__(self, other):
        return (isinstance(other, GroupPresentation) and self.g == other.g
                and self.relators == other.relators)

    def format(self):
        parts = [f"gens {self.g}"] + [f"rel {format_word(r)}" for r in self.relators]
        return "; ".join(parts)

    @classmethod
    def parse(cls, text):
        parts = [p.strip() for p in text.split(";") if p.strip()]
        if not parts or not parts[0].startswith("gens"):
            raise ValueError("presentation must start with 'gens G'")
        g = int(parts[0].split()[1])
        rels = []
        for p in parts[1:]:
            if not p.startswith("rel"):
                raise ValueError(f"bad clause {p!r}")
            rels.append(tuple(_parse_letter(t) for t in p.split()[1:]))
        return cls(g, rels)

    def profile(self):
        return (self.g, tuple(sorted(len(r) for r in self.relators)))


# -- the dual spine -----------------------------------------------------------------

class DualComplex:
    """Dual cell structure: tetrahedra, faces and regions (one per edge class)."""

    def __init__(self, tri):
        self.tri = tri
        self.faces = tri.face_pairs()
        self.face_index = {}
        for i, (t, f, nb, g, _) in enumerate(self.faces):
            self.face_index[t, f] = (i, 1)
            self.face_index[nb, g] = (i, -1)
        cls = tri.classes
        self.region_words = []
        for ec in cls.edges:
            t, e = ec.slots[0]
            a, b = EDGES[e]
            word = []
            for (tt, _, _, c) in tri.edge_walk(t, a, b):
                word.append(self.crossing(tt, c))
            self.region_words.append(tuple(word))

    def crossing(self, t, f):
        """Signed face index (1-based) for leaving tetrahedron ``t`` through face ``f``."""
        i, s = self.face_index[t, f]
        return s * (i + 1)

    def spanning_tree(self):
        tri = self.tri
        seen = {0}
        tree = set()
        queue = deque([0])
        while queue:
            t = queue.popleft()
            for f in range(4):
                g = tri.gluings[t][f]
                if g is None:
                    continue
                nb = g[0]
                if nb not in seen:
                    seen.add(nb)
                    tree.add(self.face_index[t, f][0])
                    queue.append(nb)
        if len(seen) != tri.n:
            raise StructureError("dual graph is disconnected")
        return tree

    def boundary_matrix(self):
        """Rows: faces; columns: regions; entries: signed crossing counts."""
        m = [[0] * len(self.region_words) for _ in self.faces]
        for r, word in enumerate(self.region_words):
            for x in word:
                m[abs(x) - 1][r] += 1 if x > 0 else -1
        return m


def spine_presentation(mt, drop_marked=False):
    """Presentation of the fundamental group of M, or of the complement when ``drop_marked``."""
    return _spine_words(mt, drop_marked)[0]


def complement_presentation(mt):
    """Presentation of the complement plus one meridian word per marked edge class.

    The boundary of the spine region pierced by a marked edge is a meridian
    of that edge.
    """
    return _spine_words(mt, True)


def _spine_words(mt, drop_marked):
    tri = mt.tri
    if drop_marked and not mt.marked:
        raise ValueError("the complement presentation needs a nonempty marking")
    dual = DualComplex(tri)
    tree = dual.spanning_tree()
    gen_of = {}
    for i in range(len(dual.faces)):
        if i not in tree:
            gen_of[i] = len(gen_of) + 1
    rels = []
    meridians = []
    for r, word in enumerate(dual.region_words):
        w = []
        for x in word:
            i = abs(x) - 1
            if i in gen_of:
                w.append(gen_of[i] if x > 0 else -gen_of[i])
        w = cyclic_reduce(tuple(w))
        if drop_marked and r in mt.marked:
            meridians.append(w)
        else:
            rels.append(w)
    return GroupPresentation(len(gen_of), rels), meridians


# -- Smith normal form and homology ---------------------------------------------------

def smith_normal_form(matrix):
    """Invariant factors (non-zero diagonal entries) of an integer matrix."""
    a = [list(map(int, row)) for row in matrix]
    rows = len(a)
    cols = len(a[0]) if rows else 0
    diag = []
    r = 0
    for c in range(cols):
        if r >= rows:
            break
        while True:
            # pick the smallest non-zero pivot in the remaining block
            piv = None
            for i in range(r, rows):
                for j in range(c, cols):
                    if a[i][j] and (piv is None or abs(a[i][j]) < abs(a[piv[0]][piv[1]])):
                        piv = (i, j)
            if piv is None:
                return _finish_diag(diag)
            i, j = piv
            a[r], a[i] = a[i], a[r]
            for row in a:
                row[c], row[j] = row[j], row[c]
            p = a[r][c]
            done = True
            for i in range(r + 1, rows):
                q = a[i][c] // p
                if q:
                    a[i] = [x - q * y for x, y in zip(a[i], a[r])]
                if a[i][c]:
                    done = False
            for j in range(c + 1, cols):
                q = a[r][j] // p
                if q:
                    for row in a:
                        row[j] -= q * row[c]
                if a[r][j]:
                    done = False
            if not done:
                continue
            # the pivot must divide the rest of the block
            bad = None
            for i in range(r + 1, rows):
                for j in range(c + 1, cols):
                    if a[i][j] % p:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            a[r] = [x + y for x, y in zip(a[r], a[bad])]
        diag.append(abs(a[r][c]))
        r += 1
    return _finish_diag(diag)


def _finish_diag(diag):
    return sorted(d for d in diag if d)


def homology_from_relations(num_gens, relations):
    """(rank, torsion) of the abelian group with the given relation rows."""
    if num_gens == 0:
        return 0, ()
    diag = smith_normal_form(relations) if relations else []
    rank = num_gens - len(diag)
    return rank, tuple(d for d in diag if d > 1)


def abelianization(p):
    rows = []
    for r in p.relators:
        row = [0] * p.g
        for x in r:
            row[abs(x) - 1] += 1 if x > 0 else -1
        rows.append(row)
    return homology_from_relations(p.g, rows)


def _rank(matrix):
    return len(smith_normal_form(matrix)) if matrix and matrix[0] else 0


def simplicial_h1(tri):
    """H1 of the closed triangulated manifold from its cellular chain complex."""
    cls = tri.classes
    edges = cls.edges
    nv = len(cls.vertices)
    ne = len(edges)
    d2 = []          # one column per face, stored as rows of the transpose
    for (t, f, _, _, _) in tri.face_pairs():
        c0, c1, c2 = face_corners(f)
        col = [0] * ne
        for (a, b), s in (((c1, c2), 1), ((c0, c2), -1), ((c0, c1), 1)):
            e = EDGE_INDEX[a, b]
            col[cls.edge_of[t, e]] += s * cls.edge_sign[t, e]
        d2.append(col)
    d1 = []
    for ec in edges:
        t, e = ec.slots[0]
        a, b = EDGES[e]
        col = [0] * nv
        col[cls.vertex_of[t, b]] += 1
        col[cls.vertex_of[t, a]] -= 1
        d1.append(col)
    rank_d1 = _rank(d1)
    diag = smith_normal_form(d2) if d2 else []
    rank = ne - rank_d1 - len(diag)
    return rank, tuple(d for d in diag if d > 1)


def format_homology(h):
    rank, torsion = h
    parts = ["Z"] * rank + [f"Z/{d}" for d in torsion]
    return " + ".join(parts) if parts else "0"


# -- Tietze simplification -------------------------------------------------------------

def _relabel(g, rels, removed):
    keep = [i for i in range(1, g + 1) if i not in removed]
    new = {old: k + 1 for k, old in enumerate(keep)}
    out = [tuple((new[abs(x)] if x > 0 else -new[abs(x)]) for x in r) for r in rels]
    return len(keep), out


def _relabel_words(g, words, removed):
    return _relabel(g, words, removed)[1]


def _substitute(word, gen, image):
    out = []
    inv = invert(image)
    for x in word:
        if x == gen:
            out.extend(image)
        elif x == -gen:
            out.extend(inv)
        else:
            out.append(x)
    return cyclic_reduce(tuple(out))


def _tidy(rels):
    seen = set()
    out = []
    for r in rels:
        r = cyclic_reduce(r)
        if not r:
            continue
        key = canonical_cyclic(r)
        if key in seen:
            continue
        seen.add(key)
        out.append(r)
    out.sort(key=lambda w: (len(w), canonical_cyclic(w)))
    return out


def _eliminate_once(g, rels):
    """Remove one generator occurring exactly once in some relator.  Returns None if stuck."""
    best = None
    for ri, r in enumerate(rels):
        for gen in set(abs(x) for x in r):
            if sum(1 for x in r if abs(x) == gen) != 1:
                continue
            k = next(i for i, x in enumerate(r) if abs(x) == gen)
            rot = r[k:] + r[:k]
            rest = rot[1:]
            image = invert(rest) if rot[0] > 0 else rest
            others = [s for j, s in enumerate(rels) if j != ri]
            new = [_substitute(s, gen, image) for s in others]
            cost = sum(len(s) for s in new)
            if any(len(s) > LENGTH_CAP for s in new):
                continue
            if best is None or cost < best[0]:
                best = (cost, gen, image, new)
    if best is None:
        return None
    _, gen, image, new = best
    return gen, image, new


def _cyclic_contains(hay, needle):
    """Start index of ``needle`` in the cyclic word ``hay``, or -1."""
    n, m = len(hay), len(needle)
    if m > n:
        return -1
    doubled = hay + hay
    for i in range(n):
        if doubled[i:i + m] == needle:
            return i
    return -1


def _shorten_by(r, s):
    """Use relator ``r`` to shorten ``s``; returns the new ``s`` or None."""
    L = len(r)
    for cand in (r, invert(r)):
        for rot in rotations(cand):
            for m in range(L, L // 2, -1):
                u = rot[:m]
                if 2 * m <= L:
                    break
                pos = _cyclic_contains(s, u)
                if pos < 0:
                    continue
                rest = rot[m:]
                srot = s[pos:] + s[:pos]
                new = cyclic_reduce(invert(rest) + srot[m:])
                if len(new) < len(s):
                    return new
    return None


_AUTOS = (
    lambda a, b: ((1, 2), (2,)),
    lambda a, b: ((1, -2), (2,)),
    lambda a, b: ((2, 1), (2,)),
    lambda a, b: ((-2, 1), (2,)),
    lambda a, b: ((2, 1, -2), (2,)),
    lambda a, b: ((-2, 1, 2), (2,)),
    lambda a, b: ((1,), (2, 1)),
    lambda a, b: ((1,), (2, -1)),
    lambda a, b: ((1,), (1, 2)),
    lambda a, b: ((1,), (-1, 2)),
    lambda a, b: ((1,), (1, 2, -1)),
    lambda a, b: ((1,), (-1, 2, 1)),
)


def _apply_auto(word, images):
    out = []
    for x in word:
        img = images[abs(x) - 1]
        out.extend(img if x > 0 else invert(img))
    return cyclic_reduce(tuple(out))


def _nielsen_reduce(rel):
    """Greedy length reduction of a two-generator relator by elementary automorphisms."""
    changed = True
    while changed:
        changed = False
        for auto in _AUTOS:
            new = _apply_auto(rel, auto(1, 2))
            if len(new) < len(rel):
                rel = new
                changed = True
                break
    return rel


def _min_orbit(rel, limit=4000):
    """Among equal-length automorphic images of a minimal two-generator relator,
    the one with fewest syllables (ties broken canonically)."""
    def score(w):
        return (len(syllables(w)), canonical_cyclic(w))
    start = canonical_cyclic(rel)
    seen = {start}
    queue = deque([start])
    best = start
    while queue and len(seen) < limit:
        w = queue.popleft()
        if score(w) < score(best):
            best = w
        for auto in _AUTOS:
            new = _apply_auto(w, auto(1, 2))
            if len(new) > len(w):
                continue
            key = canonical_cyclic(new)
            if key not in seen:
                seen.add(key)
                queue.append(key)
    return best


def _tietze_core(g, rels, words, budget):
    """Elimination and shortening passes; ``words`` are carried along unchanged in meaning."""
    rels = _tidy(rels)
    words = [cyclic_reduce(tuple(w)) for w in words]
    passes = 0
    flags = []
    while True:
        passes += 1
        if passes > budget:
            flags.append("tietze-budget")
            break
        # a relator of length one kills its generator
        short = next((r for r in rels if len(r) == 1), None)
        if short is not None:
            gen = abs(short[0])
            new = [tuple(x for x in r if abs(x) != gen) for r in rels if r != short]
            words = _relabel_words(g, [cyclic_reduce(tuple(x for x in w if abs(x) != gen))
                                       for w in words], {gen})
            g, rels = _relabel(g, new, {gen})
            rels = _tidy(rels)
            continue
        step = _eliminate_once(g, rels)
        if step is not None:
            gen, image, new = step
            words = _relabel_words(g, [_substitute(w, gen, image) for w in words], {gen})
            g, rels = _relabel(g, new, {gen})
            rels = _tidy(rels)
            continue
        improved = False
        for i, r in enumerate(rels):
            for j, s in enumerate(rels):
                if i == j or len(r) > len(s):
                    continue
                new = _shorten_by(r, s)
                if new is not None:
                    rels = rels[:j] + [new] + rels[j + 1:]
                    improved = True
                    break
            if improved:
                break
        if improved:
            rels = _tidy(rels)
            continue
        break
    return g, rels, words, flags


def tietze_simplify(p, budget=TIETZE_BUDGET):
    """Simplify a presentation by Tietze moves; the result presents the same group.

    Budget or length-cap exhaustion is reported in ``flags``.
    """
    g, rels, _, flags = _tietze_core(p.g, p.relators, [], budget)
    while "tietze-budget" not in flags and g == 2 and len(rels) == 1:
        new = _nielsen_reduce(rels[0])
        if len(new) < len(rels[0]):
            g, rels, _, more = _tietze_core(g, [new], [], budget)
            flags += more
            continue
        rels = [_min_orbit(rels[0])]
        break
    if any(len(r) > LENGTH_CAP for r in rels):
        flags.append("length-cap")
    return GroupPresentation(g, rels, flags)


def simplify_with_words(p, words, budget=TIETZE_BUDGET):
    """Simplify ``p`` while rewriting ``words`` into the new generators."""
    g, rels, words, flags = _tietze_core(p.g, p.relators, words, budget)
    if any(len(r) > LENGTH_CAP for r in rels):
        flags.append("length-cap")
    return GroupPresentation(g, rels, flags), words


# -- recognisers -----------------------------------------------------------------

def _renamings(word):
    """All images of ``word`` under generator swap, inversions of generators,
    cyclic rotation and word inversion (two-generator words)."""
    out = set()
    for swap in (False, True):
        for s1 in (1, -1):
            for s2 in (1, -1):
                def f(x):
                    g = abs(x)
                    if swap:
                        g = 3 - g
                    sign = s1 if g == 1 else s2
                    return sign * g * (1 if x > 0 else -1)
                w = tuple(f(x) for x in word)
                for cand in (w, invert(w)):
                    out.update(rotations(cand))
    return out


def recognize_torus_group(p):
    """``(a, b)`` when ``p`` reads literally as ``<x, y | x^a y^-b>``."""
    if p.g != 2 or len(p.relators) != 1:
        return None
    rel = cyclic_reduce(p.relators[0])
    syl = syllables(rel)
    if len(syl) == 1:
        return (abs(syl[0][1]), 0)
    if len(syl) != 2 or syl[0][0] == syl[1][0]:
        return None
    a, b = abs(syl[0][1]), abs(syl[1][1])
    return (max(a, b), min(a, b))


def _match_lemma_i(word):
    syl = syllables(word)
    if len(syl) < 2 or len(syl) % 2:
        return None
    k = len(syl) // 2
    for start in range(len(syl)):
        s = syl[start:] + syl[:start]
        if s[0][0] != 1:
            continue
        a_exps = [e for g, e in s[0::2]]
        b_exps = [e for g, e in s[1::2]]
        if any(g != 1 for g, _ in s[0::2]) or any(g != 2 for g, _ in s[1::2]):
            continue
        if len(set(b_exps)) != 1:
            continue
        rest = a_exps[1:]
        if k >= 2 and len(set(rest)) != 1:
            continue
        p_exp = rest[0] if rest else 0
        n = a_exps[0] - p_exp
        q = b_exps[0]
        if n != 0:
            return (n, p_exp, q, k)
    return None


def _lemma_ii_forms():
    w = (1, 1, -2, -1, 2, 2, -1, -2)
    return frozenset(canonical_cyclic(x) for x in _renamings(w))


LEMMA_II_FORMS = _lemma_ii_forms()


def _match_commutator(word):
    syl = syllables(word)
    if len(syl) != 4:
        return None
    for start in range(4):
        s = syl[start:] + syl[:start]
        (g1, e1), (g2, e2), (g3, e3), (g4, e4) = s
        if g1 == g3 and g2 == g4 and g1 != g2 and e1 == -e3 and e2 == -e4:
            return (abs(e1), abs(e2))
    return None


def recognize_nonhyperbolic_pattern(p):
    """Tag for a presentation of a known non-hyperbolic shape, else None.

    Tags: ``("cyclic", ())`` for at most one generator and no relator,
    ``("torus", (a, b))``, ``("i", (n, p, q, k))``, ``("ii", ())`` and
    ``("iii", (n, m))`` for the commutator shape.
    """
    if p.g <= 1 and not any(p.relators):
        return ("cyclic", ())
    torus = recognize_torus_group(p)
    if torus is not None:
        return ("torus", torus)
    if p.g != 2 or len(p.relators) != 1:
        return None
    rel = cyclic_reduce(p.relators[0])
    if canonical_cyclic(rel) in LEMMA_II_FORMS:
        return ("ii", ())
    # the relator as written first, so literal parameters are reported
    cands = [rel] + sorted(_renamings(rel))
    for cand in cands:
        m = _match_lemma_i(cand)
        if m is not None:
            return ("i", m)
    for cand in cands:
        m = _match_commutator(cand)
        if m is not None:
            return ("iii", m)
    return None


# -- homomorphism counts --------------------------------------------------------------

def _perm_group(name):
    """Elements of a named permutation group, identity first."""
    if name in ("S3", "S4"):
        return list(permutations(range(int(name[1]))))
    if name == "A5":
        return [p for p in permutations(range(5)) if _perm_parity(p) == 0]
    if name.startswith("D") and name[1:].isdigit():
        n = int(name[1:])
        rot = tuple((i + 1) % n for i in range(n))
        ref = tuple((-i) % n for i in range(n))
        elems = [tuple(range(n))]
        seen = set(elems)
        for x in elems:
            for gen in (rot, ref):
                y = tuple(x[gen[k]] for k in range(n))
                if y not in seen:
                    seen.add(y)
                    elems.append(y)
        return elems
    raise ValueError(f"unknown group {name}")


@lru_cache(maxsize=None)
def _group_tables(name):
    elems = _perm_group(name)
    index = {p: i for i, p in enumerate(elems)}
    mult = [[index[tuple(p[q[k]] for k in range(len(p)))] for q in elems] for p in elems]
    inv = [index[tuple(sorted(range(len(p)), key=lambda k: p[k]))] for p in elems]
    # conjugacy class representatives with class sizes
    seen = set()
    reps = []
    for i in range(len(elems)):
        if i in seen:
            continue
        cls = {mult[mult[j][i]][inv[j]] for j in range(len(elems))}
        seen |= cls
        reps.append((i, len(cls)))
    return mult, inv, reps


def _perm_parity(p):
    return sum(1 for i in range(len(p)) for j in range(i + 1, len(p)) if p[i] > p[j]) & 1


# dihedral targets see torus-knot groups whose images in S3, S4, A5 are abelian
HOM_GROUPS = ("S3", "S4", "A5", "D7", "D8")
MAX_HOM_GENERATORS = 4


def count_homs(p, name):
    """Number of homomorphisms from the presented group to the named finite group."""
    mult, inv, reps = _group_tables(name)
    size = len(mult)
    if p.g == 0:
        return 1
    rels = [r for r in p.relators if r]

    def ok(assign):
        for r in rels:
            x = None
            for letter in r:
                y = assign[letter - 1] if letter > 0 else inv[assign[-letter - 1]]
                x = y if x is None else mult[x][y]
            # identity has index 0 in each table
            if x != 0:
                return False
        return True

    total = 0
    for rep, csize in reps:
        count = 0
        for rest in product(range(size), repeat=p.g - 1):
            if ok((rep,) + rest):
                count += 1
        total += csize * count
    return total


@lru_cache(maxsize=None)
def _element_orders(name):
    mult, _, _ = _group_tables(name)
    out = []
    for i in range(len(mult)):
        k, x = 1, i
        while x != 0:
            x = mult[x][i]
            k += 1
        out.append(k)
    return out


def peripheral_counts(p, words, name):
    """Homomorphisms to the named group, tallied by the orders of the images of ``words``.

    Returned as a sorted tuple of ``(sorted orders, count)``; conjugating a
    homomorphism leaves the orders unchanged, so the class-representative
    reduction on the first generator still applies.
    """
    mult, inv, reps = _group_tables(name)
    orders = _element_orders(name)
    size = len(mult)

    def value(assign, word):
        x = 0
        for letter in word:
            y = assign[letter - 1] if letter > 0 else inv[assign[-letter - 1]]
            x = mult[x][y]
        return x

    tally = {}
    if p.g == 0:
        key = tuple(sorted(1 for _ in words))
        return ((key, 1),)
    rels = [r for r in p.relators if r]
    for rep, csize in reps:
        for rest in product(range(size), repeat=p.g - 1):
            assign = (rep,) + rest
            if any(value(assign, r) != 0 for r in rels):
                continue
            key = tuple(sorted(orders[value(assign, w)] for w in words))
            tally[key] = tally.get(key, 0) + csize
    return tuple(sorted(tally.items()))


PERIPHERAL_GROUPS = ("S3", "S4")


def peripheral_profile(p, words):
    if p.g > MAX_HOM_GENERATORS - 1:
        return ()
    return tuple(peripheral_counts(p, words, name) for name in PERIPHERAL_GROUPS)


# -- linking ---------------------------------------------------------------------------

def _solve_rational(matrix, rhs):
    """One rational solution of ``matrix @ x = rhs`` or None."""
    rows = len(matrix)
    cols = len(matrix[0]) if rows else 0
    a = [[Fraction(v) for v in row] + [Fraction(b)] for row, b in zip(matrix, rhs)]
    pivots = []
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pv = a[r][c]
        a[r] = [x / pv for x in a[r]]
        for i in range(rows):
            if i != r and a[i][c] != 0:
                f = a[i][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == rows:
            break
    for i in range(r, rows):
        if a[i][cols] != 0:
            return None
    x = [Fraction(0)] * cols
    for i, c in enumerate(pivots):
        x[c] = a[i][cols]
    return x


def _pushoff_chain(tri, dual, edge_class):
    """Face chain of a curve parallel to a marked loop edge, closed near its vertex."""
    t, e = edge_class.slots[0]
    a, b = EDGES[e]
    start, goal = (t, b), (t, a)
    prev = {start: None}
    queue = deque([start])
    while queue:
        cur = queue.popleft()
        if cur == goal:
            break
        tt, c = cur
        for f in range(4):
            if f == c:
                continue
            nb, p = tri.gluings[tt][f]
            nxt = (nb, p[c])
            if nxt not in prev:
                prev[nxt] = (cur, f)
                queue.append(nxt)
    chain = [0] * len(dual.faces)
    cur = goal
    while prev[cur] is not None:
        (tt, c), f = prev[cur]
        x = dual.crossing(tt, f)
        chain[abs(x) - 1] += 1 if x > 0 else -1
        cur = (tt, c)
    return chain


def linking_data(mt, structure, h1_m):
    """Self-linking (mod 1, up to sign) per knot component and mutual |lk| for two.

    None unless M is a rational homology sphere.
    """
    if h1_m[0] != 0 or not structure.knots:
        return None
    tri = mt.tri
    dual = DualComplex(tri)
    bd = dual.boundary_matrix()
    cls = tri.classes
    loops = list(structure.knot_edges)
    coeffs = []
    for e in loops:
        chain = _pushoff_chain(tri, dual, cls.edges[e])
        sol = _solve_rational(bd, chain)
        if sol is None:
            return None
        coeffs.append(sol)
    selfs = []
    for i, e in enumerate(loops):
        v = coeffs[i][e] % 1
        selfs.append(min(v, (-v) % 1))
    out = {"self": tuple(sorted(str(v) for v in selfs))}
    if len(loops) == 2:
        out["mutual"] = str(abs(coeffs[0][loops[1]]))
    return out


# -- fingerprints ----------------------------------------------------------------------

@dataclass
class Fingerprint:
    graph_type: str
    h1_m: tuple
    h1_x: tuple
    homs_x: tuple = ()
    homs_m: tuple = ()
    linking: object = None
    peripheral: tuple = ()
    profile: tuple = ()
    presentation: str = ""
    pattern: object = None
    flags: tuple = field(default_factory=tuple)

    def key(self):
        link = None if self.linking is None else tuple(sorted(self.linking.items()))
        return (self.graph_type, self.h1_m, self.h1_x, self.homs_x, self.homs_m, link,
                self.peripheral)

    def key_string(self):
        gt, hm, hx, kx, km, link, per = self.key()
        parts = [gt, "M=" + format_homology(hm), "X=" + format_homology(hx),
                 "homsX=" + ",".join(map(str, kx)), "homsM=" + ",".join(map(str, km))]
        if link:
            parts.append("lk=" + ";".join(f"{k}:{v}" for k, v in link))
        if per:
            parts.append("mer=" + "/".join(
                " ".join(f"{''.join(map(str, o))}x{c}" for o, c in table) for table in per))
        return "|".join(parts)

    def to_dict(self):
        return {
            "graph_type": self.graph_type,
            "h1_m": [self.h1_m[0], list(self.h1_m[1])],
            "h1_x": [self.h1_x[0], list(self.h1_x[1])],
            "homs_x": list(self.homs_x),
            "homs_m": list(self.homs_m),
            "linking": self.linking,
            "peripheral": [[[list(o), c] for o, c in table] for table in self.peripheral],
            "profile": [self.profile[0], list(self.profile[1])] if self.profile else [],
            "presentation": self.presentation,
            "pattern": None if self.pattern is None else [self.pattern[0], list(self.pattern[1])],
            "flags": list(self.flags),
        }

    @classmethod
    def from_dict(cls, d):
        link = d.get("linking")
        if link is not None:
            link = {k: (tuple(v) if isinstance(v, list) else v) for k, v in link.items()}
        pat = d.get("pattern")
        prof = d.get("profile")
        return cls(
            graph_type=d["graph_type"],
            h1_m=(d["h1_m"][0], tuple(d["h1_m"][1])),
            h1_x=(d["h1_x"][0], tuple(d["h1_x"][1])),
            homs_x=tuple(d.get("homs_x", ())),
            homs_m=tuple(d.get("homs_m", ())),
            linking=link,
            peripheral=tuple(tuple((tuple(o), c) for o, c in table)
                             for table in d.get("peripheral", ())),
            profile=(prof[0], tuple(prof[1])) if prof else (),
            presentation=d.get("presentation", ""),
            pattern=None if pat is None else (pat[0], tuple(pat[1])),
            flags=tuple(d.get("flags", ())),
        )


def hom_counts(p):
    if p.g > MAX_HOM_GENERATORS:
        return ()
    return tuple(count_homs(p, name) for name in HOM_GROUPS)


def fingerprint(mt, structure=None):
    """Invariant fingerprint of an efficient marked triangulation."""
    if structure is None:
        structure = check_efficient(mt)
        if structure is None:
            raise ValueError("fingerprint needs an efficient marked triangulation")
    pm = tietze_simplify(spine_presentation(mt, drop_marked=False))
    raw_x, meridians = complement_presentation(mt)
    px = tietze_simplify(raw_x)
    pw, words = simplify_with_words(raw_x, meridians)
    h1_m = abelianization(pm)
    h1_x = abelianization(px)
    flags = tuple(sorted(set(pm.flags) | set(px.flags)))
    return Fingerprint(
        graph_type=graph_type(structure),
        h1_m=h1_m,
        h1_x=h1_x,
        homs_x=hom_counts(px),
        homs_m=hom_counts(pm),
        linking=linking_data(mt, structure, h1_m),
        peripheral=peripheral_profile(pw, words),
        profile=px.profile(),
        presentation=px.format(),
        pattern=recognize_nonhyperbolic_pattern(px),
        flags=flags,
    )
