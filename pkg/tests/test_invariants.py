import random
from itertools import combinations, permutations, product
from math import gcd

import pytest
from hypothesis import assume, given, settings, strategies as st

from graphcensus.farey import layered_pair, slope, torus_knot_group_params
from graphcensus.invariants import (
    Fingerprint, GroupPresentation, abelianization, canonical_cyclic, complement_presentation,
    count_homs, cyclic_reduce, fingerprint, free_reduce, recognize_nonhyperbolic_pattern,
    recognize_torus_group, simplicial_h1, smith_normal_form, spine_presentation, tietze_simplify,
)
from graphcensus.triangulation import MarkedTriangulation, check_efficient, relabel


# -- independent oracles ----------------------------------------------------------------

def _det(m):
    if len(m) == 1:
        return m[0][0]
    return sum((-1) ** j * m[0][j] * _det([row[:j] + row[j + 1:] for row in m[1:]])
               for j in range(len(m)))


def determinantal_divisors(m):
    """gcd of all k x k minors for each k, until it vanishes."""
    rows, cols = len(m), len(m[0])
    out = []
    for k in range(1, min(rows, cols) + 1):
        g = 0
        for rs in combinations(range(rows), k):
            for cs in combinations(range(cols), k):
                g = gcd(g, _det([[m[r][c] for c in cs] for r in rs]))
        if g == 0:
            break
        out.append(g)
    return out


def s3_homs_brute(p):
    elems = list(permutations(range(3)))
    ident = (0, 1, 2)

    def mul(a, b):
        return tuple(a[b[i]] for i in range(3))

    def inv(a):
        r = [0] * 3
        for i, x in enumerate(a):
            r[x] = i
        return tuple(r)

    count = 0
    for assign in product(elems, repeat=p.g):
        good = True
        for r in p.relators:
            x = ident
            for letter in r:
                y = assign[abs(letter) - 1]
                x = mul(x, y if letter > 0 else inv(y))
            if x != ident:
                good = False
                break
        count += good
    return count


def renamings(word):
    """Images of a word under generator swap, generator inversions and word inversion."""
    out = set()
    for swap in (False, True):
        for s1, s2 in product((1, -1), repeat=2):
            w = []
            for x in word:
                g = abs(x)
                sign = 1 if x > 0 else -1
                if swap:
                    g = 3 - g
                sign *= s1 if g == 1 else s2
                w.append(sign * g)
            w = tuple(w)
            out.add(canonical_cyclic(w))
            out.add(canonical_cyclic(tuple(-x for x in reversed(w))))
    return out


def power(g, e):
    return (g if e > 0 else -g,) * abs(e)


words2 = st.lists(st.sampled_from([1, -1, 2, -2]), min_size=1, max_size=12)


# -- Smith normal form and abelianization -----------------------------------------------

@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_smith_normal_form_matches_minors(r, c, data):
    m = [[data.draw(st.integers(-6, 6)) for _ in range(c)] for _ in range(r)]
    diag = smith_normal_form(m)
    dd = determinantal_divisors(m)
    assert len(diag) == len(dd)
    prod_ = 1
    for d, dk in zip(diag, dd):
        prod_ *= d
        assert prod_ == dk
    assert all(b % a == 0 for a, b in zip(diag, diag[1:]))


def test_abelianization_examples():
    trefoil = GroupPresentation(2, [power(1, 3) + power(2, -2)])
    assert abelianization(trefoil) == (1, ())
    assert abelianization(GroupPresentation(1, [power(1, 3)])) == (0, (3,))
    assert abelianization(GroupPresentation(0, [])) == (0, ())


# -- Tietze moves -------------------------------------------------------------------------

def test_tietze_kills_single_letter():
    p = tietze_simplify(GroupPresentation(1, [(1,)]))
    assert p.g == 0


def test_tietze_eliminates_once_occurring_generator():
    p = GroupPresentation(3, [(3, 2, 1), (1, 2, -1, -2)])
    s = tietze_simplify(p)
    assert s.g == 2
    assert abelianization(s) == abelianization(p) == (2, ())


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 3), st.data())
def test_tietze_preserves_invariants(g, data):
    letters = [i for i in range(1, g + 1)] + [-i for i in range(1, g + 1)]
    rels = data.draw(st.lists(st.lists(st.sampled_from(letters), min_size=1, max_size=8),
                              min_size=0, max_size=3))
    p = GroupPresentation(g, [tuple(r) for r in rels])
    s = tietze_simplify(p)
    assert abelianization(s) == abelianization(p)
    assert count_homs(s, "S3") == count_homs(p, "S3")
    assert s.g <= p.g


@settings(max_examples=100, deadline=None)
@given(st.lists(words2, min_size=0, max_size=2))
def test_hom_count_matches_brute_force(rels):
    p = GroupPresentation(2, [tuple(r) for r in rels])
    assert count_homs(p, "S3") == s3_homs_brute(p)


def test_hom_counts_known_groups():
    free2 = GroupPresentation(2, [])
    assert count_homs(free2, "S3") == 36
    assert count_homs(free2, "D8") == 16 ** 2
    z = GroupPresentation(1, [])
    assert count_homs(z, "S4") == 24
    assert count_homs(z, "A5") == 60
    assert count_homs(GroupPresentation(0, []), "S3") == 1


def test_presentation_text_round_trip():
    p = GroupPresentation(2, [(1, 2, -1, -2), (1, 1, 1)])
    assert p.format() == "gens 2; rel a b A B; rel a a a"
    assert GroupPresentation.parse(p.format()) == p


def test_free_and_cyclic_reduction():
    assert free_reduce((1, -1, 2, 3, -3)) == (2,)
    assert cyclic_reduce((-2, 1, 2)) == (1,)


# -- spine presentations -----------------------------------------------------------------

def test_two_route_h1_closed(closed_upto3):
    for tris in closed_upto3.values():
        for tri in tris:
            p = spine_presentation(MarkedTriangulation(tri, ()), drop_marked=False)
            assert p.g == tri.n + 1
            assert abelianization(p) == simplicial_h1(tri)
            assert abelianization(tietze_simplify(p)) == abelianization(p)


def test_two_route_h1_census_instances(efficient_upto2):
    for mt in efficient_upto2:
        assert abelianization(spine_presentation(mt, False)) == simplicial_h1(mt.tri)


def test_layered_trefoil_complement():
    mt, _ = layered_pair(3, 2, 1, 0)
    p = spine_presentation(mt, drop_marked=True)
    assert abelianization(p) == (1, ())
    s = tietze_simplify(p)
    assert (s.g, len(s.relators)) == (2, 1)
    assert abelianization(s) == (1, ())
    assert recognize_torus_group(s) == (3, 2)


def test_layered_5_1_is_torus_group():
    mt, _ = layered_pair(5, 2, 1, 0)
    s = tietze_simplify(spine_presentation(mt, True))
    assert recognize_torus_group(s) == (5, 2)


def test_layered_lens_homology():
    mt, _ = layered_pair(1, 0, 3, 1)
    assert abelianization(spine_presentation(mt, False)) == (0, (3,))


def test_drop_marked_needs_marking(closed_upto3):
    with pytest.raises(ValueError):
        complement_presentation(MarkedTriangulation(closed_upto3[1][0], ()))


def _expected_torus_h1(a, b):
    g = gcd(a, b)
    if a == b == 0:
        return (2, ())
    return (1, (g,) if g > 1 else ())


valid_params = st.tuples(st.integers(-20, 20), st.integers(0, 20),
                         st.integers(0, 20), st.integers(-20, 20))


@settings(max_examples=40, deadline=None)
@given(valid_params)
def test_layered_complement_matches_torus_group(params):
    l, m, p, q = params
    assume(gcd(l, m) == 1 and gcd(p, q) == 1)
    assume(slope(l, m) not in (slope(0, 1), slope(p, q)))
    mt, _ = layered_pair(l, m, p, q)
    a, b = torus_knot_group_params(l, m, p, q)
    assert abelianization(complement_presentation(mt)[0]) == _expected_torus_h1(a, b)
    h_m = (1, ()) if p == 0 else (0, (abs(p),) if abs(p) > 1 else ())
    assert simplicial_h1(mt.tri) == h_m


# -- recognizers -------------------------------------------------------------------------

def test_torus_recognizer_examples():
    assert recognize_torus_group(GroupPresentation(2, [power(1, 3) + power(2, -2)])) == (3, 2)
    assert recognize_torus_group(GroupPresentation(2, [power(1, 5) + power(2, -2)])) == (5, 2)
    assert recognize_torus_group(GroupPresentation(2, [(1, 2, 1, 2)])) is None


def test_pattern_examples():
    w = power(1, 3) + (1, 2, 2) * 2
    assert recognize_nonhyperbolic_pattern(GroupPresentation(2, [w])) == ("i", (3, 1, 2, 2))
    lemma_ii = (1, 1, -2, -1, 2, 2, -1, -2)
    assert recognize_nonhyperbolic_pattern(GroupPresentation(2, [lemma_ii])) == ("ii", ())
    torus = GroupPresentation(2, [power(1, 3) + power(2, -2)])
    assert recognize_nonhyperbolic_pattern(torus) == ("torus", (3, 2))
    comm = power(1, 2) + power(2, 3) + power(1, -2) + power(2, -3)
    assert recognize_nonhyperbolic_pattern(GroupPresentation(2, [comm])) == ("iii", (2, 3))


def _lemma_i_word(n, p, q, k):
    return free_reduce(power(1, n) + (power(1, p) + power(2, q)) * k)


@settings(max_examples=300, deadline=None)
@given(words2)
def test_recognizers_are_syntactic(word):
    word = cyclic_reduce(free_reduce(tuple(word)))
    assume(word)
    p = GroupPresentation(2, [word])
    forms = renamings(word)
    torus = recognize_torus_group(p)
    if torus is not None:
        a, b = torus
        assert forms & (renamings(power(1, a) + power(2, -b)) | renamings(power(1, a) + power(2, b)))
    tag = recognize_nonhyperbolic_pattern(p)
    if tag is None:
        return
    name, params = tag
    if name == "i":
        assert forms & renamings(cyclic_reduce(_lemma_i_word(*params)))
        assert all(params[i] != 0 for i in (0, 2, 3))
    elif name == "ii":
        assert forms & renamings((1, 1, -2, -1, 2, 2, -1, -2))
    elif name == "iii":
        n, m = params
        comm = power(1, n) + power(2, m) + power(1, -n) + power(2, -m)
        assert forms & renamings(comm)


def test_recognizers_reject_other_shapes():
    three_gen = GroupPresentation(3, [(1, 2, 3)])
    assert recognize_torus_group(three_gen) is None
    assert recognize_nonhyperbolic_pattern(three_gen) is None
    two_rel = GroupPresentation(2, [(1, 1), (2, 2)])
    assert recognize_nonhyperbolic_pattern(two_rel) is None


# -- fingerprints -------------------------------------------------------------------------

def test_fingerprint_relabel_invariant(efficient_upto2):
    rng = random.Random(3)
    from graphcensus.perm import ALL_PERMS
    for mt in efficient_upto2[::3]:
        perm = list(range(mt.n))
        rng.shuffle(perm)
        tri, marked = relabel(mt.tri, perm, [rng.choice(ALL_PERMS) for _ in range(mt.n)], mt.marked)
        other = MarkedTriangulation(tri, marked)
        assert fingerprint(other).key() == fingerprint(mt).key()


def test_fingerprint_dict_round_trip(efficient_upto2):
    for mt in efficient_upto2[:40]:
        fp = fingerprint(mt)
        back = Fingerprint.from_dict(fp.to_dict())
        assert back.key() == fp.key()
        assert back.key_string() == fp.key_string()


def test_theta_survivors_differ_in_homology(census2):
    thetas = [r for r in census2.records if r.graph_type == "2t" and r.complexity == 2]
    assert sorted(r.fingerprint.h1_m for r in thetas) == [(0, ()), (0, (3,))]


def test_k4_survivor(census2):
    (rec,) = [r for r in census2.records if r.graph_type == "4a"]
    assert rec.fingerprint.h1_m == (0, ())


def test_handcuff_complement_homology(census2):
    rec = next(r for r in census2.records if r.id == "2h_1_1")
    assert rec.fingerprint.h1_x == (2, ())


def test_knots_in_homology_spheres_have_rank_one(census3):
    for r in census3.records:
        if r.graph_type == "knot" and r.fingerprint.h1_m[0] == 0 and not r.fingerprint.h1_m[1]:
            assert r.fingerprint.h1_x[0] == 1
