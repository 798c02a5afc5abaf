"""Permutations of the four corners of a tetrahedron.

A permutation is a tuple ``p`` of length 4 with ``p[i]`` the image of corner ``i``.
"""

from itertools import permutations

ALL_PERMS = tuple(permutations(range(4)))
IDENTITY = (0, 1, 2, 3)

# Edges of a tetrahedron, indexed 0..5 by their corner pairs.
EDGES = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))
EDGE_INDEX = {}
for _i, (_a, _b) in enumerate(EDGES):
    EDGE_INDEX[_a, _b] = _i
    EDGE_INDEX[_b, _a] = _i


def parity(p):
    """Return 0 for even permutations, 1 for odd ones."""
    inv = 0
    for i in range(4):
        for j in range(i + 1, 4):
            if p[i] > p[j]:
                inv += 1
    return inv & 1


PARITY = {p: parity(p) for p in ALL_PERMS}
EVEN_PERMS = tuple(p for p in ALL_PERMS if PARITY[p] == 0)
ODD_PERMS = tuple(p for p in ALL_PERMS if PARITY[p] == 1)


def inverse(p):
    q = [0, 0, 0, 0]
    for i, x in enumerate(p):
        q[x] = i
    return tuple(q)


INVERSE = {p: inverse(p) for p in ALL_PERMS}


def compose(p, q):
    """Return ``p o q`` (apply ``q`` first)."""
    return (p[q[0]], p[q[1]], p[q[2]], p[q[3]])


def transposition(a, b):
    p = list(IDENTITY)
    p[a], p[b] = b, a
    return tuple(p)


def parse_perm(text):
    if len(text) != 4 or sorted(text) != ["0", "1", "2", "3"]:
        raise ValueError(f"bad permutation {text!r}")
    return tuple(int(c) for c in text)


def format_perm(p):
    return "".join(str(x) for x in p)


def face_corners(f):
    """Corners of the face opposite corner ``f``, in increasing order."""
    return tuple(c for c in range(4) if c != f)


def other_two(a, b):
    """The two corners not in ``{a, b}``, in increasing order."""
    return tuple(c for c in range(4) if c != a and c != b)
