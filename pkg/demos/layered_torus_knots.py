"""Torus knots in lens spaces from Farey paths.

A path of k triangles in the Farey tessellation from 0/1 to p/q gives a
layered triangulation of L(p,q) with k-3 tetrahedra.  If the path passes
through l/m, one edge of the triangulation is the torus knot K(l,m).
"""

from graphcensus.farey import (
    complexity_upper_bound, format_slope, lam, layered_pair, torus_knot_group_params,
)
from graphcensus.invariants import (
    abelianization, complement_presentation, format_homology, recognize_torus_group,
    simplicial_h1, tietze_simplify,
)

for l, m, p, q in [(3, 2, 1, 0), (5, 2, 1, 0), (1, 0, 8, 3), (2, 1, 8, 3), (4, 1, 2, 1)]:
    mt, path = layered_pair(l, m, p, q)
    slopes = sorted({format_slope(s) for tri in path.triangles for s in tri})
    print(f"K({l},{m}) in L({p},{q}): lambda={lam(l, m, p, q)}, "
          f"{mt.n} tetrahedra, bound {complexity_upper_bound(l, m, p, q)}")
    print(f"  path slopes: {' '.join(slopes)}")
    print(f"  H1(M) = {format_homology(simplicial_h1(mt.tri))}")

    group, _ = complement_presentation(mt)
    simple = tietze_simplify(group)
    a, b = torus_knot_group_params(l, m, p, q)
    print(f"  complement: {simple.format()}  (expected <x,y | x^{a} = y^{b}>)")
    print(f"  recognised as {recognize_torus_group(simple)}, "
          f"H1(X) = {format_homology(abelianization(simple))}")
