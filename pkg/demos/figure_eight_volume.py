"""Hyperbolic volume of the figure-eight knot complement.

The complement is built from two regular ideal tetrahedra.  Newton's method on
the gluing equations recovers the regular shape, and the Bloch-Wigner
dilogarithm turns shapes into volume.
"""

import math

from graphcensus.hypsolve import (
    FIXTURE_DIR, REGULAR, angle_sums, load_ideal, lobachevsky, solve, volume, volume_catalog,
)

it = load_ideal(f"{FIXTURE_DIR}/0_3_1.tri")
print("edge equations (z, z', z'' per tetrahedron):")
print(it.edge_rows)

res = solve(it, complex(0.4, 0.9))
print(f"shapes from a perturbed start: {res.shapes}")
print(f"regular shape:                 {REGULAR}")
print(f"angle sums / 2 pi: {angle_sums(it, res.shapes) / (2 * math.pi)}")
print(f"volume {res.volume:.9f} = 2 x {volume([REGULAR]):.9f} = 6 x Lobachevsky(pi/3) "
      f"= {6 * lobachevsky(math.pi / 3):.9f}")

# A 2-3 move changes the triangulation but not the volume.
three = solve(load_ideal(f"{FIXTURE_DIR}/0_3_1_three.tri"))
print(f"after a 2-3 move: {three.volume:.12f} (difference {abs(three.volume - res.volume):.1e})")

print("\nshipped knot complements:")
for row in volume_catalog():
    print(f"  {row['name']:12s} {row['volume']:.9f}  geometric={row['geometric']}")

# The minimal handcuff graph complement is a regular ideal octahedron.
print(f"\nregular ideal octahedron: 8 x Lobachevsky(pi/4) = {8 * lobachevsky(math.pi / 4):.9f}")
