"""Walk through the census pipeline at complexity 1 and 2.

Run with ``python3 demos/census_walkthrough.py``.
"""

from graphcensus.census import RunConfig, emit_tables, run_census, stats_table
from graphcensus.enumerate import enumerate_oriented_quad_graphs, enumerate_quad_graphs
from graphcensus.triangulation import parse_fixture

# Every closed triangulation with n tetrahedra has a 4-valent dual graph.
for n in (1, 2, 3):
    print(f"n={n}: {len(enumerate_quad_graphs(n))} graphs, "
          f"{len(enumerate_oriented_quad_graphs(n))} with vertex parities")

# The full pipeline: gluings, closed manifolds, efficient markings, survivors.
report = run_census(RunConfig(max_complexity=2))
print()
print(stats_table(report.stats))

# Only one graph survives at complexity 1: a handcuff graph in the 3-sphere.
(hand,) = [r for r in report.records if r.complexity == 1 and r.hyperbolic_candidate]
print(f"{hand.id}: type {hand.graph_type}, fingerprint {hand.fingerprint.key_string()}")
mt = parse_fixture(hand.fixture)
print(f"its triangulation has {mt.n} tetrahedron and marked edges {sorted(mt.marked)}:")
print(hand.fixture)

# Knots and links recognised as torus-knot complements are kept in an annex.
print(emit_tables(report.records, "text", annotated=True))
