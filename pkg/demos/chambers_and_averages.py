"""Chambers of constant normal count, the maximum N(P) and the average EN(P).

The boundaries of the active regions lie in finitely many planes: blue ones
through the edges orthogonal to their facets, red ones through the edge
endpoints orthogonal to the edges.  Splitting the body by all of them gives
cells with a constant count, so the maximum and the volume-weighted average
come out exactly.
"""

import numpy as np

from polynormal import fixtures
from polynormal.bifurcation import (
    chamber_decomposition,
    crossing_audit,
    exact_average,
    max_normals,
    monte_carlo_average,
    sheet_planes,
)

print("=== sheet planes of the regular tetrahedron ===")
T = fixtures.regular_tetrahedron()
planes = sheet_planes(T)
blue = [p for p in planes if p.color == "blue"]
red = [p for p in planes if p.color == "red"]
print(f"{len(blue)} blue planes (facet-edge prisms), {len(red)} red planes "
      f"(edge-endpoint caps)")
print("none of them cuts the interior: every chamber decomposition below has")
print("a single cell and the count is 14 everywhere\n")

print("=== maxima over chambers: 10, 12, 14 ===")
for name, P in (("flat tetrahedron A", fixtures.flat_tetrahedron_10()),
                ("flat tetrahedron B", fixtures.flat_tetrahedron_12()),
                ("regular tetrahedron", fixtures.regular_tetrahedron())):
    chambers = chamber_decomposition(P)
    N, witness = max_normals(P, chambers=chambers)
    counts = sorted({c.count for c in chambers})
    print(f"{name}: N(P) = {N}   (chamber counts {counts}, {len(chambers)} cells)")
print()

print("=== an obtuse triangle: counts 4 and 6, average in between ===")
tri = fixtures.isoceles_triangle(2.4)
chambers = chamber_decomposition(tri)
area6 = sum(c.volume for c in chambers if c.count == 6)
print(f"chambers: {sorted({c.count for c in chambers})}, "
      f"6-normal region fills {100 * area6 / tri.volume:.1f}% of the area")
en = exact_average(tri, chambers=chambers)
est, err = monte_carlo_average(tri, 20_000, seed=1)
print(f"EN exact = {en:.6f},  Monte-Carlo = {est:.4f} +- {err:.4f}")

print("\nEN of an isoceles triangle falls from 6 toward 4 as the apex opens:")
for apex in (1.8, 2.0, 2.4, 2.8, 3.0):
    print(f"  apex {apex:.1f} rad -> EN = {exact_average(fixtures.isoceles_triangle(apex)):.4f}")

print("\n=== crossing the bifurcation set changes the count by exactly 2 ===")
events = crossing_audit(tri, [0.0, 0.12], [-0.7, 0.03])
for e in events:
    print(f"  t={e.t:.3f}  {e.count_before} -> {e.count_after}  "
          f"(minima {e.profile_before.minima}->{e.profile_after.minima}, "
          f"maxima {e.profile_before.maxima}->{e.profile_after.maxima})")
