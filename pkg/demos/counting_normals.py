"""Counting normals to the boundary of a convex polytope from inside.

Every normal corresponds to a critical point of the squared distance to the
boundary: minima sit on facets, saddles on edges, maxima on vertices.  This
script counts them for a few bodies and shows the Morse bookkeeping
n = 2 + 2 * saddles at work.
"""

import numpy as np

from polynormal import fixtures
from polynormal.normals import (
    count_normals_batch,
    morse_profile,
    normals_from_point,
    perturb_to_generic,
)

print("=== regular tetrahedron, counted from the centroid ===")
T = fixtures.regular_tetrahedron()
profile = morse_profile(T, [0.0, 0.0, 0.0])
print(f"minima={profile.minima} saddles={profile.saddles} maxima={profile.maxima}"
      f"  -> n = {profile.total}")
print("every one of the 14 faces carries a critical point: the tetrahedron is")
print("'all-acute', so each active region covers the whole interior\n")

print("=== cube, counted from the center ===")
C = fixtures.cube()
y = perturb_to_generic(C, np.zeros(3))
profile = morse_profile(C, y)
print(f"n = {profile.total} = 6 facet minima + 12 edge saddles + 8 vertex maxima\n")

print("=== the records themselves, sorted by distance ===")
for rec in normals_from_point(T, [0.05, 0.02, 0.01])[:5]:
    kind = {0: "min ", 1: "sadl", 2: "max "}[rec.morse_index]
    print(f"  {kind} on face dim={rec.face_key[0]} id={rec.face_key[1]}"
          f"  |z-y|^2 = {rec.sq_dist:.4f}")
print("  ...\n")

print("=== a tetrahedron admitting a 4-normal interior point ===")
F = fixtures.four_normal_tetrahedron()
rng = np.random.default_rng(7)
corner = np.array([-1.54, -2.02, 0.0])
pts = corner + rng.uniform(-0.5, 0.5, (8000, 3))
inside = (pts @ F.facet_normals.T <= F.facet_offsets - 1e-9).all(axis=1)
m, s, M, marg = count_normals_batch(F, pts[inside])
totals = m + s + M
four = pts[inside][(totals == 4) & ~marg]
print(f"sampled {inside.sum()} points near the flat corner: "
      f"counts range {totals.min()}..{totals.max()}")
print(f"{len(four)} of them have exactly 4 normals "
      "(1 minimum, 1 saddle, 2 maxima) - the minimum possible for a tetrahedron")
y4 = four[0]
print("example point:", np.round(y4, 4))
for rec in normals_from_point(F, y4):
    kind = {0: "min ", 1: "sadl", 2: "max "}[rec.morse_index]
    print(f"  {kind} base={np.round(rec.base_point, 3)}  |z-y|^2={rec.sq_dist:.3f}")
