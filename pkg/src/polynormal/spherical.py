"""Spherical toolbox: vertex figures, nice/skew triangles, polar duality and
the ten-normals certificates.

A vertex figure of a simple 3-polytope vertex is the spherical triangle of
its unit edge directions; its side lengths are the planar angles of the
incident facets and its angles are the dihedral angles along the incident
edges.  A triangle is *nice* when some interior point projects onto all
three sides and stays within distance pi/2 of all three vertices; a simple
polytope with a nice vertex has at least 10 concurrent normals from a point
near that vertex.

Every witness condition is linear in the witness: X must satisfy
<X, h> > 0 for twelve fixed unit vectors h (three triangle sides, six
projection hemispheres, three distance hemispheres).  The min-margin score
is therefore maximized either at one of the h, or where two or three margins
tie, so a closed-form candidate enumeration finds the global optimum; the
barycentric grid pass seeds and cross-checks it.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np
from numpy.random import default_rng

from .errors import Borderline, NonSimpleVertex, NotGeneric, NotSimple, ValidationError
from .geometry import contains_interior, dihedral_angle, planar_angle, unit
from .normals import count_normals_batch

RIGHT = np.pi / 2


def spherical_distance(x, y):
    """Geodesic distance between unit vectors, robust near 0 and pi."""
    x, y = np.asarray(x, float), np.asarray(y, float)
    return float(np.arctan2(np.linalg.norm(np.cross(x, y)), float(x @ y)))


def _tangent(x, toward):
    """Unit tangent at x along the great circle toward another point."""
    t = toward - float(x @ toward) * x
    n = np.linalg.norm(t)
    if n < 1e-14:
        raise ValidationError("tangent undefined for coincident or antipodal points")
    return t / n


class SphericalTriangle:
    """Triangle with geodesic edges inside an open hemisphere.

    ``verts`` rows are the vertices A, B, C.  ``sides[k]`` is the length of
    the side opposite vertex k; ``angles[k]`` the interior angle at vertex k.
    When built from a polytope vertex, ``edge_ids[k]`` is the polytope edge
    giving triangle vertex k and ``facet_ids[k]`` the facet carrying the
    opposite side.
    """

    __slots__ = ("verts", "edge_ids", "facet_ids", "_sides", "_angles")

    def __init__(self, a, b, c, edge_ids=None, facet_ids=None):
        verts = np.array([unit(a), unit(b), unit(c)], dtype=float)
        if abs(np.linalg.det(verts)) < 1e-12:
            raise ValidationError("spherical triangle is degenerate (coplanar with origin)")
        self.verts = verts
        self.edge_ids = edge_ids
        self.facet_ids = facet_ids
        self._sides = None
        self._angles = None

    @property
    def sides(self):
        if self._sides is None:
            v = self.verts
            self._sides = np.array([spherical_distance(v[(k + 1) % 3], v[(k + 2) % 3])
                                    for k in range(3)])
        return self._sides

    @property
    def angles(self):
        if self._angles is None:
            v = self.verts
            out = []
            for k in range(3):
                t1 = _tangent(v[k], v[(k + 1) % 3])
                t2 = _tangent(v[k], v[(k + 2) % 3])
                out.append(float(np.arctan2(np.linalg.norm(np.cross(t1, t2)),
                                            float(t1 @ t2))))
            self._angles = np.array(out)
        return self._angles

    def side_between(self, i, j):
        return self.sides[3 - i - j]

    def solid_angle(self):
        """Spherical excess, i.e. the area of the triangle."""
        return float(self.angles.sum() - np.pi)

    def contains(self, x, margin=0.0):
        v = self.verts
        for k in range(3):
            q = _interior_normal(v, k)
            if float(q @ x) <= margin:
                return False
        return True

    def __repr__(self):
        s = np.round(self.sides, 4)
        return f"SphericalTriangle(sides={list(s)})"


def _interior_normal(verts, k):
    """Unit pole of the side opposite vertex k, on the triangle's side."""
    i, j = (k + 1) % 3, (k + 2) % 3
    g = unit(np.cross(verts[i], verts[j]))
    return g if float(g @ verts[k]) > 0 else -g


def vertex_figure(P, v):
    """Spherical triangle cut by a small sphere at a simple vertex.

    Triangle vertex k is the unit direction of the k-th incident edge;
    the side between two edge directions lies in their common facet.
    """
    if P.dim != 3:
        raise ValidationError("vertex figures need a 3-polytope")
    edges = P.vertex_edges[v]
    if len(edges) != 3:
        raise NonSimpleVertex(f"vertex {v} has {len(edges)} incident edges")
    dirs = []
    for e in edges:
        a, b = P.edges[e]
        other = b if a == v else a
        dirs.append(unit(P.vertices[other] - P.vertices[v]))
    facet_ids = []
    for k in range(3):
        e1, e2 = edges[(k + 1) % 3], edges[(k + 2) % 3]
        common = set(P.edge_facets[e1]) & set(P.edge_facets[e2])
        if len(common) != 1:
            raise ValidationError(f"edges {e1},{e2} at vertex {v} share {len(common)} facets")
        facet_ids.append(common.pop())
    return SphericalTriangle(*dirs, edge_ids=tuple(int(e) for e in edges),
                             facet_ids=tuple(int(f) for f in facet_ids))


def spherical_project(x, y, z):
    """Foot of the spherical perpendicular from x onto the arc yz, or None.

    The three points must fit in an open hemisphere.  When x is the pole of
    the arc's great circle every arc point is equidistant (pi/2); the arc
    midpoint is returned.
    """
    x, y, z = unit(x), unit(y), unit(z)
    g = unit(np.cross(y, z))
    w = x - float(x @ g) * g
    nw = np.linalg.norm(w)
    if nw < 1e-12:
        return unit(y + z)
    w /= nw
    # decompose the foot in the (y, z) basis of the great-circle plane
    gram = np.array([[1.0, float(y @ z)], [float(y @ z), 1.0]])
    ab = np.linalg.solve(gram, np.array([float(w @ y), float(w @ z)]))
    if ab[0] < -1e-12 or ab[1] < -1e-12:
        return None
    return w


def witness_constraints(tri):
    """Unit vectors h with <X, h> > 0 iff X is a valid nice-vertex witness."""
    v = tri.verts
    rows = [_interior_normal(v, k) for k in range(3)]
    for k in range(3):
        y, z = v[(k + 1) % 3], v[(k + 2) % 3]
        g = unit(np.cross(y, z))
        rows.append(np.cross(g, y))   # beyond the perpendicular at y
        rows.append(np.cross(z, g))   # before the perpendicular at z
    rows.extend(v)                     # distance to each vertex below pi/2
    return np.array(rows)


def _best_witness_enumeration(H):
    """Global maximum of min_h <X, h> by closed-form candidate enumeration."""
    cands = [H]
    for i, j in combinations(range(len(H)), 2):
        s = H[i] + H[j]
        n = np.linalg.norm(s)
        if n > 1e-9:
            cands.append((s / n)[None, :])
    for i, j, k in combinations(range(len(H)), 3):
        c = np.cross(H[i] - H[j], H[j] - H[k])
        n = np.linalg.norm(c)
        if n > 1e-9:
            cands.append((c / n)[None, :])
            cands.append((-c / n)[None, :])
    X = np.vstack(cands)
    scores = (X @ H.T).min(axis=1)
    best = int(np.argmax(scores))
    return float(scores[best]), X[best]


def _best_witness_grid(tri, H, grid_res):
    """Barycentric grid search with two tenfold refinement rounds."""
    v = tri.verts

    def evaluate(weights):
        pts = weights @ v
        pts /= np.linalg.norm(pts, axis=1)[:, None]
        scores = (pts @ H.T).min(axis=1)
        b = int(np.argmax(scores))
        return float(scores[b]), pts[b], weights[b]

    grid_res = max(int(grid_res), 4)
    ii, jj = np.meshgrid(np.arange(grid_res), np.arange(grid_res))
    ii, jj = ii.ravel(), jj.ravel()
    keep = ii + jj < grid_res
    w = np.column_stack([(ii[keep] + 0.5), (jj[keep] + 0.5),
                         grid_res - (ii[keep] + 0.5) - (jj[keep] + 0.5)]) / grid_res
    score, x, wbest = evaluate(w)
    span = 1.0 / grid_res
    for _ in range(2):
        lo = np.maximum(wbest - span, 1e-9)
        steps = np.linspace(0.0, 2 * span, 11)
        du, dv = np.meshgrid(steps, steps)
        wa = lo[0] + du.ravel()
        wb = lo[1] + dv.ravel()
        wc = 1.0 - wa - wb
        ok = wc > 1e-9
        w = np.column_stack([wa[ok], wb[ok], wc[ok]])
        s2, x2, w2 = evaluate(w)
        if s2 > score:
            score, x, wbest = s2, x2, w2
        span /= 10.0
    return score, x


@dataclass
class VertexClassification:
    """Nice/skew verdict with its witness or its satisfied condition table."""

    verdict: str
    witness: np.ndarray | None = None
    borderline: bool = False
    score: float | None = None
    conditions: tuple | None = None

    @property
    def is_nice(self):
        return self.verdict == "nice"


def classify_by_definition(tri, grid_res=400, witness_margin=1e-7,
                           borderline_band=1e-6):
    """Search the triangle interior for a nice-vertex witness.

    A grid pass (with two local refinement rounds) and an exact candidate
    enumeration both bound the best witness margin; the verdict is nice iff
    the margin clears ``witness_margin``.
    """
    H = witness_constraints(tri)
    s_enum, x_enum = _best_witness_enumeration(H)
    s_grid, x_grid = _best_witness_grid(tri, H, grid_res)
    score, x = (s_enum, x_enum) if s_enum >= s_grid else (s_grid, x_grid)
    verdict = "nice" if score >= witness_margin else "skew"
    return VertexClassification(
        verdict=verdict,
        witness=x if verdict == "nice" else None,
        borderline=abs(score) < borderline_band,
        score=score,
    )


def _foot_of_right_angle(tri, a, b, c):
    """Z on arc (a->c) with the arc ZB orthogonal to BC at B, or None."""
    v = tri.verts
    t_bc = _tangent(v[b], v[c])
    g_ac = np.cross(v[a], v[c])
    n = np.linalg.norm(g_ac)
    if n < 1e-12:
        return None
    g_ac /= n
    z = np.cross(t_bc, g_ac)
    nz = np.linalg.norm(z)
    if nz < 1e-12:
        return None
    z /= nz
    for cand in (z, -z):
        gram = np.array([[1.0, float(v[a] @ v[c])], [float(v[a] @ v[c]), 1.0]])
        ab = np.linalg.solve(gram, np.array([float(cand @ v[a]), float(cand @ v[c])]))
        if ab[0] >= -1e-12 and ab[1] >= -1e-12:
            return cand
    return None


def classify_by_lemma(tri, threshold_tol=1e-9):
    """Skew iff some relabeling satisfies all seven side/angle conditions.

    Raises Borderline when any compared quantity sits within
    ``threshold_tol`` of its pi/2 threshold.
    """
    sides_ok = np.abs(tri.sides - RIGHT)
    angles_ok = np.abs(tri.angles - RIGHT)
    if sides_ok.min() < threshold_tol or angles_ok.min() < threshold_tol:
        raise Borderline("a side or angle is within tolerance of pi/2")
    table = []
    skew_found = False
    for perm in permutations(range(3)):
        a, b, c = perm
        conds = [
            bool(tri.side_between(c, a) > RIGHT),
            bool(tri.side_between(b, c) < RIGHT),
            bool(tri.angles[b] > RIGHT),
            bool(tri.angles[a] < RIGHT),
            bool(tri.angles[c] < RIGHT),
            bool(tri.side_between(b, a) > RIGHT),
        ]
        if all(conds):
            z = _foot_of_right_angle(tri, a, b, c)
            if z is None:
                conds.append(False)
            else:
                az = float(tri.verts[a] @ z)
                if abs(az) < threshold_tol:
                    raise Borderline("|AZ| is within tolerance of pi/2")
                conds.append(bool(az < 0.0))
        else:
            conds.append(False)
        table.append((perm, tuple(conds)))
        if all(conds):
            skew_found = True
    return VertexClassification(verdict="skew" if skew_found else "nice",
                                conditions=tuple(table))


def polar_dual_triangle(tri):
    """Triangle of the side poles; swaps sides and angles as a <-> pi - a'."""
    v = tri.verts
    duals = []
    for k in range(3):
        duals.append(_interior_normal(v, k))
    return SphericalTriangle(*duals)


@dataclass(frozen=True)
class LocalCriticalReport:
    """Which faces at a vertex carry critical points for nearby ray points."""

    is_max: bool
    saddle_edges: tuple
    min_facets: tuple


def local_critical_test(P, v, direction):
    """Critical faces at vertex v for points y = v + t * direction, t small.

    The vertex is a maximum iff the mapped direction Y stays within pi/2 of
    all triangle vertices; an incident edge carries a saddle iff its triangle
    vertex is a boundary-local maximum of the distance to Y (still below
    pi/2); an incident facet carries a minimum iff Y projects onto its side
    at distance below pi/2.
    """
    fig = vertex_figure(P, v)
    y = unit(np.asarray(direction, dtype=float))
    tv = fig.verts
    is_max = bool((tv @ y > 0.0).all())
    saddle_edges = []
    for k in range(3):
        t1 = _tangent(tv[k], tv[(k + 1) % 3])
        t2 = _tangent(tv[k], tv[(k + 2) % 3])
        boundary_max = float(y @ t1) > 0.0 and float(y @ t2) > 0.0
        if boundary_max and float(tv[k] @ y) > 0.0:
            saddle_edges.append(fig.edge_ids[k])
    min_facets = []
    for k in range(3):
        foot = spherical_project(y, tv[(k + 1) % 3], tv[(k + 2) % 3])
        if foot is not None and float(foot @ y) > 0.0:
            min_facets.append(fig.facet_ids[k])
    return LocalCriticalReport(is_max, tuple(saddle_edges), tuple(min_facets))


def _require_simple_generic(P, right_angle_tol):
    if P.dim != 3 or not P.is_simple():
        raise NotSimple("polytope has a non-simple vertex")
    for e in range(P.n_edges):
        if abs(dihedral_angle(P, e) - RIGHT) < right_angle_tol:
            raise NotGeneric(f"right dihedral angle at edge {e}")
    for f, cycle in enumerate(P.facet_cycles):
        for v in cycle:
            if abs(planar_angle(P, f, int(v)) - RIGHT) < right_angle_tol:
                raise NotGeneric(f"right planar angle at facet {f}, vertex {v}")


def ten_normals_certificate(P, right_angle_tol=1e-9, grid_res=64):
    """First nice vertex of a simple generic polytope, or None.

    A nice vertex certifies that the maximum concurrent-normal count is at
    least 10 (checked against the chamber maximum in the test suite).
    """
    _require_simple_generic(P, right_angle_tol)
    for v in range(P.n_vertices):
        tri = vertex_figure(P, v)
        try:
            verdict = classify_by_lemma(tri)
        except Borderline:
            verdict = classify_by_definition(tri, grid_res=grid_res)
            if verdict.borderline:
                continue
        if verdict.is_nice:
            return v
    return None


@dataclass(frozen=True)
class VertexCensus:
    """Acute-angle bookkeeping at one vertex."""

    vertex: int
    acute_dihedral_edges: tuple
    acute_planar_facets: tuple
    acute_planar_between_acute_dihedrals: tuple

    def compatible_with_low_max(self):
        """Necessary pattern at this vertex when the maximum count is below 10:
        exactly two acute dihedral angles, exactly one acute planar angle, and
        that angle not spanned by the two acute-dihedral edges."""
        return (len(self.acute_dihedral_edges) == 2
                and len(self.acute_planar_facets) == 1
                and not self.acute_planar_between_acute_dihedrals[0])


def acute_census(P, right_angle_tol=1e-9):
    """Per-vertex counts of acute dihedral and planar angles (simple P)."""
    _require_simple_generic(P, right_angle_tol)
    out = []
    for v in range(P.n_vertices):
        acute_edges = tuple(int(e) for e in P.vertex_edges[v]
                            if dihedral_angle(P, int(e)) < RIGHT)
        acute_facets = []
        between = []
        for f in P.vertex_facets[v]:
            if planar_angle(P, int(f), v) >= RIGHT:
                continue
            acute_facets.append(int(f))
            spanning = {int(e) for e in P.vertex_edges[v]
                        if int(f) in P.edge_facets[int(e)]}
            between.append(spanning == set(acute_edges))
        out.append(VertexCensus(v, acute_edges, tuple(acute_facets), tuple(between)))
    return out


def normal_fan_tiling(P, grid_res=64):
    """Spherical tiles of the outer normal fan and whether all are skew.

    Each tile is the triangle of the three outward facet normals at a vertex,
    congruent (antipodally) to the polar dual of the vertex figure.  An
    all-skew tiling is necessary for the maximum count to fall below 10.
    """
    if P.dim != 3 or not P.is_simple():
        raise NotSimple("normal fan tiling needs a simple 3-polytope")
    tiles = []
    all_skew = True
    for v in range(P.n_vertices):
        fs = P.vertex_facets[v]
        tri = SphericalTriangle(*(P.facet_normals[f] for f in fs))
        tiles.append(tri)
        try:
            verdict = classify_by_lemma(tri)
        except Borderline:
            verdict = classify_by_definition(tri, grid_res=grid_res)
        if verdict.is_nice:
            all_skew = False
    return tiles, all_skew


def shell_ratio_check(P, center=None):
    """r_out / r_in for spheres about ``center`` sandwiching the boundary.

    A ratio at most sqrt(2) rules out acute dihedral angles, which forces the
    maximum normal count to 10 or more on simple generic polytopes.
    """
    if center is None:
        center = P.centroid
    center = np.asarray(center, dtype=float)
    if not contains_interior(P, center, tol=P.tol * max(1.0, P.diameter)):
        raise ValidationError("center must be interior")
    r_in = float((P.facet_offsets - P.facet_normals @ center).min())
    r_out = float(np.linalg.norm(P.vertices - center, axis=1).max())
    return r_out / r_in


def random_hemispheric_triangle(rng=None, right_angle_gap=1e-4, min_det=1e-3):
    """Random triangle in an open hemisphere, rejecting near-right sides/angles."""
    rng = default_rng() if rng is None else rng
    while True:
        pole = _random_unit(rng)
        pts = []
        while len(pts) < 3:
            x = _random_unit(rng)
            if float(x @ pole) > 0.05:
                pts.append(x)
        try:
            tri = SphericalTriangle(*pts)
        except ValidationError:
            continue
        if abs(np.linalg.det(tri.verts)) < min_det:
            continue
        if (np.abs(tri.sides - RIGHT).min() < right_angle_gap
                or np.abs(tri.angles - RIGHT).min() < right_angle_gap):
            continue
        return tri


def _random_unit(rng):
    v = rng.standard_normal(3)
    n = np.linalg.norm(v)
    while n < 1e-12:  # pragma: no cover
        v = rng.standard_normal(3)
        n = np.linalg.norm(v)
    return v / n


def ray_scan_counts(P, v, direction, planes=None):
    """Normal counts at sample points along a ray from vertex v into P.

    Samples the midpoints between consecutive sheet-plane crossings of the
    ray, which covers every chamber the ray visits; the maximum sampled count
    is a certified lower bound for the chamber maximum.
    """
    from .bifurcation import arrangement_planes

    if planes is None:
        planes = arrangement_planes(P)
    origin = P.vertices[v]
    d = unit(np.asarray(direction, dtype=float))
    # exit parameter
    t_exit = np.inf
    for f in range(P.n_facets):
        dn = float(P.facet_normals[f] @ d)
        if dn > 1e-14:
            t_exit = min(t_exit, (P.facet_offsets[f] - float(P.facet_normals[f] @ origin)) / dn)
    if not np.isfinite(t_exit) or t_exit <= 0:
        return np.array([], dtype=int)
    ts = {1e-4 * t_exit, 0.5 * t_exit, (1.0 - 1e-4) * t_exit}
    cuts = []
    for rec in planes:
        dn = float(rec["normal"] @ d)
        if abs(dn) < 1e-14:
            continue
        t = (rec["offset"] - float(rec["normal"] @ origin)) / dn
        if 0.0 < t < t_exit:
            cuts.append(t)
    cuts = sorted(set(cuts))
    grid = [0.0] + cuts + [t_exit]
    for lo, hi in zip(grid, grid[1:]):
        if hi - lo > 1e-12 * max(1.0, t_exit):
            ts.add(0.5 * (lo + hi))
    pts = origin[None, :] + np.array(sorted(ts))[:, None] * d[None, :]
    tol = P.tol * max(1.0, P.diameter)
    inside = (pts @ P.facet_normals.T <= P.facet_offsets - tol).all(axis=1)
    pts = pts[inside]
    if not len(pts):
        return np.array([], dtype=int)
    m, s, M, marg = count_normals_batch(P, pts)
    totals = (m + s + M)[~marg]
    return totals
