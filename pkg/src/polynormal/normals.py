"""Normals to the boundary from interior points.

Every face is tested independently: the query point must project into the
face's relative interior and the offset vector must lie in the face's inner
normal cone.  Minima live on facets, saddles on edges, maxima on vertices
(in 2-D: minima on edges, maxima on vertices).  Points within tolerance of
an active-region boundary raise OnBifurcationSet instead of returning an
unstable count.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.random import default_rng

from .errors import FailedPerturbation, InvariantViolation, OnBifurcationSet
from .geometry import contains_interior

REL_MARGIN = 1e-8   # relative-interior margin, barycentric units
CONE_MARGIN = 1e-9  # cone membership margin, sine units


@dataclass(frozen=True)
class NormalRecord:
    """One normal from y: its base face, base point, squared length and index."""

    face_key: tuple
    base_point: np.ndarray
    sq_dist: float
    morse_index: int


@dataclass(frozen=True)
class MorseProfile:
    """Counts of minima, saddles and maxima of the squared-distance function."""

    minima: int
    saddles: int
    maxima: int

    @property
    def total(self):
        return self.minima + self.saddles + self.maxima

    def as_tuple(self):
        return (self.minima, self.saddles, self.maxima)


def _facet_margins(P, Y):
    """(npts, F) scaled margins of the projected feet inside their facets."""
    npts = Y.shape[0]
    out = np.empty((npts, P.n_facets))
    for f in range(P.n_facets):
        n = P.facet_normals[f]
        d = Y @ n - P.facet_offsets[f]
        Z = Y - d[:, None] * n
        W, c, scale = P._facet_rims[f]
        out[:, f] = (Z @ W.T - c).min(axis=1) / scale
    return out


def _edge_margins(P, Y):
    """(npts, E) relative-interior and cone margins for every edge (3-D)."""
    a = P._edge_origin
    d = P._edge_dir
    L = P._edge_len
    diff = Y[:, None, :] - a[None, :, :]
    t = np.einsum("ped,ed->pe", diff, d)
    rel = np.minimum(t, L[None, :] - t) / L[None, :]
    w = diff - t[..., None] * d[None, :, :]
    wn = np.linalg.norm(w, axis=2)
    wn = np.where(wn == 0.0, 1.0, wn)
    h = P._edge_support  # (E, 2, 3)
    cone = np.minimum(np.einsum("ped,ed->pe", w, h[:, 0]),
                      np.einsum("ped,ed->pe", w, h[:, 1])) / wn
    return rel, cone


def _vertex_margins(P, Y):
    """(npts, V) cone margins: worst inner product with the incident edge directions."""
    npts = Y.shape[0]
    out = np.empty((npts, P.n_vertices))
    for v in range(P.n_vertices):
        w = Y - P.vertices[v]
        wn = np.linalg.norm(w, axis=1)
        wn = np.where(wn == 0.0, 1.0, wn)
        out[:, v] = (w @ P._vertex_dirs[v].T).min(axis=1) / wn
    return out


def count_normals_batch(P, Y, rel_margin=REL_MARGIN, cone_margin=CONE_MARGIN):
    """Vectorized normal counting for many interior points at once.

    Returns (minima, saddles, maxima, marginal): integer arrays of per-point
    counts plus a boolean mask of points sitting within tolerance of some
    active-region boundary (their counts are unreliable; perturb and retry).
    """
    Y = np.atleast_2d(np.asarray(Y, dtype=float))
    fm = _facet_margins(P, Y)
    vm = _vertex_margins(P, Y)
    minima = (fm > 0.0).sum(axis=1)
    maxima = (vm > 0.0).sum(axis=1)
    marginal = (np.abs(fm) < rel_margin).any(axis=1) | (np.abs(vm) < cone_margin).any(axis=1)
    if P.dim == 3:
        rel, cone = _edge_margins(P, Y)
        saddles = ((rel > 0.0) & (cone > 0.0)).sum(axis=1)
        near_edge = (((np.abs(rel) < rel_margin) & (cone > -cone_margin))
                     | ((np.abs(cone) < cone_margin) & (rel > -rel_margin)))
        marginal |= near_edge.any(axis=1)
    else:
        saddles = np.zeros(len(Y), dtype=int)
    return minima, saddles, maxima, marginal


def face_normal_from(P, face, y, rel_margin=REL_MARGIN, cone_margin=CONE_MARGIN):
    """The normal from y based on the given face, or None.

    Raises OnBifurcationSet when a margin test lands within tolerance of its
    boundary, i.e. the base point sits on the face's rim or the offset vector
    grazes the cone.
    """
    if not isinstance(face, tuple):
        face = face.key
    dim, idx = face
    y = np.asarray(y, dtype=float)
    Y = y[None, :]
    if dim == P.dim - 1:
        margin = float(_facet_margins(P, Y)[0, idx])
        if abs(margin) < rel_margin:
            raise OnBifurcationSet(f"base point within {rel_margin} of facet {idx} rim")
        if margin < 0.0:
            return None
        n = P.facet_normals[idx]
        z = y - (y @ n - P.facet_offsets[idx]) * n
    elif dim == 1 and P.dim == 3:
        rel, cone = _edge_margins(P, Y)
        r, c = float(rel[0, idx]), float(cone[0, idx])
        if (abs(r) < rel_margin and c > -cone_margin) or (abs(c) < cone_margin and r > -rel_margin):
            raise OnBifurcationSet(f"edge {idx} test within tolerance of its boundary")
        if r < 0.0 or c < 0.0:
            return None
        a = P._edge_origin[idx]
        t = (y - a) @ P._edge_dir[idx]
        z = a + t * P._edge_dir[idx]
    else:
        margin = float(_vertex_margins(P, Y)[0, idx])
        if abs(margin) < cone_margin:
            raise OnBifurcationSet(f"vertex {idx} cone test within tolerance")
        if margin < 0.0:
            return None
        z = P.vertices[idx].copy()
    sq = float(np.sum((z - y) ** 2))
    return NormalRecord((dim, idx), z, sq, (P.dim - 1) - dim)


def normals_from_point(P, y, rel_margin=REL_MARGIN, cone_margin=CONE_MARGIN):
    """All normals from an interior point, sorted by squared length.

    Raises OnBifurcationSet for non-generic points and ValueError for points
    that are not strictly interior.
    """
    y = np.asarray(y, dtype=float)
    if not contains_interior(P, y, tol=P.tol * max(1.0, P.diameter)):
        raise ValueError("query point is not strictly interior")
    Y = y[None, :]
    records = []
    fm = _facet_margins(P, Y)[0]
    if (np.abs(fm) < rel_margin).any():
        raise OnBifurcationSet("facet rim test within tolerance")
    for f in np.nonzero(fm > 0.0)[0]:
        n = P.facet_normals[f]
        z = y - (y @ n - P.facet_offsets[f]) * n
        records.append(NormalRecord((P.dim - 1, int(f)), z,
                                    float(np.sum((z - y) ** 2)), 0))
    if P.dim == 3:
        rel, cone = _edge_margins(P, Y)
        rel, cone = rel[0], cone[0]
        bad = (((np.abs(rel) < rel_margin) & (cone > -cone_margin))
               | ((np.abs(cone) < cone_margin) & (rel > -rel_margin)))
        if bad.any():
            raise OnBifurcationSet("edge test within tolerance")
        for e in np.nonzero((rel > 0.0) & (cone > 0.0))[0]:
            a = P._edge_origin[e]
            t = (y - a) @ P._edge_dir[e]
            z = a + t * P._edge_dir[e]
            records.append(NormalRecord((1, int(e)), z,
                                        float(np.sum((z - y) ** 2)), 1))
    vm = _vertex_margins(P, Y)[0]
    if (np.abs(vm) < cone_margin).any():
        raise OnBifurcationSet("vertex cone test within tolerance")
    for v in np.nonzero(vm > 0.0)[0]:
        z = P.vertices[v]
        records.append(NormalRecord((0, int(v)), z.copy(),
                                    float(np.sum((z - y) ** 2)), P.dim - 1))
    records.sort(key=lambda r: r.sq_dist)
    return records


def profile_of(records):
    """Morse profile of a record list (saddles exist only in 3-D)."""
    minima = sum(1 for r in records if r.morse_index == 0)
    maxima = sum(1 for r in records if r.face_key[0] == 0)
    return MorseProfile(minima, len(records) - minima - maxima, maxima)


def check_profile(profile, dim):
    """Assert the Morse count identities; raises InvariantViolation."""
    m, s, M = profile.as_tuple()
    if dim == 3:
        if m - s + M != 2:
            raise InvariantViolation(f"m - s + M == 2 failed: ({m}, {s}, {M})")
        if profile.total != 2 + 2 * s:
            raise InvariantViolation(f"total == 2 + 2*saddles failed: ({m}, {s}, {M})")
    else:
        if s != 0 or m != M:
            raise InvariantViolation(f"2-D profile must satisfy s == 0, m == M: ({m}, {s}, {M})")
    if profile.total % 2 != 0:
        raise InvariantViolation(f"normal count must be even: ({m}, {s}, {M})")


def morse_profile(P, y, rel_margin=REL_MARGIN, cone_margin=CONE_MARGIN):
    """Morse profile at a generic interior point, with invariants asserted."""
    records = normals_from_point(P, y, rel_margin, cone_margin)
    profile = profile_of(records)
    check_profile(profile, P.dim)
    return profile


def perturb_to_generic(P, y, rng=None, max_tries=100,
                       rel_margin=REL_MARGIN, cone_margin=CONE_MARGIN):
    """Nudge y off the bifurcation set without losing stable normals.

    Returns y itself when it is already generic.  Otherwise samples nearby
    interior points, keeps the generic ones, and returns the one with the
    largest count (crossing a sheet never loses the normals whose tests hold
    with full margin, and picking the max honors the side where the marginal
    pair survives).
    """
    y = np.asarray(y, dtype=float)
    rng = default_rng(0) if rng is None else rng
    interior_tol = P.tol * max(1.0, P.diameter)
    if not contains_interior(P, y, tol=interior_tol):
        raise ValueError("query point is not strictly interior")
    m, s, M, marginal = count_normals_batch(P, y[None, :], rel_margin, cone_margin)
    if not marginal[0]:
        return y
    # stable lower bound: faces active with a full margin survive any nearby move
    stable = int(_stable_count(P, y, rel_margin, cone_margin))
    best, best_count = None, -1
    step = max(P.diameter * 1e-7, 10.0 * interior_tol)
    found = 0
    for attempt in range(max_tries):
        cand = y + step * _random_unit(rng, P.dim)
        if not contains_interior(P, cand, tol=interior_tol):
            continue
        cm, cs, cM, cmarg = count_normals_batch(P, cand[None, :], rel_margin, cone_margin)
        if cmarg[0]:
            if attempt % 8 == 7:
                step *= 2.0
            continue
        total = int(cm[0] + cs[0] + cM[0])
        found += 1
        if total > best_count:
            best, best_count = cand, total
        if found >= 8:
            break
    if best is None or best_count < stable:
        raise FailedPerturbation(f"no generic point found within {max_tries} tries")
    return best


def _random_unit(rng, dim):
    v = rng.standard_normal(dim)
    n = np.linalg.norm(v)
    while n < 1e-12:  # pragma: no cover
        v = rng.standard_normal(dim)
        n = np.linalg.norm(v)
    return v / n


def _stable_count(P, y, rel_margin, cone_margin):
    Y = y[None, :]
    fm = _facet_margins(P, Y)[0]
    total = int((fm > rel_margin).sum())
    vm = _vertex_margins(P, Y)[0]
    total += int((vm > cone_margin).sum())
    if P.dim == 3:
        rel, cone = _edge_margins(P, Y)
        total += int(((rel[0] > rel_margin) & (cone[0] > cone_margin)).sum())
    return total
