import numpy as np
import pytest
from numpy.random import default_rng

from conftest import sample_interior
from polynormal import fixtures
from polynormal.bifurcation import (
    arrangement_planes,
    chamber_decomposition,
    check_crossing_rule,
    crossing_audit,
    exact_average,
    max_normals,
    monte_carlo_average,
    plane_section,
    point_on_sheet,
    sheet_planes,
    spot_check_chamber,
)
from polynormal.errors import NonTransversal, TooManyChambers
from polynormal.geometry import chebyshev_center, unit


def test_sheet_counts_regular_tetra(regular_tetra):
    planes = sheet_planes(regular_tetra)
    blue = [p for p in planes if p.color == "blue"]
    red = [p for p in planes if p.color == "red"]
    assert sum(len(p.sources) for p in blue) == 2 * regular_tetra.n_edges == 12
    assert sum(len(p.sources) for p in red) == 12
    assert len(blue) == 12 and len(red) == 12


def test_sheet_counts_prism():
    P = fixtures.right_prism()
    planes = sheet_planes(P)
    for color in ("blue", "red"):
        raw = sum(len(p.sources) for p in planes if p.color == color)
        assert raw == 2 * P.n_edges == 18


def test_cube_sheets_lie_on_facet_planes(cube):
    # every cube sheet plane coincides with a facet plane, so the interior
    # arrangement is empty; verified against the per-incidence construction
    planes = sheet_planes(cube)
    assert sum(len(p.sources) for p in planes if p.color == "blue") == 24
    for p in planes:
        hits = [f for f in range(6)
                if abs(abs(p.normal @ cube.facet_normals[f]) - 1) < 1e-9
                and abs(abs(p.offset) - 1) < 1e-9]
        assert hits, f"sheet plane {p} is not a facet plane"
    assert len([p for p in planes if p.color == "blue"]) == 6
    assert len([p for p in planes if p.color == "red"]) == 6


def test_blue_red_plane_geometry(flat_tetra_10):
    P = flat_tetra_10
    for p in sheet_planes(P):
        if p.color == "blue":
            f, e = p.sources[0]
            a, b = P.edges[e]
            # contains the edge, orthogonal to the facet
            assert abs(p.normal @ P.vertices[a] - p.offset) < 1e-9
            assert abs(p.normal @ P.vertices[b] - p.offset) < 1e-9
            assert abs(p.normal @ P.facet_normals[f]) < 1e-9
        else:
            e, v = p.sources[0]
            a, b = P.edges[e]
            d = unit(P.vertices[b] - P.vertices[a])
            assert abs(p.normal @ P.vertices[v] - p.offset) < 1e-9
            assert abs(abs(p.normal @ d) - 1.0) < 1e-9


def test_equilateral_triangle_single_chamber_count():
    P = fixtures.equilateral_triangle()
    chambers = chamber_decomposition(P)
    assert {c.count for c in chambers} == {6}
    assert abs(exact_average(P, chambers=chambers) - 6.0) < 1e-9


def test_obtuse_triangle_chambers(obtuse_triangle):
    chambers = chamber_decomposition(obtuse_triangle)
    assert {c.count for c in chambers} == {4, 6}
    # the 6-normal region touches the incenter
    inc = chebyshev_center(obtuse_triangle).center
    from polynormal.normals import morse_profile, perturb_to_generic
    y = perturb_to_generic(obtuse_triangle, inc)
    assert morse_profile(obtuse_triangle, y).total == 6


def test_regular_tetra_single_count(regular_tetra):
    chambers = chamber_decomposition(regular_tetra)
    assert {c.count for c in chambers} == {14}


def test_volume_conservation_and_spot_checks(cube, regular_tetra, obtuse_triangle,
                                             flat_tetra_10, flat_tetra_12,
                                             four_normal_tetra):
    rng = default_rng(0)
    for P in (cube, regular_tetra, obtuse_triangle, flat_tetra_10,
              flat_tetra_12, four_normal_tetra):
        chambers = chamber_decomposition(P, rng=rng)
        total = sum(c.volume for c in chambers)
        assert abs(total - P.volume) < 1e-6 * P.volume
        assert all(c.volume > 0 for c in chambers)
        assert all(spot_check_chamber(P, c, rng) for c in chambers)


def test_max_normals_fixtures(regular_tetra, cube, flat_tetra_10, flat_tetra_12):
    assert max_normals(regular_tetra)[0] == 14
    assert max_normals(cube)[0] == 26
    assert max_normals(flat_tetra_10)[0] == 10
    assert max_normals(flat_tetra_12)[0] == 12
    N, witness = max_normals(flat_tetra_10)
    assert witness.count == N and witness.profile.total == N


def test_exact_average_values(regular_tetra):
    assert abs(exact_average(regular_tetra) - 14.0) < 1e-9
    acute = fixtures.triangle_from_angles(1.2, 1.0)
    assert abs(exact_average(acute) - 6.0) < 1e-9
    obtuse = fixtures.isoceles_triangle(2.8)
    en = exact_average(obtuse)
    assert 4.0 < en < 6.0


def test_exact_average_monotone_in_obtuseness():
    values = [exact_average(fixtures.isoceles_triangle(a)) for a in (2.0, 2.6, 3.0)]
    assert values[0] > values[1] > values[2]


def test_monte_carlo_average(regular_tetra, cube, obtuse_triangle):
    est, err = monte_carlo_average(regular_tetra, 2000, seed=5)
    assert est == 14.0 and err == 0.0
    est, err = monte_carlo_average(cube, 2000, seed=5)
    assert est == 26.0 and err == 0.0
    en = exact_average(obtuse_triangle)
    est, err = monte_carlo_average(obtuse_triangle, 4000, seed=9)
    assert abs(est - en) <= 3 * err
    # reproducible
    again = monte_carlo_average(obtuse_triangle, 4000, seed=9)
    assert again == (est, err)
    with pytest.raises(ValueError):
        monte_carlo_average(cube, 500)


def test_crossing_audit_cube_no_events(cube):
    ev = crossing_audit(cube, [0, 0, 0.01], [0.02, 0.01, 0.9])
    assert ev == []


def test_crossing_audit_obtuse_triangle(obtuse_triangle):
    ev = crossing_audit(obtuse_triangle, [0.0, 0.12], [-0.7, 0.03])
    assert any(abs(e.count_after - e.count_before) == 2 for e in ev)
    assert all(check_crossing_rule(e, 2) for e in ev)
    counts = {e.count_before for e in ev} | {e.count_after for e in ev}
    assert counts <= {4, 6}


def test_crossing_audit_rule_3d(flat_tetra_10, flat_tetra_12):
    rng = default_rng(12)
    for P in (flat_tetra_10, flat_tetra_12):
        pts = sample_interior(P, 40, rng)
        for i in range(0, 38, 2):
            events = crossing_audit(P, pts[i], pts[i + 1], rng)
            for e in events:
                assert check_crossing_rule(e, 3), (e.profile_before, e.profile_after, e.colors)


def test_crossing_audit_nontransversal(flat_tetra_10):
    P = flat_tetra_10
    planes = arrangement_planes(P)
    # aim the segment through a point shared by two cutting planes
    hit = None
    for i in range(len(planes)):
        for j in range(i + 1, len(planes)):
            n1, b1 = planes[i]["normal"], planes[i]["offset"]
            n2, b2 = planes[j]["normal"], planes[j]["offset"]
            d = np.cross(n1, n2)
            if np.linalg.norm(d) < 1e-9:
                continue
            A = np.vstack([n1, n2, d])
            q = np.linalg.solve(A, [b1, b2, float(d @ P.centroid)])
            if (P.facet_normals @ q <= P.facet_offsets - 1e-6 * P.diameter).all():
                hit = (q, d)
                break
        if hit:
            break
    assert hit is not None
    q, d = hit
    from polynormal.geometry import contains_interior
    w = unit(np.cross(d, [0.3, 0.7, 0.64]))
    step = 0.05 * P.diameter
    while step > 1e-9 and not (contains_interior(P, q - step * w, 1e-7)
                               and contains_interior(P, q + step * w, 1e-7)):
        step /= 2.0
    with pytest.raises(NonTransversal):
        crossing_audit(P, q - step * w, q + step * w)


def test_adjacent_chambers_differ_by_two_or_zero(obtuse_triangle, flat_tetra_10):
    rng = default_rng(1)
    for P in (obtuse_triangle, flat_tetra_10):
        chambers = chamber_decomposition(P, rng=rng)
        sheets = sheet_planes(P)
        eps = 1e-7 * P.diameter
        maps = []
        for c in chambers:
            maps.append({tuple(np.round(v / eps).astype(np.int64)): v
                         for v in c.vertices})
        walls = 0
        for i in range(len(chambers)):
            for j in range(i + 1, len(chambers)):
                shared = maps[i].keys() & maps[j].keys()
                if len(shared) < P.dim:
                    continue
                walls += 1
                diff = abs(chambers[i].count - chambers[j].count)
                assert diff in (0, 2)
                wall_mid = np.mean([maps[i][k] for k in shared], axis=0)
                on_sheet = any(point_on_sheet(P, sp, wall_mid) for sp in sheets)
                if on_sheet:
                    assert diff == 2, (chambers[i].count, chambers[j].count, wall_mid)
                else:
                    assert diff == 0, (chambers[i].count, chambers[j].count, wall_mid)
        assert walls > 0


def test_chamber_cap(flat_tetra_10):
    with pytest.raises(TooManyChambers):
        chamber_decomposition(flat_tetra_10, cap=2)


def test_plane_section(cube):
    sec = plane_section(cube, np.array([0.0, 0.0, 1.0]), 0.0)
    assert sec is not None and len(sec) == 4
    assert np.allclose(sec[:, 2], 0.0, atol=1e-12)
    assert plane_section(cube, np.array([0.0, 0.0, 1.0]), 5.0) is None
