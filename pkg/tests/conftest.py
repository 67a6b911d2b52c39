import numpy as np
import pytest

from polynormal import fixtures


@pytest.fixture(scope="session")
def regular_tetra():
    return fixtures.regular_tetrahedron()


@pytest.fixture(scope="session")
def cube():
    return fixtures.cube()


@pytest.fixture(scope="session")
def obtuse_triangle():
    # flat isoceles triangle; the 6-normal region hugs the incenter
    return fixtures.isoceles_triangle(2.4)


@pytest.fixture(scope="session")
def four_normal_tetra():
    return fixtures.four_normal_tetrahedron()


@pytest.fixture(scope="session")
def flat_tetra_10():
    return fixtures.flat_tetrahedron_10()


@pytest.fixture(scope="session")
def flat_tetra_12():
    return fixtures.flat_tetrahedron_12()


def sample_interior(P, n, rng, tol=1e-7):
    """Uniform interior points by rejection from the bounding box."""
    lo, hi = P.bounding_box()
    out = []
    margin = tol * max(1.0, P.diameter)
    while len(out) < n:
        batch = rng.uniform(lo, hi, size=(4 * n + 64, P.dim))
        ok = (batch @ P.facet_normals.T <= P.facet_offsets - margin).all(axis=1)
        out.extend(batch[ok][: n - len(out)])
    return np.array(out)
