import numpy as np
import pytest

from polytope_ml.data.generate import generate_canonical_fano_3d, generate_fano_polygons
from polytope_ml.hilbert import cone_over_dual, codimension, hilbert_basis, parallelepiped_points
from polytope_ml.polytope import LatticePolytope, dilate, dual_polytope, lattice_points


def slab_hilbert_basis(P):
    """Irreducible lattice points of the cone over the dual, by brute force.

    Every Hilbert basis element has degree below the sum of the degrees of
    d + 1 ray generators, so enumerating the slabs k * P° up to that bound
    and discarding sums finds all of them.
    """
    C = cone_over_dual(P)
    top = (P.dim + 1) * max(g[-1] for g in C.generators)
    D = dual_polytope(P)
    points = []
    for k in range(1, top + 1):
        points += [p + (k,) for p in lattice_points(dilate(D, k))]
    pts = np.array(points, dtype=np.int64)
    N = np.array(C.facet_normals, dtype=np.int64).T
    basis = []
    for x in pts:
        lower = pts[pts[:, -1] < x[-1]]
        if len(lower) and np.any(np.all((x - lower) @ N >= 0, axis=1)):
            continue
        basis.append(tuple(int(v) for v in x))
    return sorted(basis)


def test_pentagon_and_dual(pentagon):
    assert len(hilbert_basis(cone_over_dual(pentagon))) == 8
    assert codimension(pentagon) == 5
    D = dual_polytope(pentagon)
    assert len(hilbert_basis(cone_over_dual(D))) == 6
    assert codimension(D) == 3


def test_triangle_codimension(triangle):
    # the cone over the dual triangle has 10 lattice points at degree 1, all irreducible
    H = hilbert_basis(cone_over_dual(triangle))
    assert len(H) == 10
    assert set(H.degrees) == {1}
    assert codimension(triangle) == 7


def test_matches_slab_oracle_on_generated():
    polys = generate_fano_polygons(25, seed=2, max_gorenstein=4) + generate_canonical_fano_3d(6, seed=2)
    for P in polys:
        assert list(hilbert_basis(cone_over_dual(P))) == slab_hilbert_basis(P)


def test_non_reflexive_has_higher_degrees():
    P = LatticePolytope([(1, 0), (0, 1), (-1, -3)])
    H = hilbert_basis(cone_over_dual(P))
    assert max(H.degrees) > 1
    assert list(H) == slab_hilbert_basis(P)


def test_parallelepiped_points_count_is_determinant():
    G = [[1, 0, 1], [0, 1, 1], [-1, -3, 3]]
    pts = parallelepiped_points(G)
    assert len(pts) == abs(np.linalg.det(np.array(G))).round()
    assert (0, 0, 0) in pts
    with pytest.raises(ValueError):
        parallelepiped_points([[1, 0], [2, 0]])


def test_requires_fano():
    with pytest.raises(ValueError):
        cone_over_dual(LatticePolytope([(0, 0), (1, 0), (0, 1)]))
