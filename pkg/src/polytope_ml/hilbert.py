"""Hilbert basis of the cone over ``P° x {1}`` and the codimension of ``P``.

The candidate generating set is the union, over a triangulation of ``P°``, of
the lattice points in the half-open fundamental parallelepipeds of the
simplicial subcones, together with the ray generators. Every irreducible
element of the cone lives in one of those parallelepipeds, so reducing the
candidates (ascending degree, lexicographic within a degree) leaves exactly
the Hilbert basis.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import lattice
from .polytope import Polytope, dual_polytope, is_fano


@dataclass(frozen=True)
class GradedCone:
    """Cone in Z^(d+1) graded by the last coordinate."""

    dim: int
    generators: tuple[tuple[int, ...], ...]
    facet_normals: tuple[tuple[int, ...], ...]
    section: Polytope

    def contains(self, x) -> bool:
        return all(sum(a * b for a, b in zip(u, x)) >= 0 for u in self.facet_normals)


@dataclass(frozen=True)
class HilbertBasis:
    elements: tuple[tuple[int, ...], ...]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    @property
    def degrees(self) -> list[int]:
        return [x[-1] for x in self.elements]


def _primitive_lift(point, height) -> tuple[int, ...]:
    v = [Fraction(x) for x in point] + [Fraction(height)]
    scale = lattice.lcm_of(x.denominator for x in v)
    iv = [int(x * scale) for x in v]
    g = lattice.gcd_of_vector(iv)
    return tuple(x // g for x in iv)


def cone_over(Q: Polytope) -> GradedCone:
    """Cone spanned by the rays through ``(q, 1)`` for the vertices ``q`` of ``Q``."""
    gens = tuple(_primitive_lift(v, 1) for v in Q.vertices)
    # facet u.x >= b of Q lifts to u.x - b*t >= 0
    normals = tuple(_primitive_lift(u, -b) if b != 0 else tuple(u) + (0,) for u, b in zip(Q.facets.normals, Q.facets.offsets))
    return GradedCone(dim=Q.dim + 1, generators=gens, facet_normals=normals, section=Q)


def cone_over_dual(P: Polytope) -> GradedCone:
    if not is_fano(P):
        raise ValueError("cone over the dual requires a Fano polytope")
    return cone_over(dual_polytope(P))


def _triangulation(Q: Polytope) -> list[tuple[int, ...]]:
    """Index tuples of a triangulation of ``Q`` by its own vertices."""
    if Q.dim == 2:
        n = Q.n_vertices
        return [(0, i, i + 1) for i in range(1, n - 1)]
    out = []
    for face in Q.incidence:
        if 0 in face:
            continue
        for a, b in zip(face[1:-1], face[2:]):
            out.append((0, face[0], a, b))
    return out


def _adjugate(G):
    n = len(G)
    adj = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            minor = [row[:j] + row[j + 1 :] for k, row in enumerate(G) if k != i]
            adj[j][i] = (-1) ** (i + j) * lattice.determinant(minor)
    return adj


def parallelepiped_points(G) -> list[tuple[int, ...]]:
    """Lattice points ``sum(l_i g_i)`` with ``0 <= l_i < 1``, rows ``g_i`` of ``G``."""
    det = lattice.determinant(G)
    if det == 0:
        raise ValueError("generators are linearly dependent")
    adj = _adjugate(G)
    if det < 0:
        det, adj = -det, [[-x for x in row] for row in adj]
    H, _ = lattice.hermite_normal_form(G)
    diag = [H[i][i] for i in range(len(H))]
    # coset representatives of Z^k / (row lattice of G): the box 0 <= x_i < H_ii
    axes = [np.arange(h, dtype=object) for h in diag]
    reps = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, len(diag))
    A = np.array(adj, dtype=object)
    Gm = np.array(G, dtype=object)
    coeffs = (reps @ A) % det
    pts = (coeffs @ Gm) // det
    return [tuple(int(x) for x in p) for p in pts]


def hilbert_basis(C: GradedCone) -> HilbertBasis:
    if any(g[-1] <= 0 for g in C.generators):
        raise ValueError("cone is not pointed with a positive grading")
    candidates = set(C.generators)
    for simplex in _triangulation(C.section):
        G = [list(C.generators[i]) for i in simplex]
        candidates.update(p for p in parallelepiped_points(G) if any(p))
    ordered = sorted(candidates, key=lambda x: (x[-1], x))
    N = np.array(C.facet_normals, dtype=object).T
    basis: list[tuple[int, ...]] = []
    for x in ordered:
        lower = [h for h in basis if h[-1] < x[-1]]
        if lower:
            diffs = np.array(x, dtype=object) - np.array(lower, dtype=object)
            if np.any(np.all(diffs @ N >= 0, axis=1)):
                continue
        basis.append(x)
    return HilbertBasis(tuple(sorted(basis)))


def codimension(P: Polytope) -> int:
    return len(hilbert_basis(cone_over_dual(P))) - P.dim - 1
