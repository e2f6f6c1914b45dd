"""Lattice and rational polytopes in dimension 2 and 3 with exact invariants.

Vertices are tuples of ``int`` (lattice) or ``Fraction`` (rational). Facets are
stored as inward inequalities ``u . x >= b`` with ``u`` a primitive integer
vector, so a polytope contains the origin in its interior exactly when every
offset ``b`` is negative.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import lattice


class DegeneratePolytopeError(ValueError):
    pass


@dataclass(frozen=True)
class HalfspaceSystem:
    """Irredundant facet inequalities ``normals[f] . x >= offsets[f]``."""

    normals: tuple[tuple[int, ...], ...]
    offsets: tuple[Fraction, ...]

    def __len__(self):
        return len(self.normals)

    def tight(self, point) -> list[int]:
        return [f for f, (u, b) in enumerate(zip(self.normals, self.offsets)) if _dot(u, point) == b]


def _dot(u, v):
    return sum(a * b for a, b in zip(u, v))


def _sub(a, b):
    return tuple(x - y for x, y in zip(a, b))


def _as_number(x):
    if isinstance(x, Fraction):
        return int(x) if x.denominator == 1 else x
    if isinstance(x, (int, np.integer)):
        return int(x)
    raise TypeError(f"non-exact coordinate {x!r}")


def _primitive(u):
    g = lattice.gcd_of_vector(u)
    return tuple(x // g for x in u)


def _common_scale(points) -> int:
    return lattice.lcm_of(Fraction(x).denominator for p in points for x in p)


class Polytope:
    """Common machinery for lattice and rational polytopes."""

    def __init__(self, vertices: Sequence[Sequence], facets: HalfspaceSystem | None = None):
        self.vertices = tuple(tuple(_as_number(x) for x in v) for v in vertices)
        self.dim = len(self.vertices[0])
        if facets is not None:
            self.__dict__["facets"] = facets

    def __repr__(self):
        return f"{type(self).__name__}({[list(v) for v in self.vertices]})"

    def __eq__(self, other):
        return isinstance(other, Polytope) and set(self.vertices) == set(other.vertices)

    def __hash__(self):
        return hash(frozenset(self.vertices))

    @property
    def n_vertices(self) -> int:
        return len(self.vertices)

    @cached_property
    def facets(self) -> HalfspaceSystem:
        return _facets_of(self.vertices)

    @cached_property
    def incidence(self) -> list[list[int]]:
        """Vertex indices on each facet (2d: the two endpoints; 3d: cyclic order)."""
        out = []
        for u, b in zip(self.facets.normals, self.facets.offsets):
            idx = [i for i, v in enumerate(self.vertices) if _dot(u, v) == b]
            if self.dim == 3:
                idx = _cyclic_facet_order(self.vertices, idx, u)
            out.append(idx)
        return out

    @cached_property
    def neighbours(self) -> list[list[int]]:
        n = self.n_vertices
        if self.dim == 2:
            return [[(i - 1) % n, (i + 1) % n] for i in range(n)]
        adj = [set() for _ in range(n)]
        for face in self.incidence:
            for a, b in zip(face, face[1:] + face[:1]):
                adj[a].add(b)
                adj[b].add(a)
        return [sorted(s) for s in adj]

    def order_of(self, points) -> list[int]:
        """Permutation ``order`` with ``vertices[order[i]] == points[i]``."""
        index = {v: i for i, v in enumerate(self.vertices)}
        try:
            order = [index[tuple(_as_number(x) for x in p)] for p in points]
        except KeyError as exc:
            raise ValueError(f"{exc.args[0]} is not a vertex") from None
        if len(set(order)) != self.n_vertices:
            raise ValueError("points are not a listing of the vertices")
        return order


class LatticePolytope(Polytope):
    pass


class RationalPolytope(Polytope):
    pass


def _make(vertices, facets=None) -> Polytope:
    if all(Fraction(x).denominator == 1 for v in vertices for x in v):
        return LatticePolytope(vertices, facets)
    return RationalPolytope(vertices, facets)


# -- hulls ---------------------------------------------------------------


def hull(points: Iterable[Sequence]) -> Polytope:
    """Convex hull of exact points in dimension 2 or 3.

    2d vertices are returned counterclockwise starting from the
    lexicographic minimum; 3d vertices are sorted lexicographically.
    """
    pts = sorted({tuple(_as_number(x) for x in p) for p in points})
    if not pts:
        raise DegeneratePolytopeError("degenerate polytope")
    d = len(pts[0])
    if d not in (2, 3):
        raise ValueError(f"dimension {d} is not supported")
    if any(len(p) != d for p in pts):
        raise ValueError("points of mixed dimension")
    if d == 2:
        verts = _hull_2d(pts)
        return _make(verts)
    verts, facets = _hull_3d(pts)
    return _make(verts, facets)


def _turn(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def _hull_2d(pts):
    # monotone chain; input is sorted and duplicate free
    if len(pts) < 3:
        raise DegeneratePolytopeError("degenerate polytope")
    lower, upper = [], []
    for p in pts:
        while len(lower) >= 2 and _turn(lower[-2], lower[-1], p) <= 0:
            lower.pop()
        lower.append(p)
    for p in reversed(pts):
        while len(upper) >= 2 and _turn(upper[-2], upper[-1], p) <= 0:
            upper.pop()
        upper.append(p)
    verts = lower[:-1] + upper[:-1]
    if len(verts) < 3:
        raise DegeneratePolytopeError("degenerate polytope")
    return verts


def _hull_3d(pts):
    scale = _common_scale(pts)
    ipts = [tuple(int(x * scale) for x in p) for p in pts]
    base = ipts[0]
    diffs = [_sub(p, base) for p in ipts[1:]]
    if not _spans_3d(diffs):
        raise DegeneratePolytopeError("degenerate polytope")
    planes = _supporting_planes_3d(ipts)
    normals = sorted(planes)
    offsets = tuple(Fraction(planes[u], scale) for u in normals)
    facets = HalfspaceSystem(tuple(normals), offsets)
    verts = []
    for p, ip in zip(pts, ipts):
        tight = [u for u in normals if _dot(u, ip) == planes[u]]
        if len(tight) >= 3 and _spans_3d(tight):
            verts.append(p)
    return verts, facets


def _spans_3d(vectors) -> bool:
    """Exact test that integer 3-vectors span R^3."""
    for i, a in enumerate(vectors):
        for b in vectors[i + 1 :]:
            n = (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])
            if any(n):
                return any(_dot(n, c) for c in vectors)
    return False


def _supporting_planes_3d(ipts) -> dict:
    """Map primitive inward normal -> integer offset for every facet plane."""
    P = np.array(ipts, dtype=object)
    small = max(abs(x) for p in ipts for x in p) < 50_000
    if small:
        P = P.astype(np.int64)
    n = len(ipts)
    idx = np.array(list(itertools.combinations(range(n), 3)))
    a, b, c = P[idx[:, 0]], P[idx[:, 1]], P[idx[:, 2]]
    normals = np.cross(b - a, c - a)
    keep = np.any(normals != 0, axis=1)
    normals, a = normals[keep], a[keep]
    dots = normals @ P.T
    level = np.sum(normals * a, axis=1)
    above = np.all(dots >= level[:, None], axis=1)
    below = np.all(dots <= level[:, None], axis=1)
    planes = {}
    for u, off, up, down in zip(normals, level, above, below):
        if not (up or down):
            continue
        u = tuple(int(x) for x in u)
        off = int(off)
        if down:
            u, off = tuple(-x for x in u), -off
        g = lattice.gcd_of_vector(u)
        planes[tuple(x // g for x in u)] = off // g
    return planes


def _facets_of(vertices) -> HalfspaceSystem:
    d = len(vertices[0])
    if d == 3:
        return _hull_3d(sorted(vertices))[1]
    scale = _common_scale(vertices)
    n = len(vertices)
    turns = [_turn(vertices[i - 2], vertices[i - 1], vertices[i]) for i in range(n)]
    if n < 3 or not (all(t > 0 for t in turns) or all(t < 0 for t in turns)):
        raise ValueError("2d vertices must be listed in cyclic order and be in convex position; use hull()")
    orient = 1 if turns[0] > 0 else -1
    normals, offsets = [], []
    for i in range(n):
        a, b = vertices[i], vertices[(i + 1) % n]
        e = tuple(int((y - x) * scale) for x, y in zip(a, b))
        u = _primitive((-orient * e[1], orient * e[0]))
        normals.append(u)
        offsets.append(Fraction(_dot(u, a)))
    return HalfspaceSystem(tuple(normals), tuple(offsets))


def _cyclic_facet_order(vertices, idx, normal):
    # project along the largest normal component; the projection is injective on the facet
    drop = max(range(3), key=lambda k: abs(normal[k]))
    keep = [k for k in range(3) if k != drop]
    proj = {tuple(vertices[i][k] for k in keep): i for i in idx}
    ring = _hull_2d(sorted(proj))
    return [proj[p] for p in ring]


# -- basic predicates and constructions ----------------------------------


def facet_system(P: Polytope) -> HalfspaceSystem:
    return P.facets


def contains_origin_interior(P: Polytope) -> bool:
    return all(b < 0 for b in P.facets.offsets)


def is_fano(P: Polytope) -> bool:
    return (
        isinstance(P, LatticePolytope)
        and contains_origin_interior(P)
        and all(lattice.is_primitive(v) for v in P.vertices)
    )


def is_canonical_fano(P: Polytope) -> bool:
    if not is_fano(P):
        return False
    return lattice_points(P, interior=True) == [(0,) * P.dim]


def vertices_generate_lattice(P: Polytope) -> bool:
    return lattice.lattice_index([list(v) for v in P.vertices]) == 1


def dual_polytope(P: Polytope) -> RationalPolytope | LatticePolytope:
    """Polar dual ``{v : u . v >= -1 for all u in P}``.

    One dual vertex ``u_f / |b_f|`` per facet; the dual facets come for free
    from the vertices of ``P``.
    """
    if not contains_origin_interior(P):
        raise ValueError("dual unbounded: origin is not an interior point")
    verts = [tuple(Fraction(x) / -b for x in u) for u, b in zip(P.facets.normals, P.facets.offsets)]
    normals, offsets = [], []
    for v in P.vertices:
        scale = _common_scale([v])
        iv = tuple(int(x * scale) for x in v)
        g = lattice.gcd_of_vector(iv)
        normals.append(tuple(x // g for x in iv))
        offsets.append(Fraction(-scale, g))
    if P.dim == 2:
        # facet f of the dual joins dual vertices f-1 and f in counterclockwise order
        verts = _hull_2d(sorted(verts))
        return _make(verts)
    order = sorted(range(len(normals)), key=lambda i: normals[i])
    facets = HalfspaceSystem(tuple(normals[i] for i in order), tuple(offsets[i] for i in order))
    return _make(sorted(verts), facets)


def dilate(P: Polytope, r: int) -> Polytope:
    """``r * P``; ``r = 0`` gives the one-point polytope ``{0}``."""
    r = int(r)
    if r < 0:
        raise ValueError("dilation factor must be non-negative")
    if r == 0:
        point = LatticePolytope([(0,) * P.dim], HalfspaceSystem(P.facets.normals, (Fraction(0),) * len(P.facets)))
        return point
    verts = [tuple(r * x for x in v) for v in P.vertices]
    facets = HalfspaceSystem(P.facets.normals, tuple(r * b for b in P.facets.offsets))
    return _make(verts, facets)


def transform(P: Polytope, M) -> Polytope:
    """Image of ``P`` under the linear map ``x -> M x``."""
    return hull([tuple(_dot(row, v) for row in M) for v in P.vertices])


def lattice_points(P: Polytope, interior: bool = False) -> list[tuple[int, ...]]:
    """Integer points of ``P`` (or of its interior), sorted lexicographically."""
    lo = [math.floor(min(v[k] for v in P.vertices)) for k in range(P.dim)]
    hi = [math.ceil(max(v[k] for v in P.vertices)) for k in range(P.dim)]
    axes = [np.arange(a, b + 1, dtype=np.int64) for a, b in zip(lo, hi)]
    grid = np.stack(np.meshgrid(*axes, indexing="ij"), axis=-1).reshape(-1, P.dim)
    A = np.array(P.facets.normals, dtype=np.int64)
    if interior:
        bound = [math.floor(b) + 1 for b in P.facets.offsets]
    else:
        bound = [math.ceil(b) for b in P.facets.offsets]
    inside = np.all(grid @ A.T >= np.array(bound, dtype=np.int64), axis=1)
    return [tuple(int(x) for x in p) for p in grid[inside]]


# -- volume, Gorenstein index, reflexivity ------------------------------------


def _fan_simplices(P: Polytope):
    """Simplices (as vertex tuples) of the fan triangulation from the apex."""
    apex = (0,) * P.dim if contains_origin_interior(P) else P.vertices[0]
    for face in P.incidence:
        if P.dim == 2:
            yield apex, P.vertices[face[0]], P.vertices[face[1]]
        else:
            for a, b in zip(face[1:-1], face[2:]):
                yield apex, P.vertices[face[0]], P.vertices[a], P.vertices[b]


def simplex_normalized_volume(simplex) -> Fraction | int:
    apex = simplex[0]
    rows = [_sub(v, apex) for v in simplex[1:]]
    scale = _common_scale(rows)
    det = lattice.determinant([[int(x * scale) for x in row] for row in rows])
    return _as_number(Fraction(abs(det), scale ** len(rows)))


def normalized_volume(P: Polytope) -> Fraction | int:
    """``d!`` times the Euclidean volume, summed over a fan triangulation."""
    if P.n_vertices <= P.dim:
        raise DegeneratePolytopeError("degenerate polytope")
    total = sum(Fraction(simplex_normalized_volume(s)) for s in _fan_simplices(P))
    return _as_number(total)


def gorenstein_index(P: Polytope) -> int:
    """Smallest k with k * P° a lattice polytope.

    The dual vertex of the facet ``u.x >= b`` is ``u / |b|``; with ``u``
    primitive and ``b`` integral its denominators have lcm exactly ``|b|``,
    so the index is the lcm of the facet heights.
    """
    if not is_fano(P):
        raise ValueError("Gorenstein index is defined for Fano polytopes only")
    return lattice.lcm_of(-b for b in P.facets.offsets)


def gorenstein_index_via_dual(P: Polytope) -> int:
    """Same quantity read off the vertices of the constructed dual polytope."""
    if not is_fano(P):
        raise ValueError("Gorenstein index is defined for Fano polytopes only")
    return lattice.lcm_of(Fraction(x).denominator for v in dual_polytope(P).vertices for x in v)


def is_reflexive(P: Polytope) -> bool:
    return is_fano(P) and gorenstein_index(P) == 1


# -- unimodular equivalence -----------------------------------------------------


def _frames(P: Polytope):
    for i, nbrs in enumerate(P.neighbours):
        for rest in itertools.permutations(nbrs, P.dim - 1):
            yield (i, *rest)


def is_unimodular_equivalent(P: Polytope, Q: Polytope):
    """A matrix ``M`` in GL(d, Z) with ``M . vert(P) == vert(Q)``, or ``None``.

    Fixes one frame of ``P`` (a vertex and ``d - 1`` of its neighbours,
    linearly independent) and tries every frame of ``Q`` as its image. The
    candidate maps ``B^T adj(A^T) / det(A)`` are screened for integrality in
    bulk before the vertex sets are compared.
    """
    if P.dim != Q.dim or P.n_vertices != Q.n_vertices:
        return None
    frame = None
    for f in _frames(P):
        if lattice.determinant([list(P.vertices[i]) for i in f]) != 0:
            frame = f
            break
    if frame is None:
        return None
    At = lattice.transpose([list(P.vertices[i]) for i in frame])
    det = lattice.determinant(At)
    adj = _adjugate(At)
    if any(isinstance(x, Fraction) for v in P.vertices + Q.vertices for x in v):
        return _equivalence_exact(P, Q, At)
    big = max(abs(x) for v in P.vertices + Q.vertices for x in v) > 1000
    dtype = object if big else np.int64
    frames_q = list(_frames(Q))
    QV = np.array(Q.vertices, dtype=dtype)
    B = QV[np.array(frames_q)]  # (F, d, d) frame vertices as rows
    num = np.transpose(B, (0, 2, 1)) @ np.array(adj, dtype=dtype)
    ok = np.all(num % det == 0, axis=(1, 2))
    target = set(Q.vertices)
    PV = np.array(P.vertices, dtype=dtype)
    for k in np.nonzero(ok)[0]:
        M = [[int(x) // det for x in row] for row in num[k]]
        if abs(lattice.determinant(M)) != 1:
            continue
        img = PV @ np.array(M, dtype=dtype).T
        if {tuple(int(x) for x in row) for row in img} == target:
            return M
    return None


def _adjugate(A):
    n = len(A)
    if n == 1:
        return [[1]]
    return [
        [(-1) ** (i + j) * lattice.determinant([r[:i] + r[i + 1 :] for k, r in enumerate(A) if k != j]) for j in range(n)]
        for i in range(n)
    ]


def _equivalence_exact(P, Q, At):
    A_inv = lattice.inverse_rational(At)
    target = set(Q.vertices)
    for g in _frames(Q):
        Bt = lattice.transpose([list(Q.vertices[i]) for i in g])
        M = lattice.matmul(Bt, A_inv)
        if any(x.denominator != 1 for row in M for x in row):
            continue
        M = [[int(x) for x in row] for row in M]
        if abs(lattice.determinant(M)) != 1:
            continue
        if {tuple(_dot(row, v) for row in M) for v in P.vertices} == target:
            return M
    return None
