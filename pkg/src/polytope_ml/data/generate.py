"""Seeded generators for Fano polygons and canonical Fano 3-topes.

Two samplers are available. ``"hull"`` draws 3-8 primitive points in the
coordinate box and keeps their hull if it passes the acceptance predicate.
``"grow"`` starts from a unimodular image of the reflexive simplex and adds
random primitive box points one at a time, keeping a point only while the
predicate still holds; it reaches far more distinct classes per second,
because the predicates (small Gorenstein index, a single interior point)
strongly favour polytopes hugging the origin.
"""

from __future__ import annotations

import collections
import itertools
import logging

import numpy as np

from .. import lattice
from ..pluecker import pluecker
from ..polytope import (
    DegeneratePolytopeError,
    LatticePolytope,
    contains_origin_interior,
    hull,
    is_canonical_fano,
    is_fano,
    is_reflexive,
    is_unimodular_equivalent,
    lattice_points,
    normalized_volume,
    transform,
    vertices_generate_lattice,
)

log = logging.getLogger(__name__)


class GenerationStarvedError(RuntimeError):
    pass


def _gorenstein_from_facets(P) -> int:
    # gorenstein_index without the Fano check, for intermediate walk states
    return lattice.lcm_of(-b for b in P.facets.offsets)


def _primitive_box(d: int, m: int) -> np.ndarray:
    pts = [p for p in itertools.product(range(-m, m + 1), repeat=d) if any(p) and lattice.gcd_of_vector(p) == 1]
    return np.array(pts, dtype=np.int64)


class EquivalenceIndex:
    """Set of polytopes modulo GL(d, Z).

    Candidates are bucketed by cheap invariants and only compared pairwise
    (via :func:`is_unimodular_equivalent`) inside a bucket.
    """

    def __init__(self):
        self._buckets = collections.defaultdict(list)

    @staticmethod
    def key(P):
        return (
            P.dim,
            P.n_vertices,
            normalized_volume(P),
            len(lattice_points(P)),
            tuple(sorted(P.facets.offsets)),
            tuple(sorted(abs(x) for x in pluecker(P, strict=False).coords)),
        )

    def add(self, P) -> bool:
        """Insert ``P``; return False if an equivalent polytope is present."""
        bucket = self._buckets[self.key(P)]
        if any(is_unimodular_equivalent(P, Q) is not None for Q in bucket):
            return False
        bucket.append(P)
        return True

    def __len__(self):
        return sum(len(b) for b in self._buckets.values())


_SEED_SIMPLEX = {
    2: [(1, 0), (0, 1), (-1, -1)],
    3: [(1, 0, 0), (0, 1, 0), (0, 0, 1), (-1, -1, -1)],
}


def _grow(d, box, accept, rng, max_coord, max_n, stop_prob, max_steps, reach):
    """Growth walk from a random unimodular image of the seed simplex.

    Yields every state the walk passes through, starting with the seed.
    """
    U = lattice.random_unimodular(d, rng, steps=int(rng.integers(0, 4)), max_entry=max_coord)
    P = transform(LatticePolytope(_SEED_SIMPLEX[d]), U)
    yield P
    for _ in range(max_steps):
        if rng.random() < stop_prob:
            return
        A = np.array(P.facets.normals, dtype=np.int64)
        b = np.array([int(x) for x in P.facets.offsets], dtype=np.int64)
        shortfall = (b[None, :] - box @ A.T).max(axis=1)
        outside = box[(shortfall > 0) & (shortfall <= reach)]
        if len(outside) == 0:
            return
        q = tuple(int(x) for x in outside[rng.integers(len(outside))])
        Q = hull(list(P.vertices) + [q])
        if max_n is not None and Q.n_vertices > max_n:
            continue
        if accept(Q):
            P = Q
            yield P


def _reflexive_walk(box, rng, max_steps):
    """Walk through reflexive 3-topes, yielding each state.

    A step either adds a box point just beyond one facet or removes a vertex
    (re-hulling the remaining lattice points); it is kept only if every facet
    stays at height one. Moving down as well as up keeps the walk from
    piling up near the seed.
    """
    P = LatticePolytope(_SEED_SIMPLEX[3])
    yield P
    for _ in range(max_steps):
        if rng.random() < 0.5:
            A = np.array(P.facets.normals, dtype=np.int64)
            b = np.array([int(x) for x in P.facets.offsets], dtype=np.int64)
            shortfall = (b[None, :] - box @ A.T).max(axis=1)
            outside = box[(shortfall > 0) & (shortfall <= 1)]
            if len(outside) == 0:
                continue
            q = tuple(int(x) for x in outside[rng.integers(len(outside))])
            Q = hull(list(P.vertices) + [q])
        else:
            v = P.vertices[rng.integers(P.n_vertices)]
            try:
                Q = hull([p for p in lattice_points(P) if p != v])
            except DegeneratePolytopeError:
                continue
        if all(b == -1 for b in Q.facets.offsets):
            P = Q
            yield P


def _draw_hull(d, box, rng, lo=3, hi=8):
    k = int(rng.integers(lo, hi + 1))
    rows = box[rng.integers(len(box), size=k)]
    return hull([tuple(int(x) for x in r) for r in rows])


def _generate(d, count, seed, accept, final, max_coord, n_vertices, method, max_attempts, reach, reflexive_walk=False):
    if count < 1:
        raise ValueError("count must be at least 1")
    rng = np.random.default_rng(seed)
    box = _primitive_box(d, max_coord)
    wanted = None if n_vertices is None else set(np.atleast_1d(n_vertices).tolist())
    budget = max_attempts if max_attempts is not None else 400 * count + 5000
    index = EquivalenceIndex()
    out: list[LatticePolytope] = []
    rejected = collections.Counter()
    attempts = since_accept = 0
    def candidates():
        if method == "grow" and reflexive_walk:
            return _reflexive_walk(box, rng, 200)
        if method == "grow":
            max_n = None if wanted is None else max(wanted)
            return _grow(d, box, accept, rng, max_coord, max_n, 0.08, 40 if d == 3 else 20, reach)
        if method == "hull":
            try:
                return [_draw_hull(d, box, rng, lo=3 if d == 2 else 4)]
            except DegeneratePolytopeError:
                rejected["degenerate"] += 1
                return []
        raise ValueError(f"unknown sampling method {method!r}")

    while len(out) < count:
        if since_accept >= budget:
            raise GenerationStarvedError(
                f"no new polytope accepted in {budget} attempts "
                f"({len(out)}/{count} generated; rejections: {dict(rejected)})"
            )
        attempts += 1
        since_accept += 1
        for P in candidates():
            if wanted is not None and P.n_vertices not in wanted:
                rejected["vertex count"] += 1
                continue
            if not contains_origin_interior(P):
                rejected["origin not interior"] += 1
                continue
            if not vertices_generate_lattice(P):
                rejected["vertices do not generate lattice"] += 1
                continue
            reason = final(P)
            if reason:
                rejected[reason] += 1
                continue
            if not index.add(P):
                rejected["duplicate"] += 1
                continue
            out.append(P)
            since_accept = 0
            if len(out) == count:
                break
    log.info("generated %d polytopes in %d attempts; rejections %s", count, attempts, dict(rejected))
    return out


def generate_fano_polygons(
    count: int,
    max_coord: int = 5,
    max_gorenstein: int = 30,
    seed=None,
    n_vertices=None,
    method: str = "grow",
    max_attempts: int | None = None,
) -> list[LatticePolytope]:
    """Pairwise inequivalent Fano polygons with Gorenstein index <= ``max_gorenstein``.

    ``n_vertices`` (an int or a collection) stratifies the output by vertex count.
    """

    def accept(Q):
        return _gorenstein_from_facets(Q) <= max_gorenstein

    def final(P):
        if not is_fano(P):
            return "not Fano"
        if _gorenstein_from_facets(P) > max_gorenstein:
            return "Gorenstein index too large"
        return None

    return _generate(2, count, seed, accept, final, max_coord, n_vertices, method, max_attempts, reach=10**6)


def generate_canonical_fano_3d(
    count: int,
    max_coord: int = 3,
    seed=None,
    n_vertices=None,
    reflexive: bool | None = None,
    method: str = "grow",
    max_attempts: int | None = None,
) -> list[LatticePolytope]:
    """Pairwise inequivalent canonical Fano 3-topes whose vertices generate Z^3.

    ``reflexive`` restricts the output to one class, for building balanced
    classification sets.
    """

    def accept(Q):
        return lattice_points(Q, interior=True) == [(0, 0, 0)]

    def final(P):
        if not is_canonical_fano(P):
            return "not canonical Fano"
        if reflexive is not None and is_reflexive(P) != reflexive:
            return "reflexivity filter"
        return None

    return _generate(
        3, count, seed, accept, final, max_coord, n_vertices, method, max_attempts, reach=1, reflexive_walk=reflexive is True
    )


def enumerate_reflexive_polygons(box: int = 3) -> list[LatticePolytope]:
    """Representatives of the GL(2, Z) classes of reflexive polygons.

    Depth-first search over sets of primitive points in ``[-box, box]^2`` in
    convex position, pruned as soon as the hull acquires a nonzero interior
    lattice point (a property inherited by every superset). A polygon whose
    only interior lattice point is the origin is reflexive.
    """
    pts = [tuple(int(x) for x in p) for p in _primitive_box(2, box)]
    found: list[LatticePolytope] = []

    def extend(chosen, start):
        for i in range(start, len(pts)):
            cand = chosen + [pts[i]]
            if len(cand) >= 3:
                try:
                    P = hull(cand)
                except DegeneratePolytopeError:
                    continue
                if P.n_vertices != len(cand):
                    continue
                if any(any(p) for p in lattice_points(P, interior=True)):
                    continue
                if contains_origin_interior(P):
                    found.append(P)
            # reflexive polygons have at most six vertices
            if len(cand) < 6:
                extend(cand, i + 1)

    extend([], 0)
    index = EquivalenceIndex()
    classes = []
    # visit small-coordinate polygons first so they become the representatives
    found.sort(key=lambda P: (max(abs(x) for v in P.vertices for x in v), P.vertices))
    for P in found:
        if is_reflexive(P) and index.add(P):
            classes.append(P)
    return sorted(classes, key=lambda P: (P.n_vertices, normalized_volume(P), P.vertices))
