"""Plücker coordinates of a vertex matrix.

The coordinates are the maximal minors of a basis of the saturated integer
kernel of the ``d x n`` vertex matrix, taken over the ``(n - d)``-subsets of
columns in lexicographic order and normalised projectively: divided by their
content and signed so the first nonzero entry is positive.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import lattice
from .polytope import Polytope


class LatticeGenerationError(ValueError):
    pass


@dataclass(frozen=True)
class PlueckerCoordinates:
    n: int
    d: int
    coords: tuple[int, ...]

    def __len__(self):
        return len(self.coords)

    def __iter__(self):
        return iter(self.coords)


def _vertex_list(P):
    if isinstance(P, Polytope):
        return [list(v) for v in P.vertices]
    return [[int(x) for x in v] for v in P]


def vertex_matrix(P, order=None) -> lattice.IntMatrix:
    """``d x n`` matrix whose column ``i`` is vertex ``order[i]``."""
    verts = _vertex_list(P)
    n = len(verts)
    if order is None:
        order = range(n)
    order = list(order)
    if sorted(order) != list(range(n)):
        raise ValueError(f"order {order} is not a permutation of {n} vertices")
    return lattice.transpose([verts[i] for i in order])


def normalize(coords) -> tuple[int, ...]:
    g = lattice.gcd_of_vector(coords)
    if g == 0:
        raise ArithmeticError("all Plücker minors vanish")
    sign = next(1 if x > 0 else -1 for x in coords if x)
    return tuple(sign * x // g for x in coords)


def pluecker_of_matrix(V, strict: bool = True) -> tuple[int, ...]:
    d, n = len(V), len(V[0])
    if strict and lattice.lattice_index(lattice.transpose(V)) != 1:
        raise LatticeGenerationError("non-saturated vertex lattice: the vertices do not generate Z^d")
    K = lattice.integer_kernel_basis(V)
    k = n - d
    if len(K) != k:
        raise LatticeGenerationError("vertex matrix does not have full row rank")
    minors = [
        lattice.determinant([[row[c] for c in cols] for row in K])
        for cols in itertools.combinations(range(n), k)
    ]
    return normalize(minors)


def pluecker(P, order=None, strict: bool = True) -> PlueckerCoordinates:
    """Plücker coordinates of ``P`` with its vertices listed in ``order``.

    ``P`` may be a polytope or a plain sequence of integer vertices; with no
    ``order`` the stored vertex order is used. With ``strict`` (the default)
    vertex sets that only span a proper sublattice of Z^d are rejected, since
    their coordinates no longer determine the polytope.
    """
    V = vertex_matrix(P, order)
    return PlueckerCoordinates(n=len(V[0]), d=len(V), coords=pluecker_of_matrix(V, strict))


def n_coordinates(n: int, d: int) -> int:
    return math.comb(n, n - d)


def sample_permutation_variants(P, k: int, seed=None, max_tries: int | None = None) -> list[PlueckerCoordinates]:
    """Up to ``k`` distinct coordinate vectors over vertex reorderings.

    The stored (identity) order always comes first; the rest come from
    uniformly shuffled orders. Small vertex counts enumerate every
    permutation in random order so no variant can be missed.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    verts = _vertex_list(P)
    n = len(verts)
    rng = np.random.default_rng(seed)
    first = pluecker(verts)
    out, seen = [first], {first.coords}
    if k == 1:
        return out
    if math.factorial(n) <= 5040:
        perms = list(itertools.permutations(range(n)))
        candidates = (perms[i] for i in rng.permutation(len(perms)))
    else:
        budget = max_tries if max_tries is not None else 50 * k
        candidates = (tuple(rng.permutation(n)) for _ in range(budget))
    for perm in candidates:
        pc = pluecker(verts, perm)
        if pc.coords not in seen:
            seen.add(pc.coords)
            out.append(pc)
            if len(out) == k:
                break
    return out
