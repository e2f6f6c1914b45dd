"""Labelled polytope records and Plücker-variant augmentation."""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from ..hilbert import codimension
from ..pluecker import sample_permutation_variants
from ..polytope import (
    LatticePolytope,
    Polytope,
    dual_polytope,
    gorenstein_index,
    is_fano,
    is_reflexive,
    normalized_volume,
    vertices_generate_lattice,
)

LABELS = ("volume", "dual_volume", "gorenstein_index", "codimension", "reflexive")


@dataclass
class PolytopeRecord:
    id: str
    vertices: list[list[int]]
    labels: dict = field(default_factory=dict)
    variants: list[tuple[int, ...]] = field(default_factory=list)

    @property
    def polytope(self) -> LatticePolytope:
        return LatticePolytope(self.vertices)

    @property
    def dim(self) -> int:
        return len(self.vertices[0])


def compute_labels(P: Polytope, fields=LABELS) -> dict:
    """The requested subset of the five labels of a Fano polytope.

    Codimension needs a Hilbert basis and dominates the cost, so bulk
    datasets that never use it can leave it out.
    """
    unknown = set(fields) - set(LABELS)
    if unknown:
        raise ValueError(f"unknown labels {sorted(unknown)}")
    if not is_fano(P):
        raise ValueError("labels are defined for Fano polytopes only")
    out = {}
    for name in LABELS:
        if name not in fields:
            continue
        if name == "volume":
            out[name] = int(normalized_volume(P))
        elif name == "dual_volume":
            out[name] = Fraction(normalized_volume(dual_polytope(P)))
        elif name == "gorenstein_index":
            out[name] = gorenstein_index(P)
        elif name == "codimension":
            out[name] = codimension(P)
        else:
            out[name] = is_reflexive(P)
    return out


def label(P: Polytope, id: str | None = None, fields=LABELS) -> PolytopeRecord:
    if not vertices_generate_lattice(P):
        raise ValueError("the vertices do not generate the lattice")
    rec_id = id if id is not None else "p" + "_".join(",".join(map(str, v)) for v in P.vertices)
    return PolytopeRecord(
        id=rec_id,
        vertices=[list(v) for v in P.vertices],
        labels=compute_labels(P, fields),
    )


def label_tuple(rec: PolytopeRecord) -> tuple:
    return tuple(rec.labels[k] for k in ("volume", "dual_volume", "gorenstein_index", "codimension", "reflexive"))


def augment(records, variants_per_polytope: int, seed=None) -> list[PolytopeRecord]:
    """One row per distinct Plücker representation, at most ``variants_per_polytope`` each.

    Row ``j`` of a polytope carries its ``j``-th variant in ``variants[0]``;
    labels are shared. Each record draws its permutations from its own child
    seed, so the output for a record does not depend on its neighbours.
    """
    if variants_per_polytope < 1:
        raise ValueError("variants_per_polytope must be at least 1")
    seeds = np.random.SeedSequence(seed).spawn(len(records))
    out = []
    for rec, ss in zip(records, seeds):
        for pc in sample_permutation_variants(rec.vertices, variants_per_polytope, seed=ss):
            out.append(replace(rec, labels=dict(rec.labels), variants=[pc.coords]))
    return out


def with_variants(rec: PolytopeRecord, k: int, seed=None) -> PolytopeRecord:
    """Copy of ``rec`` holding up to ``k`` distinct Plücker variants."""
    pcs = sample_permutation_variants(rec.vertices, k, seed=seed)
    return replace(rec, variants=[pc.coords for pc in pcs])
