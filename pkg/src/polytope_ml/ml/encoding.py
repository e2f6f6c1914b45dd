"""Feature encodings of polytopes for the learners.

Every scheme produces a fixed-length float vector padded with zeros at the
end. The gcd schemes append gcds of subsets of the (unpadded) Plücker
coordinates before padding; ``inverse-problem`` drops the final coordinate
and appends the volume, so the dropped coordinate can serve as the target.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from ..pluecker import pluecker

SCHEMES = ("plucker", "vertices", "plucker+gcd2", "plucker+gcdl1", "onehot", "inverse-problem")
ONEHOT_WINDOW = 20


def _coords_of(P, variant):
    if variant is not None:
        return [int(x) for x in variant]
    return list(pluecker(P, strict=False).coords)


def _vertices_of(P):
    verts = getattr(P, "vertices", P)
    return [int(x) for v in verts for x in v]


def gcds_of_pairs(coords) -> list[int]:
    return [math.gcd(a, b) for a, b in itertools.combinations(coords, 2)]


def gcds_omitting_one(coords) -> list[int]:
    return [math.gcd(*(coords[:i] + coords[i + 1 :])) for i in range(len(coords))]


def natural_features(P, scheme: str, variant=None, volume=None) -> list:
    """Unpadded feature list; ``onehot`` returns the raw coordinates."""
    if scheme == "vertices":
        return _vertices_of(P)
    coords = _coords_of(P, variant)
    if scheme in ("plucker", "onehot"):
        return coords
    if scheme == "plucker+gcd2":
        return coords + gcds_of_pairs(coords)
    if scheme == "plucker+gcdl1":
        return coords + gcds_omitting_one(coords)
    if scheme == "inverse-problem":
        if volume is None:
            raise ValueError("the inverse-problem encoding needs the volume")
        return coords[:-1] + [float(volume)]
    raise ValueError(f"unknown encoding scheme {scheme!r}; expected one of {SCHEMES}")


def onehot_width(pad_to: int, window: int = ONEHOT_WINDOW) -> int:
    return pad_to * (2 * window + 3)


def _onehot(values, pad_to, window):
    # per coordinate: [underflow, -window, ..., window, overflow]; padding stays all zero
    width = 2 * window + 3
    out = np.zeros(pad_to * width)
    for i, v in enumerate(values):
        slot = 0 if v < -window else width - 1 if v > window else v + window + 1
        out[i * width + slot] = 1.0
    return out


def encode(P, scheme: str, pad_to: int, variant=None, volume=None, window: int = ONEHOT_WINDOW) -> np.ndarray:
    """Encode ``P`` (a polytope or vertex list) as a vector of length ``pad_to``.

    ``variant`` supplies precomputed Plücker coordinates (for example one
    augmented representation); otherwise they come from the stored vertex
    order. For ``onehot``, ``pad_to`` counts coordinates and the result has
    :func:`onehot_width` entries.
    """
    values = natural_features(P, scheme, variant, volume)
    if pad_to < len(values):
        raise ValueError(f"pad_to={pad_to} is shorter than the natural length {len(values)}")
    if scheme == "onehot":
        return _onehot(values, pad_to, window)
    out = np.zeros(pad_to)
    out[: len(values)] = values
    return out


def inverse_target(P, variant=None) -> int:
    """The final Plücker coordinate, withheld by the inverse-problem encoding."""
    return _coords_of(P, variant)[-1]


@dataclass
class Dataset:
    X: np.ndarray
    y: np.ndarray
    label: str
    scheme: str
    groups: list = field(default_factory=list)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=float)
        self.y = np.asarray(self.y, dtype=float)
        if len(self.X) == 0:
            raise ValueError("empty dataset")
        if self.X.ndim != 2 or len(self.X) != len(self.y):
            raise ValueError(f"inconsistent shapes X{self.X.shape} y{self.y.shape}")
        if self.groups and len(self.groups) != len(self.y):
            raise ValueError("one group id per row required")

    def __len__(self):
        return len(self.y)

    @property
    def n_features(self) -> int:
        return self.X.shape[1]

    @property
    def label_range(self) -> tuple[float, float]:
        return float(self.y.min()), float(self.y.max())

    def subset(self, idx) -> "Dataset":
        idx = np.asarray(idx, dtype=int)
        groups = [self.groups[i] for i in idx] if self.groups else []
        return Dataset(self.X[idx], self.y[idx], self.label, self.scheme, groups)


def build_dataset(records, scheme: str, label: str, pad_to: int | None = None) -> Dataset:
    """Feature matrix for labelled records, one row per record.

    Augmented records (see :func:`polytope_ml.data.records.augment`) carry
    their representation in ``variants[0]``. For ``inverse-problem`` the
    target is the withheld coordinate and ``label`` is ignored.
    """
    if not records:
        raise ValueError("no records")
    rows, ys = [], []
    for rec in records:
        variant = rec.variants[0] if rec.variants else None
        volume = rec.labels.get("volume")
        rows.append(natural_features(rec.vertices, scheme, variant, volume))
        if scheme == "inverse-problem":
            ys.append(inverse_target(rec.vertices, variant))
        else:
            ys.append(float(rec.labels[label]))
    natural = max(len(r) for r in rows)
    pad_to = natural if pad_to is None else pad_to
    if pad_to < natural:
        raise ValueError(f"pad_to={pad_to} is shorter than the natural length {natural}")
    if scheme == "onehot":
        X = np.stack([_onehot(r, pad_to, ONEHOT_WINDOW) for r in rows])
    else:
        X = np.zeros((len(rows), pad_to))
        for i, r in enumerate(rows):
            X[i, : len(r)] = r
    name = "withheld_coordinate" if scheme == "inverse-problem" else label
    return Dataset(X, np.array(ys), name, scheme, [rec.id for rec in records])
