"""Experiment workflows: build data, train, evaluate, write tables and figures.

Every workflow writes a metrics CSV whose first line is ``# config: {json}``
with the fully resolved settings, plus SVG figures carrying the same config.
Table schemas are listed in :data:`SCHEMAS`.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np

from . import plotting
from .data.formats import write_table
from .data.generate import generate_canonical_fano_3d, generate_fano_polygons
from .data.records import augment, label
from .mds import mds_embed
from .ml.encoding import build_dataset
from .ml.forest import train_random_forest
from .ml.metrics import (
    accuracy,
    bin_name,
    evaluate_regression,
    kfold_split,
    pmcc,
    train_test_split,
)
from .ml.mlp import config_for, fine_tune, predict, predict_class, save_model, train_mlp

log = logging.getLogger(__name__)

BINS_2D = ("0.5", "1", "0.025r", "0.05r")
BINS_3D = ("0.5", "1", "2", "3", "4", "5")
METRIC_COLUMNS = ["mae", "mape", "mse", "logcosh", "pmcc"]


def regression_header(bins):
    return ["property", "encoding", "n_vertices", "fold", "n_train", "n_test", *METRIC_COLUMNS,
            *[bin_name(b) for b in bins]]


SCHEMAS = {
    "regression": regression_header(BINS_2D),
    "regression-3d": regression_header(BINS_3D),
    "train-fraction": ["train_frac", "n_train", "n_test", *METRIC_COLUMNS, *[bin_name(b) for b in BINS_2D]],
    "classification": ["model", "encoding", "fold", "n_train", "n_test", "accuracy"],
    "mds": ["components", "n_points", "stress", "n_iter", "pmcc_norm_volume"],
    "embedding": ["index", "x0", "x1", "label"],
}


@dataclass
class ExperimentConfig:
    name: str
    seed: int = 0
    count: int = 2000
    n_vertices: list = field(default_factory=lambda: [5])
    labels: list = field(default_factory=lambda: ["volume"])
    encodings: list = field(default_factory=lambda: ["plucker", "vertices"])
    variants: int = 3
    folds: int = 5
    arch: str = "2d-paper"
    epochs: int | None = None
    max_coord: int | None = None
    train_fracs: list = field(default_factory=lambda: [0.1, 0.3, 0.5, 0.7, 0.9])
    components: int = 1


# -- data ------------------------------------------------------------------------


def polygon_records(count, seed, n_vertices=None, fields=("volume",), variants=1, max_coord=5, prefix="p"):
    polys = generate_fano_polygons(count, max_coord=max_coord, seed=seed, n_vertices=n_vertices)
    recs = [label(P, id=f"{prefix}{i:05d}", fields=fields) for i, P in enumerate(polys)]
    return augment(recs, variants, seed=seed)


def polytope3d_records(count, seed, fields=("volume",), variants=1, reflexive=None, max_coord=3, prefix="q"):
    polys = generate_canonical_fano_3d(count, max_coord=max_coord, seed=seed, reflexive=reflexive)
    recs = [label(P, id=f"{prefix}{i:05d}", fields=fields) for i, P in enumerate(polys)]
    return augment(recs, variants, seed=seed)


# -- core loops -----------------------------------------------------------------


def metric_values(m, bins):
    return [m.mae, m.mape, m.mse, m.logcosh, m.pmcc, *[m.accuracies[bin_name(b)] for b in bins]]


def cross_validate(data, arch, folds, seed, bins, epochs=None, task="regression", out_dir=None, tag=""):
    """k-fold CV grouped by polytope id; returns per-fold metrics and pooled predictions."""
    label_range = float(np.ptp(data.y))
    splits = kfold_split(len(data), folds, seed=seed, groups=data.groups or None)
    results, truth, preds = [], [], []
    for k, (tr, te) in enumerate(splits):
        cfg = config_for(arch, epochs=epochs, seed=seed + k)
        model, train_log = train_mlp(data.subset(tr), arch, cfg, task=task)
        p = predict(model, data.X[te])
        m = evaluate_regression(data.y[te], p, bins, label_range=label_range)
        results.append((k, len(tr), len(te), m))
        truth.append(data.y[te])
        preds.append(p)
        if out_dir is not None:
            save_model(model, Path(out_dir) / f"model{tag}_fold{k}.json")
            write_table(Path(out_dir) / f"log{tag}_fold{k}.csv", ["epoch", "train_loss", "val_loss"],
                        train_log, model.config)
    return results, np.concatenate(truth), np.concatenate(preds)


def _rows_for(prop, enc, n, results, bins):
    rows = []
    for k, ntr, nte, m in results:
        rows.append([prop, enc, n, k, ntr, nte, *metric_values(m, bins)])
    mean = np.mean([metric_values(m, bins) for *_, m in results], axis=0)
    rows.append([prop, enc, n, "mean", int(np.mean([r[1] for r in results])),
                 int(np.mean([r[2] for r in results])), *mean])
    return rows


# -- workflows ------------------------------------------------------------------


def run_regression_table(cfg: ExperimentConfig, out_dir) -> list:
    """Rows ``property x encoding x n`` with per-fold and mean metrics.

    Covers the vertices-versus-Plücker comparison, the per-property table and
    the augmentation comparison, depending on ``labels``/``encodings``/``variants``.
    """
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    conf = asdict(cfg)
    for n in cfg.n_vertices:
        recs = polygon_records(cfg.count, cfg.seed, n_vertices=n, fields=tuple(cfg.labels),
                               variants=cfg.variants, max_coord=cfg.max_coord or 5)
        for prop in cfg.labels:
            for enc in cfg.encodings:
                data = build_dataset(recs, enc, prop)
                tag = f"_{prop}_{enc}_n{n}".replace("+", "-")
                results, t, p = cross_validate(data, cfg.arch, cfg.folds, cfg.seed, BINS_2D, cfg.epochs,
                                               out_dir=out, tag=tag)
                rows.extend(_rows_for(prop, enc, n, results, BINS_2D))
                plotting.true_vs_predicted(out / f"true_vs_pred{tag}.svg", t, p,
                                           title=f"{prop}, {enc}, n={n}", label=prop, config=conf)
    write_table(out / "metrics.csv", SCHEMAS["regression"], rows, conf)
    return rows


def run_train_fraction(cfg: ExperimentConfig, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    recs = polygon_records(cfg.count, cfg.seed, n_vertices=cfg.n_vertices[0], variants=cfg.variants)
    data = build_dataset(recs, cfg.encodings[0], cfg.labels[0])
    rng_ = float(np.ptp(data.y))
    rows = []
    for frac in cfg.train_fracs:
        tr, te = train_test_split(len(data), frac, seed=cfg.seed, groups=data.groups)
        model, _ = train_mlp(data.subset(tr), cfg.arch, config_for(cfg.arch, epochs=cfg.epochs, seed=cfg.seed))
        m = evaluate_regression(data.y[te], predict(model, data.X[te]), BINS_2D, label_range=rng_)
        rows.append([frac, len(tr), len(te), *metric_values(m, BINS_2D)])
    conf = asdict(cfg)
    write_table(out / "metrics.csv", SCHEMAS["train-fraction"], rows, conf)
    plotting.line_plot(out / "train_fraction.svg", cfg.train_fracs,
                       {"MAE": [r[3] for r in rows], "MAPE/10": [r[4] / 10 for r in rows]},
                       xlabel="training fraction", ylabel="error", config=conf)
    return rows


def run_inverse(cfg: ExperimentConfig, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    conf = asdict(cfg)
    for n in cfg.n_vertices:
        recs = polygon_records(cfg.count, cfg.seed, n_vertices=n, variants=cfg.variants)
        data = build_dataset(recs, "inverse-problem", "volume")
        results, t, p = cross_validate(data, cfg.arch, cfg.folds, cfg.seed, BINS_2D, cfg.epochs)
        rows.extend(_rows_for("withheld_coordinate", "inverse-problem", n, results, BINS_2D))
        plotting.true_vs_predicted(out / f"true_vs_pred_inverse_n{n}.svg", t, p,
                                   title=f"withheld coordinate, n={n}", label="coordinate", config=conf)
    write_table(out / "metrics.csv", SCHEMAS["regression"], rows, conf)
    return rows


def transfer_study(count2d, count3d, seed, epochs=None, variants=3, arch="2d-paper", train_frac=0.8):
    """Pretrain on polygons, evaluate on 3-topes before and after fine-tuning.

    Returns a dict of :class:`Metrics` for ``"2d_only"``, ``"fine_tuned"`` and
    ``"3d_only"`` (all on the same 3d test split, same architecture), plus
    ``"_predictions"`` and the ``"_chance_pm5"`` baseline.
    """
    r3 = polytope3d_records(count3d, seed + 1, variants=variants)
    d3 = build_dataset(r3, "plucker", "volume")
    r2 = polygon_records(count2d, seed, variants=variants)
    d2 = build_dataset(r2, "plucker", "volume", pad_to=d3.n_features)
    tr, te = train_test_split(len(d3), train_frac, seed=seed, groups=d3.groups)
    cfg = config_for(arch, epochs=epochs, seed=seed)
    m2, _ = train_mlp(d2, arch, cfg)
    tuned, _ = fine_tune(m2, d3.subset(tr), cfg)
    m3, _ = train_mlp(d3.subset(tr), arch, cfg)
    out = {}
    for name, model in (("2d_only", m2), ("fine_tuned", tuned), ("3d_only", m3)):
        out[name] = evaluate_regression(d3.y[te], predict(model, d3.X[te]), BINS_3D)
    out["_predictions"] = (d3.y[te], predict(tuned, d3.X[te]))
    # accuracy(+-5) of guessing a random 2d training volume, the no-information baseline
    out["_chance_pm5"] = float(np.mean(np.abs(d3.y[te][:, None] - d2.y[None, :]) <= 5))
    return out


def run_transfer(cfg: ExperimentConfig, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    res = transfer_study(cfg.count, cfg.count, cfg.seed, cfg.epochs, cfg.variants, cfg.arch)
    t, p = res.pop("_predictions")
    res.pop("_chance_pm5")
    rows = [["volume", name, "3d", "test", "", len(t), *metric_values(m, BINS_3D)] for name, m in res.items()]
    conf = asdict(cfg)
    write_table(out / "metrics.csv", SCHEMAS["regression-3d"], rows, conf)
    plotting.true_vs_predicted(out / "true_vs_pred_fine_tuned.svg", t, p, title="fine-tuned on 3d",
                               label="volume", config=conf)
    return rows


def reflexivity_study(count_per_class, seed, trees=70, folds=None, train_frac=0.8, with_mlp=False, epochs=None):
    """Random forest (and optionally an MLP) on a balanced 3d reflexivity set.

    Also reports a forest trained on the vertex count alone, as a baseline
    for how much of the signal is just polytope size.
    """
    pos = generate_canonical_fano_3d(count_per_class, seed=seed, reflexive=True)
    neg = generate_canonical_fano_3d(count_per_class, seed=seed + 1, reflexive=False)
    recs = [label(P, id=f"r{i:05d}", fields=("reflexive",)) for i, P in enumerate(pos + neg)]
    for r in recs:
        r.labels["reflexive"] = int(r.labels["reflexive"])
    data = build_dataset(recs, "plucker", "reflexive")
    nverts = np.array([[len(r.vertices)] for r in recs], dtype=float)
    splits = (kfold_split(len(data), folds, seed=seed) if folds
              else [train_test_split(len(data), train_frac, seed=seed)])
    rows = []
    for k, (tr, te) in enumerate(splits):
        rf = train_random_forest(data.X[tr], data.y[tr], trees=trees, seed=seed + k)
        rows.append(["random_forest", "plucker", k, len(tr), len(te), accuracy(data.y[te], rf.predict(data.X[te]))])
        base = train_random_forest(nverts[tr], data.y[tr], trees=trees, seed=seed + k)
        rows.append(["random_forest", "n_vertices_only", k, len(tr), len(te), accuracy(data.y[te], base.predict(nverts[te]))])
        if with_mlp:
            model, _ = train_mlp(data.subset(tr), "3d-paper", config_for("3d-paper", epochs=epochs, seed=seed + k),
                                 task="classification")
            rows.append(["mlp", "plucker", k, len(tr), len(te), accuracy(data.y[te], predict_class(model, data.X[te]))])
    return rows


def run_reflexivity(cfg: ExperimentConfig, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows = reflexivity_study(cfg.count, cfg.seed, folds=cfg.folds if cfg.folds > 1 else None, with_mlp=True,
                             epochs=cfg.epochs)
    write_table(out / "metrics.csv", SCHEMAS["classification"], rows, asdict(cfg))
    return rows


def run_mds(cfg: ExperimentConfig, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    recs = polygon_records(cfg.count, cfg.seed, n_vertices=None)
    data = build_dataset(recs, "plucker", "volume")
    emb = mds_embed(data.X, k=cfg.components, seed=cfg.seed)
    r, _ = pmcc(np.linalg.norm(emb.points, axis=1), data.y)
    conf = asdict(cfg)
    write_table(out / "metrics.csv", SCHEMAS["mds"], [[cfg.components, len(data), emb.stress, emb.n_iter, r]], conf)
    write_embedding(out / "embedding.csv", emb.points, data.y, conf)
    plotting.mds_scatter(out / "mds.svg", emb.points, data.y, label="volume", config=conf)
    return [[cfg.components, len(data), emb.stress, emb.n_iter, r]]


def write_embedding(path, points, labels, config=None):
    k = points.shape[1]
    header = ["index", *[f"x{i}" for i in range(k)], "label"]
    rows = [[i, *points[i], labels[i]] for i in range(len(points))]
    write_table(path, header, rows, config)


def run_histograms(cfg: ExperimentConfig, out_dir) -> list:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    labels = cfg.labels
    recs = polygon_records(cfg.count, cfg.seed, n_vertices=None, fields=tuple(labels))
    conf = asdict(cfg)
    rows = []
    for prop in labels:
        values = [float(r.labels[prop]) for r in recs]
        plotting.histogram(out / f"hist_{prop}.svg", values, label=prop,
                           integer=prop != "dual_volume", config=conf)
        rows.append([prop, len(values), min(values), max(values), float(np.mean(values))])
    write_table(out / "summary.csv", ["property", "count", "min", "max", "mean"], rows, conf)
    return rows


WORKFLOWS = {
    "vertices-vs-plucker": (run_regression_table, {}),
    "polygon-properties": (run_regression_table, {"labels": ["volume", "dual_volume", "gorenstein_index", "codimension"],
                                                  "encodings": ["plucker"], "n_vertices": [3, 4, 5, 6]}),
    "augmentation": (run_regression_table, {"encodings": ["plucker", "plucker+gcd2", "plucker+gcdl1", "onehot"]}),
    "train-fraction": (run_train_fraction, {"encodings": ["plucker"]}),
    "inverse": (run_inverse, {}),
    "transfer": (run_transfer, {}),
    "reflexivity": (run_reflexivity, {"count": 1000}),
    "mds": (run_mds, {"count": 500}),
    "histograms": (run_histograms, {"labels": ["volume", "dual_volume", "gorenstein_index", "codimension"],
                                    "count": 1000}),
}


def run_workflow(name: str, out_dir, **overrides):
    if name not in WORKFLOWS:
        raise ValueError(f"unknown experiment {name!r}; choose from {sorted(WORKFLOWS)}")
    fn, defaults = WORKFLOWS[name]
    params = {**defaults, **{k: v for k, v in overrides.items() if v is not None}}
    cfg = ExperimentConfig(name=name, **params)
    log.info("running %s with %s", name, cfg)
    return fn(cfg, out_dir)
