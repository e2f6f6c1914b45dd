"""Command-line front end: ``polyml <command> ...``.

Exit codes: 0 success, 1 usage or configuration error, 2 data error,
3 numeric failure (training divergence).

Environment: ``POLYML_SEED`` supplies the seed when ``--seed`` is absent and
``POLYML_THREADS`` caps BLAS threads (it must be set before numpy loads,
which is why heavy imports happen inside :func:`main`).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _seed(args) -> int:
    if getattr(args, "seed", None) is not None:
        return args.seed
    env = os.environ.get("POLYML_SEED")
    if env is not None:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"POLYML_SEED must be an integer, got {env!r}") from None
    return 0


def _resolved(args) -> dict:
    conf = {k: v for k, v in vars(args).items() if k != "func"}
    if "seed" in conf:
        conf["seed"] = _seed(args)
    return conf


def _int_list(text):
    return [int(x) for x in text.split(",") if x]


def _str_list(text):
    return [x for x in text.split(",") if x]


# -- commands ----------------------------------------------------------------------


def cmd_invariants(args):
    from .data.formats import read_polytopes, write_polytopes
    from .data.records import compute_labels
    from .pluecker import pluecker
    from .polytope import LatticePolytope, hull

    records = read_polytopes(args.input)
    out_records, failures = [], 0
    lines = ["id,volume,dual_volume,gorenstein_index,reflexive,codimension,plucker"]
    for rec in records:
        try:
            P = hull(rec.vertices)
            if sorted(map(tuple, rec.vertices)) != sorted(P.vertices):
                raise ValueError("listed points are not exactly the vertices of their hull")
            if P.dim == 2:
                P = LatticePolytope(rec.vertices) if _cyclic(rec.vertices) else P
            rec.labels = compute_labels(P)
            rec.variants = [pluecker(P, strict=False).coords]
        except (ValueError, ArithmeticError) as exc:
            failures += 1
            print(f"{rec.id}: skipped ({exc})", file=sys.stderr)
            continue
        lab = rec.labels
        lines.append(
            f"{rec.id},{lab['volume']},{lab['dual_volume']},{lab['gorenstein_index']},"
            f"{str(lab['reflexive']).lower()},{lab['codimension']},\"{' '.join(map(str, rec.variants[0]))}\""
        )
        out_records.append(rec)
    if args.output:
        write_polytopes(args.output, out_records, meta=_resolved(args))
    print("\n".join(lines))
    if failures:
        print(f"{failures} record(s) skipped", file=sys.stderr)
    return EXIT_OK


def _cyclic(vertices):
    from .polytope import LatticePolytope

    try:
        LatticePolytope(vertices).facets
        return True
    except ValueError:
        return False


def cmd_dataset_gen(args):
    from .data.formats import write_polytopes
    from .data.generate import generate_canonical_fano_3d, generate_fano_polygons
    from .data.records import PolytopeRecord

    seed = _seed(args)
    if args.dim == 2:
        if args.reflexive is not None:
            raise UsageError("--reflexive/--non-reflexive apply to --dim 3; use --max-gorenstein 1 in 2d")
        polys = generate_fano_polygons(args.count, max_coord=args.max_coord or 5, max_gorenstein=args.max_gorenstein,
                                       seed=seed, n_vertices=args.n_vertices, method=args.method)
    else:
        polys = generate_canonical_fano_3d(args.count, max_coord=args.max_coord or 3, seed=seed,
                                           n_vertices=args.n_vertices, reflexive=args.reflexive, method=args.method)
    recs = [PolytopeRecord(id=f"{args.prefix}{i:05d}", vertices=[list(v) for v in P.vertices])
            for i, P in enumerate(polys)]
    write_polytopes(args.output, recs, meta=_resolved(args))
    print(f"wrote {len(recs)} polytopes to {args.output}")
    return EXIT_OK


def cmd_dataset_label(args):
    from .data.formats import read_polytopes, write_polytopes
    from .data.records import LABELS, label
    from .polytope import LatticePolytope, hull

    fields = tuple(args.fields) if args.fields else LABELS
    out = []
    for rec in read_polytopes(args.input):
        P = hull(rec.vertices)
        if P.dim == 2 and _cyclic(rec.vertices):
            P = LatticePolytope(rec.vertices)
        new = label(P, id=rec.id, fields=fields)
        new.vertices = rec.vertices
        out.append(new)
    write_polytopes(args.output, out, meta=_resolved(args))
    print(f"labelled {len(out)} polytopes -> {args.output}")
    return EXIT_OK


def cmd_dataset_augment(args):
    from .data.formats import read_polytopes, write_polytopes
    from .data.records import augment

    if args.variants < 1:
        raise UsageError("--variants must be at least 1")
    recs = read_polytopes(args.input)
    out = augment(recs, args.variants, seed=_seed(args))
    write_polytopes(args.output, out, meta=_resolved(args))
    print(f"{len(recs)} polytopes -> {len(out)} rows in {args.output}")
    return EXIT_OK


def cmd_dataset_features(args):
    from .data.formats import read_polytopes, write_features
    from .ml.encoding import build_dataset

    data = build_dataset(read_polytopes(args.input), args.encoding, args.label, pad_to=args.pad_to)
    write_features(args.output, data.X, data.y, groups=data.groups, config=_resolved(args))
    print(f"{len(data)} rows x {data.n_features} features -> {args.output}")
    return EXIT_OK


def _load_dataset(args, pad_to=None):
    from .data.formats import read_features, read_polytopes
    from .ml.encoding import Dataset, build_dataset

    if str(args.data).endswith(".csv"):
        X, y, groups, _ = read_features(args.data)
        return Dataset(X, y, args.label, "csv", groups or [])
    return build_dataset(read_polytopes(args.data), args.encoding, args.label, pad_to=pad_to)


def cmd_train(args):
    from pathlib import Path

    import numpy as np

    from . import plotting
    from .data.formats import write_table
    from .experiments import BINS_2D, SCHEMAS, metric_values
    from .ml.metrics import bin_name, evaluate_regression, kfold_split, train_test_split
    from .ml.mlp import config_for, fine_tune, load_model, predict, save_model, train_mlp

    if args.folds and args.train_frac:
        raise UsageError("--folds and --train-frac are mutually exclusive")
    if args.arch == "custom" and not args.hidden:
        raise UsageError("--arch custom needs --hidden")
    seed = _seed(args)
    base = load_model(args.init_from) if args.init_from else None
    data = _load_dataset(args, pad_to=base.n_inputs if base else args.pad_to)
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    if args.folds:
        splits = kfold_split(len(data), args.folds, seed=seed, groups=data.groups or None)
    else:
        splits = [train_test_split(len(data), args.train_frac or 0.8, seed=seed, groups=data.groups or None)]
    bins = tuple(args.bins) if args.bins else BINS_2D
    conf = _resolved(args)
    rows, truth, preds = [], [], []
    label_range = float(np.ptp(data.y))
    for k, (tr, te) in enumerate(splits):
        cfg = config_for(args.arch, epochs=args.epochs, batch_size=args.batch_size, loss=args.loss,
                         learning_rate=args.lr, seed=seed + k)
        if base is not None:
            model, log = fine_tune(base, data.subset(tr), cfg)
        else:
            model, log = train_mlp(data.subset(tr), args.arch, cfg, hidden=args.hidden, alpha=args.alpha)
        model.config["run"] = conf
        save_model(model, out / f"model_fold{k}.json")
        write_table(out / f"log_fold{k}.csv", ["epoch", "train_loss", "val_loss"], log, conf)
        p = predict(model, data.X[te])
        m = evaluate_regression(data.y[te], p, bins, label_range=label_range)
        rows.append([args.label, args.encoding, "", k, len(tr), len(te), *metric_values(m, bins)])
        truth.append(data.y[te])
        preds.append(p)
        print(f"fold {k}: mae={m.mae:.4f} " + " ".join(f"{key}={v:.3f}" for key, v in m.accuracies.items()))
    header = SCHEMAS["regression"][:11] + [bin_name(b) for b in bins]
    write_table(out / "metrics.csv", header, rows, conf)
    plotting.true_vs_predicted(out / "true_vs_pred.svg", np.concatenate(truth), np.concatenate(preds),
                               label=args.label, config=conf)
    return EXIT_OK


def cmd_eval(args):
    from pathlib import Path

    import numpy as np

    from .data.formats import read_table, write_table
    from .experiments import BINS_2D
    from .ml.metrics import evaluate_regression
    from .ml.mlp import load_model, predict

    bins = tuple(args.bins) if args.bins else BINS_2D
    if args.predictions:
        header, rows, _ = read_table(args.predictions)
        try:
            ti, pi = header.index("true"), header.index("pred")
        except ValueError:
            raise UsageError("predictions CSV needs 'true' and 'pred' columns") from None
        y = np.array([float(r[ti]) for r in rows])
        p = np.array([float(r[pi]) for r in rows])
    else:
        if not (args.model and args.data):
            raise UsageError("eval needs --predictions, or --model with --data")
        model = load_model(args.model)
        data = _load_dataset(args, pad_to=model.n_inputs)
        y, p = data.y, predict(model, data.X)
    m = evaluate_regression(y, p, bins)
    row = m.as_row()
    if args.output:
        write_table(Path(args.output), list(row), [list(row.values())], _resolved(args))
    print(",".join(row))
    print(",".join(f"{v:.6g}" for v in row.values()))
    if m.pmcc_degenerate:
        print("note: predictions or truth have zero variance; pmcc reported as 0", file=sys.stderr)
    return EXIT_OK


def cmd_mds(args):
    from pathlib import Path

    import numpy as np

    from . import plotting
    from .data.formats import write_table
    from .experiments import SCHEMAS, write_embedding
    from .mds import mds_embed
    from .ml.metrics import pmcc

    data = _load_dataset(args, pad_to=args.pad_to)
    emb = mds_embed(data.X, k=args.components, max_iter=args.max_iter, seed=_seed(args))
    out = Path(args.output)
    out.mkdir(parents=True, exist_ok=True)
    conf = _resolved(args)
    r, _ = pmcc(np.linalg.norm(emb.points, axis=1), data.y)
    write_embedding(out / "embedding.csv", emb.points, data.y, conf)
    write_table(out / "metrics.csv", SCHEMAS["mds"], [[args.components, len(data), emb.stress, emb.n_iter, r]], conf)
    plotting.mds_scatter(out / "mds.svg", emb.points, data.y, label=args.label, config=conf)
    print(f"stress={emb.stress:.6g} iterations={emb.n_iter} pmcc(|x|, {args.label})={r:.4f}")
    return EXIT_OK


def cmd_enumerate(args):
    from .data.formats import write_polytopes
    from .data.generate import enumerate_reflexive_polygons
    from .data.records import PolytopeRecord, compute_labels
    from .polytope import dual_polytope, normalized_volume

    classes = enumerate_reflexive_polygons(args.box)
    print("index,n_vertices,volume,dual_volume,vertices")
    recs = []
    for i, P in enumerate(classes):
        print(f"{i},{P.n_vertices},{normalized_volume(P)},{normalized_volume(dual_polytope(P))},"
              f"\"{[list(v) for v in P.vertices]}\"")
        if args.output:
            recs.append(PolytopeRecord(id=f"reflexive{i:02d}", vertices=[list(v) for v in P.vertices],
                                       labels=compute_labels(P)))
    print(f"{len(classes)} equivalence classes")
    if args.output:
        write_polytopes(args.output, recs, meta=_resolved(args))
    return EXIT_OK


def cmd_plot(args):
    import numpy as np

    from . import plotting
    from .data.formats import read_polytopes, read_table

    conf = _resolved(args)
    if args.kind == "hist":
        recs = read_polytopes(args.input)
        values = [float(r.labels[args.label]) for r in recs if args.label in r.labels]
        if not values:
            raise ValueError(f"no records carry the label {args.label!r}")
        plotting.histogram(args.output, values, label=args.label, integer=args.label != "dual_volume", config=conf)
    elif args.kind == "scatter":
        header, rows, _ = read_table(args.input)
        ti, pi = header.index("true"), header.index("pred")
        plotting.true_vs_predicted(args.output, [float(r[ti]) for r in rows], [float(r[pi]) for r in rows],
                                   label=args.label, config=conf)
    else:
        header, rows, _ = read_table(args.input)
        k = sum(1 for h in header if h.startswith("x"))
        pts = np.array([[float(r[1 + i]) for i in range(k)] for r in rows])
        plotting.mds_scatter(args.output, pts, [float(r[-1]) for r in rows], label=args.label, config=conf)
    print(f"wrote {args.output}")
    return EXIT_OK


def cmd_experiment(args):
    from .experiments import run_workflow

    overrides = {
        "seed": _seed(args), "count": args.count, "folds": args.folds, "epochs": args.epochs,
        "variants": args.variants, "n_vertices": args.n_vertices, "labels": args.labels,
        "encodings": args.encodings, "components": args.components, "arch": args.arch,
    }
    rows = run_workflow(args.name, args.output, **overrides)
    print(f"{args.name}: {len(rows)} rows written to {args.output}")
    return EXIT_OK


# -- parser ------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    from .experiments import WORKFLOWS

    p = _Parser(prog="polyml", description="Lattice polytope invariants and learning experiments.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("invariants", help="label every polytope in a JSON-lines file")
    s.add_argument("input")
    s.add_argument("-o", "--output", help="labelled JSON-lines output")
    s.set_defaults(func=cmd_invariants)

    ds = sub.add_parser("dataset", help="generate, label, augment or encode datasets")
    dsub = ds.add_subparsers(dest="action", required=True, parser_class=_Parser)
    g = dsub.add_parser("gen")
    g.add_argument("--dim", type=int, choices=(2, 3), default=2)
    g.add_argument("--count", type=int, required=True)
    g.add_argument("--max-coord", type=int)
    g.add_argument("--max-gorenstein", type=int, default=30)
    g.add_argument("--n-vertices", type=_int_list)
    refl = g.add_mutually_exclusive_group()
    refl.add_argument("--reflexive", dest="reflexive", action="store_const", const=True)
    refl.add_argument("--non-reflexive", dest="reflexive", action="store_const", const=False)
    g.add_argument("--method", choices=("grow", "hull"), default="grow")
    g.add_argument("--prefix", default="p")
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output", required=True)
    g.set_defaults(func=cmd_dataset_gen)
    lb = dsub.add_parser("label")
    lb.add_argument("input")
    lb.add_argument("--fields", type=_str_list)
    lb.add_argument("-o", "--output", required=True)
    lb.set_defaults(func=cmd_dataset_label)
    au = dsub.add_parser("augment")
    au.add_argument("input")
    au.add_argument("--variants", type=int, default=3)
    au.add_argument("--seed", type=int)
    au.add_argument("-o", "--output", required=True)
    au.set_defaults(func=cmd_dataset_augment)
    fe = dsub.add_parser("features")
    fe.add_argument("input")
    _data_flags(fe)
    fe.add_argument("-o", "--output", required=True)
    fe.set_defaults(func=cmd_dataset_features)

    t = sub.add_parser("train", help="train MLP regressors with k-fold CV or a holdout split")
    t.add_argument("data", help="labelled JSON-lines file or feature CSV")
    _data_flags(t)
    t.add_argument("--arch", choices=("2d-paper", "3d-paper", "custom"), default="2d-paper")
    t.add_argument("--hidden", type=_int_list)
    t.add_argument("--alpha", type=float)
    t.add_argument("--epochs", type=int)
    t.add_argument("--batch-size", type=int)
    t.add_argument("--loss", choices=("logcosh", "mse"))
    t.add_argument("--lr", type=float)
    t.add_argument("--folds", type=int)
    t.add_argument("--train-frac", type=float)
    t.add_argument("--init-from", help="model JSON to fine-tune instead of training from scratch")
    t.add_argument("--bins", type=_str_list, help="half-widths, e.g. 0.5,1,0.05r (r = times label range)")
    t.add_argument("--seed", type=int)
    t.add_argument("-o", "--output", required=True, help="output directory")
    t.set_defaults(func=cmd_train)

    e = sub.add_parser("eval", help="metrics for a model on data, or for a predictions CSV")
    e.add_argument("--model")
    e.add_argument("--data")
    e.add_argument("--predictions", help="CSV with 'true' and 'pred' columns")
    _data_flags(e)
    e.add_argument("--bins", type=_str_list)
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_eval)

    m = sub.add_parser("mds", help="SMACOF embedding of Plücker features")
    m.add_argument("data")
    _data_flags(m)
    m.add_argument("--components", type=int, choices=(1, 2), default=2)
    m.add_argument("--max-iter", type=int, default=300)
    m.add_argument("--seed", type=int)
    m.add_argument("-o", "--output", required=True, help="output directory")
    m.set_defaults(func=cmd_mds)

    r = sub.add_parser("enumerate-reflexive-2d", help="all reflexive polygons up to GL(2, Z)")
    r.add_argument("--box", type=int, default=3)
    r.add_argument("-o", "--output")
    r.set_defaults(func=cmd_enumerate)

    pl = sub.add_parser("plot", help="render a figure from a dataset or table")
    pl.add_argument("kind", choices=("hist", "scatter", "mds"))
    pl.add_argument("input")
    pl.add_argument("--label", default="volume")
    pl.add_argument("-o", "--output", required=True)
    pl.set_defaults(func=cmd_plot)

    x = sub.add_parser("experiment", help="run a complete experiment workflow")
    x.add_argument("name", choices=sorted(WORKFLOWS))
    x.add_argument("--count", type=int)
    x.add_argument("--folds", type=int)
    x.add_argument("--epochs", type=int)
    x.add_argument("--variants", type=int)
    x.add_argument("--n-vertices", type=_int_list)
    x.add_argument("--labels", type=_str_list)
    x.add_argument("--encodings", type=_str_list)
    x.add_argument("--components", type=int, choices=(1, 2))
    x.add_argument("--arch", choices=("2d-paper", "3d-paper"))
    x.add_argument("--seed", type=int)
    x.add_argument("-o", "--output", required=True, help="output directory")
    x.set_defaults(func=cmd_experiment)
    return p


def _data_flags(p):
    p.add_argument("--encoding", default="plucker",
                   choices=("plucker", "vertices", "plucker+gcd2", "plucker+gcdl1", "onehot", "inverse-problem"))
    p.add_argument("--label", default="volume",
                   choices=("volume", "dual_volume", "gorenstein_index", "codimension", "reflexive"))
    p.add_argument("--pad-to", type=int)


def main(argv=None) -> int:
    threads = os.environ.get("POLYML_THREADS")
    if threads:
        for var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
            os.environ.setdefault(var, threads)
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")

    from .data.formats import DataFormatError
    from .ml.mlp import TrainingDivergedError

    try:
        return args.func(args)
    except UsageError as exc:
        print(f"polyml: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except TrainingDivergedError as exc:
        print(f"polyml: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (DataFormatError, ValueError, KeyError, FileNotFoundError, json.JSONDecodeError) as exc:
        print(f"polyml: data error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
