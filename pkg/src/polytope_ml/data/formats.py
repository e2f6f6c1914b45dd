"""JSON-lines polytope files and labelled feature CSVs.

Polytope files hold one JSON object per line with ``id``, ``vertices`` and
optionally ``labels`` and ``variants``. Rationals are written as ``"p/q"``
strings so they survive the round trip exactly. An optional first line
``{"_meta": {...}}`` records the configuration that produced the file.

Feature CSVs start with ``# config: {json}`` and then a header
``feature_0, ..., feature_{L-1}, label`` (plus ``group`` when rows carry a
polytope id for group-aware splitting).
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .records import PolytopeRecord


class DataFormatError(ValueError):
    def __init__(self, message, line=None, path=None):
        where = ""
        if path is not None:
            where += f"{path}:"
        if line is not None:
            where += f"line {line}: "
        elif where:
            where += " "
        super().__init__(where + message)
        self.line = line


def _encode_value(v):
    if isinstance(v, bool) or isinstance(v, int):
        return v
    if isinstance(v, Fraction):
        return f"{v.numerator}/{v.denominator}" if v.denominator != 1 else v.numerator
    return v


def _decode_value(v):
    if isinstance(v, str) and "/" in v:
        p, q = v.split("/")
        return Fraction(int(p), int(q))
    return v


def record_to_json(rec: PolytopeRecord) -> str:
    obj = {"id": rec.id, "vertices": rec.vertices}
    if rec.labels:
        obj["labels"] = {k: _encode_value(v) for k, v in rec.labels.items()}
    if rec.variants:
        obj["variants"] = [list(v) for v in rec.variants]
    return json.dumps(obj, separators=(",", ":"))


def _parse_record(obj, lineno, path, dim):
    if not isinstance(obj, dict) or "vertices" not in obj:
        raise DataFormatError("expected an object with 'vertices'", lineno, path)
    verts = obj["vertices"]
    if not isinstance(verts, list) or not verts:
        raise DataFormatError("'vertices' must be a non-empty list", lineno, path)
    width = dim if dim is not None else len(verts[0]) if isinstance(verts[0], list) else None
    rows = []
    for row in verts:
        if not isinstance(row, list) or len(row) != width:
            raise DataFormatError(f"vertex {row!r} does not have {width} coordinates", lineno, path)
        if not all(isinstance(x, int) and not isinstance(x, bool) for x in row):
            raise DataFormatError(f"vertex {row!r} has non-integer coordinates", lineno, path)
        rows.append(list(row))
    labels = obj.get("labels") or {}
    try:
        labels = {k: _decode_value(v) for k, v in labels.items()}
    except (ValueError, ZeroDivisionError) as exc:
        raise DataFormatError(f"bad label value ({exc})", lineno, path) from None
    variants = [tuple(v) for v in obj.get("variants", [])]
    return PolytopeRecord(id=str(obj.get("id", f"line{lineno}")), vertices=rows, labels=labels, variants=variants)


def parse_polytopes(text: str, path=None, dim: int | None = None):
    """Parse JSON-lines text; return ``(records, meta)``."""
    records, meta = [], None
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise DataFormatError(f"invalid JSON ({exc.msg})", lineno, path) from None
        if isinstance(obj, dict) and "_meta" in obj and lineno == 1:
            meta = obj["_meta"]
            continue
        rec = _parse_record(obj, lineno, path, dim)
        if dim is None:
            dim = rec.dim
        records.append(rec)
    return records, meta


def read_polytopes(path, dim: int | None = None) -> list[PolytopeRecord]:
    return parse_polytopes(Path(path).read_text(), path=path, dim=dim)[0]


def read_polytopes_with_meta(path, dim: int | None = None):
    return parse_polytopes(Path(path).read_text(), path=path, dim=dim)


def write_polytopes(path, records, meta: dict | None = None) -> None:
    with open(path, "w") as fh:
        if meta is not None:
            fh.write(json.dumps({"_meta": meta}, sort_keys=True) + "\n")
        for rec in records:
            fh.write(record_to_json(rec) + "\n")


def _config_line(config) -> str:
    return "# config: " + json.dumps(config, sort_keys=True, default=str)


def write_table(path, header, rows, config: dict | None = None) -> None:
    """CSV with an optional leading ``# config:`` comment."""
    buf = io.StringIO()
    if config is not None:
        buf.write(_config_line(config) + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(x) for x in row])
    Path(path).write_text(buf.getvalue())


def _fmt(x):
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    if isinstance(x, Fraction):
        return repr(float(x))
    if isinstance(x, (np.integer,)):
        return int(x)
    return x


def read_table(path):
    """Return ``(header, rows, config)``; rows are lists of strings."""
    config = None
    lines = Path(path).read_text().splitlines()
    if lines and lines[0].startswith("# config: "):
        config = json.loads(lines[0][len("# config: ") :])
        lines = lines[1:]
    reader = csv.reader(lines)
    try:
        header = next(reader)
    except StopIteration:
        raise DataFormatError("missing header", path=path) from None
    return header, list(reader), config


def write_features(path, X, y, groups=None, config: dict | None = None) -> None:
    X = np.asarray(X, dtype=float)
    header = [f"feature_{i}" for i in range(X.shape[1])] + ["label"]
    if groups is not None:
        header.append("group")
    rows = []
    for i in range(len(X)):
        row = list(X[i]) + [float(y[i])]
        if groups is not None:
            row.append(groups[i])
        rows.append(row)
    write_table(path, header, rows, config)


def read_features(path):
    """Return ``(X, y, groups, config)``; ``groups`` is None without a group column."""
    header, rows, config = read_table(path)
    has_group = header[-1] == "group"
    n_feat = len(header) - 1 - has_group
    if n_feat < 1 or header[n_feat] != "label":
        raise DataFormatError("header must be feature_0..feature_{L-1}, label", path=path)
    X = np.empty((len(rows), n_feat))
    y = np.empty(len(rows))
    groups = [] if has_group else None
    for i, row in enumerate(rows):
        lineno = i + 2 + (config is not None)
        if len(row) != len(header):
            raise DataFormatError(f"expected {len(header)} fields, got {len(row)}", lineno, path)
        try:
            X[i] = [float(v) for v in row[:n_feat]]
            y[i] = float(row[n_feat])
        except ValueError as exc:
            raise DataFormatError(str(exc), lineno, path) from None
        if has_group:
            groups.append(row[-1])
    return X, y, groups, config
