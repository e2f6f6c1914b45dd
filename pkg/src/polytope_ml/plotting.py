"""Figures rendered to SVG files with matplotlib.

Output is byte-for-byte reproducible: the SVG id salt is fixed, the date
metadata is dropped, and the resolved run configuration is stored in the
file's description metadata.
"""

from __future__ import annotations

import json

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

_RC = {"svg.hashsalt": "polytope-ml", "svg.fonttype": "path", "figure.dpi": 100}


def _save(fig, path, config):
    meta = {"Date": None, "Creator": "polytope_ml"}
    if config is not None:
        meta["Description"] = "config: " + json.dumps(config, sort_keys=True, default=str)
    with matplotlib.rc_context(_RC):
        fig.savefig(path, format="svg", metadata=meta)
    plt.close(fig)


def true_vs_predicted(path, y_true, y_pred, title="", label="value", config=None):
    """Scatter of predictions against truth with the line y = x."""
    y_true = np.asarray(y_true, dtype=float)
    y_pred = np.asarray(y_pred, dtype=float)
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(5, 5))
        ax.scatter(y_true, y_pred, s=6, alpha=0.5, color="tab:blue", linewidths=0)
        lo = float(min(y_true.min(), y_pred.min()))
        hi = float(max(y_true.max(), y_pred.max()))
        ax.plot([lo, hi], [lo, hi], color="black", lw=1)
        ax.set_xlabel(f"true {label}")
        ax.set_ylabel(f"predicted {label}")
        if title:
            ax.set_title(title)
        fig.tight_layout()
    _save(fig, path, config)


def mds_scatter(path, points, values, title="", label="volume", config=None):
    """1- or 2-component embedding coloured by a label."""
    pts = np.asarray(points, dtype=float)
    values = np.asarray(values, dtype=float)
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 5))
        if pts.shape[1] == 1:
            sc = ax.scatter(pts[:, 0], values, c=values, s=8, cmap="viridis", linewidths=0)
            ax.set_xlabel("x0")
            ax.set_ylabel(label)
        else:
            sc = ax.scatter(pts[:, 0], pts[:, 1], c=values, s=8, cmap="viridis", linewidths=0)
            ax.set_xlabel("x0")
            ax.set_ylabel("x1")
        fig.colorbar(sc, ax=ax, label=label)
        if title:
            ax.set_title(title)
        fig.tight_layout()
    _save(fig, path, config)


def histogram(path, values, label="value", integer=None, config=None):
    """Histogram; integer-valued data gets one bin per integer."""
    v = np.asarray(values, dtype=float)
    if integer is None:
        integer = bool(np.all(v == np.round(v)))
    if integer:
        bins = np.arange(v.min() - 0.5, v.max() + 1.5, 1.0)
    else:
        bins = 30
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        ax.hist(v, bins=bins, color="tab:gray", edgecolor="black", linewidth=0.4)
        ax.set_xlabel(label)
        ax.set_ylabel("count")
        fig.tight_layout()
    _save(fig, path, config)


def line_plot(path, x, series: dict, xlabel="", ylabel="", config=None):
    """One line per named series, for metric-versus-parameter sweeps."""
    with matplotlib.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(6, 4))
        for name, ys in series.items():
            ax.plot(x, ys, marker="o", label=name)
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        ax.legend()
        fig.tight_layout()
    _save(fig, path, config)
