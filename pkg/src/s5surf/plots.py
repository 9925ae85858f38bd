"""Figure rendering for analysis and check reports.

All functions write PNG files and return the path; rendering uses the
Agg backend so the CLI works headless.
"""

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np


def field_heatmaps(fields, grid, path, suptitle=None):
    """Render named scalar fields as a row of heatmaps.

    ``fields`` is a mapping name -> 2-D array on ``grid``.
    """
    names = list(fields)
    fig, axes = plt.subplots(1, len(names), figsize=(4 * len(names), 3.4))
    if len(names) == 1:
        axes = [axes]
    extent = (0.0, grid.lx, 0.0, grid.ly)
    for ax, name in zip(axes, names):
        data = np.asarray(fields[name])
        im = ax.imshow(data.T, origin="lower", extent=extent, aspect="auto")
        ax.set_title(name)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        fig.colorbar(im, ax=ax, fraction=0.046)
    if suptitle:
        fig.suptitle(suptitle)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def residual_bars(checks, path, title=None):
    """Log-scale bar chart of check residuals against their tolerances."""
    names = list(checks)
    res = np.array([max(checks[n]["residual"], 1e-18) for n in names])
    tol = np.array([checks[n]["tolerance"] for n in names])
    ok = [checks[n]["pass"] for n in names]
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(names)), 4))
    xs = np.arange(len(names))
    ax.bar(xs, res, color=["tab:green" if p else "tab:red" for p in ok])
    ax.plot(xs, tol, "k_", markersize=14, label="tolerance")
    ax.set_yscale("log")
    ax.set_xticks(xs)
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("residual")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def convergence_plot(ratios, path, title=None):
    """Bar chart of coarse/fine residual ratios with the factor-3 line."""
    names = list(ratios)
    vals = np.array([ratios[n] for n in names])
    fig, ax = plt.subplots(figsize=(max(6, 0.6 * len(names)), 4))
    xs = np.arange(len(names))
    ax.bar(xs, vals, color="tab:blue")
    ax.axhline(3.0, color="k", linestyle="--", label="factor 3")
    ax.axhline(4.0, color="gray", linestyle=":", label="second order")
    ax.set_xticks(xs)
    ax.set_xticklabels(names, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("residual ratio h : h/2")
    ax.legend()
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path


def surface_projection(values, path, title=None):
    """3-D scatter of the sample cloud along its top principal components."""
    X = values.reshape(-1, values.shape[-1])
    Xc = X - X.mean(axis=0)
    _, _, Vt = np.linalg.svd(Xc, full_matrices=False)
    P = Xc @ Vt[:3].T
    fig = plt.figure(figsize=(5, 4.5))
    ax = fig.add_subplot(projection="3d")
    ax.scatter(P[:, 0], P[:, 1], P[:, 2], s=1, c=P[:, 2], cmap="viridis")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return path
