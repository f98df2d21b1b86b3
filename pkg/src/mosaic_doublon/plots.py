"""Static SVG figures.  Plotting is best-effort and never blocks data output."""

from __future__ import annotations

import functools
import logging
from pathlib import Path

import numpy as np

log = logging.getLogger(__name__)


def _pyplot():
    import matplotlib

    matplotlib.use("Agg")
    matplotlib.rcParams["svg.hashsalt"] = "mosaic-doublon"
    import matplotlib.pyplot as plt

    return plt


def _save(fig, path: Path) -> Path:
    fig.savefig(path, format="svg", metadata={"Date": None})
    return path


def best_effort(fn):
    """Return the SVG path on success; log and return ``None`` on any failure."""

    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except Exception as exc:  # plotting must never gate the CSV contract
            log.warning("plot %s skipped: %s", fn.__name__, exc)
            return None

    return wrapper


@best_effort
def plot_bands(path, K, E_S_min, E_S_max, E_plus, E_minus):
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    ax.fill_between(K, E_S_min, E_S_max, color="0.8", label="scattering")
    ax.plot(K, E_plus, "C0", label="bound (+)")
    ax.plot(K, E_minus, "C3", label="bound (-)")
    ax.set_xlabel("K")
    ax.set_ylabel("E / J")
    ax.legend(frameon=False)
    out = _save(fig, Path(path))
    plt.close(fig)
    return out


@best_effort
def plot_fdmap(path, lam, E, fd, overlay=None):
    """Scatter of eigenvalues coloured by fd; ``overlay`` maps a label to (lam, E) arrays."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    sc = ax.scatter(lam, E, c=fd, s=2, cmap="viridis", vmin=0, vmax=1)
    for label, (x, y) in (overlay or {}).items():
        ax.plot(x, y, "r--", lw=1, label=label)
    fig.colorbar(sc, ax=ax, label="fd")
    ax.set_xlabel("lambda")
    ax.set_ylabel("E / J")
    out = _save(fig, Path(path))
    plt.close(fig)
    return out


@best_effort
def plot_profiles(path, panels):
    """``panels`` is a list of (title, site, weight)."""
    plt = _pyplot()
    fig, axes = plt.subplots(len(panels), 1, figsize=(5, 1.6 * len(panels)), sharex=True, squeeze=False)
    for ax, (title, site, weight) in zip(axes[:, 0], panels):
        ax.bar(site, weight, width=1.0)
        ax.set_title(title, fontsize=8)
    axes[-1, 0].set_xlabel("site j")
    out = _save(fig, Path(path))
    plt.close(fig)
    return out


@best_effort
def plot_curves(path, curves, xlabel, ylabel, logx=False):
    """``curves`` maps a label to (x, y) arrays."""
    plt = _pyplot()
    fig, ax = plt.subplots(figsize=(5, 4))
    for label, (x, y) in curves.items():
        ax.plot(np.asarray(x), np.asarray(y), marker="." if len(x) < 50 else None, label=label)
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel(ylabel)
    ax.legend(frameon=False, fontsize=8)
    out = _save(fig, Path(path))
    plt.close(fig)
    return out
