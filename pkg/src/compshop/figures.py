"""Matplotlib renderers for the CLI report paths.

Each function writes one PNG next to the delimited output it illustrates
and returns the path.  Rendering is headless (Agg) and deterministic.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

__all__ = [
    "fig_price_cdf",
    "fig_value_line",
    "fig_sweep",
    "fig_monopoly",
]

_DPI = 150


def fig_price_cdf(dist, path, title="price distribution"):
    lo, hi = dist.support
    pad = 0.05 * (hi - lo)
    ps = np.linspace(lo - pad, hi + pad, 600)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ps, [dist.cdf(p) for p in ps], lw=1.5)
    for piece in dist.pieces:
        ax.axvline(piece.hi, color="gray", lw=0.6, ls=":")
    ax.set_xlabel("price")
    ax.set_ylabel("CDF")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def fig_value_line(vf, support_x, path, x_min=1e-3,
                   title="value on the comparison line"):
    """V(x, 1-x) with the support points marked."""
    xs = np.linspace(x_min, 0.5, 400)
    vals = [vf.value_on_line(x) for x in xs]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, vals, lw=1.5)
    for sx in support_x:
        if sx <= 0.5:
            ax.axvline(sx, color="crimson", lw=0.8, ls="--")
    ax.set_xlabel("x  (posterior on the line y = 1 - x)")
    ax.set_ylabel("net value")
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def fig_sweep(rows, path, ycol="welfare", title=None):
    """Sweep rows (dicts with a kappa column) on a log-kappa axis."""
    kappas = [r["kappa"] for r in rows]
    ys = [r[ycol] for r in rows]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.semilogx(kappas, ys, "o-", ms=3, lw=1.2)
    ax.set_xlabel("kappa")
    ax.set_ylabel(ycol)
    ax.set_title(title or f"{ycol} vs kappa")
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path


def fig_monopoly(sol, path, title="monopoly posterior / price distributions"):
    hi = min(sol.x_hi, 1.0)
    xs = np.linspace(sol.x_lo * 0.9, hi, 500)
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(xs, [sol.F(x) for x in xs], lw=1.5, label="posterior CDF F")
    ax.plot(xs, [sol.G(p) for p in xs], lw=1.5, label="price CDF G")
    ax.set_xlabel("posterior mean / price")
    ax.set_ylabel("CDF")
    ax.legend()
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=_DPI)
    plt.close(fig)
    return path
