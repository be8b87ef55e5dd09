"""Matplotlib figures written next to the CSV reports."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .io import raster_image  # noqa: E402


def _finish(fig, path):
    fig.tight_layout()
    fig.savefig(path, dpi=120)
    plt.close(fig)
    return path


def plot_bound(series, path, title, label):
    """Measured upper distance per n against the ``2**-n`` bound, log scale."""
    n = np.array([p[0] for p in series])
    d = np.array([p[1] for p in series])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.semilogy(n, 2.0 ** -n, "k--", label=r"$2^{-n}$")
    ax.semilogy(n, np.maximum(d, 1e-300), "o", color="tab:blue", label=label)
    ax.set_xlabel("n (shared leading symbols)")
    ax.set_ylabel("distance")
    ax.set_title(title)
    ax.legend(frameon=False)
    return _finish(fig, path)


def plot_evolution(curve, path):
    t = np.array([c[0] for c in curve])
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(t, [c[1] for c in curve], "-", color="tab:red", label="closed-form update")
    ax.plot(t, [c[2] for c in curve], "o", mfc="none", color="k", label="Moran re-solve")
    ax.set_xlabel("t")
    ax.set_ylabel("similarity dimension")
    ax.set_title("Dimension under exponential scaling")
    ax.legend(frameon=False)
    return _finish(fig, path)


def plot_raster(raster, path, title=""):
    img = raster_image(raster)
    lo, hi = raster.space.lower, raster.space.upper
    extent = (lo[0], hi[0], 0, 1) if raster.space.dim == 1 else (lo[0], hi[0], lo[1], hi[1])
    fig, ax = plt.subplots(figsize=(5, 5 if raster.space.dim == 2 else 1.5))
    ax.imshow(img, cmap="gray", vmin=0, vmax=255, extent=extent, interpolation="nearest", aspect="auto")
    if raster.space.dim == 1:
        ax.set_yticks([])
    ax.set_title(title)
    return _finish(fig, path)


def plot_box_counts(bc, path, reference=None):
    eps = bc.sizes / bc.resolution
    x = np.log(1 / eps)
    fig, ax = plt.subplots(figsize=(5.5, 4))
    ax.plot(x, np.log(bc.counts), "o", color="k", label="occupied boxes")
    ax.plot(x, bc.intercept + bc.slope * x, "-", color="tab:blue", label=f"slope {bc.slope:.4f}")
    if reference is not None:
        ax.plot([], [], " ", label=f"similarity dimension {reference:.4f}")
    ax.set_xlabel(r"$\log(1/\varepsilon)$")
    ax.set_ylabel(r"$\log N(\varepsilon)$")
    ax.legend(frameon=False)
    return _finish(fig, path)


def render_report_figures(data, out_dir):
    """Write every figure the collected suite data allows; returns the paths."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    if data.get("agreement"):
        paths.append(plot_bound(data["agreement"], out / "agreement_bound.png",
                                "Sequences sharing n leading maps", "max D + tail"))
    if data.get("density"):
        paths.append(plot_bound(data["density"], out / "periodic_density.png",
                                "Distance to periodic truncation", "max D(F, G_n) + tail"))
    if data.get("evolution"):
        paths.append(plot_evolution(data["evolution"], out / "dimension_evolution.png"))
    if data.get("raster") is not None:
        paths.append(plot_raster(data["raster"], out / "attractor.png", "Deterministic attractor raster"))
        paths.append(plot_box_counts(data["box_counts"], out / "box_counting.png", data.get("similarity_dimension")))
    return paths
