"""Static PNG figures for regions and q-profiles (matplotlib, Agg backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .numrange import QProfile  # noqa: E402
from .regions import Region  # noqa: E402

__all__ = ["plot_region", "plot_profile"]

# fixed metadata keeps repeated runs byte-stable
_META = {"Software": None}


def plot_region(region: Region, path, title: str = "", eigenvalues=None) -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 5), dpi=100)
    pts = region.points
    if pts.size:
        ax.scatter(pts.real, pts.imag, s=1, color="#9ecae1", linewidths=0, rasterized=True)
    for poly in region.boundary:
        ax.plot(poly.real, poly.imag, color="#08519c", lw=1.2)
    if eigenvalues is not None:
        lam = np.asarray(eigenvalues)
        ax.plot(lam.real, lam.imag, "k+", ms=8)
    ax.axhline(0, color="0.6", lw=0.5)
    ax.axvline(0, color="0.6", lw=0.5)
    ax.set_aspect("equal")
    ax.set_xlabel("Re z")
    ax.set_ylabel("Im z")
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path


def plot_profile(profile: QProfile, path, title: str = "") -> Path:
    path = Path(path)
    fig, ax = plt.subplots(figsize=(5, 3.5), dpi=100)
    ax.plot(profile.q, profile.values, "o-", ms=3, color="#08519c")
    ax.axhline(profile.w0, color="0.6", lw=0.5, ls="--")
    ax.set_xlabel("q")
    ax.set_ylabel("w_q(C)")
    ax.set_xlim(0, 1)
    if title:
        ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, metadata=_META)
    plt.close(fig)
    return path
