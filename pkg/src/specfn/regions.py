"""Planar sets sampled on grids or as disc unions, and their comparison."""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial import cKDTree
from skimage import measure

__all__ = ["Disc", "Region", "hausdorff_distance", "level_set_boundary",
           "nearest_spacing", "region_to_csv", "region_to_svg"]


@dataclass(frozen=True)
class Disc:
    center: complex
    radius: float

    def __post_init__(self):
        if not self.radius >= 0:
            raise ValueError("disc radius must be nonnegative")

    def contains(self, z, closed: bool = True, tol: float = 0.0) -> bool:
        d = abs(complex(z) - self.center)
        return d <= self.radius + tol if closed else d < self.radius + tol

    @property
    def max_modulus(self) -> float:
        return abs(self.center) + self.radius

    def sample(self, rng: np.random.Generator, m: int, boundary: int = 0) -> np.ndarray:
        """``m`` area-uniform points plus ``boundary`` equally spaced rim points."""
        r = self.radius * np.sqrt(rng.random(m))
        phi = 2 * np.pi * rng.random(m)
        pts = self.center + r * np.exp(1j * phi)
        if boundary:
            ang = 2 * np.pi * np.arange(boundary) / boundary
            pts = np.concatenate([pts, self.center + self.radius * np.exp(1j * ang)])
        return pts


@dataclass
class Region:
    """A set in the plane represented by sample points.

    ``boundary`` is a list of polylines (complex arrays).  ``spacing`` is the
    grid step when the region was sampled on a grid, else ``None``.
    """

    points: np.ndarray
    boundary: list = field(default_factory=list)
    spacing: float | None = None
    bbox: tuple | None = None
    values: np.ndarray | None = field(default=None, repr=False)
    axes: tuple | None = field(default=None, repr=False)

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=complex).ravel()
        if self.bbox is None and self.points.size:
            self.bbox = (float(self.points.real.min()), float(self.points.real.max()),
                         float(self.points.imag.min()), float(self.points.imag.max()))

    @property
    def diagonal(self) -> float:
        """Length of one grid-cell diagonal (0 for non-grid regions)."""
        return float(np.sqrt(2) * self.spacing) if self.spacing else 0.0

    def area(self) -> float:
        if not self.spacing:
            raise ValueError("area is only defined for grid-sampled regions")
        return float(self.points.size * self.spacing**2)

    def max_modulus(self) -> float:
        return float(np.abs(self.points).max()) if self.points.size else 0.0


def _as_xy(z) -> np.ndarray:
    z = np.asarray(z, dtype=complex).ravel()
    return np.column_stack([z.real, z.imag])


def hausdorff_distance(P, Q) -> float:
    """Symmetric Hausdorff distance between two finite point sets."""
    P = P.points if isinstance(P, Region) else P
    Q = Q.points if isinstance(Q, Region) else Q
    p, q = _as_xy(P), _as_xy(Q)
    if len(p) == 0 and len(q) == 0:
        return 0.0
    if len(p) == 0 or len(q) == 0:
        return float("inf")
    d_pq = cKDTree(q).query(p)[0].max()
    d_qp = cKDTree(p).query(q)[0].max()
    return float(max(d_pq, d_qp))


def nearest_spacing(P) -> float:
    """Largest nearest-neighbour distance inside a point cloud."""
    p = _as_xy(P)
    if len(p) < 2:
        return 0.0
    d, _ = cKDTree(p).query(p, k=2)
    return float(d[:, 1].max())


def level_set_boundary(values: np.ndarray, xs: np.ndarray, ys: np.ndarray,
                       level: float) -> list:
    """Marching-squares polylines of ``values == level``.

    ``values[i, j]`` is sampled at ``xs[j] + 1j * ys[i]`` on a uniform grid.
    """
    out = []
    for c in measure.find_contours(values, level):
        rows, cols = c[:, 0], c[:, 1]
        x = np.interp(cols, np.arange(xs.size), xs)
        y = np.interp(rows, np.arange(ys.size), ys)
        out.append(x + 1j * y)
    return out


def region_to_csv(region: Region) -> str:
    buf = io.StringIO()
    for z in region.points:
        buf.write(f"{float(z.real)!r},{float(z.imag)!r}\n")
    return buf.getvalue()


def region_to_svg(region: Region, scale: float = 100.0) -> str:
    """Boundary polylines as a standalone SVG, origin at the centre."""
    polys = region.boundary
    pts = np.concatenate(polys) if polys else region.points
    extent = float(np.abs(np.concatenate([pts.real, pts.imag])).max()) if pts.size else 1.0
    half = scale * extent * 1.05 or scale
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{2 * half:.1f}" '
        f'height="{2 * half:.1f}" viewBox="{-half:.3f} {-half:.3f} {2 * half:.3f} {2 * half:.3f}">',
        f'<line x1="{-half:.3f}" y1="0" x2="{half:.3f}" y2="0" style="stroke:#bbbbbb;stroke-width:0.5"/>',
        f'<line x1="0" y1="{-half:.3f}" x2="0" y2="{half:.3f}" style="stroke:#bbbbbb;stroke-width:0.5"/>',
    ]
    for poly in polys:
        coords = " ".join(f"{scale * z.real:.3f},{-scale * z.imag:.3f}" for z in poly)
        lines.append(f'<polyline points="{coords}" '
                     'style="fill:none;stroke:#1f3b73;stroke-width:1.5"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
