"""Raster approximations of attractors and the measurements made on them.

Rasters use cell-centre semantics over the space box: cell ``i`` along an
axis covers ``[lower + i*w, lower + (i+1)*w)``. Bits are indexed
``[ix]`` in 1D and ``[ix, iy]`` in 2D.
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .errors import EmptyRaster, ResolutionMismatch, SpaceMismatch, ValidationError

CHAOS_CHUNK = 1 << 16
CHAOS_WALKERS = 256


@dataclass(frozen=True, eq=False)
class AttractorRaster:
    space: object
    resolution: int
    bits: np.ndarray
    iterations: int = 0

    def __post_init__(self):
        if self.space.dim > 2:
            raise ValidationError("rasters are limited to 1D and 2D spaces")
        if self.bits.shape != (self.resolution,) * self.space.dim:
            raise ValidationError(f"bits shape {self.bits.shape} does not match resolution {self.resolution}")

    @classmethod
    def full(cls, space, resolution):
        return cls(space, resolution, np.ones((resolution,) * space.dim, dtype=bool))

    @classmethod
    def empty(cls, space, resolution):
        return cls(space, resolution, np.zeros((resolution,) * space.dim, dtype=bool))

    @property
    def cell_widths(self):
        return self.space.widths / self.resolution

    @property
    def pixel_diameter(self):
        return self.space.diagonal / self.resolution

    @property
    def count(self):
        return int(self.bits.sum())

    @property
    def fraction(self):
        return self.count / self.bits.size

    def centers(self):
        idx = np.argwhere(self.bits)
        return np.asarray(self.space.lower) + (idx + 0.5) * self.cell_widths

    def cells_of(self, points):
        """Cell indices of ``points`` (clipped into the grid)."""
        idx = np.floor((np.asarray(points) - np.asarray(self.space.lower)) / self.cell_widths).astype(np.int64)
        return np.clip(idx, 0, self.resolution - 1)

    def dilated(self, cells=1):
        structure = np.ones((3,) * self.space.dim, dtype=bool)
        bits = ndimage.binary_dilation(self.bits, structure=structure, iterations=cells)
        return AttractorRaster(self.space, self.resolution, bits)

    def __eq__(self, other):
        return (
            isinstance(other, AttractorRaster)
            and self.space == other.space
            and self.resolution == other.resolution
            and np.array_equal(self.bits, other.bits)
        )

    def __hash__(self):
        return hash((self.space, self.resolution, self.bits.tobytes()))


def _stamp_boxes(bits, first, last):
    """Set every cell ``first <= idx <= last`` (per axis) for each row of the index arrays."""
    res = bits.shape[0]
    first = np.clip(first, 0, res - 1)
    last = np.clip(last, 0, res - 1)
    span = int((last - first).max()) if len(first) else 0
    for off in itertools.product(range(span + 1), repeat=first.shape[1]):
        cells = first + np.asarray(off)
        ok = np.all(cells <= last, axis=1)
        bits[tuple(cells[ok].T)] = True


def _image_cells(raster, m, centers):
    """Index ranges of the cells meeting the bounding box of each cell's image.

    The image of a cell with centre ``c`` lies in ``f(c) +- |A| w / 2``; every
    closed cell meeting that box is kept, so a raster covering the attractor
    keeps covering it.
    """
    lower = np.asarray(raster.space.lower)
    w = raster.cell_widths
    half = np.abs(m.A) @ (w / 2)
    img = m(centers)
    first = np.floor((img - half - lower) / w).astype(np.int64)
    last = np.ceil((img + half - lower) / w).astype(np.int64) - 1
    return first, np.maximum(first, last)


def _centre_cells(raster, m, centers):
    """Centre-image cell with a one-cell neighbourhood (coarser, simpler superset)."""
    cells = raster.cells_of(m(centers))
    half_diag = raster.pixel_diameter / 2
    radius = np.array([max(1, math.ceil(m.ratio * half_diag / w)) for w in raster.cell_widths])
    return cells - radius, cells + radius


STAMPS = {"bbox": _image_cells, "dilate": _centre_cells}


def hutchinson_step(raster, ifs, workers=1, stamp="bbox"):
    """One application of ``W(A) = U f_i(A)`` on the raster.

    Every occupied cell is pushed through each map and all cells its image
    can touch are marked, so a raster covering the attractor keeps covering
    it. ``stamp="bbox"`` marks the cells meeting the image's bounding box;
    ``stamp="dilate"`` marks the centre image's cell and its neighbours.
    """
    if ifs.space != raster.space:
        raise SpaceMismatch("system and raster live on different spaces")
    cover = STAMPS[stamp]
    out = np.zeros_like(raster.bits)
    centers = raster.centers()
    if len(centers) == 0:
        return AttractorRaster(raster.space, raster.resolution, out, raster.iterations + 1)

    def work(chunk):
        local = np.zeros_like(raster.bits)
        for m in ifs.maps:
            _stamp_boxes(local, *cover(raster, m, chunk))
        return local

    chunks = np.array_split(centers, max(1, workers))
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(work, chunks))
    else:
        parts = [work(c) for c in chunks]
    for part in parts:
        out |= part
    return AttractorRaster(raster.space, raster.resolution, out, raster.iterations + 1)


def attractor_deterministic(ifs, resolution=512, max_iters=200, workers=1, stamp="bbox"):
    """Iterate the Hutchinson step from the full raster until it stops changing.

    The occupied set shrinks monotonically, so the loop always terminates;
    ``iterations`` on the result records the steps taken.
    """
    if resolution < 16:
        raise ValueError("resolution must be at least 16")
    raster = AttractorRaster.full(ifs.space, resolution)
    for _ in range(max_iters):
        nxt = hutchinson_step(raster, ifs, workers, stamp)
        if np.array_equal(nxt.bits, raster.bits):
            return nxt
        raster = nxt
    return raster


def _fixed_point(m):
    return np.linalg.solve(np.eye(m.dim) - m.A, m.b)


def _chaos_chunk(ifs, start, n_points, seed, burn_in, lower, widths, resolution):
    """Run ``CHAOS_WALKERS`` independent orbits from ``start`` with their own PCG64 stream."""
    rng = np.random.default_rng(seed)
    mats = np.stack([m.A for m in ifs.maps])
    offs = np.stack([m.b for m in ifs.maps])
    walkers = min(CHAOS_WALKERS, n_points)
    steps = -(-n_points // walkers)
    x = np.tile(start, (walkers, 1))
    cells = []
    for step in range(burn_in + steps):
        pick = rng.integers(0, len(mats), size=walkers)
        x = np.einsum("wij,wj->wi", mats[pick], x) + offs[pick]
        if step >= burn_in:
            cells.append(x)
    pts = np.concatenate(cells)[:n_points]
    idx = np.floor((pts - lower) / widths * resolution).astype(np.int64)
    return np.clip(idx, 0, resolution - 1)


def attractor_chaos_game(ifs, resolution=512, n_points=1_000_000, seed=42, burn_in=20, workers=1):
    """Stochastic rendering with uniform map selection.

    The point budget is cut into fixed chunks of ``CHAOS_CHUNK`` points; chunk
    ``i`` draws from ``numpy.random.default_rng(seed + i)`` (PCG64) and runs
    ``CHAOS_WALKERS`` orbits started at the first map's fixed point, dropping
    ``burn_in`` steps per orbit. Chunking does not depend on ``workers``, so
    the raster is bit-identical at any worker count.
    """
    if n_points < 1000:
        raise ValueError("n_points must be at least 1000")
    space = ifs.space
    lower = np.asarray(space.lower)
    widths = space.widths
    start = _fixed_point(ifs.maps[0])
    sizes = [CHAOS_CHUNK] * (n_points // CHAOS_CHUNK)
    if n_points % CHAOS_CHUNK:
        sizes.append(n_points % CHAOS_CHUNK)
    jobs = [(ifs, start, n, seed + i, burn_in, lower, widths, resolution) for i, n in enumerate(sizes)]
    if workers > 1:
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(lambda j: _chaos_chunk(*j), jobs))
    else:
        parts = [_chaos_chunk(*j) for j in jobs]
    bits = np.zeros((resolution,) * space.dim, dtype=bool)
    for cells in parts:
        bits[tuple(cells.T)] = True
    return AttractorRaster(space, resolution, bits)


def hausdorff_distance(a, b):
    """Symmetric Hausdorff distance between the occupied cell-centre sets.

    Uses the exact Euclidean distance transform of each raster's complement,
    sampled with the physical cell widths.
    """
    if a.space != b.space or a.resolution != b.resolution:
        raise ResolutionMismatch("rasters differ in space or resolution")
    if a.count == 0 or b.count == 0:
        raise EmptyRaster("Hausdorff distance needs nonempty rasters")
    sampling = a.cell_widths
    to_b = ndimage.distance_transform_edt(~b.bits, sampling=sampling)
    to_a = ndimage.distance_transform_edt(~a.bits, sampling=sampling)
    return float(max(to_b[a.bits].max(), to_a[b.bits].max()))


@dataclass(frozen=True)
class BoxCount:
    resolution: int
    sizes: np.ndarray  # box edge in cells
    counts: np.ndarray
    slope: float
    intercept: float


def box_counts(raster):
    """Occupied box counts at dyadic sizes 4 .. resolution/4 cells."""
    res = raster.resolution
    if raster.count == 0:
        raise EmptyRaster("box counting needs a nonempty raster")
    if res < 16 or res & (res - 1):
        raise ValidationError("box counting needs a power-of-two resolution >= 16")
    sizes, counts = [], []
    s = 4
    while s <= res // 4:
        k = res // s
        shape = sum(((k, s) for _ in range(raster.space.dim)), ())
        axes = tuple(range(1, 2 * raster.space.dim, 2))
        counts.append(int(raster.bits.reshape(shape).any(axis=axes).sum()))
        sizes.append(s)
        s *= 2
    sizes = np.array(sizes)
    counts = np.array(counts)
    eps = sizes / res
    slope, intercept = np.polyfit(np.log(1 / eps), np.log(counts), 1)
    return BoxCount(res, sizes, counts, float(slope), float(intercept))
