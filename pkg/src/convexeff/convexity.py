"""Convex hulls of category extensions and the chip-count consistency score.

A category's consistency is the ratio of its extension size to the number of
universe points falling inside the extension's convex hull; a system's score
is the extension-size-weighted average over categories. Degenerate point sets
(single chips, collinear runs, coplanar patches) are handled inside their
affine span, which keeps e.g. an achromatic column from breaking the ratio.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial import ConvexHull, QhullError

from .core import HardPartition, Universe

# A point counts as inside when its signed distance to every supporting facet
# (and to the hull's affine span) is at most REL_TOL times the coordinate
# scale. Chips sitting exactly on a shared facet then count for both sides,
# which keeps nearest-exemplar partitions at exactly 1.0.
REL_TOL = 1e-7

# Singular values below this fraction of the largest are treated as zero when
# finding the affine span. Exact coordinates are used; no jitter is applied.
RANK_RTOL = 1e-9


@dataclass(frozen=True)
class Hull:
    """Convex hull of a point set, possibly rank-deficient.

    ``origin``/``basis`` define the affine span (basis rows orthonormal);
    ``facets`` holds qhull-style [normal | offset] rows in span coordinates
    for rank >= 2, and the 1D interval is kept in ``interval`` for rank 1.
    """

    points: np.ndarray
    vertices: np.ndarray
    rank: int
    origin: np.ndarray
    basis: np.ndarray
    facets: np.ndarray | None
    interval: tuple[float, float] | None
    scale: float

    @property
    def tol(self) -> float:
        return REL_TOL * self.scale

    def contains(self, query: np.ndarray) -> np.ndarray:
        """Boundary-inclusive membership test for an (m, d) array of points."""
        query = np.atleast_2d(np.asarray(query, dtype=float))
        centered = query - self.origin
        inside = np.ones(len(query), dtype=bool)
        if self.rank < self.points.shape[1]:
            coords = centered @ self.basis.T if self.rank else np.zeros((len(query), 0))
            residual = centered - coords @ self.basis
            inside &= np.linalg.norm(residual, axis=1) <= self.tol
        else:
            coords = centered @ self.basis.T
        if self.rank == 1:
            lo, hi = self.interval
            t = coords[:, 0]
            inside &= (t >= lo - self.tol) & (t <= hi + self.tol)
        elif self.rank >= 2:
            # facet rows are unit-normal, so A @ y + b is a signed distance
            dist = coords @ self.facets[:, :-1].T + self.facets[:, -1]
            inside &= dist.max(axis=1) <= self.tol
        return inside


def _affine_span(points: np.ndarray) -> tuple[np.ndarray, np.ndarray, int]:
    origin = points.mean(axis=0)
    centered = points - origin
    if len(points) == 1:
        return origin, np.zeros((0, points.shape[1])), 0
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    rank = int(np.sum(s > RANK_RTOL * max(s[0], 1e-300)))
    return origin, vt[:rank], rank


def convex_hull(points) -> Hull:
    """Hull of >= 1 points in R^d, handling every affine rank up to d."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    if len(points) < 1:
        raise ValueError("need at least one point")
    scale = max(1.0, float(np.abs(points).max()))
    origin, basis, rank = _affine_span(points)

    while True:
        if rank == 0:
            return Hull(points, points[:1], 0, origin, basis[:0], None, None, scale)
        coords = (points - origin) @ basis[:rank].T
        if rank == 1:
            t = coords[:, 0]
            lo, hi = float(t.min()), float(t.max())
            verts = points[[int(np.argmin(t)), int(np.argmax(t))]]
            return Hull(points, verts, 1, origin, basis[:1], None, (lo, hi), scale)
        try:
            qh = ConvexHull(coords)
        except QhullError:
            # numerically thin in the last span direction: retry one rank down
            rank -= 1
            continue
        return Hull(
            points,
            points[qh.vertices],
            rank,
            origin,
            basis[:rank],
            np.asarray(qh.equations),
            None,
            scale,
        )


def hull_membership_count(hull: Hull, universe: Universe) -> int:
    """Number of universe referents whose coordinates fall inside the hull."""
    return int(hull.contains(universe.coords).sum())


def category_consistency(partition: HardPartition, word, universe: Universe) -> float:
    """Extension size over hull occupancy for one category; 1.0 means convex."""
    idx = partition.words.index(word) if word in partition.words else -1
    if idx < 0:
        raise KeyError(f"word {word!r} is not in this partition")
    ext = np.flatnonzero(partition.assign == idx)
    if len(ext) == 0:
        raise ValueError(f"word {word!r} has an empty extension")
    hull = convex_hull(universe.coords[ext])
    return len(ext) / hull_membership_count(hull, universe)


def system_consistency(partition: HardPartition, universe: Universe) -> float:
    """Extension-weighted average of category consistencies, in (0, 1]."""
    if partition.n != universe.n:
        raise ValueError("partition and universe sizes disagree")
    total = 0.0
    for i in range(partition.k):
        ext = np.flatnonzero(partition.assign == i)
        hull = convex_hull(universe.coords[ext])
        total += len(ext) ** 2 / hull_membership_count(hull, universe)
    return total / partition.n
