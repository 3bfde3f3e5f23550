"""Seeded k-means over the rows of a spectral embedding."""
from dataclasses import dataclass

import numpy as np

from . import kernels
from ._random import seed_sequence, substream
from .errors import DegenerateInput
from .markov import Partition, canonical_labels

DEFAULT_RESTARTS = 10
DEFAULT_MAX_ITER = 300


@dataclass(frozen=True, eq=False)
class Embedding:
    """``n`` points in ``d`` real coordinates."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.array(self.points, dtype=float, copy=True)
        if pts.ndim == 1:
            pts = pts[:, None]
        if pts.ndim != 2:
            raise ValueError(f"embedding must be 2-d, got shape {pts.shape}")
        if not np.all(np.isfinite(pts)):
            raise ValueError("embedding has non-finite coordinates")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @classmethod
    def from_columns(cls, columns):
        """Real columns are used as-is; complex columns contribute their real then imaginary part."""
        columns = np.asarray(columns)
        if columns.ndim == 1:
            columns = columns[:, None]
        if not np.iscomplexobj(columns):
            return cls(columns)
        parts = []
        for c in range(columns.shape[1]):
            parts.extend([columns[:, c].real, columns[:, c].imag])
        return cls(np.column_stack(parts))

    @property
    def n(self):
        return self.points.shape[0]


@dataclass(frozen=True, eq=False)
class KMeansResult:
    partition: Partition
    centers: np.ndarray
    inertia: float
    restart: int
    converged: bool
    trace: np.ndarray


def kmeans_plus_plus(x, k, rng):
    """k-means++ seeding: first center uniform, the rest with probability proportional to D^2."""
    n = x.shape[0]
    chosen = [int(rng.integers(n))]
    closest = np.full(n, np.inf)
    for _ in range(1, k):
        diff = x - x[chosen[-1]]
        closest = np.minimum(closest, np.einsum("ij,ij->i", diff, diff))
        total = np.cumsum(closest)
        chosen.append(int(np.searchsorted(total, rng.random() * total[-1], side="right")))
    return x[chosen].copy()


def kmeans_detailed(e, k, seed=0, restarts=DEFAULT_RESTARTS, max_iter=DEFAULT_MAX_ITER):
    """Best of ``restarts`` seeded Lloyd runs; ties go to the lowest restart index."""
    x = e.points if isinstance(e, Embedding) else Embedding(e).points
    n = x.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"need 1 <= k <= n={n}, got {k}")
    if restarts < 1 or max_iter < 1:
        raise ValueError("restarts and max_iter must be at least 1")
    if np.unique(x, axis=0).shape[0] < k:
        raise DegenerateInput(f"fewer than {k} distinct points")
    root = seed_sequence(seed)
    best = None
    for r in range(restarts):
        centers = kmeans_plus_plus(x, k, substream(root, r))
        labels, centers, trace, converged = kernels.lloyd(x, centers, max_iter)
        score = kernels.inertia(x, centers, labels)
        if best is None or score < best[0]:
            best = (score, r, labels, centers, converged, trace)
    score, r, labels, centers, converged, trace = best
    canon = canonical_labels(labels)
    relabel = np.array([canon[np.flatnonzero(labels == j)[0]] for j in range(k)])
    ordered = np.empty_like(centers)
    ordered[relabel] = centers
    return KMeansResult(Partition(canon, k), ordered, score, r, converged, trace)


def kmeans(e, k, seed=0, restarts=DEFAULT_RESTARTS, max_iter=DEFAULT_MAX_ITER):
    """Partition the rows of ``e`` into ``k`` clusters (labels in first-occurrence order)."""
    return kmeans_detailed(e, k, seed, restarts, max_iter).partition
