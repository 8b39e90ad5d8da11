"""Point-cloud surrogates for compact sets: Hausdorff distance and
resolution-limited estimates of the upper and lower closed limits."""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree


def point_cloud(points) -> np.ndarray:
    """Validate and return an ``(n, d)`` float array (n >= 1, finite)."""
    arr = np.atleast_2d(np.asarray(points, dtype=float))
    if arr.size == 0 or arr.shape[0] == 0:
        raise ValueError("empty point cloud")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point cloud has non-finite entries")
    return arr


def directed_hausdorff(a, b) -> float:
    """``sup_{x in a} inf_{y in b} |x - y|`` (Euclidean)."""
    a, b = point_cloud(a), point_cloud(b)
    _, idx = cKDTree(b).query(a)
    return float(np.max(_norms(a - b[idx])))


def _norms(diff: np.ndarray) -> np.ndarray:
    # scaled so that tiny separations do not underflow to zero when squared
    scale = np.max(np.abs(diff), axis=1)
    safe = np.where(scale > 0, scale, 1.0)
    return scale * np.linalg.norm(diff / safe[:, None], axis=1)


def hausdorff_distance(a, b) -> float:
    return max(directed_hausdorff(a, b), directed_hausdorff(b, a))


@dataclass(frozen=True)
class SetLimitEstimate:
    """Cluster representatives of an estimated closed limit.

    Valid only up to ``resolution``; ``empty`` flags an estimate with no points.
    """

    points: np.ndarray
    resolution: float

    @property
    def empty(self) -> bool:
        return len(self.points) == 0


def _cluster(points: np.ndarray, resolution: float, d: int) -> np.ndarray:
    reps: list[np.ndarray] = []
    for p in points:
        if all(np.linalg.norm(p - r) > resolution for r in reps):
            reps.append(p)
    return np.array(reps) if reps else np.zeros((0, d))


def _tail(seq: Sequence) -> list[np.ndarray]:
    clouds = [point_cloud(c) for c in seq]
    if not clouds:
        raise ValueError("empty sequence")
    return clouds[len(clouds) // 2:]


def _distances_to_terms(x: np.ndarray, trees: list[cKDTree]) -> np.ndarray:
    return np.array([t.query(x)[0] for t in trees])


def pk_lower_limit(seq: Sequence, resolution: float = 1e-2) -> SetLimitEstimate:
    """Points within ``resolution`` of every term in the second half of the sequence.

    Candidates are taken from the last term, which best approximates the limit.
    """
    tail = _tail(seq)
    d = tail[-1].shape[1]
    trees = [cKDTree(c) for c in tail]
    keep = [x for x in tail[-1] if np.all(_distances_to_terms(x, trees) <= resolution)]
    pts = np.array(keep) if keep else np.zeros((0, d))
    return SetLimitEstimate(_cluster(pts, resolution, d), resolution)


def pk_upper_limit(seq: Sequence, resolution: float = 1e-2) -> SetLimitEstimate:
    """Points of the tail that recur (within ``resolution``) in both halves of the tail.

    Approximates the cluster points of all subsequential point limits.
    """
    tail = _tail(seq)
    d = tail[-1].shape[1]
    trees = [cKDTree(c) for c in tail]
    cand = np.vstack(tail[::-1])
    keep = [x for x in cand if _recurs(x, trees, resolution)]
    pts = np.array(keep) if keep else np.zeros((0, d))
    return SetLimitEstimate(_cluster(pts, resolution, d), resolution)


def _recurs(x, trees, resolution) -> bool:
    # recurrence: approximable from terms in both halves of the tail
    near = _distances_to_terms(x, trees) <= resolution
    half = len(near) // 2
    if half == 0:
        return bool(near.any())
    return bool(near[:half].any() and near[half:].any())
