"""Double description method on integer data.

Computes the extreme rays of a pointed cone ``{x : <row, x> >= 0 for all rows}``.
Ray coordinates and constraint values stay Python integers, so the output is
exact; numpy is only used for the combinatorial adjacency bookkeeping.
"""
from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from .._rational import inverse, primitive_int, row_reduce


def _normalize(ray: list[int]) -> tuple[int, ...]:
    g = 0
    for v in ray:
        g = math.gcd(g, v)
    if g > 1:
        return tuple(v // g for v in ray)
    return tuple(ray)


def _adjacent_pairs(zeros: np.ndarray, pos: list[int], neg: list[int], need: int):
    """Pairs (p, q) whose common zero set is contained in no third ray's zero set."""
    zf = zeros.astype(np.float32)
    counts = zf[pos] @ zf[neg].T
    out = []
    for a, p in enumerate(pos):
        qs = np.nonzero(counts[a] >= need)[0] if need > 0 else np.arange(len(neg))
        if len(qs) == 0:
            continue
        cols = np.nonzero(zeros[p])[0]
        qidx = [neg[b] for b in qs]
        if len(cols) == 0:
            # empty common set is contained in every zero set
            if len(zeros) == 2:
                out.extend((p, q) for q in qidx)
            continue
        sub = zf[:, cols]
        common = zf[np.ix_(qidx, cols)]
        sizes = common.sum(axis=1)
        contained = (sub @ common.T) >= sizes[None, :]
        n_contain = contained.sum(axis=0)
        for q, c in zip(qidx, n_contain):
            if c == 2:
                out.append((p, q))
    return out


def extreme_rays(rows: Sequence[Sequence[int]]) -> list[tuple[int, ...]]:
    """Extreme rays of ``{x : A x >= 0}`` for an integer matrix ``A`` of full column rank.

    Raises ``ValueError`` if the cone is not pointed (rows do not span).
    """
    rows = [tuple(int(v) for v in r) for r in rows]
    if not rows:
        raise ValueError("no constraints")
    n = len(rows[0])
    m = len(rows)
    _, basis = row_reduce([list(r) for r in zip(*rows)])
    # pivot columns of A^T index a maximal independent subset of rows
    if len(basis) < n:
        raise ValueError("cone is not pointed")
    inv = inverse([rows[i] for i in basis])
    rays = []
    zeros = np.zeros((n, m), dtype=bool)
    for j in range(n):
        rays.append(primitive_int([inv[i][j] for i in range(n)]))
        for i in basis:
            if i != basis[j]:
                zeros[j, i] = True

    in_basis = set(basis)
    for h in range(m):
        if h in in_basis:
            continue
        row = rows[h]
        vals = [sum(x * y for x, y in zip(row, r)) for r in rays]
        pos = [k for k, v in enumerate(vals) if v > 0]
        neg = [k for k, v in enumerate(vals) if v < 0]
        zer = [k for k, v in enumerate(vals) if v == 0]
        if not neg:
            zeros[zer, h] = True
            continue
        pairs = _adjacent_pairs(zeros, pos, neg, n - 2)
        keep = pos + zer
        new_rays = [rays[k] for k in keep]
        new_zeros = [zeros[keep]]
        if zer:
            new_zeros[0][len(pos):, h] = True
        if pairs:
            extra = np.zeros((len(pairs), m), dtype=bool)
            for t, (p, q) in enumerate(pairs):
                sp, sq = vals[p], vals[q]
                new_rays.append(_normalize([sp * b - sq * a for a, b in zip(rays[p], rays[q])]))
                extra[t] = zeros[p] & zeros[q]
            extra[:, h] = True
            new_zeros.append(extra)
        rays = new_rays
        zeros = np.vstack(new_zeros)
    return rays
