"""Maximum-weight perfect assignment by the Hungarian method with potentials."""

import math
from dataclasses import dataclass

import numpy as np

from ..exceptions import ValidationError


@dataclass(frozen=True)
class Matching:
    """Directed (row, column, weight) edges; no PoD appears twice on either side."""

    edges: tuple[tuple[int, int, float], ...]

    def __post_init__(self):
        for side in (0, 1):
            seen = [e[side] for e in self.edges]
            twice = {x for x in seen if seen.count(x) > 1}
            if twice:
                raise ValidationError(211, pod=min(twice))
        for i, j, _ in self.edges:
            if i == j:
                raise ValidationError(203, what="matching", pod=i)

    @property
    def pairs(self) -> list[tuple[int, int]]:
        return [(i, j) for i, j, _ in self.edges]

    @property
    def total(self) -> float:
        return float(sum(w for _, _, w in self.edges))

    def __len__(self) -> int:
        return len(self.edges)


def _assign(cost: np.ndarray) -> np.ndarray:
    """Minimum-cost assignment of a square matrix; returns the column of every row."""
    n = cost.shape[0]
    u = np.zeros(n + 1)
    v = np.zeros(n + 1)
    # p[j]: row matched to column j (1-based, 0 = free); column 0 is a sentinel
    p = np.zeros(n + 1, dtype=np.int64)
    way = np.zeros(n + 1, dtype=np.int64)

    for i in range(1, n + 1):
        p[0] = i
        j0 = 0
        minv = np.full(n + 1, math.inf)
        used = np.zeros(n + 1, dtype=bool)
        while True:
            used[j0] = True
            i0 = p[j0]
            free = ~used[1:]
            cur = cost[i0 - 1] - u[i0] - v[1:]
            better = free & (cur < minv[1:])
            minv[1:][better] = cur[better]
            way[1:][better] = j0
            masked = np.where(free, minv[1:], math.inf)
            j1 = int(np.argmin(masked)) + 1
            delta = masked[j1 - 1]

            u[p[used]] += delta
            v[used] -= delta
            minv[~used] -= delta
            j0 = j1
            if p[j0] == 0:
                break
        while j0:
            j1 = way[j0]
            p[j0] = p[j1]
            j0 = j1

    assignment = np.empty(n, dtype=np.int64)
    assignment[p[1:] - 1] = np.arange(n)
    return assignment


def hungarian(weights: np.ndarray) -> Matching:
    """Maximum-weight perfect matching on the bipartite copy of the PoDs.

    Entries equal to -inf are forbidden; the diagonal always is. Forbidden
    entries are only used when no complete assignment avoids them and are left
    out of the returned matching.
    """
    w = np.array(weights, dtype=float)
    n = w.shape[0]
    if w.ndim != 2 or w.shape != (n, n):
        raise ValidationError(201, what="weights", shape=w.shape, expected=(n, n))
    forbidden = np.isneginf(w)
    np.fill_diagonal(forbidden, True)
    if np.any(np.isnan(w) | np.isposinf(w)):
        raise ValidationError(202, what="weights")

    finite = w[~forbidden]
    spread = float(np.abs(finite).max()) if finite.size else 0.0
    # cheaper than any assignment made of allowed entries
    penalty = (spread + 1.0) * (2 * n + 1)
    cost = np.where(forbidden, penalty, -np.where(forbidden, 0.0, w))

    assignment = _assign(cost)
    edges = tuple(
        (i, int(j), float(w[i, j])) for i, j in enumerate(assignment) if not forbidden[i, j]
    )
    return Matching(edges)
