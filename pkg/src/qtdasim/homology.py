"""Exact simplicial homology over the rationals.

Boundary matrices carry the alternating signs of the standard boundary map:
omitting the l-th vertex (vertices ascending, l from 0) contributes (-1)**l.
Ranks use fraction-free integer elimination, so every Betti number here is an
exact integer computation.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .complex import DistanceMatrix, Simplex, SimplexSet, critical_scales, enumerate_k_simplices
from .errors import InvalidInputError


@dataclass(frozen=True)
class BoundaryMatrix:
    rows: SimplexSet
    cols: SimplexSet
    entries: np.ndarray  # int64, shape (len(rows), len(cols))

    @property
    def k(self) -> int:
        return self.cols.k

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape


def boundary_matrix(S_k: SimplexSet, S_km1: SimplexSet | None) -> BoundaryMatrix:
    """Matrix of the boundary map from k-chains to (k-1)-chains.

    For ``k = 0`` the map is zero and the row set is empty; ``S_km1`` is
    ignored in that case.
    """
    if S_k.k == 0:
        rows = SimplexSet(-1, S_k.scale, S_k.n, ())
        return BoundaryMatrix(rows, S_k, np.zeros((0, len(S_k)), dtype=np.int64))
    if S_km1 is None or S_km1.k != S_k.k - 1:
        got = None if S_km1 is None else S_km1.k
        raise InvalidInputError(f"row set must have dimension {S_k.k - 1}, got {got}")
    index = S_km1.index
    m = np.zeros((len(S_km1), len(S_k)), dtype=np.int64)
    for j, s in enumerate(S_k):
        for l, face in s.faces():
            i = index.get(face.bits)
            if i is None:
                raise InvalidInputError(f"face {face} of {s} is missing from the row set")
            m[i, j] = -1 if l % 2 else 1
    return BoundaryMatrix(S_km1, S_k, m)


def rank_exact(M) -> int:
    """Rank over Q by Bareiss fraction-free elimination on Python integers.

    Python integers never overflow, so intermediate minors are exact at any
    size.  Non-integer input is rejected rather than rounded.
    """
    a = np.asarray(M)
    if a.size == 0:
        return 0
    if a.ndim != 2:
        raise InvalidInputError("rank_exact expects a 2-D matrix")
    if not np.issubdtype(a.dtype, np.integer):
        if not np.all(np.equal(np.mod(a, 1), 0)):
            raise InvalidInputError("rank_exact expects integer entries")
    rows = [[int(x) for x in row] for row in a.tolist()]
    n_rows, n_cols = len(rows), len(rows[0])
    rank = 0
    prev = 1
    for col in range(n_cols):
        if rank == n_rows:
            break
        pivot = next((r for r in range(rank, n_rows) if rows[r][col] != 0), None)
        if pivot is None:
            continue
        rows[rank], rows[pivot] = rows[pivot], rows[rank]
        p = rows[rank][col]
        prow = rows[rank]
        for r in range(rank + 1, n_rows):
            row = rows[r]
            f = row[col]
            if f == 0:
                rows[r] = [p * x // prev for x in row]
                continue
            rows[r] = [(p * x - f * y) // prev for x, y in zip(row, prow)]
        prev = p
        rank += 1
    return rank


def _simplex_sets(D: DistanceMatrix, eps: float, top: int) -> list[SimplexSet]:
    return [enumerate_k_simplices(D, eps, j) for j in range(min(top, D.n - 1) + 1)]


def boundary_rank(D: DistanceMatrix, eps: float, k: int) -> int:
    """rank of the k-th boundary map; zero when k is 0 or exceeds n-1."""
    if k <= 0 or k > D.n - 1:
        return 0
    S_k = enumerate_k_simplices(D, eps, k)
    if not len(S_k):
        return 0
    S_km1 = enumerate_k_simplices(D, eps, k - 1)
    return rank_exact(boundary_matrix(S_k, S_km1).entries)


def betti_at_scale(D: DistanceMatrix, eps: float, k: int) -> int:
    if not 0 <= k <= D.n - 1:
        raise InvalidInputError(f"homology dimension k={k} out of range 0..{D.n - 1}")
    size = len(enumerate_k_simplices(D, eps, k))
    return size - boundary_rank(D, eps, k) - boundary_rank(D, eps, k + 1)


def betti_numbers(D: DistanceMatrix, eps: float, max_k: int) -> list[int]:
    """Betti numbers 0..max_k, sharing the rank computations between dimensions."""
    if not 0 <= max_k <= D.n - 1:
        raise InvalidInputError(f"max dimension {max_k} out of range 0..{D.n - 1}")
    sets = _simplex_sets(D, eps, max_k + 1)
    ranks = [0]
    for j in range(1, len(sets)):
        if len(sets[j]):
            ranks.append(rank_exact(boundary_matrix(sets[j], sets[j - 1]).entries))
        else:
            ranks.append(0)
    ranks.append(0)
    return [len(sets[j]) - ranks[j] - ranks[j + 1] for j in range(max_k + 1)]


@dataclass(frozen=True)
class BettiCurve:
    """Step function of a Betti number over the scale.

    ``values[0]`` holds on ``(0, breakpoints[0])``, ``values[i]`` on
    ``(breakpoints[i-1], breakpoints[i])`` and ``values[-1]`` beyond the last
    breakpoint.  Values at the breakpoints themselves are not represented.
    """

    k: int
    breakpoints: tuple[float, ...]
    values: tuple[int, ...]

    def intervals(self) -> list[tuple[float, float]]:
        edges = (0.0, *self.breakpoints, math.inf)
        return list(zip(edges[:-1], edges[1:]))

    def __call__(self, eps: float) -> int:
        if eps in self.breakpoints:
            raise ValueError(f"curve is not defined at breakpoint {eps}")
        return self.values[int(np.searchsorted(self.breakpoints, eps))]


def sample_scales(D: DistanceMatrix) -> tuple[list[float], list[float]]:
    """Positive critical scales and one interior point per open interval between them."""
    cuts = [c for c in critical_scales(D) if c > 0]
    if not cuts:
        return cuts, [1.0]
    mids = [cuts[0] / 2]
    mids += [(a + b) / 2 for a, b in zip(cuts[:-1], cuts[1:])]
    mids.append(cuts[-1] + max(1.0, cuts[-1]))
    return cuts, mids


def betti_curve(D: DistanceMatrix, k: int) -> BettiCurve:
    if not 0 <= k <= D.n - 1:
        raise InvalidInputError(f"homology dimension k={k} out of range 0..{D.n - 1}")
    cuts, mids = sample_scales(D)
    return BettiCurve(k, tuple(cuts), tuple(betti_at_scale(D, e, k) for e in mids))


@dataclass(frozen=True)
class Barcode:
    """Half-open persistence intervals ``[birth, death)`` per dimension."""

    intervals: dict[int, list[tuple[float, float]]]

    def count_at(self, k: int, eps: float) -> int:
        return sum(1 for b, d in self.intervals.get(k, []) if b <= eps < d)

    def dimensions(self) -> list[int]:
        return sorted(self.intervals)


def filtration(D: DistanceMatrix, top: int) -> list[tuple[float, int, Simplex]]:
    """All simplices of dimension <= top as ``(appearance scale, dim, simplex)``,
    sorted into the reduction order."""
    out = []
    for j in range(min(top, D.n - 1) + 1):
        for s in enumerate_k_simplices(D, math.inf, j):
            v = s.vertices
            value = max((D.d[a, b] for a in v for b in v if a < b), default=0.0)
            out.append((float(value), j, s))
    out.sort(key=lambda t: (t[0], t[1], t[2].bits))
    return out


def _reduce_column(col: dict[int, int], other: dict[int, int], low: int) -> dict[int, int]:
    a, b = other[low], col[low]
    merged = {}
    for key in col.keys() | other.keys():
        v = a * col.get(key, 0) - b * other.get(key, 0)
        if v:
            merged[key] = v
    g = math.gcd(*merged.values()) if merged else 1
    if g > 1:
        merged = {key: v // g for key, v in merged.items()}
    return merged


def barcode(D: DistanceMatrix, max_k: int) -> Barcode:
    """Persistence intervals of the Vietoris-Rips filtration, dimensions 0..max_k.

    Standard column reduction with rational (integer, gcd-normalised)
    coefficients.  Zero-length intervals are dropped.
    """
    if max_k < 0 or max_k > D.n - 1:
        raise InvalidInputError(f"max dimension {max_k} out of range 0..{D.n - 1}")
    order = filtration(D, max_k + 1)
    position = {s.bits: i for i, (_, _, s) in enumerate(order)}
    pivot_of: dict[int, int] = {}
    reduced: list[dict[int, int]] = []
    paired: set[int] = set()
    pairs: list[tuple[int, int]] = []
    for j, (_, dim, s) in enumerate(order):
        col = {position[f.bits]: (-1 if l % 2 else 1) for l, f in s.faces()}
        while col:
            low = max(col)
            owner = pivot_of.get(low)
            if owner is None:
                break
            col = _reduce_column(col, reduced[owner], low)
        reduced.append(col)
        if col:
            low = max(col)
            pivot_of[low] = j
            paired.update((low, j))
            pairs.append((low, j))
    intervals: dict[int, list[tuple[float, float]]] = {k: [] for k in range(max_k + 1)}
    for birth, death in pairs:
        b_val, dim = order[birth][0], order[birth][1]
        d_val = order[death][0]
        if dim <= max_k and d_val > b_val:
            intervals[dim].append((b_val, d_val))
    for i, (val, dim, _) in enumerate(order):
        if i not in paired and dim <= max_k and not reduced[i]:
            intervals[dim].append((val, math.inf))
    for k in intervals:
        intervals[k].sort()
    return Barcode(intervals)


def kernel_dimension(entries: np.ndarray) -> int:
    """dim Ker of the map with these columns (rank-nullity)."""
    return entries.shape[1] - rank_exact(entries)


def euler_characteristic(sizes: Sequence[int]) -> int:
    return sum((-1) ** k * s for k, s in enumerate(sizes))
