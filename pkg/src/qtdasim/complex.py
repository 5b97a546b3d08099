"""Distance data and Vietoris-Rips simplices.

A simplex over ``n`` points is stored as an integer bit-set: bit ``j`` is set
when point ``j + 1`` belongs to the simplex.  Kets are rendered with point 1
leftmost, so ``|110>`` is the edge between points 1 and 2 (bit-set ``0b011``).
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Iterator, Sequence

import numpy as np

from .errors import InvalidInputError

SYMMETRY_TOL = 1e-12
METRICS = ("euclidean", "manhattan", "chebyshev")


@dataclass(frozen=True)
class DistanceMatrix:
    """Validated symmetric distance table.  Build it with
    :func:`validate_distance_matrix` or :func:`pairwise_distances`."""

    d: np.ndarray

    @property
    def n(self) -> int:
        return self.d.shape[0]

    def __getitem__(self, idx):
        return self.d[idx]

    def tolist(self) -> list[list[float]]:
        return self.d.tolist()


def validate_distance_matrix(raw) -> DistanceMatrix:
    try:
        d = np.array(raw, dtype=float)
    except (TypeError, ValueError) as exc:
        raise InvalidInputError(f"distance matrix is not numeric or is ragged: {exc}") from exc
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise InvalidInputError(f"distance matrix must be square and non-empty, got shape {d.shape}")
    if not np.all(np.isfinite(d)):
        raise InvalidInputError("distance matrix has non-finite entries")
    diag = np.flatnonzero(np.diag(d) != 0)
    if diag.size:
        i = int(diag[0])
        raise InvalidInputError(f"nonzero diagonal entry d[{i}][{i}] = {d[i, i]}")
    neg = np.argwhere(d < 0)
    if neg.size:
        i, j = map(int, neg[0])
        raise InvalidInputError(f"negative distance d[{i}][{j}] = {d[i, j]}")
    asym = np.argwhere(np.abs(d - d.T) > SYMMETRY_TOL)
    if asym.size:
        i, j = map(int, asym[0])
        raise InvalidInputError(f"asymmetric distances d[{i}][{j}] = {d[i, j]} but d[{j}][{i}] = {d[j, i]}")
    d = (d + d.T) / 2
    d.setflags(write=False)
    return DistanceMatrix(d)


def pairwise_distances(points: Sequence[Sequence[float]], metric: str = "euclidean") -> DistanceMatrix:
    if metric not in METRICS:
        raise InvalidInputError(f"unknown metric {metric!r}; expected one of {', '.join(METRICS)}")
    if len(points) == 0:
        raise InvalidInputError("need at least one point")
    dims = {len(p) for p in points}
    if len(dims) != 1:
        raise InvalidInputError(f"points have mixed dimensions {sorted(dims)}")
    x = np.asarray(points, dtype=float)
    diff = np.abs(x[:, None, :] - x[None, :, :])
    if metric == "euclidean":
        d = np.sqrt((diff**2).sum(axis=-1))
    elif metric == "manhattan":
        d = diff.sum(axis=-1)
    else:
        d = diff.max(axis=-1, initial=0.0)
    return validate_distance_matrix(d)


@dataclass(frozen=True, order=True)
class Simplex:
    bits: int
    n: int = field(compare=False)

    def __post_init__(self):
        if self.bits <= 0 or self.bits >= 1 << self.n:
            raise InvalidInputError(f"bit-set {self.bits:#b} is not a nonempty subset of {self.n} points")

    @classmethod
    def from_vertices(cls, vertices: Sequence[int], n: int) -> Simplex:
        bits = 0
        for v in vertices:
            bits |= 1 << v
        return cls(bits, n)

    @classmethod
    def from_ket(cls, ket: str) -> Simplex:
        """Parse ``"110"`` or ``"|110>"`` (point 1 leftmost)."""
        s = ket.strip().lstrip("|").rstrip(">⟩")
        if not s or set(s) - {"0", "1"}:
            raise InvalidInputError(f"bad ket {ket!r}")
        return cls.from_vertices([i for i, c in enumerate(s) if c == "1"], len(s))

    @property
    def vertices(self) -> tuple[int, ...]:
        """Zero-based point indices in ascending order."""
        return tuple(j for j in range(self.n) if self.bits >> j & 1)

    @property
    def dimension(self) -> int:
        return self.bits.bit_count() - 1

    def faces(self) -> list[tuple[int, Simplex]]:
        """``(l, face)`` pairs where ``face`` omits the l-th vertex."""
        if self.dimension == 0:
            return []
        return [(l, Simplex(self.bits & ~(1 << v), self.n)) for l, v in enumerate(self.vertices)]

    def ket(self) -> str:
        return "".join("1" if self.bits >> j & 1 else "0" for j in range(self.n))

    def __str__(self) -> str:
        return f"|{self.ket()}>"


@dataclass(frozen=True)
class SimplexSet:
    k: int
    scale: float
    n: int
    members: tuple[Simplex, ...]

    def __post_init__(self):
        if any(s.dimension != self.k for s in self.members):
            raise InvalidInputError(f"all members must be {self.k}-simplices")
        bits = [s.bits for s in self.members]
        if bits != sorted(set(bits)):
            raise InvalidInputError("members must be unique and sorted by bit-set")

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self.members)

    def __contains__(self, s: Simplex) -> bool:
        return s.bits in self.index

    def __getitem__(self, i: int) -> Simplex:
        return self.members[i]

    @property
    def index(self) -> dict[int, int]:
        """Map from bit-set to position in canonical order."""
        return {s.bits: i for i, s in enumerate(self.members)}

    @classmethod
    def from_simplices(cls, simplices, k: int, n: int, scale: float = math.nan) -> SimplexSet:
        return cls(k, scale, n, tuple(sorted(set(simplices))))


def is_clique(d: np.ndarray, vertices: Sequence[int], eps: float) -> bool:
    return all(d[a, b] <= eps for a, b in itertools.combinations(vertices, 2))


def enumerate_k_simplices(D: DistanceMatrix, eps: float, k: int) -> SimplexSet:
    n = D.n
    if not 0 <= k <= n - 1:
        raise InvalidInputError(f"simplex dimension k={k} out of range 0..{n - 1}")
    if eps < 0:
        raise InvalidInputError(f"scale must be non-negative, got {eps}")
    found = [
        Simplex.from_vertices(c, n)
        for c in itertools.combinations(range(n), k + 1)
        if is_clique(D.d, c, eps)
    ]
    return SimplexSet.from_simplices(found, k, n, eps)


def critical_scales(D: DistanceMatrix) -> list[float]:
    iu = np.triu_indices(D.n, 1)
    return [float(x) for x in np.unique(D.d[iu])]


def simplex_proportion(D: DistanceMatrix, eps: float, k: int) -> float:
    if k + 1 > D.n or k < 0:
        raise InvalidInputError(f"cannot form {k}-simplices from {D.n} points")
    return len(enumerate_k_simplices(D, eps, k)) / math.comb(D.n, k + 1)


def simplex_diameters(d: np.ndarray, k: int) -> np.ndarray:
    """Largest pairwise distance inside every (k+1)-subset, in
    ``itertools.combinations`` order.  A subset is a simplex at scale eps
    exactly when its diameter is <= eps."""
    n = d.shape[0]
    combos = np.array(list(itertools.combinations(range(n), k + 1)), dtype=np.intp).reshape(-1, k + 1)
    if k == 0:
        return np.zeros(len(combos))
    diam = np.zeros(len(combos))
    for a, b in itertools.combinations(range(k + 1), 2):
        np.maximum(diam, d[combos[:, a], combos[:, b]], out=diam)
    return diam
