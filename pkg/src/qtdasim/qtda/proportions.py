"""Simplex-proportion Monte Carlo and the kernel-dimension error threshold."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from ..complex import simplex_diameters
from ..errors import InvalidInputError


def random_distances(rng: np.random.Generator, n: int) -> np.ndarray:
    """Symmetric matrix with i.i.d. uniform[0, 1] off-diagonal entries."""
    d = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    d[iu] = rng.uniform(0.0, 1.0, size=iu[0].size)
    return d + d.T


def trial_rng(seed: int, n: int, trial: int) -> np.random.Generator:
    # one stream per (seed, n, trial): results do not depend on scheduling
    return np.random.default_rng([seed, n, trial])


def _trial_counts(args: tuple[int, int, int, tuple[int, ...], np.ndarray]) -> np.ndarray:
    """Simplex counts, shape (len(ks), len(eps)), for one random matrix."""
    seed, n, trial, ks, eps = args
    d = random_distances(trial_rng(seed, n, trial), n)
    out = np.empty((len(ks), len(eps)), dtype=np.int64)
    for i, k in enumerate(ks):
        diam = np.sort(simplex_diameters(d, k))
        out[i] = np.searchsorted(diam, eps, side="right")
    return out


@dataclass(frozen=True)
class ProportionGrid:
    ns: tuple[int, ...]
    ks: tuple[int, ...]
    eps: np.ndarray
    trials: int
    seed: int
    counts: np.ndarray  # int64, (len(ns), trials, len(ks), len(eps))

    def zeta(self) -> np.ndarray:
        """Per-trial proportions, same shape as ``counts``."""
        totals = np.array([[math.comb(n, k + 1) for k in self.ks] for n in self.ns], dtype=float)
        return self.counts / totals[:, None, :, None]

    def mean_exact(self, ni: int, ki: int, ei: int) -> Fraction:
        n, k = self.ns[ni], self.ks[ki]
        return Fraction(int(self.counts[ni, :, ki, ei].sum()), self.trials * math.comb(n, k + 1))

    def mean(self) -> np.ndarray:
        """Mean proportion, shape (len(ns), len(ks), len(eps))."""
        out = np.empty((len(self.ns), len(self.ks), len(self.eps)))
        for idx in np.ndindex(out.shape):
            out[idx] = float(self.mean_exact(*idx))
        return out

    def efficient(self) -> np.ndarray:
        """mean proportion >= n**-6, compared in exact rational arithmetic."""
        out = np.empty((len(self.ns), len(self.ks), len(self.eps)), dtype=bool)
        for idx in np.ndindex(out.shape):
            out[idx] = self.mean_exact(*idx) >= Fraction(1, self.ns[idx[0]] ** 6)
        return out


def proportion_monte_carlo(
    n_range: Iterable[int],
    k: int | Sequence[int],
    eps_grid: Sequence[float],
    trials: int,
    seed: int,
    workers: int = 1,
) -> ProportionGrid:
    """Mean fraction of (k+1)-subsets that are simplices, over random distance matrices.

    The same random matrix (per n and trial) is shared by every k and scale,
    so monotonicity in k and in scale holds trial by trial.
    """
    ns = tuple(int(n) for n in n_range)
    ks = (int(k),) if np.isscalar(k) else tuple(int(x) for x in k)
    eps = np.asarray(eps_grid, dtype=float)
    if trials < 1:
        raise InvalidInputError("need at least one trial")
    if not ns or not ks:
        raise InvalidInputError("empty n range or dimension list")
    for n in ns:
        for kk in ks:
            if kk < 0 or kk + 1 > n:
                raise InvalidInputError(f"cannot form {kk}-simplices from {n} points")
    jobs = [(seed, n, t, ks, eps) for n in ns for t in range(trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_trial_counts, jobs, chunksize=max(1, len(jobs) // (4 * workers))))
    else:
        results = [_trial_counts(j) for j in jobs]
    counts = np.stack(results).reshape(len(ns), trials, len(ks), len(eps))
    return ProportionGrid(ns, ks, eps, trials, seed, counts)


def error_threshold(simplex_count: int) -> Fraction:
    """Largest |eta_measured - eta_ideal| that still rounds to the right kernel dimension."""
    if simplex_count < 1:
        raise InvalidInputError("simplex count must be positive")
    return Fraction(1, 2 * simplex_count)
