"""Longest strictly increasing subsequences of sequences and planar point sets."""
from __future__ import annotations

from typing import Sequence

import numpy as np

from . import kernels
from .errors import DuplicateAbscissa, TooLarge

__all__ = [
    "lis_strict",
    "lis_oracle",
    "lis_planar",
    "greedy_subsequence",
    "distinct_count",
    "PlanarPointSet",
]

ORACLE_MAX = 10_000


def lis_strict(s) -> int:
    """Length of a longest strictly increasing subsequence, O(n log n).

    Patience sorting where each element replaces the leftmost pile top that
    is >= it; replacing ``>=`` (rather than ``>``) is what makes equal
    values unable to extend each other.
    """
    arr = np.asarray(s)
    if arr.size == 0:
        return 0
    if arr.dtype.kind in "iu" and np.abs(arr).max() > 2**53:
        return kernels._pykernels.lis_strict(arr.tolist())
    return int(kernels.lis_strict(arr.astype(np.float64, copy=False)))


def lis_oracle(s: Sequence) -> int:
    """Quadratic dynamic-programming LIS, independent of the patience code."""
    vals = list(s)
    n = len(vals)
    if n > ORACLE_MAX:
        raise TooLarge(f"oracle limited to {ORACLE_MAX} elements, got {n}")
    arr = np.asarray(vals)
    if n > 16 and arr.dtype.kind in "fiu":
        # same recurrence, inner maximum vectorised
        best_a = np.ones(n, dtype=np.int64)
        for j in range(1, n):
            prev = best_a[:j][arr[:j] < arr[j]]
            if prev.size:
                best_a[j] = prev.max() + 1
        return int(best_a.max())
    best = [1] * n
    for j in range(n):
        for i in range(j):
            if vals[i] < vals[j] and best[i] + 1 > best[j]:
                best[j] = best[i] + 1
    return max(best, default=0)


class PlanarPointSet:
    """Points ``(x, row)`` with pairwise distinct abscissas."""

    def __init__(self, xs, rows) -> None:
        xs = np.asarray(xs, dtype=np.float64).ravel()
        rows = np.asarray(rows).ravel()
        if xs.shape != rows.shape:
            raise ValueError("xs and rows must have the same length")
        order = np.argsort(xs, kind="stable")
        xs, rows = xs[order], rows[order]
        if len(xs) > 1 and np.any(xs[1:] == xs[:-1]):
            raise DuplicateAbscissa("planar point set has repeated abscissas")
        self.xs = xs
        self.rows = rows

    @classmethod
    def from_points(cls, points) -> "PlanarPointSet":
        pts = list(points)
        if not pts:
            return cls([], np.empty(0, dtype=np.int64))
        xs, rows = zip(*pts)
        return cls(xs, rows)

    def __len__(self) -> int:
        return len(self.xs)


def lis_planar(P) -> int:
    """Max number of points on a path increasing strictly in both coordinates."""
    if not isinstance(P, PlanarPointSet):
        P = PlanarPointSet.from_points(P)
    if len(P) == 0:
        return 0
    return lis_strict(P.rows)


def distinct_count(s) -> int:
    arr = np.asarray(s)
    if arr.size == 0:
        return 0
    return int(np.unique(arr).size)


def greedy_subsequence(d, s, n: int, r: int | None = None) -> tuple[int, list[int]]:
    """Greedy increasing subsequence built from the ``r_n`` heaviest atoms.

    The atoms carrying the ``r`` largest masses (``r`` defaults to r_n) are
    visited in increasing order; the scan takes the first occurrence of
    each after the previous pick.  Returns ``(R_n, positions)`` with
    0-based positions inside ``s[:n]``.
    """
    from .variational import solve_r

    if r is None:
        r = solve_r(d, n)
    if r == 0 or n <= 0:
        return 0, []
    _, ranks = d.sorted_masses(r)
    atoms = np.sort(np.asarray(d.atoms_of_ranks(np.sort(ranks))))
    window = np.asarray(s)[:n]
    hit = np.flatnonzero(np.isin(window, atoms))
    positions: list[int] = []
    k = 0
    for pos in hit:
        if window[pos] == atoms[k]:
            positions.append(int(pos))
            k += 1
            if k == len(atoms):
                break
    return len(positions), positions
