"""Pure-Python kernels.  Same signatures as the compiled ``_ckernels``."""
from __future__ import annotations

from bisect import bisect_left

import numpy as np


def lis_strict(values) -> int:
    # tails[k] is the smallest possible last value of a strictly
    # increasing subsequence of length k + 1
    tails: list = []
    for x in values:
        k = bisect_left(tails, x)
        if k == len(tails):
            tails.append(x)
        else:
            tails[k] = x
    return len(tails)


def evolve_row(h, row, sink=False):
    """One Hammersley step; returns (new positions, created flag).

    ``sink`` puts an extra point at abscissa 0 that absorbs the leftmost
    particle.  Row points tied with a particle count as left of it.
    """
    h = np.asarray(h, dtype=np.float64)
    row = np.asarray(row, dtype=np.float64)
    out = []
    z = bool(sink)
    i = j = 0
    nh, nr = len(h), len(row)
    while i < nh or j < nr:
        if j < nr and (i >= nh or row[j] <= h[i]):
            if not z:
                z = True
                out.append(row[j])
            j += 1
        else:
            if z:
                z = False
            else:
                out.append(h[i])
            i += 1
    return np.array(out, dtype=np.float64), int(z)


def sweep(row_ids, xs, sources, sink_rows, n_track=0):
    """Run the particle system over all occupied rows.

    ``row_ids``/``xs`` list field points sorted by (row, x); ``sink_rows``
    is sorted.  Returns (final positions, sum of creations, creation
    indicators for rows 1..n_track).
    """
    row_ids = np.asarray(row_ids, dtype=np.int64)
    xs = np.asarray(xs, dtype=np.float64)
    sink_rows = np.asarray(sink_rows, dtype=np.int64)
    h = np.asarray(sources, dtype=np.float64)
    track = np.zeros(n_track, dtype=np.int8)
    sum_j = 0
    a = b = 0
    na, nb = len(row_ids), len(sink_rows)
    while a < na or b < nb:
        if b >= nb or (a < na and row_ids[a] <= sink_rows[b]):
            r = row_ids[a]
        else:
            r = sink_rows[b]
        start = a
        while a < na and row_ids[a] == r:
            a += 1
        sink = b < nb and sink_rows[b] == r
        if sink:
            b += 1
        h, created = evolve_row(h, xs[start:a], sink)
        sum_j += created
        if created and r <= n_track:
            track[r - 1] = 1
    return h, sum_j, track
