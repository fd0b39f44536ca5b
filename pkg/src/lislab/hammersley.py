"""Discrete-time Hammersley process on a strip of Poisson rows.

Row ``i`` of the planar picture carries a PPP of intensity ``p_i`` on
``[0, t]``.  Sweeping rows bottom to top, a particle at ``x`` jumps to the
leftmost unused row point in ``[0, x]``; a row point right of every
particle creates a new one.  After all rows the particle count equals the
planar LIS of the field.

With sources (a PPP(alpha) as the initial configuration) and sinks
(a point at abscissa 0 on row ``i`` with probability ``p_i/(p_i+alpha)``,
absorbing the leftmost particle), the count of particles and the creation
indicators bracket the LIS pathwise.

A single row is evaluated as a merge of particles and row points with a
two-state flag ``z`` (``z = 1`` means one row point is waiting to be
claimed): row points with ``z = 0`` are emitted and set ``z``; a particle
with ``z = 1`` is consumed (it moved to the waiting point); a particle with
``z = 0`` stays.  The terminal ``z`` is the creation flag.  A row point
tied with a particle is processed first, i.e. treated as ``<= x``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any

import numpy as np

from . import kernels
from .distributions import DiscretePmf, _as_rng
from .lis import lis_strict

__all__ = [
    "PoissonField",
    "ParticleConfig",
    "CouplingOutcome",
    "sample_field",
    "evolve_row",
    "run_plain",
    "run_coupled",
    "burke_row",
    "trajectory",
]


@dataclass
class PoissonField:
    """Planar Poisson points, stored sorted by ``(row, x)``."""

    t: float
    row_ids: np.ndarray
    xs: np.ndarray
    mode: str = "superposition"
    cutoff: int | None = None
    omitted_mass: float = 0.0

    def __post_init__(self):
        self.row_ids = np.asarray(self.row_ids, dtype=np.int64)
        self.xs = np.asarray(self.xs, dtype=np.float64)
        order = np.lexsort((self.xs, self.row_ids))
        self.row_ids, self.xs = self.row_ids[order], self.xs[order]

    def __len__(self) -> int:
        return len(self.xs)

    @property
    def max_row(self) -> int:
        return int(self.row_ids[-1]) if len(self) else 0

    @property
    def rows(self) -> dict[int, np.ndarray]:
        if not len(self):
            return {}
        cut = np.flatnonzero(np.diff(self.row_ids)) + 1
        return {int(r[0]): x for r, x in zip(np.split(self.row_ids, cut), np.split(self.xs, cut))}

    def restricted(self, i0: int) -> "PoissonField":
        keep = self.row_ids <= i0
        return PoissonField(self.t, self.row_ids[keep], self.xs[keep], self.mode)

    def lis(self, i0: int | None = None) -> int:
        """Planar LIS of the points on rows ``<= i0``."""
        keep = slice(None) if i0 is None else self.row_ids <= i0
        xs, rows = self.xs[keep], self.row_ids[keep]
        if len(xs) == 0:
            return 0
        return lis_strict(rows[np.argsort(xs, kind="stable")])

    def points(self) -> list[tuple[float, int]]:
        return [(float(x), int(r)) for x, r in zip(self.xs, self.row_ids)]


@dataclass
class ParticleConfig:
    positions: np.ndarray

    def __post_init__(self):
        self.positions = np.asarray(self.positions, dtype=np.float64)
        if np.any(np.diff(self.positions) <= 0):
            raise ValueError("particle positions must be strictly increasing")

    def __len__(self) -> int:
        return len(self.positions)


@dataclass
class CouplingOutcome:
    L_value: int
    H_count: int
    sum_I: int
    sum_J: int
    upper: int
    lower: int
    sink_cutoff: int
    sink_bound: float
    J_track: np.ndarray = field(repr=False)
    n_points: int = 0

    def holds(self) -> bool:
        """Pathwise sandwich, allowing the recorded sink-truncation slack."""
        return self.lower <= self.L_value <= self.upper + self.sink_bound

    def as_dict(self) -> dict[str, Any]:
        return {
            "L_value": self.L_value, "H_count": self.H_count, "sum_I": self.sum_I,
            "sum_J": self.sum_J, "upper": self.upper, "lower": self.lower,
            "sink_cutoff": self.sink_cutoff, "sink_bound": self.sink_bound,
            "n_points": self.n_points,
        }


def _tail_cutoff(d: DiscretePmf, level: float, start: int, cap: int) -> int:
    """Smallest ``m >= start`` with ``tail(m) <= level``, clipped to ``cap``."""
    start = max(int(start), 1)
    if d.support_size is not None:
        return min(max(start, d.support_size), cap)
    if d.tail(start) <= level:
        return start
    lo, hi = start, 2 * start
    while d.tail(hi) > level:
        if hi >= cap:
            return cap
        lo, hi = hi, min(2 * hi, cap)
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if d.tail(mid) > level:
            lo = mid
        else:
            hi = mid
    return hi


def sample_field(d: DiscretePmf, t: float, mode: str = "superposition", rng_seed=None,
                 cutoff: int | None = None) -> PoissonField:
    """Sample the planar field on ``[0, t]``.

    ``superposition`` draws ``N ~ Poisson(t)`` labelled points and is exact.
    ``per_row`` draws ``Poisson(t p_i)`` points on each row up to ``cutoff``
    (default: first row with ``t * tail <= 1e-6``) and records the omitted
    expected count ``t * tail(cutoff)``.
    """
    if not t > 0:
        raise ValueError("t must be > 0")
    rng = _as_rng(rng_seed)
    if mode == "superposition":
        n = int(rng.poisson(t))
        xs = rng.uniform(0.0, t, n)
        rows = d.rows_of(d.sample(n, rng))
        return PoissonField(t, rows, xs, mode)
    if mode == "per_row":
        if cutoff is None:
            cutoff = _tail_cutoff(d, 1e-6 / t, 1, 1 << 20)
        p = d.masses(cutoff)
        counts = rng.poisson(t * p)
        rows = np.repeat(np.arange(1, len(p) + 1, dtype=np.int64), counts)
        xs = rng.uniform(0.0, t, int(counts.sum()))
        return PoissonField(t, rows, xs, mode, cutoff, t * d.tail(cutoff))
    raise ValueError(f"unknown field mode {mode!r}")


def evolve_row(H, row_points, sink: bool = False) -> tuple[ParticleConfig, int]:
    """One row of the dynamics; returns the new configuration and the creation flag."""
    pos = H.positions if isinstance(H, ParticleConfig) else np.asarray(H, dtype=np.float64)
    new, created = kernels.evolve_row(pos, np.asarray(row_points, dtype=np.float64), bool(sink))
    return ParticleConfig(new), int(created)


def run_plain(fld: PoissonField, i0: int | None = None, record: bool = False):
    """Particle count after rows ``1..i0`` starting from no particles.

    With ``record`` also returns a list of ``(row, positions, created)``.
    """
    if i0 is None:
        i0 = fld.max_row
    keep = fld.row_ids <= i0
    rows, xs = fld.row_ids[keep], fld.xs[keep]
    if not record:
        h, _, _ = kernels.sweep(rows, xs, np.empty(0), np.empty(0, dtype=np.int64), 0)
        return len(h)
    h = np.empty(0)
    traj = []
    for r, pts in fld.restricted(i0).rows.items():
        h, c = kernels.evolve_row(h, pts, False)
        traj.append((r, h.copy(), int(c)))
    return len(h), traj


def _sinks(d: DiscretePmf, alpha: float, max_row: int, rng, tol: float, n_track: int,
           cap: int) -> tuple[np.ndarray, int, float]:
    cutoff = _tail_cutoff(d, alpha * tol, max(max_row + 1, n_track), cap)
    p = d.masses(cutoff)
    cutoff = len(p)
    I = rng.random(cutoff) < p / (p + alpha)
    bound = d.tail(cutoff) / alpha if d.support_size is None else 0.0
    return np.flatnonzero(I).astype(np.int64) + 1, cutoff, bound


def run_coupled(d: DiscretePmf, t: float, alpha: float, rng_seed=None, n_track: int = 10,
                sink_tol: float = 1e-3, max_sink_rows: int = 1 << 22) -> CouplingOutcome:
    """Field with PPP(alpha) sources and Bernoulli sinks; see ``CouplingOutcome``.

    Sinks are drawn on every row up to the first row past the field whose
    tail satisfies ``tail(m)/alpha <= sink_tol``; that bound is kept as
    ``sink_bound``.  Rows above the cutoff would only add sinks, which
    raise ``sum_I`` by exactly the number of particles they remove.
    """
    if not (alpha > 0 and t > 0):
        raise ValueError("alpha and t must be > 0")
    rng = _as_rng(rng_seed)
    fld = sample_field(d, t, "superposition", rng)
    sources = np.sort(rng.uniform(0.0, t, int(rng.poisson(alpha * t))))
    sink_rows, cutoff, bound = _sinks(d, alpha, fld.max_row, rng, sink_tol, n_track, max_sink_rows)
    h, sum_j, track = kernels.sweep(fld.row_ids, fld.xs, sources, sink_rows, n_track)
    L = fld.lis()
    hc, si = len(h), len(sink_rows)
    return CouplingOutcome(L, hc, si, int(sum_j), hc + si, min(hc, int(sum_j)), cutoff, bound,
                           np.asarray(track), len(fld))


def burke_row(p: float, alpha: float, t: float, rng_seed=None) -> tuple[np.ndarray, int]:
    """Single row with incoming PPP(alpha) particles, PPP(p) row points and a random sink.

    Returns the output process (particles that stayed together with row
    points that were emitted) and the terminal state of the flag.
    """
    if not (p > 0 and alpha > 0 and t > 0):
        raise ValueError("p, alpha and t must be > 0")
    rng = _as_rng(rng_seed)
    z0 = bool(rng.random() < p / (p + alpha))
    down = np.sort(rng.uniform(0.0, t, int(rng.poisson(alpha * t))))
    up = np.sort(rng.uniform(0.0, t, int(rng.poisson(p * t))))
    q, z = kernels.evolve_row(down, up, z0)
    return np.asarray(q), int(z)


def trajectory(d: DiscretePmf, t: float, alpha: float | None = None, rng_seed=None,
               sink_tol: float = 1e-3) -> dict[str, Any]:
    """Plot-ready record of one run: field points and per-row particle positions.

    Without ``alpha`` the plain process is run; with it, sources and sinks
    are added and marked.
    """
    rng = _as_rng(rng_seed)
    fld = sample_field(d, t, "superposition", rng)
    rows = fld.rows
    if alpha is None:
        sources = np.empty(0)
        sink_set: set[int] = set()
        last = fld.max_row
    else:
        sources = np.sort(rng.uniform(0.0, t, int(rng.poisson(alpha * t))))
        sink_rows, cutoff, _ = _sinks(d, alpha, fld.max_row, rng, sink_tol, 0, 1 << 22)
        sink_set = set(int(r) for r in sink_rows)
        last = max(fld.max_row, int(sink_rows[-1]) if len(sink_rows) else 0)
    h = sources
    steps = []
    for r in sorted(set(rows) | sink_set):
        if r > last:
            break
        pts = rows.get(r, np.empty(0))
        h, c = kernels.evolve_row(h, pts, r in sink_set)
        steps.append({"row": int(r), "sink": int(r in sink_set), "created": int(c),
                      "particles": [float(x) for x in h]})
    return {
        "t": float(t),
        "alpha": None if alpha is None else float(alpha),
        "distribution": d.to_dict(),
        "points": [[float(x), int(r)] for x, r in zip(fld.xs, fld.row_ids)],
        "sources": [float(x) for x in sources],
        "rows": steps,
        "final_count": len(h),
        "lis": fld.lis(),
    }
