"""Replicated experiments on L_n with deterministic, shard-invariant seeding.

Replicate ``r`` at sample size ``n`` draws from
``SeedSequence(master_seed, spawn_key=(n, r))``.  The key is hashed by
numpy's SeedSequence mixing function, which is stable across platforms
and releases, so any single replicate can be replayed in isolation and
results do not depend on how replicates are split across workers.
Aggregation always runs over the replicate values in ``(n, r)`` order.
"""
from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, NamedTuple

import numpy as np

from .distributions import DiscretePmf, MixedDistribution, from_descriptor
from .errors import InvalidDescriptor, LislabError
from .hammersley import run_coupled
from .lis import distinct_count, greedy_subsequence, lis_strict
from .variational import asymptotic_prediction, scales, solve_f, solve_r, solve_w

__all__ = [
    "DEFAULT_SEED",
    "STATISTICS",
    "CSV_COLUMNS",
    "BANDS",
    "ExperimentSpec",
    "ExperimentResult",
    "replicate_rng",
    "run_experiment",
    "estimate_lis",
    "variance_check",
    "tail_check",
    "mixed_limit",
    "greedy_vs_lis",
    "coupling_study",
    "format_float",
]

DEFAULT_SEED = 20160901

STATISTICS = ("mean", "variance", "quantiles", "ratios", "tail_check", "coupling_check",
              "greedy", "distinct")

CSV_COLUMNS = ["family", "params", "n", "replicates", "stat", "estimate", "stderr",
               "sidecar_f", "sidecar_w", "sidecar_r", "sidecar_mu", "sidecar_nu",
               "asymptotic", "violations"]

# Finite-n acceptance bands for ratio statistics.  The asymptotic statements
# only bound liminf/limsup; these widen them for desk-scale n.
BANDS = {
    "ratio_f": (0.5, 1.1, "limsup L/f <= 1 and liminf L/f >= 1/2, widened for finite-n slack"),
    "ratio_w": (0.9, math.inf, "liminf L/w >= 1, 10% finite-n slack"),
    "ratio_sqrt": (None, None, "L/(2 sqrt n) -> sqrt(rho1); band is target +- 0.1"),
    "greedy_ratio": (0.8, 1.0, "Chebyshev bound P(R < lam r) <= lam/((1-lam)^2 r)"),
}


def format_float(x) -> str:
    """12 significant digits in scientific notation; empty for missing."""
    if x is None:
        return ""
    if isinstance(x, (int, np.integer)) and not isinstance(x, bool):
        return str(int(x))
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".11e")


def replicate_rng(master_seed: int, n: int, r: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(int(master_seed), spawn_key=(int(n), int(r))))


@dataclass(frozen=True)
class ExperimentSpec:
    distribution: dict
    n_grid: tuple
    replicates: int
    master_seed: int = DEFAULT_SEED
    statistics: tuple = ("mean", "variance")
    eps: float = 0.5
    alpha: float | None = None
    poissonize: bool = False

    def __post_init__(self):
        object.__setattr__(self, "n_grid", tuple(int(n) for n in self.n_grid))
        object.__setattr__(self, "statistics", tuple(self.statistics))
        if self.replicates < 1:
            raise ValueError("replicates must be >= 1")
        if not self.n_grid or any(b <= a for a, b in zip(self.n_grid, self.n_grid[1:])):
            raise ValueError("n_grid must be non-empty and strictly ascending")
        if self.n_grid[0] < 1:
            raise ValueError("sample sizes must be >= 1")
        unknown = set(self.statistics) - set(STATISTICS)
        if unknown:
            raise ValueError(f"unknown statistics: {sorted(unknown)}")
        if not 0.0 < self.eps < 1.0:
            raise ValueError("eps must lie in (0, 1)")
        from_descriptor(self.distribution)  # validate early

    @classmethod
    def from_dict(cls, obj: dict) -> "ExperimentSpec":
        if not isinstance(obj, dict):
            raise InvalidDescriptor("experiment spec must be a JSON object")
        known = {"distribution", "n_grid", "replicates", "master_seed", "statistics", "eps",
                 "alpha", "poissonize"}
        extra = set(obj) - known
        if extra:
            raise InvalidDescriptor(f"unknown experiment spec keys: {sorted(extra)}")
        missing = {"distribution", "n_grid", "replicates"} - set(obj)
        if missing:
            raise InvalidDescriptor(f"experiment spec is missing {sorted(missing)}")
        return cls(**obj)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["n_grid"] = list(self.n_grid)
        d["statistics"] = list(self.statistics)
        return d

    def with_(self, **kw) -> "ExperimentSpec":
        d = self.to_dict()
        d.update(kw)
        return ExperimentSpec(**d)


@dataclass
class ExperimentResult:
    spec: ExperimentSpec
    rows: list = field(default_factory=list)
    sidecars: dict = field(default_factory=dict)
    values: dict = field(default_factory=dict, repr=False)
    bands: dict = field(default_factory=dict)

    def get(self, n: int, stat: str) -> dict:
        for row in self.rows:
            if row["n"] == n and row["stat"] == stat:
                return row
        raise KeyError((n, stat))

    def estimate(self, n: int, stat: str) -> float:
        return self.get(n, stat)["estimate"]

    def csv_rows(self) -> list[list[str]]:
        dist = self.spec.distribution
        family = str(dist.get("family", ""))
        params = json.dumps({k: v for k, v in dist.items() if k != "family"}, sort_keys=True,
                            separators=(",", ":"))
        out = []
        for row in self.rows:
            sc = self.sidecars.get(row["n"], {})
            out.append([
                family, params, str(row["n"]), str(row["replicates"]), row["stat"],
                format_float(row["estimate"]), format_float(row["stderr"]),
                format_float(sc.get("f")), format_float(sc.get("w")), format_float(sc.get("r")),
                format_float(sc.get("mu")), format_float(sc.get("nu")),
                format_float(sc.get("asymptotic")), str(row["violations"]),
            ])
        return out

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        w.writerows(self.csv_rows())
        return buf.getvalue()

    def to_json_obj(self) -> dict:
        rows = [dict(zip(CSV_COLUMNS, r)) for r in self.csv_rows()]
        return {"spec": self.spec.to_dict(), "columns": CSV_COLUMNS, "rows": rows,
                "bands": {k: [format_float(v[0]), format_float(v[1]), v[2]]
                          for k, v in sorted(self.bands.items())}}

    def to_json(self) -> str:
        return json.dumps(self.to_json_obj(), indent=2, sort_keys=True) + "\n"


# -- replicate workers --------------------------------------------------------

_DIST_CACHE: dict[str, Any] = {}


def _dist(desc: dict):
    key = json.dumps(desc, sort_keys=True)
    d = _DIST_CACHE.get(key)
    if d is None:
        d = _DIST_CACHE[key] = from_descriptor(desc)
    return d


# Fields of one replicate record.
_FIELDS = ("L", "K", "R", "upper", "lower", "viol")


def _one(spec_d: dict, n: int, r: int, extras: dict) -> tuple:
    d = _dist(spec_d["distribution"])
    rng = replicate_rng(spec_d["master_seed"], n, r)
    stats = spec_d["statistics"]
    if "coupling_check" in stats:
        o = run_coupled(d, float(n), extras["alpha"], rng)
        viol = int(not (o.lower <= o.L_value <= o.upper))
        return (o.L_value, -1, -1, o.upper, o.lower, viol)
    size = int(rng.poisson(n)) if spec_d.get("poissonize") else n
    s = d.sample(size, rng)
    L = lis_strict(s)
    K = distinct_count(s)
    R = -1
    if "greedy" in stats and isinstance(d, DiscretePmf):
        R = greedy_subsequence(d, s, size, extras["r_n"])[0]
    viol = int(not (L <= K and R <= L))
    return (L, K, R, -1, -1, viol)


def _run_shard(args) -> list[tuple]:
    spec_d, tasks, extras = args
    return [_one(spec_d, n, r, extras[n]) for n, r in tasks]


def _shards(tasks: list, jobs: int) -> list[list]:
    k = max(1, min(jobs, len(tasks)))
    size = -(-len(tasks) // k)
    return [tasks[i:i + size] for i in range(0, len(tasks), size)]


def _collect(spec: ExperimentSpec, extras: dict, jobs: int = 1,
             shards: int | None = None) -> dict[int, np.ndarray]:
    """Run every replicate; ``shards`` overrides how the task list is cut."""
    tasks = [(n, r) for n in spec.n_grid for r in range(spec.replicates)]
    spec_d = spec.to_dict()
    parts = _shards(tasks, shards if shards is not None else jobs)
    payload = [(spec_d, part, extras) for part in parts]
    if jobs > 1 and len(parts) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_shard, payload))
    else:
        results = [_run_shard(p) for p in payload]
    flat = [rec for part in results for rec in part]
    arr = np.array(flat, dtype=np.int64).reshape(len(tasks), len(_FIELDS))
    R = spec.replicates
    return {n: arr[i * R:(i + 1) * R] for i, n in enumerate(spec.n_grid)}


# -- aggregation ---------------------------------------------------------------


def _mean_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    if len(x) < 2:
        return float(x.mean()), 0.0
    return float(x.mean()), float(x.std(ddof=1) / math.sqrt(len(x)))


def _var_se(x) -> tuple[float, float]:
    x = np.asarray(x, dtype=float)
    m = len(x)
    if m < 2:
        return 0.0, 0.0
    v = float(x.var(ddof=1))
    m4 = float(np.mean((x - x.mean()) ** 4))
    return v, math.sqrt(max(m4 - v * v * (m - 3) / (m - 1), 0.0) / m)


def _sidecar(d, n: int) -> dict:
    if not isinstance(d, DiscretePmf):
        return {"asymptotic": None}
    try:
        return scales(d, float(n))
    except LislabError:
        return {"r": solve_r(d, n), "asymptotic": asymptotic_prediction(d, n)}


def tail_bound(eps: float, w: float) -> float:
    """Lower-tail bound ``3 exp(-eps^2 (1-eps) w / 40)``."""
    return 3.0 * math.exp(-eps * eps * (1.0 - eps) * w / 40.0)


def run_experiment(spec: ExperimentSpec, jobs: int = 1, shards: int | None = None) -> ExperimentResult:
    d = from_descriptor(spec.distribution)
    res = ExperimentResult(spec)
    side = {n: _sidecar(d, n) for n in spec.n_grid}
    res.sidecars = side
    extras = {}
    for n in spec.n_grid:
        e: dict[str, Any] = {"r_n": side[n].get("r")}
        if "coupling_check" in spec.statistics:
            e["alpha"] = spec.alpha if spec.alpha else solve_f(d, float(n)).argmin_alpha
        extras[n] = e
    vals = _collect(spec, extras, jobs, shards)
    res.values = vals
    stats = spec.statistics
    for n in spec.n_grid:
        a = vals[n]
        R = spec.replicates
        L = a[:, 0]
        viol = int(a[:, 5].sum())
        sc = side[n]

        def add(stat, est, se):
            res.rows.append({"n": n, "stat": stat, "estimate": est, "stderr": se,
                             "replicates": R, "violations": viol})

        m, se = _mean_se(L)
        if "mean" in stats or "ratios" in stats:
            add("mean", m, se)
        if "variance" in stats:
            add("variance", *_var_se(L))
        if "quantiles" in stats:
            for q in (0.1, 0.5, 0.9):
                add(f"q{int(q * 100):02d}", float(np.quantile(L, q, method="lower")), None)
        if "ratios" in stats:
            for key in ("f", "w", "r", "mu", "nu", "asymptotic"):
                ref = sc.get(key)
                if ref:
                    add(f"ratio_{key}", m / ref, se / ref)
            add("ratio_sqrt", m / (2.0 * math.sqrt(n)), se / (2.0 * math.sqrt(n)))
            for k in ("ratio_f", "ratio_w", "ratio_sqrt"):
                res.bands[k] = BANDS[k]
        if "distinct" in stats and "coupling_check" not in stats:
            add("distinct", *_mean_se(a[:, 1]))
        if "greedy" in stats and a[0, 2] >= 0:
            add("greedy", *_mean_se(a[:, 2]))
            if sc.get("r"):
                add("greedy_ratio", float(a[:, 2].mean()) / sc["r"], _mean_se(a[:, 2])[1] / sc["r"])
                res.bands["greedy_ratio"] = BANDS["greedy_ratio"]
        if "tail_check" in stats and sc.get("w") is not None:
            hit = (L <= (1.0 - spec.eps) * sc["w"]).astype(float)
            fq = float(hit.mean())
            add("tail_freq", fq, math.sqrt(fq * (1.0 - fq) / R))
            add("tail_bound", tail_bound(spec.eps, sc["w"]), 0.0)
        if "coupling_check" in stats:
            add("coupling_upper", *_mean_se(a[:, 3]))
            add("coupling_lower", *_mean_se(a[:, 4]))
            add("coupling_alpha", extras[n]["alpha"], 0.0)
    return res


# -- named studies ---------------------------------------------------------


def estimate_lis(spec: ExperimentSpec, jobs: int = 1) -> ExperimentResult:
    """Mean and variance of L_n with ratios to f_n, w_n and friends."""
    stats = tuple(dict.fromkeys(spec.statistics + ("mean", "variance", "ratios")))
    return run_experiment(spec.with_(statistics=stats), jobs)


class VarianceCheck(NamedTuple):
    var_hat: float
    mean_hat: float
    passed: bool
    var_se: float


def variance_check(spec: ExperimentSpec, jobs: int = 1) -> VarianceCheck:
    """``Var(L_n) <= E L_n`` at the largest n of the grid, up to 3 standard errors."""
    res = run_experiment(spec.with_(n_grid=[spec.n_grid[-1]], statistics=["mean", "variance"]), jobs)
    L = res.values[spec.n_grid[-1]][:, 0]
    v, se = _var_se(L)
    m = float(np.mean(L))
    return VarianceCheck(v, m, v <= m + 3.0 * se, se)


class TailCheck(NamedTuple):
    frequency: float
    bound: float
    passed: bool
    note: str = ""


def tail_check(spec: ExperimentSpec, eps: float | None = None, jobs: int = 1,
               poissonize: bool | None = None) -> TailCheck:
    """Frequency of ``L_n <= (1-eps) w_n`` against ``3 exp(-eps^2 (1-eps) w_n / 40)``."""
    eps = spec.eps if eps is None else eps
    n = spec.n_grid[-1]
    d = from_descriptor(spec.distribution)
    if d.support_size is not None:
        return TailCheck(0.0, 3.0, True, "finite support: w-scale check skipped")
    w = solve_w(d, float(n)).value
    pz = spec.poissonize if poissonize is None else poissonize
    res = run_experiment(spec.with_(n_grid=[n], statistics=["mean"], eps=eps, poissonize=pz), jobs)
    L = res.values[n][:, 0]
    fq = float(np.mean(L <= (1.0 - eps) * w))
    bound = tail_bound(eps, w)
    se = math.sqrt(fq * (1.0 - fq) / len(L))
    return TailCheck(fq, bound, fq <= bound + 3.0 * se)


def mixed_limit(spec: ExperimentSpec, jobs: int = 1) -> list[dict]:
    """``mean L_n / (2 sqrt n)`` per n, with the target ``sqrt(rho1)``."""
    d = from_descriptor(spec.distribution)
    if not isinstance(d, MixedDistribution):
        raise InvalidDescriptor("mixed_limit needs a mixed distribution")
    res = run_experiment(spec.with_(statistics=["mean"]), jobs)
    out = []
    for n in spec.n_grid:
        m, se = _mean_se(res.values[n][:, 0])
        s = 2.0 * math.sqrt(n)
        out.append({"n": n, "ratio": m / s, "stderr": se / s, "target": math.sqrt(d.rho1)})
    return out


def greedy_vs_lis(spec: ExperimentSpec, jobs: int = 1) -> list[dict]:
    """Greedy output, ``r_n`` and LIS side by side for each n."""
    res = run_experiment(spec.with_(statistics=["mean", "greedy"]), jobs)
    out = []
    for n in spec.n_grid:
        a = res.values[n]
        r_n = res.sidecars[n]["r"]
        L = float(a[:, 0].mean())
        out.append({"n": n, "R_mean": float(a[:, 2].mean()), "r_n": r_n, "L_mean": L,
                    "L_over_r": L / r_n if r_n else math.inf,
                    "violations": int(np.sum((a[:, 2] > r_n) | (a[:, 2] > a[:, 0])))})
    return out


@dataclass
class CouplingReport:
    cells: list
    violations: list

    @property
    def total_violations(self) -> int:
        return len(self.violations)


def _coupling_shard(args):
    desc, t, alpha, master, key, rs = args
    d = _dist(desc)
    out = []
    for r in rs:
        rng = np.random.default_rng(np.random.SeedSequence(master, spawn_key=key + (r,)))
        o = run_coupled(d, t, alpha, rng)
        out.append((o.L_value, o.upper, o.lower, int(not o.holds()), o.sink_bound))
    return out


def coupling_study(d, t_grid, alpha_grid, replicates: int, master_seed: int = DEFAULT_SEED,
                   jobs: int = 1) -> CouplingReport:
    """Pathwise check ``lower <= L <= upper`` over a (t, alpha) grid.

    Cell ``(i, j)`` replicate ``r`` uses spawn key ``(i, j, r)``; each
    violation is reported with that key for replay.
    """
    desc = d.to_dict() if hasattr(d, "to_dict") else dict(d)
    cells, viols = [], []
    payload = []
    for i, t in enumerate(t_grid):
        for j, a in enumerate(alpha_grid):
            for part in _shards(list(range(replicates)), jobs):
                payload.append((desc, float(t), float(a), int(master_seed), (i, j), part))
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_coupling_shard, payload))
    else:
        results = [_coupling_shard(p) for p in payload]
    by_cell: dict = {}
    for p, res in zip(payload, results):
        by_cell.setdefault((p[1], p[2], p[4]), []).extend(zip(p[5], res))
    for (t, a, key), recs in by_cell.items():
        recs.sort()
        arr = np.array([x[1][:4] for x in recs], dtype=float)
        mu, su = _mean_se(arr[:, 1])
        cells.append({"t": t, "alpha": a, "replicates": len(recs), "mean_L": float(arr[:, 0].mean()),
                      "mean_upper": mu, "se_upper": su, "mean_lower": float(arr[:, 2].mean()),
                      "violations": int(arr[:, 3].sum()),
                      "max_sink_bound": max(x[1][4] for x in recs)})
        viols.extend({"t": t, "alpha": a, "spawn_key": key + (r,), "master_seed": master_seed}
                     for r, x in recs if x[3])
    return CouplingReport(cells, viols)
