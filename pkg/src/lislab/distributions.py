"""Discrete and mixed distributions with exact sampling.

Every discrete law is indexed two ways.  *Atoms* are the values a draw
takes; *ranks* number the atoms 1, 2, ... in ascending atom order.  For
Geometric, FiniteUniform and the power-law families the two coincide;
Poisson has atom 0 at rank 1.  ``pmf`` and ``continuous_interpolation``
work on atoms, ``tail`` and all series consumers work on ranks.

Continuous interpolations (used by the mu/nu scale solvers):

* Geometric: ``p (1-p)^(x-1)``
* Poisson: ``exp(-lam) lam^x / Gamma(x+1)``
* PowerLog / BorderlinePowerLog: ``c log(x+s)^gamma (x+s)^(-beta)`` with
  ``s = 0`` when ``gamma == 0`` and ``s = e - 1`` otherwise, so the shape is
  finite at ``x = 1`` and asymptotically ``c (log x)^gamma x^(-beta)``.
  The pmf is this function at integers, so interpolation is exact.
"""
from __future__ import annotations

import math
import threading
from typing import Any, Sequence

import numpy as np
from scipy import integrate, special

from .errors import InvalidDescriptor, NoInterpolation, OutOfSupport

__all__ = [
    "DiscretePmf",
    "Geometric",
    "Poisson",
    "FiniteUniform",
    "Explicit",
    "PowerLog",
    "BorderlinePowerLog",
    "MixedDistribution",
    "pmf",
    "tail",
    "continuous_interpolation",
    "sorted_prefix",
    "sample",
    "from_descriptor",
    "parse_inline",
    "SAFE_INT",
]

# Largest float64 below which every integer is exactly representable.
SAFE_INT = 2.0**53
_LOG_SAFE_INT = math.log(SAFE_INT)


def _as_rng(rng_or_seed) -> np.random.Generator:
    if isinstance(rng_or_seed, np.random.Generator):
        return rng_or_seed
    return np.random.default_rng(rng_or_seed)


class DiscretePmf:
    """Base class.  Subclasses fill in the per-family hooks."""

    family: str = ""
    support_size: int | None = None
    interpolable: bool = True

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._mass_cache = np.empty(0)

    # -- hooks ---------------------------------------------------------
    def _compute_masses(self, k: int) -> np.ndarray:
        raise NotImplementedError

    def atoms_of_ranks(self, ranks):
        return np.asarray(ranks)

    def rank_of_atom(self, atom) -> int:
        if isinstance(atom, (bool, np.bool_)) or float(atom) != int(atom):
            raise OutOfSupport(f"{atom!r} is not an atom of {self.family}")
        i = int(atom)
        if i < 1 or (self.support_size is not None and i > self.support_size):
            raise OutOfSupport(f"{atom!r} is not an atom of {self.family}")
        return i

    @property
    def monotone_from(self) -> int:
        """Rank from which masses are non-increasing."""
        return 1

    def _tail_rank(self, m: int) -> float:
        raise NotImplementedError

    def _sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        raise NotImplementedError

    def params(self) -> dict[str, Any]:
        raise NotImplementedError

    # -- shared API ------------------------------------------------------
    def masses(self, k: int) -> np.ndarray:
        """Masses of ranks ``1..k`` (read-only view)."""
        if self.support_size is not None:
            k = min(k, self.support_size)
        if len(self._mass_cache) < k:
            with self._lock:
                if len(self._mass_cache) < k:
                    grow = max(k, 2 * len(self._mass_cache), 64)
                    if self.support_size is not None:
                        grow = min(grow, self.support_size)
                    arr = np.ascontiguousarray(self._compute_masses(grow), dtype=float)
                    arr.setflags(write=False)
                    self._mass_cache = arr
        return self._mass_cache[:k]

    def pmf(self, atom) -> float:
        r = self.rank_of_atom(atom)
        return float(self.masses(r)[r - 1])

    def tail(self, x: float) -> float:
        """Mass strictly beyond rank ``floor(x)``; ``tail(0) == 1``."""
        if x < 0:
            raise ValueError("tail is defined for x >= 0")
        m = int(math.floor(x))
        if m == 0:
            return 1.0
        if self.support_size is not None and m >= self.support_size:
            return 0.0
        return float(self._tail_rank(m))

    def sorted_prefix(self, k: int) -> list[tuple[float, Any]]:
        masses, ranks = self.sorted_masses(k)
        atoms = self.atoms_of_ranks(ranks)
        return [(float(m), _py(a)) for m, a in zip(masses, atoms)]

    def sorted_masses(self, k: int) -> tuple[np.ndarray, np.ndarray]:
        """The ``k`` largest masses and their ranks, ties by ascending rank."""
        if k < 1:
            raise ValueError("k must be >= 1")
        if self.support_size is not None and k > self.support_size:
            raise OutOfSupport(f"k={k} exceeds support size {self.support_size}")
        K = max(2 * k, self.monotone_from + 1, 64)
        while True:
            if self.support_size is not None:
                K = min(K, self.support_size)
            p = self.masses(K)
            order = np.lexsort((np.arange(len(p)), -p))[:k]
            top = p[order]
            done = (self.support_size is not None and K >= self.support_size) or (
                K >= self.monotone_from and top[-1] >= self._mass_at_rank(K + 1)
            )
            if done:
                return top.copy(), order + 1
            K *= 2

    def _mass_at_rank(self, r: int) -> float:
        return float(self.masses(r)[r - 1])

    # continuous side (interpolable families only)
    def log_interp(self, x):
        raise NoInterpolation(f"{self.family} has no continuous interpolation")

    def interp(self, x):
        return np.exp(self.log_interp(x))

    def log_integral_tail(self, x):
        raise NoInterpolation(f"{self.family} has no continuous interpolation")

    def integral_tail(self, x):
        return np.exp(self.log_integral_tail(x))

    def sample(self, n: int, rng=None) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be >= 0")
        rng = _as_rng(rng)
        if n == 0:
            return np.empty(0, dtype=self.sample_dtype)
        return self._sample(n, rng)

    sample_dtype = np.int64

    def rows_of(self, values) -> np.ndarray:
        """Ranks of drawn values (row indices of the planar picture)."""
        return np.asarray(values).astype(np.int64)

    def to_dict(self) -> dict[str, Any]:
        return {"family": self.family, **self.params()}

    def __repr__(self) -> str:
        args = ", ".join(f"{k}={v!r}" for k, v in self.params().items())
        return f"{type(self).__name__}({args})"

    def __eq__(self, other) -> bool:
        return type(self) is type(other) and self.params() == other.params()

    def __hash__(self) -> int:
        return hash((type(self).__name__, repr(self.params())))


def _py(a):
    if isinstance(a, np.generic):
        return a.item()
    return a


class Geometric(DiscretePmf):
    family = "geometric"

    def __init__(self, p: float) -> None:
        super().__init__()
        if not 0.0 < p < 1.0:
            raise InvalidDescriptor("geometric parameter p must lie in (0, 1)")
        self.p = float(p)
        self._log1mp = math.log1p(-self.p)

    def params(self):
        return {"p": self.p}

    def _compute_masses(self, k):
        r = np.arange(k, dtype=float)
        return self.p * np.exp(r * self._log1mp) if self.p != 0.5 else 0.5 ** (r + 1)

    def _tail_rank(self, m):
        return math.exp(m * self._log1mp) if self.p != 0.5 else 0.5**m

    def log_interp(self, x):
        return math.log(self.p) + (np.asarray(x, dtype=float) - 1.0) * self._log1mp

    def log_integral_tail(self, x):
        return self.log_interp(x) - math.log(-self._log1mp)

    def _sample(self, n, rng):
        q = 1.0 - rng.random(n)
        x = np.ceil(np.log(q) / self._log1mp)
        return np.maximum(x, 1.0).astype(np.int64)


class Poisson(DiscretePmf):
    """Poisson law on {0, 1, 2, ...}; atom ``k`` sits at rank ``k + 1``."""

    family = "poisson"

    def __init__(self, lam: float) -> None:
        super().__init__()
        if not lam > 0:
            raise InvalidDescriptor("poisson parameter lambda must be > 0")
        self.lam = float(lam)

    def params(self):
        return {"lambda": self.lam}

    def atoms_of_ranks(self, ranks):
        return np.asarray(ranks) - 1

    def rank_of_atom(self, atom):
        if isinstance(atom, (bool, np.bool_)) or float(atom) != int(atom) or int(atom) < 0:
            raise OutOfSupport(f"{atom!r} is not an atom of poisson")
        return int(atom) + 1

    def rows_of(self, values):
        return np.asarray(values).astype(np.int64) + 1

    @property
    def monotone_from(self):
        return max(1, math.ceil(self.lam))

    def _compute_masses(self, k):
        kk = np.arange(k, dtype=float)
        if self.lam <= 600.0:
            # the product recurrence keeps exact ties such as p_3 == p_4 at lam = 4
            ratios = np.empty(k)
            ratios[0] = math.exp(-self.lam)
            ratios[1:] = self.lam / kk[1:]
            out = np.cumprod(ratios)
        else:
            out = np.exp(-self.lam + kk * math.log(self.lam) - special.gammaln(kk + 1))
        return out

    def pmf(self, atom):
        r = self.rank_of_atom(atom)
        if r > 1 << 16:
            k = r - 1
            return math.exp(-self.lam + k * math.log(self.lam) - math.lgamma(k + 1))
        return float(self.masses(r)[r - 1])

    def _tail_rank(self, m):
        # P(X >= m) for the atom count m
        return float(special.gammainc(m, self.lam))

    def log_interp(self, x):
        x = np.asarray(x, dtype=float)
        return -self.lam + x * math.log(self.lam) - special.gammaln(x + 1.0)

    def log_integral_tail(self, x):
        def one(x0):
            base = float(self.log_interp(x0))
            f = lambda v: math.exp(float(self.log_interp(x0 + v)) - base)
            val, _ = integrate.quad(f, 0.0, np.inf, epsabs=0.0, epsrel=1e-12, limit=200)
            return base + math.log(val)

        x = np.asarray(x, dtype=float)
        if x.ndim == 0:
            return one(float(x))
        return np.array([one(float(v)) for v in x.ravel()]).reshape(x.shape)

    def _sample(self, n, rng):
        return rng.poisson(self.lam, n).astype(np.int64)


class FiniteUniform(DiscretePmf):
    family = "finite_uniform"
    interpolable = False

    def __init__(self, m: int) -> None:
        super().__init__()
        if int(m) != m or m < 1:
            raise InvalidDescriptor("finite_uniform size m must be a positive integer")
        self.m = int(m)
        self.support_size = self.m

    def params(self):
        return {"m": self.m}

    def _compute_masses(self, k):
        return np.full(k, 1.0 / self.m)

    def _tail_rank(self, m):
        return (self.m - m) / self.m

    def _sample(self, n, rng):
        return rng.integers(1, self.m + 1, n, dtype=np.int64)


class Explicit(DiscretePmf):
    """Finite list of ``(atom, mass)`` pairs; atoms may be any reals."""

    family = "explicit"
    interpolable = False

    def __init__(self, atoms: Sequence[tuple[float, float]] | dict) -> None:
        super().__init__()
        pairs = list(atoms.items()) if isinstance(atoms, dict) else [tuple(a) for a in atoms]
        if not pairs:
            raise InvalidDescriptor("explicit distribution needs at least one atom")
        pairs.sort(key=lambda am: am[0])
        vals = [a for a, _ in pairs]
        ms = [float(m) for _, m in pairs]
        if len(set(vals)) != len(vals):
            raise InvalidDescriptor("explicit atoms must be distinct")
        if any(not math.isfinite(float(a)) for a in vals):
            raise InvalidDescriptor("explicit atoms must be finite")
        if any(not (m > 0.0) for m in ms):
            raise InvalidDescriptor("explicit masses must be > 0 (zero-mass atoms are rejected)")
        total = math.fsum(ms)
        if abs(total - 1.0) > 1e-6:
            raise InvalidDescriptor(f"explicit masses sum to {total}, not 1")
        self._atoms = vals
        self._index = {a: i for i, a in enumerate(vals)}
        self._p = np.array(ms) / total
        self.support_size = len(vals)
        self._integer_atoms = all(float(a) == int(a) for a in vals)
        self.sample_dtype = np.int64 if self._integer_atoms else np.float64

    def params(self):
        return {"atoms": [[_py(a), float(m)] for a, m in zip(self._atoms, self._p)]}

    def atoms_of_ranks(self, ranks):
        return np.array([self._atoms[int(r) - 1] for r in np.asarray(ranks).ravel()])

    def rank_of_atom(self, atom):
        try:
            return self._index[atom] + 1
        except (KeyError, TypeError):
            raise OutOfSupport(f"{atom!r} is not an atom of this explicit distribution") from None

    def rows_of(self, values):
        atoms = np.asarray(self._atoms, dtype=float)
        return np.searchsorted(atoms, np.asarray(values, dtype=float)).astype(np.int64) + 1

    def _compute_masses(self, k):
        return self._p[:k].copy()

    def _tail_rank(self, m):
        return float(math.fsum(self._p[m:]))

    def _sample(self, n, rng):
        cdf = np.cumsum(self._p)
        idx = np.searchsorted(cdf, rng.random(n), side="right")
        idx = np.minimum(idx, len(self._atoms) - 1)
        return np.asarray(self._atoms, dtype=self.sample_dtype)[idx]


def _upper_gamma(a: float, z):
    """Non-regularised upper incomplete gamma for any real ``a`` and ``z > 0``."""
    z = np.asarray(z, dtype=float)
    if a > 0:
        return special.gamma(a) * special.gammaincc(a, z)
    if a == 0:
        return special.exp1(z)
    return (_upper_gamma(a + 1.0, z) - np.exp(a * np.log(z) - z)) / a


class PowerLog(DiscretePmf):
    """``p_i = c log(i+s)^gamma (i+s)^(-beta)`` on ``i >= 1``."""

    family = "power_log"
    sample_dtype = np.float64
    _HEAD = 2048
    _TABLE = 1 << 16

    def __init__(self, beta: float, gamma: float = 0.0) -> None:
        super().__init__()
        beta, gamma = float(beta), float(gamma)
        if not (beta > 1.0 or (beta == 1.0 and gamma < -1.0)):
            raise InvalidDescriptor("power_log needs beta > 1 (or beta == 1 with gamma < -1)")
        self.beta = beta
        self.gamma = gamma
        self.shift = 0.0 if gamma == 0.0 else math.e - 1.0
        head = self._h(np.arange(1, self._HEAD + 1, dtype=float))
        if gamma == 0.0:
            total = float(special.zeta(beta, 1.0))
            rem = float(special.zeta(beta, self._HEAD + 1.0))
        else:
            rem = float(self._em_tail(float(self._HEAD)))
            total = math.fsum(head) + rem
        self.norm = total
        self.c = 1.0 / total
        # unnormalised tails T(m) = sum_{i>m} h(i) for m = 0..HEAD
        rev = np.cumsum(head[::-1])[::-1]
        self._head_tail = np.append(rev, 0.0) + rem

    def params(self):
        return {"beta": self.beta, "gamma": self.gamma}

    @property
    def normalizing_constant(self) -> float:
        return self.c

    # unnormalised shape and its pieces
    def _logy(self, x):
        x = np.asarray(x, dtype=float)
        if self.shift == 0.0:
            return np.log(x)
        return np.log(x + self.shift)

    def _log_h_from_logy(self, L):
        if self.gamma == 0.0:
            return -self.beta * L
        return self.gamma * np.log(L) - self.beta * L

    def _h(self, x):
        return np.exp(self._log_h_from_logy(self._logy(x)))

    def _h_prime(self, x):
        x = np.asarray(x, dtype=float)
        y = x + self.shift
        L = np.log(y)
        g = 0.0 if self.gamma == 0.0 else self.gamma / (y * L)
        return np.exp(self._log_h_from_logy(L)) * (g - self.beta / y)

    def _int_h_from_logy(self, L):
        """Integral of the shape from x to infinity, given log(x + s)."""
        b, g = self.beta, self.gamma
        if b == 1.0:
            return np.exp((g + 1.0) * np.log(L)) / (-g - 1.0)
        if g == 0.0:
            return np.exp((1.0 - b) * L) / (b - 1.0)
        return (b - 1.0) ** (-g - 1.0) * _upper_gamma(g + 1.0, (b - 1.0) * L)

    def _em_tail(self, x):
        """Euler-Maclaurin estimate of sum_{i>x} h(i) for large integer x."""
        return self._int_h_from_logy(self._logy(x)) - 0.5 * self._h(x) - self._h_prime(x) / 12.0

    def _em_tail_u(self, u):
        """Same as ``_em_tail`` at ``x = exp(u)``, overflow-free for huge u."""
        u = np.asarray(u, dtype=float)
        L = u + np.log1p(self.shift * np.exp(-u)) if self.shift else u.copy()
        logh = self._log_h_from_logy(L)
        y_inv = np.exp(-L)
        g = 0.0 if self.gamma == 0.0 else self.gamma / L
        hp_over_h = (g - self.beta) * y_inv
        h = np.exp(logh)
        return self._int_h_from_logy(L) - h * (0.5 + hp_over_h / 12.0)

    @property
    def monotone_from(self):
        if self.gamma <= 0.0:
            return 1
        return max(1, math.ceil(math.exp(self.gamma / self.beta) - self.shift) + 1)

    def _compute_masses(self, k):
        return self._h(np.arange(1, k + 1, dtype=float)) * self.c

    def pmf(self, atom):
        r = self.rank_of_atom(atom)
        return float(self._h(float(r)) * self.c)

    def _mass_at_rank(self, r):
        return float(self._h(float(r)) * self.c)

    def _tail_rank(self, m):
        if m <= self._HEAD:
            return float(self._head_tail[m] * self.c)
        if self.gamma == 0.0:
            return float(special.zeta(self.beta, m + 1.0) * self.c)
        return float(self._em_tail(float(m)) * self.c)

    def log_interp(self, x):
        return self._log_h_from_logy(self._logy(x)) + math.log(self.c)

    def log_integral_tail(self, x):
        return np.log(self._int_h_from_logy(self._logy(x))) + math.log(self.c)

    def _sample(self, n, rng):
        table = self._sample_table()
        q = 1.0 - rng.random(n)
        # first rank r >= 1 with T(r) <= q
        idx = np.searchsorted(-table[1:], -q, side="left") + 1
        out = idx.astype(np.float64)
        far = idx >= len(table)
        if far.any():
            out[far] = self._invert_far_tail(q[far] * self.norm)
        return out

    def _sample_table(self) -> np.ndarray:
        tab = getattr(self, "_table_cache", None)
        if tab is None:
            K = self._TABLE
            h = self._h(np.arange(1, K + 1, dtype=float))
            if self.gamma == 0.0:
                rem = float(special.zeta(self.beta, K + 1.0))
            else:
                rem = float(self._em_tail(float(K)))
            rev = np.cumsum(h[::-1])[::-1]
            tab = (np.append(rev, 0.0) + rem) * self.c
            tab[0] = 1.0
            self._table_cache = tab
        return tab

    def _invert_far_tail(self, target: np.ndarray) -> np.ndarray:
        """Smallest integer x with sum_{i>x} h(i) <= target, beyond the table."""
        lo = np.full(target.shape, math.log(self._TABLE))
        hi = lo + 1.0
        while True:
            bad = self._em_tail_u(hi) > target
            if not bad.any():
                break
            hi[bad] = lo[bad] + 2.0 * (hi[bad] - lo[bad])
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            above = self._em_tail_u(mid) > target
            lo = np.where(above, mid, lo)
            hi = np.where(above, hi, mid)
            if np.all(hi - lo <= 1e-15 * np.maximum(1.0, hi)):
                break
        out = np.empty_like(hi)
        small = hi < _LOG_SAFE_INT
        xs = np.ceil(np.exp(hi[small]) - 1e-9)
        # ceil of the continuous root is the integer answer; guard one step either side
        t_lo = self._em_tail(xs - 1.0)
        xs = np.where(t_lo <= target[small], xs - 1.0, xs)
        out[small] = xs
        # atoms past 2**53 are not representable; encode them by a monotone map of log(x)
        out[~small] = SAFE_INT * (1.0 + (hi[~small] - _LOG_SAFE_INT))
        return out


class BorderlinePowerLog(PowerLog):
    """``p_i ~ c (log i)^gamma / i`` with ``gamma < -1``."""

    family = "borderline_power_log"

    def __init__(self, gamma: float) -> None:
        if not gamma < -1.0:
            raise InvalidDescriptor("borderline_power_log needs gamma < -1")
        super().__init__(1.0, gamma)

    def params(self):
        return {"gamma": self.gamma}

    @property
    def tail_constant(self) -> float:
        """``lim F(x) (log x)^(-gamma-1)`` for the integral tail F."""
        return self.c / (-self.gamma - 1.0)


class MixedDistribution:
    """Atomless uniform part with weight ``rho1`` plus a scaled discrete part."""

    family = "mixed"
    sample_dtype = np.float64

    def __init__(self, rho1: float, discrete: DiscretePmf | None = None,
                 low: float = 0.25, high: float = 0.75) -> None:
        if not 0.0 <= rho1 <= 1.0:
            raise InvalidDescriptor("rho1 must lie in [0, 1]")
        if not low < high:
            raise InvalidDescriptor("atomless interval needs low < high")
        if discrete is None:
            if rho1 < 1.0:
                raise InvalidDescriptor("mixed distribution with rho1 < 1 needs a discrete part")
            discrete = Geometric(0.5)
        self.rho1 = float(rho1)
        self.rho2 = 1.0 - self.rho1
        self.discrete = discrete
        self.low, self.high = float(low), float(high)
        if isinstance(discrete, Explicit):
            hit = [a for a in discrete._atoms if self.low <= a <= self.high]
        else:
            hit = math.ceil(self.low) <= math.floor(self.high)
        if hit:
            raise InvalidDescriptor("atomless interval must not contain atoms of the discrete part")

    def sample(self, n: int, rng=None) -> np.ndarray:
        if n < 0:
            raise ValueError("n must be >= 0")
        rng = _as_rng(rng)
        label = rng.random(n) < self.rho1
        k = int(label.sum())
        out = np.empty(n, dtype=np.float64)
        out[~label] = self.discrete.sample(n - k, rng)
        out[label] = rng.uniform(self.low, self.high, k)
        return out

    def to_dict(self):
        d = {"family": "mixed", "rho1": self.rho1, "discrete": self.discrete.to_dict()}
        if (self.low, self.high) != (0.25, 0.75):
            d.update(low=self.low, high=self.high)
        return d

    def __repr__(self):
        return f"MixedDistribution(rho1={self.rho1!r}, discrete={self.discrete!r})"


# -- functional API ------------------------------------------------------


def pmf(d: DiscretePmf, i) -> float:
    return d.pmf(i)


def tail(d: DiscretePmf, x: float) -> float:
    return d.tail(x)


def continuous_interpolation(d: DiscretePmf, x: float) -> float:
    if not d.interpolable:
        raise NoInterpolation(f"{d.family} has no continuous interpolation")
    return float(d.interp(x))


def sorted_prefix(d: DiscretePmf, k: int) -> list[tuple[float, Any]]:
    return d.sorted_prefix(k)


def sample(d, n: int, rng_seed=None) -> np.ndarray:
    return d.sample(n, rng_seed)


# -- descriptors -------------------------------------------------------------

_FAMILIES = {
    "geometric": (Geometric, ("p",)),
    "poisson": (Poisson, ("lambda",)),
    "finite_uniform": (FiniteUniform, ("m",)),
    "uniform": (FiniteUniform, ("m",)),
    "power_log": (PowerLog, ("beta", "gamma")),
    "borderline_power_log": (BorderlinePowerLog, ("gamma",)),
    "borderline": (BorderlinePowerLog, ("gamma",)),
}


def from_descriptor(desc: dict):
    """Build a distribution from its JSON descriptor."""
    if not isinstance(desc, dict) or "family" not in desc:
        raise InvalidDescriptor(f"descriptor must be an object with a 'family' key: {desc!r}")
    fam = str(desc["family"]).lower()
    try:
        if fam == "mixed":
            inner = desc.get("discrete")
            return MixedDistribution(
                float(desc["rho1"]),
                from_descriptor(inner) if inner is not None else None,
                float(desc.get("low", 0.25)),
                float(desc.get("high", 0.75)),
            )
        if fam == "explicit":
            return Explicit([(a, m) for a, m in desc["atoms"]])
        if fam not in _FAMILIES:
            raise InvalidDescriptor(f"unknown distribution family {desc['family']!r}")
        cls, names = _FAMILIES[fam]
        kwargs = {}
        for name in names:
            key = name
            if name == "lambda" and "lambda" not in desc and "lam" in desc:
                key = "lam"
            if key not in desc:
                if cls is PowerLog and name == "gamma":
                    continue
                raise InvalidDescriptor(f"{fam} descriptor is missing {name!r}")
            kwargs["lam" if name == "lambda" else name] = desc[key]
        if cls is FiniteUniform:
            return FiniteUniform(int(kwargs["m"]))
        return cls(**{k: float(v) for k, v in kwargs.items()})
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, InvalidDescriptor):
            raise
        raise InvalidDescriptor(f"bad descriptor {desc!r}: {exc}") from None


def parse_inline(text: str):
    """Parse ``family:param[,param]``, e.g. ``geometric:0.5`` or ``power_log:2.2,0``.

    Explicit: ``explicit:1=0.1,2=0.6,3=0.3``; mixed: ``mixed:0.25/geometric:0.5``.
    """
    text = text.strip()
    fam, _, rest = text.partition(":")
    fam = fam.lower()
    try:
        if fam == "mixed":
            rho, _, inner = rest.partition("/")
            return MixedDistribution(float(rho), parse_inline(inner) if inner else None)
        if fam == "explicit":
            pairs = []
            for item in rest.split(","):
                a, _, m = item.partition("=")
                a = float(a)
                pairs.append((int(a) if a == int(a) else a, float(m)))
            return Explicit(pairs)
        if fam not in _FAMILIES:
            raise InvalidDescriptor(f"unknown distribution family {fam!r}")
        cls, names = _FAMILIES[fam]
        vals = [v for v in rest.split(",") if v.strip()] if rest else []
        if not vals or len(vals) > len(names):
            raise InvalidDescriptor(f"{fam} takes parameters {','.join(names)}")
        desc = {"family": fam}
        for name, v in zip(names, vals):
            desc[name] = float(v)
        return from_descriptor(desc)
    except ValueError as exc:
        if isinstance(exc, InvalidDescriptor):
            raise
        raise InvalidDescriptor(f"cannot parse distribution {text!r}: {exc}") from None
