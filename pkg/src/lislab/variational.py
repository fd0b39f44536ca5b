"""Deterministic growth scales f_t, w_t, r_n, mu_t, nu_t.

Series over an infinite support are handled two ways.  Light-tailed laws
(geometric, Poisson) are truncated at the first index ``M`` whose tail
bound ``tail(M) / a`` is below ``sum_tolerance``; the dropped remainder is
only reported.  Power-law families decay too slowly for that (the cut-off
would be beyond 1e12 terms), so after a head of explicit terms the
remainder is evaluated with an Euler-Maclaurin correction on the
continuous interpolation and the estimated error is reported instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .distributions import BorderlinePowerLog, DiscretePmf, FiniteUniform, Geometric, Poisson, PowerLog
from .errors import DomainError, NoBracket, NoInterpolation

__all__ = [
    "SolverConfig",
    "VariationalResult",
    "g",
    "series",
    "solve_f",
    "solve_w",
    "solve_r",
    "solve_mu",
    "solve_nu",
    "second_moment_sum",
    "asymptotic_prediction",
    "scales",
]

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class SolverConfig:
    sum_tolerance: float = 1e-9
    opt_tolerance: float = 1e-8
    max_iterations: int = 200

    def __post_init__(self):
        if not (self.sum_tolerance > 0 and self.opt_tolerance > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iterations < 10:
            raise ValueError("max_iterations must be >= 10")


DEFAULT = SolverConfig()


@dataclass
class VariationalResult:
    value: float
    argmin_alpha: float | None
    truncation_index: int
    truncation_bound: float
    iterations_used: int
    boundary: bool = False
    extra: dict = field(default_factory=dict)


@dataclass
class _Series:
    value: float
    index: int
    bound: float


def _power_level(d: PowerLog, log_a: float) -> float:
    """Abscissa where the interpolated pmf falls to ``exp(log_a)``."""
    lo = float(max(1, d.monotone_from))
    if float(d.log_interp(lo)) <= log_a:
        return lo
    hi = 2.0 * lo
    while float(d.log_interp(hi)) > log_a:
        lo, hi = hi, 2.0 * hi
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if float(d.log_interp(mid)) > log_a:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-12 * hi:
            break
    return hi


def _power_series(d: PowerLog, a: float, k: int, scale: float) -> _Series:
    x_a = _power_level(d, math.log(a))
    m = int(min(max(math.ceil(x_a), 2048), 1 << 18))
    p = d.masses(m)
    head = float(np.sum(p / (p + a) ** k))
    ak = a**k

    def phi(pv):
        return pv / (pv + a) ** k

    log_a, log_c = math.log(a), math.log(d.c)
    shift = d.shift

    def log_p(u):
        L = u + math.log1p(shift * math.exp(-u)) if shift else u
        return float(d._log_h_from_logy(L)) + log_c

    def direct(u):
        lp = log_p(u)
        # phi(p) e^u with p = e^lp, computed in logs
        lpa = max(lp, log_a) + math.log1p(math.exp(-abs(lp - log_a)))
        return math.exp(lp - k * lpa + u)

    def excess(u):
        # (p / a**k - phi(p)) e^u without cancellation
        lp = log_p(u)
        lpa = max(lp, log_a) + math.log1p(math.exp(-abs(lp - log_a)))
        if k == 1:
            return math.exp(2.0 * lp - log_a - lpa + u)
        lp2a = max(lp, log_a + math.log(2.0)) + math.log1p(math.exp(-abs(lp - log_a - math.log(2.0))))
        return math.exp(2.0 * lp + lp2a - 2.0 * log_a - 2.0 * lpa + u)

    err = 0.0
    total = 0.0
    u_m = math.log(m)
    u_split = u_m
    if x_a > m:
        u_split = math.log(x_a)
        val, e = integrate.quad(direct, u_m, u_split,
                                epsabs=0.0, epsrel=1e-13, limit=400)
        total += val
        err += e
    split_tail = float(d.integral_tail(math.exp(u_split))) / ak
    val, e = integrate.quad(excess, u_split, np.inf,
                            epsabs=0.0, epsrel=1e-13, limit=400)
    total += split_tail - val
    err += e + 1e-15 * split_tail
    pm = float(p[-1])
    dp = float(d._h_prime(float(m))) * d.c
    dphi = a / (pm + a) ** 2 if k == 1 else (a - pm) / (pm + a) ** 3
    remainder = total - 0.5 * phi(pm) - dphi * dp / 12.0
    em_err = phi(pm) * (d.beta + 3.0) ** 3 / (720.0 * float(m) ** 3)
    return _Series(scale * (head + remainder), m, scale * (err + em_err))


def series(d: DiscretePmf, a: float, power: int = 1, cfg: SolverConfig = DEFAULT,
           scale: float = 1.0) -> _Series:
    """``scale * sum_i p_i / (p_i + a)**power`` with its truncation data."""
    if not a > 0:
        raise DomainError("a must be > 0")
    tol = cfg.sum_tolerance
    if d.support_size is not None:
        p = d.masses(d.support_size)
        return _Series(scale * float(np.sum(p / (p + a) ** power)), len(p), 0.0)
    if isinstance(d, PowerLog):
        return _power_series(d, a, power, scale)
    ak = a**power
    M = 64
    while scale * d.tail(M) / ak > tol:
        M *= 2
        if M > 1 << 26:
            raise NoBracket("series truncation index exceeds 2**26 terms")
    p = d.masses(M)
    t_end = d.tail(M)
    tails = np.cumsum(p[::-1])[::-1] + t_end
    tails = np.append(tails, t_end)
    ok = np.flatnonzero(scale * tails / ak <= tol)
    m = int(ok[0])
    head = p[:m]
    return _Series(scale * float(np.sum(head / (head + a) ** power)), m,
                   scale * float(tails[m]) / ak)


def g(d: DiscretePmf, t: float, a: float, cfg: SolverConfig = DEFAULT) -> float:
    """``a t + sum_i p_i / (p_i + a)``."""
    if not (t > 0):
        raise DomainError("t must be > 0")
    if not (a > 0):
        raise DomainError("a must be > 0")
    return a * t + series(d, a, 1, cfg).value


def solve_f(d: DiscretePmf, t: float, cfg: SolverConfig = DEFAULT) -> VariationalResult:
    """``f_t = inf_a g_t(a)`` by golden-section search in ``log a``."""
    if not (t > 0):
        raise DomainError("t must be > 0")

    def gval(u):
        a = math.exp(u)
        return a * t + series(d, a, 1, cfg).value

    a_lo = cfg.opt_tolerance / t
    u_lo = math.log(a_lo)
    u_hi = max(math.log(1.0 / math.sqrt(t)), u_lo + 1.0)
    it = 0
    g_hi = gval(u_hi)
    while True:
        g_next = gval(u_hi + math.log(2.0))
        it += 1
        if g_next > g_hi:
            u_hi += math.log(2.0)
            break
        u_hi += math.log(2.0)
        g_hi = g_next
        if it >= cfg.max_iterations:
            raise NoBracket("could not bracket the minimiser of g_t")

    lo, hi = u_lo, u_hi
    c = hi - _INVPHI * (hi - lo)
    e = lo + _INVPHI * (hi - lo)
    gc, ge = gval(c), gval(e)
    while hi - lo > cfg.opt_tolerance:
        it += 1
        if it > cfg.max_iterations:
            raise NoBracket("golden-section search did not converge")
        if gc <= ge:
            hi, e, ge = e, c, gc
            c = hi - _INVPHI * (hi - lo)
            gc = gval(c)
        else:
            lo, c, gc = c, e, ge
            e = lo + _INVPHI * (hi - lo)
            ge = gval(e)
    u_star = c if gc <= ge else e
    boundary = u_star - u_lo <= 4.0 * cfg.opt_tolerance
    if boundary:
        u_star = u_lo
    a_star = math.exp(u_star)
    s = series(d, a_star, 1, cfg)
    value = a_star * t + s.value
    if boundary and d.support_size is not None:
        # the a -> 0 limit of g_t is the number of atoms
        value = min(value, float(d.support_size))
    return VariationalResult(value, a_star, s.index, s.bound, it, boundary)


def solve_w(d: DiscretePmf, t: float, cfg: SolverConfig = DEFAULT) -> VariationalResult:
    """Fixed point ``w = sum_i t p_i / (t p_i + w)`` by bisection."""
    if not (t > 0):
        raise DomainError("t must be > 0")

    def resid(w):
        s = series(d, w / t, 1, cfg)
        return w - s.value, s

    lo, hi = cfg.sum_tolerance, 2.0 * math.sqrt(t) + 1.0
    it = 0
    best = None
    while it < cfg.max_iterations:
        it += 1
        mid = 0.5 * (lo + hi)
        r, s = resid(mid)
        if best is None or abs(r) < abs(best[1]):
            best = (mid, r, s)
        if r < 0:
            lo = mid
        else:
            hi = mid
        narrow = hi - lo <= cfg.opt_tolerance * (1.0 + mid)
        if (narrow and abs(best[1]) <= cfg.sum_tolerance) or hi - lo <= 4e-16 * hi:
            break
    w, r, s = best
    return VariationalResult(w, None, s.index, s.bound, it, extra={"residual": r})


def second_moment_sum(d: DiscretePmf, t: float, w: float, cfg: SolverConfig = DEFAULT) -> float:
    """``sum_i t p_i / (t p_i + w)**2``."""
    return series(d, w / t, 2, cfg, scale=1.0 / t).value


def solve_r(d: DiscretePmf, n: float) -> int:
    """Largest ``r`` with ``sum_{i<=r} 1/p_(i) <= n`` over the decreasing rearrangement."""
    if n <= 0:
        return 0
    k = 64
    while True:
        if d.support_size is not None:
            k = min(k, d.support_size)
        masses, _ = d.sorted_masses(k)
        csum = np.cumsum(1.0 / masses.astype(np.longdouble))
        r = int(np.searchsorted(csum, np.longdouble(n), side="right"))
        if r < k or (d.support_size is not None and k >= d.support_size):
            return r
        k *= 2


def _require_interp(d):
    if not getattr(d, "interpolable", False):
        raise NoInterpolation(f"{getattr(d, 'family', d)!r} has no continuous interpolation")


def _increasing_root(psi, cfg: SolverConfig, start: float = 1.0) -> float:
    """Root of ``psi`` on the branch where it increases, by bisection."""
    lo, hi = start, 2.0 * start
    it = 0
    while psi(hi) <= 0:
        lo, hi = hi, 2.0 * hi
        it += 1
        if it > cfg.max_iterations:
            raise NoBracket("no sign change while expanding the bracket")
    grid = np.geomspace(lo, hi, 65)
    vals = np.array([psi(x) for x in grid])
    j = int(np.argmin(vals))
    if vals[j] > 0:
        raise DomainError("t is below the threshold where the scale equation has a root")
    lo = float(grid[j])
    if np.any(np.diff(vals[j:]) < 0):
        raise DomainError("scale function is not monotone across the final bracket")
    while hi - lo > cfg.opt_tolerance * hi:
        mid = 0.5 * (lo + hi)
        if psi(mid) > 0:
            hi = mid
        else:
            lo = mid
        it += 1
        if it > 4 * cfg.max_iterations:
            break
    return 0.5 * (lo + hi)


def solve_mu(d: DiscretePmf, t: float, cfg: SolverConfig = DEFAULT) -> float:
    """Root of ``x / p(x) = t`` on the increasing branch."""
    _require_interp(d)
    log_t = math.log(t)
    return _increasing_root(lambda x: math.log(x) - float(d.log_interp(x)) - log_t, cfg)


def solve_nu(d: DiscretePmf, t: float, cfg: SolverConfig = DEFAULT) -> float:
    """Root of ``x**2 / F(x) = t`` with ``F`` the integral tail of the interpolation."""
    _require_interp(d)
    log_t = math.log(t)

    def psi(x):
        return 2.0 * math.log(x) - float(d.log_integral_tail(x)) - log_t

    start = 1.0
    while psi(start) > 0:
        start /= 2.0
        if start < 1e-12:
            raise DomainError("t is below the threshold where nu_t exists")
    return _increasing_root(psi, cfg, start)


def asymptotic_prediction(d, n: float) -> float | None:
    """Leading-order growth formula for the family, ``None`` if unavailable."""
    if isinstance(d, Geometric):
        return math.log(n) / abs(math.log1p(-d.p))
    if isinstance(d, Poisson):
        return math.log(n) / math.log(math.log(n))
    if isinstance(d, BorderlinePowerLog):
        # nu-scale: c2 sqrt(n (log n)^(gamma+1)), c2 = sqrt(c1 2^(-gamma-1))
        c2 = math.sqrt(d.tail_constant * 2.0 ** (-d.gamma - 1.0))
        return c2 * math.sqrt(n * math.log(n) ** (d.gamma + 1.0))
    if isinstance(d, PowerLog):
        b, gm = d.beta, d.gamma
        return (d.c * n * (math.log(n) / (1.0 + b)) ** gm) ** (1.0 / (1.0 + b))
    if isinstance(d, FiniteUniform):
        return float(d.m)
    return None


def scales(d: DiscretePmf, t: float, cfg: SolverConfig = DEFAULT) -> dict:
    """All scales at ``t`` (``r`` uses ``n = t``); mu/nu are ``None`` when undefined."""
    fr = solve_f(d, t, cfg)
    wr = solve_w(d, t, cfg)
    out = {
        "t": float(t),
        "f": fr.value,
        "alpha_star": fr.argmin_alpha,
        "w": wr.value,
        "r": solve_r(d, t),
        "mu": None,
        "nu": None,
        "asymptotic": asymptotic_prediction(d, t),
        "truncation_bound": max(fr.truncation_bound, wr.truncation_bound),
    }
    try:
        out["mu"] = solve_mu(d, t, cfg)
        out["nu"] = solve_nu(d, t, cfg)
    except (NoInterpolation, DomainError, NoBracket):
        pass
    return out
