"""Longest increasing subsequences of i.i.d. discrete samples.

Distributions, exact LIS kernels, the variational growth scales, a
Hammersley-process simulator with sources and sinks, and a Monte Carlo
harness.  ``lislab.kernels.BACKEND`` tells which kernel build is active.
"""
from .distributions import (
    BorderlinePowerLog,
    DiscretePmf,
    Explicit,
    FiniteUniform,
    Geometric,
    MixedDistribution,
    Poisson,
    PowerLog,
    continuous_interpolation,
    from_descriptor,
    parse_inline,
    pmf,
    sample,
    sorted_prefix,
    tail,
)
from .errors import (
    DomainError,
    DuplicateAbscissa,
    InvalidDescriptor,
    LislabError,
    NoBracket,
    NoInterpolation,
    OutOfSupport,
    TooLarge,
)
from .hammersley import burke_row, evolve_row, run_coupled, run_plain, sample_field
from .kernels import BACKEND
from .lis import PlanarPointSet, distinct_count, greedy_subsequence, lis_oracle, lis_planar, lis_strict
from .variational import (
    SolverConfig,
    VariationalResult,
    asymptotic_prediction,
    g,
    solve_f,
    solve_mu,
    solve_nu,
    solve_r,
    solve_w,
)

__version__ = "0.1.0"
