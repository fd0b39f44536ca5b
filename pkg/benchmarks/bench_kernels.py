"""Compiled vs pure-Python kernels on the two hot loops.

    python3 benchmarks/bench_kernels.py [--repeat 5]

Prints best-of-N wall time per backend and the speed-up.
"""
import argparse
import timeit

import numpy as np

from lislab import _pykernels
from lislab.distributions import Geometric, PowerLog
from lislab.hammersley import sample_field

try:
    from lislab import _ckernels
except ImportError:  # extension not built
    _ckernels = None


def cases():
    rng = np.random.default_rng(0)
    geo = Geometric(0.5).sample(10**6, rng).astype(float)
    heavy = PowerLog(2.2, 0.0).sample(10**6, rng)
    fld = sample_field(PowerLog(2.2, 0.0), 2e4, rng_seed=1)
    src = np.sort(rng.uniform(0, 2e4, 400))
    sinks = np.arange(1, 200, 3, dtype=np.int64)
    return {
        "lis_strict geometric n=1e6": lambda k: k.lis_strict(geo),
        "lis_strict power_log n=1e6": lambda k: k.lis_strict(heavy),
        "sweep power_log t=2e4": lambda k: k.sweep(fld.row_ids, fld.xs, src, sinks, 10),
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5, help="timing repetitions (best is kept)")
    args = ap.parse_args()
    backends = {"python": _pykernels}
    if _ckernels is not None:
        backends["cython"] = _ckernels
    print(f"{'case':32s} " + " ".join(f"{b:>10s}" for b in backends) + "   speed-up")
    for name, fn in cases().items():
        times = {b: min(timeit.repeat(lambda: fn(k), number=1, repeat=args.repeat))
                 for b, k in backends.items()}
        ratio = times["python"] / times["cython"] if "cython" in times else float("nan")
        print(f"{name:32s} " + " ".join(f"{times[b]:9.4f}s" for b in backends) + f"   x{ratio:7.1f}")


if __name__ == "__main__":
    main()
