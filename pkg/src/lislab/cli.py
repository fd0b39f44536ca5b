"""Command-line front end: ``lislab <subcommand> [flags]``.

Exit status is 0 on success, 2 for usage or input errors (bad flags,
malformed JSON, invalid distribution) and 1 for runtime or solver errors.
All floats are written with 12 significant digits in scientific notation
so repeated runs produce byte-identical files.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Any

from . import hammersley, montecarlo
from .distributions import from_descriptor, parse_inline
from .errors import InvalidDescriptor, LislabError
from .montecarlo import DEFAULT_SEED, ExperimentSpec, format_float
from .variational import SolverConfig, asymptotic_prediction, scales

__all__ = ["main", "dumps", "build_parser"]


class UsageError(Exception):
    pass


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON text with floats rendered by :func:`format_float`."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if obj is None:
        return "null"
    if isinstance(obj, bool):
        return "true" if obj else "false"
    if isinstance(obj, (int, float)) or hasattr(obj, "dtype"):
        s = format_float(obj)
        return {"nan": "NaN", "inf": "Infinity", "-inf": "-Infinity"}.get(s, s)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialise {type(obj).__name__}")


def _load_dist(text: str):
    try:
        text = text.strip()
        if text.startswith("@"):
            with open(text[1:], encoding="utf-8") as fh:
                return from_descriptor(json.load(fh))
        if text.startswith("{"):
            return from_descriptor(json.loads(text))
        return parse_inline(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed distribution JSON: {exc}") from None
    except (InvalidDescriptor, OSError) as exc:
        raise UsageError(f"invalid --dist: {exc}") from None


def _seed(args) -> int:
    if args.seed is not None:
        return args.seed
    env = os.environ.get("LISLAB_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"LISLAB_SEED must be an integer, got {env!r}") from None
    return DEFAULT_SEED


def _emit(text: str, out: str | None) -> None:
    if out:
        with open(out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _table(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return dumps(rows) + "\n"
    if not rows:
        return ""
    cols = list(rows[0])
    lines = [",".join(cols)]
    for r in rows:
        lines.append(",".join(format_float(r[c]) if not isinstance(r[c], str) else r[c] for c in cols))
    return "\n".join(lines) + "\n"


# -- subcommands ------------------------------------------------------------------


def cmd_solve(args) -> str:
    d = _load_dist(args.dist)
    cfg = SolverConfig()
    s = scales(d, args.t, cfg)
    keys = ["t", "f", "alpha_star", "w", "r", "mu", "nu", "asymptotic", "truncation_bound"]
    obj = {k: s[k] for k in keys}
    if args.format == "csv":
        return _table([obj], "csv")
    return dumps(obj) + "\n"


def cmd_simulate(args) -> str:
    stats = ("mean", "variance", "ratios", "distinct")
    if args.eps is not None:
        stats += ("tail_check",)
    spec = ExperimentSpec(_load_dist(args.dist).to_dict(), args.n, args.replicates, _seed(args),
                          stats, eps=0.5 if args.eps is None else args.eps)
    res = montecarlo.run_experiment(spec, args.jobs)
    return res.to_json() if args.format == "json" else res.to_csv()


def cmd_coupled(args) -> str:
    d = _load_dist(args.dist)
    rep = montecarlo.coupling_study(d, [args.t], [args.alpha], args.replicates, _seed(args), args.jobs)
    cell = dict(rep.cells[0])
    cell["f"] = scales(d, args.t)["f"] if hasattr(d, "masses") else None
    obj = {"distribution": d.to_dict(), "seed": _seed(args), **cell,
           "violation_keys": [list(v["spawn_key"]) for v in rep.violations]}
    if args.format == "csv":
        obj.pop("distribution")
        obj.pop("violation_keys")
        return _table([obj], "csv")
    return dumps(obj) + "\n"


def cmd_experiment(args) -> str:
    try:
        with open(args.spec, encoding="utf-8") as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise UsageError(f"malformed spec JSON in {args.spec}: {exc}") from None
    except OSError as exc:
        raise UsageError(f"cannot read spec: {exc}") from None
    try:
        spec = ExperimentSpec.from_dict(raw)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"invalid experiment spec: {exc}") from None
    if args.seed is not None or os.environ.get("LISLAB_SEED"):
        spec = spec.with_(master_seed=_seed(args))
    res = montecarlo.run_experiment(spec, args.jobs)
    fmt = args.format
    if fmt is None:
        fmt = "json" if (args.out or "").endswith(".json") else "csv"
    return res.to_json() if fmt == "json" else res.to_csv()


def cmd_asymptotics(args) -> str:
    d = _load_dist(args.dist)
    rows = []
    for n in args.n:
        if hasattr(d, "masses"):
            s = scales(d, float(n))
            rows.append({"n": n, "f": s["f"], "w": s["w"], "r": s["r"], "mu": s["mu"],
                         "nu": s["nu"], "asymptotic": s["asymptotic"],
                         "f_over_asymptotic": s["f"] / s["asymptotic"] if s["asymptotic"] else None})
        else:
            rows.append({"n": n, "asymptotic": asymptotic_prediction(d, n)})
    return _table(rows, args.format or "csv")


def cmd_trajectory(args) -> str:
    d = _load_dist(args.dist)
    return dumps(hammersley.trajectory(d, args.t, args.alpha, _seed(args))) + "\n"


# -- parser --------------------------------------------------------------------


def _n_list(text: str) -> list[int]:
    try:
        vals = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated sample sizes, got {text!r}")
    if not vals or any(v < 1 for v in vals) or vals != sorted(set(vals)):
        raise argparse.ArgumentTypeError("sample sizes must be positive and strictly ascending")
    return vals


def _positive(kind):
    def conv(text):
        try:
            v = kind(float(text)) if kind is int else kind(text)
        except ValueError:
            raise argparse.ArgumentTypeError(f"not a number: {text!r}")
        if not v > 0:
            raise argparse.ArgumentTypeError(f"must be > 0: {text!r}")
        return v
    return conv


def _unit(text: str) -> float:
    try:
        v = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}")
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must lie in (0, 1): {text!r}")
    return v


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(2, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="lislab", description="Longest increasing subsequences of discrete i.i.d. samples.")
    sub = p.add_subparsers(dest="command", metavar="<command>", parser_class=_Parser)
    sub.required = True

    dist_help = ("distribution: inline 'family:params' (e.g. geometric:0.5, poisson:1, "
                 "power_log:2.2,0, borderline:-3, finite_uniform:4, explicit:1=0.2,2=0.8, "
                 "mixed:0.25/geometric:0.5), a JSON object, or @file.json")
    seed_help = f"master seed (default: $LISLAB_SEED or {DEFAULT_SEED})"
    jobs_help = "worker processes; output does not depend on this (default 1)"

    def common(sp, fmt=("csv", "json"), default="json"):
        sp.add_argument("--out", help="write output to this file instead of stdout")
        sp.add_argument("--format", choices=fmt, default=default, help=f"output format (default {default})")

    s = sub.add_parser("solve", help="deterministic scales f, w, r, mu, nu at one t")
    s.add_argument("--dist", required=True, help=dist_help)
    s.add_argument("--t", type=_positive(float), required=True, help="time / sample size t > 0")
    common(s)
    s.set_defaults(func=cmd_solve)

    s = sub.add_parser("simulate", help="Monte Carlo mean, variance and ratios of L_n")
    s.add_argument("--dist", required=True, help=dist_help)
    s.add_argument("--n", type=_n_list, required=True, help="comma-separated ascending sample sizes")
    s.add_argument("--replicates", type=_positive(int), default=100, help="replicates per n (default 100)")
    s.add_argument("--seed", type=int, help=seed_help)
    s.add_argument("--jobs", type=_positive(int), default=1, help=jobs_help)
    s.add_argument("--eps", type=_unit, default=None,
                   help="also report the frequency of L_n <= (1-eps) w_n and its bound")
    common(s, default="csv")
    s.set_defaults(func=cmd_simulate)

    s = sub.add_parser("coupled", help="source/sink coupling: count pathwise bound violations")
    s.add_argument("--dist", required=True, help=dist_help)
    s.add_argument("--t", type=_positive(float), required=True, help="field width t > 0")
    s.add_argument("--alpha", type=_positive(float), required=True, help="source/sink intensity alpha > 0")
    s.add_argument("--replicates", type=_positive(int), default=1000, help="replicates (default 1000)")
    s.add_argument("--seed", type=int, help=seed_help)
    s.add_argument("--jobs", type=_positive(int), default=1, help=jobs_help)
    common(s)
    s.set_defaults(func=cmd_coupled)

    s = sub.add_parser("experiment", help="run a JSON experiment spec")
    s.add_argument("--spec", required=True, help="path to the experiment spec JSON")
    s.add_argument("--seed", type=int, help="override the spec's master_seed (also $LISLAB_SEED)")
    s.add_argument("--jobs", type=_positive(int), default=1, help=jobs_help)
    s.add_argument("--out", help="write output to this file instead of stdout")
    s.add_argument("--format", choices=("csv", "json"), default=None,
                   help="output format (default: json if --out ends in .json, else csv)")
    s.set_defaults(func=cmd_experiment)

    s = sub.add_parser("asymptotics", help="solver scales against the leading-order formula")
    s.add_argument("--dist", required=True, help=dist_help)
    s.add_argument("--n", type=_n_list, default=[10**2, 10**4, 10**6, 10**8],
                   help="comma-separated ascending n (default 1e2,1e4,1e6,1e8)")
    common(s, default="csv")
    s.set_defaults(func=cmd_asymptotics)

    s = sub.add_parser("trajectory", help="per-row particle positions of one run, as JSON")
    s.add_argument("--dist", required=True, help=dist_help)
    s.add_argument("--t", type=_positive(float), required=True, help="field width t > 0")
    s.add_argument("--alpha", type=_positive(float), default=None,
                   help="add PPP(alpha) sources and sinks (default: plain process)")
    s.add_argument("--seed", type=int, help=seed_help)
    s.add_argument("--out", help="write output to this file instead of stdout")
    s.add_argument("--format", choices=("json",), default="json", help="output format (json only)")
    s.set_defaults(func=cmd_trajectory)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text = args.func(args)
        _emit(text, args.out)
    except UsageError as exc:
        print(f"lislab {args.command}: error: {exc}", file=sys.stderr)
        return 2
    except (LislabError, ArithmeticError, ValueError, OSError) as exc:
        print(f"lislab {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
