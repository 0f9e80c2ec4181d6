"""Experiment runner: every scan as a subcommand writing a deterministic CSV.

Configuration comes from flags, optionally layered over a ``key=value`` file
(``--config``); flags win. Each CSV starts with one ``#`` line holding the
resolved configuration as JSON and the package version. Worker count and
output path are left out of that line so serial and parallel runs produce
identical bytes.

Randomness: the master ``--seed`` feeds a counter-based generator, and row
``i`` of a Monte Carlo scan draws from substream ``(i, side)``; rows are
always assembled in input order.

Exit codes: 0 success, 2 invalid configuration, 3 when any row failed.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import partial

import numpy as np

from . import __version__
from .cutoff import BaseLaw, distance_dn, profile_point
from .extremes import GUMBEL, LogCount, evt_gap, tv_affine_pair
from .numerics import QuadratureSpec
from .ou import OUParams, marginal_law, stationary_law
from .rng import DEFAULT_SEED, RandomStream
from .stable import StableLaw
from .tvd import tv_cauchy_shift, tv_empirical, tv_gaussian_shift, tv_gumbel_shift

EXIT_OK, EXIT_CONFIG, EXIT_ROWS = 0, 2, 3

# per-subcommand defaults, applied beneath the config file and the flags
DEFAULTS = {
    "profile": dict(alpha=2.0, c=0.5, ln_n=[1e2, 1e3, 1e4], b_grid=[-2.0, -1.0, 0.0, 1.0, 2.0]),
    "shape": dict(alpha=2.0, c=0.5, ln_n=[1e6], delta_grid=[0.25, 0.5, 1.0, 2.0, 4.0]),
    "no-cutoff": dict(alpha=1.0, c=1.0, ln_n=[math.log(1e2), math.log(1e4), math.log(1e8)]),
    "evt-gap": dict(alpha=2.0, c=0.5, ln_n=[1e1, 1e2, 1e3, 1e4]),
    "oracle-check": dict(alpha=2.0, c=0.5, theta_grid=[0.01, 0.1, 0.5, 1.0, 2.0, 5.0]),
    "mc-check": dict(alpha=2.0, c=0.5, n=[10], t_grid=[1.0]),
}


@dataclass
class ExperimentConfig:
    command: str
    alpha: float = 2.0
    c: float = 0.5
    lam: float = 1.0
    x0: float = 1.0
    kappa: float = 1.0
    ln_n: list = field(default_factory=list)
    b_grid: list = field(default_factory=list)
    delta_grid: list = field(default_factory=list)
    time_schedule: list = field(default_factory=list)
    schedule_factor: float = 1.0
    theta_grid: list = field(default_factory=list)
    n: list = field(default_factory=list)
    t_grid: list = field(default_factory=list)
    samples: int = 100_000
    bins: int = 64
    seed: int = DEFAULT_SEED
    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    out: str = "-"
    workers: int = 1

    def validate(self):
        need = {
            "profile": ("ln_n", "b_grid"),
            "shape": ("ln_n", "delta_grid"),
            "no-cutoff": ("ln_n",),
            "evt-gap": ("ln_n",),
            "oracle-check": ("theta_grid",),
            "mc-check": ("n", "t_grid"),
        }[self.command]
        for name in need:
            if not getattr(self, name):
                raise ValueError(f"{name.replace('_', '-')} must be non-empty for {self.command}")
        if not 0 < self.alpha <= 2:
            raise ValueError("alpha must lie in (0, 2]")
        for name in ("c", "lam", "kappa", "abs_tol", "rel_tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if any(not v > 0 for v in self.ln_n):
            raise ValueError("ln-n values must be positive")
        if not 0 <= self.seed < 2**64:
            raise ValueError("seed must be a 64-bit unsigned integer")
        if self.command == "profile" and self.alpha != 2:
            raise ValueError("profile needs alpha = 2")
        if self.command == "shape" and any(v <= 1 for v in self.ln_n):
            raise ValueError("shape needs ln-n > 1")
        if self.command == "no-cutoff":
            if self.time_schedule and len(self.time_schedule) != len(self.ln_n):
                raise ValueError("time-schedule must have one entry per ln-n value")
            if not self.time_schedule and any(v <= 1 for v in self.ln_n):
                raise ValueError("the default schedule needs ln-n > 1")
        if self.command == "mc-check":
            if any(int(v) != v or not 1 <= v <= 10_000 for v in self.n):
                raise ValueError("mc-check needs integer n in [1, 10000]")
            if self.samples < 100 or self.bins < 2:
                raise ValueError("samples must be >= 100 and bins >= 2")
        if self.workers < 1:
            raise ValueError("workers must be >= 1")

    @property
    def params(self) -> OUParams:
        return OUParams(self.lam, self.x0, StableLaw(self.alpha, self.c))

    @property
    def spec(self) -> QuadratureSpec:
        return QuadratureSpec(abs_tol=self.abs_tol, rel_tol=self.rel_tol)

    def header(self) -> str:
        d = asdict(self)
        d.pop("out")
        d.pop("workers")
        return "# " + json.dumps({"version": __version__, "config": d}, sort_keys=True)


def _fmt(v) -> str:
    if isinstance(v, str):
        return v
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return "%.17g" % float(v)


# --- row workers (module level so they pickle) ---------------------------------


def _row_profile(cfg: ExperimentConfig, item):
    ln_n, b = item
    pt = profile_point(cfg.params, LogCount(ln_n), b, cfg.kappa, cfg.spec)
    if pt.error:
        nan = math.nan
        return [ln_n, b, pt.t_eval, nan, nan, nan, pt.theta_n, pt.G_b, pt.error]
    return [ln_n, b, pt.t_eval, pt.d_n.value, pt.d_n.error_bound, pt.D_n.value, pt.theta_n, pt.G_b, ""]


def _row_shape(cfg: ExperimentConfig, item):
    ln_n, delta = item
    t_n = math.log(ln_n) / (2.0 * cfg.lam)
    try:
        d = distance_dn(cfg.params, LogCount(ln_n), delta * t_n, cfg.spec)
    except (ArithmeticError, ValueError) as exc:
        return [ln_n, delta, delta * t_n, math.nan, math.nan, f"{type(exc).__name__}: {exc}"]
    return [ln_n, delta, delta * t_n, d.value, d.error_bound, ""]


def _row_no_cutoff(cfg: ExperimentConfig, item):
    ln_n, t = item
    try:
        d = distance_dn(cfg.params, LogCount(ln_n), t, cfg.spec)
    except (ArithmeticError, ValueError) as exc:
        return [ln_n, t, math.nan, math.nan, f"{type(exc).__name__}: {exc}"]
    return [ln_n, t, d.value, d.error_bound, ""]


def _row_evt_gap(cfg: ExperimentConfig, item):
    ln_n = item
    try:
        g = evt_gap(StableLaw(cfg.alpha, cfg.c), LogCount(ln_n), cfg.spec)
    except (ArithmeticError, ValueError) as exc:
        return [ln_n, math.nan, math.nan, f"{type(exc).__name__}: {exc}"]
    return [ln_n, g.value, g.error_bound, ""]


_ORACLES = {
    "gaussian": (BaseLaw(StableLaw(2.0, 0.5)), tv_gaussian_shift),
    "cauchy": (BaseLaw(StableLaw(1.0, 1.0)), tv_cauchy_shift),
    "gumbel": (GUMBEL, tv_gumbel_shift),
}


def _row_oracle(cfg: ExperimentConfig, item):
    family, theta = item
    law, closed = _ORACLES[family]
    exact = closed(theta)
    try:
        q = tv_affine_pair(law, theta, 1.0, cfg.spec)
    except (ArithmeticError, ValueError) as exc:
        return [family, theta, exact, math.nan, math.nan, math.nan, f"{type(exc).__name__}: {exc}"]
    return [family, theta, exact, q.value, abs(q.value - exact), q.error_bound, ""]


def _row_mc(cfg: ExperimentConfig, item):
    i, (n, t) = item
    n = int(n)
    p = cfg.params
    root = RandomStream(cfg.seed, (i,))
    xt = marginal_law(p, t).sample(root.substream(0), n * cfg.samples).reshape(cfg.samples, n).max(axis=1)
    xs = stationary_law(p).sample(root.substream(1), n * cfg.samples).reshape(cfg.samples, n).max(axis=1)
    emp = tv_empirical(xt, xs, cfg.bins)
    try:
        d = distance_dn(p, LogCount.from_n(n), t, cfg.spec).value
    except (ArithmeticError, ValueError) as exc:
        return [n, t, emp.value, emp.error_bound, math.nan, math.nan, f"{type(exc).__name__}: {exc}"]
    return [n, t, emp.value, emp.error_bound, d, abs(emp.value - d), ""]


def _no_cutoff_items(cfg: ExperimentConfig):
    if cfg.time_schedule:
        return list(zip(cfg.ln_n, cfg.time_schedule))
    # default divergent schedule: factor * ln(ln n) / (alpha lambda)
    return [(v, cfg.schedule_factor * math.log(v) / (cfg.alpha * cfg.lam)) for v in cfg.ln_n]


def _plan(cfg: ExperimentConfig):
    if cfg.command == "profile":
        return ["ln_n", "b", "t_eval", "d_n", "d_n_err", "D_n", "theta_n", "G_b", "error"], _row_profile, [
            (v, b) for v in cfg.ln_n for b in cfg.b_grid
        ]
    if cfg.command == "shape":
        return ["ln_n", "delta", "t_eval", "d_n", "d_n_err", "error"], _row_shape, [
            (v, d) for v in cfg.ln_n for d in cfg.delta_grid
        ]
    if cfg.command == "no-cutoff":
        return ["ln_n", "t_n", "d_n", "d_n_err", "error"], _row_no_cutoff, _no_cutoff_items(cfg)
    if cfg.command == "evt-gap":
        return ["ln_n", "gap", "gap_err", "error"], _row_evt_gap, list(cfg.ln_n)
    if cfg.command == "oracle-check":
        return ["family", "theta", "closed_form", "quadrature", "delta", "quad_err", "error"], _row_oracle, [
            (f, th) for f in _ORACLES for th in cfg.theta_grid
        ]
    return ["n", "t", "empirical", "empirical_err", "d_n", "delta", "error"], _row_mc, list(
        enumerate((n, t) for n in cfg.n for t in cfg.t_grid)
    )


def run(cfg: ExperimentConfig) -> tuple[str, int]:
    """Evaluate every row of ``cfg`` and return ``(csv_text, exit_code)``."""
    columns, worker, items = _plan(cfg)
    fn = partial(worker, cfg)
    if cfg.workers > 1 and len(items) > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as ex:
            rows = list(ex.map(fn, items))
    else:
        rows = [fn(it) for it in items]
    buf = io.StringIO()
    buf.write(cfg.header() + "\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v) for v in r])
    failed = any(r[-1] for r in rows)
    return buf.getvalue(), EXIT_ROWS if failed else EXIT_OK


# --- argument handling ---------------------------------------------------------

_FLOAT_KEYS = {"alpha", "c", "lam", "x0", "kappa", "schedule_factor", "abs_tol", "rel_tol"}
_INT_KEYS = {"seed", "samples", "bins", "workers"}
_LIST_KEYS = {"ln_n", "b_grid", "delta_grid", "time_schedule", "theta_grid", "n", "t_grid"}
_ALIASES = {"lambda": "lam"}


def _key(name: str) -> str:
    k = name.strip().lstrip("-").replace("-", "_")
    return _ALIASES.get(k, k)


def _parse_list(text: str) -> list:
    return [float(v) for v in text.split(",") if v.strip()]


def _convert(key: str, value: str):
    if key in _LIST_KEYS:
        return _parse_list(value)
    if key in _INT_KEYS:
        return int(value)
    if key in _FLOAT_KEYS:
        return float(value)
    if key == "out":
        return value
    raise ValueError(f"unknown config key {key!r}")


def read_config_file(path: str) -> dict:
    """``key = value`` lines; ``#`` starts a comment; keys use flag names."""
    out = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected key = value")
            k, v = line.split("=", 1)
            key = _key(k)
            out[key] = _convert(key, v.strip())
    return out


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("model")
    g.add_argument("--alpha", type=float)
    g.add_argument("--c", type=float, help="noise scale in exp(-c|z|^alpha)")
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--x0", type=float)
    g.add_argument("--kappa", type=float)
    g = common.add_argument_group("grids")
    g.add_argument("--ln-n", dest="ln_n", type=_parse_list, help="comma list of ln n")
    g.add_argument("--b-grid", dest="b_grid", type=_parse_list)
    g.add_argument("--delta-grid", dest="delta_grid", type=_parse_list)
    g.add_argument("--time-schedule", dest="time_schedule", type=_parse_list, help="one time per ln-n (no-cutoff)")
    g.add_argument("--schedule-factor", dest="schedule_factor", type=float,
                   help="default no-cutoff schedule is factor * ln(ln n) / (alpha lambda)")
    g.add_argument("--theta-grid", dest="theta_grid", type=_parse_list)
    g.add_argument("--n", dest="n", type=_parse_list, help="comma list of integer n (mc-check)")
    g.add_argument("--t-grid", dest="t_grid", type=_parse_list)
    g.add_argument("--samples", type=int)
    g.add_argument("--bins", type=int)
    g = common.add_argument_group("run")
    g.add_argument("--seed", type=int)
    g.add_argument("--abs-tol", dest="abs_tol", type=float)
    g.add_argument("--rel-tol", dest="rel_tol", type=float)
    g.add_argument("--out", help="output CSV path, '-' for stdout")
    g.add_argument("--workers", type=int, help="parallel processes (output does not depend on it)")
    g.add_argument("--config", help="key = value file; flags override it")

    parser = argparse.ArgumentParser(prog="oucutoff", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    for name in DEFAULTS:
        sub.add_parser(name, parents=[common])
    return parser


def resolve(args: argparse.Namespace) -> ExperimentConfig:
    values = dict(DEFAULTS[args.command])
    if args.config:
        values.update(read_config_file(args.config))
    for k, v in vars(args).items():
        if k in ("command", "config") or v is None:
            continue
        values[k] = v
    cfg = ExperimentConfig(command=args.command, **values)
    cfg.validate()
    return cfg


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = resolve(args)
    except (ValueError, OSError, TypeError) as exc:
        print(f"oucutoff: invalid config: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    text, code = run(cfg)
    if cfg.out == "-":
        sys.stdout.write(text)
    else:
        with open(cfg.out, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    if code == EXIT_ROWS:
        print("oucutoff: some rows failed; see the error column", file=sys.stderr)
    return code


if __name__ == "__main__":
    sys.exit(main())
