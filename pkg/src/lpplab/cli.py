"""Command-line front end: experiments, invariant checks and curve fitting.

Every subcommand accepts ``--config FILE`` with flat ``key=value`` lines
(``#`` comments allowed); keys are the long option names and explicit flags
override file values.  Exit status: 0 success, 1 check failure, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import os
import sys

from . import __version__
from .bounds import delta0, log_mgf_closed_form
from .coupling import build_coupled_pair, burke_increment_test, coupled_exit_equality, verify_equality
from .environment import Density, Window, build_bulk
from .montecarlo import (
    ExperimentSpec,
    FitWindowError,
    append_fit_comments,
    fit_exponent,
    read_tail_csv,
    run_experiment,
    write_tail_csv,
    write_variance_csv,
)
from .passage import brute_force_passage, passage_point_to_point
from .rng import Seed
from .shape import (
    CharacteristicSpec,
    antidiagonal_remainder,
    axis_remainder,
    boundary_mean,
    curvature_penalty,
    limit_shape,
)

ENV_SEED = "LPP_LAB_SEED"


class UsageError(ValueError):
    pass


class CheckFailure(Exception):
    pass


# ---------------------------------------------------------------------------
# Option parsing helpers


def parse_thresholds(text: str) -> tuple[float, ...]:
    """Grid spec ``a:b:step`` -> inclusive ascending float grid."""
    try:
        a, b, step = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"bad threshold grid {text!r}, expected a:b:step") from exc
    if step <= 0 or b < a:
        raise UsageError(f"bad threshold grid {text!r}: need a <= b and step > 0")
    count = int(round((b - a) / step)) + 1
    grid = tuple(a + i * step for i in range(count) if a + i * step <= b + 1e-12)
    return grid


def parse_window(text: str) -> tuple[float, float]:
    try:
        a, b = (float(p) for p in text.split(":"))
    except ValueError as exc:
        raise UsageError(f"bad window {text!r}, expected lo:hi") from exc
    if b <= a:
        raise UsageError(f"bad window {text!r}: need lo < hi")
    return a, b


def parse_floats(text: str) -> tuple[float, ...]:
    return tuple(float(p) for p in text.split(","))


def parse_ints(text: str) -> tuple[int, ...]:
    return tuple(int(p) for p in text.split(","))


def parse_point(text: str) -> tuple[int, int]:
    try:
        x, y = (int(p) for p in text.split(","))
    except ValueError as exc:
        raise UsageError(f"bad lattice point {text!r}, expected x,y") from exc
    return x, y


def parse_threads(text: str) -> int:
    if text == "auto":
        return os.cpu_count() or 1
    n = int(text)
    if n < 1:
        raise UsageError("--threads must be positive or 'auto'")
    return n


def load_config(path: str) -> dict[str, str]:
    cfg: dict[str, str] = {}
    try:
        with open(path, "r", encoding="utf-8") as fh:
            for lineno, raw in enumerate(fh, start=1):
                line = raw.strip()
                if not line or line.startswith("#"):
                    continue
                if "=" not in line:
                    raise UsageError(f"{path}:{lineno}: expected key=value, got {line!r}")
                key, _, value = line.partition("=")
                cfg[key.strip()] = value.strip()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc}") from exc
    return cfg


def resolve_options(args: argparse.Namespace, parsers: dict[str, callable]) -> dict:
    """Merge flag values over config-file values; reject unknown config keys."""
    merged = {}
    cfg = load_config(args.config) if getattr(args, "config", None) else {}
    unknown = set(cfg) - set(parsers)
    if unknown:
        raise UsageError(f"unknown config keys: {sorted(unknown)} (allowed: {sorted(parsers)})")
    for key, parse in parsers.items():
        flag_value = getattr(args, key.replace("-", "_"), None)
        if flag_value is not None:
            merged[key] = flag_value
        elif key in cfg:
            merged[key] = parse(cfg[key])
        else:
            merged[key] = None
    return merged


def default_base_seed() -> int:
    env = os.environ.get(ENV_SEED)
    return int(env) if env else 0


def check_out_writable(path: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    if not os.path.isdir(directory) or not os.access(directory, os.W_OK):
        raise UsageError(f"output directory not writable: {directory}")
    if os.path.exists(path) and not os.access(path, os.W_OK):
        raise UsageError(f"output path not writable: {path}")


# ---------------------------------------------------------------------------
# Subcommand handlers


def cmd_shape(opts) -> int:
    rho = opts["rho"] if opts["rho"] is not None else 0.5
    n = opts["n"] if opts["n"] is not None else 1000
    spec = CharacteristicSpec(Density(rho), n)
    cx, cy = spec.v
    ex, ey = spec.v_exact
    print(f"characteristic point: ({cx}, {cy})  exact ({ex!r}, {ey!r})  rounding half-up")
    print(f"limit_shape(v) = {limit_shape(cx, cy)!r}   limit_shape(exact v) = {limit_shape(ex, ey)!r}")
    if opts["x"] is not None:
        x = opts["x"]
        print(
            f"x = {x!r}: boundary_mean = {boundary_mean(x, rho)!r}  "
            f"curvature_penalty = {curvature_penalty(x, rho)!r}  "
            f"axis_remainder = {axis_remainder(x, spec)!r}"
        )
    if opts["t"] is not None:
        t = opts["t"]
        print(
            f"t = {t!r}: antidiagonal_remainder = {antidiagonal_remainder(t, n)!r} "
            f"(symmetric model, rho = 1/2)"
        )
    return 0


def cmd_p2p(opts) -> int:
    u = opts["u"] if opts["u"] is not None else (0, 0)
    v = opts["v"]
    if v is None:
        raise UsageError("p2p requires --v x,y")
    if u[0] > v[0] or u[1] > v[1]:
        raise UsageError("u must be coordinate-wise below v")
    seed = Seed(opts["seed"] if opts["seed"] is not None else default_base_seed(), "p2p")
    field = build_bulk(Window(u[0], u[1], v[0], v[1]), seed)
    value = passage_point_to_point(field, u, v)
    print(f"G({u} -> {v}) = {value!r}")
    return 0


def _experiment_spec(kind: str, opts, experiment_id: str) -> ExperimentSpec:
    missing = [k for k in ("rho", "n", "replicates", "thresholds") if opts[k] is None]
    if missing:
        raise UsageError(f"{experiment_id} requires --{', --'.join(missing)}")
    base = opts["seed"] if opts["seed"] is not None else default_base_seed()
    return ExperimentSpec(
        kind=kind,
        rho=Density(opts["rho"]),
        n=opts["n"],
        thresholds=opts["thresholds"],
        replicates=opts["replicates"],
        seed=Seed(base, experiment_id),
    )


def cmd_tail(kind: str, name: str, opts) -> int:
    if opts["out"] is None:
        raise UsageError(f"{name} requires --out FILE")
    check_out_writable(opts["out"])
    spec = _experiment_spec(kind, opts, name)
    n_jobs = opts["threads"] if opts["threads"] is not None else 1
    curve = run_experiment(spec, n_jobs=n_jobs)
    write_tail_csv(curve, opts["out"])
    line = f"{name}: rho={spec.rho.rho} n={spec.n} replicates={spec.replicates} -> {opts['out']}"
    if curve.fit is not None and curve.fit.ok:
        line += f"  kappa_hat={curve.fit.kappa_hat:.3f}"
    print(line)
    return 0


def cmd_variance(opts) -> int:
    if opts["out"] is None:
        raise UsageError("variance requires --out FILE")
    check_out_writable(opts["out"])
    missing = [k for k in ("rho", "n-grid", "replicates") if opts[k] is None]
    if missing:
        raise UsageError(f"variance requires --{', --'.join(missing)}")
    base = opts["seed"] if opts["seed"] is not None else default_base_seed()
    spec = ExperimentSpec(
        kind="variance_scaling",
        rho=Density(opts["rho"]),
        n=opts["n-grid"][0],
        thresholds=(),
        replicates=opts["replicates"],
        seed=Seed(base, "variance"),
        n_grid=opts["n-grid"],
        statistic="boundary_sum" if opts["control"] else "characteristic",
    )
    n_jobs = opts["threads"] if opts["threads"] is not None else 1
    table = run_experiment(spec, n_jobs=n_jobs)
    write_variance_csv(table, opts["out"])
    print(
        f"variance: statistic={spec.statistic} sizes={spec.n_grid} "
        f"slope_hat={table.slope:.4f} -> {opts['out']}"
    )
    return 0


def cmd_oracle_check(opts) -> int:
    instances = opts["instances"] if opts["instances"] is not None else 1000
    base = opts["seed"] if opts["seed"] is not None else default_base_seed()
    pick = Seed(base, "oracle-pick").stream()
    exact = 0
    max_rel = 0.0
    for i in range(instances):
        nx, ny = (int(v) for v in pick.integers(1, 7, size=2))
        field = build_bulk(Window(0, 0, nx - 1, ny - 1), Seed(base, "oracle", i))
        dp = passage_point_to_point(field, (0, 0), (nx - 1, ny - 1))
        bf = brute_force_passage(field, (0, 0), (nx - 1, ny - 1))
        rel = abs(dp - bf) / max(1.0, abs(bf))
        max_rel = max(max_rel, rel)
        if rel < 1e-9:
            exact += 1
    print(f"oracle: {exact}/{instances} exact")
    print(f"#summary checked={instances} exact={exact} max_rel_err={max_rel!r}")
    if exact != instances:
        raise CheckFailure("dynamic program disagrees with brute-force enumeration")
    return 0


def cmd_coupling_check(opts) -> int:
    rho = opts["rho"] if opts["rho"] is not None else 0.5
    n = opts["n"] if opts["n"] is not None else 20
    replicates = opts["replicates"] if opts["replicates"] is not None else 100
    exit_n = opts["exit-n"] if opts["exit-n"] is not None else 64
    exit_replicates = opts["exit-replicates"] if opts["exit-replicates"] is not None else 1000
    base = opts["seed"] if opts["seed"] is not None else default_base_seed()

    worst = 0.0
    for i in range(replicates):
        report = verify_equality(build_coupled_pair(n, rho, Seed(base, "coupling", i)))
        worst = max(worst, report.max_rel_err)
    print(f"coupling: {replicates} windows at n={n}, max_rel_err={worst!r}")
    ok = worst < 1e-9

    if exit_replicates > 0:
        spec = CharacteristicSpec(Density(rho), 4 * exit_n)
        equal = 0
        for i in range(exit_replicates):
            pair = build_coupled_pair(exit_n, rho, Seed(base, "coupling-exit", i))
            equal += coupled_exit_equality(pair, spec)
        print(f"exit-coupling: {equal}/{exit_replicates} equal at n={exit_n}")
        ok = ok and equal == exit_replicates

    print(f"#summary max_rel_err={worst!r} ok={int(ok)}")
    if not ok:
        raise CheckFailure("coupling identities failed")
    return 0


def cmd_burke_check(opts) -> int:
    rho = opts["rho"] if opts["rho"] is not None else 0.5
    n = opts["n"] if opts["n"] is not None else 64
    replicates = opts["replicates"] if opts["replicates"] is not None else 1000
    base = opts["seed"] if opts["seed"] is not None else default_base_seed()
    report = burke_increment_test(rho, n, replicates, Seed(base, "burke"))
    print(
        f"burke: rho={rho} n={n} replicates={replicates} "
        f"p_x={report.p_x!r} p_y={report.p_y!r} control_p_x={report.control_p_x!r}"
    )
    print(
        f"#summary p_x={report.p_x!r} p_y={report.p_y!r} "
        f"mean_x={report.mean_x!r} mean_y={report.mean_y!r} ok={int(report.ok)}"
    )
    if not report.ok:
        raise CheckFailure("derived boundary increments failed the marginal KS test")
    return 0


def cmd_fit(opts, csv_path: str) -> int:
    rows, _, _ = read_tail_csv(csv_path)
    base = opts["seed"] if opts["seed"] is not None else default_base_seed()
    kwargs = {}
    if opts["window"] is not None:
        kwargs["window"] = opts["window"]
    if opts["candidates"] is not None:
        kwargs["kappa_candidates"] = opts["candidates"]
    try:
        fit = fit_exponent(rows, bootstrap_seed=Seed(base, "fit-bootstrap"), **kwargs)
    except FitWindowError as exc:
        print(f"fit: {exc}", file=sys.stderr)
        raise CheckFailure(str(exc)) from exc
    append_fit_comments(csv_path, fit)
    print(
        f"fit: kappa_hat={fit.kappa_hat!r} ci=[{fit.kappa_ci[0]!r},{fit.kappa_ci[1]!r}] "
        f"c_hat={fit.c_hat!r} rss={fit.rss!r} rows={fit.n_rows_used}"
    )
    for c in fit.comparisons:
        print(f"fit-model: kappa={c.kappa!r} rss={c.rss!r}")
    if not fit.ok:
        raise CheckFailure(fit.error or "degenerate fit")
    return 0


def cmd_mgf(opts) -> int:
    c_star = opts["c-star"] if opts["c-star"] is not None else 1.0
    d0 = delta0(c_star)
    print(f"delta0({c_star!r}) = {d0!r}")
    if opts["x-bar"] is not None and opts["lam"] is not None:
        x_bar, lam = opts["x-bar"], opts["lam"]
        print(f"log_mgf(x_bar={x_bar!r}, lambda={lam!r}) = {log_mgf_closed_form(x_bar, lam)!r}")
    return 0


# ---------------------------------------------------------------------------
# Parser assembly

def _parse_bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes")


_COMMON = {
    "rho": float,
    "n": int,
    "replicates": int,
    "seed": int,
    "threads": parse_threads,
    "out": str,
}

_SUBCOMMAND_OPTIONS: dict[str, dict] = {
    "shape": {"rho": float, "n": int, "x": float, "t": float},
    "p2p": {"u": parse_point, "v": parse_point, "seed": int},
    "exit-tail": {**_COMMON, "thresholds": parse_thresholds},
    "upper-tail": {**_COMMON, "thresholds": parse_thresholds},
    "lower-tail": {**_COMMON, "thresholds": parse_thresholds},
    "p2p-tail": {**_COMMON, "thresholds": parse_thresholds},
    "variance": {**_COMMON, "n-grid": parse_ints, "control": _parse_bool},
    "oracle-check": {"seed": int, "instances": int},
    "coupling-check": {
        "rho": float,
        "n": int,
        "replicates": int,
        "seed": int,
        "exit-n": int,
        "exit-replicates": int,
    },
    "burke-check": {"rho": float, "n": int, "replicates": int, "seed": int},
    "fit": {"window": parse_window, "candidates": parse_floats, "seed": int},
    "mgf": {"c-star": float, "x-bar": float, "lam": float},
}

# options parsed as flags without a value
_FLAG_OPTIONS = {"control"}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="lpplab",
        description="Exponential last-passage-percolation experiments and checks",
    )
    parser.add_argument("--version", action="version", version=f"lpplab {__version__}")
    subs = parser.add_subparsers(dest="command", required=True)
    helps = {
        "shape": "print shape functions and expansion gaps",
        "p2p": "one bulk point-to-point passage time",
        "exit-tail": "exit-coordinate tail experiment -> CSV",
        "upper-tail": "passage-time upper-tail experiment -> CSV",
        "lower-tail": "passage-time lower-tail experiment -> CSV",
        "p2p-tail": "bulk passage-time upper-tail experiment -> CSV",
        "variance": "variance-vs-size scaling experiment -> CSV",
        "oracle-check": "dynamic program vs brute-force enumeration",
        "coupling-check": "coupled-representation equalities",
        "burke-check": "derived boundary increment marginals",
        "fit": "re-fit exponents on an existing CSV (appends comments)",
        "mgf": "closed-form MGF values and the quadratic-bound threshold",
    }
    for name, options in _SUBCOMMAND_OPTIONS.items():
        sub = subs.add_parser(name, help=helps[name])
        if name == "fit":
            sub.add_argument("csv", help="existing tail CSV to re-fit")
        for key, fn in options.items():
            dest = key.replace("-", "_")
            if key in _FLAG_OPTIONS:
                sub.add_argument(f"--{key}", dest=dest, action="store_const", const=True, default=None)
            else:
                sub.add_argument(f"--{key}", dest=dest, type=fn, default=None)
        sub.add_argument("--config", default=None, help="flat key=value config file")
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # argparse handles usage errors and --help
        return int(exc.code or 0)
    try:
        opts = resolve_options(args, _SUBCOMMAND_OPTIONS[args.command])
        if args.command == "shape":
            return cmd_shape(opts)
        if args.command == "p2p":
            return cmd_p2p(opts)
        if args.command in ("exit-tail", "upper-tail", "lower-tail", "p2p-tail"):
            kind = args.command.replace("-", "_") if args.command != "p2p-tail" else "p2p_tail"
            return cmd_tail(kind, args.command, opts)
        if args.command == "variance":
            return cmd_variance(opts)
        if args.command == "oracle-check":
            return cmd_oracle_check(opts)
        if args.command == "coupling-check":
            return cmd_coupling_check(opts)
        if args.command == "burke-check":
            return cmd_burke_check(opts)
        if args.command == "fit":
            return cmd_fit(opts, args.csv)
        if args.command == "mgf":
            return cmd_mgf(opts)
        raise UsageError(f"unhandled command {args.command}")
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except CheckFailure as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
