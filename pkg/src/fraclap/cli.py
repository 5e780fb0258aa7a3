"""Command-line front end: ``fraclap <command> [options]``.

Commands
    classify        regime check of (N, s, p, t, m)
    exponents       critical exponents
    ctheta          C(θ) scan over a θ-grid (ctheta.csv)
    eval            one operator value for a profile at radius r
    schedule        exponent-improvement schedule (schedule.csv)
    verify-barrier  one improvement step against its right-hand side (margins.csv)
    verify-final    the growing negative barrier (margins.csv)
    oracle-check    evaluator against the full-dimensional estimators (oracle.csv)
    report          the whole pipeline into report.json plus CSV side files

A JSON config (``--config``) supplies defaults; any flag overrides it.
Exit codes: 0 success, 1 operational error, 2 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .barriers import (
    INDETERMINATE,
    NEGATIVE,
    POSITIVE,
    final_exponent_condition,
    scan_sign_trichotomy,
    select_theta_bar,
    verify_final_barrier,
    verify_step,
)
from .evaluator import NegativePower, Power, QuadratureConfig, TruncatedPower, eval_flap
from .oracle import grid_flap, mc_window_sensitivity
from .params import (
    NEGATIVE as NEGATIVE_REGION,
    POSITIVE as POSITIVE_REGION,
    ProblemParams,
    admissible_theta_range,
    classify,
    classify_theta,
    critical_exponents,
)
from .schedule import ScheduleError, build_schedule

SCHEMA_VERSION = 1
MAX_GRID_COUNT = 100_000
FIXED_TIMESTAMP = "1970-01-01T00:00:00Z"

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERIFY = 2


class ConfigError(ValueError):
    pass


# -- configuration -----------------------------------------------------------------


@dataclass(frozen=True)
class GridSpec:
    """A 1-D grid; ``min``/``max`` of None mean "derive from the parameters"."""

    min: float | None = None
    max: float | None = None
    count: int = 40
    spacing: str = "linear"

    def __post_init__(self):
        if isinstance(self.count, bool) or int(self.count) != self.count:
            raise ConfigError(f"count must be an integer, got {self.count!r}")
        if not 1 <= self.count <= MAX_GRID_COUNT:
            raise ConfigError(f"count must lie in [1, {MAX_GRID_COUNT}], got {self.count}")
        if self.spacing not in ("linear", "log"):
            raise ConfigError(f"spacing must be 'linear' or 'log', got {self.spacing!r}")
        if self.min is not None and self.max is not None and self.min > self.max:
            raise ConfigError(f"min {self.min} exceeds max {self.max}")
        if self.spacing == "log" and self.min is not None and self.min <= 0.0:
            raise ConfigError("log spacing needs min > 0")

    def values(self, lo: float | None = None, hi: float | None = None) -> list[float]:
        a = self.min if self.min is not None else lo
        b = self.max if self.max is not None else hi
        if a is None or b is None:
            raise ConfigError("grid bounds are not set")
        if self.count == 1:
            return [float(a)]
        pts = np.geomspace(a, b, self.count) if self.spacing == "log" else np.linspace(a, b, self.count)
        return [float(x) for x in pts]

    def to_dict(self) -> dict:
        return {"min": self.min, "max": self.max, "count": self.count, "spacing": self.spacing}

    @classmethod
    def from_dict(cls, data: dict, where: str) -> "GridSpec":
        unknown = set(data) - {"min", "max", "count", "spacing"}
        if unknown:
            raise ConfigError(f"unknown field(s) in {where}: {sorted(unknown)}")
        try:
            return cls(**data)
        except (ConfigError, TypeError) as exc:
            raise ConfigError(f"{where}: {exc}") from None


DEFAULT_THETA_GRID = GridSpec(None, None, 40, "linear")
DEFAULT_R_GRID = GridSpec(1.0, 1e4, 33, "log")


@dataclass(frozen=True)
class RunConfig:
    params: ProblemParams
    quadrature: QuadratureConfig = field(default_factory=QuadratureConfig)
    theta_grid: GridSpec = DEFAULT_THETA_GRID
    r_grid: GridSpec = DEFAULT_R_GRID
    seed: int = 0
    output_dir: str | None = None
    oracle_samples: int = 200_000
    workers: int = 1

    def __post_init__(self):
        if isinstance(self.seed, bool) or int(self.seed) != self.seed or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}")
        if int(self.oracle_samples) != self.oracle_samples or self.oracle_samples < 1000:
            raise ConfigError(f"oracle_samples must be an integer >= 1000, got {self.oracle_samples!r}")
        if int(self.workers) != self.workers or self.workers < 1:
            raise ConfigError(f"workers must be a positive integer, got {self.workers!r}")

    def to_dict(self) -> dict:
        return {
            "params": self.params.to_dict(),
            "quadrature": self.quadrature.to_dict(),
            "grids": {"theta": self.theta_grid.to_dict(), "r": self.r_grid.to_dict()},
            "seed": self.seed,
            "output_dir": self.output_dir,
            "oracle_samples": self.oracle_samples,
            "workers": self.workers,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        known = {"params", "quadrature", "grids", "seed", "output_dir", "oracle_samples", "workers"}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"unknown config field(s): {sorted(unknown)}")
        if "params" not in data:
            raise ConfigError("missing config field: params")
        try:
            params = ProblemParams.from_dict(data["params"])
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"params: {exc}") from None
        try:
            quad = QuadratureConfig.from_dict(data.get("quadrature", {}))
        except (ValueError, TypeError) as exc:
            raise ConfigError(f"quadrature: {exc}") from None
        grids = data.get("grids", {})
        unknown = set(grids) - {"theta", "r"}
        if unknown:
            raise ConfigError(f"unknown field(s) in grids: {sorted(unknown)}")
        theta = GridSpec.from_dict(grids["theta"], "grids.theta") if "theta" in grids else DEFAULT_THETA_GRID
        r = GridSpec.from_dict(grids["r"], "grids.r") if "r" in grids else DEFAULT_R_GRID
        return cls(
            params=params,
            quadrature=quad,
            theta_grid=theta,
            r_grid=r,
            seed=data.get("seed", 0),
            output_dir=data.get("output_dir"),
            oracle_samples=data.get("oracle_samples", 200_000),
            workers=data.get("workers", 1),
        )


_PARAM_FLAGS = ("N", "s", "p", "t", "m")
_QUAD_FLAGS = {
    "rel_tol": "rel_tol",
    "delta_diag": "delta_diag",
    "lambda_tail": "lambda_tail",
    "max_panels": "max_panels",
    "angular_nodes": "angular_nodes",
}
_GRID_FLAGS = ("min", "max", "count", "spacing")


def build_config(args: argparse.Namespace) -> RunConfig:
    """Config file first, then every flag that was given on the command line."""
    data: dict = {}
    if args.config:
        try:
            data = json.loads(Path(args.config).read_text())
        except OSError as exc:
            raise ConfigError(f"cannot read config {args.config}: {exc}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config {args.config} is not valid JSON: {exc}") from None
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
    params = dict(data.get("params", {}))
    for name in _PARAM_FLAGS:
        value = getattr(args, name, None)
        if value is not None:
            params[name] = value
    data["params"] = params
    quad = dict(data.get("quadrature", {}))
    for flag, name in _QUAD_FLAGS.items():
        value = getattr(args, flag, None)
        if value is not None:
            quad[name] = value
    data["quadrature"] = quad
    grids = {k: dict(v) for k, v in data.get("grids", {}).items()}
    for axis in ("theta", "r"):
        for key in _GRID_FLAGS:
            value = getattr(args, f"{axis}_{key}", None)
            if value is not None:
                grids.setdefault(axis, {})[key] = value
    data["grids"] = grids
    if args.seed is not None:
        data["seed"] = args.seed
    if args.out is not None:
        data["output_dir"] = args.out
    if getattr(args, "samples", None) is not None:
        data["oracle_samples"] = args.samples
    if args.workers is not None:
        data["workers"] = args.workers
    missing = [name for name in ("N", "s", "p") if name not in params]
    if missing:
        raise ConfigError(f"missing parameter(s): {', '.join(missing)} (give --{missing[0]} or a config)")
    return RunConfig.from_dict(data)


# -- output helpers ---------------------------------------------------------------------


def _json_default(obj):
    if isinstance(obj, np.generic):
        return obj.item()
    if isinstance(obj, tuple):
        return list(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_json_default, allow_nan=True) + "\n"


def _out_dir(cfg: RunConfig) -> Path | None:
    if cfg.output_dir is None:
        return None
    path = Path(cfg.output_dir)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write_json(cfg, name, obj):
    out = _out_dir(cfg)
    if out is not None:
        (out / name).write_text(dumps(obj))


def _write_csv(cfg, name, header, rows):
    out = _out_dir(cfg)
    if out is None:
        return
    with open(out / name, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(x) for x in row])


def _fmt(x):
    if isinstance(x, np.generic):
        x = x.item()
    if isinstance(x, float):
        return repr(x)
    return "" if x is None else x


class Clock:
    """Wall-clock timer that reports zeros under ``--fixed-clock``."""

    def __init__(self, fixed: bool):
        self.fixed = fixed
        self.timings: dict[str, float] = {}

    def time(self, name, fun, *a, **kw):
        start = time.perf_counter()
        try:
            return fun(*a, **kw)
        finally:
            self.timings[name] = 0.0 if self.fixed else round(time.perf_counter() - start, 6)

    def stamp(self) -> str:
        if self.fixed:
            return FIXED_TIMESTAMP
        return time.strftime("%Y-%m-%dT%H:%M:%SZ", time.gmtime())


# -- pipeline pieces --------------------------------------------------------------------


def default_theta_grid(cfg: RunConfig) -> list[float]:
    lo, hi = admissible_theta_range(cfg.params)
    inset = 0.02 * (hi - lo)
    return cfg.theta_grid.values(lo + inset, hi - inset)


def ctheta_rows(cfg: RunConfig):
    """Rows (θ, value, spread, verdict, expected region, conforms) of the C(θ) scan."""
    rows = []
    for theta, verdict, est in scan_sign_trichotomy(cfg.params, default_theta_grid(cfg), cfg.quadrature,
                                                    workers=cfg.workers):
        region = classify_theta(cfg.params, theta)
        expected = {POSITIVE_REGION: POSITIVE, NEGATIVE_REGION: NEGATIVE}.get(region)
        conforms = verdict == INDETERMINATE or verdict == expected
        rows.append({
            "theta": theta,
            "value": est.value,
            "spread": est.spread,
            "verdict": verdict,
            "region": region,
            "conforms": conforms,
            "low_confidence": est.low_confidence,
        })
    return rows


def bracket_theta_zero(rows) -> tuple[float, float] | None:
    """Adjacent grid exponents between which the verdict turns from positive to negative."""
    signed = [(r["theta"], r["verdict"]) for r in rows if r["verdict"] != INDETERMINATE and r["theta"] > 0]
    for (a, va), (b, vb) in zip(signed, signed[1:]):
        if va == POSITIVE and vb == NEGATIVE:
            return a, b
    return None


def barrier_checks(cfg: RunConfig, schedule) -> tuple[list[dict], bool]:
    params = cfg.params
    r_grid = cfg.r_grid.values()
    reports = []
    ok = True
    for i, (prev, nxt) in enumerate(zip(schedule.sigmas, schedule.sigmas[1:])):
        rep = verify_step(params, prev, nxt, 1.0, cfg.quadrature, r_grid=r_grid, workers=cfg.workers)
        ok &= rep.empirical_threshold is not None
        reports.append({"check": f"step{i + 1}", "sigma_prev": prev, "sigma_next": nxt, **rep.to_dict()})
    theta, theta_bar = select_theta_bar(params)
    rep = verify_final_barrier(params, theta, theta_bar, 1.0, cfg.quadrature, workers=cfg.workers)
    ok &= rep.empirical_threshold is not None
    reports.append({"check": "final", "theta": theta, "theta_bar": theta_bar, **rep.to_dict()})
    return reports, ok


def oracle_cases(params: ProblemParams) -> list[tuple]:
    """Profiles and radii for spot checks, chosen so the Monte Carlo variance is finite."""
    ex = critical_exponents(params)
    theta = min(0.5 * ex.theta_zero, 0.4 * ex.theta_max)
    theta_bar = 0.25 * min(params.sp / (params.p - 1.0), 1.0)
    return [
        (Power(theta), 1.0),
        (TruncatedPower(theta, 0.5), 1.5),
        (NegativePower(1.0, theta_bar), 2.0),
    ]


def oracle_rows(cfg: RunConfig) -> tuple[list[dict], bool]:
    params = cfg.params
    rows = []
    ok = True
    for k, (profile, r) in enumerate(oracle_cases(params)):
        ev = eval_flap(profile, params, r, cfg.quadrature)
        mc, mc_half = mc_window_sensitivity(profile, params, r, samples=cfg.oracle_samples,
                                            seed=(cfg.seed + k) % 2 ** 64)
        bound = 3.0 * (mc.stderr + ev.error_estimate)
        agree = abs(ev.value - mc.value) <= bound
        row = {
            "profile": profile.to_dict(),
            "r": r,
            "eval": ev.value,
            "eval_error": ev.error_estimate,
            "mc": mc.value,
            "mc_stderr": mc.stderr,
            "mc_agrees": agree,
            "mc_half_window": mc_half.value,
            "mc_half_window_stderr": mc_half.stderr,
            "grid": None,
            "grid_bracket": None,
            "grid_agrees": None,
        }
        if params.N == 2:
            gr = grid_flap(profile, params, r, nodes_per_dim=512)
            row["grid"], row["grid_bracket"] = gr.value, gr.stderr
            row["grid_agrees"] = abs(ev.value - gr.value) <= 3.0 * (gr.stderr + ev.error_estimate) + 1e-12
            agree &= row["grid_agrees"]
        ok &= agree
        rows.append(row)
    return rows, ok


def _profile_label(d: dict) -> str:
    return json.dumps(d, sort_keys=True, separators=(",", ":"))


# -- commands ---------------------------------------------------------------------------


def cmd_classify(cfg, args, clock):
    out = classify(cfg.params).to_dict()
    _write_json(cfg, "classify.json", out)
    print(dumps(out), end="")
    return EXIT_OK


def cmd_exponents(cfg, args, clock):
    out = critical_exponents(cfg.params).to_dict()
    _write_json(cfg, "exponents.json", out)
    print(dumps(out), end="")
    return EXIT_OK


def cmd_ctheta(cfg, args, clock):
    rows = ctheta_rows(cfg)
    _write_csv(cfg, "ctheta.csv", ["theta", "value", "spread", "verdict", "source"],
               [(r["theta"], r["value"], r["spread"], r["verdict"], "estimate_ctheta") for r in rows])
    out = {"params": cfg.params.to_dict(), "rows": rows, "zero_bracket": bracket_theta_zero(rows)}
    _write_json(cfg, "ctheta.json", out)
    print(dumps(out), end="")
    return EXIT_OK if all(r["conforms"] for r in rows) else EXIT_VERIFY


def _profile_from_args(args):
    if args.profile == "power":
        return Power(args.theta)
    if args.profile == "truncated_power":
        return TruncatedPower(args.theta, args.eps0)
    return NegativePower(args.eps, args.theta_bar)


def cmd_eval(cfg, args, clock):
    profile = _profile_from_args(args)
    res = eval_flap(profile, cfg.params, args.r, cfg.quadrature)
    out = {"profile": profile.to_dict(), "r": args.r, **res.to_dict()}
    _write_json(cfg, "eval.json", out)
    print(dumps(out), end="")
    return EXIT_OK


def _schedule_rows(schedule):
    return [(i, sigma, slack, case) for i, sigma, slack, case in schedule.table()]


def cmd_schedule(cfg, args, clock):
    theta_zero = critical_exponents(cfg.params).theta_zero
    target = args.theta_target if args.theta_target is not None else 0.5 * theta_zero
    schedule = build_schedule(cfg.params, target)
    rows = _schedule_rows(schedule)
    _write_csv(cfg, "schedule.csv", ["i", "sigma", "slack", "case"], rows)
    out = schedule.to_dict()
    _write_json(cfg, "schedule.json", out)
    print(dumps(out), end="")
    print(f"{'i':>4} {'sigma':>22} {'slack':>22}  case", file=sys.stderr)
    for i, sigma, slack, case in rows:
        slack_txt = "" if slack is None else repr(slack)
        print(f"{i:>4} {sigma!r:>22} {slack_txt:>22}  {case}", file=sys.stderr)
    return EXIT_OK if all(c > 0.0 for c in schedule.certificates) else EXIT_VERIFY


def _write_margins(cfg, reports):
    rows = []
    for rep in reports:
        for r, lhs, rhs, margin in zip(rep["r_grid"], rep["lhs"], rep["rhs"], rep["margins"]):
            rows.append((r, lhs, rhs, margin, rep.get("check", "")))
    _write_csv(cfg, "margins.csv", ["r", "lhs", "rhs", "margin", "source"], rows)


def cmd_verify_barrier(cfg, args, clock):
    rep = verify_step(cfg.params, args.sigma_prev, args.sigma_next, args.rhs_constant, cfg.quadrature,
                      r_grid=cfg.r_grid.values(), workers=cfg.workers)
    out = {"check": "verify_step", **rep.to_dict()}
    _write_margins(cfg, [out])
    _write_json(cfg, "barrier.json", out)
    print(dumps(out), end="")
    return EXIT_OK if rep.empirical_threshold is not None else EXIT_VERIFY


def cmd_verify_final(cfg, args, clock):
    if args.theta is None or args.theta_bar is None:
        theta, theta_bar = select_theta_bar(cfg.params)
        theta = args.theta if args.theta is not None else theta
        theta_bar = args.theta_bar if args.theta_bar is not None else theta_bar
    else:
        theta, theta_bar = args.theta, args.theta_bar
    condition = final_exponent_condition(cfg.params, theta, theta_bar)
    if not condition < 0.0:
        out = {"check": "verify_final_barrier", "theta": theta, "theta_bar": theta_bar,
               "exponent_condition": condition, "rejected": True}
        print(dumps(out), end="")
        return EXIT_VERIFY
    rep = verify_final_barrier(cfg.params, theta, theta_bar, args.kappa, cfg.quadrature, workers=cfg.workers)
    out = {"check": "verify_final_barrier", "theta": theta, "theta_bar": theta_bar, **rep.to_dict()}
    _write_margins(cfg, [out])
    _write_json(cfg, "barrier.json", out)
    print(dumps(out), end="")
    return EXIT_OK if rep.empirical_threshold is not None else EXIT_VERIFY


_ORACLE_HEADER = ["profile", "r", "eval", "eval_error", "mc", "mc_stderr", "mc_agrees", "mc_half_window",
                  "mc_half_window_stderr", "grid", "grid_bracket", "grid_agrees"]


def _oracle_csv(cfg, rows):
    _write_csv(cfg, "oracle.csv", _ORACLE_HEADER,
               [[_profile_label(r["profile"])] + [r[k] for k in _ORACLE_HEADER[1:]] for r in rows])


def cmd_oracle_check(cfg, args, clock):
    rows, ok = oracle_rows(cfg)
    _oracle_csv(cfg, rows)
    out = {"params": cfg.params.to_dict(), "seed": cfg.seed, "rows": rows}
    _write_json(cfg, "oracle.json", out)
    print(dumps(out), end="")
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_report(cfg, args, clock):
    params = cfg.params
    regime = clock.time("classify", classify, params)
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool": {"name": "fraclap", "version": __version__},
        "generated_at": clock.stamp(),
        "config": cfg.to_dict(),
        "regime": regime.to_dict(),
        "exponents": critical_exponents(params).to_dict(),
    }
    failures = []
    if math.isclose(params.N, params.sp, rel_tol=0.0, abs_tol=1e-12):
        report["ctheta"] = {"skipped": True, "reason": "N = sp"}
    else:
        rows = clock.time("ctheta", ctheta_rows, cfg)
        _write_csv(cfg, "ctheta.csv", ["theta", "value", "spread", "verdict", "source"],
                   [(r["theta"], r["value"], r["spread"], r["verdict"], "estimate_ctheta") for r in rows])
        if not all(r["conforms"] for r in rows):
            failures.append("sign trichotomy mismatch")
        report["ctheta"] = {"source": "estimate_ctheta", "rows": rows, "zero_bracket": bracket_theta_zero(rows)}
    if regime.in_regime:
        theta, theta_bar = select_theta_bar(params)
        target = min(theta, critical_exponents(params).theta_zero)
        schedule = clock.time("schedule", build_schedule, params, target)
        _write_csv(cfg, "schedule.csv", ["i", "sigma", "slack", "case"], _schedule_rows(schedule))
        if not all(c > 0.0 for c in schedule.certificates):
            failures.append("non-positive certificate slack")
        report["schedule"] = {"source": "build_schedule", "skipped": False, **schedule.to_dict()}
        barriers, ok = clock.time("barriers", barrier_checks, cfg, schedule)
        _write_margins(cfg, barriers)
        if not ok:
            failures.append("barrier without empirical threshold")
        report["barriers"] = {"source": "verify_step/verify_final_barrier", "skipped": False, "reports": barriers}
    else:
        reason = "out of regime: " + ", ".join(regime.failed_conditions)
        report["schedule"] = {"skipped": True, "reason": reason}
        report["barriers"] = {"skipped": True, "reason": reason}
    if params.N in (2, 3):
        rows, ok = clock.time("oracle", oracle_rows, cfg)
        _oracle_csv(cfg, rows)
        if not ok:
            failures.append("oracle disagreement")
        report["oracle"] = {"source": "mc_flap/grid_flap", "seed": cfg.seed, "rows": rows}
    else:
        report["oracle"] = {"skipped": True, "reason": "oracle supports N in {2, 3}"}
    report["verification_failures"] = failures
    report["timings"] = dict(clock.timings)
    _write_json(cfg, "report.json", report)
    print(dumps({"in_regime": regime.in_regime, "verification_failures": failures,
                 "output_dir": cfg.output_dir}), end="")
    return EXIT_VERIFY if failures else EXIT_OK


COMMANDS = {
    "classify": cmd_classify,
    "exponents": cmd_exponents,
    "ctheta": cmd_ctheta,
    "eval": cmd_eval,
    "schedule": cmd_schedule,
    "verify-barrier": cmd_verify_barrier,
    "verify-final": cmd_verify_final,
    "oracle-check": cmd_oracle_check,
    "report": cmd_report,
}


# -- argument parsing -------------------------------------------------------------------


def _u64(text):
    value = int(text)
    if not 0 <= value < 2 ** 64:
        raise argparse.ArgumentTypeError(f"seed must be an unsigned 64-bit integer, got {text}")
    return value


def _common(parser):
    g = parser.add_argument_group("run")
    g.add_argument("--config", help="JSON config file")
    g.add_argument("--out", help="output directory for JSON/CSV files")
    g.add_argument("--seed", type=_u64, help="random seed (unsigned 64-bit)")
    g.add_argument("--fixed-clock", action="store_true", help="zero timings and timestamps")
    g.add_argument("--workers", type=int, help="threads for grid evaluations")
    g = parser.add_argument_group("parameters")
    g.add_argument("--N", type=int)
    g.add_argument("--s", type=float)
    g.add_argument("--p", type=float)
    g.add_argument("--t", type=float)
    g.add_argument("--m", type=float)
    g = parser.add_argument_group("quadrature")
    g.add_argument("--rel-tol", type=float)
    g.add_argument("--delta-diag", type=float)
    g.add_argument("--lambda-tail", type=float)
    g.add_argument("--max-panels", type=int)
    g.add_argument("--angular-nodes", type=int)
    g = parser.add_argument_group("grids")
    for axis in ("theta", "r"):
        g.add_argument(f"--{axis}-min", type=float)
        g.add_argument(f"--{axis}-max", type=float)
        g.add_argument(f"--{axis}-count", type=int)
        g.add_argument(f"--{axis}-spacing", choices=("linear", "log"))
    g.add_argument("--samples", type=int, help="Monte Carlo samples per oracle check")


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fraclap", description="Fractional p-Laplacian barrier checks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        _common(p)
        if name == "eval":
            p.add_argument("--profile", choices=("power", "truncated_power", "negative_power"), default="power")
            p.add_argument("--theta", type=float, default=0.5)
            p.add_argument("--eps0", type=float, default=0.5)
            p.add_argument("--eps", type=float, default=1.0)
            p.add_argument("--theta-bar", type=float, default=0.5)
            p.add_argument("--r", type=float, default=1.0)
        elif name == "schedule":
            p.add_argument("--theta-target", type=float)
        elif name == "verify-barrier":
            p.add_argument("--sigma-prev", type=float, required=True)
            p.add_argument("--sigma-next", type=float, required=True)
            p.add_argument("--rhs-constant", type=float, default=1.0)
        elif name == "verify-final":
            p.add_argument("--theta", type=float)
            p.add_argument("--theta-bar", type=float)
            p.add_argument("--kappa", type=float, default=1.0)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        cfg = build_config(args)
        clock = Clock(args.fixed_clock)
        return COMMANDS[args.command](cfg, args, clock)
    except ConfigError as exc:
        print(f"fraclap: config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, ScheduleError, ArithmeticError, OSError, RuntimeError) as exc:
        print(f"fraclap: error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
