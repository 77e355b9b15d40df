"""Command line front end: ``carleman-dsolve <command> --config <path> [--out <dir>]``.

Exit codes: 0 success, 1 unreadable or malformed config, 2 validation
failure, 3 non-convergence, 4 verification failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .carleman import CarlemanSequence, diagnose_class, weight_eval
from .errors import (CarlemanError, ConvergenceError, UnsupportedProblemError, ValidationError)
from .extension import build_extension, dbar_check
from .funcmodel import GridSpec, Jet, handle_from_descriptor, jet_from_descriptor
from .solver import (DifferenceProblem, ExtensionOptions, SolveOptions, derive_coefficients, split_rhs,
                     sum_series, validate_problem)
from .splitting import SplitParams, decay_check, split, split_sum_check

log = logging.getLogger("carleman_dsolve")

COMMANDS = ("check-class", "extend", "split", "solve", "verify", "bench")
EXIT_OK, EXIT_CONFIG, EXIT_INVALID, EXIT_NOCONV, EXIT_VERIFY = 0, 1, 2, 3, 4

_POSITIVE = ("C1", "delta0", "rho", "C0", "tol", "n_cap", "contour_nodes", "a", "B", "cutoff_margin",
             "grid_points", "verify_tol")


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    """Parsed configuration document.

    Sections: ``problem`` (shifts, coefficient descriptors, chi, delta, C),
    ``sequence`` (builtin name, term list or ``{"builtin", "n_max"}``),
    ``numeric`` (solver and quadrature parameters) and ``output``.
    """

    command: str
    problem: dict = field(default_factory=dict)
    sequence: object = "factorial_squared"
    numeric: dict = field(default_factory=dict)
    output: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.command not in COMMANDS:
            raise ConfigError(f"unknown command {self.command!r}; expected one of {COMMANDS}")
        for k in _POSITIVE:
            v = self.numeric.get(k)
            if v is not None and not (isinstance(v, (int, float)) and v > 0):
                raise ConfigError(f"numeric.{k} must be a positive number, got {v!r}")
        fmt = self.output.get("format", "csv")
        if fmt not in ("csv", "json"):
            raise ConfigError("output.format must be 'csv' or 'json'")

    @classmethod
    def from_dict(cls, d: dict, command: str | None = None) -> "RunConfig":
        if not isinstance(d, dict):
            raise ConfigError("config must be a JSON object")
        cmd = command or d.get("command")
        if cmd is None:
            raise ConfigError("no command given")
        return cls(cmd, dict(d.get("problem", {})), d.get("sequence", "factorial_squared"),
                   dict(d.get("numeric", {})), dict(d.get("output", {})))

    def to_dict(self) -> dict:
        return {"command": self.command, "problem": self.problem, "sequence": self.sequence,
                "numeric": self.numeric, "output": self.output}

    # -- builders -----------------------------------------------------------
    def build_chi(self):
        desc = self.problem.get("chi")
        if desc is None:
            raise ConfigError("problem.chi is required")
        return jet_from_descriptor(desc) if desc.get("kind") == "jet" else handle_from_descriptor(desc)

    def build_problem(self) -> DifferenceProblem:
        p = self.problem
        try:
            coeffs = [handle_from_descriptor(c) for c in p["coeffs"]]
            return DifferenceProblem(tuple(p["alphas"]), tuple(coeffs), self.build_chi(),
                                     float(p.get("delta", 1.0)), float(p.get("C", 1.0)),
                                     float(p.get("center", 0.0)))
        except KeyError as exc:
            raise ConfigError(f"problem is missing {exc}") from None

    def sequence_obj(self) -> CarlemanSequence:
        return CarlemanSequence.from_config(self.sequence)

    def solve_options(self) -> SolveOptions:
        n = self.numeric
        area = n.get("area_nodes", 32)
        ar, aa = (area, area) if isinstance(area, int) else tuple(area)
        ext = ExtensionOptions(self.sequence_obj(), float(n.get("B", 1.0)), float(n.get("cutoff_margin", 0.2)))
        return SolveOptions(a=float(n.get("a", 2.0)), tol=float(n.get("tol", 1e-8)), n_cap=int(n.get("n_cap", 200)),
                            C1=n.get("C1"), delta0=n.get("delta0"), contour_nodes=int(n.get("contour_nodes", 64)),
                            area_nodes_radial=int(ar), area_nodes_angular=int(aa),
                            grid_points=int(n.get("grid_points", 129)), extension=ext)

    def grid(self, default: GridSpec) -> GridSpec:
        g = self.numeric.get("grid")
        return default if g is None else GridSpec.from_config(g)


# -- output helpers ------------------------------------------------------------

def _fmt(v: float) -> str:
    return format(float(v), ".17g")


def write_csv(path: Path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for r in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating)) else v for v in r])


def _jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


def write_json(path: Path, obj):
    with open(path, "w") as fh:
        json.dump(_jsonable(obj), fh, indent=2, sort_keys=True)
        fh.write("\n")


class Run:
    def __init__(self, cfg: RunConfig, out: Path):
        self.cfg = cfg
        self.out = out
        self.artifacts: list[str] = []

    def emit_json(self, name, obj):
        write_json(self.out / name, obj)
        self.artifacts.append(name)

    def emit_csv(self, name, header, rows):
        write_csv(self.out / name, header, rows)
        self.artifacts.append(name)

    def emit_table(self, stem, header, rows, summary=None):
        if self.cfg.output.get("format", "csv") == "json":
            self.emit_json(stem + ".json", {"columns": list(header), "rows": [list(r) for r in rows],
                                            "summary": summary or {}})
        else:
            self.emit_csv(stem + ".csv", header, rows)
            if summary is not None:
                self.emit_json(stem + "_summary.json", summary)


# -- commands ------------------------------------------------------------------

def cmd_check_class(run: Run) -> int:
    M = run.cfg.sequence_obj()
    diag = diagnose_class(M).as_dict()
    xs = [float(x) for x in run.cfg.numeric.get("weight_points", [0.05, 0.1, 0.5, 1.0, 2.0])]
    diag["weights"] = [{"x": x, **weight_eval(M, x)._asdict()} for x in xs]
    run.emit_json("class.json", diag)
    return EXIT_OK


def _jet_for(run: Run) -> Jet:
    chi = run.cfg.build_chi()
    if isinstance(chi, Jet):
        return chi
    radius = float(run.cfg.numeric.get("radius", 0.5))
    return Jet.from_handle(chi, radius, int(run.cfg.numeric.get("n_max", 40)))


def cmd_extend(run: Run) -> int:
    n = run.cfg.numeric
    ext = build_extension(_jet_for(run), run.cfg.sequence_obj(), float(n.get("B", 1.0)),
                          float(n.get("cutoff_margin", 0.2)))
    r0 = ext.plateau_radius
    rng = np.random.default_rng(int(n.get("check_seed", 0)))
    checks = []
    for _ in range(int(n.get("check_points", 20))):
        z = complex(rng.uniform(-0.9 * r0, 0.9 * r0), rng.uniform(-0.5 * r0, 0.5 * r0))
        c = dbar_check(ext, z)
        checks.append({"z": z, "analytic": c.analytic, "numeric": c.numeric,
                       "discrepancy": c.discrepancy, "reliable": c.reliable})
    xs = np.linspace(-ext.support_radius, ext.support_radius, 41)
    rows = [(x, v.real, v.imag) for x, v in zip(xs, np.asarray(ext.F(xs + 0j)))]
    run.emit_table("extension", ["x", "re_F", "im_F"], rows, {
        "order": ext.order, "support_radius": ext.support_radius, "plateau_radius": r0,
        "bound_A": ext.bound_constants.A, "bound_B": ext.bound_constants.B,
        "thresholds": [float(t) for t in ext.thresholds], "dbar_checks": checks})
    return EXIT_OK


def cmd_split(run: Run) -> int:
    n = run.cfg.numeric
    params = SplitParams(float(n.get("rho", 0.5)), float(n.get("C0", 1.0)), int(n.get("contour_nodes", 64)))
    chi = run.cfg.build_chi()
    src = chi
    if isinstance(chi, Jet):
        src = build_extension(chi, run.cfg.sequence_obj(), float(n.get("B", 1.0)),
                              float(n.get("cutoff_margin", 0.2)), sample=False)
    pair = split(src, params)
    grid = run.cfg.grid(GridSpec(-0.8 * params.rho, 0.8 * params.rho, 33))
    err = split_sum_check(pair, src, grid)
    xs_decay = np.array(n.get("decay_points", list(np.arange(1.0, 4.01, 0.5))), dtype=float)
    fit = decay_check(pair, params, xs_decay)
    xs = grid.points()
    fp, fm = pair.f_plus(xs), pair.f_minus(xs)
    rows = [(x.real, a.real, a.imag, b.real, b.imag) for x, a, b in zip(xs, fp, fm)]
    run.emit_table("split", ["x", "re_f_plus", "im_f_plus", "re_f_minus", "im_f_minus"], rows, {
        "sum_check": err, "decay": fit._asdict(), "D0_estimate": pair.D0_estimate})
    return EXIT_OK


def _solve(run: Run, timings: dict | None = None):
    cfg = run.cfg
    p = cfg.build_problem()
    opts = cfg.solve_options()
    t0 = time.perf_counter()
    report = validate_problem(p)
    if not report.passed:
        raise ValidationError("; ".join(report.failures), report)
    dc = derive_coefficients(p, opts.C1, opts.delta0)
    pair = split_rhs(p, dc, opts.contour_nodes, opts.area_nodes_radial, opts.area_nodes_angular, opts.extension)
    t1 = time.perf_counter()
    sol = sum_series(p, dc, opts.a, opts.tol, opts.n_cap, chi_split=pair, grid_points=opts.grid_points)
    t2 = time.perf_counter()
    grid = cfg.grid(GridSpec(p.center - opts.a, p.center + opts.a, 65))
    xs = grid.points().real
    phi_vals = sol.phi(xs)
    t3 = time.perf_counter()
    point_res = _pointwise_residual(p, sol.phi, xs)
    t4 = time.perf_counter()
    if timings is not None:
        timings.update({"split": t1 - t0, "recurrence": t2 - t1, "summation": t3 - t2, "residual": t4 - t3})
    return p, report, sol, xs, phi_vals, point_res


def _pointwise_residual(p: DifferenceProblem, phi, xs) -> np.ndarray:
    total = -p.chi_values(xs)
    for a, al in zip(p.coeffs, p.alphas):
        total = total + np.asarray(a(xs.astype(complex))) * np.asarray(phi(xs + al), dtype=complex)
    return np.abs(total)


def _emit_solution(run: Run, report, sol, xs, phi_vals, point_res):
    summary = {
        "truncation_N": sol.truncation_N, "Na": sol.Na, "tail_estimate": sol.tail_estimate,
        "interval_halfwidth": sol.interval_halfwidth, "max_residual": float(point_res.max()),
        "trace_rate_g": sol.trace_rate("g"), "trace_rate_h": sol.trace_rate("h"),
        "per_term_sups": [e.as_dict() for e in sol.per_term_sups],
        "validation": report.as_dict(),
    }
    rows = [(x, v.real, v.imag, r) for x, v, r in zip(xs, phi_vals, point_res)]
    run.emit_table("solution", ["x", "re_phi", "im_phi", "residual"], rows, summary)
    if run.cfg.output.get("emit_plot_data", True):
        plot = []
        for e in sol.per_term_sups + sol.trace_extra:
            ug = math.log(-e.log_sup_g) if e.log_sup_g < 0 and math.isfinite(e.log_sup_g) else float("nan")
            uh = math.log(-e.log_sup_h) if e.log_sup_h < 0 and math.isfinite(e.log_sup_h) else float("nan")
            plot.append((e.n, ug, uh))
        run.emit_csv("plot_data.csv", ["n", "loglog_sup_g", "loglog_sup_h"], plot)
    return summary


def cmd_solve(run: Run) -> int:
    _emit_solution(run, *_solve(run)[1:])
    return EXIT_OK


def cmd_verify(run: Run) -> int:
    p, report, sol, xs, phi_vals, point_res = _solve(run)
    summary = _emit_solution(run, report, sol, xs, phi_vals, point_res)
    limit = float(run.cfg.numeric.get("verify_tol", 10 * sol.tol))
    checks = {"residual": {"value": float(point_res.max()), "limit": limit,
                           "passed": bool(point_res.max() <= limit)},
              "tail": {"value": sol.tail_estimate, "limit": sol.tol, "passed": bool(sol.tail_estimate < sol.tol)}}
    rho = sol.chi_split.params.rho
    src = sol.chi_split.source
    err = split_sum_check(sol.chi_split, src, GridSpec(p.center - 0.8 * rho, p.center + 0.8 * rho, 33))
    checks["split_sum"] = {"value": err, "limit": limit, "passed": bool(err <= limit)}
    ok = all(c["passed"] for c in checks.values())
    run.emit_json("verify.json", {"passed": ok, "checks": checks, "truncation_N": summary["truncation_N"]})
    return EXIT_OK if ok else EXIT_VERIFY


def cmd_bench(run: Run) -> int:
    timings: dict = {}
    _, _, sol, _, _, point_res = _solve(run, timings)
    run.emit_json("bench.json", {"timings_s": timings, "truncation_N": sol.truncation_N,
                                 "cache_entries": sol.cache_size, "max_residual": float(point_res.max())})
    return EXIT_OK


_DISPATCH = {"check-class": cmd_check_class, "extend": cmd_extend, "split": cmd_split,
             "solve": cmd_solve, "verify": cmd_verify, "bench": cmd_bench}


def run(cfg: RunConfig, out: Path) -> int:
    """Execute one command, write artifacts and the manifest, return the exit code."""
    out.mkdir(parents=True, exist_ok=True)
    r = Run(cfg, out)
    t0 = time.perf_counter()
    error = None
    try:
        code = _DISPATCH[cfg.command](r)
    except (ValidationError, UnsupportedProblemError) as exc:
        report = getattr(exc, "report", None)
        r.emit_json("validation_report.json", {"error": str(exc),
                                               "report": report.as_dict() if report is not None else None})
        error, code = str(exc), EXIT_INVALID
    except ConvergenceError as exc:
        r.emit_json("trace.json", {"error": str(exc), "per_term_sups": exc.trace})
        error, code = str(exc), EXIT_NOCONV
    except (CarlemanError, ConfigError, KeyError, TypeError, ValueError) as exc:
        error, code = f"{type(exc).__name__}: {exc}", EXIT_CONFIG
    if error:
        print(f"carleman-dsolve: {error}", file=sys.stderr)
    write_json(out / "manifest.json", {
        "command": cfg.command, "config": cfg.to_dict(), "version": __version__,
        "wall_time_s": time.perf_counter() - t0, "exit_code": code, "artifacts": sorted(r.artifacts),
        "error": error, "seeded": False,
    })
    return code


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="carleman-dsolve",
                                 description="Series solutions of linear difference equations with shifts.")
    ap.add_argument("command", choices=COMMANDS)
    ap.add_argument("--config", required=True, help="JSON configuration document")
    ap.add_argument("--out", help="output directory (default: output.path from the config, else ./out)")
    ap.add_argument("-v", "--verbose", action="store_true")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        with open(args.config) as fh:
            raw = json.load(fh)
        cfg = RunConfig.from_dict(raw, args.command)
    except (OSError, json.JSONDecodeError, ConfigError) as exc:
        print(f"carleman-dsolve: cannot read config {args.config}: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    out = Path(args.out or cfg.output.get("path", "out"))
    code = run(cfg, out)
    log.info("exit code %d, artifacts in %s", code, out)
    return code


if __name__ == "__main__":
    sys.exit(main())
