"""Acceptance gate: one PASS/FAIL line per criterion (run with ``pytest -s`` or as a script)."""

import itertools
import json
import math
import time

import numpy as np
import pytest

from carleman_dsolve.carleman import CarlemanSequence
from carleman_dsolve.cli import main as cli_main
from carleman_dsolve.errors import UnsupportedProblemError
from carleman_dsolve.extension import build_extension, dbar_check, plateau_sample
from carleman_dsolve.funcmodel import GridSpec, Jet, constant, exp_i, trig
from carleman_dsolve.solver import (DifferenceProblem, RecurrenceCache, SolveOptions, derive_coefficients,
                                    g_recurrence_eval, h_recurrence_eval, residual, solve, split_rhs)
from carleman_dsolve.splitting import SplitParams, decay_check, split, split_sum_check

try:
    from conftest import ACCEPTANCE_LINES
except ImportError:  # run as a script
    ACCEPTANCE_LINES = []

COS = trig(cos=[(1, 1)])


def report(criterion, ok, detail, elapsed, limit):
    ok = bool(ok) and elapsed < limit
    line = f"CRITERION {criterion}: {'PASS' if ok else 'FAIL'}  {detail}  [{elapsed:.2f}s < {limit:g}s]"
    print(line)
    ACCEPTANCE_LINES.append(line)
    assert ok, line


def test_c1_splitting_identity():
    t = time.perf_counter()
    params = SplitParams(0.5, 1.0, contour_nodes=64)
    grid = GridSpec(-0.4, 0.4, 33)
    errs = {name: split_sum_check(split(f, params), f, grid) for name, f in (("1", constant(1.0)),
                                                                           ("e^iz", exp_i(1.0)))}
    el = time.perf_counter() - t
    report(1, max(errs.values()) <= 1e-8, f"max|f-f+-f-| = {max(errs.values()):.2e} (limit 1e-8)", el, 1.0)


def test_c2_splitting_decay():
    t = time.perf_counter()
    params = SplitParams(0.5, 1.0)
    fit = decay_check(split(constant(1.0), params), params, np.arange(1.0, 4.01, 0.5))
    el = time.perf_counter() - t
    ok = fit.bound_satisfied and math.isfinite(fit.fitted_D0) and 0.9 <= fit.fitted_inner_exponent <= 1.1
    report(2, ok, f"inner exponent {fit.fitted_inner_exponent:.4f} in [0.9, 1.1], D0 = {fit.fitted_D0:.4g}, "
                  f"bound {'holds' if fit.bound_satisfied else 'fails'}", el, 5.0)


def test_c3_extension_bound():
    t = time.perf_counter()
    jet = Jet(lambda n, x: np.exp(np.asarray(x, dtype=float)), 0.5, 61, name="exp")
    ext = build_extension(jet, CarlemanSequence.builtin("factorial_squared"), B=1.0, cutoff_margin=0.2)
    sup_ratio = float(np.max(ext.bound_ratio_log(plateau_sample(ext))))
    rng = np.random.default_rng(20240501)
    r = ext.plateau_radius
    pts = []
    while len(pts) < 50:
        z = complex(rng.uniform(-r, r), rng.uniform(-r, r))
        if abs(z) < r and z.imag != 0:
            pts.append(z)
    worst = max(dbar_check(ext, z, h=1e-5).discrepancy for z in pts)
    el = time.perf_counter() - t
    ok = math.isfinite(sup_ratio) and worst <= 1e-6
    report(3, ok, f"sup log(|dbarF|/H_M) = {sup_ratio:.3f} (finite), max FD discrepancy {worst:.2e} (limit 1e-6)",
           el, 5.0)


@pytest.fixture(scope="module")
def constant_run():
    p = DifferenceProblem((-1, 0, 1), (constant(2), constant(1), constant(2)), COS, 1.0, 1.0)
    t = time.perf_counter()
    phi, sol = solve(p, SolveOptions(a=2.0, tol=1e-8))
    xs = np.linspace(-2, 2, 65)
    vals = phi(xs)
    res = residual(p, phi, GridSpec(-2, 2, 65))
    return p, phi, sol, xs, vals, res, time.perf_counter() - t


def test_c4a_constant_coefficient_residual(constant_run):
    _, _, sol, _, _, res, el = constant_run
    report("4 (residual)", res <= 1e-6, f"residual {res:.2e} (limit 1e-6), N = {sol.truncation_N}", el, 60.0)


def test_c4b_constant_coefficient_oracle(constant_run):
    # expected to fail: cos(x)/(1 + 4 cos 1) is one of many bounded solutions
    # (1 + 4 cos(l) = 0 has real roots), and the series picks another one
    _, _, _, xs, vals, _, el = constant_run
    diff = float(np.max(np.abs(vals - np.cos(xs) / (1 + 4 * math.cos(1)))))
    report("4 (oracle)", diff <= 1e-6, f"max|phi - cos x/(1+4cos1)| = {diff:.3e} (limit 1e-6)", el, 60.0)


def test_c5_double_exponential_decay(constant_run):
    _, _, sol, _, _, _, el = constant_run
    target = sol.derived.C1 * sol.derived.beta2
    slope = sol.trace_rate("g")
    report(5, abs(slope - target) <= 0.25 * target,
           f"slope of log(-log sup|g_n|) = {slope:.4f}, target C1*beta2 = {target:g} (+-25%)", el, 60.0)


def test_c6_variable_coefficient_residual():
    t = time.perf_counter()
    coeffs = (trig(const=2, sin=[(1, 0.1)]), trig(cos=[(1, 0.5)]), constant(2))
    p = DifferenceProblem((-1, 0, 1), coeffs, COS, 0.5, 1.0)
    phi, sol = solve(p, SolveOptions(a=3.0, tol=1e-8))
    res = residual(p, phi, GridSpec(-3, 3, 121))
    el = time.perf_counter() - t
    report(6, res <= 1e-5, f"residual over [-3, 3] = {res:.2e} (limit 1e-5), N = {sol.truncation_N}", el, 120.0)


def test_c7_degenerate_gates(tmp_path):
    times, oks = [], []
    t = time.perf_counter()
    p = DifferenceProblem((-1, 0, 1), (constant(2), constant(1), constant(2)), constant(0.0), 1.0, 1.0)
    phi, _ = solve(p)
    oks.append(bool(np.all(phi(np.linspace(-2, 2, 17)) == 0)))
    times.append(time.perf_counter() - t)

    t = time.perf_counter()
    cfg = {"problem": {"alphas": [-1, 0, 1], "delta": 0.5, "C": 1.0,
                       "coeffs": [{"kind": "poly", "coeffs": [0, 1]}, {"kind": "const", "value": 1},
                                  {"kind": "const", "value": 2}],
                       "chi": {"kind": "trig", "cos": [[1, 1]]}}}
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    oks.append(cli_main(["solve", "--config", str(path), "--out", str(tmp_path / "o")]) == 2)
    times.append(time.perf_counter() - t)

    t = time.perf_counter()
    try:
        DifferenceProblem((0, 1), (constant(1), constant(1)), COS, 1.0, 1.0)
        oks.append(False)
    except UnsupportedProblemError:
        oks.append(True)
    times.append(time.perf_counter() - t)
    report(7, all(oks), f"zero rhs exact: {oks[0]}, a1 zero -> exit 2: {oks[1]}, q = 2 rejected: {oks[2]}",
           max(times), 1.0)


def _paths(n, z, shifts, coeffs, base):
    total = 0j
    for path in itertools.product(range(len(shifts)), repeat=n):
        w, y = 1 + 0j, complex(z)
        for j in path:
            w *= complex(coeffs[j](y))
            y += shifts[j]
        total += w * base(y)
    return total


def test_c8_recurrence_oracle():
    t = time.perf_counter()
    cases = [((-1, 0, 1), (constant(2), trig(cos=[(1, 0.5)]), trig(const=2, sin=[(1, 0.1)]))),
             ((-1, -0.3, 0.4, 1.0), (constant(3), trig(const=0.5, cos=[(2, 0.2)]), constant(-0.7), constant(2)))]
    worst = 0.0
    for alphas, coeffs in cases:
        p = DifferenceProblem(alphas, coeffs, COS, 0.5, 1.0)
        dc = derive_coefficients(p)
        pair = split_rhs(p, dc)
        cache = RecurrenceCache()
        gb = lambda y: complex(pair.continued_plus(y)) / complex(dc.a1(y))  # noqa: E731
        hb = lambda y: complex(pair.continued_minus(y)) / complex(dc.aq(y))  # noqa: E731
        for n in range(7):
            for z in (-1.3, 0.0, 0.8):
                for got, ref in ((g_recurrence_eval(n, z, dc, pair, cache), _paths(n, z, dc.betas, dc.b, gb)),
                                 (h_recurrence_eval(n, z, dc, pair, cache),
                                  _paths(n, z, [-g for g in dc.gammas], dc.c, hb))):
                    worst = max(worst, abs(got - ref) / max(abs(ref), 1e-300))
    el = time.perf_counter() - t
    report(8, worst <= 1e-12, f"max relative gap memo vs path enumeration = {worst:.2e} (limit 1e-12)", el, 10.0)


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main([__file__, "-q", "-s"]))
