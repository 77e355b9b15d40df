"""Series solution of ``sum_j a_j(x) phi(x + alpha_j) = chi(x)``.

The right-hand side is split as ``chi = chi_+ + chi_-`` with ``chi_+`` decaying
to the right and ``chi_-`` to the left. Two shift recurrences

    g_0 = chi_+ / a_1,   g_{n+1}(z) = sum_{j>=2}  b_j(z) g_n(z + beta_j)
    h_0 = chi_- / a_q,   h_{n+1}(z) = sum_{j<=q-1} c_j(z) h_n(z - gamma_j)

push the data into the decay region, so ``G_+ = sum g_n`` and ``G_- = sum h_n``
converge double-exponentially. Then

    phi(x) = G_+(x - alpha_1) + G_-(x - alpha_q).

All recurrence values are carried as complex logarithms, because the terms
fall below the double range long before the series is considered converged.
"""

from __future__ import annotations

import cmath
import math
import threading
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.special import logsumexp

from .carleman import CarlemanSequence
from .errors import (CacheBudgetError, ConvergenceError, DomainError, ExpensiveComputationWarning,
                     GrowthConditionWarning, InvalidInputError, InvalidParamsError, NoSolutionError,
                     UnsupportedProblemError, ValidationError)
from .extension import build_extension
from .funcmodel import NEG_INF, AnalyticHandle, GridSpec, Jet, log_scale_eval, ratio, wrap_phase
from .splitting import SplitPair, SplitParams, split

_EXPENSIVE_NA = 50
_KEY_SCALE = 1e13


@dataclass(frozen=True, eq=False)
class DifferenceProblem:
    """An instance of the difference equation.

    Parameters
    ----------
    alphas : sequence of float
        Strictly increasing shifts ``alpha_1 < ... < alpha_q``, ``q >= 3``.
    coeffs : sequence of AnalyticHandle
        ``a_1, ..., a_q``, holomorphic on ``|Im z| < delta``.
    chi : AnalyticHandle or Jet
        Right-hand side. A jet must be evaluable (order 0) at every real point.
    delta : float
        Strip half-width.
    C : float
        Growth constant of the coefficient condition.
    center : float
        Centre of the splitting disk. Translating the whole problem by ``x0``
        and moving the centre along translates the constructed solution.
    """

    alphas: tuple
    coeffs: tuple
    chi: object
    delta: float
    C: float
    center: float = 0.0

    def __post_init__(self):
        alphas = tuple(float(a) for a in self.alphas)
        coeffs = tuple(self.coeffs)
        if len(alphas) != len(coeffs):
            raise InvalidInputError(f"{len(alphas)} shifts but {len(coeffs)} coefficients")
        if len(alphas) < 3:
            raise UnsupportedProblemError(
                f"q = {len(alphas)}: only q >= 3 is supported (the cases q = 1, 2 are classical)")
        if any(b <= a for a, b in zip(alphas, alphas[1:])):
            raise InvalidInputError(f"shifts must be strictly increasing, got {alphas}")
        if not all(isinstance(c, AnalyticHandle) for c in coeffs):
            raise InvalidInputError("coefficients must be AnalyticHandle instances")
        if not isinstance(self.chi, (AnalyticHandle, Jet)):
            raise InvalidInputError("chi must be an AnalyticHandle or a Jet")
        if not (self.delta > 0 and self.C > 0):
            raise InvalidInputError("delta and C must be positive")
        object.__setattr__(self, "alphas", alphas)
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def q(self) -> int:
        return len(self.alphas)

    def chi_values(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if isinstance(self.chi, Jet):
            return self.chi.value(x)
        return np.asarray(self.chi(x.astype(complex)), dtype=complex)

    def translated(self, x0: float) -> "DifferenceProblem":
        """The problem with coefficients and right-hand side moved right by ``x0``."""
        chi = self.chi.shifted(-x0)
        return DifferenceProblem(self.alphas, tuple(a.shifted(-x0) for a in self.coeffs), chi,
                                 self.delta, self.C, self.center + x0)


@dataclass
class ValidationReport:
    passed: bool
    growth_ok: bool
    min_abs_a1: float
    min_abs_aq: float
    argmin_a1: complex
    argmin_aq: complex
    log_growth_sups: dict
    failures: list = field(default_factory=list)

    def as_dict(self) -> dict:
        def cplx(z):
            return [z.real, z.imag]
        return {
            "passed": self.passed,
            "growth_ok": self.growth_ok,
            "min_abs_a1": self.min_abs_a1,
            "min_abs_aq": self.min_abs_aq,
            "argmin_a1": cplx(self.argmin_a1),
            "argmin_aq": cplx(self.argmin_aq),
            "log_growth_sups": {str(k): v for k, v in self.log_growth_sups.items()},
            "failures": list(self.failures),
        }


def default_sample_grid(p: DifferenceProblem, width: float = 8.0) -> np.ndarray:
    xs = p.center + np.linspace(-width, width, int(16 * width) + 1)
    ys = p.delta * np.arange(-3, 4) * 0.3
    X, Y = np.meshgrid(xs, ys)
    return (X + 1j * Y).ravel()


def validate_problem(p: DifferenceProblem, sample_grid=None, widths=(2.0, 4.0, 8.0)) -> ValidationReport:
    """Sampled checks of the hypotheses.

    Hard checks: every coefficient is holomorphic on the strip and ``a_1``,
    ``a_q`` stay away from zero (``> 1e-9``) on the sample. The growth
    condition is advisory: its sampled sup over nested grids of increasing
    width must not increase, otherwise ``growth_ok`` is false and a
    :class:`GrowthConditionWarning` is issued.
    """
    failures = []
    for j, a in enumerate(p.coeffs, start=1):
        if a.strip_halfwidth < p.delta:
            failures.append(f"a_{j} is only holomorphic on |Im z| < {a.strip_halfwidth:g}, need {p.delta:g}")
    pts = default_sample_grid(p, max(widths)) if sample_grid is None else np.asarray(sample_grid, dtype=complex)

    def min_abs(a):
        with np.errstate(all="ignore"):
            v = np.abs(np.asarray(a(pts), dtype=complex))
        v = np.where(np.isfinite(v), v, np.inf)
        i = int(np.argmin(v))
        return float(v[i]), complex(pts[i])

    m1, z1 = min_abs(p.coeffs[0])
    mq, zq = min_abs(p.coeffs[-1])
    if not m1 > 1e-9:
        failures.append(f"a_1 vanishes (|a_1| = {m1:.3g}) at sample point z = {z1.real:g}{z1.imag:+g}i")
    if not mq > 1e-9:
        failures.append(f"a_q vanishes (|a_q| = {mq:.3g}) at sample point z = {zq.real:g}{zq.imag:+g}i")

    log_growth = {}
    growth_ok = True
    if not failures:
        with np.errstate(all="ignore"):
            logs = [np.asarray(log_scale_eval(a, pts)[0], dtype=float) for a in p.coeffs]
            l1, lq = logs[0], logs[-1]
            terms = [l - l1 for l in logs[1:]] + [l - lq for l in logs[:-1]] + [-l1, -lq]
            log_expr = logsumexp(np.vstack(terms), axis=0) - np.exp(p.C * np.abs(pts.real))
        for w in sorted(widths):
            inside = np.abs(pts.real - p.center) <= w + 1e-12
            log_growth[w] = float(np.max(log_expr[inside])) if np.any(inside) else -math.inf
        vals = [log_growth[w] for w in sorted(widths)]
        growth_ok = all(np.isfinite(vals)) and all(b <= a + 1e-6 for a, b in zip(vals, vals[1:]))
        if not growth_ok:
            warnings.warn(f"sampled growth expression increases with the grid width: {log_growth}",
                          GrowthConditionWarning, stacklevel=2)
    return ValidationReport(not failures, bool(growth_ok), m1, mq, z1, zq, log_growth, failures)


@dataclass(frozen=True, eq=False)
class DerivedCoefficients:
    """Shift gaps, normalised coefficients and split constants."""

    betas: tuple        # beta_j, j = 2..q
    gammas: tuple       # gamma_j, j = 1..q-1
    b: tuple            # -a_j / a_1, j = 2..q
    c: tuple            # -a_j / a_q, j = 1..q-1
    delta0: float
    C1: float
    a1: AnalyticHandle
    aq: AnalyticHandle

    @property
    def beta2(self) -> float:
        return self.betas[0]

    @property
    def gamma_last(self) -> float:
        """``gamma_{q-1}``, the smallest left shift."""
        return self.gammas[-1]


def derive_coefficients(p: DifferenceProblem, C1: float | None = None,
                        delta0: float | None = None) -> DerivedCoefficients:
    """``beta_j, gamma_j, b_j, c_j`` and the constants ``C1 > C``, ``0 < delta0 < min(delta, pi/(2 C1))``.

    Defaults: ``C1 = C + 1``, ``delta0 = min(delta, pi/(2 C1)) / 2``.
    """
    C1 = p.C + 1.0 if C1 is None else float(C1)
    if not C1 > p.C:
        raise InvalidParamsError(f"C1 = {C1:g} must exceed C = {p.C:g}")
    cap = min(p.delta, math.pi / (2 * C1))
    delta0 = 0.5 * cap if delta0 is None else float(delta0)
    if not 0 < delta0 < cap:
        raise InvalidParamsError(f"delta0 = {delta0:g} must lie in (0, {cap:g})")
    al, a = p.alphas, p.coeffs
    betas = tuple(x - al[0] for x in al[1:])
    gammas = tuple(al[-1] - x for x in al[:-1])
    b = tuple(ratio(aj, a[0], -1.0) for aj in a[1:])
    c = tuple(ratio(aj, a[-1], -1.0) for aj in a[:-1])
    return DerivedCoefficients(betas, gammas, b, c, delta0, C1, a[0], a[-1])


@dataclass(frozen=True)
class ExtensionOptions:
    """How a jet right-hand side is extended before splitting."""

    sequence: CarlemanSequence = field(default_factory=lambda: CarlemanSequence.builtin("factorial_squared"))
    B: float = 1.0
    cutoff_margin: float = 0.2


def split_rhs(p: DifferenceProblem, dc: DerivedCoefficients, contour_nodes: int = 64,
              area_nodes_radial: int = 32, area_nodes_angular: int = 32,
              extension: ExtensionOptions | None = None) -> SplitPair:
    """Split ``chi`` on the disk of radius ``delta0`` with kernel rate ``C1``."""
    params = SplitParams(dc.delta0, dc.C1, contour_nodes, area_nodes_radial, area_nodes_angular)
    chi = p.chi
    if isinstance(chi, Jet):
        if p.center != 0:
            raise InvalidInputError("jet right-hand sides are split at centre 0 only")
        if chi.radius + 0.25 * (extension or ExtensionOptions()).cutoff_margin < dc.delta0:
            raise DomainError("jet base interval does not cover the splitting disk")
        opts = extension or ExtensionOptions()
        chi = build_extension(chi, opts.sequence, opts.B, opts.cutoff_margin, sample=False)
    return split(chi, params, center=p.center)


# ---------------------------------------------------------------------------
# recurrences
# ---------------------------------------------------------------------------

def _key(z: complex) -> tuple:
    return (round(z.real * _KEY_SCALE), round(z.imag * _KEY_SCALE))


def clog_sum(logs: Sequence[complex]) -> complex:
    """Complex log of ``sum exp(logs)``, stable for very negative real parts."""
    finite = [c for c in logs if c.real != -math.inf]
    if not finite:
        return NEG_INF
    m = max(c.real for c in finite)
    s = sum(cmath.exp(c - m) for c in finite)
    if s == 0:
        return NEG_INF
    out = m + cmath.log(s)
    return complex(out.real, float(wrap_phase(out.imag)))


class RecurrenceCache:
    """Memo table for recurrence values keyed by ``(tag, level, quantised point)``.

    Dictionary reads and writes are atomic under the interpreter lock; a race
    only recomputes a value-identical entry. The budget check takes a lock.
    """

    def __init__(self, max_entries: int = 5_000_000):
        self.max_entries = int(max_entries)
        self._data: dict = {}
        self._lock = threading.Lock()

    def __len__(self):
        return len(self._data)

    def get(self, key):
        return self._data.get(key)

    def put(self, key, value):
        if len(self._data) >= self.max_entries:
            with self._lock:
                if len(self._data) >= self.max_entries:
                    raise CacheBudgetError(
                        f"recurrence cache exceeded {self.max_entries} entries; "
                        "lower n_cap or use a coarser grid")
        self._data[key] = value

    def clear(self):
        self._data.clear()


class ShiftRecurrence:
    """``u_0 = base``, ``u_{n+1}(z) = sum_j coef_j(z) u_n(z + shift_j)`` in log space."""

    def __init__(self, tag: str, shifts, coeffs: Sequence[AnalyticHandle], base_clog: Callable,
                 cache: RecurrenceCache):
        self.tag = tag
        self.shifts = tuple(float(s) for s in shifts)
        self.coeffs = tuple(coeffs)
        self.base_clog = base_clog
        self.cache = cache
        self._coef_logs: dict = {}

    def _coef(self, z: complex, k) -> tuple:
        c = self._coef_logs.get(k)
        if c is None:
            c = tuple(a.clog(z) for a in self.coeffs)
            self._coef_logs[k] = c
        return c

    def clog(self, n: int, z: complex) -> complex:
        z = complex(z)
        k = _key(z)
        key = (self.tag, n, k)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if n == 0:
            val = complex(self.base_clog(z))
        else:
            coefs = self._coef(z, k)
            val = clog_sum([cl + self.clog(n - 1, z + s) for cl, s in zip(coefs, self.shifts)])
        self.cache.put(key, val)
        return val

    def value(self, n: int, z: complex) -> complex:
        c = self.clog(n, z)
        return 0j if c.real == -math.inf else cmath.exp(c)


def _plus_recurrence(dc: DerivedCoefficients, chi_split: SplitPair, cache: RecurrenceCache) -> ShiftRecurrence:
    a1 = dc.a1
    return ShiftRecurrence("g", dc.betas, dc.b,
                           lambda z: complex(chi_split.continued_clog_plus(z)) - a1.clog(z), cache)


def _minus_recurrence(dc: DerivedCoefficients, chi_split: SplitPair, cache: RecurrenceCache) -> ShiftRecurrence:
    aq = dc.aq
    return ShiftRecurrence("h", [-g for g in dc.gammas], dc.c,
                           lambda z: complex(chi_split.continued_clog_minus(z)) - aq.clog(z), cache)


def g_recurrence_eval(n: int, z: complex, dc: DerivedCoefficients, chi_plus: SplitPair,
                      cache: RecurrenceCache | None = None) -> complex:
    """``g_n(z)`` with ``g_0 = chi_+ / a_1`` and right shifts ``beta_j``."""
    return _plus_recurrence(dc, chi_plus, cache if cache is not None else RecurrenceCache()).value(n, z)


def h_recurrence_eval(n: int, z: complex, dc: DerivedCoefficients, chi_minus: SplitPair,
                      cache: RecurrenceCache | None = None) -> complex:
    """``h_n(z)`` with ``h_0 = chi_- / a_q`` and left shifts ``gamma_j``."""
    return _minus_recurrence(dc, chi_minus, cache if cache is not None else RecurrenceCache()).value(n, z)


def compute_Na(a: float, dc: DerivedCoefficients) -> int:
    """Smallest ``n >= 1`` with ``n beta_2 > a + delta0``, ``n gamma_{q-1} > a + delta0``
    and ``(beta_2 + gamma_{q-1}) n >= a``."""
    if not a > 0:
        raise InvalidInputError("a must be positive")
    reach = a + dc.delta0
    n = max(1, math.floor(reach / dc.beta2) + 1, math.floor(reach / dc.gamma_last) + 1,
            math.ceil(a / (dc.beta2 + dc.gamma_last)))
    if n > _EXPENSIVE_NA:
        warnings.warn(f"N_a = {n}: the recurrences will be deep", ExpensiveComputationWarning, stacklevel=2)
    return n


# ---------------------------------------------------------------------------
# summation
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TraceEntry:
    n: int
    log_sup_g: float
    log_sup_h: float

    @property
    def sup_g(self) -> float:
        return math.exp(self.log_sup_g) if self.log_sup_g > -745 else 0.0

    @property
    def sup_h(self) -> float:
        return math.exp(self.log_sup_h) if self.log_sup_h > -745 else 0.0

    def as_dict(self) -> dict:
        return {"n": self.n, "log_sup_g": self.log_sup_g, "log_sup_h": self.log_sup_h,
                "sup_g": self.sup_g, "sup_h": self.sup_h}


def _loglog(log_sup: float) -> float:
    """``log(-log sup)``; nan where undefined (sup >= 1 or sup == 0)."""
    if log_sup == -math.inf or not log_sup < 0:
        return math.nan
    return math.log(-log_sup)


def tail_rate(trace: Sequence[TraceEntry], start: int, side: str = "g") -> tuple[float, float]:
    """Least-squares line ``log(-log sup_n) ~ intercept + slope n`` over ``n >= start``.

    Returns ``(slope, intercept)``; nan when fewer than two usable levels exist.
    """
    ns, us = [], []
    for e in trace:
        if e.n < start:
            continue
        u = _loglog(e.log_sup_g if side == "g" else e.log_sup_h)
        if math.isfinite(u):
            ns.append(e.n)
            us.append(u)
    if len(ns) < 2:
        return math.nan, math.nan
    slope, intercept = np.polyfit(np.array(ns, float), np.array(us), 1)
    return float(slope), float(intercept)


def _tail_bound(trace, start, last, side) -> float:
    column = [e.log_sup_g if side == "g" else e.log_sup_h for e in trace if e.n >= start]
    if column and all(v == -math.inf for v in column):
        return 0.0
    slope, intercept = tail_rate(trace, start, side)
    if not (math.isfinite(slope) and slope > 0):
        return math.inf
    total = 0.0
    for k in range(last + 1, last + 200):
        term = math.exp(-math.exp(min(intercept + slope * k, 700.0)))
        total += term
        if term < 1e-300 or term < 1e-17 * total:
            break
    return total


@dataclass(eq=False)
class SeriesSolution:
    """Truncated series ``G_+ = sum_{n<=N} g_n`` and ``G_- = sum_{n<=N} h_n``.

    ``phi(x) = G_+(x - alpha_1) + G_-(x - alpha_q)``. The per-level sups are
    taken over the monitoring grids, which cover every argument that ``phi``
    and the residual need on ``[center - a, center + a]``.
    """

    problem: DifferenceProblem
    derived: DerivedCoefficients
    chi_split: SplitPair
    truncation_N: int
    Na: int
    per_term_sups: list
    trace_extra: list
    tail_estimate: float
    interval_halfwidth: float
    tol: float
    g_rec: ShiftRecurrence = field(repr=False)
    h_rec: ShiftRecurrence = field(repr=False)

    @property
    def cache_size(self) -> int:
        return len(self.g_rec.cache)

    def g_plus_eval(self, y):
        """``G_+`` at real (or complex) points."""
        return _vector(lambda v: sum(self.g_rec.value(n, v) for n in range(self.truncation_N + 1)), y)

    def g_minus_eval(self, y):
        return _vector(lambda v: sum(self.h_rec.value(n, v) for n in range(self.truncation_N + 1)), y)

    def phi(self, x):
        al = self.problem.alphas
        return _vector(lambda v: (sum(self.g_rec.value(n, v - al[0]) for n in range(self.truncation_N + 1))
                                  + sum(self.h_rec.value(n, v - al[-1]) for n in range(self.truncation_N + 1))),
                       x)

    def trace_rate(self, side: str = "g") -> float:
        """Slope of ``log(-log sup)`` against ``n`` beyond ``N_a``, extra levels included."""
        return tail_rate(self.per_term_sups + self.trace_extra, self.Na, side)[0]


def _vector(fn, x):
    arr = np.asarray(x)
    out = np.array([fn(complex(v)) for v in arr.ravel()], dtype=complex)
    return out.reshape(arr.shape)[()]


def monitoring_grids(p: DifferenceProblem, a: float, points: int = 129):
    """Grids for ``G_+`` and ``G_-`` covering ``phi`` on ``[c - a + alpha_1, c + a + alpha_q]``."""
    c, al = p.center, p.alphas
    lo, hi = c - a + al[0], c + a + al[-1]
    yg = np.linspace(lo - al[0], hi - al[0], points)
    yh = np.linspace(lo - al[-1], hi - al[-1], points)
    return yg, yh


def sum_series(p: DifferenceProblem, dc: DerivedCoefficients, a: float = 2.0, tol: float = 1e-8,
               n_cap: int = 200, chi_split: SplitPair | None = None, grid_points: int = 129,
               cache: RecurrenceCache | None = None, extra_levels: int = 3,
               split_kwargs: dict | None = None) -> SeriesSolution:
    """Sum the two recurrences until the stopping rule fires.

    Stops at the first ``n >= N_a`` where the grid sups of ``g`` and ``h`` at
    levels ``n - 1`` and ``n`` are all below ``tol`` and the tail extrapolated
    from the double-exponential fit of ``log(-log sup)`` is below ``tol``.
    ``extra_levels`` more levels are computed for diagnostics only.

    Raises
    ------
    ConvergenceError
        At ``n_cap`` without stopping; ``.trace`` holds the per-level sups.
    """
    if not tol > 0:
        raise InvalidInputError("tol must be positive")
    if chi_split is None:
        chi_split = split_rhs(p, dc, **(split_kwargs or {}))
    cache = cache if cache is not None else RecurrenceCache()
    g_rec = _plus_recurrence(dc, chi_split, cache)
    h_rec = _minus_recurrence(dc, chi_split, cache)
    Na = compute_Na(a, dc)
    yg, yh = monitoring_grids(p, a, grid_points)

    def level(n):
        lg = max(g_rec.clog(n, complex(y)).real for y in yg)
        lh = max(h_rec.clog(n, complex(y)).real for y in yh)
        return TraceEntry(n, float(lg), float(lh))

    log_tol = math.log(tol)
    trace: list = []
    stop = None
    tail = math.inf
    for n in range(n_cap + 1):
        trace.append(level(n))
        if n < max(Na, 1):
            continue
        prev, cur = trace[-2], trace[-1]
        if max(prev.log_sup_g, prev.log_sup_h, cur.log_sup_g, cur.log_sup_h) >= log_tol:
            continue
        tail = _tail_bound(trace, Na, n, "g") + _tail_bound(trace, Na, n, "h")
        if tail < tol:
            stop = n
            break
    if stop is None:
        raise ConvergenceError(
            f"no convergence by level {n_cap} (last sups g: {trace[-1].sup_g:.3g}, h: {trace[-1].sup_h:.3g})",
            trace=[e.as_dict() for e in trace])
    extra = [level(stop + k) for k in range(1, extra_levels + 1)]
    return SeriesSolution(p, dc, chi_split, stop, Na, trace, extra, float(tail), float(a), float(tol),
                          g_rec, h_rec)


@dataclass(frozen=True)
class SolveOptions:
    a: float = 2.0
    tol: float = 1e-8
    n_cap: int = 200
    C1: float | None = None
    delta0: float | None = None
    contour_nodes: int = 64
    area_nodes_radial: int = 32
    area_nodes_angular: int = 32
    grid_points: int = 129
    cache_budget: int = 5_000_000
    extra_levels: int = 3
    extension: ExtensionOptions = field(default_factory=ExtensionOptions)

    def __post_init__(self):
        for name in ("a", "tol"):
            if not getattr(self, name) > 0:
                raise InvalidParamsError(f"{name} must be positive")
        if self.n_cap < 1 or self.grid_points < 2:
            raise InvalidParamsError("n_cap must be >= 1 and grid_points >= 2")


def solve(p: DifferenceProblem, opts: SolveOptions | None = None):
    """Validate, split, sum. Returns ``(phi, solution)``.

    Raises
    ------
    ValidationError
        When a hard hypothesis check fails; ``.report`` has the details.
    """
    opts = opts or SolveOptions()
    report = validate_problem(p)
    if not report.passed:
        raise ValidationError("; ".join(report.failures), report)
    dc = derive_coefficients(p, opts.C1, opts.delta0)
    pair = split_rhs(p, dc, opts.contour_nodes, opts.area_nodes_radial, opts.area_nodes_angular, opts.extension)
    sol = sum_series(p, dc, opts.a, opts.tol, opts.n_cap, chi_split=pair, grid_points=opts.grid_points,
                     cache=RecurrenceCache(opts.cache_budget), extra_levels=opts.extra_levels)
    return sol.phi, sol


def residual(p: DifferenceProblem, phi: Callable, grid: GridSpec) -> float:
    """``max |sum_j a_j(x) phi(x + alpha_j) - chi(x)|`` over real grid points."""
    xs = grid.points().real
    total = -p.chi_values(xs)
    for a, al in zip(p.coeffs, p.alphas):
        total = total + np.asarray(a(xs.astype(complex))) * np.asarray(phi(xs + al), dtype=complex)
    return float(np.max(np.abs(total)))


def oracle_constant_coeff(a: Sequence[float], alphas: Sequence[float], omega: float) -> Callable:
    """Exact solution ``e^{i omega x} / sum_j a_j e^{i omega alpha_j}`` for ``chi = e^{i omega x}``."""
    symbol = sum(complex(aj) * cmath.exp(1j * omega * al) for aj, al in zip(a, alphas))
    if abs(symbol) <= 1e-12 * max(1.0, sum(abs(complex(aj)) for aj in a)):
        raise NoSolutionError(f"symbol vanishes at omega = {omega:g}")

    def phi(x):
        return np.exp(1j * omega * np.asarray(x, dtype=float)) / symbol

    phi.symbol = symbol
    return phi
