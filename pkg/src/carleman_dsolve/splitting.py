"""Weighted Cauchy-Pompeiu splitting of a function on a disk into decaying halves.

With ``W(u) = exp(e^{C0 u} + e^{-C0 u})`` and the disk ``|u| <= rho`` (``u = z - center``)
cut along the imaginary axis,

    f_+(z) = W(u)^{-1} [ (1/2 pi i) int_{left arc} W F / (zeta - u) dzeta
                         - (1/pi) iint_{left half-disk} W dbar F / (zeta - u) dm ]

and ``f_-`` is the same with the right arc and right half-disk. ``f_+`` decays
like ``exp(-cos(rho C0) e^{C0 Re u})`` to the right, ``f_-`` symmetrically to
the left, and ``f_+ + f_- = F`` on the disk.

Real-line continuation: on ``R`` the raw halves sum to ``F`` only on
``[-rho, rho]``. ``continued_plus`` keeps ``f_+`` where it decays and uses
``chi - f_-`` elsewhere (mirror for ``continued_minus``), so the two continued
halves add up to ``chi`` on the whole line.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import cached_property
from typing import NamedTuple

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import roots_legendre

from .errors import DomainError, InvalidInputError, InvalidParamsError
from .extension import AlmostAnalyticExtension
from .funcmodel import NEG_INF, AnalyticHandle, GridSpec, wrap_phase

_ARCS = {"plus": (math.pi / 2, 3 * math.pi / 2), "minus": (-math.pi / 2, math.pi / 2)}
# beyond this C0 |Re u| the prefactor is exp(-/+ inf) in double precision
_EXP_LIMIT = 700.0


@dataclass(frozen=True)
class SplitParams:
    """Disk radius, kernel rate and quadrature sizes.

    ``rho * C0 < pi/2`` keeps ``cos(rho C0) > 0``, which the decay estimate needs.
    """

    rho: float
    C0: float
    contour_nodes: int = 64
    area_nodes_radial: int = 32
    area_nodes_angular: int = 32

    def __post_init__(self):
        if not (self.rho > 0 and self.C0 > 0):
            raise InvalidParamsError("rho and C0 must be positive")
        if not self.rho * self.C0 < math.pi / 2:
            raise InvalidParamsError(f"need rho*C0 < pi/2, got {self.rho * self.C0:.6g}")
        if self.contour_nodes < 16:
            raise InvalidParamsError("contour_nodes must be at least 16")
        if self.area_nodes_radial < 1 or self.area_nodes_angular < 1:
            raise InvalidParamsError("area node counts must be positive")

    @property
    def decay_factor(self) -> float:
        """``cos(rho C0)``, the constant in front of ``e^{C0 |Re z|}``."""
        return math.cos(self.rho * self.C0)


def _gauss(lo: float, hi: float, n: int):
    x, w = roots_legendre(n)
    return 0.5 * (hi - lo) * x + 0.5 * (hi + lo), 0.5 * (hi - lo) * w


def source_values(source, z) -> np.ndarray:
    """Values of the split source; real points of an extension use the jet itself."""
    z = np.asarray(z, dtype=complex)
    if isinstance(source, AnalyticHandle):
        return np.asarray(source(z), dtype=complex)
    out = np.asarray(source.F(z), dtype=complex).copy()
    real = z.imag == 0
    if np.any(real):
        out[real] = source.jet.value(z.real[real])
    return out


class _Half:
    """Quadrature data of one half (arc plus half-disk)."""

    def __init__(self, side, source, params: SplitParams, center: float):
        self.side = side
        rho, C0 = params.rho, params.C0
        self.rho, self.C0, self.center = rho, C0, center
        lo, hi = _ARCS[side]
        th, wt = _gauss(lo, hi, params.contour_nodes)
        self.zeta = rho * np.exp(1j * th)
        self.dzeta = 1j * self.zeta * wt
        self.phi = self._weight(self.zeta) * source_values(source, center + self.zeta)
        # arc end points, traversed counterclockwise from A to B
        self.A, self.B = (1j * rho, -1j * rho) if side == "plus" else (-1j * rho, 1j * rho)
        self.source = source
        self.area_zeta = None
        if isinstance(source, AlmostAnalyticExtension):
            r, wr = _gauss(0.0, rho, params.area_nodes_radial)
            a, wa = _gauss(lo, hi, params.area_nodes_angular)
            R, Aa = np.meshgrid(r, a, indexing="ij")
            zeta = (R * np.exp(1j * Aa)).ravel()
            dm = (R * wr[:, None] * wa[None, :]).ravel()
            self.area_zeta = zeta
            self.area_c = self._weight(zeta) * np.asarray(source.dbar_F(center + zeta)) * dm

    def _weight(self, u):
        return np.exp(2 * np.cosh(self.C0 * u))

    def _evaluable(self, u) -> bool:
        if isinstance(self.source, AnalyticHandle):
            return self.source.analytic_radius(self.center + u) > 0
        return True

    def _log_term(self, u) -> complex:
        """``int_arc dzeta / (zeta - u)``, inside limit on the arc itself."""
        ratio = (self.A - u) / (self.B - u)
        on_diameter = u.real == 0 and abs(u.imag) < self.rho
        if on_diameter:
            return complex(-math.log(abs(ratio)), math.pi)
        inside = abs(u) <= self.rho and (u.real <= 0 if self.side == "plus" else u.real >= 0)
        return (2j * math.pi if inside else 0) - cmath.log(ratio)

    def integral(self, u: complex) -> complex:
        """The bracketed Cauchy-Pompeiu expression at local point ``u``."""
        diff = self.zeta - u
        dist = np.abs(diff)
        if dist.min() < 0.5 * self.rho and self._evaluable(u):
            phi_u = complex(self._weight(u) * source_values(self.source, self.center + u))
            safe = dist > 1e-14
            terms = np.where(safe, (self.phi - phi_u) * self.dzeta / np.where(safe, diff, 1.0), 0.0)
            total = (terms.sum() + phi_u * self._log_term(u)) / (2j * math.pi)
        else:
            total = np.sum(self.phi * self.dzeta / diff) / (2j * math.pi)
        if self.area_zeta is not None:
            d = self.area_zeta - u
            safe = np.abs(d) > 1e-14
            total -= np.sum(np.where(safe, self.area_c / np.where(safe, d, 1.0), 0.0)) / math.pi
        return complex(total)

    def check_domain(self, u: complex):
        if u.imag != 0 and abs(u) < self.rho and (u.real < 0 if self.side == "plus" else u.real > 0):
            name = "f_plus" if self.side == "plus" else "f_minus"
            raise DomainError(f"{name} is undefined inside its half-disk (z - center = {u})")

    def clog(self, u: complex) -> complex:
        self.check_domain(u)
        I = self.integral(u)
        if I == 0:
            return NEG_INF
        x = self.C0 * u.real
        if abs(x) > _EXP_LIMIT:
            # 2 cosh(C0 u) ~ e^{C0 |Re u|} e^{+-i C0 Im u}
            c = math.cos(self.C0 * u.imag)
            return NEG_INF if c > 0 else complex(math.inf, 0.0)
        E = 2 * cmath.cosh(self.C0 * u)
        out = cmath.log(I) - E
        return complex(out.real, float(wrap_phase(out.imag)))


def _vectorize_clog(fn, z):
    z = np.asarray(z, dtype=complex)
    out = np.array([fn(complex(v)) for v in z.ravel()], dtype=complex)
    return out.reshape(z.shape)[()]


def _exp_clog(c):
    c = np.asarray(c, dtype=complex)
    with np.errstate(under="ignore", over="ignore", invalid="ignore"):
        out = np.where(c.real == -np.inf, 0j, np.exp(np.where(c.real == -np.inf, 0j, c)))
    return out[()]


class LogValue(NamedTuple):
    log_magnitude: float
    phase: float


class SplitPair:
    """The two halves of a split, with raw and real-line continued evaluators.

    Parameters
    ----------
    source : AnalyticHandle or AlmostAnalyticExtension
    params : SplitParams
    center : float
        Real centre of the disk.
    """

    def __init__(self, source, params: SplitParams, center: float = 0.0):
        self.source = source
        self.params = params
        self.center = float(center)
        self._plus = _Half("plus", source, params, self.center)
        self._minus = _Half("minus", source, params, self.center)

    # raw halves ------------------------------------------------------------
    def clog_plus(self, z):
        """Complex log of ``f_+``; ``-inf`` real part for exact zeros."""
        return _vectorize_clog(lambda v: self._plus.clog(v - self.center), z)

    def clog_minus(self, z):
        return _vectorize_clog(lambda v: self._minus.clog(v - self.center), z)

    def f_plus(self, z):
        return _exp_clog(self.clog_plus(z))

    def f_minus(self, z):
        return _exp_clog(self.clog_minus(z))

    def log_f_plus(self, z) -> LogValue:
        c = complex(self.clog_plus(complex(z)))
        return LogValue(c.real, 0.0 if c.real == -math.inf else c.imag)

    def log_f_minus(self, z) -> LogValue:
        c = complex(self.clog_minus(complex(z)))
        return LogValue(c.real, 0.0 if c.real == -math.inf else c.imag)

    # continued halves ------------------------------------------------------
    def _complement_clog(self, v: complex, other: _Half) -> complex:
        w = complex(source_values(self.source, v)) - complex(_exp_clog(other.clog(v - self.center)))
        return NEG_INF if w == 0 else cmath.log(w)

    def continued_clog_plus(self, z):
        """``f_+`` where ``Re(z - center) >= 0``, ``source - f_-`` elsewhere."""
        def one(v):
            if v.real >= self.center:
                return self._plus.clog(v - self.center)
            return self._complement_clog(v, self._minus)
        return _vectorize_clog(one, z)

    def continued_clog_minus(self, z):
        """``f_-`` where ``Re(z - center) <= 0``, ``source - f_+`` elsewhere."""
        def one(v):
            if v.real <= self.center:
                return self._minus.clog(v - self.center)
            return self._complement_clog(v, self._plus)
        return _vectorize_clog(one, z)

    def continued_plus(self, z):
        return _exp_clog(self.continued_clog_plus(z))

    def continued_minus(self, z):
        return _exp_clog(self.continued_clog_minus(z))

    # decay constant ----------------------------------------------------------
    @cached_property
    def log_D0_estimate(self) -> float:
        """``max log|f_+-(x)| + cos(rho C0) e^{C0 |x - center|}`` over a sample beyond the disk."""
        p = self.params
        start = max(1.0, 2 * p.rho)
        offs = np.linspace(start, start + 3.0, 13)
        vals = []
        for off in offs:
            gain = p.decay_factor * math.exp(p.C0 * off)
            vals.append(complex(self.clog_plus(self.center + off)).real + gain)
            vals.append(complex(self.clog_minus(self.center - off)).real + gain)
        return float(max(vals))

    @property
    def D0_estimate(self) -> float:
        lD = self.log_D0_estimate
        return 0.0 if lD == -math.inf else math.exp(min(lD, 700.0))


def split(source, params: SplitParams, center: float = 0.0) -> SplitPair:
    """Split ``source`` on the disk ``|z - center| <= rho``.

    For an :class:`AnalyticHandle` the disk must lie inside the analyticity
    domain and the area terms vanish; an :class:`AlmostAnalyticExtension`
    contributes its ``dbar F`` through the half-disk area integrals.
    """
    if isinstance(source, AnalyticHandle):
        reach = source.analytic_radius(center)
        if not reach > params.rho:
            raise DomainError(f"source is analytic only within {reach:g} of {center}, need more than rho = {params.rho:g}")
    elif not isinstance(source, AlmostAnalyticExtension):
        raise InvalidInputError("split source must be an AnalyticHandle or AlmostAnalyticExtension")
    return SplitPair(source, params, center)


def split_sum_check(pair: SplitPair, source, grid: GridSpec) -> float:
    """``max |source(x) - f_+(x) - f_-(x)|`` over the grid (raw halves)."""
    xs = grid.points()
    lo, hi = pair.center - pair.params.rho, pair.center + pair.params.rho
    if xs.real.min() < lo - 1e-12 or xs.real.max() > hi + 1e-12:
        raise InvalidInputError("grid must lie within the split disk's diameter")
    err = source_values(source, xs) - pair.f_plus(xs) - pair.f_minus(xs)
    return float(np.max(np.abs(err)))


class DecayFit(NamedTuple):
    fitted_inner_exponent: float
    fitted_D0: float
    bound_satisfied: bool
    log_D0: float


def decay_check(pair: SplitPair, params: SplitParams, xs, side: str = "plus") -> DecayFit:
    """Fit ``log|f(x)| ~ log D - c e^{k |x - center|}`` and test the decay estimate.

    The rate ``k`` is found by a one-dimensional search with ``(log D, c)``
    solved by linear least squares for each trial ``k``. The estimate
    ``log|f| <= log D - cos(rho C0) e^{C0 |x - center|}`` is then checked at
    every sample with the fitted ``D``. ``side="minus"`` checks ``f_-`` at
    ``center - x``.
    """
    xs = np.asarray(xs, dtype=float)
    if xs.size < 3 or np.any(np.diff(xs) <= 0):
        raise InvalidInputError("xs must be strictly increasing with at least three points")
    if np.any(xs <= params.rho):
        raise InvalidInputError("xs must lie beyond the disk (x > rho)")
    pts = pair.center + xs if side == "plus" else pair.center - xs
    clog = pair.clog_plus if side == "plus" else pair.clog_minus
    logs = np.array([complex(clog(p)).real for p in pts])
    if np.all(logs == -np.inf):
        return DecayFit(float("nan"), 0.0, True, -math.inf)
    if np.any(~np.isfinite(logs)):
        raise DomainError("mixed zero and nonzero samples; decay fit is undefined")

    def lstsq(k):
        X = np.column_stack([np.ones_like(xs), -np.exp(k * xs)])
        coef, *_ = np.linalg.lstsq(X, logs, rcond=None)
        return coef, float(np.sum((X @ coef - logs) ** 2))

    res = minimize_scalar(lambda k: lstsq(k)[1], bounds=(0.05 * params.C0, 5.0 * params.C0),
                          method="bounded", options={"xatol": 1e-10})
    k = float(res.x)
    (log_D, _c), _ = lstsq(k)
    bound = log_D - params.decay_factor * np.exp(params.C0 * xs)
    slack = 1e-9 * np.maximum(1.0, np.abs(logs))
    ok = bool(np.all(logs <= bound + slack))
    return DecayFit(k, math.exp(min(log_D, 700.0)), ok, float(log_D))
