"""Holomorphic handles on strips, jets of smooth functions and evaluation grids.

Quantities bounded by ``exp(-c * exp(C |Re z|))`` underflow doubles quickly, so
handles may carry an exact log evaluator next to the plain one. ``clog`` returns
the complex logarithm ``log|f| + i arg f`` with ``-inf`` standing in for zero.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DomainError, InvalidInputError

NEG_INF = complex(-math.inf, 0.0)


def wrap_phase(ph):
    """Map angles into ``(-pi, pi]``."""
    return math.pi - np.mod(math.pi - np.asarray(ph, dtype=float), 2 * math.pi)


def _as_complex(v) -> complex:
    if isinstance(v, (list, tuple)):
        if len(v) != 2:
            raise InvalidInputError(f"complex value must be [re, im], got {v!r}")
        return complex(float(v[0]), float(v[1]))
    return complex(v)


def _complex_to_config(c: complex):
    c = complex(c)
    return c.real if c.imag == 0 else [c.real, c.imag]


@dataclass(frozen=True, eq=False)
class AnalyticHandle:
    """An evaluable holomorphic function on ``{|Im z| < strip_halfwidth}``.

    ``eval`` must accept numpy arrays. ``log_eval`` (optional) returns
    ``(log_magnitude, phase)`` and is used whenever magnitudes may leave the
    double range. ``poles`` lists known isolated singularities; when present the
    handle is analytic on the plane minus those points.
    """

    eval: Callable
    strip_halfwidth: float
    log_eval: Callable | None = None
    name: str = "handle"
    poles: tuple = ()
    descriptor: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.strip_halfwidth >= 0:
            raise InvalidInputError("strip_halfwidth must be non-negative")

    def __call__(self, z):
        with np.errstate(over="ignore", invalid="ignore"):
            return self.eval(np.asarray(z, dtype=complex))

    def clog(self, z) -> complex:
        """Complex log of the value at a scalar point."""
        if self.log_eval is not None:
            lm, ph = self.log_eval(np.asarray(z, dtype=complex))
            lm = float(lm)
            if lm == -math.inf:
                return NEG_INF
            return complex(lm, float(ph))
        v = complex(self(z))
        if v == 0:
            return NEG_INF
        return cmath.log(v)

    def analytic_radius(self, z) -> float:
        """Radius of the largest disc around ``z`` inside the analyticity domain."""
        if self.poles:
            return float(min(abs(complex(z) - p) for p in self.poles))
        return self.strip_halfwidth - abs(complex(z).imag)

    def shifted(self, c: float) -> "AnalyticHandle":
        """The handle ``z -> f(z + c)`` for real ``c``."""
        if c == 0:
            return self
        f, lf = self.eval, self.log_eval
        return AnalyticHandle(
            eval=lambda z: f(z + c),
            strip_halfwidth=self.strip_halfwidth,
            log_eval=None if lf is None else (lambda z: lf(z + c)),
            name=f"{self.name}(z{c:+g})",
            poles=tuple(p - c for p in self.poles),
        )


def _scalar_or_array(z, values):
    return values if np.ndim(z) else values[()]


def constant(value) -> AnalyticHandle:
    c = _as_complex(value)
    log_c = NEG_INF if c == 0 else cmath.log(c)

    def ev(z):
        return np.full(np.shape(z), c, dtype=complex)[()]

    def lev(z):
        shape = np.shape(z)
        return np.full(shape, log_c.real)[()], np.full(shape, log_c.imag)[()]

    return AnalyticHandle(ev, math.inf, lev, name=f"const({c:g})",
                          descriptor={"kind": "const", "value": _complex_to_config(c)})


def polynomial(coeffs) -> AnalyticHandle:
    """``c0 + c1 z + c2 z**2 + ...`` (ascending powers)."""
    cs = np.array([_as_complex(c) for c in coeffs], dtype=complex)
    if cs.size == 0:
        raise InvalidInputError("polynomial needs at least one coefficient")

    def ev(z):
        return np.polynomial.polynomial.polyval(np.asarray(z, dtype=complex), cs)

    return AnalyticHandle(ev, math.inf, None, name="poly",
                          descriptor={"kind": "poly", "coeffs": [_complex_to_config(c) for c in cs]})


def exp_i(omega: float, amplitude=1.0) -> AnalyticHandle:
    """``amplitude * exp(i omega z)``."""
    w = float(omega)
    amp = _as_complex(amplitude)
    if amp == 0:
        return constant(0.0)
    log_amp = cmath.log(amp)

    def ev(z):
        return amp * np.exp(1j * w * np.asarray(z, dtype=complex))

    def lev(z):
        u = log_amp + 1j * w * np.asarray(z, dtype=complex)
        return u.real, wrap_phase(u.imag)

    return AnalyticHandle(ev, math.inf, lev, name=f"exp_i({w:g})",
                          descriptor={"kind": "exp_i", "omega": w, "amplitude": _complex_to_config(amp)})


def exp_linear(rate, amplitude=1.0) -> AnalyticHandle:
    """``amplitude * exp(rate z)`` for complex ``rate``."""
    k = _as_complex(rate)
    amp = _as_complex(amplitude)
    if amp == 0:
        return constant(0.0)
    log_amp = cmath.log(amp)

    def ev(z):
        return amp * np.exp(k * np.asarray(z, dtype=complex))

    def lev(z):
        u = log_amp + k * np.asarray(z, dtype=complex)
        return u.real, wrap_phase(u.imag)

    return AnalyticHandle(ev, math.inf, lev, name=f"exp({k:g} z)",
                          descriptor={"kind": "exp", "rate": _complex_to_config(k),
                                      "amplitude": _complex_to_config(amp)})


def trig(const=0.0, cos=(), sin=()) -> AnalyticHandle:
    """``const + sum a_k cos(w_k z) + sum b_k sin(w_k z)``.

    ``cos`` and ``sin`` are sequences of ``(frequency, amplitude)`` pairs.
    """
    c0 = _as_complex(const)
    cos_terms = [(float(w), _as_complex(a)) for w, a in cos]
    sin_terms = [(float(w), _as_complex(a)) for w, a in sin]

    def ev(z):
        z = np.asarray(z, dtype=complex)
        out = np.full(z.shape, c0, dtype=complex)
        for w, a in cos_terms:
            out = out + a * np.cos(w * z)
        for w, a in sin_terms:
            out = out + a * np.sin(w * z)
        return out[()]

    desc = {
        "kind": "trig",
        "const": _complex_to_config(c0),
        "cos": [[w, _complex_to_config(a)] for w, a in cos_terms],
        "sin": [[w, _complex_to_config(a)] for w, a in sin_terms],
    }
    return AnalyticHandle(ev, math.inf, None, name="trig", descriptor=desc)


def rational(num, den, strip_halfwidth: float | None = None) -> AnalyticHandle:
    """``P(z) / Q(z)`` with ascending coefficient lists.

    With ``strip_halfwidth`` given, any pole of ``Q`` inside that strip raises
    :class:`DomainError`. Without it the strip is the widest pole-free one
    (possibly of width zero, usable pointwise only).
    """
    p = np.array([_as_complex(c) for c in num], dtype=complex)
    q = np.array([_as_complex(c) for c in den], dtype=complex)
    q = np.trim_zeros(q, "b")
    if q.size == 0:
        raise InvalidInputError("denominator is identically zero")
    poles = tuple(complex(r) for r in np.roots(q[::-1])) if q.size > 1 else ()
    widest = min((abs(r.imag) for r in poles), default=math.inf)
    if strip_halfwidth is None:
        strip_halfwidth = widest
    elif widest < strip_halfwidth:
        bad = min(poles, key=lambda r: abs(r.imag))
        raise DomainError(f"rational handle has a pole at {bad:.6g} inside the strip |Im z| < {strip_halfwidth:g}")

    pv, qv = np.polynomial.polynomial.polyval, np.polynomial.polynomial.polyval

    def ev(z):
        z = np.asarray(z, dtype=complex)
        return pv(z, p) / qv(z, q)

    desc = {"kind": "rational", "num": [_complex_to_config(c) for c in p],
            "den": [_complex_to_config(c) for c in q]}
    return AnalyticHandle(ev, float(strip_halfwidth), None, name="rational", poles=poles, descriptor=desc)


def expexp(rate: float, sign: int = 1, scale=1.0) -> AnalyticHandle:
    """``scale * exp(sign * exp(rate z))``, with an exact log evaluator."""
    r = float(rate)
    s = 1.0 if sign >= 0 else -1.0
    sc = _as_complex(scale)
    log_sc = cmath.log(sc)

    def ev(z):
        with np.errstate(over="ignore"):
            return sc * np.exp(s * np.exp(r * np.asarray(z, dtype=complex)))

    def lev(z):
        with np.errstate(over="ignore", invalid="ignore"):
            u = s * np.exp(r * np.asarray(z, dtype=complex))
        return log_sc.real + u.real, wrap_phase(log_sc.imag + u.imag)

    desc = {"kind": "expexp", "rate": r, "sign": int(s), "scale": _complex_to_config(sc)}
    return AnalyticHandle(ev, math.inf, lev, name=f"expexp({r:g})", descriptor=desc)


def ratio(num: AnalyticHandle, den: AnalyticHandle, scale: complex = 1.0) -> AnalyticHandle:
    """``scale * num / den``; the log path is exact when both factors have one."""
    sc = complex(scale)
    log_sc = cmath.log(sc)

    def ev(z):
        return sc * num(z) / den(z)

    def lev(z):
        lm_n, ph_n = num.log_eval(z)
        lm_d, ph_d = den.log_eval(z)
        return log_sc.real + lm_n - lm_d, wrap_phase(log_sc.imag + ph_n - ph_d)

    exact = num.log_eval is not None and den.log_eval is not None
    return AnalyticHandle(ev, min(num.strip_halfwidth, den.strip_halfwidth), lev if exact else None,
                          name=f"({num.name})/({den.name})")


_KINDS = {
    "const": lambda d: constant(d.get("value", 0.0)),
    "poly": lambda d: polynomial(d["coeffs"]),
    "exp_i": lambda d: exp_i(d["omega"], d.get("amplitude", 1.0)),
    "exp": lambda d: exp_linear(d["rate"], d.get("amplitude", 1.0)),
    "trig": lambda d: trig(d.get("const", 0.0), d.get("cos", ()), d.get("sin", ())),
    "rational": lambda d: rational(d["num"], d["den"], d.get("strip_halfwidth")),
    "expexp": lambda d: expexp(d["rate"], d.get("sign", 1), d.get("scale", 1.0)),
}


def handle_from_descriptor(desc: dict) -> AnalyticHandle:
    """Build a builtin handle from a ``{"kind": ...}`` config descriptor."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise InvalidInputError(f"handle descriptor needs a 'kind' field: {desc!r}")
    try:
        make = _KINDS[desc["kind"]]
    except KeyError:
        raise InvalidInputError(f"unknown handle kind {desc['kind']!r}; choose from {sorted(_KINDS)}") from None
    try:
        return make(desc)
    except KeyError as exc:
        raise InvalidInputError(f"handle descriptor {desc!r} is missing field {exc}") from None


@dataclass(frozen=True, eq=False)
class Jet:
    """Derivative data ``f^(n)(x)`` of a smooth function.

    The extension is built over ``[-radius, radius]``; ``deriv`` must also accept
    points of the cut-off band around it and, when the jet is used as a
    right-hand side, arbitrary real points for ``n = 0``.
    """

    deriv: Callable
    radius: float
    n_max: int
    name: str = "jet"
    descriptor: dict | None = field(default=None, repr=False)

    def __post_init__(self):
        if not self.radius > 0:
            raise InvalidInputError("jet radius must be positive")
        if self.n_max < 1:
            raise InvalidInputError("jet needs n_max >= 1")
        xs = np.linspace(-self.radius, self.radius, 33)
        vals = np.asarray(self.deriv(0, xs), dtype=complex)
        if not np.all(np.isfinite(vals)):
            raise InvalidInputError("jet value deriv(0, x) is not finite on the base interval")

    @property
    def base_interval(self) -> tuple[float, float]:
        return (-self.radius, self.radius)

    def derivative(self, n: int, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        out = np.asarray(self.deriv(n, x), dtype=complex)
        if out.size == x.size:
            return out.reshape(x.shape)
        return np.broadcast_to(out, x.shape)

    def value(self, x):
        return self.derivative(0, x)

    def shifted(self, c: float) -> "Jet":
        if c == 0:
            return self
        d = self.deriv
        return Jet(lambda n, x: d(n, np.asarray(x) + c), self.radius, self.n_max, f"{self.name}(x{c:+g})")

    @classmethod
    def from_handle(cls, f: AnalyticHandle, radius: float, n_max: int = 40, nodes: int | None = None) -> "Jet":
        """Jet of a holomorphic handle, derivatives by Cauchy integrals.

        The contour radius grows with the order (up to the analyticity radius)
        to keep round-off in ``n! / r**n`` under control.
        """

        def deriv(n, x):
            x = np.atleast_1d(np.asarray(x, dtype=float))
            out = np.empty(x.shape, dtype=complex)
            if n == 0:
                out[...] = f(x)
                return out
            m = nodes if nodes is not None else max(64, 2 * n + 32)
            for i, xi in np.ndenumerate(x):
                reach = f.analytic_radius(xi)
                r = min(0.9 * reach, max(0.5, float(n))) if math.isfinite(reach) else max(0.5, float(n))
                out[i] = derivative_via_cauchy(f, xi, n, radius=r, nodes=m)
            return out

        desc = None if f.descriptor is None else {"kind": "jet", "of": f.descriptor,
                                                  "radius": radius, "n_max": n_max}
        return cls(deriv, float(radius), int(n_max), name=f"jet({f.name})", descriptor=desc)


def jet_from_descriptor(desc: dict) -> Jet:
    if desc.get("kind") != "jet" or "of" not in desc:
        raise InvalidInputError("jet descriptor must look like {'kind': 'jet', 'of': {...}, 'radius': r}")
    return Jet.from_handle(handle_from_descriptor(desc["of"]), float(desc.get("radius", 1.0)),
                           int(desc.get("n_max", 40)))


@dataclass(frozen=True)
class GridSpec:
    x_min: float
    x_max: float
    count: int
    imag_offset: float = 0.0

    def __post_init__(self):
        if not self.x_min < self.x_max:
            raise InvalidInputError("grid needs x_min < x_max")
        if self.count < 2:
            raise InvalidInputError("grid needs count >= 2")

    def points(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.count) + 1j * self.imag_offset

    @classmethod
    def from_config(cls, d: dict) -> "GridSpec":
        return cls(float(d["x_min"]), float(d["x_max"]), int(d["count"]), float(d.get("imag_offset", 0.0)))

    def to_config(self) -> dict:
        return {"x_min": self.x_min, "x_max": self.x_max, "count": self.count, "imag_offset": self.imag_offset}


def derivative_via_cauchy(f: AnalyticHandle, x: float, n: int, radius: float | None = None,
                          nodes: int = 64) -> complex:
    """``f^(n)(x)`` from the trapezoidal rule on ``|zeta - x| = radius``.

    Spectrally accurate for analytic ``f``. The default radius is half the
    strip half-width (or half the distance to the nearest pole).
    """
    if n < 0:
        raise InvalidInputError("derivative order must be non-negative")
    if nodes < 16:
        raise InvalidInputError("need at least 16 quadrature nodes")
    reach = f.analytic_radius(x)
    if radius is None:
        radius = 0.5 * reach if math.isfinite(reach) else 1.0
    if not 0 < radius < reach:
        raise DomainError(f"circle of radius {radius:g} around {x} leaves the analyticity domain (reach {reach:g})")
    theta = 2 * np.pi * np.arange(nodes) / nodes
    vals = f(complex(x) + radius * np.exp(1j * theta))
    coeff = np.mean(vals * np.exp(-1j * n * theta))
    return complex(coeff * math.factorial(n) / radius**n)


def log_scale_eval(f: AnalyticHandle, z):
    """``(log|f(z)|, arg f(z))``, via the handle's log path when it has one.

    An exact zero (or an underflowed value without a log path) gives the
    ``-inf`` sentinel with phase 0.
    """
    if f.log_eval is not None:
        lm, ph = f.log_eval(np.asarray(z, dtype=complex))
        lm = np.asarray(lm, dtype=float)
        ph = np.where(lm == -np.inf, 0.0, wrap_phase(ph))
        return _scalar_or_array(z, lm), _scalar_or_array(z, ph)
    v = np.asarray(f(z), dtype=complex)
    with np.errstate(divide="ignore"):
        lm = np.log(np.abs(v))
    ph = np.where(v == 0, 0.0, np.angle(v))
    return _scalar_or_array(z, lm), _scalar_or_array(z, ph)
