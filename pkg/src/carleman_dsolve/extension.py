"""Compactly supported almost-analytic extensions of jets.

The extension is a truncated Taylor sum in the imaginary direction,

    S(x + iy) = sum_n f^(n)(x) (iy)^n / n! * w_n(|y|),

where term ``n`` is switched off once ``|y|`` passes the height at which the
weight ``H_M(B |y|)`` stops selecting indices ``>= n``. The switches are
quintic ramps rather than hard steps so that ``F`` is genuinely C^1 (a hard
step makes ``F`` jump across each switch height). A radial cubic cutoff
gives compact support.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .carleman import CarlemanSequence, log_weight, weight_eval
from .errors import AccuracyWarning, DomainError, InvalidInputError
from .funcmodel import Jet

# relative spacing enforced between consecutive switch heights
_SEPARATION = 0.02
# heights below this are excluded from the sampled bound (H_M and dbar F both ~ 0)
NEAR_AXIS_FLOOR = 1e-8


def switch_heights(M: CarlemanSequence, B: float, K: int) -> np.ndarray:
    """Heights ``tau_0 > tau_1 > ... > tau_K`` where the weight argmin drops below ``n``.

    ``tau_n`` (n >= 1) is the largest ``t`` with ``argmin_k (M_k/k!) (B t)^k >= n``;
    ``tau_0`` is only a ramp end for term 1.
    """
    lm = M.log_normalized
    N = M.n_max
    logT = np.empty(K + 1)
    for n in range(1, K + 1):
        j = np.arange(n, N + 1)[:, None]
        k = np.arange(0, n)[None, :]
        slopes = (lm[k] - lm[j]) / (j - k)
        logT[n] = slopes.min(axis=1).max()
    # strictly decreasing with a fixed relative gap, so every ramp has positive width
    for n in range(2, K + 1):
        logT[n] = min(logT[n], logT[n - 1] + math.log1p(-_SEPARATION))
    tau = np.exp(logT) / B
    tau[0] = 1.25 * tau[1] if K >= 1 else math.inf
    return tau


def _smoothstep(s):
    s = np.clip(s, 0.0, 1.0)
    return s * s * s * (s * (6 * s - 15) + 10)


def _smoothstep_prime(s):
    inside = (s > 0) & (s < 1)
    s = np.clip(s, 0.0, 1.0)
    return np.where(inside, 30 * s * s * (s - 1) ** 2, 0.0)


@dataclass(frozen=True, eq=False)
class RadialCutoff:
    """C^1 cubic bump: 1 on ``|z| <= inner``, 0 on ``|z| >= outer``."""

    inner: float
    outer: float

    def value(self, r):
        s = np.clip((np.asarray(r) - self.inner) / (self.outer - self.inner), 0.0, 1.0)
        return 1 - s * s * (3 - 2 * s)

    def derivative(self, r):
        w = self.outer - self.inner
        s = (np.asarray(r) - self.inner) / w
        inside = (s > 0) & (s < 1)
        return np.where(inside, -6 * s * (1 - s) / w, 0.0)

    def dbar(self, z):
        z = np.asarray(z, dtype=complex)
        r = np.abs(z)
        with np.errstate(invalid="ignore", divide="ignore"):
            unit = np.where(r > 0, z / np.where(r > 0, r, 1.0), 0.0)
        return self.derivative(r) * unit / 2


class BoundConstants(NamedTuple):
    A: float
    B: float
    log_A: float


@dataclass(frozen=True, eq=False)
class AlmostAnalyticExtension:
    """A C^1 compactly supported extension ``F`` of a jet with explicit ``dbar F``.

    Attributes
    ----------
    interval : tuple
        The base interval ``[-r, r]`` where ``F`` reproduces the jet.
    support_radius : float
        ``F`` vanishes identically for ``|z| >= support_radius``.
    plateau_radius : float
        The cutoff equals 1 on ``|z| <= plateau_radius``.
    thresholds : ndarray
        Switch heights ``tau_n`` of the Taylor terms.
    bound_constants : BoundConstants
        Sampled certificate ``|dbar F(z)| <= A H_M(B |Im z|)`` on the plateau.
    """

    jet: Jet
    M: CarlemanSequence
    B: float
    order: int
    thresholds: np.ndarray
    cutoff: RadialCutoff
    bound_constants: BoundConstants | None = field(default=None)

    @property
    def interval(self) -> tuple[float, float]:
        return self.jet.base_interval

    @property
    def support_radius(self) -> float:
        return self.cutoff.outer

    @property
    def plateau_radius(self) -> float:
        return self.cutoff.inner

    # -- Taylor weights -------------------------------------------------
    def _weights(self, t):
        """``w_n(t)`` and ``w_n'(t)`` for n = 0..order, shape (order+1, len(t))."""
        K, tau = self.order, self.thresholds
        w = np.ones((K + 1, t.size))
        dw = np.zeros((K + 1, t.size))
        for n in range(1, K + 1):
            width = tau[n - 1] - tau[n]
            s = (t - tau[n]) / width
            w[n] = 1 - _smoothstep(s)
            dw[n] = -_smoothstep_prime(s) / width
        return w, dw

    def _active_terms(self, t) -> int:
        # term n is identically zero once t >= tau_{n-1}
        tmin = t.min() if t.size else 0.0
        return int(min(self.order, np.searchsorted(-self.thresholds, -tmin, side="right")))

    def _taylor_parts(self, x, y):
        t = np.abs(y)
        w, dw = self._weights(t)
        top = self._active_terms(t[t > 0]) if np.any(t > 0) else 0
        S = np.zeros(x.size, dtype=complex)
        D = np.zeros(x.size, dtype=complex)
        sgn = np.sign(y)
        d_next = self.jet.derivative(0, x)
        for n in range(0, top + 1):
            d_n = d_next
            d_next = self.jet.derivative(n + 1, x)
            pw = (1j * y) ** n / math.factorial(n)
            w_next = w[n + 1] if n + 1 <= self.order else 0.0
            S += d_n * pw * w[n]
            D += 0.5 * (d_next * pw * (w[n] - w_next) + 1j * sgn * d_n * pw * dw[n])
        return S, D

    def _evaluate(self, z, want_dbar: bool):
        z = np.asarray(z, dtype=complex)
        flat = z.ravel()
        out = np.zeros(flat.shape, dtype=complex)
        r = np.abs(flat)
        live = r < self.cutoff.outer
        if np.any(live):
            zl = flat[live]
            S, D = self._taylor_parts(zl.real.copy(), zl.imag.copy())
            theta = self.cutoff.value(np.abs(zl))
            if want_dbar:
                out[live] = theta * D + S * self.cutoff.dbar(zl)
            else:
                out[live] = theta * S
        return out.reshape(z.shape)[()]

    def F(self, z):
        return self._evaluate(z, want_dbar=False)

    def dbar_F(self, z):
        return self._evaluate(z, want_dbar=True)

    __call__ = F

    def bound_ratio_log(self, z) -> np.ndarray:
        """``log(|dbar F(z)| / H_M(B |Im z|))``.

        The weight is evaluated in log space, so only ``dbar F`` can underflow;
        such points give ``-inf`` (the estimate holds there trivially).
        """
        z = np.asarray(z, dtype=complex).ravel()
        t = np.abs(z.imag)
        if np.any(t < NEAR_AXIS_FLOOR):
            raise DomainError("bound ratio is not sampled for |Im z| < 1e-8")
        with np.errstate(divide="ignore"):
            lhs = np.log(np.abs(self.dbar_F(z)))
        return lhs - log_weight(self.M, self.B * t)


def plateau_sample(ext: AlmostAnalyticExtension, nx: int = 41, ny: int = 40) -> np.ndarray:
    """Deterministic sample of the plateau, off the real axis, for the bound check."""
    r0 = ext.plateau_radius
    xs = np.linspace(-r0, r0, nx)
    ys = np.geomspace(NEAR_AXIS_FLOOR, r0, ny)
    X, Y = np.meshgrid(xs, np.concatenate([-ys[::-1], ys]))
    z = (X + 1j * Y).ravel()
    return z[np.abs(z) <= r0]


def build_extension(jet: Jet, M: CarlemanSequence, B: float = 1.0, cutoff_margin: float = 0.2,
                    target_height: float | None = None, sample: bool = True) -> AlmostAnalyticExtension:
    """Almost-analytic extension of ``jet`` controlled by the weight of ``M``.

    Parameters
    ----------
    jet : Jet
        Derivative data; must also be evaluable on the cut-off band
        ``r < |x| < r + cutoff_margin``.
    M : CarlemanSequence
    B : float
        Height scale in ``H_M(B |y|)``.
    cutoff_margin : float
        Width of the band where the cutoff falls from 1 to 0 (the plateau
        extends ``cutoff_margin / 4`` beyond the base interval).
    target_height : float, optional
        Smallest ``|Im z|`` where the estimate should hold without loss; an
        :class:`AccuracyWarning` is emitted when the jet is too short for it.
    sample : bool
        Estimate ``bound_constants`` on a plateau grid.
    """
    if not B > 0:
        raise DomainError("B must be positive")
    if not cutoff_margin > 0:
        raise InvalidInputError("cutoff_margin must be positive")
    K = min(jet.n_max - 1, M.n_max)
    if K < 1:
        raise InvalidInputError("jet needs at least two derivatives")
    if target_height is not None:
        wanted = weight_eval(M, B * target_height).argmin_index
        if wanted > K:
            tau_K = switch_heights(M, B, K)[K]
            warnings.warn(
                f"jet has n_max = {jet.n_max}; the weight at height {target_height:g} selects index {wanted}, "
                f"so the estimate only holds without loss for |Im z| >= {tau_K:.3g}",
                AccuracyWarning, stacklevel=2)
    r = jet.radius
    ext = AlmostAnalyticExtension(
        jet=jet, M=M, B=float(B), order=K,
        thresholds=switch_heights(M, B, K),
        cutoff=RadialCutoff(r + cutoff_margin / 4, r + cutoff_margin),
    )
    if not sample:
        return ext
    logs = ext.bound_ratio_log(plateau_sample(ext))
    log_A = float(logs.max())
    A = math.exp(log_A) if log_A < 700 else math.inf
    return AlmostAnalyticExtension(ext.jet, ext.M, ext.B, ext.order, ext.thresholds, ext.cutoff,
                                   BoundConstants(A, float(B), log_A))


class DbarCheck(NamedTuple):
    analytic: complex
    numeric: complex
    discrepancy: float
    reliable: bool


def dbar_check(ext: AlmostAnalyticExtension, z: complex, h: float = 1e-5) -> DbarCheck:
    """Compare ``dbar_F`` with a centered-difference ``(F_x + i F_y) / 2``.

    ``reliable`` is false when the stencil straddles a cutoff kink or the
    support boundary, where the difference quotient loses its O(h^2) accuracy.
    """
    z = complex(z)
    if not h > 0:
        raise InvalidInputError("h must be positive")
    r = abs(z)
    if r - 2 * h >= ext.support_radius:
        return DbarCheck(0j, 0j, 0.0, True)
    Fx = (ext.F(z + h) - ext.F(z - h)) / (2 * h)
    Fy = (ext.F(z + 1j * h) - ext.F(z - 1j * h)) / (2 * h)
    numeric = complex(0.5 * (Fx + 1j * Fy))
    analytic = complex(ext.dbar_F(z))
    kinks = (ext.cutoff.inner, ext.cutoff.outer)
    reliable = all(abs(r - k) > 2 * h for k in kinks)
    return DbarCheck(analytic, numeric, abs(analytic - numeric), reliable)
