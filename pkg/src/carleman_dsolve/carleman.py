"""Carleman sequences, their weight function and finite-sample class diagnostics.

A sequence ``M = (M_n)`` is stored through ``log M_n`` so that rapidly growing
builtins such as ``(n!)**2`` stay representable far beyond ``n = 170``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np
from scipy.special import gammaln

from .errors import DomainError, InvalidInputError

BUILTIN_SEQUENCES = ("factorial", "factorial_squared", "factorial_log")

# relative tolerance used to detect ties between weight terms
_TIE_RTOL = 1e-12


@dataclass(frozen=True, eq=False)
class CarlemanSequence:
    """Strictly positive sequence ``M_0, ..., M_{n_max}``.

    Parameters
    ----------
    log_terms : array_like
        ``log M_n`` for ``n = 0..n_max``.
    name : str
        Builtin name, or ``"explicit"`` for user supplied arrays.
    """

    log_terms: np.ndarray
    name: str = "explicit"

    def __post_init__(self):
        lt = np.array(self.log_terms, dtype=float)
        if lt.ndim != 1 or lt.size == 0:
            raise InvalidInputError("Carleman sequence is empty")
        if not np.all(np.isfinite(lt)):
            raise InvalidInputError("Carleman sequence terms must be strictly positive and finite")
        if lt.size < 9:
            raise InvalidInputError(f"need n_max >= 8 (got n_max = {lt.size - 1})")
        lt.setflags(write=False)
        object.__setattr__(self, "log_terms", lt)

    @classmethod
    def from_terms(cls, terms: Sequence[float], name: str = "explicit") -> "CarlemanSequence":
        t = np.asarray(terms, dtype=float)
        if t.size == 0:
            raise InvalidInputError("Carleman sequence is empty")
        if not np.all(t > 0):
            raise InvalidInputError("Carleman sequence terms must be strictly positive")
        return cls(np.log(t), name)

    @classmethod
    def builtin(cls, name: str, n_max: int = 60) -> "CarlemanSequence":
        n = np.arange(n_max + 1, dtype=float)
        log_fact = gammaln(n + 1)
        if name == "factorial":
            lt = log_fact
        elif name == "factorial_squared":
            lt = 2 * log_fact
        elif name == "factorial_log":
            lt = log_fact + n * np.log(np.log(n + math.e))
        else:
            raise InvalidInputError(f"unknown builtin sequence {name!r}; choose from {BUILTIN_SEQUENCES}")
        return cls(lt, name)

    @classmethod
    def from_config(cls, spec) -> "CarlemanSequence":
        """Build from a config value: a builtin name, a term list, or ``{"builtin", "n_max"}``."""
        if isinstance(spec, str):
            return cls.builtin(spec)
        if isinstance(spec, dict):
            if "builtin" in spec:
                return cls.builtin(spec["builtin"], int(spec.get("n_max", 60)))
            if "terms" in spec:
                return cls.from_terms(spec["terms"])
            raise InvalidInputError("sequence dict needs 'builtin' or 'terms'")
        return cls.from_terms(spec)

    def to_config(self):
        if self.name in BUILTIN_SEQUENCES:
            return {"builtin": self.name, "n_max": self.n_max}
        return {"terms": [float(v) for v in np.exp(self.log_terms)]}

    @property
    def n_max(self) -> int:
        return self.log_terms.size - 1

    def term(self, n: int) -> float:
        return math.exp(self.log_terms[n])

    @property
    def log_normalized(self) -> np.ndarray:
        """``log(M_n / n!)``."""
        return self.log_terms - gammaln(np.arange(self.n_max + 1) + 1.0)

    def scaled(self, c: float) -> "CarlemanSequence":
        if not c > 0:
            raise DomainError("scale factor must be positive")
        return CarlemanSequence(self.log_terms + math.log(c), self.name if c == 1 else "explicit")


class WeightValue(NamedTuple):
    value: float
    argmin_index: int
    upper_bound: bool
    log_value: float


def weight_eval(M: CarlemanSequence, x: float) -> WeightValue:
    """Evaluate ``H_M(x) = inf_n (M_n / n!) x**n`` over the available indices.

    Ties are broken towards the smallest index. ``upper_bound`` is set when the
    terms are still strictly decreasing at ``n_max``, in which case the true
    infimum lies below the returned value.
    """
    if not x > 0:
        raise DomainError(f"weight argument must be positive, got {x!r}")
    logs = M.log_normalized + np.arange(M.n_max + 1) * math.log(x)
    lo = logs.min()
    idx = int(np.flatnonzero(logs <= lo + _TIE_RTOL * max(1.0, abs(lo)))[0])
    upper = idx == M.n_max and logs[-1] < logs[-2] - _TIE_RTOL * max(1.0, abs(logs[-2]))
    return WeightValue(math.exp(logs[idx]), idx, bool(upper), float(logs[idx]))


def log_weight(M: CarlemanSequence, xs) -> np.ndarray:
    """Vectorised ``log H_M(x)`` for positive ``xs``."""
    xs = np.asarray(xs, dtype=float)
    if np.any(~(xs > 0)):
        raise DomainError("weight arguments must be positive")
    n = np.arange(M.n_max + 1)
    logs = M.log_normalized[:, None] + n[:, None] * np.log(xs.ravel())[None, :]
    return logs.min(axis=0).reshape(xs.shape)


@dataclass(frozen=True)
class ClassDiagnostics:
    logconvex_ok: bool
    sup_ratio_estimate: float
    root_growth: list
    dc_partial_sum: float
    quasianalytic_hint: str
    first_logconvex_violation: int | None = None

    def as_dict(self) -> dict:
        return {
            "logconvex_ok": self.logconvex_ok,
            "sup_ratio_estimate": self.sup_ratio_estimate,
            "root_growth": list(self.root_growth),
            "dc_partial_sum": self.dc_partial_sum,
            "quasianalytic_hint": self.quasianalytic_hint,
            "first_logconvex_violation": self.first_logconvex_violation,
        }


def _quasianalytic_hint(ratios: np.ndarray) -> str:
    # ratios[n] = M_n / M_{n+1}; look at the decay of the upper half only
    n = np.arange(1, ratios.size + 1, dtype=float)
    half = ratios.size // 2
    tail_n, tail_r = n[half:], ratios[half:]
    if tail_r.size < 3 or np.any(tail_r <= 0):
        return "inconclusive"
    p = -np.polyfit(np.log(tail_n), np.log(tail_r), 1)[0]
    if p < 1.1:
        return "divergent trend"
    if p < 1.5:
        # borderline decay such as 1/(n log n): check whether n log(n) r_n stays put
        scaled = tail_n * np.log(tail_n + 1) * tail_r
        if scaled[-1] >= 0.5 * scaled[0]:
            return "divergent trend (borderline)"
        return "inconclusive"
    return "convergent trend"


def diagnose_class(M: CarlemanSequence) -> ClassDiagnostics:
    """Finite-sample checks of the regularity conditions.

    The Denjoy-Carleman partial sum ``sum M_n / M_{n+1}`` and the derived hint
    are heuristics only; no finite computation decides quasianalyticity.
    """
    lt = M.log_terms
    ln = M.log_normalized
    N = M.n_max

    second = ln[:-2] + ln[2:] - 2 * ln[1:-1]
    slack = _TIE_RTOL * (np.abs(ln[:-2]) + np.abs(ln[2:]) + 1.0)
    bad = np.flatnonzero(second < -slack)
    logconvex_ok = bad.size == 0

    n = np.arange(1, N, dtype=float)
    log_ratio = (lt[2:] - np.log(n + 1) - lt[1:-1]) / n
    sup_ratio = float(np.exp(log_ratio.max()))

    k = np.arange(1, N + 1, dtype=float)
    root_growth = [float(v) for v in np.exp(lt[1:] / k)]

    ratios = np.exp(lt[:-1] - lt[1:])
    return ClassDiagnostics(
        logconvex_ok=bool(logconvex_ok),
        sup_ratio_estimate=sup_ratio,
        root_growth=root_growth,
        dc_partial_sum=float(ratios.sum()),
        quasianalytic_hint=_quasianalytic_hint(ratios),
        first_logconvex_violation=None if logconvex_ok else int(bad[0]),
    )
