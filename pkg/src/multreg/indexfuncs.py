"""Index functions: strictly increasing, continuous, vanishing at 0+.

These carry both smoothness (source conditions) and qualification.  All
evaluators are vectorized over numpy arrays.  A function may declare a
finite validity ``domain``; evaluation outside it raises, solvers clamp
their brackets to it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionFailed


class IndexFunction:
    """Base class; subclasses implement ``_eval`` on valid positive input."""

    name = "index"
    #: closed or half-open validity interval (lo, hi]; np.inf allowed.
    domain: tuple[float, float] = (0.0, np.inf)

    def __call__(self, t):
        arr = np.asarray(t, dtype=float)
        lo, hi = self.domain
        if np.any(arr <= lo) or np.any(arr > hi * (1 + 1e-12)):
            raise ValueError(
                f"{self.name}: argument outside domain ({lo:.3g}, {hi:.3g}]"
            )
        out = self._eval(arr)
        return float(out) if np.isscalar(t) or arr.ndim == 0 else out

    def _eval(self, t: np.ndarray) -> np.ndarray:  # pragma: no cover - abstract
        raise NotImplementedError

    def inverse(self, y: float) -> float:
        """Inverse by bisection on the (monotone) evaluator."""
        lo, hi = self._finite_bracket()
        flo, fhi = self(lo), self(hi)
        if not (flo <= y <= fhi):
            raise ValueError(f"{self.name}: value {y:.6g} outside range "
                             f"[{flo:.6g}, {fhi:.6g}]")
        for _ in range(200):
            mid = np.sqrt(lo * hi)
            if self(mid) < y:
                lo = mid
            else:
                hi = mid
            if hi / lo < 1 + 1e-14:
                break
        return float(np.sqrt(lo * hi))

    def _finite_bracket(self) -> tuple[float, float]:
        lo, hi = self.domain
        return max(lo, 1e-300) * (1 + 1e-15) if lo > 0 else 1e-300, min(hi, 1e12)

    def power(self, p: float) -> "IndexFunction":
        """phi**p, again an index function for p > 0."""
        return _PowerOf(self, p)


@dataclass(frozen=True)
class PowerIndex(IndexFunction):
    """phi(t) = t**nu."""

    nu: float
    name: str = "power"

    def __post_init__(self):
        if self.nu <= 0:
            raise ValueError("nu must be positive")

    def _eval(self, t):
        return t ** self.nu

    def inverse(self, y):
        return float(y) ** (1.0 / self.nu)


@dataclass(frozen=True)
class LogPowerIndex(IndexFunction):
    """phi(t) = t**nu * log(1/t)**(-beta) on (0, t_max), t_max < 1."""

    nu: float
    beta: float
    t_max: float = 0.5
    name: str = "log_power"

    def __post_init__(self):
        if self.nu <= 0 or not (0 < self.t_max < 1):
            raise ValueError("need nu > 0 and 0 < t_max < 1")
        # strict monotonicity requires nu*log(1/t) + beta > 0 on the domain
        if self.nu * np.log(1.0 / self.t_max) + self.beta <= 0:
            raise ValueError("not increasing on the requested domain")
        object.__setattr__(self, "domain", (0.0, self.t_max))

    def _eval(self, t):
        return t ** self.nu * np.log(1.0 / t) ** (-self.beta)


class TableIndex(IndexFunction):
    """Monotone table with log-linear interpolation between knots.

    Values strictly increase with the abscissae; evaluation outside the
    tabulated range is refused (``domain`` is the table's span).
    """

    def __init__(self, ts, values, name: str = "custom"):
        ts = np.asarray(ts, dtype=float)
        values = np.asarray(values, dtype=float)
        if ts.ndim != 1 or ts.size < 2 or values.shape != ts.shape:
            raise ValueError("need matching 1-d tables with >= 2 entries")
        if np.any(ts <= 0) or np.any(values <= 0):
            raise ValueError("table must be positive for log interpolation")
        if np.any(np.diff(ts) <= 0) or np.any(np.diff(values) <= 0):
            raise ValueError("table must be strictly increasing")
        self._log_t = np.log(ts)
        self._log_v = np.log(values)
        self.ts = ts
        self.values = values
        self.name = name
        self.domain = (float(ts[0]) * (1 - 1e-12), float(ts[-1]))

    def _eval(self, t):
        return np.exp(np.interp(np.log(t), self._log_t, self._log_v))

    def inverse(self, y):
        if not (self.values[0] <= y <= self.values[-1]):
            raise ValueError(f"{self.name}: value outside tabulated range")
        return float(np.exp(np.interp(np.log(y), self._log_v, self._log_t)))


class _PowerOf(IndexFunction):
    def __init__(self, base: IndexFunction, p: float):
        if p <= 0:
            raise ValueError("p must be positive")
        self._base = base
        self._p = p
        self.name = f"{base.name}^{p:g}"
        self.domain = base.domain

    def _eval(self, t):
        return np.asarray(self._base(t)) ** self._p

    def inverse(self, y):
        return self._base.inverse(float(y) ** (1.0 / self._p))


def validate_index_function(phi: IndexFunction, n_probes: int = 12) -> None:
    """Check strict increase and phi(t) -> 0 on probe points 10**(-k).

    Probes are clipped to the declared domain; raises PreconditionFailed
    on violation.
    """
    lo, hi = phi.domain
    top = min(hi, 1.0)
    probes = np.array([top * 10.0 ** (-k) for k in range(n_probes)])
    probes = probes[probes > lo]
    if probes.size < 3:
        raise PreconditionFailed(f"{phi.name}: domain too small to probe")
    vals = np.asarray(phi(probes))
    if np.any(vals <= 0) or np.any(np.diff(vals) >= 0):
        # probes descend, so values must strictly descend as well
        raise PreconditionFailed(f"{phi.name}: not strictly increasing on probes")
    if not vals[-1] < vals[0] * 1e-3:
        raise PreconditionFailed(f"{phi.name}: does not appear to vanish at 0+")


def index_function_from_spec(spec: dict) -> IndexFunction:
    """Build an index function from a config mapping.

    Recognized families: ``power`` (nu), ``log_power`` (nu, beta, t_max),
    ``table`` (ts, values).  The ``reciprocal_measure`` family is built by
    the smoothness module from a multiplier, not from a bare config.
    """
    family = spec.get("family", "power")
    if family == "power":
        return PowerIndex(float(spec.get("nu", 1.0)))
    if family == "log_power":
        return LogPowerIndex(float(spec["nu"]), float(spec["beta"]),
                             float(spec.get("t_max", 0.5)))
    if family == "table":
        return TableIndex(spec["ts"], spec["values"])
    raise ValueError(f"unknown index function family '{family}'")
