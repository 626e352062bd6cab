"""Regularization families Phi_alpha with residuals and certification.

A scheme is a family of filter functions approximating 1/t.  The three
built-ins are spectral cut-off, Lavrentiev and the Tikhonov/Wiener form
t/(alpha + t^2); ``truncate`` kills any filter on {t <= alpha}, which is
what white-noise variance bounds on infinite-measure spaces require.

Certification is a sound-but-incomplete grid test: the axioms are checked
on finite probe grids, and qualification constants must stay stable when
the grids are refined and extended, since the underlying suprema run over
all t >= 0 and all alpha > 0.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import AxiomViolation
from .indexfuncs import IndexFunction

_LIMIT_EXPONENT = 30      # axiom (I) is probed along alpha = 2^-n, n <= 30
_LIMIT_TOL = 1e-3


@dataclass(frozen=True)
class Scheme:
    """Filter family phi(alpha, t) with stored constants.

    ``c_minus1`` bounds |phi| <= c_minus1 / alpha, ``c_0`` bounds the
    residual; ``truncated`` records that phi vanishes on {t <= alpha} by
    construction.  ``_residual`` optionally holds the analytically
    simplified form of 1 - t*phi (the cut-off indicator, say), which
    avoids amplifying the roundoff of t*(1/t) in qualification suprema.
    """

    name: str
    c_minus1: float
    c_0: float
    truncated: bool
    _filter: Callable[[float, np.ndarray], np.ndarray] = field(repr=False)
    _residual: Callable[[float, np.ndarray], np.ndarray] | None = \
        field(default=None, repr=False)

    def phi(self, alpha: float, t):
        if alpha <= 0:
            raise ValueError("alpha must be positive")
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        out = self._filter(alpha, t_arr)
        return float(out[0]) if np.ndim(t) == 0 else out

    def residual(self, alpha: float, t):
        """R_alpha(t) = 1 - t * phi(alpha, t)."""
        t_arr = np.atleast_1d(np.asarray(t, dtype=float))
        if self._residual is not None:
            out = self._residual(alpha, t_arr)
        else:
            out = 1.0 - t_arr * self._filter(alpha, t_arr)
        return float(out[0]) if np.ndim(t) == 0 else out


def spectral_cutoff() -> Scheme:
    def f(alpha, t):
        out = np.zeros_like(t)
        above = t > alpha
        out[above] = 1.0 / t[above]
        return out

    def r(alpha, t):
        # 1 - t*(1/t) simplified exactly: the indicator of {t <= alpha}
        return np.where(t > alpha, 0.0, 1.0)

    return Scheme("cutoff", c_minus1=1.0, c_0=1.0, truncated=True,
                  _filter=f, _residual=r)


def lavrentiev() -> Scheme:
    def f(alpha, t):
        return 1.0 / (t + alpha)

    return Scheme("lavrentiev", c_minus1=1.0, c_0=1.0, truncated=False, _filter=f)


def tikhonov_wiener() -> Scheme:
    """phi(alpha, t) = t / (alpha + t^2), the Wiener-filter form for real b.

    The stored c_minus1 = 1 is valid for alpha <= 4 (t/(alpha+t^2) <= 1/alpha
    there); the sharp sup 1/(2 sqrt(alpha)) is not of the C/alpha form.
    """

    def f(alpha, t):
        return t / (alpha + t * t)

    return Scheme("tikhonov", c_minus1=1.0, c_0=1.0, truncated=False, _filter=f)


def truncate(scheme: Scheme) -> Scheme:
    """Modified family chi_(alpha,inf)(t) * phi(alpha, t); same constants.

    The residual becomes chi_(alpha,inf) * R_parent + chi_(0,alpha].
    """
    base = scheme._filter
    parent_residual = scheme.residual

    def f(alpha, t):
        out = base(alpha, t)
        return np.where(t > alpha, out, 0.0)

    def r(alpha, t):
        return np.where(t > alpha, parent_residual(alpha, t), 1.0)

    name = scheme.name if scheme.name.startswith("truncated:") \
        else f"truncated:{scheme.name}"
    return Scheme(name, scheme.c_minus1, scheme.c_0, truncated=True,
                  _filter=f, _residual=r)


_BUILTINS = {
    "cutoff": spectral_cutoff,
    "lavrentiev": lavrentiev,
    "tikhonov": tikhonov_wiener,
}


def scheme_by_name(name: str) -> Scheme:
    """Resolve "cutoff" | "lavrentiev" | "tikhonov" | "truncated:<name>"."""
    if name.startswith("truncated:"):
        return truncate(scheme_by_name(name[len("truncated:"):]))
    try:
        return _BUILTINS[name]()
    except KeyError:
        raise ValueError(f"unknown scheme '{name}'") from None


def default_axiom_grids(t_max: float = 1.0):
    # the limit check at alpha = 2^-30 with tolerance 1e-3 needs t not too
    # small: slower families (Lavrentiev, Tikhonov) honestly fail below ~1e-3
    alpha_grid = np.logspace(-8, 0, 25)
    t_grid = np.logspace(-3, np.log10(t_max), 25)
    return alpha_grid, t_grid


def certify_axioms(scheme: Scheme, alpha_grid=None, t_grid=None,
                   raise_on_failure: bool = False) -> bool:
    """Grid check of the three defining properties.

    (I)  t * phi(alpha, t) -> 1 along alpha = 2^-n, monotonically, reaching
         |residual| <= 1e-3 at n = 30;
    (II) |phi(alpha, t)| <= c_minus1 / alpha on the grid;
    (III)|residual(alpha, t)| <= c_0 on the grid.
    """
    if alpha_grid is None or t_grid is None:
        a_def, t_def = default_axiom_grids()
        alpha_grid = a_def if alpha_grid is None else np.asarray(alpha_grid, float)
        t_grid = t_def if t_grid is None else np.asarray(t_grid, float)
    alpha_grid = np.asarray(alpha_grid, float)
    t_grid = np.asarray(t_grid, float)
    if alpha_grid.size == 0 or t_grid.size == 0 or np.any(alpha_grid <= 0) \
            or np.any(t_grid <= 0):
        raise ValueError("grids must be nonempty and positive")

    def fail(item, alpha, t, detail=""):
        if raise_on_failure:
            raise AxiomViolation(item, float(alpha), float(t), detail)
        return False

    alphas_limit = 0.5 ** np.arange(_LIMIT_EXPONENT + 1)
    for t in t_grid:
        r = np.abs([scheme.residual(a, t) for a in alphas_limit])
        if np.any(np.diff(r) > 1e-9):
            idx = int(np.argmax(np.diff(r) > 1e-9))
            return fail("I", alphas_limit[idx + 1], t, "approach not monotone")
        if r[-1] > _LIMIT_TOL:
            return fail("I", alphas_limit[-1], t,
                        f"|residual| = {r[-1]:.3g} > {_LIMIT_TOL}")

    for alpha in alpha_grid:
        phi_vals = np.abs(scheme.phi(alpha, t_grid))
        if np.any(phi_vals > scheme.c_minus1 / alpha * (1 + 1e-12)):
            t_bad = t_grid[int(np.argmax(phi_vals))]
            return fail("II", alpha, t_bad)
        res_vals = np.abs(scheme.residual(alpha, t_grid))
        if np.any(res_vals > scheme.c_0 * (1 + 1e-12)):
            t_bad = t_grid[int(np.argmax(res_vals))]
            return fail("III", alpha, t_bad)
    return True


@dataclass(frozen=True)
class QualificationCertificate:
    scheme_name: str
    phi: IndexFunction
    c_phi: float
    alpha_grid: np.ndarray
    t_grid: np.ndarray
    passed: bool

    def __str__(self):
        status = "passed" if self.passed else "FAILED"
        return (f"qualification({self.phi.name}) for {self.scheme_name}: "
                f"{status}, C_phi = {self.c_phi:.6g}")


def _cphi_estimate(scheme, phi, alphas, ts) -> float:
    lo, hi = phi.domain
    ts = ts[(ts > lo) & (ts <= hi)]
    best = 0.0
    for alpha in alphas:
        grid = ts
        if lo < alpha <= hi:
            grid = np.append(ts, alpha)  # the supremum is often attained at t = alpha
        num = float(np.max(np.abs(scheme.residual(alpha, grid)) * phi(grid)))
        best = max(best, num / phi(alpha))
    return best


def default_qualification_grids(t_max: float = 1.0):
    alpha_grid = np.logspace(-6, 0, 49)
    t_grid = np.logspace(-8, np.log10(t_max), 512)
    return alpha_grid, t_grid


def certify_qualification(scheme: Scheme, phi: IndexFunction,
                          alpha_grid=None, t_grid=None,
                          stability_factor: float = 1.1,
                          parent_certificate: "QualificationCertificate | None" = None,
                          ) -> QualificationCertificate:
    """Estimate C_phi = sup_alpha sup_t |R_alpha(t)| phi(t) / phi(alpha).

    The estimate is recomputed on a refined grid (doubled density, alpha
    extended a decade down, t a decade up); the certificate passes iff the
    two estimates agree within ``stability_factor``.  Schemes whose true
    supremum diverges (e.g. Lavrentiev with phi(t) = t^1.5) blow up under
    this extension and fail.

    For a truncated scheme, pass the parent's certificate to additionally
    assert C_phi <= max(parent C_phi, C_0).
    """
    if alpha_grid is None or t_grid is None:
        a_def, t_def = default_qualification_grids()
        alpha_grid = a_def if alpha_grid is None else np.asarray(alpha_grid, float)
        t_grid = t_def if t_grid is None else np.asarray(t_grid, float)
    alpha_grid = np.asarray(alpha_grid, float)
    t_grid = np.asarray(t_grid, float)

    # clamp the alpha range into phi's validity window
    lo, hi = phi.domain
    alpha_grid = alpha_grid[(alpha_grid > lo) & (alpha_grid <= hi)]
    if alpha_grid.size == 0:
        raise ValueError("no admissible alpha probes inside phi's domain")

    base = _cphi_estimate(scheme, phi, alpha_grid, t_grid)
    alpha_fine = np.geomspace(alpha_grid[0] / 10.0, alpha_grid[-1],
                              2 * alpha_grid.size)
    alpha_fine = alpha_fine[(alpha_fine > lo) & (alpha_fine <= hi)]
    t_fine = np.geomspace(t_grid[0], min(t_grid[-1] * 10.0, 1e12),
                          2 * t_grid.size)
    refined = _cphi_estimate(scheme, phi, alpha_fine, t_fine)

    passed = bool(np.isfinite(base) and np.isfinite(refined) and base > 0
                  and refined <= stability_factor * base + 1e-12)
    c_phi = max(base, refined)
    if passed and parent_certificate is not None:
        limit = max(parent_certificate.c_phi, scheme.c_0)
        passed = c_phi <= limit * (1 + 1e-9)
    return QualificationCertificate(scheme.name, phi, c_phi,
                                    alpha_grid, t_grid, passed)
