"""Reconstruction, error budgets, effective ill-posedness and rate studies.

The reconstruction is nodewise filtering, f_est = phi(alpha, b) * g_delta,
so everything here reduces to weighted sums over the nodes.  Divergence of
the variance functional on infinite-measure spaces is detected by nested
truncations: if doubling the truncation radius keeps adding mass in
proportion to the added measure, the integral has no finite limit.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import (BracketingFailed, Divergent, DivergentProfile,
                     PreconditionFailed)
from .indexfuncs import IndexFunction
from .multipliers import Multiplier
from .noise import (DeterministicNoise, WhiteNoiseSampler,
                    concentrated_direction, sample_white,
                    worst_case_deterministic)
from .rearrangement import (decreasing_rearrangement, distribution_function,
                            vanishes_at_infinity)
from .schemes import QualificationCertificate, Scheme, certify_qualification
from .spaces import COUNTING, LEBESGUE_INTERVAL, MeasureSpace


@dataclass(frozen=True)
class Reconstruction:
    alpha: float
    estimate: np.ndarray
    scheme_name: str


def reconstruct(scheme: Scheme, alpha: float, b: Multiplier,
                space: MeasureSpace, g_delta) -> Reconstruction:
    """f_est(s_i) = phi(alpha, b(s_i)) * g_delta(s_i)."""
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    vals = b.values_on(space)
    estimate = scheme.phi(alpha, vals) * np.asarray(g_delta)
    return Reconstruction(alpha=alpha, estimate=estimate, scheme_name=scheme.name)


def bias(scheme: Scheme, alpha: float, b: Multiplier, space: MeasureSpace,
         f) -> float:
    """Profile function: weighted L2 norm of residual(alpha, b) * f."""
    vals = b.values_on(space)
    return space.norm(scheme.residual(alpha, vals) * np.asarray(f))


@dataclass(frozen=True)
class VarianceValue:
    """Stabilized variance integral plus the last-truncation tail estimate."""

    value: float
    tail_estimate: float = 0.0

    def __float__(self):
        return self.value


def _variance_sum(scheme, alpha, b, space):
    vals = b.values_on(space)
    with np.errstate(divide="ignore", over="ignore"):
        out = float(np.sum(space.weights * scheme.phi(alpha, vals) ** 2))
    if not np.isfinite(out):
        raise ValueError(
            f"filter values overflow at alpha = {alpha:.3g}; the requested "
            "regularization regime is below double-precision resolution"
        )
    return out


def variance_integral(scheme: Scheme, alpha: float, b: Multiplier,
                      space: MeasureSpace, growth_threshold: float = 0.01,
                      ) -> VarianceValue:
    """Integral of |phi(alpha, b)|^2 dmu, with divergence detection.

    Finite-measure and counting spaces are plain weighted sums.  On
    truncated half-line/line spaces the sum is re-evaluated at radii R, 2R
    and 4R; if it grows by more than ``growth_threshold`` twice in a row
    and the per-measure growth density does not decay, the integral is
    declared Divergent (carrying the three values as diagnosis).

    Tabulated multipliers cannot be extended, so their tail is judged
    analytically: a vanishing tail puts infinite measure below every
    positive level, which diverges unless the filter vanishes there; a
    non-vanishing tail sits at the last tabulated value, which diverges
    whenever the filter is positive at that level.
    """
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if space.kind in (LEBESGUE_INTERVAL, COUNTING):
        return VarianceValue(_variance_sum(scheme, alpha, b, space))

    if b.evaluable:
        spaces = [space, space.extended(2.0), space.extended(4.0)]
        sums = [_variance_sum(scheme, alpha, b, sp) for sp in spaces]
        measures = [sp.total_measure for sp in spaces]
        g1, g2 = sums[1] - sums[0], sums[2] - sums[1]
        grew_twice = (sums[1] > sums[0] * (1 + growth_threshold)
                      and sums[2] > sums[1] * (1 + growth_threshold))
        if grew_twice:
            dens1 = g1 / (measures[1] - measures[0])
            dens2 = g2 / (measures[2] - measures[1])
            if dens1 > 0 and dens2 > 0.5 * dens1:
                raise Divergent(
                    f"variance grows with the truncation radius at alpha={alpha:.4g} "
                    f"(values {sums[0]:.6g}, {sums[1]:.6g}, {sums[2]:.6g})",
                    diagnosis={"alpha": alpha, "sums": sums, "measures": measures},
                )
        return VarianceValue(sums[2], tail_estimate=abs(g2))

    # fixed tables on an infinite-measure space: judge the tail analytically
    tail_probe = np.geomspace(alpha * 1e-12, alpha, 64)
    filter_floor = float(np.min(np.abs(scheme.phi(alpha, tail_probe))))
    if vanishes_at_infinity(b, space):
        if filter_floor > 0:
            raise Divergent(
                f"filter is bounded below by {filter_floor:.3g} on (0, alpha] while "
                "{b <= alpha} has infinite measure",
                diagnosis={"alpha": alpha, "filter_floor": filter_floor},
            )
        return VarianceValue(_variance_sum(scheme, alpha, b, space))
    tail_level = float(b.values_on(space)[-1])
    if tail_level > 0 and abs(scheme.phi(alpha, tail_level)) > 0:
        raise Divergent(
            f"declared non-vanishing tail at level {tail_level:.4g} where the "
            "filter is positive",
            diagnosis={"alpha": alpha, "tail_level": tail_level},
        )
    return VarianceValue(_variance_sum(scheme, alpha, b, space))


@dataclass(frozen=True)
class IllposednessProfile:
    """D(alpha) on a grid, with the counting/measure upper bounds."""

    alpha_grid: np.ndarray
    d_values: np.ndarray
    upper_bounds: np.ndarray
    finite: bool = True

    def __post_init__(self):
        if np.any(np.diff(self.alpha_grid) <= 0):
            raise ValueError("alpha grid must be strictly increasing")
        if np.any(np.diff(self.d_values) > 1e-12 * (1 + self.d_values[:-1])):
            raise ValueError("D(alpha) must be nonincreasing")

    def d_at(self, alpha: float) -> float:
        """Log-linear interpolation, extended off-grid with the edge slopes."""
        x = np.log(self.alpha_grid)
        y = np.log(np.maximum(self.d_values, 1e-300))
        la = np.log(alpha)
        if la <= x[0]:
            slope = (y[1] - y[0]) / (x[1] - x[0]) if x.size > 1 else 0.0
            return float(np.exp(y[0] + slope * (la - x[0])))
        if la >= x[-1]:
            slope = (y[-1] - y[-2]) / (x[-1] - x[-2]) if x.size > 1 else 0.0
            return float(np.exp(y[-1] + slope * (la - x[-1])))
        return float(np.exp(np.interp(la, x, y)))

    @classmethod
    def from_callable(cls, fn, alpha_grid) -> "IllposednessProfile":
        """Synthetic profile from a closed-form D; used in tests and bounds."""
        alpha_grid = np.asarray(alpha_grid, float)
        d = np.array([fn(a) for a in alpha_grid])
        return cls(alpha_grid, d, np.full_like(d, np.inf))


#: smallest multiplier value whose reciprocal square is representable
_SQUARE_FLOOR = 1.2e-154


def effective_illposedness(b: Multiplier, space: MeasureSpace,
                           alpha_grid=None) -> IllposednessProfile:
    """D(alpha) = (integral of b_*^{-2} over {b_* > alpha})^(1/2).

    Computed from the decreasing rearrangement and cross-validated with
    the direct-domain sum of w_i / b_i^2 over {b_i > alpha}; the two agree
    by the measure-transform identity (here, exactly: the rearrangement is
    the same weighted multiset).  ``upper_bounds`` holds the simple bound
    sqrt(d_b(alpha)) / alpha.

    The default grid stays above the floor where 1/b^2 overflows double
    precision (severely smoothing multipliers underflow fast); explicit
    grids reaching that regime raise instead of emitting infinities.
    """
    rearr = decreasing_rearrangement(b, space)  # raises if b does not vanish
    vals = b.values_on(space)
    weights = space.weights
    positive = vals[vals > 0]
    if alpha_grid is None:
        lo = max(float(np.min(positive)), _SQUARE_FLOOR)
        hi = float(b.sup_bound) * (1 - 1e-9)
        if lo >= hi:
            raise ValueError("degenerate multiplier range")
        alpha_grid = np.geomspace(lo, hi, 64)
    alpha_grid = np.asarray(alpha_grid, float)

    widths = np.diff(rearr.knots)
    r_vals = rearr.values
    d_sq = np.empty(alpha_grid.shape)
    bounds = np.empty(alpha_grid.shape)
    for i, alpha in enumerate(alpha_grid):
        mask_r = r_vals > alpha
        with np.errstate(divide="ignore", over="ignore"):
            from_rearr = float(np.sum(widths[mask_r] / r_vals[mask_r] ** 2))
        if not np.isfinite(from_rearr):
            raise ValueError(
                f"1/b^2 overflows at alpha = {alpha:.3g}; raise the grid floor"
            )
        mask_d = vals > alpha
        from_domain = float(np.sum(weights[mask_d] / vals[mask_d] ** 2))
        if abs(from_rearr - from_domain) > 1e-9 * (1.0 + from_domain):
            raise AssertionError(
                "rearrangement- and domain-side variance integrals disagree"
            )
        d_sq[i] = from_rearr
        bounds[i] = np.sqrt(distribution_function(b, space, float(alpha))) / alpha
    return IllposednessProfile(alpha_grid, np.sqrt(d_sq), bounds, finite=True)


def _assert_increasing(fn, lo, hi, label):
    samples = np.geomspace(lo, hi, 9)
    vals = np.array([fn(a) for a in samples])
    if np.any(np.diff(vals) <= 0):
        raise PreconditionFailed(f"{label} is not strictly increasing on the bracket")
    return samples, vals


def _solve_monotone(fn, target, lo, hi, label):
    _assert_increasing(fn, lo, hi, label)
    f_lo, f_hi = fn(lo), fn(hi)
    if not (f_lo <= target <= f_hi):
        raise BracketingFailed(
            f"{label}: target {target:.6g} outside [{f_lo:.6g}, {f_hi:.6g}] "
            f"on the bracket [{lo:.3g}, {hi:.3g}]"
        )
    root = brentq(lambda x: np.log(fn(np.exp(x))) - np.log(target),
                  np.log(lo), np.log(hi), xtol=1e-12)
    return float(np.exp(root))


def choose_alpha_deterministic(phi: IndexFunction, delta: float,
                               bracket=(1e-12, 1.0)) -> float:
    """A-priori choice: solve alpha * phi(alpha) = delta by bisection."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    lo = max(bracket[0], phi.domain[0] * (1 + 1e-9) if phi.domain[0] > 0 else bracket[0])
    hi = min(bracket[1], phi.domain[1])
    return _solve_monotone(lambda a: a * float(phi(a)), delta, lo, hi,
                           "alpha * phi(alpha)")


def choose_alpha_white(phi: IndexFunction, profile: IllposednessProfile,
                       delta: float, bracket=(1e-12, None)) -> float:
    """A-priori choice under white noise: solve phi(alpha) = delta * D(alpha)."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    if not profile.finite:
        raise DivergentProfile("effective ill-posedness profile is divergent")
    lo = max(bracket[0], phi.domain[0] * (1 + 1e-9) if phi.domain[0] > 0 else bracket[0])
    hi = bracket[1] if bracket[1] is not None else float(profile.alpha_grid[-1])
    hi = min(hi, phi.domain[1])
    return _solve_monotone(lambda a: float(phi(a)) / profile.d_at(a), delta,
                           lo, hi, "phi(alpha) / D(alpha)")


def deterministic_error_bound(c_phi: float, c_minus1: float, phi: IndexFunction,
                              delta: float, alpha: float,
                              source_scale: float = 1.0) -> float:
    """C_phi * phi(alpha) + C_-1 * delta / alpha (bias scaled for ||v|| != 1)."""
    return c_phi * source_scale * float(phi(alpha)) + c_minus1 * delta / alpha


def deterministic_bound_at_star(c_phi: float, c_minus1: float, phi: IndexFunction,
                                alpha_star: float, source_scale: float = 1.0) -> float:
    return 2.0 * max(c_phi * source_scale, c_minus1) * float(phi(alpha_star))


def white_error_bound(c_phi: float, c_0: float, phi: IndexFunction,
                      profile: IllposednessProfile, delta: float, alpha: float,
                      source_scale: float = 1.0) -> float:
    """RMS bound sqrt((C_phi phi(alpha))^2 + delta^2 (C_0+1)^2 D(alpha)^2)."""
    term_b = c_phi * source_scale * float(phi(alpha))
    term_n = delta * (c_0 + 1.0) * profile.d_at(alpha)
    return float(np.hypot(term_b, term_n))


def white_bound_at_star(c_phi: float, c_0: float, phi: IndexFunction,
                        alpha_star: float, source_scale: float = 1.0) -> float:
    return np.sqrt(2.0) * max(c_phi * source_scale, c_0 + 1.0) * float(phi(alpha_star))


@dataclass(frozen=True)
class ErrorBudget:
    bias: float
    noise_term: float  # deterministic: delta*||phi(b) xi||; white: mean delta^2 ||phi(b) xi||^2
    total: float
    bound: float = np.nan


@dataclass(frozen=True)
class McResult:
    rms: float
    stderr: float
    budget: ErrorBudget
    cross_term_mean: float
    cross_term_stderr: float
    n_reps: int


def evaluate_deterministic(scheme: Scheme, alpha: float, b: Multiplier,
                           space: MeasureSpace, f, delta: float,
                           noise: DeterministicNoise,
                           bound: float = np.nan) -> ErrorBudget:
    """Error of one reconstruction from data corrupted by a fixed noise."""
    f = np.asarray(f, float)
    vals = b.values_on(space)
    g_delta = vals * f + delta * noise.values
    est = reconstruct(scheme, alpha, b, space, g_delta).estimate
    total = space.norm(f - est)
    noise_term = delta * space.norm(scheme.phi(alpha, vals) * noise.values)
    return ErrorBudget(bias=bias(scheme, alpha, b, space, f),
                       noise_term=noise_term, total=total, bound=bound)


def monte_carlo_rms(scheme: Scheme, alpha: float, b: Multiplier,
                    space: MeasureSpace, f, delta: float,
                    sampler: WhiteNoiseSampler, n_reps: int,
                    bound: float = np.nan, check_variance: bool = True) -> McResult:
    """RMS error over replications with disjoint noise streams.

    The squared bias enters exactly; the variance and the cross term
    2*delta*<R(b)f, phi(b)xi> are averaged empirically.  Raises
    DivergentProfile when the variance integral of the underlying problem
    diverges (the truncated sum would otherwise silently depend on the
    truncation radius).
    """
    if n_reps < 2:
        raise ValueError("need n_reps >= 2")
    f = np.asarray(f, float)
    vals = b.values_on(space)
    if delta > 0 and check_variance:
        try:
            variance_integral(scheme, alpha, b, space)
        except Divergent as exc:
            raise DivergentProfile(str(exc), diagnosis=exc.diagnosis) from exc
    phi_v = scheme.phi(alpha, vals)
    res_f = scheme.residual(alpha, vals) * f
    bias_exact = space.norm(res_f)

    sq_errors = np.empty(n_reps)
    crosses = np.empty(n_reps)
    noise_sq = np.empty(n_reps)
    for r in range(n_reps):
        xi = sample_white(sampler.with_stream(sampler.stream_id + r), space)
        g_delta = vals * f + delta * xi
        err = f - phi_v * g_delta
        sq_errors[r] = space.norm(err) ** 2
        crosses[r] = 2.0 * delta * space.inner(res_f, phi_v * xi)
        noise_sq[r] = delta**2 * space.norm(phi_v * xi) ** 2

    mean_sq = float(np.mean(sq_errors))
    rms = float(np.sqrt(mean_sq))
    se_mean = float(np.std(sq_errors, ddof=1) / np.sqrt(n_reps))
    stderr = se_mean / (2.0 * rms) if rms > 0 else 0.0
    cross_mean = float(np.mean(crosses))
    cross_se = float(np.std(crosses, ddof=1) / np.sqrt(n_reps))
    budget = ErrorBudget(bias=bias_exact, noise_term=float(np.mean(noise_sq)),
                         total=rms, bound=bound)
    return McResult(rms=rms, stderr=stderr, budget=budget,
                    cross_term_mean=cross_mean, cross_term_stderr=cross_se,
                    n_reps=n_reps)


# ---------------------------------------------------------------------------
# rate studies

@dataclass(frozen=True)
class MultiplicationProblem:
    """A concrete instance: multiplier, space, true solution."""

    b: Multiplier
    space: MeasureSpace
    f_true: np.ndarray
    name: str = ""
    source_scale: float = 1.0  # ||v|| when the source element is not normalized


@dataclass(frozen=True)
class RateRow:
    delta: float
    alpha_star: float
    error: float
    stderr: float
    bias: float
    variance_term: float
    bound: float
    violated: bool


@dataclass(frozen=True)
class RateStudyResult:
    mode: str
    rows: tuple
    fitted_slope: float | None
    theoretical_slope: float | None
    c_phi: float
    seed: int

    @property
    def violations(self) -> int:
        return sum(r.violated for r in self.rows)


def fit_loglog_slope(xs, ys, trim_fraction: float = 0.1) -> float | None:
    """Least-squares slope of log y against log x on the middle points.

    Trims ceil(trim_fraction * n) points from each end (endpoint
    transients); returns None if fewer than two points remain or any value
    is nonpositive.
    """
    xs = np.asarray(xs, float)
    ys = np.asarray(ys, float)
    order = np.argsort(xs)
    xs, ys = xs[order], ys[order]
    n = xs.size
    k = int(np.ceil(n * trim_fraction))
    if n - 2 * k < 2:
        k = 0
    xs, ys = xs[k:n - k], ys[k:n - k]
    if xs.size < 2 or np.any(xs <= 0) or np.any(ys <= 0):
        return None
    slope = np.polyfit(np.log(xs), np.log(ys), 1)[0]
    return float(slope)


DETERMINISTIC = "deterministic"
WHITE = "white"


def evaluate_delta(problem: MultiplicationProblem, scheme: Scheme,
                   phi: IndexFunction, delta: float, mode: str,
                   c_phi: float, n_reps: int = 1, seed: int = 0,
                   stream_base: int = 0,
                   profile: IllposednessProfile | None = None) -> RateRow:
    """One row of a rate study: choose alpha*, evaluate error and bound.

    Deterministic mode perturbs the data with the worst admissible noise
    (all mass at the node where the filter is largest, attaining the
    sup-norm of the filter); white mode averages ``n_reps`` Monte Carlo
    replications on noise streams ``stream_base + r``.  The bound column
    is the simplified at-alpha-star form of the a-priori error estimate.
    """
    b, space, f = problem.b, problem.space, problem.f_true
    vals = b.values_on(space)
    rho = problem.source_scale
    if mode == DETERMINISTIC:
        alpha_star = choose_alpha_deterministic(
            phi, delta, bracket=(1e-12, min(1.0, float(b.sup_bound))))
        phi_v = np.abs(scheme.phi(alpha_star, vals))
        worst = worst_case_deterministic(
            concentrated_direction(space, int(np.argmax(phi_v))), space)
        bound = deterministic_bound_at_star(c_phi, scheme.c_minus1,
                                            phi, alpha_star, rho)
        budget = evaluate_deterministic(scheme, alpha_star, b, space, f,
                                        delta, worst, bound)
        err, stderr = budget.total, 0.0
        violated = err > bound * (1 + 1e-9)
    elif mode == WHITE:
        if profile is None:
            raise ValueError("white mode needs an ill-posedness profile")
        alpha_star = choose_alpha_white(phi, profile, delta)
        bound = white_bound_at_star(c_phi, scheme.c_0, phi, alpha_star, rho)
        sampler = WhiteNoiseSampler(seed, stream_id=stream_base)
        mc = monte_carlo_rms(scheme, alpha_star, b, space, f, delta,
                             sampler, n_reps, bound=bound)
        err, stderr = mc.rms, mc.stderr
        budget = mc.budget
        violated = err > bound + 2.0 * stderr
    else:
        raise ValueError(f"unknown mode '{mode}'")
    return RateRow(delta=float(delta), alpha_star=alpha_star, error=err,
                   stderr=stderr, bias=budget.bias,
                   variance_term=budget.noise_term, bound=bound,
                   violated=bool(violated))


def rate_study(problem: MultiplicationProblem, scheme: Scheme,
               phi: IndexFunction, deltas, n_reps: int, mode: str,
               seed: int = 0,
               certificate: QualificationCertificate | None = None,
               profile: IllposednessProfile | None = None) -> RateStudyResult:
    """Empirical error against delta with the matching a-priori choice.

    Each row records the a-priori error bound at alpha* and a violation
    flag; the fitted and theoretical slopes are least-squares fits of
    log(error) and log(phi(alpha*)) against log(delta) on the middle 80%
    of the delta points.
    """
    deltas = np.asarray(sorted(deltas, reverse=True), float)
    if deltas.size < 4:
        raise ValueError("a rate study needs at least 4 delta values")
    if np.any(deltas <= 0):
        raise ValueError("deltas must be positive")
    if mode not in (DETERMINISTIC, WHITE):
        raise ValueError(f"unknown mode '{mode}'")

    cert = certificate or certify_qualification(scheme, phi)
    if not cert.passed:
        raise PreconditionFailed(
            f"scheme {scheme.name} does not certify qualification {phi.name}"
        )
    if mode == WHITE and profile is None:
        profile = effective_illposedness(problem.b, problem.space)

    rows = [evaluate_delta(problem, scheme, phi, float(delta), mode,
                           cert.c_phi, n_reps=n_reps, seed=seed,
                           stream_base=100_000 * (k + 1), profile=profile)
            for k, delta in enumerate(deltas)]

    fitted = fit_loglog_slope(deltas, [r.error for r in rows])
    theoretical = fit_loglog_slope(
        deltas, [problem.source_scale * float(phi(r.alpha_star)) for r in rows])
    return RateStudyResult(mode=mode, rows=tuple(rows), fitted_slope=fitted,
                           theoretical_slope=theoretical, c_phi=cert.c_phi,
                           seed=seed)
