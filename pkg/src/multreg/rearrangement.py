"""Distribution functions and monotone rearrangements of multipliers.

The discretized multiplier is a weighted multiset of values; both
rearrangements are right-continuous step functions on the cumulative
weight axis, which applies the inf/sup definitions literally to the
discrete data (ties broken by a stable sort over node index).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (DominationNotDetected, PreconditionFailed,
                     RearrangementUndefined, RequiresFiniteMeasure)
from .indexfuncs import IndexFunction
from .multipliers import Multiplier, PiecewiseMonotone, Tabulated
from .spaces import LEBESGUE_HALFLINE, MeasureSpace

DECREASING = "decreasing"
INCREASING = "increasing"


@dataclass(frozen=True)
class Rearrangement:
    """Step function on [0, total): value ``values[k]`` on [knots[k], knots[k+1]).

    ``knots`` has one more entry than ``values`` and starts at 0.  Queries
    beyond the domain return 0 for decreasing and the top value for
    increasing rearrangements (the literal inf/sup conventions).
    """

    values: np.ndarray
    knots: np.ndarray
    direction: str

    def __post_init__(self):
        if self.knots.size != self.values.size + 1:
            raise ValueError("knots must have len(values) + 1 entries")

    @property
    def total(self) -> float:
        return float(self.knots[-1])

    def __call__(self, t):
        t_arr = np.asarray(t, dtype=float)
        if np.any(t_arr < 0):
            raise ValueError("rearrangements are defined on t >= 0")
        idx = np.searchsorted(self.knots[1:], t_arr, side="right")
        fill = 0.0 if self.direction == DECREASING else float(self.values[-1])
        out = np.where(idx < self.values.size,
                       self.values[np.minimum(idx, self.values.size - 1)], fill)
        return float(out) if np.isscalar(t) or t_arr.ndim == 0 else out

    def superlevel_measure(self, t):
        """Lebesgue measure of {x in [0, total): value(x) > t} (exact)."""
        t_arr = np.asarray(t, dtype=float)
        if self.direction == DECREASING:
            asc = self.values[::-1]
            count = self.values.size - np.searchsorted(asc, t_arr, side="right")
        else:
            count_le = np.searchsorted(self.values, t_arr, side="right")
            count = self.values.size - count_le
            # increasing case: the superlevel cells sit at the right end
            out = self.total - self.knots[self.values.size - count]
            return float(out) if np.isscalar(t) else out
        out = self.knots[count]
        return float(out) if np.isscalar(t) else out

    def cells(self):
        """Rows (t_left, t_right, value) for table dumps."""
        return zip(self.knots[:-1], self.knots[1:], self.values)


def distribution_function(b: Multiplier, space: MeasureSpace, t,
                          allow_exact: bool = True):
    """d_b(t) = mu{ b > t }.

    Uses the family's closed form when available (exact on the untruncated
    space); otherwise sums quadrature weights over nodes with b > t.
    """
    scalar = np.isscalar(t)
    ts = np.atleast_1d(np.asarray(t, dtype=float))
    if np.any(ts <= 0):
        raise ValueError("distribution function requires t > 0")
    out = np.empty(ts.shape)
    exact_ok = allow_exact
    if exact_ok:
        for i, ti in enumerate(ts):
            ex = b.distribution_exact(float(ti), space)
            if ex is None:
                exact_ok = False
                break
            out[i] = ex
    if not exact_ok:
        vals = b.values_on(space)
        out = np.array([float(np.sum(space.weights[vals > ti])) for ti in ts])
    return float(out[0]) if scalar else out


def vanishes_at_infinity(b: Multiplier, space: MeasureSpace) -> bool:
    """True iff d_b(t) is finite for every t > 0.

    Trivially true on finite-measure spaces; on infinite spaces the
    family's analytic answer (or the tabulated tail declaration) decides.
    """
    if space.measure_is_finite:
        return True
    answer = b.vanishes(space)
    if answer is None:
        raise PreconditionFailed(
            f"{b.family}: no tail model declared for an infinite-measure space"
        )
    return bool(answer)


def _sorted_step(values: np.ndarray, weights: np.ndarray, descending: bool) -> Rearrangement:
    order = np.argsort(-values if descending else values, kind="stable")
    v = values[order]
    w = weights[order]
    knots = np.concatenate(([0.0], np.cumsum(w)))
    return Rearrangement(v, knots, DECREASING if descending else INCREASING)


def decreasing_rearrangement(b: Multiplier, space: MeasureSpace) -> Rearrangement:
    """b_*(t) = inf{ tau > 0 : d_b(tau) <= t } on [0, mu(S)).

    Requires b to vanish at infinity when mu(S) is infinite; computed by a
    stable descending sort of node values with cumulative weights as
    abscissae, which is equimeasurable with the discretized b by
    construction.
    """
    if not vanishes_at_infinity(b, space):
        raise RearrangementUndefined(
            f"{b.family}: superlevel sets of infinite measure, b_* undefined"
        )
    return _sorted_step(b.values_on(space), space.weights, descending=True)


def increasing_rearrangement(b: Multiplier, space: MeasureSpace) -> Rearrangement:
    """b^*(t) = sup{ tau : mu(b <= tau) <= t }; finite measure spaces only."""
    if not space.measure_is_finite:
        raise RequiresFiniteMeasure(
            "increasing rearrangement requires mu(S) < infinity"
        )
    return _sorted_step(b.values_on(space), space.weights, descending=False)


class _ScaledArgument(IndexFunction):
    """phi(scale * s); used for the lower sandwich bound b_k(s / (C m))."""

    def __init__(self, base: IndexFunction, scale: float, name: str):
        self._base = base
        self._scale = scale
        self.name = name
        lo, hi = base.domain
        self.domain = (lo / scale if lo > 0 else 0.0, hi / scale)

    def _eval(self, t):
        return np.asarray(self._base(t * self._scale))

    def inverse(self, y):
        return self._base.inverse(y) / self._scale


@dataclass(frozen=True)
class PiecewiseBounds:
    """Sandwich for the increasing rearrangement of a piecewise multiplier."""

    lower: IndexFunction
    upper: IndexFunction
    C: float
    m: int
    dominant_index: int
    window: float  # sandwich verified on (0, window]


def _domination_constant(pieces, k: int, taus: np.ndarray) -> float:
    inv_k = np.array([pieces[k].profile.inverse(t) for t in taus])
    worst = 1.0
    for j, piece in enumerate(pieces):
        if j == k:
            continue
        inv_j = np.array([piece.profile.inverse(t) for t in taus])
        worst = max(worst, float(np.max(inv_j / inv_k)))
    return worst


def piecewise_rearrangement_bounds(b: PiecewiseMonotone, n_grid: int = 2**14,
                                   n_probe: int = 64,
                                   stability_factor: float = 1.10) -> PiecewiseBounds:
    """Bracket b^* between b_k and b_k(s / (C m)) near zero.

    The dominating piece k is the declared one or the candidate whose
    inverse yields the smallest domination constant over a log-spaced
    probe window; the constant must be stable when the window shrinks,
    otherwise DominationNotDetected is raised.  The returned ``window`` is
    the empirically verified prefix (0, s_max].
    """
    if not isinstance(b, PiecewiseMonotone):
        raise TypeError("piecewise_rearrangement_bounds needs a piecewise_monotone multiplier")
    pieces = b.pieces
    m = len(pieces)
    tau_top = 0.5 * min(min(p.edge_value() for p in pieces),
                        b.background.essential_infimum)
    taus = np.geomspace(tau_top * 1e-6, tau_top, n_probe)
    taus_small = taus / 16.0

    if b.declared_dominant is not None:
        k = int(b.declared_dominant)
        if not (0 <= k < m):
            raise ValueError("declared_dominant out of range")
    else:
        khats = [_domination_constant(pieces, k, taus) for k in range(m)]
        k = int(np.argmin(khats))
    c_base = _domination_constant(pieces, k, taus)
    c_small = _domination_constant(pieces, k, taus_small)
    if c_small > c_base * stability_factor + 1e-12:
        raise DominationNotDetected(
            f"piece {k}: domination constant grows from {c_base:.4g} to "
            f"{c_small:.4g} as the probe window shrinks"
        )
    C = max(1.0, c_base, c_small)

    prof_k = pieces[k].profile
    upper = prof_k
    lower = _ScaledArgument(prof_k, 1.0 / (C * m), name=f"{prof_k.name}(s/(C*m))")

    # verify against the numeric increasing rearrangement
    space = MeasureSpace.interval(0.0, b.hi, n_grid)
    star = increasing_rearrangement(b, space)
    h = space.max_weight
    s_max = prof_k.inverse(tau_top)
    if s_max <= 8 * h:
        raise DominationNotDetected(
            "candidate sandwich window is below the grid resolution"
        )
    s_grid = np.geomspace(max(4 * h, s_max * 1e-4), s_max, 256)
    star_vals = star(s_grid)
    upper_vals = upper(np.minimum(s_grid + 2 * h, upper.domain[1]))
    low_args = np.clip(s_grid - 2 * h, 1e-300, lower.domain[1])
    lower_vals = np.where(s_grid - 2 * h > 0, lower(low_args), 0.0)
    ok = (star_vals <= upper_vals * (1 + 1e-9) + 1e-12) & \
         (star_vals >= lower_vals * (1 - 1e-9) - 1e-12)
    if not np.all(ok):
        last_bad = int(np.max(np.nonzero(~ok)[0]))
        if last_bad >= s_grid.size - 1 or s_grid[last_bad] > 0.5 * s_max:
            raise DominationNotDetected(
                "sandwich bounds fail on most of the candidate window"
            )
        s_max = float(s_grid[last_bad + 1])
    return PiecewiseBounds(lower=lower, upper=upper, C=C, m=m,
                           dominant_index=k, window=float(s_max))


def truncated_shift_check(b: Multiplier, space: MeasureSpace, M: float,
                          tol: float = 1e-9) -> bool:
    """Check (b_M)_* = (b~_M)_* <= b_* for the truncation at level M.

    b~_M kills b on [0, M]; b_M shifts the remainder back to the origin.
    Both rearrangements must agree on the shared domain and stay below
    the rearrangement of b itself.
    """
    if space.kind != LEBESGUE_HALFLINE:
        raise ValueError("truncated_shift_check is defined on half-line spaces")
    if M < 0:
        raise ValueError("M must be nonnegative")
    vals = b.values_on(space)
    vanish = vanishes_at_infinity(b, space)
    mask = space.nodes > M

    tilde = Tabulated(np.where(mask, vals, 0.0), tail_vanishes=vanish)
    r_tilde = decreasing_rearrangement(tilde, space)
    r_full = decreasing_rearrangement(b, space)

    if not np.any(mask):
        return True  # nothing survives the truncation
    shifted_space = MeasureSpace(
        LEBESGUE_HALFLINE, space.nodes[mask] - M, space.weights[mask],
        truncation_radius=max(space.truncation_radius - M, space.weights[mask][0]),
    )
    shifted = Tabulated(vals[mask], tail_vanishes=vanish)
    r_shift = decreasing_rearrangement(shifted, shifted_space)

    # probe at cell midpoints of the shifted rearrangement
    ts = 0.5 * (r_shift.knots[:-1] + r_shift.knots[1:])
    a = r_shift(ts)
    scale = 1.0 + np.abs(a)
    if np.any(np.abs(r_tilde(ts) - a) > tol * scale):
        return False
    if np.any(a > r_full(ts) * (1 + tol) + tol):
        return False
    return True
