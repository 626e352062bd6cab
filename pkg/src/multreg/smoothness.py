"""Source conditions and the canonical index function built from d_b.

The canonical function is phi*(t) = 1 / mu{ b > t }, tabulated for small t
on a log grid.  It is defined only in the small-t regime controlled by the
hypotheses (infinite measure, vanishing at infinity, b bounded below near
the origin, superlevel measure comparable to |s|); evaluation outside the
table is refused rather than extrapolated.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NotInSourceSet, PreconditionFailed, UnboundedRatio
from .indexfuncs import IndexFunction, TableIndex
from .multipliers import Multiplier
from .rearrangement import distribution_function, vanishes_at_infinity
from .spaces import MeasureSpace

#: acceptance band for two-sided "comparable" checks: ratios within [1/K, K]
DEFAULT_RATIO_BAND = 10.0


@dataclass(frozen=True)
class SourceCondition:
    """f = phi(b) * v with a norm bound on the source element v."""

    phi: IndexFunction
    source_element: np.ndarray
    norm_bound: float
    achieved_norm: float


def _outer_cut(b: Multiplier, space: MeasureSpace) -> float:
    """Smallest |s| with b(s) <= sup/2; separates the inner and outer regions."""
    vals = b.values_on(space)
    outer = np.abs(space.nodes)[vals <= 0.5 * b.sup_bound]
    if outer.size == 0:
        raise PreconditionFailed(
            "multiplier never drops below half its sup on this grid; "
            "increase the truncation radius"
        )
    return float(np.min(outer))


def phi_star(b: Multiplier, space: MeasureSpace, n_table: int = 256,
             ratio_band: float = DEFAULT_RATIO_BAND) -> TableIndex:
    """Tabulate t -> 1 / d_b(t) on [t_min, sup/2] as an index function.

    Hypotheses checked numerically: the space is of infinite kind, b
    vanishes at infinity, b stays positive on the inner region, the
    superlevel measure mu{b > b(s)} is comparable to |s| on the outer
    region, and |s| * phi*(b(s)) stays in a two-sided band on the outer
    half of the grid.  Violations raise PreconditionFailed naming the
    failed hypothesis.
    """
    if space.measure_is_finite:
        raise PreconditionFailed("phi_star requires an infinite-measure space")
    if not vanishes_at_infinity(b, space):
        raise PreconditionFailed("phi_star requires b vanishing at infinity")

    vals = b.values_on(space)
    abs_s = np.abs(space.nodes)
    cut = _outer_cut(b, space)
    inner_min = float(np.min(vals[abs_s <= cut])) if np.any(abs_s <= cut) else 1.0
    if inner_min <= 0:
        raise PreconditionFailed("b must be bounded below near the origin")

    # mu{b > b(s)} comparable to |s| on the outer region
    outer = abs_s > cut
    probe_idx = np.nonzero(outer)[0]
    probe_idx = probe_idx[np.linspace(0, probe_idx.size - 1, min(32, probe_idx.size)).astype(int)]
    for i in probe_idx:
        if vals[i] <= 0:
            continue
        d = distribution_function(b, space, float(vals[i]))
        ratio = d / abs_s[i]
        if not (1.0 / ratio_band <= ratio <= ratio_band):
            raise PreconditionFailed(
                f"superlevel measure not comparable to |s| at s = {space.nodes[i]:.4g} "
                f"(ratio {ratio:.4g})"
            )

    t_min = float(np.min(vals[vals > 0]))
    t_max = 0.5 * b.sup_bound
    if t_min >= t_max:
        raise PreconditionFailed("no room between the smallest value and sup/2")
    ts = np.geomspace(t_min, t_max, n_table)
    d = np.asarray(distribution_function(b, space, ts))
    if np.any(d <= 0) or np.any(~np.isfinite(d)):
        raise PreconditionFailed("distribution function not positive-finite on the table")
    phi_vals = 1.0 / d
    # d_b is nonincreasing, so phi* is nondecreasing; drop flat steps to keep
    # the table strictly increasing
    keep = np.concatenate(([True], np.diff(phi_vals) > 0))
    if np.sum(keep) < 2:
        raise PreconditionFailed("distribution function is flat over the table range")
    table = TableIndex(ts[keep], phi_vals[keep], name="reciprocal_measure")

    # asymptotics: |s| * phi*(b(s)) within a constant band on the outer half
    half = abs_s > 0.5 * np.max(abs_s)
    usable = half & (vals >= table.ts[0]) & (vals <= table.ts[-1]) & (vals > 0)
    if np.sum(usable) >= 2:
        ratios = abs_s[usable] * np.asarray(table(vals[usable]))
        if np.max(ratios) > ratio_band * np.min(ratios):
            raise PreconditionFailed(
                "phi*(b(s)) is not comparable to 1/|s| on the outer half"
            )
    return table


def source_function(v, b: Multiplier, space: MeasureSpace,
                    phi: IndexFunction) -> np.ndarray:
    """Build f = phi(b) * v on the nodes (phi evaluated on the support of v)."""
    vals = b.values_on(space)
    v = np.asarray(v, float)
    f = np.zeros_like(v)
    support = v != 0.0
    if np.any(support):
        f[support] = np.asarray(phi(vals[support])) * v[support]
    return f


def make_source(f, b: Multiplier, space: MeasureSpace, phi: IndexFunction,
                norm_bound: float = 1.0) -> SourceCondition:
    """Solve f = phi(b) v for v and check ||v|| <= norm_bound.

    phi is evaluated only on the support of f, so multipliers whose values
    leave phi's tabulated domain are fine as long as f vanishes there.
    Raises NotInSourceSet carrying the achieved norm otherwise.
    """
    f = np.asarray(f, float)
    vals = b.values_on(space)
    v = np.zeros_like(f)
    support = f != 0.0
    if np.any(support):
        denom = np.asarray(phi(vals[support]))
        if np.any(denom <= 0):
            raise NotInSourceSet(np.inf, norm_bound)
        v[support] = f[support] / denom
    achieved = space.norm(v)
    if achieved > norm_bound * (1 + 1e-9) + 1e-12:
        raise NotInSourceSet(achieved, norm_bound)
    return SourceCondition(phi=phi, source_element=v, norm_bound=norm_bound,
                           achieved_norm=achieved)


def sobolev_norm(f, space: MeasureSpace, p: float) -> float:
    """Weighted norm with weight (1 + |s|^2)^p."""
    if p <= 0:
        raise ValueError("p must be positive")
    f = np.asarray(f, float)
    w = (1.0 + space.nodes**2) ** p
    return float(np.sqrt(np.sum(space.weights * np.abs(f) ** 2 * w)))


def sobolev_equivalence_check(b: Multiplier, space: MeasureSpace, p: float = 1.0,
                              phi: TableIndex | None = None,
                              growth_tol: float = 0.25) -> tuple[float, float]:
    """Empirical band c <= (1 + |s|^2) phi*(b(s))^2 <= C on the outer region.

    Membership in the Sobolev class of order p is equivalent to a source
    condition with respect to (a multiple of) phi*^p; the band constants,
    raised to the power p, convert between the two norms.  When the
    multiplier is evaluable the check is repeated on a space with doubled
    truncation radius and raises UnboundedRatio if the band keeps growing.
    """
    if p <= 0:
        raise ValueError("p must be positive")
    if phi is None:
        phi = phi_star(b, space)
    band = _band(b, space, phi)
    if b.evaluable and space.kind != "counting":
        # same fixed phi on a domain twice as large: the band must stay put
        wide = space.extended(2.0)
        band_wide = _band(b, wide, phi)
        if band_wide[1] > band[1] * (1 + growth_tol) + 1e-12:
            raise UnboundedRatio(
                f"sup ratio grew from {band[1]:.4g} to {band_wide[1]:.4g} "
                "under grid extension"
            )
        band = (min(band[0], band_wide[0]), max(band[1], band_wide[1]))
    return band


def _band(b, space, phi):
    vals = b.values_on(space)
    abs_s = np.abs(space.nodes)
    usable = (vals >= phi.ts[0]) & (vals <= phi.ts[-1]) & (vals > 0)
    if np.sum(usable) < 2:
        raise PreconditionFailed("too few nodes inside the phi* table")
    ratio = (1.0 + abs_s[usable] ** 2) * np.asarray(phi(vals[usable])) ** 2
    c, C = float(np.min(ratio)), float(np.max(ratio))
    if not (0 < c <= C < np.inf):
        raise UnboundedRatio("equivalence ratio not positive and finite")
    return c, C
