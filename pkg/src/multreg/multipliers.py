"""Multiplier functions b with 0 < b <= sup_bound almost everywhere.

Each family knows how to evaluate itself on a measure space, whether it
vanishes at infinity, and (where a closed form exists) its exact
distribution function.  Zeros are only allowed where a family explicitly
declares them (the plateau counterexample on s < 0, piecewise-monotone
multipliers at their declared zero locations).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import EigenvaluesNotDivergent
from .indexfuncs import IndexFunction
from .spaces import COUNTING, LEBESGUE_HALFLINE, LEBESGUE_LINE, MeasureSpace

INCREASING_RIGHT = "increasing_right"
INCREASING_LEFT = "increasing_left"


class Multiplier:
    """Base class. Subclasses set ``family`` and ``sup_bound``."""

    family = "abstract"
    sup_bound: float

    def values_on(self, space: MeasureSpace) -> np.ndarray:
        return self(space.nodes)

    def __call__(self, s):  # pragma: no cover - abstract
        raise NotImplementedError(f"{self.family} is not pointwise evaluable")

    @property
    def evaluable(self) -> bool:
        """Whether the multiplier can be evaluated off any fixed grid."""
        return True

    def distribution_exact(self, t: float, space: MeasureSpace) -> float | None:
        """Exact d_b(t) for the untruncated space, or None."""
        return None

    def vanishes(self, space: MeasureSpace) -> bool | None:
        """Analytic answer to 'does b vanish at infinity', or None if unknown."""
        return None


@dataclass(frozen=True)
class PowerDecay(Multiplier):
    """b(s) = 1 / (1 + s**(1/kappa)) on the half-line."""

    kappa: float
    family: str = "power_decay"
    sup_bound: float = 1.0

    def __post_init__(self):
        if self.kappa <= 0:
            raise ValueError("kappa must be positive")

    def __call__(self, s):
        return 1.0 / (1.0 + np.asarray(s, float) ** (1.0 / self.kappa))

    def distribution_exact(self, t, space):
        if t >= 1.0:
            return 0.0
        return ((1.0 - t) / t) ** self.kappa

    def vanishes(self, space):
        return True


@dataclass(frozen=True)
class PurePower(Multiplier):
    """b(s) = s**kappa on a bounded interval [0, hi]."""

    kappa: float
    hi: float = 1.0
    family: str = "pure_power"

    def __post_init__(self):
        if self.kappa <= 0 or self.hi <= 0:
            raise ValueError("kappa and hi must be positive")
        object.__setattr__(self, "sup_bound", self.hi ** self.kappa)

    def __call__(self, s):
        return np.asarray(s, float) ** self.kappa

    def distribution_exact(self, t, space):
        if t >= self.sup_bound:
            return 0.0
        return self.hi - t ** (1.0 / self.kappa)

    def vanishes(self, space):
        return True  # bounded support


@dataclass(frozen=True)
class GaussianFrequency(Multiplier):
    """b(s) = exp(-c^2 * tau * |s|^2); the frequency symbol of heat flow."""

    c: float = 1.0
    tau: float = 1.0
    dimension: int = 1
    family: str = "gaussian_frequency"
    sup_bound: float = 1.0

    def __post_init__(self):
        if self.c <= 0 or self.tau <= 0:
            raise ValueError("c and tau must be positive")

    def __call__(self, s):
        return np.exp(-(self.c**2) * self.tau * np.asarray(s, float) ** 2)

    def distribution_exact(self, t, space):
        if t >= 1.0:
            return 0.0
        radius = np.sqrt(np.log(1.0 / t)) / (self.c * np.sqrt(self.tau))
        if space.kind == LEBESGUE_LINE:
            return 2.0 * radius
        if space.kind == LEBESGUE_HALFLINE:
            return radius
        return None

    def vanishes(self, space):
        return True


@dataclass(frozen=True)
class ExponentialSequence(Multiplier):
    """b(n) = exp(-c^2 * lambda_n**p * tau) on the counting measure.

    ``exponent_power`` p defaults to 2 (eigenvalues enter squared); p = 1
    gives the standard semigroup variant.
    """

    c: float
    tau: float
    eigenvalues: tuple
    exponent_power: int = 2
    family: str = "exponential_sequence"

    def __post_init__(self):
        lam = np.asarray(self.eigenvalues, float)
        if self.c <= 0 or self.tau <= 0:
            raise ValueError("c and tau must be positive")
        if lam.size < 2 or np.any(np.diff(lam) < 0):
            raise EigenvaluesNotDivergent("eigenvalues must be nondecreasing")
        if lam[-1] <= lam[0]:
            raise EigenvaluesNotDivergent(
                "eigenvalue sequence looks bounded (no growth across the section)"
            )
        object.__setattr__(self, "eigenvalues", tuple(float(x) for x in lam))
        object.__setattr__(
            self, "sup_bound",
            float(np.exp(-(self.c**2) * lam[0] ** self.exponent_power * self.tau)),
        )

    @property
    def evaluable(self) -> bool:
        return False

    def values_on(self, space):
        if space.kind != COUNTING:
            raise ValueError("exponential_sequence lives on a counting space")
        lam = np.asarray(self.eigenvalues)
        if space.nodes.size > lam.size:
            raise ValueError("not enough eigenvalues for this space")
        idx = space.nodes.astype(int) - 1
        return np.exp(-(self.c**2) * lam[idx] ** self.exponent_power * self.tau)

    def vanishes(self, space):
        return True


@dataclass(frozen=True)
class PlateauCounterexample(Multiplier):
    """b = 0 on s<0, b = s on [0,1], b = 1 beyond; not vanishing at infinity."""

    family: str = "plateau_counterexample"
    sup_bound: float = 1.0

    def __call__(self, s):
        s = np.asarray(s, float)
        return np.clip(s, 0.0, 1.0)

    def distribution_exact(self, t, space):
        if t >= 1.0:
            return 0.0
        return np.inf  # the plateau {b = 1} has infinite measure

    def vanishes(self, space):
        if space.kind in (LEBESGUE_LINE, LEBESGUE_HALFLINE):
            return False
        return True


@dataclass(frozen=True)
class MonotonePiece:
    """One local zero of a piecewise-monotone multiplier.

    ``profile`` is a strictly increasing index function on (0, radius]
    with profile(0+) = 0; ``orientation`` says on which side of the zero
    the profile is traversed.
    """

    zero_location: float
    orientation: str
    profile: IndexFunction
    radius: float

    def __post_init__(self):
        if self.orientation not in (INCREASING_RIGHT, INCREASING_LEFT):
            raise ValueError("orientation must be increasing_right or increasing_left")
        if self.radius <= 0:
            raise ValueError("radius must be positive")

    @property
    def window(self) -> tuple[float, float]:
        if self.orientation == INCREASING_RIGHT:
            return (self.zero_location, self.zero_location + self.radius)
        return (self.zero_location - self.radius, self.zero_location)

    def local_coordinate(self, s: np.ndarray) -> np.ndarray:
        if self.orientation == INCREASING_RIGHT:
            return s - self.zero_location
        return self.zero_location - s

    def edge_value(self) -> float:
        return float(self.profile(self.radius))


@dataclass(frozen=True)
class BackgroundPart:
    """The part of b bounded away from zero, active outside all piece windows."""

    essential_infimum: float
    evaluator: Callable[[np.ndarray], np.ndarray] = None

    def __post_init__(self):
        if self.essential_infimum <= 0:
            raise ValueError("essential infimum must be positive")
        if self.evaluator is None:
            level = self.essential_infimum
            object.__setattr__(self, "evaluator", lambda s: np.full_like(np.asarray(s, float), level))

    def __call__(self, s):
        out = np.asarray(self.evaluator(np.asarray(s, float)), float)
        if np.any(out < self.essential_infimum - 1e-12):
            raise ValueError("background dips below its declared infimum")
        return out


@dataclass(frozen=True)
class PiecewiseMonotone(Multiplier):
    """Finitely many zeros with declared monotone profiles, on [0, hi].

    Inside a piece window the piece profile is used; elsewhere the
    background.  Windows must be pairwise disjoint and zero locations
    distinct.  ``declared_dominant`` optionally pins the dominating piece
    index instead of probing for it.
    """

    pieces: tuple
    background: BackgroundPart
    hi: float = 1.0
    declared_dominant: int | None = None
    family: str = "piecewise_monotone"

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("need at least one piece")
        zeros = [p.zero_location for p in pieces]
        if len(set(zeros)) != len(zeros):
            raise ValueError("zero locations must be distinct")
        windows = sorted(p.window for p in pieces)
        for (a0, b0), (a1, b1) in zip(windows, windows[1:]):
            if a1 < b0:
                raise ValueError("piece windows must be disjoint")
        object.__setattr__(self, "pieces", pieces)
        edge = max(p.edge_value() for p in pieces)
        bg_sup = float(np.max(self.background(np.linspace(0.0, self.hi, 513))))
        object.__setattr__(self, "sup_bound", max(edge, bg_sup))

    def __call__(self, s):
        s = np.asarray(s, float)
        out = self.background(s)
        for piece in self.pieces:
            lo, hi = piece.window
            mask = (s >= lo) & (s <= hi)
            if np.any(mask):
                u = piece.local_coordinate(s[mask])
                vals = np.zeros(u.shape)
                pos = u > 0
                vals[pos] = piece.profile(u[pos])
                out[mask] = vals
        return out

    def vanishes(self, space):
        return True  # bounded support

    def zero_locations(self) -> np.ndarray:
        return np.array([p.zero_location for p in self.pieces])


@dataclass(frozen=True)
class Tabulated(Multiplier):
    """Values aligned with a fixed space's nodes.

    ``tail_vanishes`` declares the tail model when the space is infinite:
    True means superlevel sets have finite measure beyond the truncation.
    """

    values: np.ndarray
    sup_bound: float = None
    tail_vanishes: bool = True
    family: str = "tabulated"

    def __post_init__(self):
        vals = np.asarray(self.values, float)
        if np.any(vals < 0):
            raise ValueError("multiplier values must be nonnegative")
        object.__setattr__(self, "values", vals)
        if self.sup_bound is None:
            object.__setattr__(self, "sup_bound", float(np.max(vals)))
        elif np.max(vals) > self.sup_bound * (1 + 1e-12):
            raise ValueError("values exceed declared sup bound")

    @property
    def evaluable(self) -> bool:
        return False

    def values_on(self, space):
        if self.values.shape != space.nodes.shape:
            raise ValueError("tabulated values not aligned with this space")
        return self.values

    def vanishes(self, space):
        if space.kind in (LEBESGUE_HALFLINE, LEBESGUE_LINE, COUNTING):
            return bool(self.tail_vanishes)
        return True

    @classmethod
    def from_text(cls, path, space: MeasureSpace, **kw) -> "Tabulated":
        """Load (node, value) rows from two-column text with '#' comments."""
        data = np.loadtxt(path, comments="#")
        if data.ndim != 2 or data.shape[1] != 2:
            raise ValueError("expected two columns: node value")
        nodes, values = data[:, 0], data[:, 1]
        if nodes.shape != space.nodes.shape or not np.allclose(nodes, space.nodes,
                                                               rtol=1e-9, atol=1e-12):
            raise ValueError("tabulated nodes do not match the space")
        return cls(values, **kw)


@dataclass(frozen=True)
class CallableMultiplier(Multiplier):
    """Closed-form multiplier given by an arbitrary evaluator.

    Plumbing family used by the problem gallery and tests; the optional
    ``exact_distribution`` hook supplies d_b(t) in closed form.
    """

    fn: Callable[[np.ndarray], np.ndarray]
    sup_bound: float
    tail_vanishes: bool = True
    exact_distribution: Callable[[float], float] | None = None
    family: str = "callable"

    def __call__(self, s):
        return np.asarray(self.fn(np.asarray(s, float)), float)

    def distribution_exact(self, t, space):
        if self.exact_distribution is None:
            return None
        return float(self.exact_distribution(t))

    def vanishes(self, space):
        if space.kind in (LEBESGUE_HALFLINE, LEBESGUE_LINE, COUNTING):
            return bool(self.tail_vanishes)
        return True


def validate_positive(b: Multiplier, space: MeasureSpace) -> None:
    """Check b > 0 at all nodes except family-sanctioned zeros, and b <= sup."""
    vals = b.values_on(space)
    if np.max(vals) > b.sup_bound * (1 + 1e-10):
        raise ValueError("multiplier exceeds its sup bound")
    if b.family == "plateau_counterexample":
        bad = (space.nodes >= 0) & (vals <= 0) & (space.nodes != 0)
    elif b.family == "piecewise_monotone":
        zeros = b.zero_locations()
        at_zero = np.isin(space.nodes, zeros)
        bad = (vals <= 0) & ~at_zero
    else:
        bad = vals <= 0
    if np.any(bad):
        raise ValueError("multiplier vanishes at nodes where zeros are not allowed")
