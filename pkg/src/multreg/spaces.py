"""Discretized measure spaces.

A :class:`MeasureSpace` is a quadrature view of one of four measure spaces:
a bounded Lebesgue interval, the Lebesgue half-line or full line (both
truncated at a finite radius), or the counting measure on an initial
section of the positive integers.  All downstream computations are plain
weighted sums over the nodes, so any positive quadrature rule can be
plugged in through :meth:`MeasureSpace.from_arrays`.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

LEBESGUE_INTERVAL = "lebesgue_interval"
LEBESGUE_HALFLINE = "lebesgue_halfline"
LEBESGUE_LINE = "lebesgue_line"
COUNTING = "counting"

_INFINITE_KINDS = (LEBESGUE_HALFLINE, LEBESGUE_LINE, COUNTING)

DEFAULT_NODES = 2**14


@dataclass(frozen=True)
class MeasureSpace:
    """Nodes and nonnegative quadrature weights for (S, Sigma, mu).

    ``kind`` records which underlying space the grid discretizes; the
    half-line, line and counting kinds stand for infinite-measure spaces
    truncated at ``truncation_radius`` (the largest represented |s| or
    index).  ``density_bounds``, when set, records two-sided bounds
    (c_lower, c_upper) on the density d(mu)/d(lambda); it is metadata only,
    the weights already absorb the density.
    """

    kind: str
    nodes: np.ndarray
    weights: np.ndarray
    truncation_radius: float | None = None
    density_bounds: tuple[float, float] | None = None
    _grading: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        weights = np.asarray(self.weights, dtype=float)
        object.__setattr__(self, "nodes", nodes)
        object.__setattr__(self, "weights", weights)
        if nodes.ndim != 1 or weights.shape != nodes.shape:
            raise ValueError("nodes and weights must be matching 1-d arrays")
        if nodes.size == 0:
            raise ValueError("empty discretization")
        if np.any(np.diff(nodes) <= 0):
            raise ValueError("nodes must be strictly increasing")
        if np.any(weights < 0):
            raise ValueError("weights must be nonnegative")
        if self.kind == COUNTING and not np.allclose(weights, 1.0):
            raise ValueError("counting measure requires unit weights")
        if self.kind in _INFINITE_KINDS:
            if self.truncation_radius is None or self.truncation_radius <= 0:
                raise ValueError(f"{self.kind} requires truncation_radius > 0")
        if self.density_bounds is not None:
            lo, hi = self.density_bounds
            if not (0 < lo <= hi):
                raise ValueError("density bounds must satisfy 0 < lower <= upper")

    # -- basic quadrature ------------------------------------------------

    @property
    def total_measure(self) -> float:
        """Measure of the discretized (possibly truncated) region."""
        return float(np.sum(self.weights))

    @property
    def max_weight(self) -> float:
        return float(np.max(self.weights))

    @property
    def measure_is_finite(self) -> bool:
        """Whether the *underlying* space has finite total measure."""
        return self.kind == LEBESGUE_INTERVAL

    def integrate(self, values) -> float:
        return float(np.sum(self.weights * np.asarray(values)))

    def norm(self, values) -> float:
        """Weighted L2 norm; accepts real or complex node vectors."""
        v = np.asarray(values)
        return float(np.sqrt(np.sum(self.weights * np.abs(v) ** 2)))

    def inner(self, u, v) -> float:
        return float(np.real(np.sum(self.weights * np.conj(np.asarray(u)) * np.asarray(v))))

    # -- constructors ----------------------------------------------------

    @classmethod
    def interval(cls, lo: float, hi: float, n: int = DEFAULT_NODES) -> "MeasureSpace":
        """Uniform composite-midpoint grid on [lo, hi]."""
        if hi <= lo:
            raise ValueError("need hi > lo")
        h = (hi - lo) / n
        nodes = lo + (np.arange(n) + 0.5) * h
        return cls(LEBESGUE_INTERVAL, nodes, np.full(n, h),
                   _grading={"lo": lo, "hi": hi, "n": n, "scheme": "uniform"})

    @classmethod
    def interval_graded(cls, hi: float, n: int = DEFAULT_NODES,
                        s_min: float = 1e-9) -> "MeasureSpace":
        """Geometrically graded midpoint grid on (0, hi], refined toward 0.

        Cell edges are log-spaced from ``s_min`` to ``hi`` plus one initial
        cell [0, s_min]; useful when integrands peak at the origin faster
        than a uniform grid can resolve.
        """
        if not (0 < s_min < hi):
            raise ValueError("need 0 < s_min < hi")
        edges = np.concatenate(([0.0], np.geomspace(s_min, hi, n)))
        nodes = 0.5 * (edges[:-1] + edges[1:])
        weights = np.diff(edges)
        return cls(LEBESGUE_INTERVAL, nodes, weights,
                   _grading={"lo": 0.0, "hi": hi, "n": n, "scheme": "graded",
                             "s_min": s_min})

    @classmethod
    def halfline(cls, radius: float, n: int = DEFAULT_NODES) -> "MeasureSpace":
        """Uniform midpoint grid on [0, radius), standing for [0, infinity)."""
        h = radius / n
        nodes = (np.arange(n) + 0.5) * h
        return cls(LEBESGUE_HALFLINE, nodes, np.full(n, h), truncation_radius=radius,
                   _grading={"n": n, "scheme": "uniform"})

    @classmethod
    def line(cls, radius: float, n: int = DEFAULT_NODES) -> "MeasureSpace":
        """Uniform midpoint grid on (-radius, radius), standing for the line."""
        h = 2.0 * radius / n
        nodes = -radius + (np.arange(n) + 0.5) * h
        return cls(LEBESGUE_LINE, nodes, np.full(n, h), truncation_radius=radius,
                   _grading={"n": n, "scheme": "uniform"})

    @classmethod
    def counting(cls, n_max: int) -> "MeasureSpace":
        """Counting measure on {1, ..., n_max}, standing for the positive integers."""
        if n_max < 1:
            raise ValueError("n_max must be positive")
        nodes = np.arange(1, n_max + 1, dtype=float)
        return cls(COUNTING, nodes, np.ones(n_max), truncation_radius=float(n_max))

    @classmethod
    def from_arrays(cls, kind: str, nodes, weights, truncation_radius=None,
                    density_bounds=None) -> "MeasureSpace":
        return cls(kind, np.asarray(nodes, float), np.asarray(weights, float),
                   truncation_radius=truncation_radius, density_bounds=density_bounds)

    def extended(self, factor: float) -> "MeasureSpace":
        """Same node density, truncation radius scaled by ``factor``.

        Used by tail diagnostics on half-line and line spaces; raises for
        kinds that cannot be extended.
        """
        if self.kind == LEBESGUE_HALFLINE:
            n = int(round(self._grading.get("n", self.nodes.size) * factor))
            return MeasureSpace.halfline(self.truncation_radius * factor, n)
        if self.kind == LEBESGUE_LINE:
            n = int(round(self._grading.get("n", self.nodes.size) * factor))
            return MeasureSpace.line(self.truncation_radius * factor, n)
        raise ValueError(f"cannot extend a {self.kind} space")
