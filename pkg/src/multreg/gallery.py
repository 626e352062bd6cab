"""Concrete multiplication problems: deconvolution, backward heat, l2 case.

Deconvolution on the line is modelled on a periodic grid surrogate: a
uniform grid on [-L, L) with the unitary discrete Fourier transform, whose
frequency nodes pi*k/L make the kernel transform evaluable in closed form.
The backward-heat (final value) problems only ever use the frequency or
eigenvalue multiplier; no PDE is time-stepped.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .analysis import MultiplicationProblem, reconstruct
from .errors import DegenerateFilter
from .indexfuncs import IndexFunction
from .multipliers import (CallableMultiplier, ExponentialSequence,
                          GaussianFrequency, Multiplier,
                          PlateauCounterexample, PowerDecay, PurePower,
                          Tabulated)
from .schemes import lavrentiev
from .smoothness import source_function
from .spaces import MeasureSpace

_SQRT2PI = np.sqrt(2.0 * np.pi)


# ---------------------------------------------------------------------------
# deconvolution

def _exponential_kernel(u):
    return 0.5 * np.exp(-np.abs(u))


def _exponential_symbol(s):
    return 1.0 / (1.0 + s**2)


@dataclass(frozen=True)
class DeconvolutionProblem:
    """Kernel, periodic grid and derived frequency multiplier.

    ``kernel`` is "exponential" (r(u) = exp(-|u|)/2, symbol 1/(1+s^2)) or
    "gaussian" (unit-mass Gaussian of width ``sigma``, symbol
    exp(-sigma^2 s^2 / 2)).  ``signal`` holds the true x on the grid.
    """

    kernel: str
    half_width: float
    n: int
    signal: np.ndarray | None = None
    sigma: float = 1.0
    signal_space: MeasureSpace = field(init=False)
    freq_space: MeasureSpace = field(init=False)
    multiplier: Multiplier = field(init=False)

    def __post_init__(self):
        if self.n % 2 or self.n < 4:
            raise ValueError("need an even grid size >= 4")
        L, n = self.half_width, self.n
        dt = 2.0 * L / n
        t = -L + dt * np.arange(n)
        sig_space = MeasureSpace.from_arrays(
            "lebesgue_line", t, np.full(n, dt), truncation_radius=L)
        s_sorted = np.fft.fftshift(2.0 * np.pi * np.fft.fftfreq(n, d=dt))
        ds = np.pi / L
        freq_space = MeasureSpace.from_arrays(
            "lebesgue_line", s_sorted, np.full(n, ds),
            truncation_radius=float(-s_sorted[0]))
        if self.kernel == "exponential":
            kernel_fn, symbol = _exponential_kernel, _exponential_symbol
        elif self.kernel == "gaussian":
            sig = self.sigma
            kernel_fn = lambda u: np.exp(-u**2 / (2 * sig**2)) / (sig * _SQRT2PI)
            symbol = lambda s: np.exp(-sig**2 * s**2 / 2.0)
        else:
            raise ValueError(f"unknown kernel '{self.kernel}'")
        b_vals = symbol(s_sorted)
        if np.any(b_vals < 0):
            raise ValueError("kernel symbol must be nonnegative")
        mult = CallableMultiplier(symbol, sup_bound=float(np.max(b_vals)),
                                  tail_vanishes=True)
        object.__setattr__(self, "signal_space", sig_space)
        object.__setattr__(self, "freq_space", freq_space)
        object.__setattr__(self, "multiplier", mult)
        if self.signal is not None:
            x = np.asarray(self.signal, float)
            if x.shape != t.shape:
                raise ValueError("signal not aligned with the grid")
            object.__setattr__(self, "signal", x)

    # FFT bookkeeping: t_j = -L + j*dt, s_k = pi*k/L, so
    # sum_j y_j exp(-i s_k t_j) = (-1)^k FFT[y]_k.
    def _phase(self):
        k = np.fft.fftfreq(self.n, d=1.0 / self.n).astype(int)
        return np.where(k % 2 == 0, 1.0, -1.0)

    def kernel_values(self, u):
        if self.kernel == "exponential":
            return _exponential_kernel(np.asarray(u, float))
        sig = self.sigma
        return np.exp(-np.asarray(u, float) ** 2 / (2 * sig**2)) / (sig * _SQRT2PI)


def to_frequency(problem: DeconvolutionProblem, y) -> np.ndarray:
    """Unitary transform to the frequency grid (sorted ascending).

    Exact Parseval identity: the weighted norms of y and of the output
    coincide up to rounding.
    """
    y = np.asarray(y)
    dt = 2.0 * problem.half_width / problem.n
    spec = np.fft.fft(y) * problem._phase() * dt / _SQRT2PI
    return np.fft.fftshift(spec)


def from_frequency(problem: DeconvolutionProblem, u, imag_tol: float = 1e-8) -> np.ndarray:
    """Inverse of :func:`to_frequency`, returning a real signal.

    The imaginary part must be negligible relative to the signal norm
    (real data stays real through real filters).
    """
    dt = 2.0 * problem.half_width / problem.n
    spec = np.fft.ifftshift(np.asarray(u)) * _SQRT2PI / (dt * problem._phase())
    y = np.fft.ifft(spec)
    scale = np.max(np.abs(y)) + 1e-300
    if np.max(np.abs(y.imag)) > imag_tol * scale:
        raise ValueError("inverse transform produced a non-real signal")
    return y.real


def periodic_convolve(problem: DeconvolutionProblem, x) -> np.ndarray:
    """Grid convolution (r * x) with the kernel wrapped periodically."""
    dt = 2.0 * problem.half_width / problem.n
    offsets = np.fft.fftfreq(problem.n, d=1.0 / problem.n) * dt
    r_off = problem.kernel_values(offsets)
    return dt * np.real(np.fft.ifft(np.fft.fft(r_off) * np.fft.fft(np.asarray(x))))


def wiener_weight(b_val: float, s_f: float, delta: float) -> float:
    """MISE-optimal filter weight b*S_f / (b^2 S_f + delta^2) for real b."""
    if s_f <= 0:
        raise ValueError("signal strength must be positive")
    denom = b_val**2 * s_f + delta**2
    if denom == 0.0:
        raise DegenerateFilter("b = 0 and delta = 0 leave the weight undefined")
    return b_val * s_f / denom


def lavrentiev_deconvolve(problem: DeconvolutionProblem, y_delta,
                          alpha: float) -> np.ndarray:
    """Filter 1/(alpha + b) in frequency space, then transform back.

    This is exactly the generic estimator applied to the derived
    multiplier, composed with the transforms.
    """
    g_delta = to_frequency(problem, y_delta)
    rec = reconstruct(lavrentiev(), alpha, problem.multiplier,
                      problem.freq_space, g_delta)
    return from_frequency(problem, rec.estimate)


# ---------------------------------------------------------------------------
# final value problems

@dataclass(frozen=True)
class FinalValueProblem:
    """Descriptor for the backward-heat instances.

    ``whole_space`` lives on a symmetric frequency grid with multiplier
    exp(-c^2 tau |s|^2); ``bounded_domain`` lives on the counting measure
    with multiplier exp(-c^2 lambda_n^p tau) (p = 2 as displayed in the
    source problem, p = 1 for the standard semigroup convention).
    """

    variant: str
    c: float = 1.0
    tau: float = 1.0
    dimension: int = 1
    radius: float = 8.0
    n_grid: int = 2**12
    n_max: int = 64
    eigenvalues: tuple | None = None
    exponent_power: int = 2

    def __post_init__(self):
        if self.variant not in ("whole_space", "bounded_domain"):
            raise ValueError(f"unknown variant '{self.variant}'")


def fvp_multiplier(fvp: FinalValueProblem) -> tuple[Multiplier, MeasureSpace]:
    """Build the multiplier and matching space for a final value problem."""
    if fvp.variant == "whole_space":
        space = MeasureSpace.line(fvp.radius, fvp.n_grid)
        return GaussianFrequency(fvp.c, fvp.tau, fvp.dimension), space
    lam = fvp.eigenvalues
    if lam is None:
        lam = tuple(float(k) for k in range(1, fvp.n_max + 1))
    mult = ExponentialSequence(fvp.c, fvp.tau, tuple(lam),
                               exponent_power=fvp.exponent_power)
    return mult, MeasureSpace.counting(fvp.n_max)


def compact_case(b_values, n_max: int | None = None) -> tuple[Multiplier, MeasureSpace]:
    """Counting-measure instance from a list of positive eigenvalues of A."""
    vals = np.asarray(b_values, float)
    if n_max is not None:
        vals = vals[:n_max]
    if np.any(vals <= 0):
        raise ValueError("eigenvalues must be positive")
    space = MeasureSpace.counting(vals.size)
    return Tabulated(vals, tail_vanishes=True), space


def n_alpha(b: Multiplier, space: MeasureSpace, alpha: float) -> int:
    """Largest index N with b(N) >= alpha for a nonincreasing sequence."""
    vals = b.values_on(space)
    hits = np.nonzero(vals >= alpha)[0]
    return int(hits[-1] + 1) if hits.size else 0


# ---------------------------------------------------------------------------
# ready-made problems for the experiment runner

_SOURCE_ELEMENTS = ("constant", "inverse", "inverse_sqrt", "unit_first")


def source_element_vector(name: str, n: int) -> np.ndarray:
    j = np.arange(1, n + 1, dtype=float)
    if name == "constant":
        v = np.ones(n)
    elif name == "inverse":
        v = 1.0 / j
    elif name == "inverse_sqrt":
        v = 1.0 / np.sqrt(j)
    elif name == "unit_first":
        v = np.zeros(n)
        v[0] = 1.0
    else:
        raise ValueError(f"unknown source element '{name}' "
                         f"(choose from {_SOURCE_ELEMENTS})")
    return v


def counting_problem(n_max: int, phi: IndexFunction,
                     element: str = "inverse_sqrt",
                     b_values=None, normalize: bool = True) -> MultiplicationProblem:
    """l2 problem with b_j = 1/j (or given values) and f = phi(b) v.

    The source element v is normalized to unit weighted norm by default,
    so the solution sits exactly on the boundary of the source set.
    """
    if b_values is None:
        b_values = 1.0 / np.arange(1, n_max + 1, dtype=float)
    b, space = compact_case(b_values, n_max)
    v = source_element_vector(element, n_max)
    if normalize:
        v = v / space.norm(v)
    f = source_function(v, b, space, phi)
    return MultiplicationProblem(b=b, space=space, f_true=f,
                                 name=f"counting[{element}]",
                                 source_scale=float(space.norm(v)))


def power_decay_pair(kappa: float, radius: float = 50.0,
                     n: int = 2**14) -> tuple[Multiplier, MeasureSpace]:
    return PowerDecay(kappa), MeasureSpace.halfline(radius, n)


def pure_power_pair(kappa: float, n: int = 2**14,
                    graded: bool = False) -> tuple[Multiplier, MeasureSpace]:
    space = MeasureSpace.interval_graded(1.0, n) if graded \
        else MeasureSpace.interval(0.0, 1.0, n)
    return PurePower(kappa), space


def plateau_pair(radius: float = 50.0, n: int = 2**14) -> tuple[Multiplier, MeasureSpace]:
    return PlateauCounterexample(), MeasureSpace.line(radius, n)


def exp_decay_pair(radius: float = 30.0, n: int = 2**14) -> tuple[Multiplier, MeasureSpace]:
    """b(s) = exp(-s) on the half-line, with its exact distribution function."""
    mult = CallableMultiplier(
        lambda s: np.exp(-s), sup_bound=1.0, tail_vanishes=True,
        exact_distribution=lambda t: np.log(1.0 / t) if t < 1.0 else 0.0)
    return mult, MeasureSpace.halfline(radius, n)
