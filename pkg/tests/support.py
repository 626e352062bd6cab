"""Shared builders for randomized test inputs."""

import numpy as np

from multreg import (BackgroundPart, CallableMultiplier, GaussianFrequency,
                     MeasureSpace, MonotonePiece, PiecewiseMonotone,
                     PowerDecay, PowerIndex, PurePower, Tabulated)


def random_mixed_multipliers(n_cases, n_nodes, seed=0):
    """(multiplier, space) pairs cycling through the families."""
    rng = np.random.default_rng(seed)
    out = []
    for i in range(n_cases):
        which = i % 6
        if which == 0:
            out.append((PowerDecay(float(rng.uniform(0.5, 2.0))),
                        MeasureSpace.halfline(50.0, n_nodes)))
        elif which == 1:
            out.append((GaussianFrequency(float(rng.uniform(0.5, 1.5)),
                                          float(rng.uniform(0.5, 2.0))),
                        MeasureSpace.line(8.0, n_nodes)))
        elif which == 2:
            space = MeasureSpace.interval(0.0, 2.0, n_nodes)
            a, ph, lam = rng.uniform(1, 6), rng.uniform(0, np.pi), rng.uniform(0.2, 1.0)
            vals = 0.2 + np.abs(np.sin(a * space.nodes + ph)) * np.exp(-lam * space.nodes)
            out.append((Tabulated(vals), space))
        elif which == 3:
            out.append((PurePower(float(rng.uniform(0.5, 3.0))),
                        MeasureSpace.interval(0.0, 1.0, n_nodes)))
        elif which == 4:
            lam = float(rng.uniform(0.5, 2.0))
            out.append((CallableMultiplier(lambda s, lam=lam: np.exp(-lam * s),
                                           sup_bound=1.0),
                        MeasureSpace.halfline(30.0, n_nodes)))
        else:
            p = float(rng.uniform(0.5, 2.0))
            space = MeasureSpace.counting(n_nodes)
            out.append((Tabulated(space.nodes ** (-p)), space))
    return out


def random_piecewise(rng, n_pieces=None):
    """Piecewise-monotone multiplier with a clearly dominating piece."""
    m = int(n_pieces or rng.integers(1, 4))
    nus = np.sort(rng.uniform(0.5, 3.0, size=m))
    if m > 1 and nus[-1] - nus[-2] < 0.4:
        nus[-1] = nus[-2] + 0.4  # keep the top order isolated
    zeros = np.linspace(0.15, 0.85, m) + rng.uniform(-0.02, 0.02, size=m)
    radius = 0.05 + 0.05 * rng.random()
    pieces = []
    for z, nu in zip(zeros, rng.permutation(nus)):
        orientation = "increasing_right" if rng.random() < 0.5 else "increasing_left"
        pieces.append(MonotonePiece(float(z), orientation, PowerIndex(float(nu)),
                                    radius))
    background = BackgroundPart(float(rng.uniform(0.6, 1.0)))
    return PiecewiseMonotone(tuple(pieces), background, hi=1.0)


def brute_force_increasing(b, hi, n_samples=10**5):
    """Sorted uniform sampling oracle for the increasing rearrangement."""
    h = hi / n_samples
    s = (np.arange(n_samples) + 0.5) * h
    vals = np.sort(np.asarray(b(s)))
    knots = np.concatenate(([0.0], np.cumsum(np.full(n_samples, h))))

    def evaluate(t):
        idx = np.minimum(np.searchsorted(knots[1:], t, side="right"),
                         n_samples - 1)
        return vals[idx]

    return evaluate
