"""Experiment configuration: a single YAML file with nested sections.

Every physical parameter carries an explicit key (no positional fields),
so configurations diff cleanly and hash reproducibly.  Parsing errors are
reported with the YAML position where available; validation errors name
the offending section and field.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
import yaml

from .analysis import MultiplicationProblem
from .errors import ConfigError
from .gallery import (DeconvolutionProblem, FinalValueProblem, compact_case,
                      exp_decay_pair, fvp_multiplier, plateau_pair,
                      power_decay_pair, pure_power_pair, source_element_vector)
from .indexfuncs import IndexFunction, index_function_from_spec
from .smoothness import phi_star, source_function
from .spaces import MeasureSpace

PROBLEM_KINDS = ("counting", "power_decay", "pure_power", "plateau",
                 "exp_decay", "fvp_whole_space", "fvp_bounded",
                 "deconvolution", "tabulated")
_SPACE_KINDS = {"interval": "lebesgue_interval", "halfline": "lebesgue_halfline",
                "line": "lebesgue_line", "counting": "counting"}
MODES = ("deterministic", "white")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description plus the raw file digest."""

    problem: dict
    scheme: str
    index_function: dict
    mode: str
    deltas: tuple
    replications: int
    seed: int
    n_nodes: int
    truncation_radius: float | None
    graded: bool
    alpha: float | None
    out_dir: str
    out_format: str
    digest: str
    path: str = ""
    noise_distribution: str = "gaussian"
    raw: dict = field(default_factory=dict, repr=False)


def _require(section: dict, key: str, where: str):
    if key not in section:
        raise ConfigError(f"{where}: missing required field '{key}'")
    return section[key]


def load_config(path) -> ExperimentConfig:
    path = Path(path)
    try:
        text = path.read_bytes()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from exc
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        loc = f" at line {mark.line + 1}, column {mark.column + 1}" if mark else ""
        raise ConfigError(f"config parse error{loc}: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config must be a mapping of sections")
    digest = hashlib.sha256(text).hexdigest()
    return parse_config(raw, digest=digest, path=str(path))


def parse_config(raw: dict, digest: str = "", path: str = "") -> ExperimentConfig:
    problem = raw.get("problem")
    if not isinstance(problem, dict):
        raise ConfigError("problem: section missing or not a mapping")
    kind = _require(problem, "kind", "problem")
    if kind not in PROBLEM_KINDS:
        raise ConfigError(f"problem.kind: unknown kind '{kind}' "
                          f"(choose from {', '.join(PROBLEM_KINDS)})")

    scheme = raw.get("scheme", "cutoff")
    if isinstance(scheme, dict):
        scheme = _require(scheme, "name", "scheme")
    if not isinstance(scheme, str):
        raise ConfigError("scheme: expected a name string")

    index_function = raw.get("index_function", {"family": "power", "nu": 1.0})
    if not isinstance(index_function, dict):
        raise ConfigError("index_function: expected a mapping")

    noise = raw.get("noise", {})
    mode = noise.get("mode", "deterministic")
    if mode not in MODES:
        raise ConfigError(f"noise.mode: unknown mode '{mode}'")
    deltas = noise.get("deltas", [])
    try:
        deltas = tuple(float(d) for d in deltas)
    except (TypeError, ValueError):
        raise ConfigError("noise.deltas: expected a list of numbers") from None
    if any(d <= 0 for d in deltas):
        raise ConfigError("noise.deltas: all noise levels must be positive")
    replications = int(noise.get("replications", 1))
    if replications < 1:
        raise ConfigError("noise.replications: must be >= 1")
    if mode == "white" and deltas and replications < 2:
        raise ConfigError("noise.replications: white-noise studies need >= 2")
    distribution = noise.get("distribution", "gaussian")

    disc = raw.get("discretization", {})
    n_nodes = int(disc.get("n_nodes", 2**14))
    if n_nodes < 2:
        raise ConfigError("discretization.n_nodes: must be >= 2")
    radius = disc.get("truncation_radius")
    radius = float(radius) if radius is not None else None
    graded = bool(disc.get("graded", False))

    out = raw.get("output", {})
    out_format = out.get("format", "csv")
    if out_format not in ("csv", "json"):
        raise ConfigError("output.format: must be 'csv' or 'json'")

    alpha = raw.get("alpha")
    alpha = float(alpha) if alpha is not None else None

    return ExperimentConfig(
        problem=dict(problem), scheme=scheme, index_function=dict(index_function),
        mode=mode, deltas=deltas, replications=replications,
        seed=int(raw.get("seed", 0)), n_nodes=n_nodes,
        truncation_radius=radius, graded=graded, alpha=alpha,
        out_dir=out.get("directory", "out"), out_format=out_format,
        digest=digest, path=path, noise_distribution=distribution, raw=raw)


def build_index_function(config: ExperimentConfig,
                         problem: MultiplicationProblem | None = None) -> IndexFunction:
    spec = config.index_function
    if spec.get("family") == "reciprocal_measure":
        if problem is None:
            raise ConfigError("index_function: reciprocal_measure needs a problem")
        return phi_star(problem.b, problem.space)
    try:
        return index_function_from_spec(spec)
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"index_function: {exc}") from exc


def build_problem(config: ExperimentConfig) -> MultiplicationProblem:
    """Instantiate the multiplier, space and true solution."""
    p = config.problem
    kind = p["kind"]
    n = config.n_nodes
    radius = config.truncation_radius
    try:
        if kind == "counting":
            n_max = int(p.get("n_max", 500))
            b_values = p.get("b_values")
            if b_values is None:
                b_values = 1.0 / np.arange(1, n_max + 1, dtype=float)
            b, space = compact_case(b_values, n_max)
        elif kind == "power_decay":
            b, space = power_decay_pair(float(p.get("kappa", 1.0)),
                                        radius or 50.0, n)
        elif kind == "pure_power":
            b, space = pure_power_pair(float(p.get("kappa", 1.0)), n,
                                       graded=config.graded)
        elif kind == "plateau":
            b, space = plateau_pair(radius or 50.0, n)
        elif kind == "exp_decay":
            b, space = exp_decay_pair(radius or 30.0, n)
        elif kind == "fvp_whole_space":
            fvp = FinalValueProblem("whole_space", c=float(p.get("c", 1.0)),
                                    tau=float(p.get("tau", 1.0)),
                                    dimension=int(p.get("dimension", 1)),
                                    radius=radius or 8.0, n_grid=n)
            b, space = fvp_multiplier(fvp)
        elif kind == "fvp_bounded":
            eig = p.get("eigenvalues")
            fvp = FinalValueProblem("bounded_domain", c=float(p.get("c", 1.0)),
                                    tau=float(p.get("tau", 1.0)),
                                    n_max=int(p.get("n_max", 64)),
                                    eigenvalues=tuple(eig) if eig else None,
                                    exponent_power=int(p.get("exponent_power", 2)))
            b, space = fvp_multiplier(fvp)
        elif kind == "deconvolution":
            prob = DeconvolutionProblem(kernel=p.get("kernel", "exponential"),
                                        half_width=float(p.get("half_width", 40.0)),
                                        n=n, sigma=float(p.get("sigma", 1.0)))
            b, space = prob.multiplier, prob.freq_space
        elif kind == "tabulated":
            b, space = _tabulated_from_file(p)
        else:
            raise ConfigError(f"problem.kind: unhandled kind '{kind}'")
        f, scale = _solution_on(b, space, p, config)
        return MultiplicationProblem(b=b, space=space, f_true=f, name=kind,
                                     source_scale=scale)
    except ConfigError:
        raise
    except Exception as exc:
        raise ConfigError(f"problem.{kind}: {exc}") from exc


def _tabulated_from_file(p: dict):
    """Multiplier and space from two-column text (node, value; '#' comments).

    Lebesgue kinds get cell weights from the midpoints between consecutive
    nodes (end cells extended by half a gap); counting requires nodes
    1..n with unit weights.
    """
    from .multipliers import Tabulated

    path = _require(p, "file", "problem.tabulated")
    data = np.loadtxt(path, comments="#")
    if data.ndim != 2 or data.shape[1] != 2:
        raise ConfigError("problem.tabulated: file must hold two columns")
    nodes, values = data[:, 0], data[:, 1]
    kind_word = p.get("space", "halfline")
    if kind_word not in _SPACE_KINDS:
        raise ConfigError(f"problem.tabulated: unknown space '{kind_word}'")
    kind = _SPACE_KINDS[kind_word]
    if kind == "counting":
        if not np.array_equal(nodes, np.arange(1.0, nodes.size + 1)):
            raise ConfigError("problem.tabulated: counting nodes must be 1..n")
        space = MeasureSpace.counting(nodes.size)
    else:
        mids = 0.5 * (nodes[:-1] + nodes[1:])
        first = nodes[0] - (mids[0] - nodes[0])
        last = nodes[-1] + (nodes[-1] - mids[-1])
        edges = np.concatenate(([first], mids, [last]))
        radius = float(max(abs(first), abs(last))) if kind != "lebesgue_interval" \
            else None
        space = MeasureSpace.from_arrays(kind, nodes, np.diff(edges),
                                         truncation_radius=radius)
    b = Tabulated(values, tail_vanishes=bool(p.get("tail_vanishes", True)))
    return b, space


def _solution_on(b, space: MeasureSpace, p: dict,
                 config: ExperimentConfig) -> tuple[np.ndarray, float]:
    """True solution and its source-element norm.

    The solution comes from a two-column file, explicit values, or a
    source condition f = phi(b) v with a named element (normalized, then
    clipped to phi's validity window); file- and value-based solutions
    report source scale 1.
    """
    if "solution_file" in p:
        data = np.loadtxt(p["solution_file"], comments="#")
        if data.ndim != 2 or data.shape[1] != 2 or data.shape[0] != space.nodes.size:
            raise ConfigError("solution_file must hold two columns aligned "
                              "with the discretization")
        return data[:, 1], 1.0
    if "solution_values" in p:
        f = np.asarray(p["solution_values"], float)
        if f.shape != space.nodes.shape:
            raise ConfigError("solution_values not aligned with the space")
        return f, 1.0
    phi = index_function_from_spec(config.index_function) \
        if config.index_function.get("family") != "reciprocal_measure" else None
    if phi is None:
        phi = phi_star(b, space)
    default_element = "inverse_sqrt" if space.kind == "counting" else "constant"
    v = source_element_vector(p.get("element", default_element), space.nodes.size)
    v = v / space.norm(v)
    vals = b.values_on(space)
    lo, hi = phi.domain
    v = np.where((vals > lo) & (vals <= hi), v, 0.0)
    return source_function(v, b, space, phi), float(space.norm(v))
