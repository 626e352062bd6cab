"""Batch pipeline: build problem, certify, sweep deltas, emit tables.

All emitted files are byte-deterministic for a fixed config and seed:
floats are written with 17 significant digits and '.' decimal separator,
rows in delta order, JSON with sorted keys, no timestamps.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .analysis import (WHITE, effective_illposedness, evaluate_delta,
                       fit_loglog_slope)
from .config import ExperimentConfig, build_index_function, build_problem
from .errors import (Divergent, MultRegError, PreconditionFailed,
                     RearrangementUndefined)
from .schemes import certify_axioms, certify_qualification, scheme_by_name

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VIOLATION = 3
EXIT_DIVERGENT = 4

CSV_COLUMNS = ("delta", "alpha_star", "empirical_error", "stderr", "bias",
               "variance_term", "bound", "violated")


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "1" if x else "0"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    return f"{float(x):.17g}"


@dataclass(frozen=True)
class ExperimentReport:
    """Per-delta rows plus fitted rates and provenance."""

    mode: str
    scheme: str
    rows: tuple
    fitted_slope: float | None
    theoretical_slope: float | None
    c_phi: float | None
    config_digest: str
    seed: int
    violations: int
    status: str = "ok"          # ok | violation | divergent
    failure: str | None = None
    exit_code: int = EXIT_OK

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "scheme": self.scheme,
            "rows": [{
                "delta": r.delta, "alpha_star": r.alpha_star,
                "empirical_error": r.error, "stderr": r.stderr,
                "bias": r.bias, "variance_term": r.variance_term,
                "bound": r.bound, "violated": int(r.violated),
            } for r in self.rows],
            "fitted_slope": self.fitted_slope,
            "theoretical_slope": self.theoretical_slope,
            "c_phi": self.c_phi,
            "config_digest": self.config_digest,
            "seed": self.seed,
            "violations": self.violations,
            "status": self.status,
            "failure": self.failure,
        }


def rows_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for r in rows:
        lines.append(",".join([
            fmt(r.delta), fmt(r.alpha_star), fmt(r.error), fmt(r.stderr),
            fmt(r.bias), fmt(r.variance_term), fmt(r.bound), fmt(r.violated),
        ]))
    return "\n".join(lines) + "\n"


def _write(out_dir: Path, name: str, text: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    (out_dir / name).write_text(text, encoding="ascii", newline="\n")


def write_report(report: ExperimentReport, out_dir, out_format: str = "csv") -> None:
    out_dir = Path(out_dir)
    if out_format == "csv":
        _write(out_dir, "rows.csv", rows_csv(report.rows))
    else:
        rows = report.to_dict()["rows"]
        _write(out_dir, "rows.json",
               json.dumps(rows, sort_keys=True, indent=2) + "\n")
    _write(out_dir, "report.json",
           json.dumps(report.to_dict(), sort_keys=True, indent=2,
                      allow_nan=True) + "\n")


def run(config: ExperimentConfig, out_dir=None, threads: int = 1,
        out_format: str | None = None, write: bool = True) -> ExperimentReport:
    """Execute the full pipeline and (optionally) write rows + report.

    Divergent problems and undefined rearrangements surface as a
    structured failure report with exit code 4, certification failures
    and bound violations as exit code 3; they do not raise.
    """
    problem = build_problem(config)
    scheme = scheme_by_name(config.scheme)
    seed = config.seed

    def finish(report):
        if write:
            write_report(report, out_dir or config.out_dir,
                         out_format or config.out_format)
        return report

    def failure(status, message, code):
        return finish(ExperimentReport(
            mode=config.mode, scheme=scheme.name, rows=(),
            fitted_slope=None, theoretical_slope=None, c_phi=None,
            config_digest=config.digest, seed=seed, violations=0,
            status=status, failure=message, exit_code=code))

    if not certify_axioms(scheme):
        return failure("violation", f"scheme {scheme.name} failed the axioms",
                       EXIT_VIOLATION)
    try:
        phi = build_index_function(config, problem)
    except (MultRegError, ValueError) as exc:
        return failure("violation", f"index function rejected: {exc}",
                       EXIT_VIOLATION)
    cert = certify_qualification(scheme, phi)
    if not cert.passed:
        return failure("violation",
                       f"scheme {scheme.name} failed qualification {phi.name} "
                       f"(estimate {cert.c_phi:.4g})", EXIT_VIOLATION)

    profile = None
    if config.mode == WHITE:
        try:
            profile = effective_illposedness(problem.b, problem.space)
        except (RearrangementUndefined, Divergent) as exc:
            return failure("divergent", str(exc), EXIT_DIVERGENT)

    deltas = sorted(config.deltas, reverse=True)

    def one(k_delta):
        k, delta = k_delta
        return evaluate_delta(problem, scheme, phi, delta, config.mode,
                              cert.c_phi, n_reps=config.replications,
                              seed=seed, stream_base=100_000 * (k + 1),
                              profile=profile)

    try:
        if threads > 1 and len(deltas) > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                rows = list(pool.map(one, enumerate(deltas)))
        else:
            rows = [one(kd) for kd in enumerate(deltas)]
    except (Divergent, RearrangementUndefined) as exc:
        return failure("divergent", str(exc), EXIT_DIVERGENT)
    except (PreconditionFailed, MultRegError) as exc:
        return failure("violation", str(exc), EXIT_VIOLATION)

    fitted = theoretical = None
    if len(rows) >= 4:
        fitted = fit_loglog_slope(deltas, [r.error for r in rows])
        theoretical = fit_loglog_slope(
            deltas,
            [problem.source_scale * float(phi(r.alpha_star)) for r in rows])
    violations = sum(r.violated for r in rows)
    report = ExperimentReport(
        mode=config.mode, scheme=scheme.name, rows=tuple(rows),
        fitted_slope=fitted, theoretical_slope=theoretical, c_phi=cert.c_phi,
        config_digest=config.digest, seed=seed, violations=violations,
        status="violation" if violations else "ok", failure=None,
        exit_code=EXIT_VIOLATION if violations else EXIT_OK)
    return finish(report)
