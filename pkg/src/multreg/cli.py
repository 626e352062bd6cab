"""Command line front end.

Subcommands wrap the library one-to-one: ``run``/``rates`` execute the
config's full pipeline, ``rearrange`` dumps distribution and
rearrangement tables, ``dalpha`` the effective ill-posedness profile with
its simple upper bound, ``check-scheme`` certifies axioms and
qualification, ``reconstruct`` writes one reconstruction as two-column
text.

Exit codes: 0 success, 2 config error, 3 invariant/bound violation,
4 divergent problem.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import runner
from .analysis import effective_illposedness, reconstruct
from .config import build_index_function, build_problem, load_config
from .errors import (ConfigError, Divergent, MultRegError,
                     RearrangementUndefined, RequiresFiniteMeasure)
from .noise import WhiteNoiseSampler, sample_white
from .rearrangement import (decreasing_rearrangement, distribution_function,
                            increasing_rearrangement)
from .runner import EXIT_CONFIG, EXIT_DIVERGENT, EXIT_OK, EXIT_VIOLATION, fmt
from .schemes import certify_axioms, certify_qualification, scheme_by_name


def _table(path: Path, header, rows):
    path.parent.mkdir(parents=True, exist_ok=True)
    lines = [",".join(header)]
    lines += [",".join(fmt(x) for x in row) for row in rows]
    path.write_text("\n".join(lines) + "\n", encoding="ascii", newline="\n")


def _emit(out_dir: Path, name: str, header, rows, out_format: str):
    if out_format == "json":
        payload = [dict(zip(header, row)) for row in rows]
        path = out_dir / f"{name}.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, sort_keys=True, indent=2,
                                   default=float) + "\n",
                        encoding="ascii", newline="\n")
    else:
        _table(out_dir / f"{name}.csv", header, rows)


def cmd_run(config, args) -> int:
    report = runner.run(config, out_dir=args.out, threads=args.threads,
                        out_format=args.format)
    if report.failure:
        print(f"failure ({report.status}): {report.failure}")
    else:
        slope = "n/a" if report.fitted_slope is None else f"{report.fitted_slope:.4f}"
        print(f"{report.mode} study with {report.scheme}: "
              f"{len(report.rows)} deltas, violations={report.violations}, "
              f"fitted slope={slope}")
    return report.exit_code


def cmd_rearrange(config, args) -> int:
    problem = build_problem(config)
    b, space = problem.b, problem.space
    out = Path(args.out or config.out_dir)
    sup = float(b.sup_bound)
    ts = np.geomspace(sup * 1e-6, sup, 64)
    _emit(out, "distribution",
          ("t", "d_b"),
          [(t, distribution_function(b, space, float(t))) for t in ts],
          args.format)
    dec = decreasing_rearrangement(b, space)
    _emit(out, "decreasing_rearrangement",
          ("t_left", "t_right", "value"), list(dec.cells()), args.format)
    try:
        inc = increasing_rearrangement(b, space)
        _emit(out, "increasing_rearrangement",
              ("t_left", "t_right", "value"), list(inc.cells()), args.format)
    except RequiresFiniteMeasure:
        print("increasing rearrangement skipped (infinite measure)")
    print(f"rearrangement tables written to {out}")
    return EXIT_OK


def cmd_dalpha(config, args) -> int:
    problem = build_problem(config)
    profile = effective_illposedness(problem.b, problem.space)
    out = Path(args.out or config.out_dir)
    rows = list(zip(profile.alpha_grid, profile.d_values, profile.upper_bounds))
    _emit(out, "dalpha", ("alpha", "D", "upper_bound"), rows, args.format)
    print(f"D(alpha) profile ({len(rows)} points) written to {out}")
    return EXIT_OK


def cmd_check_scheme(config, args) -> int:
    scheme = scheme_by_name(config.scheme)
    ok = certify_axioms(scheme)
    print(f"axioms({scheme.name}): {'PASS' if ok else 'FAILED'}")
    problem = None
    if config.index_function.get("family") == "reciprocal_measure":
        problem = build_problem(config)
    phi = build_index_function(config, problem)
    parent = None
    if scheme.name.startswith("truncated:"):
        parent = certify_qualification(
            scheme_by_name(scheme.name[len("truncated:"):]), phi)
    cert = certify_qualification(scheme, phi, parent_certificate=parent)
    status = "PASS" if cert.passed else "FAILED"
    print(f"qualification({phi.name}): {status} (C_phi estimate {cert.c_phi:.6g})")
    return EXIT_OK if (ok and cert.passed) else EXIT_VIOLATION


def cmd_reconstruct(config, args) -> int:
    problem = build_problem(config)
    b, space, f = problem.b, problem.space, problem.f_true
    scheme = scheme_by_name(config.scheme)
    delta = config.deltas[0] if config.deltas else 0.0
    if config.alpha is not None:
        alpha = config.alpha
    else:
        from .analysis import choose_alpha_deterministic, choose_alpha_white
        phi = build_index_function(config, problem)
        if config.mode == "white":
            profile = effective_illposedness(b, space)
            alpha = choose_alpha_white(phi, profile, delta)
        else:
            alpha = choose_alpha_deterministic(phi, delta)
    vals = b.values_on(space)
    g = vals * f
    out = Path(args.out or config.out_dir)
    if delta > 0:
        xi = sample_white(WhiteNoiseSampler(config.seed), space)
        g = g + delta * xi
        _table(out / "noise.txt", ("node", "xi"), list(zip(space.nodes, xi)))
    rec = reconstruct(scheme, alpha, b, space, g)
    _table(out / "reconstruction.txt", ("node", "estimate"),
           list(zip(space.nodes, np.real(rec.estimate))))
    err = space.norm(f - rec.estimate)
    print(f"alpha={alpha:.6g} delta={delta:.6g} error={err:.6g} -> {out}")
    return EXIT_OK


_COMMANDS = {
    "run": cmd_run,
    "rates": cmd_run,
    "rearrange": cmd_rearrange,
    "dalpha": cmd_dalpha,
    "check-scheme": cmd_check_scheme,
    "reconstruct": cmd_reconstruct,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="multreg",
        description="Spectral regularization experiments for multiplication "
                    "operator equations")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("run", "execute the configured experiment pipeline"),
        ("rates", "alias of run: full rate study"),
        ("rearrange", "dump distribution function and rearrangement tables"),
        ("dalpha", "dump the effective ill-posedness profile D(alpha)"),
        ("check-scheme", "certify scheme axioms and qualification"),
        ("reconstruct", "write a single reconstruction as two-column text"),
    ]:
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True, help="path to the YAML config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config seed")
        p.add_argument("--threads", type=int, default=1,
                       help="parallel workers over delta points")
        p.add_argument("--format", choices=("csv", "json"), default=None,
                       help="output table format")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        config = load_config(args.config)
        if args.seed is not None:
            config = replace(config, seed=args.seed)
        if args.format is None:
            args.format = config.out_format
        return _COMMANDS[args.command](config, args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (Divergent, RearrangementUndefined) as exc:
        print(f"divergent problem: {exc}", file=sys.stderr)
        return EXIT_DIVERGENT
    except MultRegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VIOLATION


if __name__ == "__main__":
    sys.exit(main())
