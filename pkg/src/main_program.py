"""ArchetypeLab: command-line entry point.

Subcommands:
    scores       sampling scores and sigma_min,p of an archetype matrix
    recover      latent-type recovery for a scenario (recovery mode)
    prokhorov    exact Prokhorov and TV distances between two distribution files
    mech-audit   build and audit the robust mechanism for one trial
    experiment   run every trial of a scenario and write the report

Exit codes: 0 on success, 1 when ``--check`` is given and an assertion
fails, 2 on an ArchetypeLab error.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Any, Sequence

# Ensure src/ is on the import path when run directly
_src_dir = Path(__file__).resolve().parent
if str(_src_dir) not in sys.path:
    sys.path.insert(0, str(_src_dir))

EXIT_OK = 0
EXIT_ASSERTION = 1
EXIT_ERROR = 2


def _shared_flags() -> argparse.ArgumentParser:
    parent = argparse.ArgumentParser(add_help=False)
    parent.add_argument(
        "--config", help="Scenario file (YAML or JSON) or predefined scenario name."
    )
    parent.add_argument("--out", type=Path, help="Output directory for report files.")
    parent.add_argument("--seed", type=int, help="Override the scenario master seed.")
    parent.add_argument("--trials", type=int, help="Override the number of trials.")
    parent.add_argument("--threads", type=int, help="Worker threads for trials.")
    parent.add_argument(
        "--check", action="store_true", help="Exit with code 1 if an acceptance assertion fails."
    )
    return parent


def build_parser() -> argparse.ArgumentParser:
    from config import APP_NAME, APP_VERSION

    parser = argparse.ArgumentParser(
        prog="archetype-lab",
        description=f"{APP_NAME}: query-efficient type recovery and robust mechanisms.",
    )
    parser.add_argument("--version", action="version", version=f"{APP_NAME} {APP_VERSION}")
    sub = parser.add_subparsers(dest="command", required=True)
    shared = _shared_flags()

    scores = sub.add_parser(
        "scores", parents=[shared], help="Leverage/Lewis scores and sigma_min,p."
    )
    scores.add_argument("--matrix", type=Path, help="Matrix file (.csv or .json).")
    scores.add_argument("--p", default=None, help="Norm index (integer >= 1 or 'inf').")

    rec = sub.add_parser("recover", parents=[shared], help="Recover latent types for a scenario.")
    rec.add_argument(
        "--matrix", type=Path, help="Archetype matrix file; replaces the scenario archetypes."
    )
    rec.add_argument("--p", default=None, help="Norm index (integer >= 1 or 'inf').")
    rec.add_argument("--eps-mdl", type=float, default=None, help="Model-error bound.")
    rec.add_argument("--eps-nq", type=float, default=None, help="Query-noise bound.")
    rec.add_argument("--delta", type=float, default=None, help="Failure probability in (0, 1).")
    rec.add_argument("--n", type=int, default=None, help="Number of bidders.")

    prok = sub.add_parser("prokhorov", parents=[shared], help="Prokhorov distance of two files.")
    prok.add_argument("first", type=Path, help="First distribution JSON file.")
    prok.add_argument("second", type=Path, help="Second distribution JSON file.")
    prok.add_argument("--p", default="2", help="Ground-metric norm index.")
    prok.add_argument("--tol", type=float, default=None, help="Feasibility tolerance.")

    mech = sub.add_parser("mech-audit", parents=[shared], help="Audit the robust mechanism.")
    mech.add_argument("--trial", type=int, default=0, help="Trial index to audit.")

    sub.add_parser("experiment", parents=[shared], help="Run a full experiment.")
    return parser


def _scenario(args: argparse.Namespace) -> Any:
    from harness import resolve_scenario
    from utils import ValidationError

    if not args.config:
        raise ValidationError(f"'{args.command}' needs --config")
    cfg = resolve_scenario(args.config)
    return cfg.replace(seed=args.seed, trials=args.trials, threads=args.threads)


def _emit(payload: dict[str, Any], args: argparse.Namespace, basename: str) -> None:
    """Write to stdout, or to ``<out>/<basename>.json`` (``--out`` itself if it ends in .json)."""
    from utils import dumps_json, export_json_to_path

    if args.out is not None:
        out = Path(args.out)
        export_json_to_path(payload, out if out.suffix == ".json" else out / f"{basename}.json")
    else:
        sys.stdout.write(dumps_json(payload))


def _cmd_scores(args: argparse.Namespace) -> int:
    from harness import gen_archetypes
    from linalg import ArchetypeMatrix, format_norm_index, load_matrix, normalize_norm_index
    from utils import derive_rng

    if args.matrix is not None:
        am = ArchetypeMatrix(load_matrix(args.matrix))
        p = normalize_norm_index(args.p or 2)
    else:
        cfg = _scenario(args)
        am = ArchetypeMatrix(
            gen_archetypes(
                cfg.family, cfg.d, cfg.k, derive_rng(cfg.seed, 0), cfg.resolve_matrix_path()
            )
        )
        p = normalize_norm_index(args.p) if args.p is not None else cfg.p
    scores, inflation = am.sampling_scores(p)
    payload = {
        "d": am.d,
        "k": am.k,
        "p": format_norm_index(p),
        "inf_norm": am.inf_norm,
        "leverage": am.leverage.to_dict(),
        "sampling": scores.to_dict(),
        "inflation": inflation,
        "sigma_min": am.sigma_min(p).to_dict(),
    }
    _emit(payload, args, "scores")
    return EXIT_OK


def _recover_scenario(args: argparse.Namespace) -> Any:
    """Scenario from --config and/or --matrix, with the protocol flags applied on top."""
    from harness import ScenarioConfig
    from linalg import load_matrix
    from utils import ValidationError

    if args.config:
        cfg = _scenario(args)
    elif args.matrix is not None:
        cfg = ScenarioConfig(name=Path(args.matrix).stem).replace(
            seed=args.seed, trials=args.trials, threads=args.threads
        )
    else:
        raise ValidationError("'recover' needs --config or --matrix")

    changes: dict[str, Any] = {
        "mode": "recovery",
        "p": args.p,
        "eps_mdl": args.eps_mdl,
        "eps_nq": args.eps_nq,
        "delta": args.delta,
        "n": args.n,
    }
    if args.matrix is not None:
        d, k = load_matrix(args.matrix).shape
        changes.update(
            family="from_file", matrix_path=str(Path(args.matrix).resolve()), d=d, k=k
        )
    return cfg.replace(**changes)


def _cmd_recover(args: argparse.Namespace) -> int:
    from pipeline import run_experiment

    cfg = _recover_scenario(args)
    report = run_experiment(cfg)
    _emit(report.to_dict(), args, "recovery")
    return EXIT_ASSERTION if args.check and not report.passed else EXIT_OK


def _cmd_prokhorov(args: argparse.Namespace) -> int:
    from distributions import load_dist, prokhorov_distance, tv_distance
    from linalg import format_norm_index, normalize_norm_index

    p = normalize_norm_index(args.p)
    F, G = load_dist(args.first), load_dist(args.second)
    payload = {
        "p": format_norm_index(p),
        "prokhorov": prokhorov_distance(F, G, p, args.tol),
        "tv": tv_distance(F, G),
    }
    _emit(payload, args, "prokhorov")
    return EXIT_OK


def _cmd_mech_audit(args: argparse.Namespace) -> int:
    from pipeline import run_trial
    from utils import ValidationError

    cfg = _scenario(args).replace(mode="mechanism", audit=True)
    record = run_trial(cfg, args.trial)
    if record.failed:
        raise ValidationError(f"Trial {args.trial} failed: {record.error}")
    _emit(record.to_dict(), args, "mech_audit")
    return EXIT_ASSERTION if args.check and not all(record.checks.values()) else EXIT_OK


def _cmd_experiment(args: argparse.Namespace) -> int:
    from config import generate_output_basename, get_output_dir
    from pipeline import run_experiment

    cfg = _scenario(args)
    report = run_experiment(cfg)
    if args.out is not None:
        report.write(Path(args.out), basename="report")
    else:
        report.write(get_output_dir(), basename=generate_output_basename(cfg.name))
    for name, ok in report.assertions.items():
        sys.stdout.write(f"{name}: {'pass' if ok else 'FAIL'}\n")
    return EXIT_ASSERTION if args.check and not report.passed else EXIT_OK


_COMMANDS = {
    "scores": _cmd_scores,
    "recover": _cmd_recover,
    "prokhorov": _cmd_prokhorov,
    "mech-audit": _cmd_mech_audit,
    "experiment": _cmd_experiment,
}


def main(argv: Sequence[str] | None = None) -> int:
    """Parse arguments, initialize configuration and logging, and run a subcommand."""
    from config import APP_VERSION, initialize_and_validate_config
    from utils import ArchetypeLabError, get_logger

    args = build_parser().parse_args(argv)
    initialize_and_validate_config()
    logger = get_logger(__name__)
    logger.info("ArchetypeLab %s: %s", APP_VERSION, args.command)
    try:
        return _COMMANDS[args.command](args)
    except ArchetypeLabError as exc:
        logger.error("%s failed: %s", args.command, exc)
        sys.stderr.write(f"error: {exc}\n")
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
