"""Command-line front end: compute, verify, compare, selftest.

Exit codes: 0 ok, 1 input error, 2 capacity exceeded, 3 mismatch or failed check.
"""
from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import List, Optional

from .akh import compute_akh, invariance_report
from .complex import DEFAULT_BUDGET, OPERATOR_KINDS, KhovanovComplex
from .diagram import AnnularDiagram, load_apd
from .errors import (AnnularError, AxisThroughCrossing, CapacityExceeded, InvalidDiagram,
                     MalformedInput)
from .suite import Check, corrupt, dump_tables, selftest, verify_complex

EXIT_OK, EXIT_INPUT, EXIT_CAPACITY, EXIT_MISMATCH = 0, 1, 2, 3
N_MAX_CAP = 6
JOBS_ENV = "ANNULAR_LINFTY_JOBS"


@dataclass
class RunConfig:
    n_max: int = 4
    budget: int = DEFAULT_BUDGET
    format: str = "json"
    jobs: int = 1
    pivot: str = "canonical"

    def __post_init__(self):
        if self.n_max < 2:
            raise ValueError("n_max must be at least 2")
        if self.budget <= 0:
            raise ValueError("budget must be positive")
        if self.jobs < 1:
            raise ValueError("jobs must be positive")


class UsageError(Exception):
    pass


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def shipped_path(name: str) -> Optional[Path]:
    """Path of a shipped diagram file, or None."""
    ref = resources.files("annular_linfty") / "data" / name
    return Path(str(ref)) if ref.is_file() else None


def read_diagram(path: str) -> AnnularDiagram:
    p = Path(path)
    if not p.exists():
        alt = shipped_path(p.name) or shipped_path(p.name + ".apd.json")
        if alt is None:
            raise UsageError(f"cannot read {path}: no such file")
        p = alt
    try:
        return load_apd(p)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc}") from exc


def _jobs(value: Optional[int]) -> int:
    if value is not None:
        return value
    env = os.environ.get(JOBS_ENV)
    if env:
        try:
            return int(env)
        except ValueError:
            raise UsageError(f"{JOBS_ENV} must be an integer, got {env!r}")
    return 1


def config_from(args) -> RunConfig:
    if args.n_max > N_MAX_CAP and not args.force:
        raise UsageError(f"--n-max {args.n_max} exceeds {N_MAX_CAP}; pass --force to override")
    try:
        return RunConfig(args.n_max, args.budget, args.format, _jobs(args.jobs), args.pivot)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _emit_checks(checks: List[Check], cfg: RunConfig, extra: dict) -> int:
    passed = all(c.passed for c in checks)
    if cfg.format == "json":
        doc = dict(extra)
        doc.update({"passed": passed, "checks": [c.to_json() for c in checks],
                    "identities_checked": sum(c.count for c in checks)})
        print(dumps(doc))
    else:
        for c in checks:
            print(c.line())
        total = sum(c.count for c in checks)
        failed = sum(not c.passed for c in checks)
        print(f"{len(checks)} checks, {total} identities, {failed} failed")
    return EXIT_OK if passed else EXIT_MISMATCH


def cmd_compute(args, cfg: RunConfig) -> int:
    dg = read_diagram(args.file)
    res = compute_akh(dg, cfg.n_max, cfg.budget, cfg.pivot, cfg.jobs)
    print(dumps(res.to_json()) if cfg.format == "json" else res.to_text())
    return EXIT_OK if not res.relation_report else EXIT_MISMATCH


def cmd_verify(args, cfg: RunConfig) -> int:
    dg = read_diagram(args.file)
    cx = KhovanovComplex(dg, cfg.budget, cfg.jobs)
    if args.corrupt:
        corrupt(cx, args.corrupt)
    checks = verify_complex(cx, cfg.n_max, cfg.pivot, cfg.jobs)
    return _emit_checks(checks, cfg, {"file": Path(args.file).name, "n_max": cfg.n_max,
                                      "corrupted": args.corrupt})


def cmd_compare(args, cfg: RunConfig) -> int:
    a, b = read_diagram(args.file_a), read_diagram(args.file_b)
    rep = invariance_report(a, b, cfg.n_max, cfg.budget, cfg.pivot, cfg.jobs)
    if cfg.format == "json":
        print(dumps(rep.to_json()))
    else:
        print(f"grading: {rep.grading}, shift {rep.shift}")
        print(f"graded dimensions equal: {rep.dims_equal}")
        print(f"k2 rank profiles equal: {rep.k2_profiles_equal}")
        print(f"k3 ranks equal (diagnostic only): {rep.k3_equal}")
    return EXIT_OK if rep.all_equal else EXIT_MISMATCH


def cmd_selftest(args, cfg: RunConfig) -> int:
    if args.dump_tables:
        print(dumps(dump_tables()))
        return EXIT_OK
    checks = selftest(cfg.n_max, args.trials, args.seed)
    return _emit_checks(checks, cfg, {"n_max": cfg.n_max, "trials": args.trials,
                                      "seed": args.seed})


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n-max", type=int, default=4, help="highest arity computed (default 4)")
    common.add_argument("--budget", type=int, default=DEFAULT_BUDGET,
                        help="generator-slot budget (default 2^20)")
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--jobs", type=int, default=None,
                        help=f"worker threads (fallback: ${JOBS_ENV}, else 1)")
    common.add_argument("--pivot", choices=("canonical", "reverse"), default="canonical")
    common.add_argument("--force", action="store_true", help=f"allow --n-max above {N_MAX_CAP}")

    parser = argparse.ArgumentParser(prog="annular-linfty",
                                     description="Annular Khovanov homology with its L-infinity module structure over F2.")
    sub = parser.add_subparsers(dest="command", required=True)
    p = sub.add_parser("compute", parents=[common], help="compute AKh and its operations")
    p.add_argument("file")
    p.set_defaults(run=cmd_compute)
    p = sub.add_parser("verify", parents=[common], help="run the operator identity suite")
    p.add_argument("file")
    p.add_argument("--corrupt", choices=OPERATOR_KINDS, default=None,
                   help="toggle one entry of this operator first (negative control)")
    p.set_defaults(run=cmd_verify)
    p = sub.add_parser("compare", parents=[common], help="compare AKh of two diagrams")
    p.add_argument("file_a")
    p.add_argument("file_b")
    p.set_defaults(run=cmd_compare)
    p = sub.add_parser("selftest", parents=[common], help="algebra, combinatorics and transfer oracles")
    p.add_argument("--dump-tables", action="store_true", help="print builtin bracket tables as JSON")
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(run=cmd_selftest)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_INPUT
    try:
        cfg = config_from(args)
        return args.run(args, cfg)
    except (UsageError, MalformedInput, InvalidDiagram, AxisThroughCrossing) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except CapacityExceeded as exc:
        print(f"CapacityExceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except AnnularError as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_MISMATCH


if __name__ == "__main__":
    sys.exit(main())
