"""Command-line front end: headless experiments, comparisons, the service."""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .archive import ArchiveConfig
from .domain import DomainConfig, apartment_spec, load_design_spec
from .engine import SessionConfig
from .harness import (
    BASELINE,
    compare,
    comparison_csv,
    load_logs,
    run_experiment,
    save_logs,
)
from .users import USER_IDS

DAS_NAMES = ("random", "quadrants", "squares", "edges", "corners", "medoids")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ucme",
        description="Interactive quality-diversity search over floorplans",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a headless experiment")
    run.add_argument("--ds", help="design-spec JSON (default: bundled apartment)")
    run.add_argument("--user", required=True,
                     choices=USER_IDS + (BASELINE,),
                     help="artificial user, or 'baseline' for unguided")
    run.add_argument("--das", default="corners",
                     choices=DAS_NAMES + (BASELINE,))
    run.add_argument("--runs", type=int, default=10)
    run.add_argument("--selections", type=int, default=10)
    run.add_argument("--evals", type=int, default=10_000,
                     help="evaluations per selection")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--out", required=True, help="output directory")
    run.add_argument("--resolution", type=int, default=64)
    run.add_argument("--window", type=int, default=9)
    run.add_argument("--sites", type=int, default=DomainConfig().sites)
    run.add_argument("--snapshot-every", type=int, default=1000)
    run.add_argument("--jobs", type=int, default=1,
                     help="parallel worker processes for runs")
    run.add_argument("--dump-heatmaps", action="store_true")

    cmp_ = sub.add_parser("compare", help="compare two experiment directories")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--metrics", default="coverage,max_fitness,qd_score,"
                      "max_usc,mean_usc,mean_wusc,sum_wusc")
    cmp_.add_argument("--alpha", type=float, default=0.05)
    cmp_.add_argument("--bonferroni", type=int, default=1)
    cmp_.add_argument("--out", help="write CSV here (default: stdout)")

    serve = sub.add_parser("serve", help="start the interactive session service")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--static",
                       help="directory with the built web UI "
                            "(default: ./frontend/dist when present)")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "run":
        return _cmd_run(args)
    if args.command == "compare":
        return _cmd_compare(args)
    if args.command == "serve":
        return _cmd_serve(args)
    return 2


def _cmd_run(args) -> int:
    ds = load_design_spec(args.ds) if args.ds else apartment_spec()
    if args.user == BASELINE and args.das != BASELINE:
        args.das = BASELINE
    config = SessionConfig(
        archive=ArchiveConfig(resolution=args.resolution),
        domain=DomainConfig(sites=args.sites),
        window_size=args.window,
        evals_per_selection=args.evals,
        seed=args.seed,
    )
    print(f"warming up (seed {args.seed})...", file=sys.stderr)
    logs = run_experiment(
        ds, args.user, args.das, runs=args.runs,
        selections=args.selections, evals_per_selection=args.evals,
        seed=args.seed, config=config, snapshot_every=args.snapshot_every,
        n_jobs=args.jobs,
    )
    save_logs(logs, args.out, heatmaps=args.dump_heatmaps)
    total = sum(log.snapshots[-1].evals_so_far for log in logs)
    print(f"wrote {len(logs)} run logs to {args.out} "
          f"({total} evaluations)", file=sys.stderr)
    return 0


def _cmd_compare(args) -> int:
    rows = compare(
        load_logs(args.a), load_logs(args.b),
        [m.strip() for m in args.metrics.split(",") if m.strip()],
        alpha=args.alpha, bonferroni_m=args.bonferroni,
    )
    csv = comparison_csv(rows)
    if args.out:
        Path(args.out).write_text(csv)
    else:
        sys.stdout.write(csv)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app

    static = args.static
    if static is None and Path("frontend/dist/index.html").exists():
        static = "frontend/dist"
    uvicorn.run(create_app(static_dir=static), host=args.host,
                port=args.port)
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
