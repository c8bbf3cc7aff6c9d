"""Headless experiment runner and statistical comparison of run sets."""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .domain import DesignSpec
from .engine import DasMethod, Session, SessionConfig, init_session, stream_rng
from .metrics import RunLog, Snapshot, auc, local_metrics, t_test, usc_efficiency, usc_metrics
from .users import USER_IDS, choose, usc

BASELINE = "baseline"

SERIES_METRICS = (
    "coverage", "max_fitness", "qd_score", "max_usc", "mean_usc",
    "mean_wusc", "sum_wusc", "local_diversity", "local_mean_fitness",
    "local_mean_usc",
)


def warm_session(ds: DesignSpec, config: SessionConfig) -> Session:
    """The shared starting state for every run of an experiment: one
    seeded, warmed session per (design spec, seed)."""
    return init_session(ds, config)


@dataclass
class _Recorder:
    """Collects snapshots on the eval cadence and at selection ends."""

    log: RunLog
    user: str | None
    evals_per_selection: int
    snapshot_every: int
    locals_now: tuple[float, float, float] = (0.0, 0.0, 0.0)

    def _selection_index(self, session: Session) -> int:
        return max(1, math.ceil(session.evals_done
                                / self.evals_per_selection))

    def snapshot(self, session: Session) -> None:
        s = self._selection_index(session)
        feas = session.feasible
        mx = feas.max_fitness()
        max_usc, mean_usc, mean_wusc, sum_wusc = usc_metrics(
            feas, self.user, s)
        self.log.snapshots.append(Snapshot(
            evals_so_far=session.evals_done,
            selection_index=session.selections_done,
            coverage=feas.coverage(),
            max_fitness=0.0 if mx is None else mx,
            qd_score=feas.qd_score(),
            max_usc=max_usc,
            mean_usc=mean_usc,
            mean_wusc=mean_wusc,
            sum_wusc=sum_wusc,
            local_diversity=self.locals_now[0],
            local_mean_fitness=self.locals_now[1],
            local_mean_usc=self.locals_now[2],
        ))

    def on_eval(self, session: Session) -> None:
        done = session.evals_done
        if done % self.snapshot_every == 0 \
                and done % self.evals_per_selection != 0:
            self.snapshot(session)


def run_experiment(ds: DesignSpec, user: str, das: str,
                   runs: int, selections: int, evals_per_selection: int,
                   seed: int, config: SessionConfig | None = None,
                   snapshot_every: int = 1000,
                   warm: Session | None = None,
                   n_jobs: int = 1) -> list[RunLog]:
    """Run `runs` independent evolutions from one shared warm-up.

    `user` is an artificial user id or "baseline"; `das` is a sampling
    method name or "baseline" for unguided evolution.  A guided run loops
    sample / choose / evolve; a baseline run evolves unguided on the same
    evaluation schedule (USC metrics are still scored for `user`).
    """
    if user != BASELINE and user not in USER_IDS:
        raise ValueError(f"unknown user {user!r}")
    if das != BASELINE:
        DasMethod(das)   # validates
    if user == BASELINE and das != BASELINE:
        raise ValueError("a guided run needs an artificial user")
    config = config or SessionConfig(seed=seed)
    if config.seed != seed:
        raise ValueError("config seed does not match the experiment seed")
    if config.evals_per_selection != evals_per_selection:
        raise ValueError("config evals_per_selection does not match")
    if warm is None:
        warm = warm_session(ds, config)

    args = [(ds, user, das, warm, selections, evals_per_selection,
             snapshot_every, seed, r) for r in range(runs)]
    if n_jobs > 1 and runs > 1 and hasattr(os, "fork"):
        import multiprocessing as mp
        with mp.get_context("fork").Pool(min(n_jobs, runs)) as pool:
            return pool.map(_run_one_star, args)
    return [_run_one_star(a) for a in args]


def _run_one_star(args) -> RunLog:
    return _run_one(*args)


def _run_one(ds: DesignSpec, user: str, das: str, warm: Session,
             selections: int, evals_per_selection: int, snapshot_every: int,
             seed: int, run_index: int) -> RunLog:
    session = warm.clone(stream_rng(seed, run_index + 1))
    scoring_user = None if user == BASELINE else user
    log = RunLog(
        config={
            "user": user,
            "das": das,
            "selections": selections,
            "evals_per_selection": evals_per_selection,
            "window_size": session.config.window_size,
            "resolution": session.config.archive.resolution,
            "sites": session.config.domain.sites,
            "warmup_evals": session.warmup_evals,
        },
        seed=seed,
        run_index=run_index,
    )
    rec = _Recorder(log, scoring_user, evals_per_selection, snapshot_every)
    rec.snapshot(session)   # state at the start of the interactive phase

    for s in range(1, selections + 1):
        if das == BASELINE:
            session.baseline_step(evals_per_selection, observer=rec.on_eval)
        else:
            alternatives = session.sample_alternatives(DasMethod(das))
            idx = choose(user, alternatives, s)
            chosen = alternatives[idx]
            rec.locals_now = local_metrics(alternatives, scoring_user, s)
            session.apply_selection(chosen, observer=rec.on_eval)
            log.selections.append({
                "s": s,
                "method": das,
                "cell": list(chosen.cell),
                "bc": list(chosen.evaluation.bc),
                "fitness": chosen.evaluation.fitness,
                "usc": usc(user, chosen.evaluation.bc, s),
            })
        rec.snapshot(session)   # selection boundary

    log.final_feasible = session.feasible.dump()
    log.final_infeasible = session.infeasible.dump()
    return log


def metric_values(logs: list[RunLog], metric: str) -> list[float]:
    """Per-run scalar for a metric: AUC over snapshots for series metrics,
    the efficiency score for "usc_efficiency"."""
    if metric == "usc_efficiency":
        out = []
        for log in logs:
            if len(log.selections) < 2:
                raise ValueError(
                    "usc_efficiency needs at least two selections per run")
            out.append(usc_efficiency([s["usc"] for s in log.selections]))
        return out
    if metric not in SERIES_METRICS:
        raise ValueError(f"unknown metric {metric!r}")
    out = []
    for log in logs:
        series = [(s.evals_so_far, getattr(s, metric))
                  for s in log.snapshots]
        out.append(auc(series))
    return out


def compare(a: list[RunLog], b: list[RunLog], metrics: list[str],
            alpha: float = 0.05, bonferroni_m: int = 1) -> list[dict]:
    """Significance table between two equally sized run sets.

    A row per metric: means, the t statistic, the p-value, whether
    p < alpha / bonferroni_m, and which side won if so.
    """
    if len(a) != len(b):
        raise ValueError("run counts differ between the two sides")
    rows = []
    threshold = alpha / bonferroni_m
    for metric in metrics:
        va = metric_values(a, metric)
        vb = metric_values(b, metric)
        t, p = t_test(va, vb)
        significant = p < threshold
        winner = None
        if significant:
            winner = "a" if sum(va) / len(va) > sum(vb) / len(vb) else "b"
        rows.append({
            "metric": metric,
            "mean_a": sum(va) / len(va),
            "mean_b": sum(vb) / len(vb),
            "t": t,
            "p": p,
            "significant": significant,
            "winner": winner,
        })
    return rows


def comparison_csv(rows: list[dict]) -> str:
    header = "metric,mean_a,mean_b,t,p,significant,winner"
    lines = [header]
    for r in rows:
        lines.append(
            f"{r['metric']},{r['mean_a']:.6g},{r['mean_b']:.6g},"
            f"{r['t']:.6g},{r['p']:.6g},{int(r['significant'])},"
            f"{r['winner'] or ''}"
        )
    return "\n".join(lines) + "\n"


def save_logs(logs: list[RunLog], out_dir: str | Path,
              heatmaps: bool = False) -> None:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    for log in logs:
        path = out / f"run_{log.run_index:03d}.jsonl"
        path.write_text(log.to_jsonl())
        if heatmaps:
            _write_heatmap(out / f"run_{log.run_index:03d}_feasible.csv",
                           log.final_feasible, log.config["resolution"])


def _write_heatmap(path: Path, cells: list[dict], resolution: int) -> None:
    grid = [["" for _ in range(resolution)] for _ in range(resolution)]
    for cell in cells:
        c, r = cell["cell"]
        grid[r][c] = f"{cell['quality']:.6g}"
    path.write_text("\n".join(",".join(row) for row in grid) + "\n")


def load_logs(in_dir: str | Path) -> list[RunLog]:
    paths = sorted(Path(in_dir).glob("run_*.jsonl"))
    if not paths:
        raise FileNotFoundError(f"no run logs under {in_dir}")
    return [RunLog.from_jsonl(p.read_text()) for p in paths]
