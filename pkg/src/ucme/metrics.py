"""Run metrics: archive-level scores, per-batch scores, AUC and the t-test."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

from scipy.stats import t as t_dist

from .archive import Elite, EliteArchive
from .users import usc


@dataclass(frozen=True)
class Snapshot:
    evals_so_far: int
    selection_index: int
    coverage: float
    max_fitness: float
    qd_score: float
    max_usc: float
    mean_usc: float
    mean_wusc: float
    sum_wusc: float
    local_diversity: float
    local_mean_fitness: float
    local_mean_usc: float


@dataclass
class RunLog:
    config: dict
    seed: int
    run_index: int
    snapshots: list[Snapshot] = field(default_factory=list)
    selections: list[dict] = field(default_factory=list)
    final_feasible: list[dict] = field(default_factory=list)
    final_infeasible: list[dict] = field(default_factory=list)

    def to_jsonl(self) -> str:
        """Line-delimited record stream; deterministic byte-for-byte."""
        records = [
            {"type": "config", "seed": self.seed, "run": self.run_index,
             **self.config},
        ]
        records += [{"type": "snapshot", **asdict(s)} for s in self.snapshots]
        records += [{"type": "selection", **s} for s in self.selections]
        records.append({"type": "final_archive", "which": "feasible",
                        "cells": self.final_feasible})
        records.append({"type": "final_archive", "which": "infeasible",
                        "cells": self.final_infeasible})
        return "\n".join(
            json.dumps(r, sort_keys=True, separators=(",", ":"))
            for r in records
        ) + "\n"

    @classmethod
    def from_jsonl(cls, text: str) -> "RunLog":
        config: dict = {}
        seed = 0
        run_index = 0
        snapshots: list[Snapshot] = []
        selections: list[dict] = []
        finals: dict[str, list] = {"feasible": [], "infeasible": []}
        for line in text.splitlines():
            if not line.strip():
                continue
            rec = json.loads(line)
            kind = rec.pop("type")
            if kind == "config":
                seed = rec.pop("seed")
                run_index = rec.pop("run")
                config = rec
            elif kind == "snapshot":
                snapshots.append(Snapshot(**rec))
            elif kind == "selection":
                selections.append(rec)
            elif kind == "final_archive":
                finals[rec["which"]] = rec["cells"]
        return cls(config, seed, run_index, snapshots, selections,
                   finals["feasible"], finals["infeasible"])


def usc_metrics(feasible: EliteArchive, user: str | None,
                s: int) -> tuple[float, float, float, float]:
    """(max USC, mean USC, mean W-USC, sum W-USC) over the feasible
    archive; zeros when it is empty or no user is given."""
    elites = feasible.elites()
    if not elites or user is None:
        return (0.0, 0.0, 0.0, 0.0)
    scores = [usc(user, e.evaluation.bc, s) for e in elites]
    weighted = [u * e.evaluation.fitness for u, e in zip(scores, elites)]
    n = len(elites)
    return (max(scores), sum(scores) / n, sum(weighted) / n, sum(weighted))


def local_metrics(alternatives: list[Elite], user: str | None,
                  s: int) -> tuple[float, float, float]:
    """(diversity, mean fitness, mean USC) of one presented batch.

    Diversity is the mean pairwise distance between behavior pairs; a
    single alternative has diversity 0.
    """
    if not alternatives:
        raise ValueError("no alternatives")
    n = len(alternatives)
    diversity = 0.0
    if n > 1:
        total = 0.0
        pairs = 0
        for i in range(n):
            bi = alternatives[i].evaluation.bc
            for j in range(i + 1, n):
                bj = alternatives[j].evaluation.bc
                total += math.hypot(bi[0] - bj[0], bi[1] - bj[1])
                pairs += 1
        diversity = total / pairs
    mean_fitness = sum(a.evaluation.fitness for a in alternatives) / n
    if user is None:
        mean_usc = 0.0
    else:
        mean_usc = sum(usc(user, a.evaluation.bc, s)
                       for a in alternatives) / n
    return (diversity, mean_fitness, mean_usc)


def usc_efficiency(selected_usc: list[float]) -> float:
    """Net USC progress over total USC movement across selections, in
    [-1, 1]; 0 when the selections never changed the score."""
    if len(selected_usc) < 2:
        raise ValueError("need at least two selections")
    num = 0.0
    den = 0.0
    for prev, cur in zip(selected_usc, selected_usc[1:]):
        num += cur - prev
        den += abs(cur - prev)
    if den == 0.0:
        return 0.0
    return num / den


def auc(series: list[tuple[float, float]]) -> float:
    """Trapezoidal area under (evals, value), normalized by the span so a
    constant series integrates to its value."""
    if len(series) < 2:
        raise ValueError("need at least two points")
    area = 0.0
    for (x0, y0), (x1, y1) in zip(series, series[1:]):
        if x1 <= x0:
            raise ValueError("evaluation counts must be strictly increasing")
        area += 0.5 * (y0 + y1) * (x1 - x0)
    span = series[-1][0] - series[0][0]
    return area / span


def t_test(a: list[float], b: list[float]) -> tuple[float, float]:
    """Two-sample pooled-variance t statistic and two-tailed p-value."""
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("need at least two observations per sample")
    ma = sum(a) / na
    mb = sum(b) / nb
    va = sum((x - ma) ** 2 for x in a) / (na - 1)
    vb = sum((x - mb) ** 2 for x in b) / (nb - 1)
    pooled = ((na - 1) * va + (nb - 1) * vb) / (na + nb - 2)
    if pooled == 0.0:
        if ma == mb:
            return (0.0, 1.0)
        return (math.inf if ma > mb else -math.inf, 0.0)
    t = (ma - mb) / math.sqrt(pooled * (1.0 / na + 1.0 / nb))
    df = na + nb - 2
    p = 2.0 * float(t_dist.sf(abs(t), df))
    return (t, p)
