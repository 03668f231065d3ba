"""Experiment matrices, report tables, and utility-based evaluation.

A matrix cell is one (generator config, learner config, seed) triple:
generate, train, then prune the learned set down the taxonomy. Set sizes
and percentages land in a deterministic report; wall-clock times go to a
separate timings table so reports are byte-stable across reruns.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace

import numpy as np

from .distributions import UtilityFunction
from .momdp import GeneratorConfig, generate
from .pruning import SolutionSet, cd_prune, ch_prune, p_prune
from .qlearn import Learner, LearnerConfig

REPORT_COLUMNS = [
    "config",
    "seed",
    "dus_size",
    "cdus_size",
    "pf_size",
    "ch_size",
    "cdus_pct",
    "pf_pct",
    "ch_pct",
    "status",
]

TIMING_COLUMNS = ["config", "seed", "estimation_seconds", "training_seconds"]


@dataclass
class ExperimentRow:
    config: str
    seed: int
    dus_size: int = 0
    cdus_size: int = 0
    pf_size: int = 0
    ch_size: int = 0
    estimation_seconds: float = 0.0
    training_seconds: float = 0.0
    status: str = "ok"
    sets: dict = field(default_factory=dict)

    def pct(self, size: int) -> float:
        return 100.0 * size / self.dus_size if self.dus_size else 0.0

    def report_values(self) -> list[str]:
        return [
            self.config,
            str(self.seed),
            str(self.dus_size),
            str(self.cdus_size),
            str(self.pf_size),
            str(self.ch_size),
            f"{self.pct(self.cdus_size):.2f}",
            f"{self.pct(self.pf_size):.2f}",
            f"{self.pct(self.ch_size):.2f}",
            self.status,
        ]

    def timing_values(self) -> list[str]:
        return [
            self.config,
            str(self.seed),
            f"{self.estimation_seconds:.3f}",
            f"{self.training_seconds:.3f}",
        ]


def run_cell(
    gen_config: GeneratorConfig, learner_config: LearnerConfig, seed: int
) -> ExperimentRow:
    """Generate, train, and prune one experiment cell."""
    row = ExperimentRow(config=gen_config.name, seed=seed)
    try:
        momdp = generate(replace(gen_config, seed=seed))
        learner = Learner(momdp, replace(learner_config, seed=seed))
        dus = learner.train()
        row.estimation_seconds = learner.stats.get("estimation_seconds", 0.0)
        row.training_seconds = learner.stats.get("training_seconds", 0.0)
        cdus = cd_prune(dus)
        pf = p_prune(dus)
        ch = ch_prune(dus)
        row.dus_size = len(dus)
        row.cdus_size = len(cdus)
        row.pf_size = len(pf)
        row.ch_size = len(ch)
        row.sets = {"dus": dus, "cdus": cdus, "pf": pf, "ch": ch}
    except Exception as exc:  # record and keep the matrix going
        row.status = f"error: {type(exc).__name__}: {exc}"
    return row


def _run_cell_args(args) -> ExperimentRow:
    return run_cell(*args)


def run_experiment(
    matrix: list[tuple[GeneratorConfig, LearnerConfig, list[int]]],
    jobs: int = 1,
) -> list[ExperimentRow]:
    """Run every (config, seed) cell; rows come back in matrix order."""
    cells = [
        (gc, lc, seed) for gc, lc, seeds in matrix for seed in seeds
    ]
    if jobs > 1 and len(cells) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            return list(pool.map(_run_cell_args, cells))
    return [run_cell(*cell) for cell in cells]


def _aggregate(values: list[float]) -> tuple[float, float, float, float]:
    arr = np.asarray(values, dtype=np.float64)
    sd = float(arr.std(ddof=1)) if arr.size > 1 else 0.0
    return float(arr.mean()), sd, float(arr.min()), float(arr.max())


def summary_rows(rows: list[ExperimentRow]) -> list[list[str]]:
    """Per-config mean/sd/min/max of set sizes and taxonomy percentages."""
    out = [["config", "metric", "mean", "sd", "min", "max"]]
    configs = []
    for row in rows:
        if row.config not in configs:
            configs.append(row.config)
    for config in configs:
        ok = [r for r in rows if r.config == config and r.status == "ok"]
        if not ok:
            continue
        metrics = {
            "dus_size": [float(r.dus_size) for r in ok],
            "cdus_pct": [r.pct(r.cdus_size) for r in ok],
            "pf_pct": [r.pct(r.pf_size) for r in ok],
            "ch_pct": [r.pct(r.ch_size) for r in ok],
        }
        for name, values in metrics.items():
            mean, sd, lo, hi = _aggregate(values)
            out.append(
                [config, name, f"{mean:.2f}", f"{sd:.2f}", f"{lo:.2f}", f"{hi:.2f}"]
            )
    return out


def timing_summary_rows(rows: list[ExperimentRow]) -> list[list[str]]:
    out = [["config", "metric", "mean", "sd", "min", "max"]]
    configs = []
    for row in rows:
        if row.config not in configs:
            configs.append(row.config)
    for config in configs:
        ok = [r for r in rows if r.config == config and r.status == "ok"]
        if not ok:
            continue
        for name, values in (
            ("estimation_seconds", [r.estimation_seconds for r in ok]),
            ("training_seconds", [r.training_seconds for r in ok]),
        ):
            mean, sd, lo, hi = _aggregate(values)
            out.append(
                [config, name, f"{mean:.3f}", f"{sd:.3f}", f"{lo:.3f}", f"{hi:.3f}"]
            )
    return out


def report_csv(rows: list[ExperimentRow]) -> str:
    lines = [",".join(REPORT_COLUMNS)]
    lines += [",".join(row.report_values()) for row in rows]
    return "\n".join(lines) + "\n"


def timings_csv(rows: list[ExperimentRow]) -> str:
    lines = [",".join(TIMING_COLUMNS)]
    lines += [",".join(row.timing_values()) for row in rows]
    return "\n".join(lines) + "\n"


def summary_csv(rows: list[ExperimentRow]) -> str:
    return "\n".join(",".join(r) for r in summary_rows(rows)) + "\n"


def timing_summary_csv(rows: list[ExperimentRow]) -> str:
    return "\n".join(",".join(r) for r in timing_summary_rows(rows)) + "\n"


# -- utility-based evaluation ------------------------------------------------------

def evaluate_utilities(
    sset: SolutionSet, utilities: list[UtilityFunction]
) -> list[dict]:
    """Rank every entry under each utility.

    Each result carries the full descending ranking, the best policy
    overall, and the best policy among the Pareto-front subset; comparing
    the two exposes cases where a Pareto-dominated policy wins on expected
    utility.
    """
    if len(sset) == 0:
        raise ValueError("cannot evaluate an empty solution set")
    pf_ids = set(p_prune(sset).ids())
    results = []
    for u in utilities:
        scored = [
            (pid, dist.expected_utility(u)) for pid, dist in sset
        ]
        scored.sort(key=lambda t: (-t[1], t[0]))
        best_id, best_value = scored[0]
        ties = [pid for pid, v in scored if abs(v - best_value) <= 1e-12]
        pf_scored = [(pid, v) for pid, v in scored if pid in pf_ids]
        best_pf_id, best_pf_value = pf_scored[0]
        results.append(
            {
                "utility": u.kind,
                "description": u.description,
                "ranking": scored,
                "best_id": best_id,
                "best_value": best_value,
                "tied_best_ids": ties,
                "best_pf_id": best_pf_id,
                "best_pf_value": best_pf_value,
            }
        )
    return results
