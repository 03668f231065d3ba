"""Command-line driver.

Subcommands: generate, learn, prune, evaluate, experiment, oracle-dus.
Exit codes: 0 success, 2 invalid input, 3 oracle cap exceeded, 4 internal
solver failure. The DISTMO_OUT environment variable overrides the default
output directory.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from .distributions import (
    UtilityFunction,
    leontief_utility,
    linear_utility,
    product_utility,
    smooth_log_product_utility,
)
from .harness import (
    evaluate_utilities,
    report_csv,
    run_experiment,
    summary_csv,
    timing_summary_csv,
    timings_csv,
)
from .momdp import PRESET_CONFIGS, GeneratorConfig, generate
from .oracle import OracleCapError, exhaustive_dus
from .pruning import SolutionSet, cd_prune, ch_prune, d_prune, p_prune
from .qlearn import Learner, LearnerConfig


def _out_dir(args) -> Path:
    out = args.out or os.environ.get("DISTMO_OUT") or "."
    path = Path(out)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _write(path: Path, text: str):
    path.write_text(text)
    print(path)


def _load_solution_set(path: str) -> SolutionSet:
    return SolutionSet.from_json(Path(path).read_text())


def _set_csv(sset: SolutionSet) -> str:
    dim = sset.dim
    header = ["id"] + [f"ev_{k}" for k in range(dim)] + ["num_atoms"]
    lines = [",".join(header)]
    for pid, dist in sset:
        ev = dist.expected_value()
        lines.append(
            ",".join([pid] + [f"{v:.6f}" for v in ev] + [str(len(dist))])
        )
    return "\n".join(lines) + "\n"


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default=None, help="output directory")
    parser.add_argument("--format", choices=["json", "csv"], default="json")


def _generator_config(args) -> GeneratorConfig:
    if args.config_json:
        data = json.loads(Path(args.config_json).read_text())
        for key in ("next_state_count_range", "reward_value_range", "reward_atom_range"):
            if key in data:
                data[key] = tuple(data[key])
        data.setdefault("seed", args.seed)
        return GeneratorConfig(**data)
    if args.config:
        return PRESET_CONFIGS[args.config](seed=args.seed)
    if args.states is None or args.actions is None or args.horizon is None:
        raise ValueError(
            "one of --config, --config-json, or --states/--actions/--horizon required"
        )
    return GeneratorConfig(
        num_states=args.states,
        num_actions=args.actions,
        next_state_count_range=tuple(args.next_states),
        horizon=args.horizon,
        set_limit=args.set_limit,
        num_objectives=args.objectives,
        reward_value_range=tuple(args.reward_range),
        reward_atom_range=tuple(args.reward_atoms),
        seed=args.seed,
        name="custom",
    )


def parse_utility(spec: str) -> UtilityFunction:
    if spec == "product":
        return product_utility()
    if spec == "leontief":
        return leontief_utility()
    if spec == "smooth-log-product":
        return smooth_log_product_utility()
    if spec.startswith("linear:"):
        weights = [float(x) for x in spec.split(":")[1:]]
        return linear_utility(np.asarray(weights))
    raise ValueError(
        f"unknown utility {spec!r}; use product, leontief, smooth-log-product, "
        "or linear:w1:w2[:...]"
    )


def cmd_generate(args) -> int:
    config = _generator_config(args)
    momdp = generate(config)
    out = _out_dir(args)
    _write(out / "momdp.json", momdp.to_json())
    return 0


def _learner_config(args) -> LearnerConfig:
    weights = None
    if args.weights:
        weights = tuple(float(x) for x in args.weights.split(","))
    return LearnerConfig(
        episodes=args.episodes,
        random_walks=args.walks,
        set_limit=None if args.set_limit == 0 else args.set_limit,
        precision=args.precision,
        epsilon_start=args.epsilon_start,
        epsilon_end=args.epsilon_end,
        epsilon_decay_fraction=args.epsilon_decay,
        scoring_weights=weights,
        seed=args.seed,
        exact_kernel=args.exact_kernel,
        time_indexed=not args.state_keyed_q,
        cluster_representative=args.cluster_representative,
    )


def cmd_learn(args) -> int:
    from .momdp import MOMDP

    momdp = MOMDP.from_json(Path(args.momdp).read_text())
    if args.resume:
        learner = Learner.load_checkpoint(momdp, args.resume)
    else:
        learner = Learner(momdp, _learner_config(args))
    dus = learner.train()
    out = _out_dir(args)
    _write(out / "dus.json", dus.to_json())
    if args.format == "csv":
        _write(out / "dus.csv", _set_csv(dus))
    if args.checkpoint:
        learner.save_checkpoint(args.checkpoint)
        print(args.checkpoint)
    return 0


def cmd_prune(args) -> int:
    sset = _load_solution_set(args.set)
    if args.to == "pf":
        pruned = p_prune(sset)
    elif args.to == "ch":
        pruned = ch_prune(sset)
    elif args.to == "dus":
        pruned = d_prune(sset)
    else:
        mode = "marginal" if args.marginal_only else "joint"
        pruned = cd_prune(sset, mode=mode)
    out = _out_dir(args)
    _write(out / f"{args.to}.json", pruned.to_json())
    if args.format == "csv":
        _write(out / f"{args.to}.csv", _set_csv(pruned))
    return 0


def cmd_evaluate(args) -> int:
    sset = _load_solution_set(args.set)
    utilities = [parse_utility(u) for u in args.utilities.split(",")]
    results = evaluate_utilities(sset, utilities)
    out = _out_dir(args)
    if args.format == "csv":
        lines = ["utility,rank,id,value,is_best,in_pf"]
        pf_ids = {r["best_pf_id"] for r in results}
        for res in results:
            for rank, (pid, value) in enumerate(res["ranking"], start=1):
                lines.append(
                    f"{res['utility']},{rank},{pid},{value:.6f},"
                    f"{int(pid == res['best_id'])},{int(pid == res['best_pf_id'])}"
                )
        _write(out / "evaluation.csv", "\n".join(lines) + "\n")
    else:
        _write(out / "evaluation.json", json.dumps(results, indent=2))
    for res in results:
        print(
            f"{res['utility']}: best={res['best_id']} ({res['best_value']:.4f}), "
            f"best on Pareto front={res['best_pf_id']} ({res['best_pf_value']:.4f})"
        )
    return 0


def cmd_experiment(args) -> int:
    lc = LearnerConfig(
        episodes=args.episodes,
        random_walks=args.walks,
        set_limit=1,  # replaced per config below
        precision=args.precision,
    )
    matrix = []
    for name in args.config:
        gc = PRESET_CONFIGS[name](seed=0)
        matrix.append((gc, replace(lc, set_limit=gc.set_limit), list(args.seeds)))
    rows = run_experiment(matrix, jobs=args.jobs)
    out = _out_dir(args)
    _write(out / "report.csv", report_csv(rows))
    _write(out / "summary.csv", summary_csv(rows))
    _write(out / "timings.csv", timings_csv(rows))
    _write(out / "timing_summary.csv", timing_summary_csv(rows))
    if args.save_sets:
        for row in rows:
            for kind, sset in row.sets.items():
                _write(
                    out / f"{row.config}_seed{row.seed}_{kind}.json", sset.to_json()
                )
    failures = [r for r in rows if r.status != "ok"]
    for row in failures:
        print(f"{row.config} seed {row.seed}: {row.status}", file=sys.stderr)
    return 0


def cmd_oracle_dus(args) -> int:
    from .momdp import MOMDP

    momdp = MOMDP.from_json(Path(args.momdp).read_text())
    dus = exhaustive_dus(momdp, cap=args.cap)
    out = _out_dir(args)
    _write(out / "oracle_dus.json", dus.to_json())
    if args.format == "csv":
        _write(out / "oracle_dus.csv", _set_csv(dus))
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="distmo",
        description="Distributional multi-objective decision making toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate a random MOMDP")
    p.add_argument("--config", choices=sorted(PRESET_CONFIGS), default=None)
    p.add_argument("--config-json", default=None, help="generator config as a JSON file")
    p.add_argument("--states", type=int, default=None)
    p.add_argument("--actions", type=int, default=None)
    p.add_argument("--objectives", type=int, default=2)
    p.add_argument("--next-states", type=int, nargs=2, default=[1, 2], metavar=("LO", "HI"))
    p.add_argument("--horizon", type=int, default=None)
    p.add_argument("--set-limit", type=int, default=10)
    p.add_argument("--reward-range", type=int, nargs=2, default=[0, 9], metavar=("LO", "HI"))
    p.add_argument("--reward-atoms", type=int, nargs=2, default=[1, 1], metavar=("LO", "HI"))
    _add_common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("learn", help="learn the distributional undominated set")
    p.add_argument("--momdp", required=True)
    p.add_argument("--episodes", type=int, default=2000)
    p.add_argument("--walks", type=int, default=50_000)
    p.add_argument("--set-limit", type=int, default=10, help="0 means unlimited")
    p.add_argument("--precision", type=int, default=3)
    p.add_argument("--epsilon-start", type=float, default=1.0)
    p.add_argument("--epsilon-end", type=float, default=0.05)
    p.add_argument("--epsilon-decay", type=float, default=0.8)
    p.add_argument("--weights", default=None, help="comma-separated scoring weights")
    p.add_argument(
        "--cluster-representative", choices=["mixture", "medoid"], default="mixture"
    )
    p.add_argument("--exact-kernel", action="store_true")
    p.add_argument(
        "--time-indexed-states",
        action="store_true",
        default=True,
        help="key Q-sets by (state, timestep); the default, kept for clarity",
    )
    p.add_argument(
        "--state-keyed-q",
        action="store_true",
        help="key Q-sets by state alone; values can grow without bound on "
        "cyclic models under discount 1",
    )
    p.add_argument("--checkpoint", default=None, help="write a checkpoint here")
    p.add_argument("--resume", default=None, help="resume from a checkpoint")
    _add_common(p)
    p.set_defaults(func=cmd_learn)

    p = sub.add_parser("prune", help="prune a solution set")
    p.add_argument("--set", required=True)
    p.add_argument("--to", choices=["pf", "ch", "dus", "cdus"], required=True)
    p.add_argument("--marginal-only", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("evaluate", help="rank policies under utility functions")
    p.add_argument("--set", required=True)
    p.add_argument(
        "--utilities",
        default="product,leontief",
        help="comma-separated: product, leontief, smooth-log-product, linear:w1:w2",
    )
    _add_common(p)
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("experiment", help="run a seeded experiment matrix")
    p.add_argument("--config", nargs="+", choices=sorted(PRESET_CONFIGS), required=True)
    p.add_argument("--seeds", type=int, nargs="+", default=[1, 2, 3, 4, 5])
    p.add_argument("--episodes", type=int, default=2000)
    p.add_argument("--walks", type=int, default=50_000)
    p.add_argument("--precision", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--save-sets", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("oracle-dus", help="exhaustive-enumeration reference DUS")
    p.add_argument("--momdp", required=True)
    p.add_argument("--cap", type=int, default=10_000)
    _add_common(p)
    p.set_defaults(func=cmd_oracle_dus)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except OracleCapError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except (ValueError, FileNotFoundError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except ArithmeticError as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
