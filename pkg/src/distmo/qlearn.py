"""Set-valued distributional Q-learning of the distributional undominated set.

The learner maintains, per state-action pair, a set of nondominated return
distributions. Each observed transition refreshes the successor's
nondominated cache and the empirical reward, then rebuilds the Q-set as a
kernel-weighted mixture over all successor candidates (a full set-valued
Bellman backup; there is no learning rate). Oversized sets are compressed
by average-linkage clustering on Jensen-Shannon distances.
"""

from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, asdict

import numpy as np

from .distributions import ReturnDistribution, convolve, mix, round_to_precision
from .momdp import (
    MOMDP,
    TransitionEstimate,
    estimate_transitions,
    lift_estimate_to_time_indexed,
    time_indexed_view,
)
from .pruning import SolutionSet, d_prune_dists


@dataclass(frozen=True)
class LearnerConfig:
    episodes: int
    random_walks: int = 50_000
    set_limit: int | None = 10  # None: unlimited
    precision: int = 3
    epsilon_start: float = 1.0
    epsilon_end: float = 0.05
    epsilon_decay_fraction: float = 0.8
    scoring_weights: tuple | None = None  # None: uniform over objectives
    seed: int = 0
    exact_kernel: bool = False  # bypass estimation, use the true kernel
    cluster_representative: str = "mixture"  # or "medoid"
    # Key Q-sets by (state, timestep) instead of by state alone. Under a
    # discount of 1 with a horizon cutoff, state-keyed sets bootstrap across
    # episode generations and their values and supports grow without bound
    # on cyclic models, so the time-indexed view is the default; disable it
    # to reproduce plain state-keyed tables on acyclic problems.
    time_indexed: bool = True

    def __post_init__(self):
        if self.episodes < 1:
            raise ValueError("episodes must be at least 1")
        if self.set_limit is not None and self.set_limit < 1:
            raise ValueError("set_limit must be at least 1")
        if not 0.0 <= self.epsilon_start <= 1.0 or not 0.0 <= self.epsilon_end <= 1.0:
            raise ValueError("epsilon values must lie in [0, 1]")
        if not 0.0 < self.epsilon_decay_fraction <= 1.0:
            raise ValueError("epsilon_decay_fraction must lie in (0, 1]")
        if self.cluster_representative not in ("mixture", "medoid"):
            raise ValueError("cluster_representative must be 'mixture' or 'medoid'")
        if self.scoring_weights is not None:
            w = np.asarray(self.scoring_weights, dtype=np.float64)
            if np.any(w < 0) or abs(float(w.sum()) - 1.0) > 1e-9:
                raise ValueError("scoring weights must lie on the simplex")

    def weights_for(self, dim: int) -> np.ndarray:
        if self.scoring_weights is None:
            return np.full(dim, 1.0 / dim)
        w = np.asarray(self.scoring_weights, dtype=np.float64)
        if w.shape[0] != dim:
            raise ValueError(f"scoring weights have length {w.shape[0]}, expected {dim}")
        return w


class EmpiricalReward:
    """Histogram of observed reward vectors for one (s, a, s') transition.

    Before any observation the derived distribution is a point mass at the
    zero vector.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.counts: dict[tuple, int] = {}
        self.total = 0
        self._cached: ReturnDistribution | None = None

    def observe(self, vector) -> bool:
        """Record one draw; returns True when the derived distribution changed."""
        key = tuple(float(x) for x in np.asarray(vector, dtype=np.float64))
        singleton_repeat = self.total > 0 and len(self.counts) == 1 and key in self.counts
        zero_first = self.total == 0 and all(x == 0.0 for x in key)
        self.counts[key] = self.counts.get(key, 0) + 1
        self.total += 1
        if singleton_repeat or zero_first:
            return False
        self._cached = None
        return True

    def distribution(self) -> ReturnDistribution:
        if self._cached is None:
            if self.total == 0:
                self._cached = ReturnDistribution.dirac(np.zeros(self.dim))
            else:
                atoms = np.array(list(self.counts.keys()), dtype=np.float64)
                probs = np.array(list(self.counts.values()), dtype=np.float64)
                self._cached = ReturnDistribution(atoms, probs / self.total)
        return self._cached

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "observations": [[list(k), c] for k, c in self.counts.items()],
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "EmpiricalReward":
        er = cls(int(data["dim"]))
        for key, count in data["observations"]:
            er.counts[tuple(float(x) for x in key)] = int(count)
            er.total += int(count)
        return er


class QSetTable:
    """Per (s, a) nondominated Q-sets plus the per-transition caches the
    backup reads: nondominated successor sets and empirical rewards."""

    def __init__(self, num_states: int, num_actions: int, num_objectives: int):
        self.num_states = num_states
        self.num_actions = num_actions
        self.num_objectives = num_objectives
        self.q: dict[tuple, list[ReturnDistribution]] = {}
        self.nd: dict[tuple, list[ReturnDistribution]] = {}
        self.rewards: dict[tuple, EmpiricalReward] = {}

    def qset(self, s: int, a: int) -> list[ReturnDistribution]:
        return self.q.get((s, a), [])

    def union_q(self, s: int) -> list[ReturnDistribution]:
        combined: list[ReturnDistribution] = []
        for a in range(self.num_actions):
            combined.extend(self.qset(s, a))
        return _dedupe(combined)

    def nd_set(self, s: int, a: int, ns: int) -> list[ReturnDistribution]:
        return self.nd.get((s, a, ns), [])

    def reward(self, s: int, a: int, ns: int) -> EmpiricalReward:
        key = (s, a, ns)
        if key not in self.rewards:
            self.rewards[key] = EmpiricalReward(self.num_objectives)
        return self.rewards[key]


def _key(dist: ReturnDistribution) -> bytes:
    return dist.atoms.tobytes() + np.round(dist.probs, 12).tobytes()


def _dedupe(dists) -> list[ReturnDistribution]:
    seen = set()
    out = []
    for d in dists:
        k = _key(d)
        if k not in seen:
            seen.add(k)
            out.append(d)
    return out


def score_set(qset, weights) -> float:
    """Mean linear utility of the set's expected values; empty sets score
    -inf so they are never preferred over nonempty ones."""
    if len(qset) == 0:
        return float("-inf")
    w = np.asarray(weights, dtype=np.float64)
    return float(np.mean([np.dot(w, d.expected_value()) for d in qset]))


def select_action(
    state: int,
    qtable: QSetTable,
    epsilon: float,
    weights,
    rng: np.random.Generator,
) -> int:
    """Epsilon-greedy over set scores; ties go to the lowest action index."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError("epsilon must lie in [0, 1]")
    if epsilon > 0 and rng.random() < epsilon:
        return int(rng.integers(qtable.num_actions))
    scores = [
        score_set(qtable.qset(state, a), weights) for a in range(qtable.num_actions)
    ]
    return int(np.argmax(scores))  # argmax returns the first maximum


def _pairwise_js_matrix(dists) -> np.ndarray:
    n = len(dists)
    all_atoms = np.concatenate([d.atoms for d in dists], axis=0)
    uniq, inverse = np.unique(all_atoms, axis=0, return_inverse=True)
    inverse = inverse.ravel()
    flat = np.zeros((n, uniq.shape[0]))
    offset = 0
    for i, d in enumerate(dists):
        np.add.at(flat[i], inverse[offset: offset + len(d)], d.probs)
        offset += len(d)

    def entropy_rows(p):
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(p > 0, p * np.log2(np.where(p > 0, p, 1.0)), 0.0)
        return -terms.sum(axis=-1)

    h = entropy_rows(flat)
    dist = np.zeros((n, n))
    for i in range(n):
        m = 0.5 * (flat[i][None, :] + flat)
        jsd = entropy_rows(m) - 0.5 * (h[i] + h)
        dist[i] = np.sqrt(np.clip(jsd, 0.0, 1.0))
    np.fill_diagonal(dist, 0.0)
    return dist


def _average_linkage_clusters(dmat: np.ndarray, k: int) -> list[list[int]]:
    """Merge until ``k`` clusters remain; ties pick the lexicographically
    first pair, so the result is deterministic."""
    n = dmat.shape[0]
    clusters: dict[int, list[int]] = {i: [i] for i in range(n)}
    sizes = np.ones(n)
    work = dmat.astype(np.float64).copy()
    inactive = np.tril(np.ones((n, n), dtype=bool))
    work[inactive] = np.inf

    while len(clusters) > k:
        flat_idx = int(np.argmin(work))
        i, j = divmod(flat_idx, n)
        # Lance-Williams update for average linkage: merge j into i.
        for other in clusters:
            if other in (i, j):
                continue
            lo_i, hi_i = min(i, other), max(i, other)
            lo_j, hi_j = min(j, other), max(j, other)
            merged = (
                sizes[i] * work[lo_i, hi_i] + sizes[j] * work[lo_j, hi_j]
            ) / (sizes[i] + sizes[j])
            work[lo_i, hi_i] = merged
        clusters[i] = clusters[i] + clusters[j]
        sizes[i] += sizes[j]
        del clusters[j]
        work[j, :] = np.inf
        work[:, j] = np.inf
    return [clusters[anchor] for anchor in sorted(clusters)]


def limit_set_size(
    qset,
    max_size: int | None,
    representative: str = "mixture",
) -> list[ReturnDistribution]:
    """Compress a set to at most ``max_size`` distributions.

    When over the limit, clusters the set by average-linkage agglomerative
    clustering on pairwise Jensen-Shannon distances and replaces each
    cluster by the uniform mixture of its members (or the medoid), then
    drops any representative the others distributionally dominate.
    """
    qset = list(qset)
    if max_size is None or len(qset) <= max_size:
        return qset
    dmat = _pairwise_js_matrix(qset)
    groups = _average_linkage_clusters(dmat, max_size)
    reps = []
    for members in groups:
        if len(members) == 1:
            reps.append(qset[members[0]])
        elif representative == "mixture":
            parts = [qset[m] for m in members]
            reps.append(mix(parts, np.full(len(parts), 1.0 / len(parts))))
        else:
            totals = dmat[np.ix_(members, members)].sum(axis=1)
            reps.append(qset[members[int(np.argmin(totals))]])
    return d_prune_dists(reps)


def q_backup(
    s: int,
    a: int,
    tables: QSetTable,
    kernel: TransitionEstimate,
    gamma: float,
    precision: int = 3,
) -> list[ReturnDistribution]:
    """Set-valued Bellman backup for one state-action pair.

    Builds, for each kernel successor, the candidate returns "immediate
    reward plus discounted future return" (just the immediate reward when
    no future set is known yet), then forms the kernel-weighted mixture for
    every combination of per-successor picks. The result is
    precision-rounded and pruned to its nondominated subset.
    """
    succ = kernel.successors(s, a)
    if not succ:
        raise ValueError(f"kernel has no successors for state {s}, action {a}")
    branches = []
    weights = []
    for ns, p in succ:
        weights.append(p)
        reward_dist = tables.reward(s, a, ns).distribution()
        nd = tables.nd_set(s, a, ns)
        if nd:
            branches.append(
                [convolve(reward_dist, z, gamma, decimals=precision) for z in nd]
            )
        else:
            branches.append([reward_dist])
    weights = np.asarray(weights)

    candidates = []
    for combo in itertools.product(*branches):
        combined = combo[0] if len(combo) == 1 else mix(combo, weights)
        candidates.append(round_to_precision(combined, precision))
    return d_prune_dists(_dedupe(candidates))


class Learner:
    """Episodic trainer that converges on the distributional undominated
    set of returns achievable from state 0."""

    def __init__(self, momdp: MOMDP, config: LearnerConfig):
        self.base_momdp = momdp
        self.config = config
        self.momdp = time_indexed_view(momdp) if config.time_indexed else momdp
        self.tables = QSetTable(
            self.momdp.num_states, self.momdp.num_actions, self.momdp.num_objectives
        )
        self.kernel: TransitionEstimate | None = None
        self.episode = 0
        self.weights = config.weights_for(momdp.num_objectives)
        seq = np.random.SeedSequence(config.seed)
        est_seq, env_seq, explore_seq = seq.spawn(3)
        self._est_seq = est_seq
        self.env = self.momdp.episode_env(env_seq)
        self.explore_rng = np.random.Generator(np.random.PCG64(explore_seq))
        self._computed: set[tuple] = set()
        self.stats: dict[str, float] = {}

    # -- schedule --------------------------------------------------------------

    def epsilon_at(self, episode: int) -> float:
        cfg = self.config
        decay_len = max(1, round(cfg.epsilon_decay_fraction * cfg.episodes))
        if episode >= decay_len:
            return cfg.epsilon_end
        frac = episode / decay_len
        return cfg.epsilon_start + (cfg.epsilon_end - cfg.epsilon_start) * frac

    # -- training --------------------------------------------------------------

    def _ensure_kernel(self):
        if self.kernel is not None:
            return
        start = time.perf_counter()
        if self.config.exact_kernel:
            self.kernel = TransitionEstimate.exact_from(self.momdp)
        else:
            # Walks probe the base model (the true kernel is timestep-free),
            # then the estimate is re-keyed onto the learner's view.
            est = estimate_transitions(
                self.base_momdp, self.config.random_walks, self._est_seq
            )
            if self.config.time_indexed:
                est = lift_estimate_to_time_indexed(est, self.base_momdp)
            self.kernel = est
        self.stats["estimation_seconds"] = time.perf_counter() - start

    def _refresh_nd(self, s: int, a: int, ns: int) -> bool:
        new = d_prune_dists(self.tables.union_q(ns))
        old = self.tables.nd_set(s, a, ns)
        changed = [_key(d) for d in new] != [_key(d) for d in old]
        if changed:
            self.tables.nd[(s, a, ns)] = new
        return changed

    def _update_q(self, s: int, a: int):
        backed = q_backup(
            s, a, self.tables, self.kernel, self.momdp.gamma, self.config.precision
        )
        limited = limit_set_size(
            backed, self.config.set_limit, self.config.cluster_representative
        )
        self.tables.q[(s, a)] = limited
        self._computed.add((s, a))

    def train(self, until_episode: int | None = None) -> SolutionSet:
        """Run the remaining episodes and return the pruned solution set.

        ``until_episode`` pauses after that many total episodes without
        touching the epsilon schedule, for checkpoint-and-resume flows.
        """
        self._ensure_kernel()
        start = time.perf_counter()
        cfg = self.config
        stop = cfg.episodes if until_episode is None else min(until_episode, cfg.episodes)
        while self.episode < stop:
            eps = self.epsilon_at(self.episode)
            s = self.env.reset()
            done = False
            while not done:
                a = select_action(s, self.tables, eps, self.weights, self.explore_rng)
                ns, reward, done = self.env.step(a)
                # An episode-terminating transition has zero continuation
                # value, so it must not refresh the successor cache: under
                # gamma=1 a terminal self-loop would otherwise grow the
                # Q-sets without bound.
                nd_changed = False if done else self._refresh_nd(s, a, ns)
                r_changed = self.tables.reward(s, a, ns).observe(reward)
                # The backup is a pure function of the nd/reward caches for
                # (s, a); recompute only when this step's updates changed them.
                if nd_changed or r_changed or (s, a) not in self._computed:
                    self._update_q(s, a)
                s = ns
            self.episode += 1
        self.stats["training_seconds"] = (
            self.stats.get("training_seconds", 0.0) + time.perf_counter() - start
        )
        final = d_prune_dists(self.tables.union_q(0))
        return SolutionSet(
            [(f"policy-{i:03d}", d) for i, d in enumerate(final)]
        )

    # -- checkpointing -----------------------------------------------------------

    def to_checkpoint_dict(self) -> dict:
        if self.kernel is None:
            raise ValueError("nothing to checkpoint before the kernel exists")
        return {
            "config": asdict(self.config),
            "episode": self.episode,
            "stats": self.stats,
            "kernel": self.kernel.to_json_dict(),
            "q": [
                [list(map(int, key)), [d.to_json_dict() for d in dists]]
                for key, dists in sorted(self.tables.q.items())
            ],
            "nd": [
                [list(map(int, key)), [d.to_json_dict() for d in dists]]
                for key, dists in sorted(self.tables.nd.items())
            ],
            "rewards": [
                [list(map(int, key)), er.to_json_dict()]
                for key, er in sorted(self.tables.rewards.items())
            ],
            "env_rng": self.env.rng.bit_generator.state,
            "explore_rng": self.explore_rng.bit_generator.state,
        }

    def save_checkpoint(self, path):
        with open(path, "w") as fh:
            json.dump(self.to_checkpoint_dict(), fh)

    @classmethod
    def from_checkpoint_dict(cls, momdp: MOMDP, data: dict) -> "Learner":
        config = LearnerConfig(**{
            k: (tuple(v) if isinstance(v, list) else v)
            for k, v in data["config"].items()
        })
        learner = cls(momdp, config)
        learner.kernel = TransitionEstimate.from_json_dict(data["kernel"])
        learner.episode = int(data["episode"])
        learner.stats = dict(data["stats"])
        for key, dists in data["q"]:
            learner.tables.q[tuple(key)] = [
                ReturnDistribution.from_json_dict(d) for d in dists
            ]
            learner._computed.add(tuple(key))
        for key, dists in data["nd"]:
            learner.tables.nd[tuple(key)] = [
                ReturnDistribution.from_json_dict(d) for d in dists
            ]
        for key, er in data["rewards"]:
            learner.tables.rewards[tuple(key)] = EmpiricalReward.from_json_dict(er)
        learner.env.rng.bit_generator.state = data["env_rng"]
        learner.explore_rng.bit_generator.state = data["explore_rng"]
        return learner

    @classmethod
    def load_checkpoint(cls, momdp: MOMDP, path) -> "Learner":
        with open(path) as fh:
            return cls.from_checkpoint_dict(momdp, json.load(fh))


def train(momdp: MOMDP, config: LearnerConfig) -> SolutionSet:
    """One-call training entry point."""
    return Learner(momdp, config).train()
