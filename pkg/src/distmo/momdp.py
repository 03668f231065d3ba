"""Tabular multi-objective MDPs: random generation, episodes, and
transition-kernel estimation from random walks.

All randomness flows through numpy's PCG64 generator seeded with explicit
64-bit integers, so every artifact is reproducible byte for byte.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass

import numpy as np

from .distributions import ReturnDistribution

logger = logging.getLogger(__name__)

KERNEL_TOL = 1e-9


@dataclass(frozen=True)
class GeneratorConfig:
    """Knobs for the random MOMDP generator.

    ``next_state_count_range`` and ``reward_value_range`` are inclusive
    integer ranges. ``reward_atom_range`` widens rewards from deterministic
    vectors (the default) to small categorical distributions.
    """

    num_states: int
    num_actions: int
    next_state_count_range: tuple[int, int]
    horizon: int
    set_limit: int
    num_objectives: int = 2
    reward_value_range: tuple[int, int] = (0, 9)
    reward_atom_range: tuple[int, int] = (1, 1)
    seed: int = 0
    name: str = "custom"

    def __post_init__(self):
        for label, count in (
            ("num_states", self.num_states),
            ("num_actions", self.num_actions),
            ("horizon", self.horizon),
            ("set_limit", self.set_limit),
            ("num_objectives", self.num_objectives),
        ):
            if count < 1:
                raise ValueError(f"{label} must be positive, got {count}")
        for label, rng in (
            ("next_state_count_range", self.next_state_count_range),
            ("reward_value_range", self.reward_value_range),
            ("reward_atom_range", self.reward_atom_range),
        ):
            if rng[0] > rng[1]:
                raise ValueError(f"{label} lower bound exceeds upper bound")
        if self.next_state_count_range[0] < 1 or self.reward_atom_range[0] < 1:
            raise ValueError("counts must be at least 1")


def small_config(seed: int = 0) -> GeneratorConfig:
    return GeneratorConfig(5, 2, (1, 2), horizon=3, set_limit=10, seed=seed, name="small")


def medium_config(seed: int = 0) -> GeneratorConfig:
    return GeneratorConfig(10, 3, (1, 2), horizon=5, set_limit=15, seed=seed, name="medium")


def large_config(seed: int = 0) -> GeneratorConfig:
    return GeneratorConfig(15, 4, (1, 2), horizon=7, set_limit=20, seed=seed, name="large")


PRESET_CONFIGS = {"small": small_config, "medium": medium_config, "large": large_config}


@dataclass(frozen=True)
class MOMDP:
    """Tabular MOMDP with an episode horizon and initial state 0.

    ``transitions[s][a]`` lists (next_state, probability) pairs;
    ``rewards[(s, a, s')]`` is the reward distribution of that transition.
    """

    num_states: int
    num_actions: int
    num_objectives: int
    transitions: tuple
    rewards: dict
    gamma: float
    horizon: int

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValueError("discount must lie in [0, 1]")
        if self.horizon < 1:
            raise ValueError("horizon must be positive")
        for s in range(self.num_states):
            for a in range(self.num_actions):
                succ = self.transitions[s][a]
                total = sum(p for _, p in succ)
                if abs(total - 1.0) > KERNEL_TOL:
                    raise ValueError(f"T({s},{a}) sums to {total!r}")
                states = [ns for ns, _ in succ]
                if len(set(states)) != len(states):
                    raise ValueError(f"T({s},{a}) lists a successor twice")
                for ns, p in succ:
                    if not 0 <= ns < self.num_states:
                        raise ValueError(f"invalid successor {ns}")
                    if p <= 0:
                        raise ValueError("transition probabilities must be positive")
                    r = self.rewards[(s, a, ns)]
                    if r.dim != self.num_objectives:
                        raise ValueError(
                            f"reward R({s},{a},{ns}) has dim {r.dim}, expected {self.num_objectives}"
                        )

    def successors(self, s: int, a: int) -> list[tuple[int, float]]:
        return list(self.transitions[s][a])

    def episode_env(self, seed: int) -> "EpisodeEnv":
        return EpisodeEnv(self, seed)

    # -- serialization --------------------------------------------------------

    def to_json_dict(self) -> dict:
        t_rows = []
        r_rows = []
        for s in range(self.num_states):
            for a in range(self.num_actions):
                t_rows.append(
                    {
                        "state": s,
                        "action": a,
                        "next": [
                            {"state": int(ns), "p": float(p)}
                            for ns, p in self.transitions[s][a]
                        ],
                    }
                )
                for ns, _ in self.transitions[s][a]:
                    r_rows.append(
                        {
                            "state": s,
                            "action": a,
                            "next_state": int(ns),
                            "dist": self.rewards[(s, a, ns)].to_json_dict(),
                        }
                    )
        return {
            "num_states": self.num_states,
            "num_actions": self.num_actions,
            "num_objectives": self.num_objectives,
            "gamma": self.gamma,
            "horizon": self.horizon,
            "transitions": t_rows,
            "rewards": r_rows,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "MOMDP":
        ns_, na = int(data["num_states"]), int(data["num_actions"])
        transitions = [[None] * na for _ in range(ns_)]
        for row in data["transitions"]:
            transitions[row["state"]][row["action"]] = tuple(
                (int(e["state"]), float(e["p"])) for e in row["next"]
            )
        rewards = {
            (r["state"], r["action"], r["next_state"]): ReturnDistribution.from_json_dict(
                r["dist"]
            )
            for r in data["rewards"]
        }
        return cls(
            num_states=ns_,
            num_actions=na,
            num_objectives=int(data["num_objectives"]),
            transitions=tuple(tuple(row) for row in transitions),
            rewards=rewards,
            gamma=float(data["gamma"]),
            horizon=int(data["horizon"]),
        )

    @classmethod
    def from_json(cls, text: str) -> "MOMDP":
        return cls.from_json_dict(json.loads(text))


def generate(config: GeneratorConfig) -> MOMDP:
    """Draw a random MOMDP. Deterministic in ``config.seed``.

    Per (s, a): a successor count uniform in ``next_state_count_range``,
    that many distinct successor states, and normalized uniform(0,1]
    probabilities. Per listed (s, a, s'): an integer reward vector uniform
    over ``reward_value_range`` (a point mass unless ``reward_atom_range``
    asks for categorical rewards). Discount is fixed at 1.
    """
    lo, hi = config.next_state_count_range
    if hi > config.num_states:
        raise ValueError(
            f"next_state_count upper bound {hi} exceeds num_states {config.num_states}"
        )
    rng = np.random.Generator(np.random.PCG64(config.seed))
    transitions = []
    rewards = {}
    rlo, rhi = config.reward_value_range
    alo, ahi = config.reward_atom_range
    for s in range(config.num_states):
        row = []
        for a in range(config.num_actions):
            k = int(rng.integers(lo, hi + 1))
            succ = np.sort(rng.choice(config.num_states, size=k, replace=False))
            raw = 1.0 - rng.random(k)  # uniform on (0, 1]
            probs = raw / raw.sum()
            row.append(tuple((int(ns), float(p)) for ns, p in zip(succ, probs)))
            for ns in succ:
                n_atoms = int(rng.integers(alo, ahi + 1))
                vectors = rng.integers(
                    rlo, rhi + 1, size=(n_atoms, config.num_objectives)
                ).astype(float)
                if n_atoms == 1:
                    dist = ReturnDistribution.dirac(vectors[0])
                else:
                    w = 1.0 - rng.random(n_atoms)
                    dist = ReturnDistribution(vectors, w / w.sum())
                rewards[(s, a, int(ns))] = dist
        transitions.append(tuple(row))
    return MOMDP(
        num_states=config.num_states,
        num_actions=config.num_actions,
        num_objectives=config.num_objectives,
        transitions=tuple(transitions),
        rewards=rewards,
        gamma=1.0,
        horizon=config.horizon,
    )


class EpisodeEnv:
    """Seeded episodic view of a MOMDP: reset to state 0, step until the
    horizon is reached."""

    def __init__(self, momdp: MOMDP, seed: int):
        self.momdp = momdp
        self.rng = np.random.Generator(np.random.PCG64(seed))
        self._succ_states = {}
        self._succ_cum = {}
        for s in range(momdp.num_states):
            for a in range(momdp.num_actions):
                pairs = momdp.transitions[s][a]
                self._succ_states[(s, a)] = np.array([ns for ns, _ in pairs])
                self._succ_cum[(s, a)] = np.cumsum([p for _, p in pairs])
        self.state = 0
        self.elapsed = 0
        self.done = False

    def reset(self) -> int:
        self.state = 0
        self.elapsed = 0
        self.done = False
        return self.state

    def step(self, action: int) -> tuple[int, np.ndarray, bool]:
        """Sample (next_state, reward vector, terminal flag)."""
        if self.done:
            raise RuntimeError("episode is terminal; call reset() first")
        if not 0 <= action < self.momdp.num_actions:
            raise ValueError(f"invalid action {action}")
        s, a = self.state, action
        u = self.rng.random()
        idx = int(np.searchsorted(self._succ_cum[(s, a)], u, side="right"))
        idx = min(idx, len(self._succ_states[(s, a)]) - 1)
        ns = int(self._succ_states[(s, a)][idx])
        reward = self.momdp.rewards[(s, a, ns)].sample(self.rng)
        self.elapsed += 1
        self.state = ns
        self.done = self.elapsed >= self.momdp.horizon
        return ns, reward, self.done


@dataclass
class TransitionEstimate:
    """Empirical next-state frequencies per (s, a), frozen after estimation.

    State-action pairs never visited fall back to a uniform distribution
    over all states; their visit count stays zero so the fallback is
    detectable.
    """

    probs: np.ndarray  # (S, A, S)
    counts: np.ndarray  # (S, A) visit counts
    exact: bool = False

    def successors(self, s: int, a: int) -> list[tuple[int, float]]:
        p = self.probs[s, a]
        return [(int(ns), float(p[ns])) for ns in np.nonzero(p > 0)[0]]

    def visited(self, s: int, a: int) -> bool:
        return self.counts[s, a] > 0 or self.exact

    def max_error(self, momdp: MOMDP) -> float:
        """Largest |estimated - true| probability over visited pairs."""
        err = 0.0
        for s in range(momdp.num_states):
            for a in range(momdp.num_actions):
                if not self.visited(s, a):
                    continue
                true = np.zeros(momdp.num_states)
                for ns, p in momdp.transitions[s][a]:
                    true[ns] = p
                err = max(err, float(np.max(np.abs(self.probs[s, a] - true))))
        return err

    def to_json_dict(self) -> dict:
        return {
            "probs": self.probs.tolist(),
            "counts": self.counts.tolist(),
            "exact": self.exact,
        }

    @classmethod
    def from_json_dict(cls, data: dict) -> "TransitionEstimate":
        return cls(
            probs=np.asarray(data["probs"], dtype=np.float64),
            counts=np.asarray(data["counts"], dtype=np.int64),
            exact=bool(data["exact"]),
        )

    @classmethod
    def exact_from(cls, momdp: MOMDP) -> "TransitionEstimate":
        """True kernel wrapped in the estimate interface."""
        probs = np.zeros((momdp.num_states, momdp.num_actions, momdp.num_states))
        for s in range(momdp.num_states):
            for a in range(momdp.num_actions):
                for ns, p in momdp.transitions[s][a]:
                    probs[s, a, ns] = p
        counts = np.zeros((momdp.num_states, momdp.num_actions), dtype=np.int64)
        return cls(probs=probs, counts=counts, exact=True)


def time_indexed_view(momdp: MOMDP) -> MOMDP:
    """Equivalent MOMDP whose states carry the timestep.

    State ``t * S + s`` represents being in ``s`` at step ``t``; layer
    ``horizon`` absorbs with zero reward. Exposes exact finite-horizon
    semantics to learners that key value sets by state only.
    """
    S, A, H = momdp.num_states, momdp.num_actions, momdp.horizon
    zero = ReturnDistribution.dirac(np.zeros(momdp.num_objectives))
    transitions = []
    rewards = {}
    for t in range(H + 1):
        for s in range(S):
            row = []
            for a in range(A):
                if t >= H:
                    ids = t * S + s
                    row.append(((ids, 1.0),))
                    rewards[(ids, a, ids)] = zero
                    continue
                pairs = []
                for ns, p in momdp.transitions[s][a]:
                    target = (t + 1) * S + ns
                    pairs.append((target, p))
                    rewards[(t * S + s, a, target)] = momdp.rewards[(s, a, ns)]
                row.append(tuple(pairs))
            transitions.append(tuple(row))
    return MOMDP(
        num_states=S * (H + 1),
        num_actions=A,
        num_objectives=momdp.num_objectives,
        transitions=tuple(transitions),
        rewards=rewards,
        gamma=momdp.gamma,
        horizon=H,
    )


def lift_estimate_to_time_indexed(
    est: TransitionEstimate, base: MOMDP
) -> TransitionEstimate:
    """Re-key a base-MOMDP kernel estimate onto the time-indexed view.

    The true kernel does not depend on the timestep, so walks are spent on
    the (s, a) pairs of the base model and copied into every layer.
    """
    S, A, H = base.num_states, base.num_actions, base.horizon
    n = S * (H + 1)
    probs = np.zeros((n, A, n))
    counts = np.zeros((n, A), dtype=np.int64)
    for t in range(H):
        for s in range(S):
            for a in range(A):
                row = est.probs[s, a]
                for ns in np.nonzero(row > 0)[0]:
                    probs[t * S + s, a, (t + 1) * S + int(ns)] = row[ns]
                counts[t * S + s, a] = est.counts[s, a]
    for s in range(S):
        idx = H * S + s
        for a in range(A):
            probs[idx, a, idx] = 1.0
    return TransitionEstimate(probs=probs, counts=counts, exact=est.exact)


def estimate_transitions(momdp: MOMDP, num_walks: int, seed: int) -> TransitionEstimate:
    """Estimate the kernel from uniform-random-action episodes started at
    state 0. The estimate is frozen afterward."""
    if num_walks < 1:
        raise ValueError("need at least one walk")
    rng = np.random.Generator(np.random.PCG64(seed))
    S, A = momdp.num_states, momdp.num_actions
    hits = np.zeros((S, A, S), dtype=np.int64)

    succ_states = {}
    succ_cum = {}
    for s in range(S):
        for a in range(A):
            pairs = momdp.transitions[s][a]
            succ_states[(s, a)] = [ns for ns, _ in pairs]
            succ_cum[(s, a)] = np.cumsum([p for _, p in pairs])

    horizon = momdp.horizon
    for _ in range(num_walks):
        s = 0
        for _ in range(horizon):
            a = int(rng.integers(A))
            states = succ_states[(s, a)]
            if len(states) == 1:
                ns = states[0]
            else:
                u = rng.random()
                idx = int(np.searchsorted(succ_cum[(s, a)], u, side="right"))
                ns = states[min(idx, len(states) - 1)]
            hits[s, a, ns] += 1
            s = ns

    counts = hits.sum(axis=2)
    probs = np.zeros((S, A, S))
    visited = counts > 0
    probs[visited] = hits[visited] / counts[visited][:, None]
    n_unvisited = int((~visited).sum())
    if n_unvisited:
        probs[~visited] = 1.0 / S
        logger.warning(
            "%d state-action pairs never visited in %d walks; using uniform fallback",
            n_unvisited,
            num_walks,
        )
    return TransitionEstimate(probs=probs, counts=counts)
