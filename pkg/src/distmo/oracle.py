"""Brute-force computation of the distributional undominated set by
enumerating every deterministic time-indexed policy.

Exponential in the reachable state counts, so guarded by a policy-count
cap; intended as a ground-truth reference for small problems and tests.
"""

from __future__ import annotations

import itertools

import numpy as np

from .distributions import ReturnDistribution
from .momdp import MOMDP
from .pruning import SolutionSet, d_prune


class OracleCapError(RuntimeError):
    """Raised when the policy count exceeds the configured cap."""

    def __init__(self, count: int, cap: int):
        super().__init__(
            f"{count} deterministic time-indexed policies exceed the cap of {cap}"
        )
        self.count = count
        self.cap = cap


def reachable_states_per_step(momdp: MOMDP) -> list[list[int]]:
    """States reachable at each decision step, starting from state 0."""
    layers = [[0]]
    current = {0}
    for _ in range(momdp.horizon - 1):
        nxt = set()
        for s in current:
            for a in range(momdp.num_actions):
                for ns, _ in momdp.transitions[s][a]:
                    nxt.add(ns)
        current = nxt
        layers.append(sorted(nxt))
    return layers


def policy_return_distribution(momdp: MOMDP, policy: dict) -> ReturnDistribution:
    """Exact return distribution of a deterministic time-indexed policy,
    by forward induction over (state, partial return) pairs."""
    d = momdp.num_objectives
    layer = {(0, (0.0,) * d): 1.0}
    scale = 1.0
    for t in range(momdp.horizon):
        nxt: dict = {}
        for (s, ret), pr in layer.items():
            a = policy[(t, s)]
            for ns, tp in momdp.transitions[s][a]:
                rdist = momdp.rewards[(s, a, ns)]
                for vec, rp in zip(rdist.atoms, rdist.probs):
                    nret = tuple(r + scale * v for r, v in zip(ret, vec))
                    key = (ns, nret)
                    nxt[key] = nxt.get(key, 0.0) + pr * tp * rp
        layer = nxt
        scale *= momdp.gamma
    agg: dict = {}
    for (_, ret), pr in layer.items():
        agg[ret] = agg.get(ret, 0.0) + pr
    return ReturnDistribution(
        np.array(list(agg.keys()), dtype=np.float64), list(agg.values())
    )


def exhaustive_dus(momdp: MOMDP, cap: int = 10_000) -> SolutionSet:
    """Return distributions of all deterministic time-indexed policies,
    pruned to the distributionally undominated subset."""
    layers = reachable_states_per_step(momdp)
    slots = [(t, s) for t, states in enumerate(layers) for s in states]
    count = momdp.num_actions ** len(slots)
    if count > cap:
        raise OracleCapError(count, cap)

    width = max(1, len(str(count - 1)))
    entries = []
    for idx, assignment in enumerate(
        itertools.product(range(momdp.num_actions), repeat=len(slots))
    ):
        policy = dict(zip(slots, assignment))
        dist = policy_return_distribution(momdp, policy)
        entries.append((f"policy-{idx:0{width}d}", dist))
    return d_prune(SolutionSet(entries))
