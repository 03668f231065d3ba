"""Pruning labeled policy sets down to PF, CH, DUS, and CDUS.

All pruners remove entries simultaneously (each candidate is judged against
the original input set), so the result does not depend on iteration order.
"""

from __future__ import annotations

import json
from typing import Sequence

import numpy as np

from .distributions import (
    ReturnDistribution,
    cdf_on_axes,
    grid_axes,
    marginal_cdf_on_axis,
)
from .dominance import CDF_TOL
from .linprog import LinearProgram, solve

# A mixture strictly dominates only when the LP improves on zero by more
# than this; one order above the solver's feasibility tolerance.
DELTA_TOL = 1e-7

# Distributional dominance of x over y forces E[x] >= E[y] componentwise;
# this slack makes the expectation prescreen immune to CDF-tolerance noise.
_EXPECTATION_SLACK = 1e-6

# Above this many grid cells the shared-grid CDF tensors are not built and
# dominance falls back to pairwise checks.
_GRID_CELL_BUDGET = 4_000_000


class SolutionSet:
    """Ordered collection of (policy id, return distribution) entries.

    Policy ids are unique; entries whose distributions coincide after
    precision rounding are collapsed, keeping the lowest id.
    """

    def __init__(self, entries: Sequence[tuple[str, ReturnDistribution]]):
        entries = list(entries)
        if entries and any(
            d.dim != entries[0][1].dim for _, d in entries
        ):
            raise ValueError("all distributions must share one dimension")
        ids = [pid for pid, _ in entries]
        if len(set(ids)) != len(ids):
            raise ValueError("policy ids must be unique")

        groups: dict[bytes, list[int]] = {}
        for idx, (_, dist) in enumerate(entries):
            # Entries count as duplicates when equal at the default
            # coarsening precision.
            key = (
                np.round(dist.atoms, 3).tobytes()
                + np.round(dist.probs, 9).tobytes()
            )
            groups.setdefault(key, []).append(idx)
        chosen = []
        for idxs in groups.values():
            rep = min(idxs, key=lambda i: entries[i][0])
            chosen.append((min(idxs), rep))
        chosen.sort()
        self.entries: list[tuple[str, ReturnDistribution]] = [
            entries[rep] for _, rep in chosen
        ]

    @property
    def dim(self) -> int:
        if not self.entries:
            raise ValueError("empty solution set has no dimension")
        return self.entries[0][1].dim

    def ids(self) -> list[str]:
        return [pid for pid, _ in self.entries]

    def dists(self) -> list[ReturnDistribution]:
        return [d for _, d in self.entries]

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(self.entries)

    def __repr__(self) -> str:
        return f"SolutionSet({self.ids()})"

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "entries": [
                {"id": pid, "dist": d.to_json_dict()} for pid, d in self.entries
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "SolutionSet":
        return cls(
            [
                (e["id"], ReturnDistribution.from_json_dict(e["dist"]))
                for e in data["entries"]
            ]
        )

    @classmethod
    def from_json(cls, text: str) -> "SolutionSet":
        return cls.from_json_dict(json.loads(text))


def _require_nonempty(sset: SolutionSet):
    if len(sset) == 0:
        raise ValueError("cannot prune an empty solution set")


# -- Pareto front ---------------------------------------------------------------

def p_prune(sset: SolutionSet) -> SolutionSet:
    """Keep entries whose expected value no other entry strictly Pareto
    dominates. Ties (equal vectors) are all retained."""
    _require_nonempty(sset)
    values = np.array([d.expected_value() for d in sset.dists()])
    n = len(values)
    geq = np.all(values[:, None, :] >= values[None, :, :], axis=2)
    gt = np.any(values[:, None, :] > values[None, :, :], axis=2)
    dominates = geq & gt
    dominated = dominates.any(axis=0)
    return SolutionSet([e for e, dead in zip(sset.entries, dominated) if not dead])


# -- distributional undominated set ----------------------------------------------

def _dd_adjacency(dists: Sequence[ReturnDistribution]) -> np.ndarray:
    """Boolean matrix: entry [i, j] true iff dists[i] distributionally
    dominates dists[j].

    Evaluates every CDF once on the shared coordinate grid of the whole set
    (a superset of each pair's grid, on which step CDFs take the same
    values), after an expectation-based prescreen.
    """
    n = len(dists)
    dim = dists[0].dim
    out = np.zeros((n, n), dtype=bool)
    if n < 2:
        return out

    values = np.array([d.expected_value() for d in dists])
    prescreen = np.all(
        values[:, None, :] >= values[None, :, :] - _EXPECTATION_SLACK, axis=2
    )
    np.fill_diagonal(prescreen, False)
    pairs = np.argwhere(prescreen)
    if pairs.size == 0:
        return out

    axes = grid_axes(dists)
    cells = int(np.prod([len(ax) for ax in axes]))
    if cells > _GRID_CELL_BUDGET:
        from .dominance import distributionally_dominates

        for i, j in pairs:
            out[i, j] = distributionally_dominates(dists[i], dists[j])
        return out

    joint = np.stack([cdf_on_axes(d, axes) for d in dists])
    marg = [
        np.stack([marginal_cdf_on_axis(d, k, axes[k]) for d in dists])
        for k in range(dim)
    ]

    pi, pj = pairs[:, 0], pairs[:, 1]
    joint_weak = np.all(joint[pi] <= joint[pj] + CDF_TOL, axis=1)
    marg_strict_any = np.zeros(len(pairs), dtype=bool)
    for k in range(dim):
        fk_i, fk_j = marg[k][pi], marg[k][pj]
        weak = np.all(fk_i <= fk_j + CDF_TOL, axis=1)
        strict = np.any(fk_i < fk_j - CDF_TOL, axis=1)
        marg_strict_any |= weak & strict
    out[pi, pj] = joint_weak & marg_strict_any
    return out


def d_prune_dists(dists: Sequence[ReturnDistribution]) -> list[ReturnDistribution]:
    """Distributionally undominated subset of a plain distribution list."""
    dists = list(dists)
    if len(dists) <= 1:
        return dists
    dominated = _dd_adjacency(dists).any(axis=0)
    return [d for d, dead in zip(dists, dominated) if not dead]


def d_prune(sset: SolutionSet) -> SolutionSet:
    """Keep entries not distributionally dominated by any other entry."""
    _require_nonempty(sset)
    dominated = _dd_adjacency(sset.dists()).any(axis=0)
    return SolutionSet([e for e, dead in zip(sset.entries, dominated) if not dead])


# -- convex hull ------------------------------------------------------------------

def _mixture_pareto_dominated(candidate: np.ndarray, others: np.ndarray) -> bool:
    """LP check: does a convex combination of ``others`` strictly Pareto
    dominate ``candidate``? Maximizes the total componentwise surplus."""
    n, d = others.shape
    # Variables: lambda_1..n, surplus t_1..d.
    # Rows: sum_i lambda_i V_i - t = candidate (d rows); sum lambda = 1.
    a = np.zeros((d + 1, n + d))
    a[:d, :n] = others.T
    a[:d, n:] = -np.eye(d)
    a[d, :n] = 1.0
    b = np.concatenate([candidate, [1.0]])
    c = np.concatenate([np.zeros(n), np.ones(d)])
    lp = LinearProgram(c, a, b, np.ones(n + d, dtype=bool))
    sol = solve(lp)
    return sol.status == "optimal" and sol.objective_value > DELTA_TOL


def ch_prune(sset: SolutionSet) -> SolutionSet:
    """Keep entries whose expected value is not strictly Pareto dominated by
    any convex combination of the other entries' expected values."""
    _require_nonempty(sset)
    values = np.array([d.expected_value() for d in sset.dists()])
    n = len(values)
    if n == 1:
        return SolutionSet(list(sset.entries))
    keep = []
    for i in range(n):
        others = np.delete(values, i, axis=0)
        if not _mixture_pareto_dominated(values[i], others):
            keep.append(sset.entries[i])
    return SolutionSet(keep)


# -- convex distributional undominated set -----------------------------------------

def _dedupe_rows(a: np.ndarray, weights: np.ndarray | None = None):
    """Unique rows of ``a``; if ``weights`` given, sums them per group."""
    uniq, inverse = np.unique(a, axis=0, return_inverse=True)
    if weights is None:
        return uniq, None
    w = np.zeros(uniq.shape[0])
    np.add.at(w, inverse.ravel(), weights)
    return uniq, w


def _convex_dominance_lp_joint(
    candidate: ReturnDistribution, others: Sequence[ReturnDistribution]
) -> LinearProgram:
    """Feasibility/improvement program for mixture distributional dominance.

    Variables: mixture weights lambda (simplex), one slack s >= 0 per joint
    grid row forcing the mixture CDF under the candidate's CDF, and one free
    marginal slack l per (dimension, coordinate) row. Maximizes the sum of
    the marginal slacks; a strictly positive optimum certifies a mixture
    that distributionally dominates the candidate. Rows where every CDF
    involved equals 0 or every one equals 1 are constant and dropped;
    duplicate rows are collapsed (their slacks would be equal anyway).
    """
    all_dists = list(others) + [candidate]
    axes = grid_axes(all_dists)
    n = len(others)

    f_others = np.stack([cdf_on_axes(d, axes) for d in others], axis=1)  # (h, n)
    f_cand = cdf_on_axes(candidate, axes)  # (h,)
    joint = np.concatenate([f_others, f_cand[:, None]], axis=1)
    live = ~(np.all(joint >= 1.0 - 1e-15, axis=1) | np.all(joint <= 1e-15, axis=1))
    joint, _ = _dedupe_rows(joint[live])

    marg_rows = []
    for k in range(candidate.dim):
        fk = np.stack(
            [marginal_cdf_on_axis(d, k, axes[k]) for d in others], axis=1
        )
        fk_cand = marginal_cdf_on_axis(candidate, k, axes[k])
        block = np.concatenate([fk, fk_cand[:, None]], axis=1)
        live = ~(
            np.all(block >= 1.0 - 1e-15, axis=1) | np.all(block <= 1e-15, axis=1)
        )
        block, _ = _dedupe_rows(block[live])
        marg_rows.append(block)
    marg = (
        np.concatenate(marg_rows, axis=0)
        if marg_rows
        else np.zeros((0, n + 1))
    )

    n_joint = joint.shape[0]
    n_marg = marg.shape[0]
    n_vars = n + n_joint + n_marg
    rows = n_joint + n_marg + 1
    a = np.zeros((rows, n_vars))
    b = np.zeros(rows)

    # sum_i lambda_i F_i(v_j) + s_j = F_cand(v_j)
    a[:n_joint, :n] = joint[:, :n]
    a[:n_joint, n: n + n_joint] = np.eye(n_joint)
    b[:n_joint] = joint[:, n]
    # sum_i lambda_i F_{i,k}(c) + l_{k,c} = F_{cand,k}(c)
    a[n_joint: n_joint + n_marg, :n] = marg[:, :n]
    a[n_joint: n_joint + n_marg, n + n_joint:] = np.eye(n_marg)
    b[n_joint: n_joint + n_marg] = marg[:, n]
    # simplex constraint on the weights
    a[-1, :n] = 1.0
    b[-1] = 1.0

    c = np.zeros(n_vars)
    c[n + n_joint:] = 1.0  # maximize the marginal slack total
    bounded = np.ones(n_vars, dtype=bool)
    bounded[n + n_joint:] = False  # l implied nonnegative by the joint rows
    return LinearProgram(c, a, b, bounded)


def _convex_dominance_lp_marginal(
    candidate: ReturnDistribution, others: Sequence[ReturnDistribution]
) -> LinearProgram:
    """Marginal-only variant: the joint CDF is replaced by the product of
    marginal CDFs and the slack total on those rows is maximized directly
    (strict FSD between independent-marginal surrogates)."""
    all_dists = list(others) + [candidate]
    axes = grid_axes(all_dists)
    n = len(others)

    prod_others = np.ones((int(np.prod([len(ax) for ax in axes])), n))
    prod_cand = np.ones(prod_others.shape[0])
    mesh_shape = tuple(len(ax) for ax in axes)
    for k in range(candidate.dim):
        reshape = [1] * candidate.dim
        reshape[k] = len(axes[k])
        for i, d in enumerate(others):
            fk = marginal_cdf_on_axis(d, k, axes[k]).reshape(reshape)
            prod_others[:, i] *= np.broadcast_to(fk, mesh_shape).ravel()
        fk_cand = marginal_cdf_on_axis(candidate, k, axes[k]).reshape(reshape)
        prod_cand *= np.broadcast_to(fk_cand, mesh_shape).ravel()

    block = np.concatenate([prod_others, prod_cand[:, None]], axis=1)
    live = ~(np.all(block >= 1.0 - 1e-15, axis=1) | np.all(block <= 1e-15, axis=1))
    block, _ = _dedupe_rows(block[live])

    m = block.shape[0]
    n_vars = n + m
    a = np.zeros((m + 1, n_vars))
    a[:m, :n] = block[:, :n]
    a[:m, n:] = np.eye(m)
    a[-1, :n] = 1.0
    b = np.concatenate([block[:, n], [1.0]])
    c = np.zeros(n_vars)
    c[n:] = 1.0
    return LinearProgram(c, a, b, np.ones(n_vars, dtype=bool))


def is_convex_dist_dominated(
    candidate: ReturnDistribution,
    others: Sequence[ReturnDistribution],
    mode: str = "joint",
) -> bool:
    """Whether some convex mixture of ``others`` distributionally dominates
    ``candidate``.

    Joint mode solves the full program over the shared coordinate grid;
    marginal-only mode uses the product of marginal CDFs, exact when the
    objectives are independent and an approximation otherwise. An
    infeasible program means no mixture even weakly dominates.
    """
    others = list(others)
    if not others:
        raise ValueError("need at least one distribution to mix over")
    if any(d.dim != candidate.dim for d in others):
        raise ValueError("dimension mismatch between candidate and mixture set")
    if mode == "joint":
        lp = _convex_dominance_lp_joint(candidate, others)
    elif mode in ("marginal", "marginal-only"):
        lp = _convex_dominance_lp_marginal(candidate, others)
    else:
        raise ValueError(f"unknown mode {mode!r}")
    sol = solve(lp)
    if sol.status == "infeasible":
        return False
    if sol.status != "optimal":
        raise ArithmeticError(f"dominance program ended {sol.status}")
    return sol.objective_value > DELTA_TOL


def cd_prune(sset: SolutionSet, mode: str = "joint") -> SolutionSet:
    """Keep entries not distributionally dominated by any convex mixture of
    the other entries of the original set."""
    _require_nonempty(sset)
    dists = sset.dists()
    if len(dists) == 1:
        return SolutionSet(list(sset.entries))
    keep = []
    for i, entry in enumerate(sset.entries):
        others = dists[:i] + dists[i + 1:]
        if not is_convex_dist_dominated(dists[i], others, mode=mode):
            keep.append(entry)
    return SolutionSet(keep)
