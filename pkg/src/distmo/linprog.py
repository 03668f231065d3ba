"""Dense equality-form linear programs and a deterministic simplex solver.

Problems are stated as: maximize c.x subject to A x = b, with each variable
either bounded below by zero or free. The solver is a two-phase tableau
simplex using Bland's rule throughout, so it cannot cycle and two solves of
the same program return bit-identical results.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

# Entries this small are treated as zero during pivoting.
PIVOT_TOL = 1e-9
# An optimal solution must satisfy |A x - b| <= this in max-norm.
FEAS_TOL = 1e-7


@dataclass(frozen=True)
class LinearProgram:
    """maximize objective . x  subject to  constraints_lhs x = constraints_rhs.

    ``lower_bounded[j]`` marks x_j >= 0; unmarked variables are free.
    """

    objective: np.ndarray
    constraints_lhs: np.ndarray
    constraints_rhs: np.ndarray
    lower_bounded: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.objective, dtype=np.float64).ravel()
        a = np.asarray(self.constraints_lhs, dtype=np.float64)
        b = np.asarray(self.constraints_rhs, dtype=np.float64).ravel()
        lb = np.asarray(self.lower_bounded, dtype=bool).ravel()
        if a.ndim != 2:
            raise ValueError("constraint matrix must be two-dimensional")
        if a.shape[1] != c.shape[0]:
            raise ValueError(
                f"matrix has {a.shape[1]} columns but objective has {c.shape[0]} entries"
            )
        if a.shape[0] != b.shape[0]:
            raise ValueError(
                f"matrix has {a.shape[0]} rows but rhs has {b.shape[0]} entries"
            )
        if lb.shape[0] != c.shape[0]:
            raise ValueError("bounds vector must match the variable count")
        object.__setattr__(self, "objective", c)
        object.__setattr__(self, "constraints_lhs", a)
        object.__setattr__(self, "constraints_rhs", b)
        object.__setattr__(self, "lower_bounded", lb)


@dataclass(frozen=True)
class LPSolution:
    status: str  # "optimal" | "infeasible" | "unbounded"
    objective_value: float | None
    x: np.ndarray | None


def _bland_iterate(tableau, basis, tol=PIVOT_TOL):
    """Run simplex pivots in place until optimal or unbounded.

    The last row holds reduced costs (z_j - c_j for maximization: optimal
    when all >= -tol), the last column the rhs. Entering variable: lowest
    column index with negative reduced cost. Leaving: minimum-ratio row,
    ties broken by the lowest basic variable index (Bland's rule).
    """
    m = tableau.shape[0] - 1
    while True:
        reduced = tableau[-1, :-1]
        entering_candidates = np.nonzero(reduced < -tol)[0]
        if entering_candidates.size == 0:
            return "optimal"
        j = int(entering_candidates[0])
        col = tableau[:m, j]
        rows = np.nonzero(col > tol)[0]
        if rows.size == 0:
            return "unbounded"
        ratios = tableau[rows, -1] / col[rows]
        best = ratios.min()
        tied = rows[ratios <= best + tol * (1.0 + abs(best))]
        r = int(tied[np.argmin([basis[t] for t in tied])])
        pivot = tableau[r, j]
        tableau[r, :] /= pivot
        factors = tableau[:, j].copy()
        factors[r] = 0.0
        tableau -= np.outer(factors, tableau[r, :])
        basis[r] = j


def solve(lp: LinearProgram) -> LPSolution:
    """Two-phase simplex. Deterministic for identical inputs."""
    c = lp.objective.copy()
    a = lp.constraints_lhs.copy()
    b = lp.constraints_rhs.copy()
    m, n = a.shape

    # Split free variables x = u - w with u, w >= 0.
    free = np.nonzero(~lp.lower_bounded)[0]
    if free.size:
        a = np.concatenate([a, -a[:, free]], axis=1)
        c = np.concatenate([c, -c[free]])
    n_std = a.shape[1]

    neg = b < 0
    a[neg] *= -1.0
    b[neg] *= -1.0

    # Crash basis: columns that are singletons with a positive entry can be
    # made basic directly, avoiding an artificial for their row.
    basis = [-1] * m
    nonzero_counts = (np.abs(a) > PIVOT_TOL).sum(axis=0)
    for j in range(n_std):
        if nonzero_counts[j] != 1:
            continue
        i = int(np.argmax(np.abs(a[:, j])))
        if a[i, j] > PIVOT_TOL and basis[i] == -1:
            scale = a[i, j]
            a[i, :] /= scale
            b[i] /= scale
            basis[i] = j

    art_rows = [i for i in range(m) if basis[i] == -1]
    n_art = len(art_rows)
    art_cols = np.zeros((m, n_art))
    for k, i in enumerate(art_rows):
        art_cols[i, k] = 1.0
        basis[i] = n_std + k

    full = np.concatenate([a, art_cols], axis=1)
    n_total = n_std + n_art

    def build_tableau(cost):
        t = np.zeros((m + 1, n_total + 1))
        t[:m, :n_total] = full
        t[:m, -1] = b
        t[-1, :n_total] = -cost
        for i, bj in enumerate(basis):
            if abs(t[-1, bj]) > 0:
                t[-1, :] -= t[-1, bj] * t[i, :]
        return t

    if n_art:
        cost1 = np.zeros(n_total)
        cost1[n_std:] = -1.0
        tableau = build_tableau(cost1)
        status = _bland_iterate(tableau, basis)
        if status != "optimal" or tableau[-1, -1] < -FEAS_TOL:
            return LPSolution("infeasible", None, None)
        # Pivot artificials out of the basis; drop rows that prove redundant.
        keep_rows = []
        for i in range(m):
            if basis[i] < n_std:
                keep_rows.append(i)
                continue
            row = tableau[i, :n_std]
            candidates = np.nonzero(np.abs(row) > PIVOT_TOL)[0]
            if candidates.size == 0:
                continue  # redundant constraint
            j = int(candidates[0])
            pivot = tableau[i, j]
            tableau[i, :] /= pivot
            factors = tableau[:, j].copy()
            factors[i] = 0.0
            tableau -= np.outer(factors, tableau[i, :])
            basis[i] = j
            keep_rows.append(i)
        full = tableau[keep_rows, :n_std]
        b = tableau[keep_rows, -1]
        basis = [basis[i] for i in keep_rows]
        m = len(keep_rows)
        n_total = n_std
    else:
        n_total = n_std
        full = a

    cost2 = np.zeros(n_total)
    cost2[:n] = lp.objective
    if free.size:
        cost2[n: n + free.size] = -lp.objective[free]

    tableau = np.zeros((m + 1, n_total + 1))
    tableau[:m, :n_total] = full[:, :n_total]
    tableau[:m, -1] = b
    tableau[-1, :n_total] = -cost2
    for i, bj in enumerate(basis):
        if abs(tableau[-1, bj]) > 0:
            tableau[-1, :] -= tableau[-1, bj] * tableau[i, :]

    status = _bland_iterate(tableau, basis)
    if status == "unbounded":
        return LPSolution("unbounded", None, None)

    x_std = np.zeros(n_total)
    for i, bj in enumerate(basis):
        x_std[bj] = tableau[i, -1]
    x = x_std[:n].copy()
    if free.size:
        x[free] -= x_std[n: n + free.size]

    residual = lp.constraints_lhs @ x - lp.constraints_rhs
    if residual.size and np.max(np.abs(residual)) > FEAS_TOL:
        raise ArithmeticError(
            f"simplex returned an infeasible optimum (residual {np.max(np.abs(residual)):.3e})"
        )
    if np.any(x[lp.lower_bounded] < -1e-9):
        raise ArithmeticError("simplex violated a variable lower bound")
    return LPSolution("optimal", float(lp.objective @ x), x)
