"""Shared randomized-input builders for the test suite.

Atoms live on coarse grids and probabilities are small-denominator
rationals, so tolerance thresholds (1e-9 on CDF steps) sit far away from
any value the generators can produce.
"""

import numpy as np

from distmo import ReturnDistribution, SolutionSet


def rational_probs(rng, n, denom=24):
    """Probabilities k/denom summing to one, at least one atom kept."""
    counts = rng.multinomial(denom, np.full(n, 1.0 / n))
    keep = counts > 0
    return counts[keep] / denom, keep


def random_dist(rng, dim=2, max_atoms=5, lo=0, hi=6, half_steps=False):
    n = int(rng.integers(1, max_atoms + 1))
    atoms = rng.integers(lo, hi + 1, size=(n, dim)).astype(float)
    if half_steps:
        atoms += 0.5 * rng.integers(0, 2, size=(n, dim))
    probs, keep = rational_probs(rng, n)
    return ReturnDistribution(atoms[keep], probs)


def random_solution_set(rng, max_dists=8, max_atoms=5, dim=2):
    n = int(rng.integers(2, max_dists + 1))
    return SolutionSet(
        [(f"p{i:02d}", random_dist(rng, dim=dim, max_atoms=max_atoms)) for i in range(n)]
    )


def random_independent_dist(rng, dim=2, max_values=3, lo=0, hi=6):
    """Product distribution with independent coordinates."""
    marginals = []
    for _ in range(dim):
        k = int(rng.integers(1, max_values + 1))
        values = np.sort(rng.choice(np.arange(lo, hi + 1), size=k, replace=False))
        probs, keep = rational_probs(rng, k, denom=12)
        marginals.append((values[keep].astype(float), probs))
    grids = np.meshgrid(*[m[0] for m in marginals], indexing="ij")
    atoms = np.stack([g.ravel() for g in grids], axis=1)
    probs = np.ones(atoms.shape[0])
    for axis, (_, p) in enumerate(marginals):
        shape = [1] * dim
        shape[axis] = len(p)
        probs = probs * np.broadcast_to(p.reshape(shape), [len(m[0]) for m in marginals]).ravel()
    return ReturnDistribution(atoms, probs)


def shifted_dd_pair(rng, dim=2, max_atoms=5):
    """(X, Y) with X guaranteed to distributionally dominate Y.

    X applies a nonnegative per-atom shift to Y with at least one strictly
    positive component, which dominates by coupling: X >= Y almost surely
    and at least one marginal gains a strict CDF step.
    """
    y = random_dist(rng, dim=dim, max_atoms=max_atoms)
    shifts = rng.integers(0, 3, size=(len(y), dim)).astype(float)
    bump_atom = int(rng.integers(len(y)))
    bump_dim = int(rng.integers(dim))
    shifts[bump_atom, bump_dim] = max(1.0, shifts[bump_atom, bump_dim])
    x = ReturnDistribution(y.atoms + shifts, y.probs)
    return x, y
