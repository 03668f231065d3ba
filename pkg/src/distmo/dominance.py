"""Pairwise dominance relations between return vectors and distributions."""

from __future__ import annotations

import numpy as np

from .distributions import (
    ReturnDistribution,
    cdf_on_axes,
    grid_axes,
    marginal_cdf_on_axis,
)

# CDF comparisons treat differences within this tolerance as equal; a strict
# step requires a difference larger than it. Atom coordinates are rounded
# rationals in practice, so 1e-9 cleanly separates real steps from noise.
CDF_TOL = 1e-9


def pareto_dominates(u, v, strict: bool = True) -> bool:
    """Componentwise vector dominance.

    Strict mode: u >= v in every coordinate and u > v in at least one.
    Weak mode: u >= v in every coordinate (equality allowed).
    """
    u = np.asarray(u, dtype=np.float64).ravel()
    v = np.asarray(v, dtype=np.float64).ravel()
    if u.shape != v.shape:
        raise ValueError(f"length mismatch: {u.shape[0]} vs {v.shape[0]}")
    if not np.all(u >= v):
        return False
    return bool(np.any(u > v)) if strict else True


def fsd(a: ReturnDistribution, b: ReturnDistribution, strict: bool = False) -> bool:
    """First-order stochastic dominance of ``a`` over ``b``.

    Weak mode holds when F_a <= F_b everywhere; both CDFs are step functions
    constant on the cells of the joint coordinate grid, so evaluating at the
    grid points decides all of R^d. Strict mode additionally requires a
    strictly lower CDF value somewhere.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    axes = grid_axes([a, b])
    fa = cdf_on_axes(a, axes)
    fb = cdf_on_axes(b, axes)
    if not np.all(fa <= fb + CDF_TOL):
        return False
    if strict:
        return bool(np.any(fa < fb - CDF_TOL))
    return True


def distributionally_dominates(a: ReturnDistribution, b: ReturnDistribution) -> bool:
    """Weak joint FSD plus strict FSD of at least one marginal."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if not fsd(a, b, strict=False):
        return False
    return any(
        fsd(a.marginal(i), b.marginal(i), strict=True) for i in range(a.dim)
    )


def _marginal_fsd_flags(
    a: ReturnDistribution, b: ReturnDistribution
) -> tuple[bool, bool]:
    """(weak FSD on all marginals, strict FSD on some marginal) for a over b."""
    weak_all = True
    strict_any = False
    for k in range(a.dim):
        axis = np.unique(np.concatenate([a.atoms[:, k], b.atoms[:, k]]))
        fa = marginal_cdf_on_axis(a, k, axis)
        fb = marginal_cdf_on_axis(b, k, axis)
        weak = bool(np.all(fa <= fb + CDF_TOL))
        weak_all &= weak
        strict_any |= weak and bool(np.any(fa < fb - CDF_TOL))
    return weak_all, strict_any
