"""Multivariate categorical distributions over return vectors.

Everything downstream (dominance checks, pruning, learning) works on these
finite distributions: an array of support vectors ("atoms") and a matching
probability vector. Instances are immutable after construction and all
operations are pure functions, so they can be shared freely.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

PROB_TOL = 1e-9

# Precision the learner limits distributions to, in decimals; atoms equal
# after rounding at this precision are treated as coincident wherever
# supports are deliberately coarsened.
DEFAULT_DECIMALS = 3


class ReturnDistribution:
    """Immutable categorical distribution over vectors in R^d.

    Atoms are stored lexicographically sorted with coincident atoms merged,
    so two distributions with the same support and probabilities have
    identical internal arrays. Passing ``decimals`` rounds coordinates
    half-to-even first, merging atoms that collide at that precision.
    """

    __slots__ = ("_atoms", "_probs")

    def __init__(self, atoms, probs, decimals: int | None = None):
        atoms = np.asarray(atoms, dtype=np.float64)
        if atoms.ndim == 1:
            atoms = atoms.reshape(-1, 1)
        probs = np.asarray(probs, dtype=np.float64).ravel()
        if atoms.ndim != 2 or atoms.shape[0] != probs.shape[0]:
            raise ValueError(
                f"atoms {atoms.shape} and probs {probs.shape} do not align"
            )
        if atoms.shape[0] == 0:
            raise ValueError("a distribution needs at least one atom")
        if not np.all(np.isfinite(atoms)) or not np.all(np.isfinite(probs)):
            raise ValueError("atoms and probs must be finite")
        if np.any(probs < -1e-12):
            raise ValueError("negative probability")
        total = float(probs.sum())
        if abs(total - 1.0) > PROB_TOL:
            raise ValueError(f"probabilities sum to {total!r}, expected 1")

        if decimals is not None:
            atoms = np.round(atoms, decimals)
        atoms = atoms + 0.0  # normalize -0.0 to +0.0

        merged, inverse = np.unique(atoms, axis=0, return_inverse=True)
        merged_probs = np.zeros(merged.shape[0])
        np.add.at(merged_probs, inverse.ravel(), np.maximum(probs, 0.0))

        keep = merged_probs > 0.0
        if not np.any(keep):
            raise ValueError("all probability mass vanished")
        merged, merged_probs = merged[keep], merged_probs[keep]
        s = merged_probs.sum()
        if abs(s - 1.0) > 1e-12:
            merged_probs = merged_probs / s

        merged.setflags(write=False)
        merged_probs.setflags(write=False)
        self._atoms = merged
        self._probs = merged_probs

    # -- construction helpers -------------------------------------------------

    @classmethod
    def dirac(cls, vector) -> "ReturnDistribution":
        """Point mass at ``vector``."""
        v = np.atleast_1d(np.asarray(vector, dtype=np.float64))
        return cls(v.reshape(1, -1), np.ones(1))

    @classmethod
    def from_pairs(
        cls, pairs: Iterable[tuple[Sequence[float], float]], decimals: int | None = None
    ) -> "ReturnDistribution":
        """Build from ``[(vector, prob), ...]`` pairs."""
        pairs = list(pairs)
        atoms = np.asarray([p[0] for p in pairs], dtype=np.float64)
        probs = np.asarray([p[1] for p in pairs], dtype=np.float64)
        return cls(atoms, probs, decimals=decimals)

    # -- basic views ----------------------------------------------------------

    @property
    def atoms(self) -> np.ndarray:
        return self._atoms

    @property
    def probs(self) -> np.ndarray:
        return self._probs

    @property
    def dim(self) -> int:
        return self._atoms.shape[1]

    def __len__(self) -> int:
        return self._atoms.shape[0]

    def __repr__(self) -> str:
        inner = ", ".join(
            f"{tuple(float(x) for x in v)}: {p:.6g}"
            for v, p in zip(self._atoms, self._probs)
        )
        return f"ReturnDistribution({{{inner}}})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, ReturnDistribution):
            return NotImplemented
        return (
            self._atoms.shape == other._atoms.shape
            and np.array_equal(self._atoms, other._atoms)
            and np.allclose(self._probs, other._probs, rtol=0.0, atol=1e-9)
        )

    __hash__ = None  # tolerance-based equality; use explicit keys for dedup

    # -- probabilistic queries ------------------------------------------------

    def cdf(self, point) -> float:
        """Total mass on atoms that are <= ``point`` in every coordinate."""
        point = np.asarray(point, dtype=np.float64).ravel()
        if point.shape[0] != self.dim:
            raise ValueError(f"point has length {point.shape[0]}, expected {self.dim}")
        mask = np.all(self._atoms <= point, axis=1)
        return float(np.dot(mask.astype(np.float64), self._probs))

    def marginal(self, i: int) -> "ReturnDistribution":
        """Univariate distribution of the i-th coordinate."""
        if not 0 <= i < self.dim:
            raise ValueError(f"objective index {i} out of range for dim {self.dim}")
        values, inverse = np.unique(self._atoms[:, i], return_inverse=True)
        probs = np.zeros(values.shape[0])
        np.add.at(probs, inverse.ravel(), self._probs)
        return ReturnDistribution(values.reshape(-1, 1), probs, decimals=None)

    def expected_value(self) -> np.ndarray:
        """Probability-weighted mean vector."""
        return self._probs @ self._atoms

    def expected_utility(self, u: "UtilityFunction | Callable") -> float:
        """E[u(V)] for a scalar utility over return vectors."""
        fn = u.fn if isinstance(u, UtilityFunction) else u
        values = np.asarray([float(fn(v)) for v in self._atoms])
        return float(np.dot(values, self._probs))

    def sample(self, rng: np.random.Generator) -> np.ndarray:
        """Draw one support vector."""
        idx = int(rng.choice(len(self), p=self._probs))
        return self._atoms[idx].copy()

    # -- serialization --------------------------------------------------------

    def to_json_dict(self) -> dict:
        return {
            "dim": self.dim,
            "atoms": [
                {"v": [float(x) for x in vec], "p": float(p)}
                for vec, p in zip(self._atoms, self._probs)
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict())

    @classmethod
    def from_json_dict(cls, data: dict) -> "ReturnDistribution":
        atoms = [entry["v"] for entry in data["atoms"]]
        probs = [entry["p"] for entry in data["atoms"]]
        dist = cls(np.asarray(atoms, dtype=np.float64), probs, decimals=None)
        if dist.dim != int(data["dim"]):
            raise ValueError("dim field does not match atom vectors")
        return dist

    @classmethod
    def from_json(cls, text: str) -> "ReturnDistribution":
        return cls.from_json_dict(json.loads(text))


# -- utility functions ---------------------------------------------------------

@dataclass(frozen=True)
class UtilityFunction:
    """Scalar utility over return vectors, with a tag naming its family.

    All built-ins except the Leontief utility are strictly increasing:
    u(x) > u(y) whenever x Pareto dominates y. The Leontief min-utility is
    only weakly increasing (a strictly better vector can leave the minimum
    coordinate unchanged).
    """

    fn: Callable[[np.ndarray], float]
    kind: str
    description: str = ""

    def __call__(self, vector) -> float:
        return float(self.fn(np.asarray(vector, dtype=np.float64)))


def linear_utility(weights) -> UtilityFunction:
    w = np.asarray(weights, dtype=np.float64)
    return UtilityFunction(
        fn=lambda v: float(np.dot(w, v)),
        kind="linear-with-weights",
        description=f"w·v with w={list(map(float, w))}",
    )


def product_utility() -> UtilityFunction:
    return UtilityFunction(
        fn=lambda v: float(np.prod(v)),
        kind="product",
        description="product of coordinates",
    )


def leontief_utility() -> UtilityFunction:
    # Weakly increasing only: raising a single non-minimal coordinate does
    # not change the value.
    return UtilityFunction(
        fn=lambda v: float(np.min(v)),
        kind="leontief",
        description="minimum coordinate",
    )


def smooth_log_product_utility() -> UtilityFunction:
    """Strictly increasing smooth surrogate for prod_i max(0, v_i)."""
    return UtilityFunction(
        fn=lambda v: float(np.prod(np.log1p(np.exp(v)))),
        kind="smooth-log-product",
        description="prod_i ln(1 + e^{v_i})",
    )


def custom_utility(fn: Callable, description: str = "") -> UtilityFunction:
    return UtilityFunction(fn=fn, kind="user-supplied", description=description)


# -- distribution arithmetic ---------------------------------------------------

def mix(
    dists: Sequence[ReturnDistribution],
    weights,
    decimals: int | None = None,
) -> ReturnDistribution:
    """Convex mixture: atom union with weight-scaled summed probabilities."""
    if len(dists) == 0:
        raise ValueError("mix needs at least one distribution")
    weights = np.asarray(weights, dtype=np.float64).ravel()
    if weights.shape[0] != len(dists):
        raise ValueError("one weight per distribution required")
    if np.any(weights < 0):
        raise ValueError("mixture weights must be nonnegative")
    if abs(float(weights.sum()) - 1.0) > PROB_TOL:
        raise ValueError("mixture weights must sum to 1")
    dim = dists[0].dim
    if any(d.dim != dim for d in dists):
        raise ValueError("all distributions must share the same dimension")
    atoms = np.concatenate([d.atoms for d in dists], axis=0)
    probs = np.concatenate([w * d.probs for w, d in zip(weights, dists)])
    return ReturnDistribution(atoms, probs, decimals=decimals)


def convolve(
    a: ReturnDistribution,
    b: ReturnDistribution,
    scale: float = 1.0,
    decimals: int | None = None,
) -> ReturnDistribution:
    """Distribution of A + scale*B for independent draws A ~ a, B ~ b."""
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    if scale < 0:
        raise ValueError("scale must be nonnegative")
    atoms = (a.atoms[:, None, :] + scale * b.atoms[None, :, :]).reshape(-1, a.dim)
    probs = np.outer(a.probs, b.probs).ravel()
    return ReturnDistribution(atoms, probs, decimals=decimals)


def round_to_precision(dist: ReturnDistribution, decimals: int) -> ReturnDistribution:
    """Round atom coordinates half-to-even, merging atoms that collide."""
    if decimals < 0:
        raise ValueError("decimals must be nonnegative")
    return ReturnDistribution(dist.atoms, dist.probs, decimals=decimals)


def _flatten_onto_union(
    a: ReturnDistribution, b: ReturnDistribution
) -> tuple[np.ndarray, np.ndarray]:
    """Probability vectors of a and b over the union of their supports."""
    union, inv = np.unique(
        np.concatenate([a.atoms, b.atoms], axis=0), axis=0, return_inverse=True
    )
    inv = inv.ravel()
    p = np.zeros(union.shape[0])
    q = np.zeros(union.shape[0])
    np.add.at(p, inv[: len(a)], a.probs)
    np.add.at(q, inv[len(a):], b.probs)
    return p, q


def js_distance(a: ReturnDistribution, b: ReturnDistribution) -> float:
    """Jensen-Shannon distance (base-2), bounded in [0, 1].

    Both distributions are flattened onto the union of their supports; the
    distance is the square root of the Jensen-Shannon divergence.
    """
    if a.dim != b.dim:
        raise ValueError(f"dimension mismatch: {a.dim} vs {b.dim}")
    p, q = _flatten_onto_union(a, b)
    m = 0.5 * (p + q)
    with np.errstate(divide="ignore", invalid="ignore"):
        kl_pm = np.where(p > 0, p * np.log2(np.where(p > 0, p / m, 1.0)), 0.0)
        kl_qm = np.where(q > 0, q * np.log2(np.where(q > 0, q / m, 1.0)), 0.0)
    jsd = 0.5 * float(kl_pm.sum()) + 0.5 * float(kl_qm.sum())
    jsd = min(max(jsd, 0.0), 1.0)
    return math.sqrt(jsd)


def step_grid(dists: Sequence[ReturnDistribution]) -> np.ndarray:
    """All CDF evaluation points needed to compare the given distributions.

    Returns the Cartesian product over dimensions of the sorted union of
    coordinates appearing in any input's support, in lexicographic order,
    as an (m, d) array. Multivariate step CDFs are constant on the cells of
    this grid, so comparing them at these points decides every point of R^d.
    """
    if len(dists) == 0:
        raise ValueError("step_grid needs at least one distribution")
    dim = dists[0].dim
    if any(d.dim != dim for d in dists):
        raise ValueError("all distributions must share the same dimension")
    axes = [
        np.unique(np.concatenate([d.atoms[:, k] for d in dists]))
        for k in range(dim)
    ]
    mesh = np.meshgrid(*axes, indexing="ij")
    return np.stack([m.ravel() for m in mesh], axis=1)


def grid_axes(dists: Sequence[ReturnDistribution]) -> list[np.ndarray]:
    """Per-dimension sorted unions of support coordinates."""
    dim = dists[0].dim
    return [
        np.unique(np.concatenate([d.atoms[:, k] for d in dists]))
        for k in range(dim)
    ]


def cdf_on_axes(dist: ReturnDistribution, axes: Sequence[np.ndarray]) -> np.ndarray:
    """Joint CDF evaluated on the full grid spanned by ``axes``, flattened.

    Every atom coordinate of ``dist`` must appear in the matching axis
    (axes built by :func:`grid_axes` over a superset of distributions
    satisfy this). Runs in O(prod(len(axis))) via histogram + cumsum.
    """
    shape = tuple(len(ax) for ax in axes)
    hist = np.zeros(shape)
    idx = tuple(
        np.searchsorted(axes[k], dist.atoms[:, k]) for k in range(dist.dim)
    )
    np.add.at(hist, idx, dist.probs)
    for axis in range(dist.dim):
        hist = np.cumsum(hist, axis=axis)
    return hist.ravel()


def marginal_cdf_on_axis(dist: ReturnDistribution, k: int, axis: np.ndarray) -> np.ndarray:
    """CDF of the k-th marginal at each value of ``axis``."""
    hist = np.zeros(len(axis))
    np.add.at(hist, np.searchsorted(axis, dist.atoms[:, k]), dist.probs)
    return np.cumsum(hist)
