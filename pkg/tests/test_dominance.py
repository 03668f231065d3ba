import numpy as np
import pytest

from distmo import (
    ReturnDistribution,
    distributionally_dominates,
    fsd,
    mix,
    pareto_dominates,
)
from conftest import random_dist, random_independent_dist, shifted_dd_pair


def pairs(*items):
    return ReturnDistribution.from_pairs(items)


X_EQ_MARGINALS = pairs(((2, 4), 2 / 3), ((4, 2), 1 / 3))
Y_EQ_MARGINALS = pairs(((2, 2), 1 / 3), ((2, 4), 1 / 3), ((4, 4), 1 / 3))


class TestParetoDominates:
    def test_strict(self):
        assert pareto_dominates((0.5, 0.5), (0.45, 0.45), strict=True)

    def test_incomparable(self):
        assert not pareto_dominates((1, 5), (5, 1), strict=True)
        assert not pareto_dominates((5, 1), (1, 5), strict=True)

    def test_equality(self):
        assert not pareto_dominates((2, 2), (2, 2), strict=True)
        assert pareto_dominates((2, 2), (2, 2), strict=False)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            pareto_dominates((1, 2), (1, 2, 3))


class TestFsd:
    def test_strict_joint_dominance_with_equal_marginals(self):
        assert fsd(X_EQ_MARGINALS, Y_EQ_MARGINALS, strict=True)

    def test_reflexive_weak_only(self):
        d = random_dist(np.random.default_rng(2))
        assert fsd(d, d, strict=False)
        assert not fsd(d, d, strict=True)

    def test_point_mass_does_not_dominate_spread(self):
        z1 = ReturnDistribution.dirac((2, 5))
        z2 = pairs(((1, 5), 0.5), ((3, 3), 0.5))
        # F_{Z1}(2,5) = 1 > 1/2 = F_{Z2}(2,5)
        assert not fsd(z1, z2, strict=False)

    def test_dim_mismatch(self):
        with pytest.raises(ValueError):
            fsd(X_EQ_MARGINALS, ReturnDistribution.dirac((0,)))


class TestDistributionalDominance:
    def test_equal_marginals_block_distributional_dominance(self):
        # Joint strict FSD holds, but every marginal pair is identical.
        assert fsd(X_EQ_MARGINALS, Y_EQ_MARGINALS, strict=True)
        for i in range(2):
            assert not fsd(X_EQ_MARGINALS.marginal(i), Y_EQ_MARGINALS.marginal(i), strict=True)
        assert not distributionally_dominates(X_EQ_MARGINALS, Y_EQ_MARGINALS)

    def test_point_masses(self):
        assert distributionally_dominates(
            ReturnDistribution.dirac((1, 1)), ReturnDistribution.dirac((0, 0))
        )

    def test_mixture_dominates_spread_policy(self):
        mixture = mix(
            [ReturnDistribution.dirac((1, 5)), ReturnDistribution.dirac((5, 1))],
            [0.5, 0.5],
        )
        z3 = pairs(((1, 3), 0.5), ((3, 1), 0.5))
        assert distributionally_dominates(mixture, z3)

    def test_irreflexive_antisymmetric(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            a = random_dist(rng)
            b = random_dist(rng)
            assert not distributionally_dominates(a, a)
            if distributionally_dominates(a, b):
                assert not distributionally_dominates(b, a)

    def test_implies_pareto_dominance(self):
        rng = np.random.default_rng(7)
        hits = 0
        for _ in range(200):
            x, y = shifted_dd_pair(rng)
            if distributionally_dominates(x, y):
                hits += 1
                assert pareto_dominates(
                    x.expected_value(), y.expected_value(), strict=True
                )
        assert hits >= 150  # the generator must actually produce DD pairs

    def test_equivalence_for_independent_components(self):
        rng = np.random.default_rng(11)
        for _ in range(100):
            x = random_independent_dist(rng)
            y = random_independent_dist(rng)
            assert distributionally_dominates(x, y) == fsd(x, y, strict=True)

    def test_joint_weak_implies_marginal_weak(self):
        rng = np.random.default_rng(13)
        checked = 0
        for _ in range(200):
            x, y = shifted_dd_pair(rng, dim=3)
            if fsd(x, y, strict=False):
                checked += 1
                for i in range(3):
                    assert fsd(x.marginal(i), y.marginal(i), strict=False)
        assert checked >= 150
