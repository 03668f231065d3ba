import numpy as np
import pytest

from distmo import LinearProgram, ReturnDistribution, solve
from distmo.pruning import _convex_dominance_lp_joint


def lp(c, a, b, bounded=None):
    c = np.asarray(c, dtype=float)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if bounded is None:
        bounded = np.ones(len(c), dtype=bool)
    return LinearProgram(c, a, b, np.asarray(bounded, dtype=bool))


class TestSolve:
    def test_single_constraint(self):
        sol = solve(lp([1, 0], [[1, 1]], [1]))
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(1.0)
        assert sol.x[0] == pytest.approx(1.0)

    def test_infeasible(self):
        sol = solve(lp([1], [[1]], [-1]))
        assert sol.status == "infeasible"

    def test_unbounded(self):
        sol = solve(lp([1, 0], [[1, -1]], [0]))
        assert sol.status == "unbounded"

    def test_free_variable(self):
        # maximize -t with t = x - 2, x free: t can hit 0 at x = 2.
        sol = solve(
            lp([0, -1], [[1, -1]], [2], bounded=[False, True])
        )
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(0.0, abs=1e-9)
        assert sol.x[0] == pytest.approx(2.0)

    def test_malformed_dimensions(self):
        with pytest.raises(ValueError):
            lp([1, 2], [[1]], [1])
        with pytest.raises(ValueError):
            lp([1], [[1], [1]], [1])

    def test_degenerate_cycles_terminate(self):
        # Multiple redundant constraints with degenerate vertices.
        sol = solve(
            lp(
                [3, 2, 1],
                [[1, 1, 1], [1, 1, 1], [2, 2, 2]],
                [1, 1, 2],
            )
        )
        assert sol.status == "optimal"
        assert sol.objective_value == pytest.approx(3.0)

    def test_feasibility_certificate(self):
        rng = np.random.default_rng(3)
        for _ in range(50):
            m, n = int(rng.integers(1, 5)), int(rng.integers(2, 7))
            a = rng.integers(-3, 4, size=(m, n)).astype(float)
            x0 = rng.uniform(0, 2, size=n)  # feasible by construction
            b = a @ x0
            c = rng.integers(-3, 4, size=n).astype(float)
            sol = solve(lp(c, a, b))
            assert sol.status in ("optimal", "unbounded")
            if sol.status == "optimal":
                assert np.max(np.abs(a @ sol.x - b)) <= 1e-7
                assert np.all(sol.x >= -1e-9)
                assert sol.objective_value >= c @ x0 - 1e-7

    def test_weak_duality_spot_check(self):
        # max x1 + x2 s.t. x1 + 2 x2 + s1 = 4, 3 x1 + x2 + s2 = 6.
        # Dual bound from y = (0.4, 0.2): y.b = 2.8 >= optimum.
        sol = solve(
            lp([1, 1, 0, 0], [[1, 2, 1, 0], [3, 1, 0, 1]], [4, 6])
        )
        assert sol.status == "optimal"
        assert sol.objective_value <= 0.4 * 4 + 0.2 * 6 + 1e-9

    def test_bit_identical_determinism(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            m, n = int(rng.integers(1, 5)), int(rng.integers(2, 7))
            a = rng.integers(-3, 4, size=(m, n)).astype(float)
            b = a @ rng.uniform(0, 2, size=n)
            c = rng.integers(-3, 4, size=n).astype(float)
            problem = lp(c, a, b)
            s1, s2 = solve(problem), solve(problem)
            assert s1.status == s2.status
            if s1.status == "optimal":
                assert s1.objective_value == s2.objective_value
                assert np.array_equal(s1.x, s2.x)

    def test_mixture_dominance_program_positive_slack(self):
        # Mixing two point masses to dominate the spread distribution: the
        # half/half mixture yields strictly positive marginal slack.
        z1 = ReturnDistribution.dirac((1, 5))
        z2 = ReturnDistribution.dirac((5, 1))
        z3 = ReturnDistribution.from_pairs([((1, 3), 0.5), ((3, 1), 0.5)])
        program = _convex_dominance_lp_joint(z3, [z1, z2])
        sol = solve(program)
        assert sol.status == "optimal"
        assert sol.objective_value > 1e-7
        lam = sol.x[:2]
        assert np.all(lam >= -1e-9) and lam.sum() == pytest.approx(1.0)
