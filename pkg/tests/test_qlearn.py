import numpy as np
import pytest

from distmo import (
    Learner,
    LearnerConfig,
    MOMDP,
    QSetTable,
    ReturnDistribution,
    distributionally_dominates,
    limit_set_size,
    q_backup,
    score_set,
    select_action,
    train,
)
from distmo.momdp import TransitionEstimate
from distmo.qlearn import EmpiricalReward, _pairwise_js_matrix


def dirac(v):
    return ReturnDistribution.dirac(v)


def pairs(*items):
    return ReturnDistribution.from_pairs(items)


def single_state_momdp(rewards_by_action):
    n_actions = len(rewards_by_action)
    transitions = (tuple(((0, 1.0),) for _ in range(n_actions)),)
    rewards = {(0, a, 0): dist for a, dist in enumerate(rewards_by_action)}
    return MOMDP(
        num_states=1,
        num_actions=n_actions,
        num_objectives=2,
        transitions=transitions,
        rewards=rewards,
        gamma=1.0,
        horizon=1,
    )


class TestEmpiricalReward:
    def test_initial_dirac_zero(self):
        er = EmpiricalReward(2)
        assert er.distribution() == dirac((0.0, 0.0))

    def test_counts_normalize(self):
        er = EmpiricalReward(2)
        er.observe((1.0, 0.0))
        er.observe((1.0, 0.0))
        er.observe((0.0, 1.0))
        d = er.distribution()
        assert d == pairs(((0, 1), 1 / 3), ((1, 0), 2 / 3))

    def test_change_detection(self):
        er = EmpiricalReward(2)
        assert er.observe((0.0, 0.0)) is False  # still the zero Dirac
        assert er.observe((1.0, 1.0)) is True
        er2 = EmpiricalReward(2)
        assert er2.observe((2.0, 3.0)) is True
        assert er2.observe((2.0, 3.0)) is False  # singleton repeat


class TestScoreSet:
    def test_mean_linear(self):
        qset = [dirac((2, 0)), dirac((0, 2))]
        assert score_set(qset, (0.5, 0.5)) == pytest.approx(1.0)

    def test_singleton(self):
        assert score_set([dirac((3, 1))], (1.0, 0.0)) == pytest.approx(3.0)

    def test_empty_is_minus_inf(self):
        assert score_set([], (0.5, 0.5)) == float("-inf")

    def test_shift_linearity(self):
        rng = np.random.default_rng(1)
        qset = [pairs(((1, 2), 0.5), ((3, 0), 0.5)), dirac((2, 2))]
        base = score_set(qset, (0.5, 0.5))
        shifted = [ReturnDistribution(d.atoms + 4.0, d.probs) for d in qset]
        assert score_set(shifted, (0.5, 0.5)) == pytest.approx(base + 4.0)


class TestSelectAction:
    def _table(self, scores):
        table = QSetTable(1, len(scores), 2)
        for a, v in enumerate(scores):
            if v is not None:
                table.q[(0, a)] = [dirac((v, v))]
        return table

    def test_pure_exploration_uniform(self):
        table = self._table([1.0, 100.0, 3.0])
        rng = np.random.default_rng(0)
        picks = [
            select_action(0, table, 1.0, (0.5, 0.5), rng) for _ in range(3000)
        ]
        freqs = np.bincount(picks, minlength=3) / 3000
        assert np.all(np.abs(freqs - 1 / 3) < 0.05)

    def test_greedy_argmax(self):
        table = self._table([2.0, 3.5])
        rng = np.random.default_rng(0)
        assert select_action(0, table, 0.0, (0.5, 0.5), rng) == 1

    def test_tie_breaks_low(self):
        table = self._table([2.0, 2.0])
        rng = np.random.default_rng(0)
        assert select_action(0, table, 0.0, (0.5, 0.5), rng) == 0

    def test_empty_sets_never_beat_nonempty(self):
        table = self._table([None, 0.0])
        rng = np.random.default_rng(0)
        assert select_action(0, table, 0.0, (0.5, 0.5), rng) == 1


class TestLimitSetSize:
    def test_noop_at_or_below_limit(self):
        qset = [dirac((0, 0)), dirac((5, 5))]
        assert limit_set_size(qset, 2) == qset
        assert limit_set_size(qset, None) == qset

    def test_near_atoms_merge_first(self):
        qset = [dirac((0, 0)), dirac((0.01, 0.01)), dirac((10, 10))]
        out = limit_set_size(qset, 2)
        keys = sorted(d.to_json() for d in out)
        merged = pairs(((0, 0), 0.5), ((0.01, 0.01), 0.5))
        # The two near point masses form one cluster; the far point mass
        # dominates their mixture, so only the nondominated representatives
        # survive.
        assert dirac((10, 10)).to_json() in keys
        assert len(out) <= 2

    def test_duplicates_merge_at_zero_distance(self):
        qset = [dirac((1, 1)), dirac((1, 1)), dirac((0, 5))]
        out = limit_set_size(qset, 2)
        assert len(out) == 2

    def test_medoid_representative(self):
        qset = [dirac((0, 0)), dirac((0.01, 0.01)), dirac((10, 10))]
        out = limit_set_size(qset, 2, representative="medoid")
        for d in out:
            assert len(d) == 1  # medoids are original members

    def test_pairwise_matrix_symmetric(self):
        rng = np.random.default_rng(3)
        dists = [dirac((i, 2 * i)) for i in range(4)]
        m = _pairwise_js_matrix(dists)
        assert np.allclose(m, m.T)
        assert np.all(np.diag(m) == 0)


class TestQBackup:
    def _tables(self, num_states=3, num_actions=1):
        return QSetTable(num_states, num_actions, 2)

    def _kernel(self, rows):
        n = len(rows)
        probs = np.zeros((n, 1, n))
        for s, row in enumerate(rows):
            for ns, p in row:
                probs[s, 0, ns] = p
        counts = np.ones((n, 1), dtype=np.int64)
        return TransitionEstimate(probs=probs, counts=counts, exact=True)

    def test_single_branch(self):
        tables = self._tables(2)
        kernel = self._kernel([[(1, 1.0)], [(1, 1.0)]])
        tables.nd[(0, 0, 1)] = [dirac((1, 0))]
        tables.reward(0, 0, 1).observe((1.0, 1.0))
        out = q_backup(0, 0, tables, kernel, gamma=1.0)
        assert out == [dirac((2, 1))]

    def test_two_branch_mixture(self):
        tables = self._tables(3)
        kernel = self._kernel([[(1, 0.5), (2, 0.5)], [(1, 1.0)], [(2, 1.0)]])
        tables.nd[(0, 0, 1)] = [dirac((2, 0))]
        tables.nd[(0, 0, 2)] = [dirac((0, 2))]
        tables.reward(0, 0, 1).observe((0.0, 0.0))
        tables.reward(0, 0, 2).observe((0.0, 0.0))
        out = q_backup(0, 0, tables, kernel, gamma=1.0)
        assert out == [pairs(((0, 2), 0.5), ((2, 0), 0.5))]

    def test_cartesian_product_count(self):
        tables = self._tables(3)
        kernel = self._kernel([[(1, 0.5), (2, 0.5)], [(1, 1.0)], [(2, 1.0)]])
        # Incomparable branch sets keep every combination alive: 2 * 3 = 6.
        tables.nd[(0, 0, 1)] = [dirac((8, 0)), dirac((0, 8))]
        tables.nd[(0, 0, 2)] = [dirac((4, 0)), dirac((0, 4)), dirac((2, 2))]
        tables.reward(0, 0, 1).observe((0.0, 0.0))
        tables.reward(0, 0, 2).observe((0.0, 100.0))
        out = q_backup(0, 0, tables, kernel, gamma=1.0)
        assert len(out) == 6

    def test_empty_nd_uses_reward_only(self):
        tables = self._tables(2)
        kernel = self._kernel([[(1, 1.0)], [(1, 1.0)]])
        tables.reward(0, 0, 1).observe((3.0, 4.0))
        out = q_backup(0, 0, tables, kernel, gamma=0.7)
        assert out == [dirac((3, 4))]

    def test_missing_kernel_entry(self):
        tables = self._tables(2)
        probs = np.zeros((2, 1, 2))
        kernel = TransitionEstimate(probs=probs, counts=np.zeros((2, 1), dtype=np.int64))
        with pytest.raises(ValueError):
            q_backup(0, 0, tables, kernel, gamma=1.0)


class TestTrain:
    def test_forced_backup(self):
        momdp = single_state_momdp([dirac((1, 2))])
        out = train(momdp, LearnerConfig(episodes=25, exact_kernel=True, seed=0))
        assert out.dists() == [dirac((1, 2))]

    def test_two_actions_both_kept(self):
        momdp = single_state_momdp([dirac((1, 0)), dirac((0, 1))])
        out = train(momdp, LearnerConfig(episodes=80, exact_kernel=True, seed=1))
        assert sorted(d.to_json() for d in out.dists()) == sorted(
            d.to_json() for d in (dirac((0, 1)), dirac((1, 0)))
        )

    def test_qsets_stay_nondominated_and_limited(self):
        from distmo.momdp import generate, small_config

        momdp = generate(small_config(seed=21))
        learner = Learner(momdp, LearnerConfig(
            episodes=60, random_walks=500, set_limit=4, seed=2
        ))
        result = learner.train()
        assert len(result) >= 1
        for qset in learner.tables.q.values():
            assert len(qset) <= 4
            for d in qset:
                assert abs(d.probs.sum() - 1.0) <= 1e-9
                assert np.all(d.atoms == np.round(d.atoms, 3))
            for i, x in enumerate(qset):
                for j, y in enumerate(qset):
                    if i != j:
                        assert not distributionally_dominates(x, y)

    def test_determinism(self):
        from distmo.momdp import generate, small_config

        momdp = generate(small_config(seed=8))
        cfg = LearnerConfig(episodes=120, random_walks=800, set_limit=6, seed=3)
        assert train(momdp, cfg).to_json() == train(momdp, cfg).to_json()

    def test_epsilon_schedule(self):
        momdp = single_state_momdp([dirac((1, 2))])
        learner = Learner(momdp, LearnerConfig(
            episodes=100, epsilon_start=1.0, epsilon_end=0.05,
            epsilon_decay_fraction=0.8, exact_kernel=True,
        ))
        assert learner.epsilon_at(0) == pytest.approx(1.0)
        assert learner.epsilon_at(40) == pytest.approx(0.525)
        assert learner.epsilon_at(80) == pytest.approx(0.05)
        assert learner.epsilon_at(99) == pytest.approx(0.05)

    def test_checkpoint_resume_equivalent(self, tmp_path):
        from distmo.momdp import generate, small_config

        momdp = generate(small_config(seed=12))
        cfg = LearnerConfig(episodes=80, random_walks=400, set_limit=5, seed=4)
        straight = train(momdp, cfg)

        learner = Learner(momdp, cfg)
        learner.train(until_episode=40)
        path = tmp_path / "ckpt.json"
        learner.save_checkpoint(path)

        resumed = Learner.load_checkpoint(momdp, path)
        assert resumed.episode == 40
        final = resumed.train()
        assert final.to_json() == straight.to_json()
