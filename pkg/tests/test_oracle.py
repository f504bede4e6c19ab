import numpy as np
import pytest
from helpers import random_belief, random_model

from ambmdp import seqtest
from ambmdp.bayes import evaluate_policy, solve_bayes
from ambmdp.errors import TrajectoryLimitError
from ambmdp.model import Belief, ParameterSet, StatisticalMDP
from ambmdp.oracle import enumerate_cost, mc_estimate


def chain_model():
    """Deterministic two-step chain s0 -> s1 -> s2 with unit stage costs."""
    params = ParameterSet(("t0",))
    n_e, n_a, horizon = 3, 1, 2
    transition = np.zeros((horizon, 1, n_e, n_a, n_e))
    transition[0, 0, :, 0, 1] = 1.0
    transition[1, 0, :, 0, 2] = 1.0
    model = StatisticalMDP(
        horizon=horizon,
        states=("s0", "s1", "s2"),
        actions=("a0",),
        params=params,
        feasible=tuple((((0,),) * n_e) for _ in range(horizon)),
        initial_kernel=np.array([[1.0, 0.0, 0.0]]),
        transition=transition,
        stage_cost=np.ones((horizon, 1, n_e, n_a)),
        terminal_cost=np.array([[0.0, 0.0, 0.5]]),
    )
    return model


class TestEnumerateCost:
    def test_zero_horizon_averages_terminal_cost(self):
        model = StatisticalMDP(
            horizon=0,
            states=("s0", "s1"),
            actions=("a0",),
            params=ParameterSet(("t0",)),
            feasible=(),
            initial_kernel=np.array([[0.25, 0.75]]),
            transition=np.zeros((0, 1, 2, 1, 2)),
            stage_cost=np.zeros((0, 1, 2, 1)),
            terminal_cost=np.array([[1.0, 3.0]]),
        )
        solution = solve_bayes(model, Belief.uniform(1))
        value, records = enumerate_cost(model, 0, solution.policy)
        assert value == pytest.approx(0.25 * 1.0 + 0.75 * 3.0, abs=1e-15)
        assert len(records) == 2

    def test_deterministic_chain_single_trajectory(self):
        model = chain_model()
        solution = solve_bayes(model, Belief.uniform(1))
        value, records = enumerate_cost(model, 0, solution.policy)
        assert len(records) == 1
        record = records[0]
        assert record.probability == 1.0
        assert record.total_cost == pytest.approx(2.5, abs=1e-15)
        assert record.sequence == ("s0", "a0", "s1", "a0", "s2")
        assert value == pytest.approx(2.5, abs=1e-15)

    def test_matches_backward_induction_on_seqtest(self, bench_model):
        solution = solve_bayes(bench_model, seqtest.prior_belief(0.5))
        for theta in range(2):
            value, _ = enumerate_cost(bench_model, theta, solution.policy)
            assert value == pytest.approx(
                evaluate_policy(bench_model, theta, solution.policy), abs=1e-12
            )

    def test_matches_backward_induction_on_random_models(self, rng):
        for _ in range(30):
            model = random_model(rng)
            prior = random_belief(rng, model.n_params)
            solution = solve_bayes(model, prior)
            theta = int(rng.integers(model.n_params))
            value, records = enumerate_cost(model, theta, solution.policy)
            assert value == pytest.approx(
                evaluate_policy(model, theta, solution.policy), abs=1e-12
            )
            total = sum(r.probability for r in records)
            assert total == pytest.approx(1.0, abs=1e-10)

    def test_trajectory_cap_guard(self, rng):
        model = random_model(rng, n_states=4, n_actions=2, horizon=3)
        solution = solve_bayes(model, random_belief(rng, model.n_params))
        with pytest.raises(TrajectoryLimitError, match="3"):
            enumerate_cost(model, 0, solution.policy, trajectory_cap=3)


class TestMcEstimate:
    def test_reproducible_for_fixed_seed(self, bench_model):
        # prior 0.5 lies in the continue region, so trajectories are random
        solution = solve_bayes(bench_model, seqtest.prior_belief(0.5))
        first = mc_estimate(bench_model, 0, solution.policy, samples=500, seed=11)
        second = mc_estimate(bench_model, 0, solution.policy, samples=500, seed=11)
        assert first == second
        third = mc_estimate(bench_model, 0, solution.policy, samples=500, seed=12)
        assert third != first

    def test_zero_cost_model(self, rng):
        model = random_model(rng, cost_range=(0.0, 0.0))
        solution = solve_bayes(model, random_belief(rng, model.n_params))
        assert mc_estimate(model, 0, solution.policy, samples=200, seed=3) == (0.0, 0.0)

    def test_deterministic_chain_has_zero_width(self):
        model = chain_model()
        solution = solve_bayes(model, Belief.uniform(1))
        mean, half = mc_estimate(model, 0, solution.policy, samples=50, seed=5)
        assert mean == pytest.approx(2.5, abs=1e-15)
        assert half == 0.0

    def test_mean_close_to_exact_with_many_samples(self, bench_model):
        solution = solve_bayes(bench_model, seqtest.prior_belief(0.5))
        exact, _ = enumerate_cost(bench_model, 1, solution.policy)
        mean, half = mc_estimate(bench_model, 1, solution.policy, samples=100_000, seed=0)
        assert abs(mean - exact) <= half
        assert half < 0.1

    def test_interval_coverage_rate(self, bench_model):
        # 95% intervals should cover the exact value in at least 93 of 100
        # seeded repetitions
        solution = solve_bayes(bench_model, seqtest.prior_belief(0.5))
        exact, _ = enumerate_cost(bench_model, 0, solution.policy)
        covered = 0
        for seed in range(100):
            mean, half = mc_estimate(bench_model, 0, solution.policy, samples=2000, seed=seed)
            if abs(mean - exact) <= half:
                covered += 1
        assert covered >= 93

    def test_sample_count_validation(self, bench_model):
        solution = solve_bayes(bench_model, seqtest.prior_belief(0.5))
        with pytest.raises(ValueError, match="samples"):
            mc_estimate(bench_model, 0, solution.policy, samples=0, seed=1)

    def test_batch_split_covers_every_sample(self):
        # zero-variance chain: any batch partition must average exactly 2.5
        model = chain_model()
        solution = solve_bayes(model, Belief.uniform(1))
        for batch_size in (1, 7, 50, 10_000):
            mean, half = mc_estimate(
                model, 0, solution.policy, samples=23, seed=2, batch_size=batch_size
            )
            assert mean == pytest.approx(2.5, abs=1e-15)
            assert half == 0.0
