import numpy as np
import pytest
from helpers import random_belief, random_model

from ambmdp import seqtest
from ambmdp.bayes import build_tree, evaluate_policy, solve_bayes
from ambmdp.model import Belief, ParameterSet, StatisticalMDP, cost_bounds, validate


def two_state_model(row=(0.5, 0.5)):
    params = ParameterSet(("t0", "t1"))
    transition = np.empty((1, 2, 2, 1, 2))
    transition[...] = np.array(row)
    return StatisticalMDP(
        horizon=1,
        states=("s0", "s1"),
        actions=("a0",),
        params=params,
        feasible=(((0,), (0,)),),
        initial_kernel=np.array([[1.0, 0.0], [0.0, 1.0]]),
        transition=transition,
        stage_cost=np.ones((1, 2, 2, 1)),
        terminal_cost=np.zeros((2, 2)),
    )


class TestParameterSet:
    def test_labels_must_be_unique(self):
        with pytest.raises(ValueError, match="unique"):
            ParameterSet(("a", "a"))

    def test_must_be_non_empty(self):
        with pytest.raises(ValueError, match="non-empty"):
            ParameterSet(())

    def test_index(self):
        assert ParameterSet(("x", "y")).index("y") == 1


class TestBelief:
    def test_rejects_negative_weights(self):
        with pytest.raises(ValueError, match="non-negative"):
            Belief(np.array([-0.1, 1.1]))

    def test_rejects_far_from_simplex(self):
        with pytest.raises(ValueError, match="sum"):
            Belief(np.array([0.7, 0.7]))

    def test_renormalizes_small_drift(self):
        drift = 1e-9
        b = Belief(np.array([0.5 + drift, 0.5]))
        assert b.weights.sum() == pytest.approx(1.0, abs=1e-15)

    def test_point_mass_and_support(self):
        b = Belief.point_mass(3, 1)
        assert b.support() == (1,)
        assert Belief.uniform(4).support() == (0, 1, 2, 3)

    def test_weights_are_read_only(self):
        b = Belief.uniform(2)
        with pytest.raises(ValueError):
            b.weights[0] = 0.3


class TestValidate:
    def test_well_formed_model_has_no_diagnostics(self):
        assert validate(two_state_model()) == []

    def test_bad_row_sum_is_located(self):
        model = two_state_model()
        transition = model.transition.copy()
        transition[0, 0, 0, 0] = [0.5, 0.4]
        broken = StatisticalMDP(
            horizon=1,
            states=model.states,
            actions=model.actions,
            params=model.params,
            feasible=model.feasible,
            initial_kernel=model.initial_kernel,
            transition=transition,
            stage_cost=model.stage_cost,
            terminal_cost=model.terminal_cost,
        )
        diags = validate(broken)
        assert len(diags) == 1
        assert "sums to" in diags[0]
        assert "epoch 0" in diags[0] and "theta=t0" in diags[0]
        assert "state s0" in diags[0] and "action a0" in diags[0]

    def test_empty_feasible_set_is_reported(self):
        model = two_state_model()
        broken = StatisticalMDP(
            horizon=1,
            states=model.states,
            actions=model.actions,
            params=model.params,
            feasible=(((), (0,)),),
            initial_kernel=model.initial_kernel,
            transition=model.transition,
            stage_cost=model.stage_cost,
            terminal_cost=model.terminal_cost,
        )
        diags = validate(broken)
        assert len(diags) == 1
        assert "empty feasible" in diags[0] and "state s0" in diags[0]

    def test_non_finite_cost_is_reported(self):
        model = two_state_model()
        stage = model.stage_cost.copy()
        stage[0, 1, 0, 0] = np.nan
        broken = StatisticalMDP(
            horizon=1,
            states=model.states,
            actions=model.actions,
            params=model.params,
            feasible=model.feasible,
            initial_kernel=model.initial_kernel,
            transition=model.transition,
            stage_cost=stage,
            terminal_cost=model.terminal_cost,
        )
        assert any("stage cost" in d and "theta=t1" in d for d in validate(broken))

    def test_random_models_are_valid_and_solvable(self, rng):
        for _ in range(10):
            model = random_model(rng)
            assert validate(model) == []
            prior = random_belief(rng, model.n_params)
            solve_bayes(model, prior)  # must not raise


class TestCostBounds:
    def test_seqtest_brackets_trajectory_extrema(self):
        # true per-trajectory extrema for two observations then a forced
        # declaration: best 0, worst 1 + 1 + 10
        model = seqtest.build_model(seqtest.SeqTestConfig(horizon=2))
        lo, hi = cost_bounds(model)
        assert lo <= 0.0 and hi >= 12.0

    def test_zero_cost_model(self):
        model = two_state_model()
        zero = StatisticalMDP(
            horizon=1,
            states=model.states,
            actions=model.actions,
            params=model.params,
            feasible=model.feasible,
            initial_kernel=model.initial_kernel,
            transition=model.transition,
            stage_cost=np.zeros_like(model.stage_cost),
            terminal_cost=np.zeros_like(model.terminal_cost),
        )
        assert cost_bounds(zero) == (0.0, 0.0)

    def test_single_epoch_bounds(self):
        # stage costs 2 and 5 for the two actions, terminal cost 1
        params = ParameterSet(("t0",))
        transition = np.full((1, 1, 1, 2, 1), 1.0)
        model = StatisticalMDP(
            horizon=1,
            states=("s0",),
            actions=("a0", "a1"),
            params=params,
            feasible=(((0, 1),),),
            initial_kernel=np.array([[1.0]]),
            transition=transition,
            stage_cost=np.array([[[[2.0, 5.0]]]]),
            terminal_cost=np.array([[1.0]]),
        )
        assert cost_bounds(model) == (3.0, 6.0)

    def test_bounds_bracket_every_policy_value(self, rng):
        from helpers import enumerate_policies, policy_count

        for _ in range(5):
            model = random_model(rng, n_states=2, n_actions=2, horizon=2, n_params=2)
            lo, hi = cost_bounds(model)
            tree = build_tree(model, random_belief(rng, 2))
            if policy_count(tree) > 64:
                continue
            for policy in enumerate_policies(tree):
                for theta in range(model.n_params):
                    value = evaluate_policy(model, theta, policy)
                    assert lo - 1e-9 <= value <= hi + 1e-9


class TestConstruction:
    def test_shape_mismatch_raises(self):
        with pytest.raises(ValueError, match="initial_kernel"):
            StatisticalMDP(
                horizon=1,
                states=("s0",),
                actions=("a0",),
                params=ParameterSet(("t0",)),
                feasible=(((0,),),),
                initial_kernel=np.ones((2, 1)),
                transition=np.ones((1, 1, 1, 1, 1)),
                stage_cost=np.zeros((1, 1, 1, 1)),
                terminal_cost=np.zeros((1, 1)),
            )

    def test_stationary_replicates_tables(self):
        params = ParameterSet(("t0", "t1"))
        model = StatisticalMDP.stationary(
            horizon=3,
            states=("s0", "s1"),
            actions=("a0",),
            params=params,
            feasible=((0,), (0,)),
            initial_kernel=np.array([[1.0, 0.0], [0.0, 1.0]]),
            transition=np.full((2, 2, 1, 2), 0.5),
            stage_cost=np.ones((2, 2, 1)),
            terminal_cost=np.zeros((2, 2)),
        )
        assert model.horizon == 3
        assert validate(model) == []
        assert np.array_equal(model.transition[0], model.transition[2])
        assert model.feasible[0] == model.feasible[2]

    def test_zero_horizon_model_is_allowed(self):
        params = ParameterSet(("t0",))
        model = StatisticalMDP(
            horizon=0,
            states=("s0", "s1"),
            actions=("a0",),
            params=params,
            feasible=(),
            initial_kernel=np.array([[0.25, 0.75]]),
            transition=np.zeros((0, 1, 2, 1, 2)),
            stage_cost=np.zeros((0, 1, 2, 1)),
            terminal_cost=np.array([[1.0, 3.0]]),
        )
        assert validate(model) == []
        assert cost_bounds(model) == (1.0, 3.0)
