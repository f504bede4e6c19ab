"""Shared builders for randomized test instances."""

from itertools import product

import numpy as np

from ambmdp.bayes import DeterministicPolicy, ReachableBeliefTree
from ambmdp.model import Belief, ParameterSet, StatisticalMDP


def random_model(
    rng: np.random.Generator,
    n_states: int | None = None,
    n_actions: int | None = None,
    horizon: int | None = None,
    n_params: int | None = None,
    cost_range: tuple[float, float] = (-2.0, 5.0),
    full_feasible: bool = False,
) -> StatisticalMDP:
    """Random fully-supported model: Dirichlet kernels (strictly positive
    almost surely), uniform costs, random non-empty feasible sets."""
    n_states = n_states if n_states is not None else int(rng.integers(2, 5))
    n_actions = n_actions if n_actions is not None else int(rng.integers(1, 4))
    horizon = horizon if horizon is not None else int(rng.integers(1, 4))
    n_params = n_params if n_params is not None else int(rng.integers(2, 4))

    feasible = []
    for _ in range(horizon):
        per_state = []
        for _ in range(n_states):
            if full_feasible:
                per_state.append(tuple(range(n_actions)))
            else:
                count = int(rng.integers(1, n_actions + 1))
                chosen = rng.choice(n_actions, size=count, replace=False)
                per_state.append(tuple(sorted(int(a) for a in chosen)))
        feasible.append(tuple(per_state))

    return StatisticalMDP(
        horizon=horizon,
        states=tuple(f"s{x}" for x in range(n_states)),
        actions=tuple(f"a{a}" for a in range(n_actions)),
        params=ParameterSet(tuple(f"t{k}" for k in range(n_params))),
        feasible=tuple(feasible),
        initial_kernel=rng.dirichlet(np.ones(n_states), size=n_params),
        transition=rng.dirichlet(
            np.ones(n_states), size=(horizon, n_params, n_states, n_actions)
        ),
        stage_cost=rng.uniform(*cost_range, size=(horizon, n_params, n_states, n_actions)),
        terminal_cost=rng.uniform(*cost_range, size=(n_params, n_states)),
    )


def random_belief(rng: np.random.Generator, size: int) -> Belief:
    return Belief(rng.dirichlet(np.ones(size)))


def policy_count(tree: ReachableBeliefTree) -> int:
    count = 1
    model = tree.model
    for node in tree.nodes:
        if node.epoch < model.horizon:
            count *= len(model.feasible[node.epoch][node.state])
    return count


def enumerate_policies(tree: ReachableBeliefTree) -> list[DeterministicPolicy]:
    """Every deterministic policy assignable on the tree's decision nodes."""
    model = tree.model
    decision_nodes = [n for n in tree.nodes if n.epoch < model.horizon]
    choices = [model.feasible[n.epoch][n.state] for n in decision_nodes]
    policies = []
    for combo in product(*choices):
        actions = {node.index: action for node, action in zip(decision_nodes, combo)}
        policies.append(DeterministicPolicy(tree=tree, actions=actions))
    return policies
