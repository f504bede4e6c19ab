"""Independent verification engines for per-parameter policy cost.

``enumerate_cost`` walks every positive-probability trajectory forward and
sums probability-weighted total costs; it shares no recursion with the
backward induction in ``bayes.evaluate_policy`` and is the primary
anti-bug oracle for it.  ``mc_estimate`` is a seeded Monte-Carlo rollout
cross-check.

Random source: NumPy ``default_rng`` seeded through ``SeedSequence(seed)``,
with one spawned child sequence per batch, consumed in batch order.  The
same seed and inputs always reproduce the same estimate.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .bayes import DeterministicPolicy
from .errors import BranchCoverageError, PolicyTreeMismatchError, TrajectoryLimitError
from .model import StatisticalMDP

DEFAULT_TRAJECTORY_CAP = 1_000_000

#: normal-approximation quantile for 95% confidence half-widths
Z_95 = 1.96


@dataclass(frozen=True)
class TrajectoryRecord:
    """One realizable state/action path with its probability and cost."""

    sequence: tuple[str, ...]
    probability: float
    total_cost: float


def _roots_by_state(policy: DeterministicPolicy) -> dict[int, int]:
    return {policy.tree.nodes[idx].state: idx for idx, _ in policy.tree.roots}


def enumerate_cost(
    model: StatisticalMDP,
    theta: int,
    policy: DeterministicPolicy,
    trajectory_cap: int = DEFAULT_TRAJECTORY_CAP,
) -> tuple[float, list[TrajectoryRecord]]:
    """Exact policy cost under the theta-kernel by exhaustive enumeration of
    positive-probability trajectories.

    Raises TrajectoryLimitError when more than ``trajectory_cap``
    trajectories would be produced.
    """
    tree = policy.tree
    if tree.model is not model:
        raise PolicyTreeMismatchError("policy was built for a different model")
    if theta < 0 or theta >= model.n_params:
        raise ValueError(f"parameter index {theta} out of range")

    records: list[TrajectoryRecord] = []
    roots = _roots_by_state(policy)
    init = model.initial_kernel[theta]

    def descend(node_index: int, prob: float, cost: float, seq: tuple[str, ...]):
        node = tree.nodes[node_index]
        if node.epoch == model.horizon:
            if len(records) >= trajectory_cap:
                raise TrajectoryLimitError(trajectory_cap)
            records.append(
                TrajectoryRecord(
                    sequence=seq,
                    probability=prob,
                    total_cost=cost + float(model.terminal_cost[theta, node.state]),
                )
            )
            return
        action = policy.action_at(node_index)
        row = model.transition[node.epoch, theta, node.state, action]
        by_state = {x: child for x, child, _ in node.children.get(action, ())}
        cost = cost + float(model.stage_cost[node.epoch, theta, node.state, action])
        seq = seq + (model.actions[action],)
        for x_next in np.nonzero(row > 0.0)[0]:
            child = by_state.get(int(x_next))
            if child is None:
                raise BranchCoverageError(
                    f"state {model.states[int(x_next)]} reachable under "
                    f"theta={model.params.labels[theta]} was pruned from the tree"
                )
            descend(child, prob * float(row[x_next]), cost, seq + (model.states[int(x_next)],))

    for x in np.nonzero(init > 0.0)[0]:
        root = roots.get(int(x))
        if root is None:
            raise BranchCoverageError(
                f"initial state {model.states[int(x)]} reachable under "
                f"theta={model.params.labels[theta]} was pruned from the tree"
            )
        descend(root, float(init[x]), 0.0, (model.states[int(x)],))

    value = sum(r.probability * r.total_cost for r in records)
    return float(value), records


def _sampler_tables(model: StatisticalMDP, theta: int, policy: DeterministicPolicy):
    """Per-node cumulative successor distributions under the theta-kernel,
    built lazily while sampling."""
    tree = policy.tree
    tables: dict[int, tuple[np.ndarray, np.ndarray, float, bool]] = {}

    def table(node_index: int):
        cached = tables.get(node_index)
        if cached is not None:
            return cached
        node = tree.nodes[node_index]
        terminal = node.epoch == model.horizon
        if terminal:
            entry = (np.empty(0), np.empty(0, dtype=int),
                     float(model.terminal_cost[theta, node.state]), True)
        else:
            action = policy.action_at(node_index)
            row = model.transition[node.epoch, theta, node.state, action]
            by_state = {x: child for x, child, _ in node.children.get(action, ())}
            states = np.nonzero(row > 0.0)[0]
            children = []
            for x_next in states:
                child = by_state.get(int(x_next))
                if child is None:
                    raise BranchCoverageError(
                        f"state {model.states[int(x_next)]} reachable under "
                        f"theta={model.params.labels[theta]} was pruned from the tree"
                    )
                children.append(child)
            probs = row[states]
            cumulative = np.cumsum(probs / probs.sum())
            cumulative[-1] = 1.0  # guard searchsorted against one-ulp undershoot
            entry = (
                cumulative,
                np.asarray(children, dtype=int),
                float(model.stage_cost[node.epoch, theta, node.state, action]),
                False,
            )
        tables[node_index] = entry
        return entry

    return table


def mc_estimate(
    model: StatisticalMDP,
    theta: int,
    policy: DeterministicPolicy,
    samples: int,
    seed: int,
    batch_size: int = 10_000,
) -> tuple[float, float]:
    """Seeded Monte-Carlo estimate of the policy cost under the
    theta-kernel: (sample mean, 95% normal-approximation half-width).

    Batches use seeds spawned from ``SeedSequence(seed)`` and are combined
    in batch order, so identical inputs give identical output.
    """
    tree = policy.tree
    if tree.model is not model:
        raise PolicyTreeMismatchError("policy was built for a different model")
    if samples < 1:
        raise ValueError("samples must be at least 1")

    init = model.initial_kernel[theta]
    root_states = np.nonzero(init > 0.0)[0]
    roots = _roots_by_state(policy)
    for x in root_states:
        if int(x) not in roots:
            raise BranchCoverageError(
                f"initial state {model.states[int(x)]} reachable under "
                f"theta={model.params.labels[theta]} was pruned from the tree"
            )
    root_probs = init[root_states]
    root_cum = np.cumsum(root_probs / root_probs.sum())
    root_cum[-1] = 1.0
    root_nodes = np.asarray([roots[int(x)] for x in root_states], dtype=int)
    table = _sampler_tables(model, theta, policy)

    n_batches = (samples + batch_size - 1) // batch_size
    seeds = np.random.SeedSequence(seed).spawn(n_batches)
    total = 0.0
    total_sq = 0.0
    remaining = samples
    for batch_seed in seeds:
        rng = np.random.default_rng(batch_seed)
        count = min(batch_size, remaining)
        remaining -= count
        for _ in range(count):
            node = int(root_nodes[int(np.searchsorted(root_cum, rng.random()))])
            cost = 0.0
            while True:
                cumulative, children, step_cost, terminal = table(node)
                cost += step_cost
                if terminal:
                    break
                node = int(children[int(np.searchsorted(cumulative, rng.random()))])
            total += cost
            total_sq += cost * cost

    mean = total / samples
    if samples == 1:
        return mean, 0.0
    variance = max(0.0, (total_sq - samples * mean * mean) / (samples - 1))
    return mean, Z_95 * (variance / samples) ** 0.5
