"""Finite statistical Markov decision process: data types and validation.

A statistical MDP is a finite-horizon MDP whose transition kernels and cost
functions depend on an unknown parameter drawn from a finite parameter set.
States, actions and parameters are referenced by integer index throughout the
package; human-readable labels are kept on the model for reporting.

Epoch convention: decision epochs are 0-based, ``n = 0 .. horizon-1``.
``transition[n]`` is the kernel applied *after* the epoch-``n`` decision,
i.e. the distribution of the state observed at epoch ``n+1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

SUM_TOL = 1e-12
RENORM_LIMIT = 1e-6


@dataclass(frozen=True)
class ParameterSet:
    """Finite set of parameter labels the model is ambiguous over."""

    labels: tuple[str, ...]

    def __post_init__(self):
        labels = tuple(str(x) for x in self.labels)
        if not labels:
            raise ValueError("parameter set must be non-empty")
        if len(set(labels)) != len(labels):
            raise ValueError("parameter labels must be unique")
        object.__setattr__(self, "labels", labels)

    def __len__(self) -> int:
        return len(self.labels)

    def index(self, label: str) -> int:
        return self.labels.index(label)


@dataclass(frozen=True, eq=False)
class Belief:
    """Probability vector over the parameter set.

    Weights are validated on construction: negatives are rejected, and the
    vector is renormalized when its sum drifts from 1 by more than 1e-12
    (rejected entirely beyond 1e-6).  This bounds float drift through
    repeated posterior composition.
    """

    weights: np.ndarray

    def __post_init__(self):
        w = np.array(self.weights, dtype=float)
        if w.ndim != 1 or w.size == 0:
            raise ValueError("belief weights must form a non-empty vector")
        if not np.all(np.isfinite(w)):
            raise ValueError("belief weights must be finite")
        if np.any(w < -SUM_TOL):
            raise ValueError(f"belief weights must be non-negative, got {w}")
        w = np.where(w < 0.0, 0.0, w)
        total = float(w.sum())
        if abs(total - 1.0) > RENORM_LIMIT:
            raise ValueError(f"belief weights sum to {total}, too far from 1")
        if abs(total - 1.0) > SUM_TOL:
            w = w / total
        w.flags.writeable = False
        object.__setattr__(self, "weights", w)

    @classmethod
    def uniform(cls, size: int) -> "Belief":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def point_mass(cls, size: int, index: int) -> "Belief":
        w = np.zeros(size)
        w[index] = 1.0
        return cls(w)

    def support(self) -> tuple[int, ...]:
        """Indices carrying strictly positive weight."""
        return tuple(int(i) for i in np.nonzero(self.weights > 0.0)[0])

    def __len__(self) -> int:
        return int(self.weights.size)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Belief):
            return NotImplemented
        return np.array_equal(self.weights, other.weights)

    def __repr__(self) -> str:
        return f"Belief({self.weights.tolist()})"


def _as_feasible(feasible, horizon: int, n_states: int, n_actions: int):
    out = []
    if len(feasible) != horizon:
        raise ValueError(f"feasible sets must cover {horizon} epochs, got {len(feasible)}")
    for n, per_state in enumerate(feasible):
        if len(per_state) != n_states:
            raise ValueError(f"feasible sets at epoch {n} must cover {n_states} states")
        row = []
        for x, acts in enumerate(per_state):
            acts = tuple(sorted(set(int(a) for a in acts)))
            if any(a < 0 or a >= n_actions for a in acts):
                raise ValueError(f"feasible action out of range at epoch {n}, state {x}")
            row.append(acts)
        out.append(tuple(row))
    return tuple(out)


@dataclass(frozen=True)
class StatisticalMDP:
    """Finite-horizon MDP with parameter-dependent kernels and costs.

    Attributes:
        horizon: number of decision epochs N (0 means terminal costs only)
        states, actions: label tuples defining the index spaces
        params: the parameter set the model is ambiguous over
        feasible: feasible[n][x] = sorted tuple of feasible action indices
        initial_kernel: (K, E) initial state distribution per parameter
        transition: (N, K, E, A, E); transition[n, k, x, a] is the state
            distribution after taking action a in state x at epoch n
        stage_cost: (N, K, E, A) per-epoch cost
        terminal_cost: (K, E) cost charged at epoch N
    """

    horizon: int
    states: tuple[str, ...]
    actions: tuple[str, ...]
    params: ParameterSet
    feasible: tuple[tuple[tuple[int, ...], ...], ...]
    initial_kernel: np.ndarray
    transition: np.ndarray
    stage_cost: np.ndarray
    terminal_cost: np.ndarray

    def __post_init__(self):
        if self.horizon < 0:
            raise ValueError("horizon must be a non-negative integer")
        states = tuple(str(s) for s in self.states)
        actions = tuple(str(a) for a in self.actions)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "actions", actions)
        n, k, e, a = self.horizon, len(self.params), len(states), len(actions)
        if e == 0 or a == 0:
            raise ValueError("state and action spaces must be non-empty")

        arrays = {
            "initial_kernel": (np.asarray(self.initial_kernel, dtype=float), (k, e)),
            "transition": (np.asarray(self.transition, dtype=float), (n, k, e, a, e)),
            "stage_cost": (np.asarray(self.stage_cost, dtype=float), (n, k, e, a)),
            "terminal_cost": (np.asarray(self.terminal_cost, dtype=float), (k, e)),
        }
        for name, (arr, shape) in arrays.items():
            if arr.shape != shape:
                raise ValueError(f"{name} must have shape {shape}, got {arr.shape}")
            arr = arr.copy()
            arr.flags.writeable = False
            object.__setattr__(self, name, arr)

        object.__setattr__(self, "feasible", _as_feasible(self.feasible, n, e, a))

    @classmethod
    def stationary(
        cls,
        horizon: int,
        states: Sequence[str],
        actions: Sequence[str],
        params: ParameterSet,
        feasible: Sequence[Sequence[int]],
        initial_kernel,
        transition,
        stage_cost,
        terminal_cost,
    ) -> "StatisticalMDP":
        """Build a model from single-epoch tables replicated across epochs."""
        trans = np.asarray(transition, dtype=float)
        stage = np.asarray(stage_cost, dtype=float)
        return cls(
            horizon=horizon,
            states=tuple(states),
            actions=tuple(actions),
            params=params,
            feasible=tuple(tuple(tuple(f) for f in feasible) for _ in range(horizon)),
            initial_kernel=initial_kernel,
            transition=np.broadcast_to(trans, (horizon,) + trans.shape),
            stage_cost=np.broadcast_to(stage, (horizon,) + stage.shape),
            terminal_cost=terminal_cost,
        )

    @property
    def n_states(self) -> int:
        return len(self.states)

    @property
    def n_actions(self) -> int:
        return len(self.actions)

    @property
    def n_params(self) -> int:
        return len(self.params)

    def feasible_actions(self, epoch: int, state: int) -> tuple[int, ...]:
        return self.feasible[epoch][state]

    def state_index(self, label: str) -> int:
        return self.states.index(label)

    def action_index(self, label: str) -> int:
        return self.actions.index(label)


def _check_row(diags: list[str], row: np.ndarray, where: str):
    if np.any(row < 0.0) or not np.all(np.isfinite(row)):
        diags.append(f"probability row has negative or non-finite entries ({where})")
        return
    total = float(row.sum())
    if abs(total - 1.0) > SUM_TOL:
        diags.append(f"probability row sums to {total!r}, not 1 within {SUM_TOL} ({where})")


def validate(model: StatisticalMDP) -> list[str]:
    """Check model invariants and return a diagnostic per violation.

    Returns an empty list iff the model is well formed.  Each diagnostic
    names the violated invariant and its location (epoch, parameter, state,
    action).  Rows for infeasible state/action pairs are not checked.
    """
    diags: list[str] = []
    thetas = model.params.labels

    for k in range(model.n_params):
        _check_row(diags, model.initial_kernel[k], f"initial kernel, theta={thetas[k]}")

    for n in range(model.horizon):
        for x in range(model.n_states):
            acts = model.feasible[n][x]
            if not acts:
                diags.append(
                    f"empty feasible action set (epoch {n}, state {model.states[x]})"
                )
                continue
            for a in acts:
                for k in range(model.n_params):
                    where = (
                        f"epoch {n}, theta={thetas[k]}, state {model.states[x]}, "
                        f"action {model.actions[a]}"
                    )
                    _check_row(diags, model.transition[n, k, x, a], where)
                    if not np.isfinite(model.stage_cost[n, k, x, a]):
                        diags.append(f"stage cost is not finite ({where})")

    for k in range(model.n_params):
        for x in range(model.n_states):
            if not np.isfinite(model.terminal_cost[k, x]):
                diags.append(
                    f"terminal cost is not finite (theta={thetas[k]}, "
                    f"state {model.states[x]})"
                )
    return diags


def cost_bounds(model: StatisticalMDP) -> tuple[float, float]:
    """Bracket the total cost by summing per-epoch extrema of the stage cost
    over feasible pairs, plus terminal extrema.

    The bracket is loose in general (it ignores reachability) but contains
    the expected total cost of every policy under every parameter.
    """
    lo = hi = 0.0
    for n in range(model.horizon):
        entries = [
            model.stage_cost[n, k, x, a]
            for x in range(model.n_states)
            for a in model.feasible[n][x]
            for k in range(model.n_params)
        ]
        lo += float(min(entries))
        hi += float(max(entries))
    lo += float(model.terminal_cost.min())
    hi += float(model.terminal_cost.max())
    return lo, hi
