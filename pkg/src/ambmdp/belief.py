"""Posterior belief updates and the predictive state distribution.

All three operations are pure functions of immutable inputs.  The posterior
is exact for finite parameter sets: new weights are proportional to
``likelihood(theta) * old_weight(theta)``.  When the total posterior mass of
an observation is zero the belief is returned unchanged; such branches carry
zero probability in every expectation, so the convention never affects
values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InfeasibleActionError
from .model import RENORM_LIMIT, SUM_TOL, Belief, StatisticalMDP


@dataclass(frozen=True)
class PredictiveDistribution:
    """Mixture distribution of the next state, with the posterior belief
    reached on observing each next state."""

    masses: np.ndarray
    posteriors: tuple[Belief, ...]

    def __post_init__(self):
        m = np.asarray(self.masses, dtype=float)
        if np.any(m < 0.0) or not np.all(np.isfinite(m)):
            raise ValueError("predictive masses must be non-negative and finite")
        if abs(float(m.sum()) - 1.0) > SUM_TOL:
            raise ValueError(f"predictive masses sum to {m.sum()!r}, not 1")
        if len(self.posteriors) != m.size:
            raise ValueError("one posterior belief required per next state")
        m = m.copy()
        m.flags.writeable = False
        object.__setattr__(self, "masses", m)


def _require_feasible(model: StatisticalMDP, epoch: int, state: int, action: int):
    if epoch < 0 or epoch >= model.horizon:
        raise ValueError(f"epoch {epoch} outside 0..{model.horizon - 1}")
    if action not in model.feasible[epoch][state]:
        raise InfeasibleActionError(
            f"action {model.actions[action]} is not feasible at epoch {epoch} "
            f"in state {model.states[state]}"
        )


def initial_posterior(model: StatisticalMDP, prior: Belief, state: int) -> Belief:
    """Belief after observing the initial state: weights proportional to
    ``initial_kernel[theta](state) * prior(theta)``.

    Returns the prior unchanged when the observation has zero mass under
    every parameter in the prior's support.
    """
    if len(prior) != model.n_params:
        raise ValueError("prior dimension does not match the parameter set")
    w = model.initial_kernel[:, state] * prior.weights
    total = float(w.sum())
    if total <= 0.0:
        return prior
    return Belief(w / total)


def update_posterior(
    model: StatisticalMDP,
    epoch: int,
    state: int,
    belief: Belief,
    action: int,
    next_state: int,
) -> Belief:
    """Posterior after taking ``action`` in ``state`` at ``epoch`` and
    observing ``next_state``; zero-mass observations leave the belief
    unchanged."""
    _require_feasible(model, epoch, state, action)
    w = model.transition[epoch, :, state, action, next_state] * belief.weights
    total = float(w.sum())
    if total <= 0.0:
        return belief
    return Belief(w / total)


def predictive(
    model: StatisticalMDP, epoch: int, state: int, belief: Belief, action: int
) -> PredictiveDistribution:
    """Distribution of the next state under the belief mixture, paired with
    the posterior reached at each next state.

    mass(x') = sum_theta belief(theta) * q[theta](x, a, x').
    """
    _require_feasible(model, epoch, state, action)
    rows = model.transition[epoch, :, state, action, :]
    masses = belief.weights @ rows
    total = float(masses.sum())
    if abs(total - 1.0) > SUM_TOL:
        if abs(total - 1.0) > RENORM_LIMIT:
            raise ValueError(
                f"predictive masses sum to {total}; model row sums are off by "
                f"more than {RENORM_LIMIT}"
            )
        masses = masses / total
    posteriors = []
    for x_next in range(model.n_states):
        w = rows[:, x_next] * belief.weights
        w_total = float(w.sum())
        posteriors.append(Belief(w / w_total) if w_total > 0.0 else belief)
    return PredictiveDistribution(masses, tuple(posteriors))
