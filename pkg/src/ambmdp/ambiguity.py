"""Outer prior optimization and saddle-point assembly.

Each solver maximizes a concave function of the prior whose inner value is
an exact Bayes solve:

* entropic mode maximizes  inner(mu) - relative_entropy(mu, base)/gamma
  over the simplex restricted to the base prior's support;
* avar mode maximizes  inner(mu)  over the density-capped polytope of the
  AVaR dual;
* robust mode maximizes  inner(mu)  over the whole simplex on a given
  support (no penalty).

The optimal policy is the Bayes-optimal policy at the maximizing prior, and
the duality gap reported is the direct risk evaluation of that policy's
cost profile minus the outer value.  With two parameters the outer problem
is a 1-D concave line search (golden section); with more parameters a
coarse simplex lattice is refined by pairwise coordinate search, which is a
documented approximation knob.

Plateaus: the inner value is piecewise linear in the prior, so the argmax
can be an interval.  The returned prior is then the feasible maximizer
closest to the base prior, pushed a small offset (at most 1e-4) into the
plateau interior so that the tie-broken deterministic policy at the
returned prior is the saddle policy; the untouched plateau edges are
reported alongside.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .bayes import (
    DEFAULT_NODE_CAP,
    DeterministicPolicy,
    bayes_cost,
    policy_cost_profile,
    solve_bayes,
)
from .model import Belief, StatisticalMDP
from .risk import avar_quantile, entropic_risk, relative_entropy
from .search import (
    golden_section_max,
    lattice_parts,
    plateau_edges,
    refine_coordinate_pairs,
    simplex_lattice,
)

#: value slack used to decide that two outer values belong to one plateau
PLATEAU_VALUE_TOL = 1e-9
#: plateaus narrower than this are treated as a unique maximizer
PLATEAU_UNIQUE_WIDTH = 1e-8
#: largest offset used to move the returned prior off a plateau edge
PLATEAU_MARGIN = 1e-4
#: simplex-lattice size budget for three or more parameters
LATTICE_BUDGET = 300


@dataclass
class SaddleResult:
    """Saddle-point solve output.

    ``worst_prior_lo`` / ``worst_prior_hi`` bracket the maximizer set along
    the search line when it is an interval (two-parameter case); both equal
    ``worst_prior`` when the maximizer is unique.  ``trace`` records every
    candidate prior evaluated with its outer objective value.
    """

    mode: str
    worst_prior: Belief
    worst_prior_lo: Belief
    worst_prior_hi: Belief
    policy: DeterministicPolicy
    value: float
    gap: float
    gamma: float | None
    base_prior: Belief | None
    support: tuple[int, ...]
    cost_profile: np.ndarray
    trace: tuple[tuple[Belief, float], ...]


@dataclass
class SaddleCertificate:
    """Numerical saddle-point checks: no feasible prior improves on the
    returned one against the returned policy (prior side), and the policy
    is Bayes-optimal at the returned prior (policy side)."""

    mu_side_ok: bool
    mu_side_violation: float
    pi_side_ok: bool
    pi_side_error: float
    gap: float
    grid_points: int
    tol: float


def entropic_objective(
    model: StatisticalMDP,
    base_prior: Belief,
    gamma: float,
    candidate: Belief,
    node_cap: int = DEFAULT_NODE_CAP,
) -> float:
    """Penalized outer objective: optimal Bayes cost at the candidate prior
    minus relative_entropy(candidate, base)/gamma; -inf off the base's
    support."""
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    rel = relative_entropy(candidate, base_prior)
    if rel == math.inf:
        return -math.inf
    return solve_bayes(model, candidate, node_cap=node_cap).value - rel / gamma


def _pair_belief(size: int, i: int, j: int, t: float) -> Belief:
    w = np.zeros(size)
    w[i] = t
    w[j] = 1.0 - t
    return Belief(w)


def _embed(size: int, support: Sequence[int], w: np.ndarray) -> Belief:
    full = np.zeros(size)
    for pos, k in enumerate(support):
        full[k] = w[pos]
    return Belief(full)


def _pick_in_plateau(left: float, right: float, reference: float) -> tuple[float, float, float]:
    """Returned argument plus snapped interval edges for a maximizer set
    [left, right]: the midpoint when the set is effectively a point, else
    the point of the interior closest to the reference."""
    if right - left <= PLATEAU_UNIQUE_WIDTH:
        mid = 0.5 * (left + right)
        return mid, mid, mid
    margin = min(0.25 * (right - left), PLATEAU_MARGIN)
    return min(max(reference, left + margin), right - margin), left, right


def _finish(
    model: StatisticalMDP,
    mode: str,
    mu_star: Belief,
    mu_lo: Belief,
    mu_hi: Belief,
    value: float,
    gamma: float | None,
    base_prior: Belief | None,
    support: tuple[int, ...],
    trace: list[tuple[Belief, float]],
    node_cap: int,
) -> SaddleResult:
    solution = solve_bayes(model, mu_star, node_cap=node_cap)
    profile = policy_cost_profile(model, solution.policy)
    if mode == "entropic":
        dual = entropic_risk(profile, base_prior, gamma)
    elif mode == "avar":
        dual = avar_quantile(profile, base_prior, gamma)
    else:
        dual = float(profile[list(support)].max())
    raw_gap = dual - value
    if raw_gap < -1e-10:
        raise RuntimeError(
            f"weak duality violated (gap {raw_gap}); this indicates a defect "
            "in the outer search or the risk evaluation"
        )
    return SaddleResult(
        mode=mode,
        worst_prior=mu_star,
        worst_prior_lo=mu_lo,
        worst_prior_hi=mu_hi,
        policy=solution.policy,
        value=value,
        gap=max(raw_gap, 0.0),
        gamma=gamma,
        base_prior=base_prior,
        support=support,
        cost_profile=profile,
        trace=tuple(trace),
    )


def _maximize_on_line(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    tol: float,
    reference: float | None,
    locate_plateau: bool,
) -> tuple[float, float, float, float]:
    """Maximize concave f on [lo, hi]; returns (argument, value, plateau
    left, plateau right).  With locate_plateau the argmax interval is
    bracketed and the argument is placed per _pick_in_plateau."""
    t_hat, v_hat, _ = golden_section_max(f, lo, hi, tol)
    if not locate_plateau:
        return t_hat, v_hat, t_hat, t_hat
    left, right = plateau_edges(f, lo, hi, t_hat, v_hat, PLATEAU_VALUE_TOL)
    # a located edge can strictly beat the golden estimate when the true
    # maximizer sits on the feasible boundary; re-locate from there
    candidates = [(t_hat, v_hat), (left, f(left)), (right, f(right))]
    best_t, best_v = max(candidates, key=lambda tv: tv[1])
    if best_v > v_hat + 0.25 * PLATEAU_VALUE_TOL:
        left, right = plateau_edges(f, lo, hi, best_t, best_v, PLATEAU_VALUE_TOL)
    ref = best_t if reference is None else reference
    t_star, left, right = _pick_in_plateau(left, right, ref)
    return t_star, f(t_star), left, right


def solve_entropic(
    model: StatisticalMDP,
    base_prior: Belief,
    gamma: float,
    tol: float = 1e-6,
    node_cap: int = DEFAULT_NODE_CAP,
) -> SaddleResult:
    """Worst-case prior and Bayes-optimal policy under the entropic
    penalty.  The penalty is strictly convex, so the maximizer is unique
    and no plateau handling is needed."""
    if gamma <= 0.0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if len(base_prior) != model.n_params:
        raise ValueError("base prior dimension does not match the parameter set")
    support = base_prior.support()
    trace: list[tuple[Belief, float]] = []

    def phi(candidate: Belief) -> float:
        value = entropic_objective(model, base_prior, gamma, candidate, node_cap)
        trace.append((candidate, value))
        return value

    if len(support) == 1:
        mu_star = base_prior
        value = phi(mu_star)
    elif len(support) == 2:
        i, j = support

        def f(t: float) -> float:
            return phi(_pair_belief(model.n_params, i, j, t))

        t_star, value, _, _ = _maximize_on_line(f, 0.0, 1.0, tol, None, False)
        mu_star = _pair_belief(model.n_params, i, j, t_star)
    else:
        w_star, value = _maximize_on_lattice(
            lambda w: phi(_embed(model.n_params, support, w)),
            n_coords=len(support),
            lower=np.zeros(len(support)),
            upper=np.ones(len(support)),
            tol=tol,
        )
        mu_star = _embed(model.n_params, support, w_star)

    return _finish(
        model, "entropic", mu_star, mu_star, mu_star, value, gamma, base_prior,
        support, trace, node_cap,
    )


def _maximize_on_lattice(
    f: Callable[[np.ndarray], float],
    n_coords: int,
    lower: np.ndarray,
    upper: np.ndarray,
    tol: float,
) -> tuple[np.ndarray, float]:
    parts = lattice_parts(n_coords, math.ceil(1.0 / math.sqrt(tol)), LATTICE_BUDGET)
    best_w = None
    best_v = -math.inf
    for w in simplex_lattice(n_coords, parts):
        if np.any(w < lower - 1e-12) or np.any(w > upper + 1e-12):
            continue
        v = f(w)
        if v > best_v:
            best_w, best_v = w, v
    if best_w is None:
        best_w = np.clip((lower + upper) / 2.0, 0.0, None)
        best_w = best_w / best_w.sum()
        best_v = f(best_w)
    return refine_coordinate_pairs(f, best_w, lower, upper, tol)


def solve_avar(
    model: StatisticalMDP,
    base_prior: Belief,
    gamma: float,
    tol: float = 1e-6,
    node_cap: int = DEFAULT_NODE_CAP,
) -> SaddleResult:
    """Worst-case prior over the AVaR ambiguity polytope (densities against
    the base capped at 1/(1-gamma)) and the Bayes-optimal policy there."""
    if not 0.0 < gamma < 1.0:
        raise ValueError(f"gamma must lie in (0, 1), got {gamma}")
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if len(base_prior) != model.n_params:
        raise ValueError("base prior dimension does not match the parameter set")
    support = base_prior.support()
    caps = base_prior.weights / (1.0 - gamma)
    trace: list[tuple[Belief, float]] = []

    def psi(candidate: Belief) -> float:
        value = solve_bayes(model, candidate, node_cap=node_cap).value
        trace.append((candidate, value))
        return value

    if len(support) == 1:
        mu_star = mu_lo = mu_hi = base_prior
        value = psi(mu_star)
    elif len(support) == 2:
        i, j = support
        lo = max(0.0, 1.0 - float(caps[j]))
        hi = min(1.0, float(caps[i]))

        def f(t: float) -> float:
            return psi(_pair_belief(model.n_params, i, j, t))

        t_star, value, left, right = _maximize_on_line(
            f, lo, hi, tol, reference=float(base_prior.weights[i]), locate_plateau=True
        )
        mu_star = _pair_belief(model.n_params, i, j, t_star)
        mu_lo = _pair_belief(model.n_params, i, j, left)
        mu_hi = _pair_belief(model.n_params, i, j, right)
    else:
        sub_caps = np.array([caps[k] for k in support])
        w_hat, v_hat = _maximize_on_lattice(
            lambda w: psi(_embed(model.n_params, support, w)),
            n_coords=len(support),
            lower=np.zeros(len(support)),
            upper=sub_caps,
            tol=tol,
        )
        w_base = np.array([base_prior.weights[k] for k in support])
        w_star = _toward_reference(
            lambda w: psi(_embed(model.n_params, support, w)), w_hat, v_hat, w_base
        )
        mu_star = _embed(model.n_params, support, w_star)
        mu_lo = mu_hi = mu_star
        value = psi(mu_star)

    return _finish(
        model, "avar", mu_star, mu_lo, mu_hi, value, gamma, base_prior,
        support, trace, node_cap,
    )


def _toward_reference(
    f: Callable[[np.ndarray], float],
    w_hat: np.ndarray,
    v_hat: float,
    reference: np.ndarray,
) -> np.ndarray:
    """Earliest point on the segment reference -> w_hat that attains the
    maximum value (within plateau tolerance), nudged slightly toward w_hat.
    Approximates 'closest feasible maximizer to the base prior' for three
    or more parameters."""

    def g(s: float) -> float:
        return f((1.0 - s) * reference + s * w_hat)

    left, _ = plateau_edges(g, 0.0, 1.0, 1.0, v_hat, PLATEAU_VALUE_TOL)
    s_star, _, _ = _pick_in_plateau(left, 1.0, left)
    return (1.0 - s_star) * reference + s_star * w_hat


def solve_robust(
    model: StatisticalMDP,
    support: Sequence[int] | None = None,
    tol: float = 1e-6,
    node_cap: int = DEFAULT_NODE_CAP,
) -> SaddleResult:
    """Worst-case prior over the whole simplex on the given parameter
    indices (every parameter when omitted); no penalty term.  On plateaus
    the lowest maximizer along the search line is returned."""
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    if support is None:
        support = tuple(range(model.n_params))
    support = tuple(sorted(set(int(k) for k in support)))
    if not support or support[-1] >= model.n_params:
        raise ValueError(f"invalid support {support}")
    trace: list[tuple[Belief, float]] = []

    def psi(candidate: Belief) -> float:
        value = solve_bayes(model, candidate, node_cap=node_cap).value
        trace.append((candidate, value))
        return value

    if len(support) == 1:
        mu_star = mu_lo = mu_hi = Belief.point_mass(model.n_params, support[0])
        value = psi(mu_star)
    elif len(support) == 2:
        i, j = support

        def f(t: float) -> float:
            return psi(_pair_belief(model.n_params, i, j, t))

        t_star, value, left, right = _maximize_on_line(
            f, 0.0, 1.0, tol, reference=0.0, locate_plateau=True
        )
        mu_star = _pair_belief(model.n_params, i, j, t_star)
        mu_lo = _pair_belief(model.n_params, i, j, left)
        mu_hi = _pair_belief(model.n_params, i, j, right)
    else:
        w_star, value = _maximize_on_lattice(
            lambda w: psi(_embed(model.n_params, support, w)),
            n_coords=len(support),
            lower=np.zeros(len(support)),
            upper=np.ones(len(support)),
            tol=tol,
        )
        mu_star = mu_lo = mu_hi = _embed(model.n_params, support, w_star)

    return _finish(
        model, "robust", mu_star, mu_lo, mu_hi, value, None, None,
        support, trace, node_cap,
    )


def _feasible_grid(result: SaddleResult, model: StatisticalMDP, resolution: float):
    """Candidate priors covering the feasible set of the solved mode."""
    support = result.support
    size = model.n_params
    if result.mode == "avar":
        caps = result.base_prior.weights / (1.0 - result.gamma)
    else:
        caps = np.ones(size)
    if len(support) == 1:
        yield Belief.point_mass(size, support[0])
        return
    if len(support) == 2:
        i, j = support
        lo = max(0.0, 1.0 - float(caps[j]))
        hi = min(1.0, float(caps[i]))
        steps = max(1, math.ceil((hi - lo) / resolution))
        for m in range(steps + 1):
            yield _pair_belief(size, i, j, lo + (hi - lo) * m / steps)
        return
    parts = lattice_parts(len(support), math.ceil(1.0 / resolution), 500)
    sub_caps = np.array([caps[k] for k in support])
    for w in simplex_lattice(len(support), parts):
        if np.all(w <= sub_caps + 1e-12):
            yield _embed(size, support, w)


def certify_saddle(
    model: StatisticalMDP,
    result: SaddleResult,
    grid_resolution: float = 1e-3,
    tol: float = 1e-6,
    node_cap: int = DEFAULT_NODE_CAP,
) -> SaddleCertificate:
    """Check the returned pair numerically.

    Prior side: against the returned policy's cost profile, no feasible
    prior on a grid improves the penalized objective by more than ``tol``
    over its value at the returned prior.  Policy side: the returned
    policy's Bayes cost at the returned prior matches a fresh Bayes solve
    within 1e-10.
    """
    profile = result.cost_profile

    def lagrangian(mu: Belief) -> float:
        value = float(mu.weights @ profile)
        if result.mode == "entropic":
            rel = relative_entropy(mu, result.base_prior)
            if rel == math.inf:
                return -math.inf
            value -= rel / result.gamma
        return value

    l_star = lagrangian(result.worst_prior)
    violation = -math.inf
    count = 0
    for mu in _feasible_grid(result, model, grid_resolution):
        violation = max(violation, lagrangian(mu) - l_star)
        count += 1

    resolve = solve_bayes(model, result.worst_prior, node_cap=node_cap)
    pi_error = abs(
        bayes_cost(model, result.policy, result.worst_prior) - resolve.value
    )
    return SaddleCertificate(
        mu_side_ok=bool(violation <= tol),
        mu_side_violation=float(violation),
        pi_side_ok=bool(pi_error <= 1e-10),
        pi_side_error=float(pi_error),
        gap=result.gap,
        grid_points=count,
        tol=tol,
    )
