"""Batch front end: flat key-value config files, solver dispatch, and
machine-readable artifacts.

Config files are line-oriented ``key = value`` text with ``#`` comments and
dotted key sections (``model.*``, ``solver.*``, ``sweep.*``, ``output.*``).
Numeric values accept rational literals such as ``13/30``, parsed exactly
before conversion to float.  Unknown keys are rejected with their line
number.

Commands (see README for the full key reference):

    solve    --config FILE [--out FILE]      modes bayes|entropic|avar|robust
    figure   --config FILE [--out FILE]      modes figure-entropic|figure-avar
    simulate --config FILE [--seed N] [--samples N] [--dump-trajectories FILE]

Exit status: 0 on success, 1 on configuration errors, 2 when a solver
guard (tree or trajectory cap) refuses the run.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import numpy as np

from . import seqtest
from .ambiguity import (
    SaddleCertificate,
    SaddleResult,
    certify_saddle,
    solve_avar,
    solve_entropic,
    solve_robust,
)
from .bayes import DEFAULT_NODE_CAP, DeterministicPolicy, ValueSolution, solve_bayes
from .errors import ConfigError, TrajectoryLimitError, TreeSizeLimitError
from .model import Belief, ParameterSet, StatisticalMDP, validate
from .oracle import DEFAULT_TRAJECTORY_CAP, enumerate_cost, mc_estimate

SOLVE_MODES = ("bayes", "entropic", "avar", "robust")
FIGURE_MODES = ("figure-entropic", "figure-avar")
ALL_MODES = SOLVE_MODES + FIGURE_MODES + ("simulate",)

ENTROPIC_FIGURE_HEADER = ("gamma", "prior", "worst_prior", "value")
AVAR_FIGURE_HEADER = ("gamma", "prior", "worst_prior_lo", "worst_prior_hi", "value")
TRAJECTORY_HEADER = ("trajectory", "probability", "total_cost")


@dataclass
class RunConfig:
    mode: str
    model: StatisticalMDP
    model_name: str
    prior: Belief | None
    gamma: float | None
    tol: float
    node_cap: int
    trajectory_cap: int
    gamma_sweep: tuple[float, ...] | None
    prior_sweep: tuple[float, ...] | None
    samples: int
    seed: int
    theta: int | None
    out_path: str | None


class _Entries:
    """Config key table that tracks consumption for unknown-key detection."""

    def __init__(self, text: str):
        self.values: dict[str, tuple[str, int]] = {}
        for lineno, raw in enumerate(text.splitlines(), start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            if not key:
                raise ConfigError(f"line {lineno}: empty key")
            if key in self.values:
                first = self.values[key][1]
                raise ConfigError(
                    f"line {lineno}: duplicate key {key} (first set on line {first})"
                )
            self.values[key] = (value, lineno)
        self.consumed: set[str] = set()

    def take(self, key: str, default: str | None = None, required: bool = False):
        if key in self.values:
            self.consumed.add(key)
            return self.values[key]
        if required:
            raise ConfigError(f"missing required key {key}")
        return (default, 0) if default is not None else (None, 0)

    def take_prefixed(self, prefix: str):
        out = []
        for key in sorted(self.values):
            if key.startswith(prefix):
                self.consumed.add(key)
                out.append((key, *self.values[key]))
        return out

    def forbid(self, key: str, reason: str):
        if key in self.values:
            _, lineno = self.values[key]
            raise ConfigError(f"line {lineno}: {key}: {reason}")

    def reject_unknown(self):
        unknown = sorted(set(self.values) - self.consumed)
        if unknown:
            lines = ", ".join(
                f"{key} (line {self.values[key][1]})" for key in unknown
            )
            raise ConfigError(f"unknown keys: {lines}")


def _err(lineno: int, key: str, message: str) -> ConfigError:
    where = f"line {lineno}: " if lineno else ""
    return ConfigError(f"{where}{key}: {message}")


def _number(key: str, raw: str, lineno: int) -> float:
    try:
        return float(Fraction(raw))
    except (ValueError, ZeroDivisionError):
        raise _err(lineno, key, f"not a number or rational literal: {raw!r}") from None


def _integer(key: str, raw: str, lineno: int) -> int:
    try:
        return int(raw)
    except ValueError:
        raise _err(lineno, key, f"not an integer: {raw!r}") from None


def _number_list(key: str, raw: str, lineno: int) -> list[float]:
    parts = raw.replace(",", " ").split()
    if not parts:
        raise _err(lineno, key, "empty value")
    return [_number(key, part, lineno) for part in parts]


def _labels(key: str, raw: str, lineno: int) -> tuple[str, ...]:
    parts = tuple(raw.split())
    if not parts:
        raise _err(lineno, key, "empty label list")
    if len(set(parts)) != len(parts):
        raise _err(lineno, key, "labels must be unique")
    return parts


def _sweep_values(key: str, raw: str, lineno: int) -> tuple[float, ...]:
    """Either a whitespace/comma list or an inclusive range start:stop:step,
    expanded with exact rational arithmetic."""
    if ":" in raw:
        pieces = raw.split(":")
        if len(pieces) != 3:
            raise _err(lineno, key, f"range must be start:stop:step, got {raw!r}")
        try:
            start, stop, step = (Fraction(p.strip()) for p in pieces)
        except (ValueError, ZeroDivisionError):
            raise _err(lineno, key, f"bad range literal: {raw!r}") from None
        if step <= 0 or stop < start:
            raise _err(lineno, key, "range requires step > 0 and stop >= start")
        values = []
        current = start
        while current <= stop:
            values.append(float(current))
            current += step
        return tuple(values)
    return tuple(_number_list(key, raw, lineno))


def _parse_seqtest_model(entries: _Entries) -> StatisticalMDP:
    fields = {}
    raw, lineno = entries.take("model.horizon", default="1")
    fields["horizon"] = _integer("model.horizon", raw, lineno)
    if fields["horizon"] < 0:
        raise _err(lineno, "model.horizon", "must be >= 0")
    for key, attr, check, what in (
        ("model.observation_cost", "observation_cost", lambda v: v >= 0, ">= 0"),
        ("model.error_cost", "error_cost", lambda v: v >= 0, ">= 0"),
        ("model.p_low", "p_low", lambda v: 0 < v < 1, "strictly inside (0, 1)"),
        ("model.p_high", "p_high", lambda v: 0 < v < 1, "strictly inside (0, 1)"),
    ):
        default = str(getattr(seqtest.DEFAULT_CONFIG, attr))
        raw, lineno = entries.take(key, default=default)
        value = _number(key, raw, lineno)
        if not check(value):
            raise _err(lineno, key, f"must be {what}, got {value}")
        fields[attr] = value
    return seqtest.build_model(seqtest.SeqTestConfig(**fields))


def _parse_inline_model(entries: _Entries) -> StatisticalMDP:
    raw, lineno = entries.take("model.horizon", required=True)
    horizon = _integer("model.horizon", raw, lineno)
    if horizon < 1:
        raise _err(lineno, "model.horizon", "must be >= 1")
    raw, lineno = entries.take("model.states", required=True)
    states = _labels("model.states", raw, lineno)
    raw, lineno = entries.take("model.actions", required=True)
    actions = _labels("model.actions", raw, lineno)
    raw, lineno = entries.take("model.params", required=True)
    params = _labels("model.params", raw, lineno)
    n_e, n_a, n_k = len(states), len(actions), len(params)

    def state_of(token, key, lineno):
        if token not in states:
            raise _err(lineno, key, f"unknown state {token!r}")
        return states.index(token)

    def action_of(token, key, lineno):
        if token not in actions:
            raise _err(lineno, key, f"unknown action {token!r}")
        return actions.index(token)

    def param_of(token, key, lineno):
        if token not in params:
            raise _err(lineno, key, f"unknown parameter {token!r}")
        return params.index(token)

    def epochs_of(token, key, lineno):
        if token == "*":
            return range(horizon)
        epoch = _integer(key, token, lineno)
        if not 0 <= epoch < horizon:
            raise _err(lineno, key, f"epoch {epoch} outside 0..{horizon - 1}")
        return (epoch,)

    initial = np.zeros((n_k, n_e))
    seen_initial = set()
    for key, raw, lineno in entries.take_prefixed("model.initial."):
        k = param_of(key.removeprefix("model.initial."), key, lineno)
        row = _number_list(key, raw, lineno)
        if len(row) != n_e:
            raise _err(lineno, key, f"expected {n_e} probabilities, got {len(row)}")
        initial[k] = row
        seen_initial.add(k)
    missing = [params[k] for k in range(n_k) if k not in seen_initial]
    if missing:
        raise ConfigError(f"missing model.initial.<param> for: {', '.join(missing)}")

    feasible = [[list(range(n_a)) for _ in range(n_e)] for _ in range(horizon)]
    explicit: dict[tuple[int, int], list[int]] = {}
    for key, raw, lineno in entries.take_prefixed("model.feasible."):
        tail = key.removeprefix("model.feasible.").split(".")
        if len(tail) != 2:
            raise _err(lineno, key, "expected model.feasible.<epoch>.<state>")
        x = state_of(tail[1], key, lineno)
        acts = [action_of(tok, key, lineno) for tok in raw.split()]
        for n in epochs_of(tail[0], key, lineno):
            explicit[(n, x)] = acts
    for (n, x), acts in explicit.items():
        feasible[n][x] = acts

    # infeasible rows keep a valid filler distribution; validation skips them
    transition = np.zeros((horizon, n_k, n_e, n_a, n_e))
    transition[..., 0] = 1.0
    assigned = np.zeros((horizon, n_k, n_e, n_a), dtype=bool)
    for key, raw, lineno in entries.take_prefixed("model.transition."):
        tail = key.removeprefix("model.transition.").split(".")
        if len(tail) != 4:
            raise _err(lineno, key, "expected model.transition.<epoch>.<param>.<state>.<action>")
        k = param_of(tail[1], key, lineno)
        x = state_of(tail[2], key, lineno)
        a = action_of(tail[3], key, lineno)
        row = _number_list(key, raw, lineno)
        if len(row) != n_e:
            raise _err(lineno, key, f"expected {n_e} probabilities, got {len(row)}")
        for n in epochs_of(tail[0], key, lineno):
            transition[n, k, x, a] = row
            assigned[n, k, x, a] = True

    stage = np.zeros((horizon, n_k, n_e, n_a))
    for key, raw, lineno in entries.take_prefixed("model.cost."):
        tail = key.removeprefix("model.cost.").split(".")
        if len(tail) != 4:
            raise _err(lineno, key, "expected model.cost.<epoch>.<param>.<state>.<action>")
        k = param_of(tail[1], key, lineno)
        x = state_of(tail[2], key, lineno)
        a = action_of(tail[3], key, lineno)
        value = _number(key, raw, lineno)
        for n in epochs_of(tail[0], key, lineno):
            stage[n, k, x, a] = value

    terminal = np.zeros((n_k, n_e))
    for key, raw, lineno in entries.take_prefixed("model.terminal."):
        k = param_of(key.removeprefix("model.terminal."), key, lineno)
        row = _number_list(key, raw, lineno)
        if len(row) != n_e:
            raise _err(lineno, key, f"expected {n_e} costs, got {len(row)}")
        terminal[k] = row

    for n in range(horizon):
        for x in range(n_e):
            for a in feasible[n][x]:
                for k in range(n_k):
                    if not assigned[n, k, x, a]:
                        raise ConfigError(
                            "missing model.transition row for epoch "
                            f"{n}, param {params[k]}, state {states[x]}, "
                            f"action {actions[a]}"
                        )

    return StatisticalMDP(
        horizon=horizon,
        states=states,
        actions=actions,
        params=ParameterSet(params),
        feasible=tuple(tuple(tuple(acts) for acts in per_state) for per_state in feasible),
        initial_kernel=initial,
        transition=transition,
        stage_cost=stage,
        terminal_cost=terminal,
    )


def _parse_prior(entries: _Entries, model: StatisticalMDP) -> Belief:
    raw, lineno = entries.take("prior", required=True)
    values = _number_list("prior", raw, lineno)
    if len(values) == 1 and model.n_params == 2:
        mu = values[0]
        if not 0.0 <= mu <= 1.0:
            raise _err(lineno, "prior", f"scalar prior must lie in [0, 1], got {mu}")
        values = [mu, 1.0 - mu]
    if len(values) != model.n_params:
        raise _err(
            lineno, "prior",
            f"expected {model.n_params} weights (or a scalar for two parameters)",
        )
    try:
        return Belief(np.array(values))
    except ValueError as exc:
        raise _err(lineno, "prior", str(exc)) from None


def parse_config(text: str) -> RunConfig:
    """Parse and validate a config file; raises ConfigError with line and
    field information on any defect, including model invariant violations."""
    entries = _Entries(text)

    raw, lineno = entries.take("mode", required=True)
    mode = raw.strip()
    if mode not in ALL_MODES:
        raise _err(lineno, "mode", f"must be one of {', '.join(ALL_MODES)}")

    raw, lineno = entries.take("model.name", default="seqtest")
    model_name = raw.strip()
    if model_name == "seqtest":
        model = _parse_seqtest_model(entries)
    elif model_name == "inline":
        model = _parse_inline_model(entries)
    else:
        raise _err(lineno, "model.name", f"must be 'seqtest' or 'inline', got {raw!r}")

    diagnostics = validate(model)
    if diagnostics:
        listing = "; ".join(diagnostics)
        raise ConfigError(f"model failed validation: {listing}")

    raw, lineno = entries.take("solver.tol", default="1e-6")
    tol = _number("solver.tol", raw, lineno)
    if tol <= 0:
        raise _err(lineno, "solver.tol", "must be positive")
    raw, lineno = entries.take("solver.node_cap", default=str(DEFAULT_NODE_CAP))
    node_cap = _integer("solver.node_cap", raw, lineno)
    raw, lineno = entries.take(
        "solver.trajectory_cap", default=str(DEFAULT_TRAJECTORY_CAP)
    )
    trajectory_cap = _integer("solver.trajectory_cap", raw, lineno)
    raw, _ = entries.take("output.path")
    out_path = raw

    gamma = None
    if mode in ("entropic", "avar"):
        raw, lineno = entries.take("solver.gamma", required=True)
        gamma = _number("solver.gamma", raw, lineno)
        if mode == "entropic" and gamma <= 0:
            raise _err(lineno, "solver.gamma", "entropic mode requires gamma > 0")
        if mode == "avar" and not 0 < gamma < 1:
            raise _err(lineno, "solver.gamma", "avar mode requires gamma in (0, 1)")
    else:
        entries.forbid("solver.gamma", f"not allowed in mode {mode}")

    gamma_sweep = prior_sweep = None
    if mode in FIGURE_MODES:
        entries.forbid("prior", "figure modes take sweep.prior instead")
        if model.n_params != 2:
            raise ConfigError("figure modes require a two-parameter model")
        raw, lineno = entries.take("sweep.gamma", required=True)
        gamma_sweep = _sweep_values("sweep.gamma", raw, lineno)
        upper = math.inf if mode == "figure-entropic" else 1.0
        for value in gamma_sweep:
            if value < 0 or value >= upper:
                raise _err(
                    lineno, "sweep.gamma",
                    f"values must lie in [0, {upper}), got {value}",
                )
        raw, lineno = entries.take("sweep.prior", required=True)
        prior_sweep = _sweep_values("sweep.prior", raw, lineno)
        for value in prior_sweep:
            if not 0 <= value <= 1:
                raise _err(lineno, "sweep.prior", f"values must lie in [0, 1], got {value}")
        prior = None
    else:
        for key in ("sweep.gamma", "sweep.prior"):
            entries.forbid(key, f"not allowed in mode {mode}")
        prior = _parse_prior(entries, model)

    samples, seed, theta = 10_000, 0, None
    if mode == "simulate":
        raw, lineno = entries.take("simulate.theta", required=True)
        label = raw.strip()
        if label not in model.params.labels:
            raise _err(
                lineno, "simulate.theta",
                f"unknown parameter {label!r}; expected one of {model.params.labels}",
            )
        theta = model.params.index(label)
        raw, lineno = entries.take("simulate.samples", default="10000")
        samples = _integer("simulate.samples", raw, lineno)
        if samples < 1:
            raise _err(lineno, "simulate.samples", "must be >= 1")
        raw, lineno = entries.take("simulate.seed", default="0")
        seed = _integer("simulate.seed", raw, lineno)
    else:
        for key in ("simulate.theta", "simulate.samples", "simulate.seed"):
            entries.forbid(key, f"not allowed in mode {mode}")

    entries.reject_unknown()
    return RunConfig(
        mode=mode,
        model=model,
        model_name=model_name,
        prior=prior,
        gamma=gamma,
        tol=tol,
        node_cap=node_cap,
        trajectory_cap=trajectory_cap,
        gamma_sweep=gamma_sweep,
        prior_sweep=prior_sweep,
        samples=samples,
        seed=seed,
        theta=theta,
        out_path=out_path,
    )


def _fmt(value: float) -> str:
    return f"{value:.12g}"


def policy_rows(policy: DeterministicPolicy) -> list[dict]:
    tree = policy.tree
    rows = []
    for index in sorted(policy.actions):
        node = tree.nodes[index]
        rows.append(
            {
                "epoch": node.epoch,
                "state": tree.model.states[node.state],
                "belief": node.belief.weights.tolist(),
                "action": tree.model.actions[policy.actions[index]],
            }
        )
    rows.sort(key=lambda r: (r["epoch"], r["state"], r["belief"]))
    return rows


def certificate_to_dict(cert: SaddleCertificate) -> dict:
    return {
        "mu_side_ok": cert.mu_side_ok,
        "mu_side_violation": cert.mu_side_violation,
        "pi_side_ok": cert.pi_side_ok,
        "pi_side_error": cert.pi_side_error,
        "gap": cert.gap,
        "grid_points": cert.grid_points,
        "tol": cert.tol,
    }


def saddle_to_dict(result: SaddleResult, cert: SaddleCertificate | None) -> dict:
    return {
        "mode": result.mode,
        "gamma": result.gamma,
        "value": result.value,
        "gap": result.gap,
        "base_prior": None
        if result.base_prior is None
        else result.base_prior.weights.tolist(),
        "worst_prior": result.worst_prior.weights.tolist(),
        "worst_prior_lo": result.worst_prior_lo.weights.tolist(),
        "worst_prior_hi": result.worst_prior_hi.weights.tolist(),
        "support": list(result.support),
        "cost_profile": result.cost_profile.tolist(),
        "policy": policy_rows(result.policy),
        "certificate": None if cert is None else certificate_to_dict(cert),
        "trace": [[mu.weights.tolist(), value] for mu, value in result.trace],
    }


def bayes_to_dict(solution: ValueSolution) -> dict:
    return {
        "mode": "bayes",
        "value": solution.value,
        "prior": solution.tree.prior.weights.tolist(),
        "nodes": len(solution.tree),
        "policy": policy_rows(solution.policy),
    }


def _write_json(path: str, payload: dict):
    Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _run_solve(config: RunConfig, out_path: str | None, stdout) -> None:
    if config.mode == "bayes":
        solution = solve_bayes(config.model, config.prior, node_cap=config.node_cap)
        payload = bayes_to_dict(solution)
        print(f"bayes value = {_fmt(solution.value)}", file=stdout)
        print(f"policy rows = {len(payload['policy'])}", file=stdout)
    else:
        if config.mode == "entropic":
            result = solve_entropic(
                config.model, config.prior, config.gamma,
                tol=config.tol, node_cap=config.node_cap,
            )
        elif config.mode == "avar":
            result = solve_avar(
                config.model, config.prior, config.gamma,
                tol=config.tol, node_cap=config.node_cap,
            )
        else:
            result = solve_robust(
                config.model, support=config.prior.support(),
                tol=config.tol, node_cap=config.node_cap,
            )
        cert = certify_saddle(config.model, result, node_cap=config.node_cap)
        payload = saddle_to_dict(result, cert)
        print(f"{result.mode} value = {_fmt(result.value)}", file=stdout)
        print(f"worst prior = {[_fmt(w) for w in result.worst_prior.weights]}", file=stdout)
        print(f"duality gap = {_fmt(result.gap)}", file=stdout)
        print(
            f"certificate: prior side {'ok' if cert.mu_side_ok else 'FAILED'}, "
            f"policy side {'ok' if cert.pi_side_ok else 'FAILED'}",
            file=stdout,
        )
    if out_path:
        _write_json(out_path, payload)
        print(f"wrote {out_path}", file=stdout)


def _figure_rows(config: RunConfig) -> list[tuple]:
    model = config.model
    rows = []
    for prior_weight in sorted(config.prior_sweep):
        prior = Belief(np.array([prior_weight, 1.0 - prior_weight]))
        baseline = None
        for gamma in sorted(config.gamma_sweep):
            if gamma == 0.0:
                # the gamma = 0 value is defined as the plain expectation path
                if baseline is None:
                    baseline = solve_bayes(model, prior, node_cap=config.node_cap).value
                if config.mode == "figure-entropic":
                    rows.append((gamma, prior_weight, prior_weight, baseline))
                else:
                    rows.append((gamma, prior_weight, prior_weight, prior_weight, baseline))
                continue
            if config.mode == "figure-entropic":
                result = solve_entropic(
                    model, prior, gamma, tol=config.tol, node_cap=config.node_cap
                )
                rows.append(
                    (gamma, prior_weight, float(result.worst_prior.weights[0]), result.value)
                )
            else:
                result = solve_avar(
                    model, prior, gamma, tol=config.tol, node_cap=config.node_cap
                )
                rows.append(
                    (
                        gamma,
                        prior_weight,
                        float(result.worst_prior_lo.weights[0]),
                        float(result.worst_prior_hi.weights[0]),
                        result.value,
                    )
                )
    return rows


def _run_figure(config: RunConfig, out_path: str | None, stdout) -> None:
    if not out_path:
        raise ConfigError("figure modes require output.path (or --out)")
    header = (
        ENTROPIC_FIGURE_HEADER
        if config.mode == "figure-entropic"
        else AVAR_FIGURE_HEADER
    )
    rows = _figure_rows(config)
    with open(out_path, "w", newline="") as handle:
        writer = csv.writer(handle)
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])
    print(f"wrote {out_path} ({len(rows)} rows)", file=stdout)


def _run_simulate(
    config: RunConfig, out_path: str | None, dump_path: str | None, stdout
) -> None:
    solution = solve_bayes(config.model, config.prior, node_cap=config.node_cap)
    exact, records = enumerate_cost(
        config.model, config.theta, solution.policy,
        trajectory_cap=config.trajectory_cap,
    )
    mean, half_width = mc_estimate(
        config.model, config.theta, solution.policy,
        samples=config.samples, seed=config.seed,
    )
    label = config.model.params.labels[config.theta]
    print(f"policy: Bayes-optimal at prior, value = {_fmt(solution.value)}", file=stdout)
    print(f"exact cost under {label} = {_fmt(exact)} ({len(records)} trajectories)", file=stdout)
    print(
        f"monte carlo ({config.samples} samples, seed {config.seed}): "
        f"{_fmt(mean)} +/- {_fmt(half_width)}",
        file=stdout,
    )
    if dump_path:
        with open(dump_path, "w", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(TRAJECTORY_HEADER)
            for record in records:
                writer.writerow(
                    [" ".join(record.sequence), _fmt(record.probability), _fmt(record.total_cost)]
                )
        print(f"wrote {dump_path} ({len(records)} trajectories)", file=stdout)
    if out_path:
        _write_json(
            out_path,
            {
                "mode": "simulate",
                "theta": label,
                "bayes_value": solution.value,
                "exact_cost": exact,
                "mc_mean": mean,
                "mc_half_width_95": half_width,
                "samples": config.samples,
                "seed": config.seed,
                "trajectories": len(records),
            },
        )
        print(f"wrote {out_path}", file=stdout)


def run(
    config: RunConfig,
    out_path: str | None = None,
    dump_path: str | None = None,
    stdout=None,
) -> None:
    """Execute a parsed configuration, writing artifacts as requested.
    Raises ConfigError or the solver guard exceptions; the command-line
    wrapper maps those to exit codes."""
    stdout = stdout or sys.stdout
    out_path = out_path or config.out_path
    if config.mode in SOLVE_MODES:
        _run_solve(config, out_path, stdout)
    elif config.mode in FIGURE_MODES:
        _run_figure(config, out_path, stdout)
    else:
        _run_simulate(config, out_path, dump_path, stdout)


def _load(path: str) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    return parse_config(text)


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="ambmdp",
        description="Finite-horizon Bayesian MDP solver with ambiguity aversion",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    solve_cmd = commands.add_parser("solve", help="run a single solver mode")
    solve_cmd.add_argument("--config", required=True)
    solve_cmd.add_argument("--out", default=None)

    figure_cmd = commands.add_parser("figure", help="sweep gamma/prior grids to CSV")
    figure_cmd.add_argument("--config", required=True)
    figure_cmd.add_argument("--out", default=None)

    simulate_cmd = commands.add_parser("simulate", help="Monte-Carlo cross-check")
    simulate_cmd.add_argument("--config", required=True)
    simulate_cmd.add_argument("--seed", type=int, default=None)
    simulate_cmd.add_argument("--samples", type=int, default=None)
    simulate_cmd.add_argument("--dump-trajectories", default=None)

    args = parser.parse_args(argv)
    try:
        config = _load(args.config)
        expected = {
            "solve": SOLVE_MODES,
            "figure": FIGURE_MODES,
            "simulate": ("simulate",),
        }[args.command]
        if config.mode not in expected:
            raise ConfigError(
                f"command {args.command} requires mode in {expected}, "
                f"config has {config.mode}"
            )
        if args.command == "simulate":
            if args.seed is not None:
                config.seed = args.seed
            if args.samples is not None:
                if args.samples < 1:
                    raise ConfigError("--samples must be >= 1")
                config.samples = args.samples
            run(config, out_path=None, dump_path=args.dump_trajectories)
        else:
            run(config, out_path=args.out)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except (TreeSizeLimitError, TrajectoryLimitError) as exc:
        print(f"solver guard: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
