"""Derivative-free maximizers used by the outer prior optimization.

Everything here assumes a concave objective: golden-section search over an
interval, bisection to the edges of a value-level plateau, and a coarse
simplex lattice followed by pairwise coordinate refinement for more than
two coordinates.
"""

from __future__ import annotations

import math
from itertools import combinations
from typing import Callable, Iterator

import numpy as np

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(
    f: Callable[[float], float], lo: float, hi: float, tol: float
) -> tuple[float, float, list[tuple[float, float]]]:
    """Maximize a concave function on [lo, hi] to argument tolerance tol.

    Returns (best argument, best value, evaluation trace).  The best
    argument is the best *evaluated* point, which for a concave function is
    within tol of the argmax once the bracket has shrunk below tol.
    """
    if tol <= 0.0:
        raise ValueError(f"tol must be positive, got {tol}")
    trace: list[tuple[float, float]] = []

    def ev(x: float) -> float:
        y = f(x)
        trace.append((x, y))
        return y

    if hi - lo <= tol:
        mid = 0.5 * (lo + hi)
        return mid, ev(mid), trace

    c = hi - INV_PHI * (hi - lo)
    d = lo + INV_PHI * (hi - lo)
    fc, fd = ev(c), ev(d)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - INV_PHI * (hi - lo)
            fc = ev(c)
        else:
            lo, c, fc = c, d, fd
            d = lo + INV_PHI * (hi - lo)
            fd = ev(d)
    ev(0.5 * (lo + hi))
    best_x, best_y = max(trace, key=lambda xy: xy[1])
    return best_x, best_y, trace


def plateau_edges(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    x_best: float,
    f_best: float,
    value_tol: float = 1e-9,
    arg_tol: float = 1e-11,
) -> tuple[float, float]:
    """Edges of {x in [lo, hi] : f(x) >= f_best - value_tol} for concave f.

    The set is an interval containing x_best; each edge is located by
    bisection to argument tolerance arg_tol.
    """

    def on_plateau(x: float) -> bool:
        return f(x) >= f_best - value_tol

    def bisect(outside: float, inside: float) -> float:
        while abs(inside - outside) > arg_tol:
            mid = 0.5 * (outside + inside)
            if on_plateau(mid):
                inside = mid
            else:
                outside = mid
        return inside

    left = lo if on_plateau(lo) else bisect(lo, x_best)
    right = hi if on_plateau(hi) else bisect(hi, x_best)
    return left, right


def simplex_lattice(n_coords: int, parts: int) -> Iterator[np.ndarray]:
    """All compositions of ``parts`` equal mass units into ``n_coords``
    coordinates, as probability vectors."""
    if n_coords == 1:
        yield np.array([1.0])
        return
    for cuts in combinations(range(parts + n_coords - 1), n_coords - 1):
        counts = []
        prev = -1
        for c in cuts:
            counts.append(c - prev - 1)
            prev = c
        counts.append(parts + n_coords - 2 - prev)
        yield np.array(counts, dtype=float) / parts


def lattice_parts(n_coords: int, target_parts: int, budget: int) -> int:
    """Largest lattice subdivision <= target_parts whose point count stays
    within budget."""
    parts = max(2, target_parts)
    while parts > 2 and math.comb(parts + n_coords - 1, n_coords - 1) > budget:
        parts -= 1
    return parts


def refine_coordinate_pairs(
    f: Callable[[np.ndarray], float],
    start: np.ndarray,
    lower: np.ndarray,
    upper: np.ndarray,
    tol: float,
    max_sweeps: int = 60,
) -> tuple[np.ndarray, float]:
    """Cyclic 1-D maximization along coordinate-exchange directions
    e_i - e_j, staying inside [lower, upper] and on the simplex.

    For a concave objective the exchange directions span the simplex
    tangent space, so sweeps converge to the maximum.
    """
    w = np.array(start, dtype=float)
    best = f(w)
    n = w.size
    for _ in range(max_sweeps):
        moved = 0.0
        for i, j in combinations(range(n), 2):
            t_lo = max(lower[i] - w[i], w[j] - upper[j])
            t_hi = min(upper[i] - w[i], w[j] - lower[j])
            if t_hi - t_lo <= tol:
                continue

            def g(t: float) -> float:
                probe = w.copy()
                probe[i] += t
                probe[j] -= t
                return f(probe)

            t_star, g_star, _ = golden_section_max(g, t_lo, t_hi, tol)
            if g_star > best:
                moved = max(moved, abs(t_star))
                w[i] += t_star
                w[j] -= t_star
                best = g_star
        if moved <= tol:
            break
    return w, best
