"""Derivative-free optimization of displacement amplitude schedules.

The error probability is only piecewise smooth in the ratios because the MAP
phase rule switches branches, so every search here uses objective values only:
grid seeding with golden-section refinement for scalar problems, cyclic
coordinate descent with a Nelder-Mead polish for the per-slice schedule, and
breadth-first sweeps over tree nodes for the history-conditioned schedule.
"""

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from ._validation import DimensionCapError, check_real
from .receiver import (
    DEFAULT_R_MAX,
    Strategy,
    TreeEvaluator,
    evaluate_strategy,
    heap_slice,
    subtree,
)

logger = logging.getLogger(__name__)

DEFAULT_SEED = 42
N_CAP = 10
GOLDEN = (np.sqrt(5.0) - 1.0) / 2.0


@dataclass
class OptimizationResult:
    strategy: Strategy
    p_error: float
    iterations: int
    converged: bool
    objective_history: list = field(default_factory=list)


def golden_section(f, lo, hi, tol=1e-5, max_iter=200):
    """Minimize a unimodal scalar function on ``[lo, hi]``.

    Returns ``(x, f(x), converged)`` where ``converged`` means the bracket
    shrank below ``tol``.
    """
    a, b = lo, hi
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if b - a < tol:
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x, fx = (c, fc) if fc <= fd else (d, fd)
    return x, fx, b - a < tol


def _grid_then_golden(batch, scalar, lo, hi, n_grid, tol, extra=()):
    """Seed on a grid (plus ``extra`` points), then refine the best grid bracket."""
    grid = np.linspace(lo, hi, n_grid)
    points = np.concatenate([grid, np.asarray(extra, dtype=float)])
    values = batch(points)
    best = int(np.argmin(values))
    x_best, f_best = points[best], values[best]
    step = grid[1] - grid[0] if n_grid > 1 else hi - lo
    a, b = max(lo, x_best - step), min(hi, x_best + step)
    converged = True
    if b > a:
        x, fx, converged = golden_section(scalar, a, b, tol)
        if fx < f_best:
            x_best, f_best = x, fx
    return float(x_best), float(f_best), converged


def _zoom_grid(batch, lo, hi, x0, f0, n_grid=17, rounds=6):
    """Nested grid refinement: each round re-grids around the current best point."""
    x_best, f_best = x0, f0
    a, b = lo, hi
    for _ in range(rounds):
        points = np.linspace(a, b, n_grid)
        values = batch(points)
        i = int(np.argmin(values))
        if values[i] < f_best:
            x_best, f_best = float(points[i]), float(values[i])
        step = (b - a) / (n_grid - 1)
        a, b = max(lo, x_best - step), min(hi, x_best + step)
    return x_best, f_best


def _trivial(kind, ratios, ensemble, model, r_max):
    strategy = Strategy(kind, ratios, r_max)
    p = evaluate_strategy(strategy, ensemble, model).p_error
    return OptimizationResult(strategy, p, 0, True, [p])


def optimize_flat(ensemble, model, r_max=DEFAULT_R_MAX, n_grid=64, tol=1e-5):
    """Best constant ratio ``|beta|/|alpha|`` over all slices.

    A 64-point grid on ``[0, r_max]`` (plus the non-optimized ratio 1) is
    refined by golden-section search, so the result is never worse than the
    non-optimized receiver.
    """
    r_max = check_real(r_max, "r_max", low=0.0)
    if r_max <= 0:
        raise ValueError("r_max must be positive")
    evaluator = TreeEvaluator(ensemble, model)
    size = (1 << model.slices) - 1

    def batch(rs):
        return evaluator.p_error(np.repeat(np.asarray(rs, dtype=float)[:, None], size, axis=1))

    def scalar(r):
        return float(batch([r])[0])

    extra = [1.0] if r_max >= 1.0 else []
    grid_vals = batch(np.linspace(0, r_max, n_grid))
    r, p, converged = _grid_then_golden(batch, scalar, 0.0, r_max, n_grid, tol, extra)
    strategy = Strategy("flat", [r], r_max)
    return OptimizationResult(strategy, p, 1, converged, [float(grid_vals.min()), p])


class _SequentialSearch:
    def __init__(self, evaluator, n_slices, r_max, n_grid=24, tol=1e-5):
        self.evaluator = evaluator
        self.n = n_slices
        self.r_max = r_max
        self.n_grid = n_grid
        self.tol = tol
        self.repeats = 1 << np.arange(n_slices)

    def objective(self, ratios):
        nodes = np.repeat(np.clip(ratios, 0.0, self.r_max), self.repeats)
        return float(self.evaluator.p_error(nodes)[0])

    def coordinate_objective(self, ratios, j):
        base = np.repeat(ratios, self.repeats)
        sl = heap_slice(j)

        def batch(values):
            nodes = np.repeat(base[None, :], len(values), axis=0)
            nodes[:, sl] = np.asarray(values)[:, None]
            return self.evaluator.p_error(nodes)

        def scalar(v):
            return float(batch([v])[0])

        return batch, scalar

    def coordinate_descent(self, ratios, value, history, max_cycles=100):
        ratios = ratios.copy()
        for _ in range(max_cycles):
            start = value
            for j in range(self.n):
                batch, scalar = self.coordinate_objective(ratios, j)
                r, p, _ = _grid_then_golden(batch, scalar, 0.0, self.r_max, self.n_grid, self.tol, [ratios[j]])
                if p < value:
                    ratios[j], value = r, p
            history.append(value)
            if start - value < 1e-9:
                return ratios, value, True
        return ratios, value, False

    def polish(self, ratios, value, history):
        res = minimize(
            self.objective,
            ratios,
            method="Nelder-Mead",
            bounds=[(0.0, self.r_max)] * self.n,
            options={"xatol": 1e-7, "fatol": 1e-13, "maxfev": 400 * self.n, "adaptive": True},
        )
        x = np.clip(res.x, 0.0, self.r_max)
        fx = self.objective(x)
        if fx < value:
            history.append(fx)
            return x, fx
        return ratios, value

    def run(self, start):
        history = [self.objective(start)]
        ratios, value = np.array(start, dtype=float), history[0]
        converged = False
        rounds = 0
        for rounds in range(1, 6):
            before = value
            ratios, value, converged = self.coordinate_descent(ratios, value, history)
            ratios, value = self.polish(ratios, value, history)
            if before - value < 1e-9:
                break
        return ratios, value, converged, rounds, history


def optimize_sequential(
    ensemble,
    model,
    r_max=DEFAULT_R_MAX,
    seed_strategy=None,
    restarts=4,
    seed=DEFAULT_SEED,
):
    """Jointly optimize one ratio per slice.

    Starts from ``seed_strategy`` (default: the flat optimum repeated on every
    slice) plus ``restarts`` uniform random schedules drawn with ``seed``; each
    start runs cyclic coordinate descent followed by a Nelder-Mead polish and
    the best schedule is kept.
    """
    n = model.slices
    if ensemble.mean_photon == 0:
        return _trivial("sequential", np.ones(n), ensemble, model, r_max)
    if seed_strategy is None:
        seed_strategy = optimize_flat(ensemble, model, r_max).strategy
    search = _SequentialSearch(TreeEvaluator(ensemble, model), n, r_max)
    if seed_strategy.kind == "sequential":
        first = np.array(seed_strategy.ratios)
    else:
        first = np.full(n, seed_strategy.ratios[0])
    rng = np.random.default_rng(seed)
    starts = [first] + [rng.uniform(0.0, r_max, n) for _ in range(restarts)]

    best = None
    total = 0
    for i, start in enumerate(starts):
        ratios, value, converged, rounds, history = search.run(start)
        total += len(history)
        logger.debug("sequential start %d: P_e=%.12g after %d rounds", i, value, rounds)
        if best is None or value < best[1]:
            best = (ratios, value, converged, history)
    ratios, value, converged, history = best
    strategy = Strategy("sequential", np.clip(ratios, 0.0, r_max), r_max)
    return OptimizationResult(strategy, value, total, converged, history)


def optimize_historical(
    ensemble,
    model,
    r_max=DEFAULT_R_MAX,
    seed_strategy=None,
    n_cap=N_CAP,
    max_sweeps=60,
    tol=1e-9,
    min_reach=1e-13,
    polish_limit=63,
):
    """Optimize one ratio per node of the detection-history tree.

    The seed (default: the sequential optimum) is broadcast along depths.
    Each sweep visits nodes breadth-first; a node's ratio only changes the
    leaves below it, so its scalar subproblem is solved on that subtree alone,
    starting from the node's likelihood row. Nodes reached with total
    probability below ``min_reach`` are left untouched. Sweeps stop once a
    full sweep improves the error probability by less than ``tol``. Trees with
    at most ``polish_limit`` nodes get a final Nelder-Mead polish.
    """
    n = model.slices
    if n > n_cap:
        raise DimensionCapError(f"historical optimization needs 2**{n} - 1 parameters; cap is N={n_cap}")
    if ensemble.mean_photon == 0:
        return _trivial("historical", np.ones((1 << n) - 1), ensemble, model, r_max)
    if seed_strategy is None:
        seed_strategy = optimize_sequential(ensemble, model, r_max).strategy
    evaluator = TreeEvaluator(ensemble, model)
    nodes = np.clip(seed_strategy.node_ratios(n), 0.0, r_max)
    priors = evaluator.priors
    value = float(evaluator.p_error(nodes)[0])
    history = [value]
    converged = False
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        start = value
        lik = np.ones((1, priors.size))
        for depth in range(n):
            for local in range(1 << depth):
                row = lik[local]
                if (row * priors).sum() < min_reach:
                    continue
                sub = subtree(nodes, depth, local, n)
                current = float(evaluator.success(sub, row)[0])

                def batch(values, sub=sub, row=row):
                    cand = np.repeat(sub[None, :], len(values), axis=0)
                    cand[:, 0] = values
                    return -evaluator.success(cand, row)

                idx = heap_slice(depth, local, depth).start
                r, neg = _zoom_grid(batch, 0.0, r_max, nodes[idx], -current)
                if -neg > current:
                    nodes[idx] = r
            lik = evaluator.split(lik[None], nodes[None, heap_slice(depth)])[0]
        value = float(evaluator.p_error(nodes)[0])
        history.append(value)
        logger.debug("historical sweep %d: P_e=%.12g", sweeps, value)
        if start - value < tol:
            converged = True
            break

    if nodes.size <= polish_limit:
        def objective(x):
            return float(evaluator.p_error(np.clip(x, 0.0, r_max))[0])

        res = minimize(
            objective,
            nodes,
            method="Nelder-Mead",
            bounds=[(0.0, r_max)] * nodes.size,
            options={"xatol": 1e-8, "fatol": 1e-14, "maxfev": 300 * nodes.size, "adaptive": True},
        )
        x = np.clip(res.x, 0.0, r_max)
        fx = objective(x)
        if fx < value:
            nodes, value = x, fx
            history.append(value)

    strategy = Strategy("historical", nodes, r_max)
    return OptimizationResult(strategy, value, sweeps, converged, history)


def optimize(kind, ensemble, model, r_max=DEFAULT_R_MAX, seed=DEFAULT_SEED, seed_strategy=None):
    """Dispatch by strategy kind; ``non-optimized`` just evaluates ratio 1."""
    if kind == "non-optimized":
        return _trivial("non-optimized", [1.0], ensemble, model, r_max)
    if kind == "flat":
        return optimize_flat(ensemble, model, r_max)
    if kind == "sequential":
        return optimize_sequential(ensemble, model, r_max, seed_strategy, seed=seed)
    if kind == "historical":
        return optimize_historical(ensemble, model, r_max, seed_strategy)
    raise ValueError(f"unknown strategy kind {kind!r}")
