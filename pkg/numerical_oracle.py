"""
Brute-force minimizers used to cross-check the closed-form correlations.

A Nelder-Mead simplex search with multi-start drives three searches:
the closest product state (6 Bloch parameters), the best projective
measurement on subsystem A (2 angles), and the closest classical-quantum
state (9 parameters). verify_sweep compares the product-state and measurement
oracles against the analytic total correlations and discord on seeded random
Bell diagonal states.
"""

import logging
import math
from functools import partial
from multiprocessing import Pool
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from bell_states import (
    bd_matrix_unchecked, bloch_matrix, extract_bloch, extract_r, sample_bd_array,
)
from matrix_core import IDENTITY2, PAULIS, kron, partial_trace, trace_norm_fast
from models import (
    BellDiagonal, MeasurementAxis, OptimizerConfig, OptimizerResult, ProductState,
    Subsystem, VerifyRecord, VerifySummary,
)
from trace_correlations import near_bell_vertex, td_discord, td_total

logger = logging.getLogger(__name__)

# Reflection, expansion, contraction, shrink
NM_ALPHA = 1.0
NM_GAMMA = 2.0
NM_BETA = 0.5
NM_DELTA = 0.5

MAX_RESTARTS = 3
MEASUREMENT_GRID = 64
GRID_SEEDS = 4
PLANE_START_NORMS = (0.9, 0.95)
BELL_DIAGONAL_TOL = 1e-10

UNDERCUT_TOL = 1e-6
AGREE_TOL = 1e-4
FULL_SCALE_SAMPLES = 1_000_000


def nelder_mead(objective: Callable[[np.ndarray], float], start: Sequence[float],
                cfg: OptimizerConfig) -> OptimizerResult:
    """
    Minimize a function of n reals with the Nelder-Mead simplex method.

    The initial simplex is the start point plus one vertex per coordinate at
    distance cfg.initial_step. Iteration stops when the simplex diameter drops
    below cfg.x_tol or after cfg.max_iters iterations. Equal vertex values
    alone do not stop the search.

    Args:
        objective: Function to minimize
        start: Initial point
        cfg: Optimizer settings

    Returns:
        OptimizerResult: Best vertex, its value and a convergence flag
    """
    x0 = np.asarray(start, dtype=float)
    n = x0.size
    simplex = np.vstack([x0] + [x0 + cfg.initial_step * np.eye(n)[i] for i in range(n)])
    values = np.array([objective(x) for x in simplex])
    evaluations = n + 1

    converged = False
    iteration = 0
    for iteration in range(1, cfg.max_iters + 1):
        order = np.argsort(values, kind='stable')
        simplex = simplex[order]
        values = values[order]

        diameter = float(np.max(np.linalg.norm(simplex[1:] - simplex[0], axis=1)))
        if diameter < cfg.x_tol:
            converged = True
            break

        centroid = simplex[:-1].mean(axis=0)
        worst = simplex[-1]

        reflected = centroid + NM_ALPHA * (centroid - worst)
        f_reflected = objective(reflected)
        evaluations += 1

        if f_reflected < values[0]:
            expanded = centroid + NM_GAMMA * (reflected - centroid)
            f_expanded = objective(expanded)
            evaluations += 1
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue

        if f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue

        # Outside contraction when the reflection beats the worst vertex, inside otherwise
        if f_reflected < values[-1]:
            contracted = centroid + NM_BETA * (reflected - centroid)
        else:
            contracted = centroid + NM_BETA * (worst - centroid)
        f_contracted = objective(contracted)
        evaluations += 1
        if f_contracted < min(f_reflected, values[-1]):
            simplex[-1], values[-1] = contracted, f_contracted
            continue

        best = simplex[0]
        for i in range(1, n + 1):
            simplex[i] = best + NM_DELTA * (simplex[i] - best)
            values[i] = objective(simplex[i])
        evaluations += n
    else:
        logger.debug(f"Nelder-Mead stopped after {cfg.max_iters} iterations without converging")

    best = int(np.argmin(values))
    return OptimizerResult(x=simplex[best].copy(), fun=float(values[best]), converged=converged,
                           iterations=iteration, evaluations=evaluations)


def _polished(objective: Callable[[np.ndarray], float], result: OptimizerResult,
              cfg: OptimizerConfig) -> OptimizerResult:
    """Restart the simplex from its own optimum while that improves by more than cfg.f_tol."""
    for _ in range(MAX_RESTARTS):
        again = nelder_mead(objective, result.x, cfg)
        improved = again.fun < result.fun - cfg.f_tol
        if again.fun <= result.fun:
            result = again
        if not improved:
            break
    return result


def _multi_start(objective: Callable[[np.ndarray], float], starts: List[np.ndarray],
                 cfg: OptimizerConfig) -> OptimizerResult:
    """Minimum over all starts, polished once; the earliest start wins ties."""
    best: Optional[OptimizerResult] = None
    for index, start in enumerate(starts):
        result = nelder_mead(objective, start, cfg)
        logger.debug(f"start {index}: f={result.fun:.12g} iterations={result.iterations}")
        if best is None or result.fun < best.fun:
            best = result
    return _polished(objective, best, cfg)


def _clamp_ball(v: np.ndarray) -> np.ndarray:
    norm = float(np.linalg.norm(v))
    return v / norm if norm > 1.0 else v


def _random_ball_points(rng: np.random.Generator, count: int, blocks: int) -> np.ndarray:
    """Uniform points in the unit ball, `blocks` independent 3-vectors per row."""
    directions = rng.standard_normal((count, blocks, 3))
    directions /= np.linalg.norm(directions, axis=2, keepdims=True)
    radii = rng.uniform(0.0, 1.0, size=(count, blocks, 1)) ** (1.0 / 3.0)
    return (directions * radii).reshape(count, 3 * blocks)


def _as_bell_diagonal(rho: np.ndarray) -> Optional[BellDiagonal]:
    """Coefficients of rho when it is a physical Bell diagonal state, else None."""
    try:
        r = extract_r(rho)
    except ValueError:
        return None
    if np.max(np.abs(rho - bd_matrix_unchecked(r.to_array()))) > BELL_DIAGONAL_TOL:
        return None
    return r


def _bell_diagonal_starts(r: BellDiagonal) -> List[np.ndarray]:
    """
    Product-state starts for a Bell diagonal input.

    The closed-form witness comes first, followed by one start per pair of
    axes with equal Bloch components on both axes and b_i = sign(R_ii) a_i.
    Local pi rotations and complex conjugation map the other sign patterns
    of a plane onto this one.
    """
    starts = []
    try:
        witness = td_total(r).witness
        starts.append(np.concatenate([witness.a.to_array(), witness.b.to_array()]))
    except ValueError:
        return starts
    signs = np.where(r.to_array() < 0.0, -1.0, 1.0)
    for norm in PLANE_START_NORMS:
        for i, j in ((0, 1), (0, 2), (1, 2)):
            a = np.zeros(3)
            a[[i, j]] = norm / math.sqrt(2.0)
            starts.append(np.concatenate([a, signs * a]))
    return starts


def min_product_distance(rho: np.ndarray, cfg: OptimizerConfig) -> Tuple[float, ProductState]:
    """
    Trace distance from rho to the closest product state, found numerically.

    Starts: for Bell diagonal inputs the analytic witness and one start in
    each plane of two axes, then the product of the marginals and cfg.starts
    random points in the unit balls.

    Args:
        rho: 4x4 density matrix
        cfg: Optimizer settings

    Returns:
        tuple: (distance, witness product state)
    """
    rho = np.asarray(rho, dtype=complex)

    def objective(params: np.ndarray) -> float:
        a = _clamp_ball(params[:3])
        b = _clamp_ball(params[3:])
        return 0.5 * trace_norm_fast(rho - kron(bloch_matrix(a), bloch_matrix(b)))

    r = _as_bell_diagonal(rho)
    starts = [] if r is None else _bell_diagonal_starts(r)
    a, b = extract_bloch(rho)
    starts.append(np.concatenate([a, b]))
    rng = np.random.default_rng(cfg.seed)
    starts.extend(_random_ball_points(rng, cfg.starts, 2))

    best = _multi_start(objective, starts, cfg)
    witness = ProductState.from_arrays(_clamp_ball(best.x[:3]), _clamp_ball(best.x[3:]))
    return best.fun, witness


def _axis_projectors(theta: float, phi: float) -> Tuple[np.ndarray, np.ndarray]:
    n = np.array([math.sin(theta) * math.cos(phi), math.sin(theta) * math.sin(phi), math.cos(theta)])
    plus = bloch_matrix(n)
    return plus, IDENTITY2 - plus


def measured_state(rho: np.ndarray, theta: float, phi: float) -> np.ndarray:
    """Pi_A[rho] = sum_± (P_± ⊗ I) rho (P_± ⊗ I) for the axis (theta, phi)."""
    total = np.zeros((4, 4), dtype=complex)
    for projector in _axis_projectors(theta, phi):
        local = kron(projector, IDENTITY2)
        total += local @ rho @ local
    return total


def min_measurement_distance(rho: np.ndarray, cfg: OptimizerConfig) -> Tuple[float, MeasurementAxis]:
    """
    Discord as the smallest disturbance by a projective measurement on A.

    A 64x64 grid over (theta, phi) seeds the simplex from its best points,
    followed by cfg.starts random axes.

    Returns:
        tuple: (min over axes of ||rho - Pi_A[rho]||_1 / 2, optimal axis)
    """
    rho = np.asarray(rho, dtype=complex)

    def objective(angles: np.ndarray) -> float:
        return 0.5 * trace_norm_fast(rho - measured_state(rho, angles[0], angles[1]))

    thetas = np.linspace(0.0, math.pi, MEASUREMENT_GRID)
    phis = np.linspace(0.0, 2.0 * math.pi, MEASUREMENT_GRID, endpoint=False)
    grid = np.array([(t, p) for t in thetas for p in phis])
    grid_values = np.array([objective(point) for point in grid])
    seeds = grid[np.argsort(grid_values, kind='stable')[:GRID_SEEDS]]

    rng = np.random.default_rng(cfg.seed)
    random_axes = np.column_stack([
        np.arccos(rng.uniform(-1.0, 1.0, cfg.starts)),
        rng.uniform(0.0, 2.0 * math.pi, cfg.starts),
    ])
    best = _multi_start(objective, list(seeds) + list(random_axes), cfg)
    return best.fun, MeasurementAxis.from_angles(best.x[0], best.x[1])


def classical_state(params: np.ndarray) -> np.ndarray:
    """
    Classical-quantum state p |n+><n+| ⊗ tau_1 + (1 - p) |n-><n-| ⊗ tau_2.

    Parameters: (theta, phi, p, tau_1 Bloch vector, tau_2 Bloch vector) with p
    clipped to [0, 1] and the Bloch vectors radially clamped.
    """
    plus, minus = _axis_projectors(params[0], params[1])
    p = min(max(params[2], 0.0), 1.0)
    tau1 = bloch_matrix(_clamp_ball(params[3:6]))
    tau2 = bloch_matrix(_clamp_ball(params[6:9]))
    return p * kron(plus, tau1) + (1.0 - p) * kron(minus, tau2)


def _conditional_start(rho: np.ndarray, axis: MeasurementAxis) -> np.ndarray:
    """Parameters reproducing Pi_A[rho] for the given axis."""
    plus, minus = _axis_projectors(axis.theta, axis.phi)
    p = float(np.real(np.trace(kron(plus, IDENTITY2) @ rho)))
    blochs = []
    for projector, weight in ((plus, p), (minus, 1.0 - p)):
        if weight <= 1e-12:
            blochs.append(np.zeros(3))
            continue
        tau = partial_trace(kron(projector, IDENTITY2) @ rho, Subsystem.B) / weight
        blochs.append(np.array([np.real(np.trace(tau @ s)) for s in PAULIS]))
    return np.concatenate([[axis.theta, axis.phi, p], blochs[0], blochs[1]])


def min_classical_distance(rho: np.ndarray, cfg: OptimizerConfig) -> Tuple[float, np.ndarray]:
    """
    Trace distance from rho to the closest classical-quantum state.

    The best measured state Pi_A[rho] seeds the search, so the result never
    exceeds the measurement oracle.

    Returns:
        tuple: (distance, closest classical state found)
    """
    rho = np.asarray(rho, dtype=complex)

    def objective(params: np.ndarray) -> float:
        return 0.5 * trace_norm_fast(rho - classical_state(params))

    _, axis = min_measurement_distance(rho, cfg)
    starts = [_conditional_start(rho, axis)]
    rng = np.random.default_rng(cfg.seed)
    for point in _random_ball_points(rng, cfg.starts, 2):
        angles = [math.acos(rng.uniform(-1.0, 1.0)), rng.uniform(0.0, 2.0 * math.pi)]
        starts.append(np.concatenate([angles, [rng.uniform(0.0, 1.0)], point]))

    best = _multi_start(objective, starts, cfg)
    return best.fun, classical_state(best.x)


def _sample_seeds(seed: int, count: int) -> List[int]:
    children = np.random.SeedSequence(seed).spawn(count)
    return [int(child.generate_state(1)[0]) for child in children]


def verify_state(row: Tuple[np.ndarray, int], cfg: OptimizerConfig) -> VerifyRecord:
    """Analytic against oracle total correlations and discord for one state."""
    values, sample_seed = row
    state = BellDiagonal.from_array(values)
    rho = bd_matrix_unchecked(state.to_array())
    sample_cfg = cfg.model_copy(update={"seed": sample_seed})
    oracle_t, _ = min_product_distance(rho, sample_cfg)
    oracle_d, _ = min_measurement_distance(rho, sample_cfg)
    return VerifyRecord(state=state, analytic_T=td_total(state).value, oracle_T=oracle_t,
                        analytic_D=td_discord(state), oracle_D=oracle_d,
                        near_vertex=near_bell_vertex(state))


def summarize(records: List[VerifyRecord], seed: int) -> VerifySummary:
    """Aggregate a list of comparison records."""
    diff_t = np.array([abs(rec.oracle_T - rec.analytic_T) for rec in records])
    diff_d = np.array([abs(rec.oracle_D - rec.analytic_D) for rec in records])
    undercuts = [rec for rec in records if rec.oracle_T < rec.analytic_T - UNDERCUT_TOL]
    for rec in undercuts:
        where = "near a Bell vertex" if rec.near_vertex else "away from the Bell vertices"
        logger.warning(f"Oracle undercuts analytic T {where} for R = {rec.state.as_tuple()}: "
                       f"{rec.oracle_T:.12g} < {rec.analytic_T:.12g}")
    return VerifySummary(
        samples=len(records),
        seed=seed,
        max_abs_diff_T=float(diff_t.max()) if records else 0.0,
        max_abs_diff_D=float(diff_d.max()) if records else 0.0,
        undercut_count=len(undercuts),
        agree_fraction_T=float(np.mean(diff_t <= AGREE_TOL)) if records else 1.0,
        off_vertex_undercut_count=sum(1 for rec in undercuts if not rec.near_vertex),
        records=records,
    )


def verify_sweep(count: int, seed: int, cfg: OptimizerConfig, workers: int = 1) -> VerifySummary:
    """
    Compare analytic and oracle values on `count` random Bell diagonal states.

    Each sample gets its own optimizer seed from SeedSequence(seed).spawn, so
    the report does not depend on how samples are spread over workers.

    Args:
        count: Number of sampled states
        seed: Seed for sampling and optimizer starts
        cfg: Optimizer settings (its seed is replaced per sample)
        workers: Worker processes; 1 runs in-process

    Returns:
        VerifySummary: Per-sample records and aggregate statistics
    """
    if count < 1:
        raise ValueError("count must be at least 1")
    workers = max(1, min(workers, count))
    logger.info(f"Verifying {count} states with seed {seed} ({workers} worker(s))")
    rows = list(zip(sample_bd_array(count, seed), _sample_seeds(seed, count)))
    task = partial(verify_state, cfg=cfg)
    if workers > 1:
        with Pool(processes=workers) as pool:
            records = pool.map(task, rows, chunksize=max(1, count // (4 * workers)))
    else:
        records = [task(row) for row in rows]
    summary = summarize(records, seed)
    logger.info(f"Verification done: max|dT|={summary.max_abs_diff_T:.3e} "
                f"max|dD|={summary.max_abs_diff_D:.3e} undercuts={summary.undercut_count}")
    return summary
