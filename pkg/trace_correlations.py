"""
Trace-distance correlations of Bell diagonal states.

Closed forms for the discord, classical and total correlations measured with
the trace distance, together with the closest classical and product states
that attain them, the triangle-inequality gap and the fixed-reference
(marginal product) baseline.

The total correlation is the minimum over a one-parameter family of product
states with Bloch components only along the axis of the largest modulus.
The objective in x = a_k^2 is piecewise linear plus concave, so the minimum
lies on an endpoint or on a point where one absolute-value term vanishes.
Those candidates are evaluated exactly and cross-checked on a dense grid.

The axis family does not always contain the closest product state. Near the
Bell-state vertices (largest Bell eigenvalue above 0.85) product states with
Bloch vectors in the plane of two axes can lie closer, so there td_total is
an upper bound; near_bell_vertex flags those states.
"""

import logging
import math
from typing import Tuple

import numpy as np

from bell_states import BELL_SIGNS, bd_spectrum, require_valid
from models import (
    BellDiagonal, CorrelationRecord, DegenerateState, MetricTag, ProductState,
    SortedModuli, TotalCorrelation,
)

logger = logging.getLogger(__name__)

GRID_POINTS = 10_000
GRID_TOL = 1e-9
# Candidates closer than this in objective value count as ties; the smaller x wins
CANDIDATE_TIE_TOL = 1e-14
# Largest Bell eigenvalue above which the axis family can miss the closest product state
AXIS_FAMILY_LAMBDA_MAX = 0.85

WERNER_BREAK = 0.8
RANK2_BREAKS = (0.5, 0.75)


def sort_moduli(r: BellDiagonal) -> SortedModuli:
    """
    Sort |R_11|, |R_22|, |R_33| keeping track of the original indices.

    Equal moduli give the lowest original index to idx_max first, then to
    idx_int.

    Args:
        r: Correlation coefficients

    Returns:
        SortedModuli: Ascending moduli with 1-based indices
    """
    moduli = np.abs(r.to_array())
    order = sorted(range(3), key=lambda i: (-moduli[i], i))
    k, j, i = order
    return SortedModuli(
        r_min=float(moduli[i]), r_int=float(moduli[j]), r_max=float(moduli[k]),
        idx_min=i + 1, idx_int=j + 1, idx_max=k + 1,
    )


def td_discord(r: BellDiagonal) -> float:
    """Trace-distance discord R_int / 2."""
    require_valid(r)
    return sort_moduli(r).r_int / 2.0


def closest_classical(r: BellDiagonal) -> BellDiagonal:
    """
    Classical Bell diagonal state closest to r in trace distance.

    Only the component of largest modulus survives; the two smaller ones are
    set to zero.
    """
    require_valid(r)
    moduli = sort_moduli(r)
    values = np.zeros(3)
    values[moduli.idx_max - 1] = r.component(moduli.idx_max)
    return BellDiagonal.from_array(values)


def td_classical(r: BellDiagonal) -> float:
    """Trace-distance classical correlations sqrt(1 + R_max) - 1."""
    require_valid(r)
    return math.sqrt(1.0 + sort_moduli(r).r_max) - 1.0


def _sign(value: float) -> float:
    return -1.0 if value < 0.0 else 1.0


def _axis_product(axis: int, a_k: float, sign: float) -> ProductState:
    a = np.zeros(3)
    b = np.zeros(3)
    a[axis - 1] = a_k
    b[axis - 1] = sign * a_k
    return ProductState.from_arrays(a, b)


def closest_product_to_classical(r: BellDiagonal) -> ProductState:
    """
    Product state closest to the closest classical state of r.

    Both Bloch vectors point along the axis of R_max with
    |a_k| = sqrt(1 + R_max) - 1 and b_k = sign(R_kk) * a_k.
    """
    require_valid(r)
    moduli = sort_moduli(r)
    a_k = math.sqrt(1.0 + moduli.r_max) - 1.0
    return _axis_product(moduli.idx_max, a_k, _sign(r.component(moduli.idx_max)))


def _objective_terms(r: BellDiagonal) -> Tuple[SortedModuli, float, float, float]:
    moduli = sort_moduli(r)
    if moduli.r_max == 0.0:
        raise DegenerateState("All correlation coefficients vanish; the state is already a product state")
    s = _sign(r.component(moduli.idx_max))
    r_ii = r.component(moduli.idx_int)
    r_jj = r.component(moduli.idx_min)
    e = s * r_ii + r_jj
    g2 = (r_ii - s * r_jj) ** 2
    return moduli, s, e, g2


def _objective(x, r_max: float, e: float, g2: float):
    # Works on scalars and arrays of x = a_k^2
    c = r_max - x
    root = np.sqrt(4.0 * x + g2)
    return (np.abs(c - e) + np.abs(c + e) + np.abs(c - root) + np.abs(c + root)) / 8.0


def td_total_objective(r: BellDiagonal, ak: float) -> float:
    """
    Trace distance from r to the product state with a_k = ak, b_k = s * ak.

    Args:
        r: Correlation coefficients (R_max > 0)
        ak: Bloch component along the axis of R_max, |ak| <= 1

    Returns:
        float: (|c - e| + |c + e| + |c - q| + |c + q|) / 8 with c = R_max - ak^2,
            e = s R_ii + R_jj, q = sqrt(4 ak^2 + (R_ii - s R_jj)^2)

    Raises:
        DegenerateState: If all coefficients vanish
        ValueError: If |ak| > 1
    """
    if abs(ak) > 1.0:
        raise ValueError(f"Bloch component a_k = {ak} outside [-1, 1]")
    moduli, _, e, g2 = _objective_terms(r)
    return float(_objective(ak * ak, moduli.r_max, e, g2))


def _candidates(r_max: float, e: float, g2: float) -> np.ndarray:
    points = [0.0, 1.0, r_max - e, r_max + e]
    # c = ±sqrt(4x + g^2)  <=>  x^2 - 2(R_max + 2)x + R_max^2 - g^2 = 0
    b = r_max + 2.0
    disc = b * b - (r_max * r_max - g2)
    if disc >= 0.0:
        root = math.sqrt(disc)
        points.extend([b - root, b + root])
    x = np.array(points)
    return np.unique(x[(x >= 0.0) & (x <= 1.0)])


def _refine(r_max: float, e: float, g2: float, center: float) -> Tuple[float, float]:
    lo = max(0.0, center - 1.0 / GRID_POINTS)
    hi = min(1.0, center + 1.0 / GRID_POINTS)
    for _ in range(3):
        grid = np.linspace(lo, hi, 1001)
        values = _objective(grid, r_max, e, g2)
        best = int(np.argmin(values))
        width = (hi - lo) / 1000.0
        lo = max(0.0, grid[best] - width)
        hi = min(1.0, grid[best] + width)
    return float(grid[best]), float(values[best])


def td_total(r: BellDiagonal) -> TotalCorrelation:
    """
    Total trace-distance correlations and the closest product state.

    Evaluates the objective on x = 0, x = 1 and every zero of an absolute-value
    term inside [0, 1], then sweeps a dense grid. If the grid ever beats the
    candidate minimum by more than 1e-9 the grid optimum is refined and
    returned with grid_fallback set.

    The minimum is taken over the axis family only. For states flagged by
    near_bell_vertex an off-axis product state can be closer, e.g.
    R = (0.95136, 0.85574, -0.88304) where Bloch vectors near (-0.68, 0.65, 0)
    reach 0.653572 against 0.654877 here.

    Args:
        r: Correlation coefficients

    Returns:
        TotalCorrelation: Minimum value and witness product state

    Raises:
        InvalidState: If r is unphysical
    """
    require_valid(r)
    moduli = sort_moduli(r)
    if moduli.r_max == 0.0:
        return TotalCorrelation(value=0.0, witness=ProductState.maximally_mixed(),
                                a_k=0.0, is_marginal_product=True)

    _, s, e, g2 = _objective_terms(r)
    candidates = _candidates(moduli.r_max, e, g2)
    values = _objective(candidates, moduli.r_max, e, g2)
    lowest = values.min()
    best = int(np.flatnonzero(values <= lowest + CANDIDATE_TIE_TOL)[0])
    x_best, value = float(candidates[best]), float(values[best])

    grid = np.linspace(0.0, 1.0, GRID_POINTS)
    grid_values = _objective(grid, moduli.r_max, e, g2)
    grid_best = int(np.argmin(grid_values))
    fallback = False
    if grid_values[grid_best] < value - GRID_TOL:
        logger.warning(
            f"Grid minimum {grid_values[grid_best]:.12g} undercuts candidate minimum "
            f"{value:.12g} for R = {r.as_tuple()}; refining on the grid"
        )
        x_best, value = _refine(moduli.r_max, e, g2, float(grid[grid_best]))
        fallback = True

    a_k = math.sqrt(x_best)
    return TotalCorrelation(
        value=value,
        witness=_axis_product(moduli.idx_max, a_k, s),
        a_k=a_k,
        is_marginal_product=x_best == 0.0,
        grid_fallback=fallback,
    )


def near_bell_vertex(r: BellDiagonal) -> bool:
    """True when the largest Bell eigenvalue exceeds AXIS_FAMILY_LAMBDA_MAX."""
    return float(np.max(bd_spectrum(r).to_array())) > AXIS_FAMILY_LAMBDA_MAX


def triangle_gap(r: BellDiagonal) -> float:
    """C_TD + D_TD - T_TD, non-negative by the triangle inequality."""
    return td_classical(r) + td_discord(r) - td_total(r).value


def _distance_to_mixed(r: np.ndarray) -> float:
    # Bell diagonal states commute, so the distance is half the l1 gap of the spectra
    return float(0.5 * np.sum(np.abs(0.25 * (BELL_SIGNS @ r))))


def marginal_baseline(r: BellDiagonal) -> Tuple[float, float]:
    """
    Distances to the fixed product of the marginals, I/4.

    Returns:
        tuple: (c_prime, t_prime) = (delta(chi_r, I/4), delta(rho, I/4))
    """
    require_valid(r)
    chi = closest_classical(r)
    return _distance_to_mixed(chi.to_array()), _distance_to_mixed(r.to_array())


def correlations_td(r: BellDiagonal) -> CorrelationRecord:
    """Discord, classical and total trace-distance correlations with witnesses."""
    total = td_total(r)
    record = CorrelationRecord(
        quantum=td_discord(r),
        classical=td_classical(r),
        total=total.value,
        metric=MetricTag.TRACE_DISTANCE,
        closest_classical=closest_classical(r),
        closest_product_classical=closest_product_to_classical(r),
        closest_product_total=total.witness,
    )
    logger.debug(f"TD correlations for {r.as_tuple()}: D={record.quantum:.12g} "
                 f"C={record.classical:.12g} T={record.total:.12g}")
    return record


def werner_reference(r: float) -> Tuple[float, float, float]:
    """Closed-form (D, C, T) on the Werner line R = (r, -r, r)."""
    total = 0.75 * r if r <= WERNER_BREAK else 0.5 * math.sqrt(r + r * r)
    return r / 2.0, math.sqrt(1.0 + r) - 1.0, total


def rank2_reference(c: float) -> Tuple[float, float, float]:
    """Closed-form (D, C, T) on the rank-2 line R = (c, -c, 1)."""
    low, high = RANK2_BREAKS
    if c <= low:
        total = math.sqrt(2.0 + c * c) - 1.0
    elif c <= high:
        total = 0.25 * (1.0 + 2.0 * c)
    else:
        total = 0.5 * math.sqrt(1.0 + c * c)
    return c / 2.0, math.sqrt(2.0) - 1.0, total


if __name__ == "__main__":
    from bell_states import werner_state

    for r in (0.4, 0.8, 1.0):
        state = werner_state(r)
        record = correlations_td(state)
        print(f"Werner r={r}: D={record.quantum:.6f} C={record.classical:.6f} "
              f"T={record.total:.6f} reference={werner_reference(r)}")
