"""
Non-Markovian channels acting on Bell diagonal states.

Two models keep Bell diagonal states Bell diagonal:

- phase flip with a random-telegraph memory kernel f(nu), nu = t / 2tau:
  (R11, R22, R33) -> (R11 f^2, R22 f^2, R33)
- random external fields, an equal mixture of local unitaries with phases
  0 and pi: (R11, R22, R33) -> (R11 cos^2 2gt, R22, R33 cos^2 2gt)

Trajectories record both correlation hierarchies at every grid time and the
sudden changes, i.e. the times at which the component holding the
intermediate modulus (discord) or the maximal modulus (classical
correlations) switches.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable, FrozenSet, List, Optional, Tuple, Union

import numpy as np

from bell_states import bd_from_spectrum, require_valid
from entropic_correlations import correlations_ent
from matrix_core import IDENTITY2, PAULI_X, PAULI_Z, kron
from models import (
    BellDiagonal, BellSpectrum, CorrelationRecord, DensityMatrix, DimensionMismatch,
    DynamicsModel, InvalidSpectrum, PhaseFlipParams, RandomFieldParams,
)
from trace_correlations import correlations_td

logger = logging.getLogger(__name__)

ChannelParams = Union[PhaseFlipParams, RandomFieldParams]

MODULUS_TIE_TOL = 1e-12
BISECTION_TOL = 1e-12
CLOSED_FORM_TOL = 1e-8
FREEZING_TOL = 1e-12

# (decaying component indices, constant component index), 1-based
CHANNEL_SPLITS = {
    DynamicsModel.PHASE_FLIP: ((1, 2), 3),
    DynamicsModel.RANDOM_FIELD: ((1, 3), 2),
}

# Phase of the field for branch 1 and 2
FIELD_PHASES = {1: 0.0, 2: math.pi}


# ---------------------------------------------------------------------------
# Phase flip
# ---------------------------------------------------------------------------

def phase_flip_f(nu, p: PhaseFlipParams):
    """
    Memory kernel f(nu) = exp(-nu) [cos(mu nu) + sin(mu nu) / mu].

    Accepts a scalar or an array of nu >= 0.

    Raises:
        UnsupportedRegime: If 4 |alpha| tau <= 1
    """
    mu = p.mu()
    nu = np.asarray(nu, dtype=float)
    value = np.exp(-nu) * (np.cos(mu * nu) + np.sin(mu * nu) / mu)
    return float(value) if value.ndim == 0 else value


def phase_flip_first_zero(p: PhaseFlipParams) -> float:
    """First zero of f, where mu nu = pi - atan(mu); f decreases from 1 to 0 before it."""
    mu = p.mu()
    return (math.pi - math.atan(mu)) / mu


def phase_flip_crossing(target: float, p: PhaseFlipParams) -> float:
    """
    Smallest nu with f^2(nu) = target, by bisection on [0, first zero of f].

    Args:
        target: Value in [0, 1]
        p: Channel parameters

    Returns:
        float: Crossing time in nu units
    """
    if not 0.0 <= target <= 1.0:
        raise ValueError(f"f^2 target {target} outside [0, 1]")
    lo, hi = 0.0, phase_flip_first_zero(p)
    while hi - lo > BISECTION_TOL:
        mid = 0.5 * (lo + hi)
        if phase_flip_f(mid, p) ** 2 > target:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def evolve_phase_flip(r0: BellDiagonal, nu: float, p: PhaseFlipParams) -> BellDiagonal:
    """Coefficients after local phase flip noise on both qubits."""
    require_valid(r0)
    f2 = phase_flip_f(nu, p) ** 2
    return BellDiagonal(r11=r0.r11 * f2, r22=r0.r22 * f2, r33=r0.r33)


def apply_phase_flip_map(rho: DensityMatrix, nu: float, p: PhaseFlipParams) -> DensityMatrix:
    """
    Phase flip channel on a 4x4 matrix, Kraus operators sqrt((1 ± f)/2) {I, Z} per qubit.

    Raises:
        DimensionMismatch: If rho is not 4x4
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"Phase flip map needs a 4x4 matrix, got {rho.shape}")
    f = phase_flip_f(nu, p)
    kraus = (math.sqrt((1.0 + f) / 2.0) * IDENTITY2, math.sqrt((1.0 - f) / 2.0) * PAULI_Z)
    result = np.zeros((4, 4), dtype=complex)
    for k_a in kraus:
        for k_b in kraus:
            op = kron(k_a, k_b)
            result += op @ rho @ op.conj().T
    return result


# ---------------------------------------------------------------------------
# Random external fields
# ---------------------------------------------------------------------------

def random_field_unitary(branch: int, gt: float) -> np.ndarray:
    """
    Single-qubit evolution operator for field branch 1 (phase 0) or 2 (phase pi).

    Matrix in the {|1>, |0>} ordering:
        [[cos gt, exp(-i phi) sin gt], [-exp(i phi) sin gt, cos gt]]
    """
    if branch not in FIELD_PHASES:
        raise ValueError(f"Field branch must be 1 or 2, got {branch}")
    phase = np.exp(1j * FIELD_PHASES[branch])
    c, s = math.cos(gt), math.sin(gt)
    return np.array([[c, np.conj(phase) * s], [-phase * s, c]], dtype=complex)


def _computational(u: np.ndarray) -> np.ndarray:
    # {|1>, |0>} -> {|0>, |1>}
    return PAULI_X @ u @ PAULI_X


def apply_random_field_map(rho0: DensityMatrix, gt: float) -> DensityMatrix:
    """
    Random field channel: (1/4) sum_{i,j} (U_i ⊗ U_j) rho (U_i ⊗ U_j)^dagger.

    Raises:
        DimensionMismatch: If rho0 is not 4x4
    """
    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (4, 4):
        raise DimensionMismatch(f"Random field map needs a 4x4 matrix, got {rho0.shape}")
    unitaries = [_computational(random_field_unitary(branch, gt)) for branch in (1, 2)]
    result = np.zeros((4, 4), dtype=complex)
    for u_a in unitaries:
        for u_b in unitaries:
            op = kron(u_a, u_b)
            result += op @ rho0 @ op.conj().T
    return 0.25 * result


def evolve_random_field(r0: BellDiagonal, gt: float) -> BellDiagonal:
    """Coefficients after the random field channel; R22 is conserved."""
    c2 = math.cos(2.0 * gt) ** 2
    return BellDiagonal(r11=r0.r11 * c2, r22=r0.r22, r33=r0.r33 * c2)


# ---------------------------------------------------------------------------
# Freezing and sudden changes
# ---------------------------------------------------------------------------

def freezing_condition(r0: BellDiagonal, model: Union[DynamicsModel, str]) -> bool:
    """
    Whether r0 shows frozen discord under the given channel.

    One decaying component must be ±1 and the other decaying component must
    equal ∓ the constant component: R_ii = ±1, R_jj = ∓R_kk.
    """
    (first, second), constant = CHANNEL_SPLITS[DynamicsModel(model)]
    r_k = r0.component(constant)
    for unit, other in ((first, second), (second, first)):
        r_i = r0.component(unit)
        if abs(abs(r_i) - 1.0) <= FREEZING_TOL and abs(r0.component(other) + r_i * r_k) <= FREEZING_TOL:
            return True
    return False


def _evolver(model: DynamicsModel, params: ChannelParams) -> Callable[[BellDiagonal, float], BellDiagonal]:
    if model is DynamicsModel.PHASE_FLIP:
        if not isinstance(params, PhaseFlipParams):
            raise TypeError("Phase flip dynamics need PhaseFlipParams")
        return lambda r, t: evolve_phase_flip(r, t, params)
    return lambda r, t: evolve_random_field(r, t)


def _tied_indices(r: BellDiagonal, rank: str) -> FrozenSet[int]:
    """Indices whose modulus equals the intermediate ('int') or maximal ('max') modulus."""
    moduli = np.abs(r.to_array())
    target = float(np.sort(moduli)[1 if rank == "int" else 2])
    return frozenset(int(i) + 1 for i in np.flatnonzero(np.abs(moduli - target) <= MODULUS_TIE_TOL))


def _detect_changes(r0: BellDiagonal, evolve: Callable[[BellDiagonal, float], BellDiagonal],
                    times: np.ndarray, rank: str,
                    states: Optional[List[BellDiagonal]] = None) -> List[float]:
    """
    Times at which the component attaining the given modulus rank switches.

    A change is flagged once the tied index set shares nothing with the last
    reference set; the reference only moves to untied sets, so passing through
    an exact tie on a grid point is still caught. Each change is bisected
    between the last grid time still overlapping the reference and the first
    disjoint one.
    """
    if states is None:
        states = [evolve(r0, t) for t in times]
    reference = _tied_indices(states[0], rank)
    last_overlap = float(times[0])
    changes = []
    for t, state in zip(times[1:], states[1:]):
        current = _tied_indices(state, rank)
        if current & reference:
            last_overlap = float(t)
            if len(current) == 1:
                reference = current
            continue
        lo, hi = last_overlap, float(t)
        while hi - lo > BISECTION_TOL:
            mid = 0.5 * (lo + hi)
            if _tied_indices(evolve(r0, mid), rank) & reference:
                lo = mid
            else:
                hi = mid
        changes.append(0.5 * (lo + hi))
        reference = current
        last_overlap = float(t)
    return changes


def closed_form_change_time(r0: BellDiagonal, model: Union[DynamicsModel, str],
                            params: ChannelParams) -> Optional[float]:
    """
    First sudden-change time of a freezing state, or None if r0 does not freeze.

    Random field: gt* = arccos(sqrt|R22(0)|) / 2. Phase flip: f^2(nu*) = |R33(0)|.
    """
    model = DynamicsModel(model)
    if not freezing_condition(r0, model):
        return None
    _, constant = CHANNEL_SPLITS[model]
    target = abs(r0.component(constant))
    if model is DynamicsModel.RANDOM_FIELD:
        return 0.5 * math.acos(math.sqrt(target))
    return phase_flip_crossing(target, params)


def default_window(model: Union[DynamicsModel, str]) -> float:
    """Plotted time window: nu in [0, 3] for phase flip, gt in [0, pi/2] for random fields."""
    return 3.0 if DynamicsModel(model) is DynamicsModel.PHASE_FLIP else math.pi / 2.0


def sudden_change_time(r0: BellDiagonal, model: Union[DynamicsModel, str], params: ChannelParams,
                       t_max: Optional[float] = None, steps: int = 2000) -> List[float]:
    """
    Times at which the discord of r0 changes behaviour under a channel.

    Changes are detected numerically on a uniform grid and refined by
    bisection. For freezing initial states the first change is also computed
    in closed form; a disagreement beyond 1e-8 is logged.

    Args:
        r0: Initial coefficients
        model: Channel model
        params: Channel parameters
        t_max: End of the time window (model default when omitted)
        steps: Grid points

    Returns:
        list: Ascending change times; empty when the ordering never changes
    """
    require_valid(r0)
    model = DynamicsModel(model)
    t_max = default_window(model) if t_max is None else t_max
    times = np.linspace(0.0, t_max, steps)
    changes = _detect_changes(r0, _evolver(model, params), times, "int")
    _check_closed_form(r0, model, params, changes)
    return changes


def _check_closed_form(r0: BellDiagonal, model: DynamicsModel, params: ChannelParams,
                       changes: List[float]) -> None:
    closed = closed_form_change_time(r0, model, params)
    if closed is None or not changes:
        return
    if abs(changes[0] - closed) > CLOSED_FORM_TOL:
        logger.warning(f"Detected first sudden change {changes[0]:.12g} differs from "
                       f"closed form {closed:.12g} for R = {r0.as_tuple()}")


# ---------------------------------------------------------------------------
# Trajectories
# ---------------------------------------------------------------------------

@dataclass
class Trajectory:
    """Correlations of an evolving Bell diagonal state on a uniform time grid."""
    model: DynamicsModel
    params: ChannelParams
    times: np.ndarray
    states: List[BellDiagonal]
    td_records: List[CorrelationRecord]
    ent_records: List[CorrelationRecord]
    sudden_changes: List[float] = field(default_factory=list)
    classical_changes: List[float] = field(default_factory=list)

    def physical_times(self) -> np.ndarray:
        """Grid in seconds: t = 2 tau nu for phase flip, t = gt / g for random fields."""
        if self.model is DynamicsModel.PHASE_FLIP:
            return 2.0 * self.params.tau * self.times
        return self.times / self.params.g

    def series(self, metric: str, quantity: str) -> np.ndarray:
        """One correlation column, e.g. series('td', 'quantum')."""
        records = self.td_records if metric == "td" else self.ent_records
        return np.array([getattr(rec, quantity) for rec in records])


class TrajectoryBuilder:
    """
    Builds correlation trajectories for one channel.
    """

    def __init__(self, model: Union[DynamicsModel, str], params: ChannelParams):
        """Initialize the builder for a channel model and its parameters."""
        self.model = DynamicsModel(model)
        self.params = params
        self.evolve = _evolver(self.model, params)

    def build(self, r0: BellDiagonal, t_max: float, steps: int) -> Trajectory:
        """
        Evolve r0 on [0, t_max] and record both correlation hierarchies.

        Args:
            r0: Initial coefficients
            t_max: End of the window in dimensionless time
            steps: Number of grid points, at least 2

        Returns:
            Trajectory: States, records and detected sudden changes
        """
        if steps < 2:
            raise ValueError("A trajectory needs at least 2 time steps")
        if t_max <= 0.0:
            raise ValueError("t_max must be positive")
        require_valid(r0)
        logger.info(f"Building {self.model.value} trajectory for R = {r0.as_tuple()} "
                    f"on [0, {t_max}] with {steps} steps")

        # Step 1: Evolve on the grid
        times = np.linspace(0.0, t_max, steps)
        states = [self.evolve(r0, t) for t in times]
        for state in states:
            require_valid(state)

        # Step 2: Correlations under both metrics
        td_records = [correlations_td(state) for state in states]
        ent_records = [correlations_ent(state) for state in states]

        # Step 3: Sudden changes of discord and classical correlations
        sudden = _detect_changes(r0, self.evolve, times, "int", states)
        classical = _detect_changes(r0, self.evolve, times, "max", states)
        _check_closed_form(r0, self.model, self.params, sudden)

        logger.info(f"Trajectory built: {len(sudden)} sudden change(s) in discord, "
                    f"{len(classical)} in classical correlations")
        return Trajectory(model=self.model, params=self.params, times=times, states=states,
                          td_records=td_records, ent_records=ent_records,
                          sudden_changes=sudden, classical_changes=classical)


def trajectory(r0: BellDiagonal, model: Union[DynamicsModel, str], params: ChannelParams,
               t_max: float, steps: int) -> Trajectory:
    """Convenience wrapper around TrajectoryBuilder.build."""
    return TrajectoryBuilder(model, params).build(r0, t_max, steps)


@dataclass
class FreezingScanResult:
    """Freezing summary for one initial lambda_1^+ under random fields."""
    lambda1p: float
    initial: BellDiagonal
    plateau: float
    first_change: Optional[float]
    trajectory: Trajectory


def freezing_state(lambda1p: float) -> BellDiagonal:
    """
    State with lambda_1^+ = x, lambda_1^- = 1 - x and lambda_2^± = 0.

    Raises:
        InvalidSpectrum: If x is not in (1/2, 1]
    """
    if not 0.5 < lambda1p <= 1.0:
        raise InvalidSpectrum(f"lambda_1^+ = {lambda1p} outside (1/2, 1]")
    return bd_from_spectrum(BellSpectrum(l1p=lambda1p, l1m=1.0 - lambda1p, l2p=0.0, l2m=0.0))


def freezing_scaling_scan(lambda1p_values: List[float], t_max: float = math.pi / 2.0,
                          steps: int = 2000,
                          params: Optional[RandomFieldParams] = None) -> List[FreezingScanResult]:
    """
    Random-field trajectories for a family of freezing initial states.

    Larger lambda_1^+ means a larger |R22(0)|, a higher discord plateau
    |R22(0)|/2 and an earlier first sudden change.
    """
    params = params or RandomFieldParams()
    builder = TrajectoryBuilder(DynamicsModel.RANDOM_FIELD, params)
    results = []
    for lambda1p in lambda1p_values:
        initial = freezing_state(lambda1p)
        traj = builder.build(initial, t_max, steps)
        first = traj.sudden_changes[0] if traj.sudden_changes else None
        results.append(FreezingScanResult(
            lambda1p=lambda1p,
            initial=initial,
            plateau=traj.td_records[0].quantum,
            first_change=first,
            trajectory=traj,
        ))
        logger.info(f"lambda_1^+ = {lambda1p}: plateau {traj.td_records[0].quantum:.6g}, first change {first}")
    return results


if __name__ == "__main__":
    params = PhaseFlipParams(tau=5.0, alpha_abs=1.0)
    state = BellDiagonal(r11=1.0, r22=-0.6, r33=0.6)
    print(f"nu* = {phase_flip_crossing(0.6, params):.10f}")
    print(f"detected = {sudden_change_time(state, DynamicsModel.PHASE_FLIP, params)}")
