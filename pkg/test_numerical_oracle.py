#!/usr/bin/env python3
"""
Test Suite for the Numerical Oracle

Tests the simplex minimizer and checks the brute-force product, measurement
and classical-state searches against the closed forms.
"""

import math

import numpy as np
import pytest

from bell_states import bd_to_matrix, product_to_matrix, sample_bd, werner_state
from matrix_core import trace_distance
from models import BellDiagonal, OptimizerConfig, ProductState, VerifyRecord
from numerical_oracle import (
    classical_state, measured_state, min_classical_distance, min_measurement_distance,
    min_product_distance, nelder_mead, summarize, verify_sweep,
)
from trace_correlations import closest_classical, near_bell_vertex, td_classical, td_discord, td_total

FAST = OptimizerConfig(starts=4, seed=7)


def bd(*values):
    return BellDiagonal.from_array(values)


def test_nelder_mead_quadratic_bowl():
    """Test convergence to the center of a shifted bowl."""
    cfg = OptimizerConfig(f_tol=1e-20, x_tol=1e-12)
    result = nelder_mead(lambda x: float(np.sum((x - 0.3) ** 2)), np.zeros(3), cfg)
    assert result.converged
    assert np.allclose(result.x, 0.3, atol=1e-6)
    assert result.fun < 1e-12


def test_nelder_mead_non_smooth_vertex():
    """Test the minimum of |x| in one dimension."""
    result = nelder_mead(lambda x: abs(float(x[0])), [0.7], OptimizerConfig())
    assert result.fun < 1e-6
    assert abs(result.x[0]) < 1e-6
    assert result.converged


def test_nelder_mead_rosenbrock():
    """Test the Rosenbrock valley from the classic start point."""
    def rosenbrock(x):
        return float((1.0 - x[0]) ** 2 + 100.0 * (x[1] - x[0] ** 2) ** 2)

    cfg = OptimizerConfig(f_tol=1e-16, x_tol=1e-12, max_iters=5000)
    result = nelder_mead(rosenbrock, [-1.2, 1.0], cfg)
    assert result.fun < 1e-8
    assert np.allclose(result.x, [1.0, 1.0], atol=1e-3)


def test_nelder_mead_budget_exhausted():
    """Test that running out of iterations returns the best vertex with the flag cleared."""
    result = nelder_mead(lambda x: float(np.sum(x ** 2)), [1.0, 1.0], OptimizerConfig(max_iters=1))
    assert not result.converged
    assert result.iterations == 1
    assert result.fun <= 2.0


def test_nelder_mead_deterministic():
    """Test that identical inputs give identical results."""
    def objective(x):
        return float(abs(x[0] - 0.2) + (x[1] + 0.1) ** 2)

    first = nelder_mead(objective, [0.5, 0.5], OptimizerConfig())
    second = nelder_mead(objective, [0.5, 0.5], OptimizerConfig())
    assert np.array_equal(first.x, second.x)
    assert first.fun == second.fun


def test_min_product_distance_product_input():
    """Test distance zero and witness recovery for a product input."""
    product = ProductState.from_arrays((0.3, -0.2, 0.5), (0.1, 0.4, -0.2))
    value, witness = min_product_distance(product_to_matrix(product), FAST)
    assert value < 1e-6
    assert np.allclose(witness.a.to_array(), product.a.to_array(), atol=1e-6)
    assert np.allclose(witness.b.to_array(), product.b.to_array(), atol=1e-6)


def test_min_product_distance_werner():
    """Test the 3r/4 branch of the Werner line."""
    value, _ = min_product_distance(bd_to_matrix(werner_state(0.4)), FAST)
    assert value == pytest.approx(0.3, abs=1e-6)


def test_min_product_distance_bell_diagonal_samples():
    """Test the oracle against the axis family away from the Bell vertices."""
    for r in sample_bd(5, seed=41):
        value, witness = min_product_distance(bd_to_matrix(r), FAST)
        analytic = td_total(r).value
        # the closed-form witness is a start, so the oracle never ends above it
        assert value <= analytic + 1e-9
        if not near_bell_vertex(r):
            assert value >= analytic - 1e-6
        assert witness.a.norm() <= 1.0 + 1e-12
        assert witness.b.norm() <= 1.0 + 1e-12


def test_min_product_distance_beats_axis_family_near_vertex():
    """Test that an off-axis product state is found below the axis-family minimum."""
    r = bd(0.95136, 0.85574, -0.88304)
    assert near_bell_vertex(r)
    value, witness = min_product_distance(bd_to_matrix(r), FAST)
    assert value < td_total(r).value - 1e-3
    assert trace_distance(bd_to_matrix(r), product_to_matrix(witness)) == pytest.approx(value, abs=1e-9)
    # the better witness mixes two axes
    a = np.abs(witness.a.to_array())
    assert np.sort(a)[1] > 0.1


def test_min_product_distance_to_classical_state():
    """Test that the closest product state to chi_r sits at distance C_TD."""
    for r in (bd(0.6, 0, 0.4), bd(1, -0.6, 0.6), bd(0.1, -0.7, 0.3)):
        value, _ = min_product_distance(bd_to_matrix(closest_classical(r)), FAST)
        assert value == pytest.approx(td_classical(r), abs=1e-5)


def test_measured_state_is_classical_and_trace_preserving():
    """Test that a measurement keeps the trace and kills coherences along the axis."""
    rho = bd_to_matrix(bd(1, -0.6, 0.6))
    measured = measured_state(rho, math.pi / 2, 0.0)
    assert np.trace(measured).real == pytest.approx(1.0)
    assert np.allclose(measured, bd_to_matrix(bd(1, 0, 0)), atol=1e-14)


def test_min_measurement_distance_examples():
    """Test the measurement oracle on a classical state, the freezing state and a Werner state."""
    test_cases = [
        {"r": (1, 0, 0), "expected": 0.0, "tol": 1e-8},
        {"r": (1, -0.6, 0.6), "expected": 0.3, "tol": 1e-6},
        {"r": (0.8, -0.8, 0.8), "expected": 0.4, "tol": 1e-6},
    ]
    for case in test_cases:
        value, axis = min_measurement_distance(bd_to_matrix(bd(*case["r"])), FAST)
        assert value == pytest.approx(case["expected"], abs=case["tol"]), case["r"]
        assert 0.0 <= axis.theta <= math.pi
        assert 0.0 <= axis.phi < 2.0 * math.pi


def test_min_measurement_distance_axis_attains_discord():
    """Test that the returned axis reproduces the reported disturbance."""
    # the objective is flat near the z axis here, so only the value pins the axis down
    r = bd(0.2, -0.3, 0.9)
    rho = bd_to_matrix(r)
    value, axis = min_measurement_distance(rho, FAST)
    assert value == pytest.approx(td_discord(r), abs=1e-6)
    disturbance = trace_distance(rho, measured_state(rho, axis.theta, axis.phi))
    assert disturbance == pytest.approx(value, abs=1e-9)


def test_classical_state_parameterization():
    """Test that the 9-parameter family yields density matrices."""
    chi = classical_state(np.array([0.4, 1.1, 1.7, 0.9, 0.9, 0.0, 0.1, -0.2, 0.3]))
    assert np.trace(chi).real == pytest.approx(1.0)
    assert np.min(np.linalg.eigvalsh(chi)) >= -1e-12


def test_min_classical_distance_examples():
    """Test the classical-state oracle on classical and Bell diagonal inputs."""
    value, witness = min_classical_distance(bd_to_matrix(bd(1, 0, 0)), FAST)
    assert value < 1e-6
    assert np.trace(witness).real == pytest.approx(1.0)

    for r in (bd(1, -0.6, 0.6), bd(0.5, 0.3, -0.2)):
        rho = bd_to_matrix(r)
        value, _ = min_classical_distance(rho, FAST)
        measured, _ = min_measurement_distance(rho, FAST)
        assert value <= measured + 1e-6
        assert value == pytest.approx(td_discord(r), abs=1e-5)


def test_summarize_counts_undercuts():
    """Test aggregate statistics on hand-made records."""
    records = [
        VerifyRecord(state=bd(0.1, 0, 0), analytic_T=0.5, oracle_T=0.5 + 1e-7, analytic_D=0.1, oracle_D=0.1),
        VerifyRecord(state=bd(0.2, 0, 0), analytic_T=0.5, oracle_T=0.49, analytic_D=0.1, oracle_D=0.1 + 2e-6),
        VerifyRecord(state=bd(0.95136, 0.85574, -0.88304), analytic_T=0.654877, oracle_T=0.653572,
                     analytic_D=0.43, oracle_D=0.43, near_vertex=True),
    ]
    summary = summarize(records, seed=5)
    assert summary.undercut_count == 2
    assert summary.off_vertex_undercut_count == 1
    assert not summary.passed
    assert summary.max_abs_diff_T == pytest.approx(0.01)
    assert summary.max_abs_diff_D == pytest.approx(2e-6)
    assert summary.agree_fraction_T == pytest.approx(1.0 / 3.0)


def test_verify_sweep_small():
    """Test a short sweep for agreement and reproducibility."""
    summary = verify_sweep(3, seed=11, cfg=FAST)
    assert summary.samples == 3
    assert summary.passed
    assert summary.max_abs_diff_T <= 1e-4
    assert summary.max_abs_diff_D < 1e-5

    again = verify_sweep(3, seed=11, cfg=FAST)
    assert again.records == summary.records


def test_verify_sweep_independent_of_workers():
    """Test that worker processes reproduce the in-process sweep exactly."""
    serial = verify_sweep(2, seed=12, cfg=FAST, workers=1)
    parallel = verify_sweep(2, seed=12, cfg=FAST, workers=2)
    assert parallel.records == serial.records


def test_verify_sweep_rejects_empty_count():
    """Test that a sweep needs at least one sample."""
    with pytest.raises(ValueError):
        verify_sweep(0, seed=1, cfg=FAST)


@pytest.mark.slow
def test_verify_sweep_thousand_states():
    """Test 10^3 states: undercuts only near the Bell vertices and broad agreement."""
    summary = verify_sweep(1000, seed=42, cfg=OptimizerConfig(), workers=4)
    assert summary.off_vertex_undercut_count == 0
    assert all(rec.near_vertex for rec in summary.records if rec.oracle_T < rec.analytic_T - 1e-6)
    assert summary.agree_fraction_T >= 0.95
    assert summary.max_abs_diff_D < 1e-5


@pytest.mark.slow
def test_classical_oracle_matches_discord_on_samples():
    """Test the classical-state oracle against R_int / 2 on 10^2 states."""
    for r in sample_bd(100, seed=43):
        value, _ = min_classical_distance(bd_to_matrix(r), FAST)
        assert value == pytest.approx(td_discord(r), abs=1e-5)
