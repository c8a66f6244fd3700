#!/usr/bin/env python3
"""
Test Suite for Small-Matrix Numerics

Tests the Jacobi eigen-solver, trace norm and distance, tensor products,
partial traces and entropies.
"""

import math

import numpy as np
import pytest

from matrix_core import (
    IDENTITY2, PAULI_X, PAULI_Y, PAULI_Z, eig_hermitian, is_density_matrix, jacobi_eigh,
    kron, partial_trace, random_density_matrix, random_unitary, relative_entropy,
    shannon_entropy, trace_distance, trace_norm, trace_norm_fast, validate_density_matrix,
    von_neumann_entropy,
)
from bell_states import bd_to_matrix, sample_bd
from models import BellDiagonal, DimensionMismatch, InvalidState, NonHermitian
from trace_correlations import closest_classical, td_discord


def random_hermitian(rng, dim=4):
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    return g + g.conj().T


def bell_projector_2p():
    psi = np.array([1, 0, 0, 1], dtype=complex) / math.sqrt(2)
    return np.outer(psi, psi.conj())


def test_eig_hermitian_known_spectra():
    """Test diagonal and Pauli spectra."""
    assert np.allclose(eig_hermitian(np.diag([4.0, 2.0, 3.0, 1.0])).values, [1, 2, 3, 4])
    assert np.allclose(eig_hermitian(PAULI_X).values, [-1, 1])
    assert np.allclose(eig_hermitian(PAULI_Y).values, [-1, 1])


def test_eig_hermitian_trace_identity():
    """Test that eigenvalues sum to the trace of random Hermitian matrices."""
    rng = np.random.default_rng(11)
    for _ in range(50):
        m = random_hermitian(rng)
        assert abs(np.sum(eig_hermitian(m).values) - np.trace(m).real) < 1e-10


def test_eig_hermitian_recovers_rotated_diagonal():
    """Test U D U^dagger decomposition recovery."""
    rng = np.random.default_rng(12)
    for _ in range(50):
        d = np.sort(rng.uniform(-2, 2, 4))
        u = random_unitary(4, rng)
        m = u @ np.diag(d) @ u.conj().T
        assert np.allclose(eig_hermitian(m).values, d, atol=1e-9)


def test_eig_hermitian_random_density_matrices():
    """Test the solver on Ginibre states, where diagonal mass nearly exhausts the norm."""
    rng = np.random.default_rng(29)
    for _ in range(200):
        rho = random_density_matrix(4, rng)
        values = eig_hermitian(rho).values
        assert np.allclose(values, np.linalg.eigvalsh(rho), atol=1e-10)
        assert von_neumann_entropy(rho) >= 0.0
        assert is_density_matrix(rho)


def test_trace_distance_bell_diagonal_differences():
    """Test distances between sampled Bell diagonal states and their classical neighbours."""
    for r in sample_bd(200, seed=21):
        rho = bd_to_matrix(r)
        chi = bd_to_matrix(closest_classical(r))
        expected = 0.5 * np.sum(np.abs(np.linalg.eigvalsh(rho - chi)))
        assert trace_distance(rho, chi) == pytest.approx(expected, abs=1e-10)

    r = BellDiagonal(r11=-0.0425, r22=0.2405, r33=-0.5290)
    assert trace_distance(bd_to_matrix(r), bd_to_matrix(closest_classical(r))) == pytest.approx(
        td_discord(r), abs=1e-12)


def test_jacobi_eigenvectors():
    """Test that Jacobi eigenvectors are orthonormal and diagonalize the input."""
    rng = np.random.default_rng(13)
    m = random_hermitian(rng)
    values, vectors = jacobi_eigh(m)
    assert np.allclose(vectors.conj().T @ vectors, np.eye(4), atol=1e-12)
    assert np.allclose(m @ vectors, vectors * values, atol=1e-10)
    assert np.allclose(values, np.linalg.eigvalsh(m), atol=1e-10)


def test_non_hermitian_rejected():
    """Test NonHermitian for a non-Hermitian input."""
    with pytest.raises(NonHermitian):
        eig_hermitian(np.array([[0, 1], [0, 0]], dtype=complex))
    with pytest.raises(NonHermitian):
        trace_norm(np.array([[1, 1j], [1j, 1]]))


def test_trace_norm_examples():
    """Test trace norm of zero, diagonal and Bell minus mixed matrices."""
    assert trace_norm(np.zeros((4, 4))) == 0.0
    assert trace_norm(np.diag([0.5, -0.5, 0.0, 0.0])) == pytest.approx(1.0)
    assert trace_norm(bell_projector_2p() - np.eye(4) / 4) == pytest.approx(1.5, abs=1e-12)


def test_trace_norm_bounds_trace_and_fast_path_agrees():
    """Test ||M||_1 >= |Tr M| and the LAPACK path."""
    rng = np.random.default_rng(14)
    for _ in range(100):
        m = random_hermitian(rng)
        norm = trace_norm(m)
        assert norm >= abs(np.trace(m).real) - 1e-12
        assert trace_norm_fast(m) == pytest.approx(norm, abs=1e-10)


def test_trace_distance_examples():
    """Test identity, orthogonal states and Bell diagonal spectra."""
    rng = np.random.default_rng(15)
    rho = random_density_matrix(4, rng)
    assert trace_distance(rho, rho) == pytest.approx(0.0, abs=1e-12)

    zero = np.diag([1.0, 0.0])
    one = np.diag([0.0, 1.0])
    assert trace_distance(zero, one) == pytest.approx(1.0)

    # Bell-diagonal states share an eigenbasis
    lam = np.array([0.1, 0.2, 0.3, 0.4])
    lam2 = np.array([0.25, 0.25, 0.4, 0.1])
    basis = [np.array(v, dtype=complex) / math.sqrt(2) for v in
             ([0, 1, 1, 0], [0, 1, -1, 0], [1, 0, 0, 1], [1, 0, 0, -1])]
    rho = sum(l * np.outer(v, v.conj()) for l, v in zip(lam, basis))
    sigma = sum(l * np.outer(v, v.conj()) for l, v in zip(lam2, basis))
    assert trace_distance(rho, sigma) == pytest.approx(0.5 * np.sum(np.abs(lam - lam2)), abs=1e-12)


def test_trace_distance_dimension_mismatch():
    """Test DimensionMismatch on differently sized states."""
    with pytest.raises(DimensionMismatch):
        trace_distance(np.eye(2) / 2, np.eye(4) / 4)


def test_trace_distance_is_a_metric():
    """Test symmetry, triangle inequality and range on sampled states."""
    rng = np.random.default_rng(16)
    for _ in range(100):
        a, b, c = (random_density_matrix(4, rng) for _ in range(3))
        d_ab = trace_distance(a, b)
        assert d_ab == trace_distance(b, a)
        assert 0.0 <= d_ab <= 1.0 + 1e-12
        assert d_ab <= trace_distance(a, c) + trace_distance(c, b) + 1e-10


def test_kron():
    """Test identity, ZZ and the Pauli product identity."""
    assert np.allclose(kron(IDENTITY2, IDENTITY2), np.eye(4))
    assert np.allclose(kron(PAULI_Z, PAULI_Z), np.diag([1, -1, -1, 1]))
    assert np.allclose(kron(PAULI_X, PAULI_X) @ kron(PAULI_Y, PAULI_Y), -kron(PAULI_Z, PAULI_Z))


def test_partial_trace():
    """Test marginals of a Bell state, a product state and a random state."""
    bell = bell_projector_2p()
    assert np.allclose(partial_trace(bell, 'A'), IDENTITY2 / 2)
    assert np.allclose(partial_trace(bell, 'B'), IDENTITY2 / 2)

    rng = np.random.default_rng(17)
    gamma = random_density_matrix(2, rng)
    tau = random_density_matrix(2, rng)
    assert np.allclose(partial_trace(kron(gamma, tau), 'A'), gamma)
    assert np.allclose(partial_trace(kron(gamma, tau), 'B'), tau)

    rho = random_density_matrix(4, rng)
    assert abs(np.trace(partial_trace(rho, 'A')) - 1.0) < 1e-12

    with pytest.raises(DimensionMismatch):
        partial_trace(np.eye(2) / 2, 'A')


def test_density_matrix_validation():
    """Test validity checks for states and non-states."""
    assert is_density_matrix(np.eye(4) / 4)
    assert not is_density_matrix(np.eye(4))
    assert not is_density_matrix(np.diag([1.5, -0.5]))
    with pytest.raises(InvalidState):
        validate_density_matrix(np.diag([1.5, -0.5]))


def test_von_neumann_entropy():
    """Test entropy of pure, maximally mixed and diagonal states."""
    assert von_neumann_entropy(bell_projector_2p()) == pytest.approx(0.0, abs=1e-12)
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    assert von_neumann_entropy(np.diag([0.2, 0.0, 0.8, 0.0])) == pytest.approx(0.721928, abs=1e-6)


def test_entropy_clamping():
    """Test that roundoff negatives are clamped and real negatives raise."""
    assert shannon_entropy([1.0, -1e-11]) == pytest.approx(0.0)
    with pytest.raises(InvalidState):
        shannon_entropy([1.1, -0.1])


def test_relative_entropy():
    """Test S(rho||rho), divergence on pure sigma and a known value."""
    rng = np.random.default_rng(18)
    rho = random_density_matrix(4, rng)
    assert relative_entropy(rho, rho) == pytest.approx(0.0, abs=1e-10)
    assert relative_entropy(np.eye(4) / 4, bell_projector_2p()) == math.inf
    assert relative_entropy(np.diag([0.5, 0.5, 0.0, 0.0]), np.eye(4) / 4) == pytest.approx(1.0, abs=1e-12)


def test_relative_entropy_positive():
    """Test non-negativity on random pairs."""
    rng = np.random.default_rng(19)
    for _ in range(50):
        rho = random_density_matrix(4, rng)
        sigma = random_density_matrix(4, rng)
        assert relative_entropy(rho, sigma) > 0.0
