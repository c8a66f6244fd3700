#!/usr/bin/env python3
"""
Test Suite for Bell Diagonal States

Tests coefficient/spectrum conversions, matrix constructors, read-out and
the seeded sampler.
"""

import numpy as np
import pytest
from pydantic import ValidationError

from bell_states import (
    BELL_LABELS, CORRELATORS, bd_from_spectrum, bd_spectrum, bd_to_matrix, bd_validate,
    bell_projector, bell_vector, extract_bloch, extract_r, make_rng, product_to_matrix,
    rank2_state, rejection_acceptance, sample_bd, sample_bd_array, werner_state,
)
from matrix_core import IDENTITY2, PAULIS, is_density_matrix, kron, partial_trace
from models import (
    BellDiagonal, BellSpectrum, BlochQubit, InvalidBloch, InvalidSpectrum, InvalidState, ProductState,
)


def bd(*values):
    return BellDiagonal.from_array(values)


def test_bd_validate():
    """Test physicality of representative coefficient triples."""
    test_cases = [
        {"name": "maximally mixed", "r": (0, 0, 0), "valid": True},
        {"name": "outside tetrahedron", "r": (1, 1, 1), "valid": False},
        {"name": "freezing state", "r": (1, -0.6, 0.6), "valid": True},
        {"name": "Bell state 2+", "r": (1, -1, 1), "valid": True},
        {"name": "Bell state 1+", "r": (1, 1, -1), "valid": True},
    ]
    for case in test_cases:
        assert bd_validate(bd(*case["r"])) is case["valid"], case["name"]


def test_bd_spectrum_examples():
    """Test Bell eigenvalues against known states."""
    test_cases = [
        {"r": (1, -0.6, 0.6), "lam": (0.2, 0.0, 0.8, 0.0)},
        {"r": (0.6, 0, 0.4), "lam": (0.3, 0.0, 0.5, 0.2)},
        {"r": (0.8, 0.8, -1), "lam": (0.9, 0.1, 0.0, 0.0)},
        {"r": (0, 0, 0), "lam": (0.25, 0.25, 0.25, 0.25)},
    ]
    for case in test_cases:
        assert np.allclose(bd_spectrum(bd(*case["r"])).to_array(), case["lam"], atol=1e-15)


def test_bd_from_spectrum_examples():
    """Test the inverse relation on known spectra."""
    r = bd_from_spectrum(BellSpectrum(l1p=0.9, l1m=0.1, l2p=0.0, l2m=0.0))
    assert r.as_tuple() == pytest.approx((0.8, 0.8, -1.0), abs=1e-15)
    r = bd_from_spectrum(BellSpectrum(l1p=0.25, l1m=0.25, l2p=0.25, l2m=0.25))
    assert r.as_tuple() == pytest.approx((0.0, 0.0, 0.0), abs=1e-15)


def test_bd_from_spectrum_rejects_invalid():
    """Test InvalidSpectrum for negative entries and a wrong sum."""
    with pytest.raises(InvalidSpectrum):
        bd_from_spectrum(BellSpectrum(l1p=1.2, l1m=-0.2, l2p=0.0, l2m=0.0))
    with pytest.raises(InvalidSpectrum):
        bd_from_spectrum(BellSpectrum(l1p=0.5, l1m=0.5, l2p=0.5, l2m=0.0))


def test_spectrum_roundtrip():
    """Test bd_from_spectrum(bd_spectrum(r)) = r on random valid states."""
    for row in sample_bd_array(10_000, seed=3):
        r = BellDiagonal.from_array(row)
        spectrum = bd_spectrum(r)
        assert spectrum.is_valid()
        assert np.allclose(bd_from_spectrum(spectrum).to_array(), row, atol=1e-14, rtol=0)


def test_bd_to_matrix_examples():
    """Test the maximally mixed state and a Bell projector."""
    assert np.allclose(bd_to_matrix(bd(0, 0, 0)), np.eye(4) / 4)
    assert np.allclose(bd_to_matrix(bd(1, -1, 1)), bell_projector("2+"))


def test_bd_to_matrix_bell_basis_diagonal():
    """Test that the Bell-basis diagonal equals the spectrum and Pauli read-out gives R."""
    for row in sample_bd_array(200, seed=4):
        r = BellDiagonal.from_array(row)
        rho = bd_to_matrix(r)
        diagonal = [np.real(bell_vector(label).conj() @ rho @ bell_vector(label)) for label in BELL_LABELS]
        assert np.allclose(diagonal, bd_spectrum(r).to_array(), atol=1e-14)
        for i, correlator in enumerate(CORRELATORS):
            assert np.real(np.trace(rho @ correlator)) == pytest.approx(row[i], abs=1e-14)
        assert is_density_matrix(rho)
        assert np.allclose(partial_trace(rho, 'A'), IDENTITY2 / 2)
        assert np.allclose(partial_trace(rho, 'B'), IDENTITY2 / 2)


def test_bd_to_matrix_names_violated_eigenvalue():
    """Test InvalidState with the offending Bell eigenvalue in the message."""
    with pytest.raises(InvalidState, match="lambda_1-"):
        bd_to_matrix(bd(1, 1, 1))


def test_bell_state_read_out():
    """Test R of the four Bell states."""
    expected = {"1+": (1, 1, -1), "1-": (-1, -1, -1), "2+": (1, -1, 1), "2-": (-1, 1, 1)}
    for label, r in expected.items():
        assert extract_r(bell_projector(label)).as_tuple() == pytest.approx(r, abs=1e-14)


def test_extract_r_roundtrip():
    """Test extract_r on mixed and Bell diagonal inputs."""
    assert extract_r(np.eye(4) / 4).as_tuple() == pytest.approx((0, 0, 0), abs=1e-15)
    r = bd(0.3, -0.2, 0.1)
    assert extract_r(bd_to_matrix(r)).as_tuple() == pytest.approx(r.as_tuple(), abs=1e-14)


def test_product_to_matrix():
    """Test product constructors and Bloch read-out."""
    assert np.allclose(product_to_matrix(ProductState.maximally_mixed()), np.eye(4) / 4)
    up = ProductState.from_arrays((0, 0, 1), (0, 0, 1))
    assert np.allclose(product_to_matrix(up), np.diag([1, 0, 0, 0]))

    rng = np.random.default_rng(5)
    for _ in range(50):
        a = rng.standard_normal(3)
        a *= rng.uniform() / np.linalg.norm(a)
        b = rng.standard_normal(3)
        b *= rng.uniform() / np.linalg.norm(b)
        rho = product_to_matrix(ProductState.from_arrays(a, b))
        read_a, read_b = extract_bloch(rho)
        assert np.allclose(read_a, a, atol=1e-14)
        assert np.allclose(read_b, b, atol=1e-14)
        for i, pauli in enumerate(PAULIS):
            assert np.real(np.trace(rho @ kron(pauli, IDENTITY2))) == pytest.approx(a[i], abs=1e-14)


def test_product_to_matrix_rejects_long_bloch_vector():
    """Test InvalidBloch for a vector outside the unit ball."""
    with pytest.raises(InvalidBloch):
        product_to_matrix(ProductState.from_arrays((1.0, 0.5, 0.0), (0.0, 0.0, 0.0)))


def test_bloch_norm_enforced_on_construction():
    """Test that the unit-ball bound holds for every way of building a Bloch vector."""
    with pytest.raises(InvalidBloch):
        BlochQubit.from_array((0.0, 0.8, 0.8))
    with pytest.raises(InvalidBloch):
        ProductState.from_arrays((0.0, 0.0, 0.0), (1.0 + 1e-9, 0.0, 0.0))
    with pytest.raises(ValidationError):
        BlochQubit(v=(0.6, 0.6, 0.6))
    with pytest.raises(ValidationError):
        ProductState(a=BlochQubit(v=(0.0, 0.0, 0.0)), b={"v": (0.0, 1.1, 0.0)})

    edge = BlochQubit.from_array((0.0, 0.0, 1.0 + 1e-13))
    assert edge.norm() == pytest.approx(1.0)


def test_families():
    """Test Werner and rank-2 constructors."""
    assert werner_state(0.5).as_tuple() == (0.5, -0.5, 0.5)
    assert rank2_state(0.3).as_tuple() == (0.3, -0.3, 1.0)
    for x in np.linspace(0, 1, 11):
        assert bd_validate(werner_state(float(x)))
        assert bd_validate(rank2_state(float(x)))


def test_sample_bd_valid_and_deterministic():
    """Test that samples are valid and reproducible for a fixed seed."""
    states = sample_bd(1000, seed=42)
    assert len(states) == 1000
    assert all(bd_validate(s) for s in states)
    assert sample_bd(1000, seed=42) == states
    assert sample_bd(10, seed=43) != states[:10]


def test_sample_bd_streams_are_independent():
    """Test that different streams of one seed differ and each is reproducible."""
    a = sample_bd_array(5, seed=1, stream=0)
    b = sample_bd_array(5, seed=1, stream=1)
    assert not np.allclose(a, b)
    assert np.array_equal(a, sample_bd_array(5, seed=1, stream=0))
    assert make_rng(1, 2).uniform() == make_rng(1, 2).uniform()


def test_sample_bd_rejects_empty_count():
    """Test that a non-positive count is refused."""
    with pytest.raises(ValueError):
        sample_bd(0, seed=1)


def test_rejection_acceptance_is_one_third():
    """Test the tetrahedron/cube volume ratio."""
    assert rejection_acceptance(100_000, seed=9) == pytest.approx(1.0 / 3.0, rel=0.05)


def test_uniformity_of_samples():
    """Test that the sample mean sits at the tetrahedron centroid."""
    samples = sample_bd_array(20_000, seed=10)
    assert np.allclose(samples.mean(axis=0), 0.0, atol=0.02)
