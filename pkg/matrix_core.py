"""
Small-matrix numerics for two-qubit states.

Provides a cyclic Jacobi eigen-solver for Hermitian matrices, trace norm and
trace distance, tensor products, partial traces and base-2 entropies. All
functions are pure and operate on numpy arrays of dimension 2 or 4.
"""

import logging
import math
from typing import Tuple, Union

import numpy as np

from models import (
    HERMITIAN_TOL, PSD_TOL, SUPPORT_TOL, TRACE_TOL,
    ComplexMatrix, DensityMatrix, DimensionMismatch, InvalidState, NonHermitian,
    Spectrum, Subsystem,
)

logger = logging.getLogger(__name__)

# Pauli matrices in the computational basis |0>, |1> (|0> is the +1 eigenvector of sigma_z)
IDENTITY2 = np.eye(2, dtype=complex)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=complex)
PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (PAULI_X, PAULI_Y, PAULI_Z)

JACOBI_OFF_TOL = 1e-14
JACOBI_MAX_SWEEPS = 60


def _as_square(m: ComplexMatrix) -> np.ndarray:
    arr = np.asarray(m, dtype=complex)
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"Expected a square matrix, got shape {arr.shape}")
    return arr


def check_hermitian(m: ComplexMatrix, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Return m as a complex array, raising NonHermitian if max|M - M†| exceeds tol."""
    arr = _as_square(m)
    deviation = float(np.max(np.abs(arr - arr.conj().T))) if arr.size else 0.0
    if deviation > tol:
        raise NonHermitian(f"Matrix is not Hermitian: max |M - M^dagger| = {deviation:.3e}")
    return arr


def jacobi_eigh(m: ComplexMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """
    Diagonalize a Hermitian matrix by cyclic complex Jacobi rotations.

    Each rotation first removes the phase of the pivot A[p, q] with a diagonal
    unitary and then applies a real plane rotation that zeroes it. Sweeps run
    until the off-diagonal Frobenius mass drops below 1e-14 (relative to the
    matrix norm when that exceeds one).

    Args:
        m: Hermitian matrix

    Returns:
        tuple: (eigenvalues ascending, unitary whose columns are eigenvectors)

    Raises:
        NonHermitian: If the Hermiticity check fails
    """
    a = check_hermitian(m).copy()
    n = a.shape[0]
    # Symmetrize exactly so roundoff below the tolerance does not accumulate
    a = 0.5 * (a + a.conj().T)
    v = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(a)))

    for sweep in range(JACOBI_MAX_SWEEPS):
        # Frobenius norm of the off-diagonal part
        off = float(np.linalg.norm(a - np.diag(np.diag(a))))
        if off < JACOBI_OFF_TOL * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                z = a[p, q]
                mod = abs(z)
                if mod < 1e-300:
                    continue
                # Phase step: make A[p, q] real and positive
                ph = np.conj(z) / mod
                a[:, q] *= ph
                a[q, :] *= np.conj(ph)
                v[:, q] *= ph

                app = a[p, p].real
                aqq = a[q, q].real
                theta = (aqq - app) / (2.0 * mod)
                t = (1.0 if theta >= 0 else -1.0) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c

                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * col_q
                a[:, q] = s * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * row_q
                a[q, :] = s * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0

                vec_p = v[:, p].copy()
                vec_q = v[:, q].copy()
                v[:, p] = c * vec_p - s * vec_q
                v[:, q] = s * vec_p + c * vec_q
    else:
        logger.warning(f"Jacobi eigen-solver did not converge in {JACOBI_MAX_SWEEPS} sweeps")

    values = np.real(np.diag(a))
    order = np.argsort(values, kind='stable')
    return values[order], v[:, order]


def eig_hermitian(m: ComplexMatrix) -> Spectrum:
    """
    Compute all eigenvalues of a Hermitian matrix in ascending order.

    Args:
        m: Hermitian matrix (2x2 or 4x4 in this package)

    Returns:
        Spectrum: Sorted real eigenvalues

    Raises:
        NonHermitian: If the Hermiticity check fails
    """
    values, _ = jacobi_eigh(m)
    return Spectrum(values=values)


def trace_norm(m: ComplexMatrix) -> float:
    """Schatten-1 norm of a Hermitian matrix: the sum of absolute eigenvalues."""
    return float(np.sum(np.sort(np.abs(eig_hermitian(m).values))))


def trace_norm_fast(m: np.ndarray) -> float:
    """Trace norm through LAPACK, without validation. For optimizer inner loops."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(m))))


def trace_distance(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """
    Trace distance between two states, half the trace norm of their difference.

    Raises:
        DimensionMismatch: If the matrices differ in shape
    """
    rho = _as_square(rho)
    sigma = _as_square(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"Cannot compare states of shapes {rho.shape} and {sigma.shape}")
    # Canonical operand order makes the result exactly symmetric
    if rho.tobytes() > sigma.tobytes():
        rho, sigma = sigma, rho
    return 0.5 * trace_norm(rho - sigma)


def kron(a: ComplexMatrix, b: ComplexMatrix) -> ComplexMatrix:
    """Tensor product a ⊗ b."""
    return np.kron(np.asarray(a, dtype=complex), np.asarray(b, dtype=complex))


def partial_trace(rho: DensityMatrix, keep: Union[Subsystem, str]) -> DensityMatrix:
    """
    Reduce a two-qubit state to one subsystem.

    Args:
        rho: 4x4 density matrix
        keep: Subsystem to keep ('A' or 'B')

    Returns:
        2x2 reduced density matrix

    Raises:
        DimensionMismatch: If rho is not 4x4
    """
    rho = _as_square(rho)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"Partial trace needs a 4x4 matrix, got {rho.shape}")
    keep = Subsystem(keep)
    tensor = rho.reshape(2, 2, 2, 2)
    if keep is Subsystem.A:
        return np.einsum('ijkj->ik', tensor)
    return np.einsum('ijik->jk', tensor)


def validate_density_matrix(rho: DensityMatrix) -> np.ndarray:
    """
    Check Hermiticity, unit trace and numerical positivity.

    Raises:
        NonHermitian: If the matrix is not Hermitian
        InvalidState: If the trace or spectrum is not that of a state
    """
    arr = check_hermitian(rho)
    trace = complex(np.trace(arr))
    if abs(trace - 1.0) > TRACE_TOL:
        raise InvalidState(f"Density matrix trace is {trace.real:.15g}, expected 1")
    lowest = eig_hermitian(arr).values[0]
    if lowest < -PSD_TOL:
        raise InvalidState(f"Density matrix has negative eigenvalue {lowest:.3e}")
    return arr


def is_density_matrix(rho: DensityMatrix) -> bool:
    try:
        validate_density_matrix(rho)
    except (NonHermitian, InvalidState, DimensionMismatch):
        return False
    return True


def _clamped_probabilities(values: np.ndarray) -> np.ndarray:
    if values.size and values.min() < -PSD_TOL:
        raise InvalidState(f"Eigenvalue {values.min():.3e} is below the roundoff tolerance")
    return np.clip(values, 0.0, None)


def shannon_entropy(probabilities) -> float:
    """Base-2 Shannon entropy with 0·log 0 = 0."""
    p = _clamped_probabilities(np.asarray(probabilities, dtype=float))
    nonzero = p[p > 0.0]
    return float(-np.sum(nonzero * np.log2(nonzero)))


def von_neumann_entropy(rho: DensityMatrix) -> float:
    """
    Base-2 von Neumann entropy S(rho) = -Tr(rho log2 rho).

    Eigenvalues in [-1e-10, 0) count as zero; more negative ones raise InvalidState.
    """
    return shannon_entropy(eig_hermitian(rho).values)


def relative_entropy(rho: DensityMatrix, sigma: DensityMatrix) -> float:
    """
    Quantum relative entropy S(rho||sigma) = -Tr(rho log2 sigma) - S(rho).

    Returns +inf when the support of rho is not contained in that of sigma.

    Raises:
        DimensionMismatch: If the matrices differ in shape
    """
    rho = _as_square(rho)
    sigma = _as_square(sigma)
    if rho.shape != sigma.shape:
        raise DimensionMismatch(f"Cannot compare states of shapes {rho.shape} and {sigma.shape}")

    sigma_values, sigma_vectors = jacobi_eigh(sigma)
    # Weight of rho on each eigenvector of sigma
    weights = np.real(np.einsum('ik,ij,jk->k', sigma_vectors.conj(), rho, sigma_vectors))

    cross = 0.0
    for s_k, w_k in zip(sigma_values, weights):
        if w_k <= SUPPORT_TOL:
            continue
        if s_k < SUPPORT_TOL:
            return math.inf
        cross -= w_k * math.log2(s_k)

    value = cross - von_neumann_entropy(rho)
    return max(value, 0.0)


def random_unitary(dim: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a complex Ginibre matrix."""
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / math.sqrt(2.0)
    q, r = np.linalg.qr(z)
    phases = np.diag(r) / np.abs(np.diag(r))
    return q * phases


def random_density_matrix(dim: int, rng: np.random.Generator, rank: int = None) -> np.ndarray:
    """Random full-rank (or given-rank) density matrix from the Ginibre ensemble."""
    rank = dim if rank is None else rank
    g = rng.standard_normal((dim, rank)) + 1j * rng.standard_normal((dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


if __name__ == "__main__":
    bell = np.zeros((4, 4), dtype=complex)
    bell[0, 0] = bell[0, 3] = bell[3, 0] = bell[3, 3] = 0.5
    print(f"Spectrum of |2+><2+|: {eig_hermitian(bell).values}")
    print(f"|| bell - I/4 ||_1 = {trace_norm(bell - np.eye(4) / 4):.6f}")
    print(f"S(I/4) = {von_neumann_entropy(np.eye(4) / 4):.6f}")
