"""
Bell diagonal states of two qubits.

Conversions between the correlation-coefficient form
rho = (I⊗I + sum_i R_ii sigma_i⊗sigma_i)/4 and the Bell-basis spectrum,
matrix constructors for Bell diagonal and product states, coefficient
read-out from arbitrary two-qubit matrices, and seeded uniform sampling of
the physical tetrahedron.

Bell basis: |1±> = (|01> ± |10>)/√2, |2±> = (|00> ± |11>)/√2, computational
ordering |00>, |01>, |10>, |11> with |0> the +1 eigenvector of sigma_z.
"""

import logging
import math
from typing import List, Optional, Tuple

import numpy as np

from matrix_core import IDENTITY2, PAULIS, kron
from models import (
    BELL_EIGEN_TOL, BLOCH_TOL, BellDiagonal, BellSpectrum, DensityMatrix,
    DimensionMismatch, InvalidBloch, InvalidSpectrum, InvalidState, ProductState,
)

logger = logging.getLogger(__name__)

# sigma_i ⊗ sigma_i for i = x, y, z
CORRELATORS = tuple(kron(p, p) for p in PAULIS)
IDENTITY4 = np.eye(4, dtype=complex)

# Sign patterns (<XX>, <YY>, <ZZ>) of |1+>, |1->, |2+>, |2->
BELL_SIGNS = np.array([
    [1.0, 1.0, -1.0],
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, 1.0],
    [-1.0, 1.0, 1.0],
])
BELL_LABELS = ("1+", "1-", "2+", "2-")


def bell_vector(label: str) -> np.ndarray:
    """State vector of a Bell state labelled '1+', '1-', '2+' or '2-'."""
    s = 1.0 / math.sqrt(2.0)
    vectors = {
        "1+": np.array([0, s, s, 0], dtype=complex),
        "1-": np.array([0, s, -s, 0], dtype=complex),
        "2+": np.array([s, 0, 0, s], dtype=complex),
        "2-": np.array([s, 0, 0, -s], dtype=complex),
    }
    if label not in vectors:
        raise ValueError(f"Unknown Bell state '{label}'. Valid labels: {list(vectors)}")
    return vectors[label]


def bell_projector(label: str) -> DensityMatrix:
    psi = bell_vector(label)
    return np.outer(psi, psi.conj())


def _spectrum_array(r: np.ndarray) -> np.ndarray:
    return 0.25 * (1.0 + BELL_SIGNS @ r)


def bd_spectrum(r: BellDiagonal) -> BellSpectrum:
    """
    Bell-basis eigenvalues of a Bell diagonal state.

    lambda_1± = (1 ± R11 ± R22 - R33)/4 and lambda_2± = (1 ± R11 ∓ R22 + R33)/4,
    the inverse of R11 = -1 + 2(l1p + l2p), R22 = -1 + 2(l1p + l2m),
    R33 = -1 + 2(l2p + l2m). No validity check is made here.
    """
    return BellSpectrum.from_array(_spectrum_array(r.to_array()))


def bd_validate(r: BellDiagonal) -> bool:
    """True iff all four Bell eigenvalues are >= -1e-12 (inside the tetrahedron)."""
    return bool(np.all(_spectrum_array(r.to_array()) >= -BELL_EIGEN_TOL))


def require_valid(r: BellDiagonal) -> None:
    """
    Raise InvalidState naming the most negative Bell eigenvalue if r is unphysical.
    """
    values = _spectrum_array(r.to_array())
    worst = int(np.argmin(values))
    if values[worst] < -BELL_EIGEN_TOL:
        raise InvalidState(
            f"State {r.as_tuple()} is unphysical: lambda_{BELL_LABELS[worst]} = {values[worst]:.6g} < 0"
        )


def bd_from_spectrum(s: BellSpectrum) -> BellDiagonal:
    """
    Correlation coefficients from Bell-basis eigenvalues.

    Raises:
        InvalidSpectrum: If an eigenvalue is negative or the sum differs from one
    """
    lam = s.to_array()
    if np.any(lam < -BELL_EIGEN_TOL):
        raise InvalidSpectrum(f"Negative Bell eigenvalue in {tuple(lam)}")
    if abs(lam.sum() - 1.0) > BELL_EIGEN_TOL:
        raise InvalidSpectrum(f"Bell eigenvalues sum to {lam.sum():.15g}, expected 1")
    l1p, l1m, l2p, l2m = lam
    return BellDiagonal.from_array((
        -1.0 + 2.0 * (l1p + l2p),
        -1.0 + 2.0 * (l1p + l2m),
        -1.0 + 2.0 * (l2p + l2m),
    ))


def bd_matrix_unchecked(r: np.ndarray) -> np.ndarray:
    """(I + sum_i r_i sigma_i⊗sigma_i)/4 without a physicality check."""
    return 0.25 * (IDENTITY4 + r[0] * CORRELATORS[0] + r[1] * CORRELATORS[1] + r[2] * CORRELATORS[2])


def bd_to_matrix(r: BellDiagonal) -> DensityMatrix:
    """
    4x4 density matrix of a Bell diagonal state.

    Raises:
        InvalidState: If r lies outside the physical tetrahedron
    """
    require_valid(r)
    return bd_matrix_unchecked(r.to_array())


def bloch_matrix(v) -> np.ndarray:
    """Single-qubit operator (I + v·sigma)/2."""
    v = np.asarray(v, dtype=float)
    return 0.5 * (IDENTITY2 + v[0] * PAULIS[0] + v[1] * PAULIS[1] + v[2] * PAULIS[2])


def product_matrix_unchecked(a, b) -> np.ndarray:
    return kron(bloch_matrix(a), bloch_matrix(b))


def product_to_matrix(p: ProductState) -> DensityMatrix:
    """
    Density matrix of a product state from its two Bloch vectors.

    Raises:
        InvalidBloch: If either Bloch vector is longer than 1 + 1e-12
    """
    for name, qubit in (("a", p.a), ("b", p.b)):
        if qubit.norm() > 1.0 + BLOCH_TOL:
            raise InvalidBloch(f"Bloch vector {name} = {qubit.v} has norm {qubit.norm():.12g} > 1")
    return product_matrix_unchecked(p.a.to_array(), p.b.to_array())


def extract_r(rho: DensityMatrix) -> BellDiagonal:
    """
    Read the diagonal correlation coefficients R_ii = Tr[rho sigma_i⊗sigma_i].

    Raises:
        DimensionMismatch: If rho is not 4x4
    """
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"Expected a 4x4 matrix, got {rho.shape}")
    values = [float(np.real(np.trace(rho @ c))) for c in CORRELATORS]
    # Clip roundoff overshoot so the value object accepts it
    return BellDiagonal.from_array(np.clip(values, -1.0, 1.0))


def extract_bloch(rho: DensityMatrix) -> Tuple[np.ndarray, np.ndarray]:
    """Local Bloch vectors (Tr[rho sigma_i⊗I], Tr[rho I⊗sigma_i])."""
    rho = np.asarray(rho, dtype=complex)
    if rho.shape != (4, 4):
        raise DimensionMismatch(f"Expected a 4x4 matrix, got {rho.shape}")
    a = np.array([np.real(np.trace(rho @ kron(p, IDENTITY2))) for p in PAULIS])
    b = np.array([np.real(np.trace(rho @ kron(IDENTITY2, p))) for p in PAULIS])
    return a, b


def werner_state(r: float) -> BellDiagonal:
    """Werner family R = (r, -r, r), 0 <= r <= 1."""
    return BellDiagonal(r11=r, r22=-r, r33=r)


def rank2_state(c: float) -> BellDiagonal:
    """Rank-2 family R = (c, -c, 1), 0 <= c <= 1."""
    return BellDiagonal(r11=c, r22=-c, r33=1.0)


def make_rng(seed: int, stream: Optional[int] = None) -> np.random.Generator:
    """Generator for (seed, stream); distinct streams are statistically independent."""
    if stream is None:
        return np.random.default_rng(seed)
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=(stream,)))


def _draw_valid(rng: np.random.Generator, count: int) -> Tuple[np.ndarray, int]:
    kept = []
    draws = 0
    remaining = count
    while remaining > 0:
        batch = 3 * remaining + 16
        candidates = rng.uniform(-1.0, 1.0, size=(batch, 3))
        draws += batch
        spectra = 0.25 * (1.0 + candidates @ BELL_SIGNS.T)
        accepted = candidates[np.all(spectra >= -BELL_EIGEN_TOL, axis=1)]
        kept.append(accepted[:remaining])
        remaining -= len(kept[-1])
    return np.vstack(kept), draws


def sample_bd_array(count: int, seed: int, stream: Optional[int] = None) -> np.ndarray:
    """Uniform samples of the physical tetrahedron as a (count, 3) array."""
    if count < 1:
        raise ValueError("count must be at least 1")
    samples, _ = _draw_valid(make_rng(seed, stream), count)
    return samples


def sample_bd(count: int, seed: int, stream: Optional[int] = None) -> List[BellDiagonal]:
    """
    Draw Bell diagonal states uniformly from the physical tetrahedron.

    Rejection sampling of (R11, R22, R33) uniform in [-1, 1]^3; deterministic
    for a fixed (seed, stream).
    """
    return [BellDiagonal.from_array(row) for row in sample_bd_array(count, seed, stream)]


def rejection_acceptance(draws: int, seed: int) -> float:
    """Fraction of uniform cube draws that land inside the tetrahedron."""
    rng = make_rng(seed)
    candidates = rng.uniform(-1.0, 1.0, size=(draws, 3))
    spectra = 0.25 * (1.0 + candidates @ BELL_SIGNS.T)
    return float(np.mean(np.all(spectra >= -BELL_EIGEN_TOL, axis=1)))


if __name__ == "__main__":
    for coefficients in [(1.0, -0.6, 0.6), (0.6, 0.0, 0.4), (0.8, 0.8, -1.0)]:
        state = BellDiagonal.from_array(coefficients)
        print(f"{coefficients} -> {bd_spectrum(state).to_array()}")
