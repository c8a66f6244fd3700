"""
Domain models for the Bell diagonal correlation toolkit.

This module defines the shared vocabulary of the package: validated input
and configuration models (pydantic), lightweight result records
(dataclasses), enumerations and the domain exception hierarchy.
"""

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Plain numpy carriers. A ComplexMatrix is a square complex array of dimension
# 2 or 4; a DensityMatrix is a ComplexMatrix that is Hermitian, unit-trace and
# numerically positive semidefinite (see matrix_core.validate_density_matrix).
ComplexMatrix = np.ndarray
DensityMatrix = np.ndarray

# Numerical tolerances shared across modules
HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
BELL_EIGEN_TOL = 1e-12
BLOCH_TOL = 1e-12
SUPPORT_TOL = 1e-12


# ---------------------------------------------------------------------------
# Exceptions
# ---------------------------------------------------------------------------

class CorrelationError(ValueError):
    """Base class for all domain errors raised by the toolkit."""


class NonHermitian(CorrelationError):
    """Matrix failed the Hermiticity check."""


class DimensionMismatch(CorrelationError):
    """Operands have incompatible or unsupported dimensions."""


class InvalidState(CorrelationError):
    """Correlation coefficients or matrix do not describe a physical state."""


class InvalidSpectrum(CorrelationError):
    """Bell-basis eigenvalues are negative or do not sum to one."""


class InvalidBloch(CorrelationError):
    """Bloch vector lies outside the unit ball."""


class DegenerateState(CorrelationError):
    """Quantity is undefined because all correlation coefficients vanish."""


class UnsupportedRegime(CorrelationError):
    """Channel parameters fall outside the regime with a closed-form kernel."""


# ---------------------------------------------------------------------------
# Enumerations
# ---------------------------------------------------------------------------

class Subsystem(str, Enum):
    """Subsystem labels for partial traces."""
    A = "A"
    B = "B"


class MetricTag(str, Enum):
    """Distance used to define a correlation record."""
    TRACE_DISTANCE = "trace-distance"
    RELATIVE_ENTROPY = "relative-entropy"


class DynamicsModel(str, Enum):
    """Supported non-Markovian channel models."""
    PHASE_FLIP = "phaseflip"
    RANDOM_FIELD = "randomfield"


class StateFamily(str, Enum):
    """One-parameter Bell diagonal families with closed-form correlations."""
    WERNER = "werner"
    RANK2 = "rank2"


class OutputFormat(str, Enum):
    """Report formats written by the CLI."""
    CSV = "csv"
    JSON = "json"


# ---------------------------------------------------------------------------
# State models
# ---------------------------------------------------------------------------

class BellDiagonal(BaseModel):
    """
    Bell diagonal two-qubit state given by its correlation coefficients.

    Attributes:
        r11, r22, r33: Diagonal entries of the correlation matrix, each in [-1, 1].
            Physicality (all Bell eigenvalues non-negative) is checked by
            bell_states.bd_validate, not on construction.
    """
    model_config = ConfigDict(frozen=True)

    r11: float = Field(..., description="Correlation coefficient <sx sx>")
    r22: float = Field(..., description="Correlation coefficient <sy sy>")
    r33: float = Field(..., description="Correlation coefficient <sz sz>")

    @field_validator('r11', 'r22', 'r33')
    @classmethod
    def validate_coefficient(cls, v):
        """Coefficients must be finite and lie in [-1, 1]."""
        if not math.isfinite(v):
            raise ValueError(f"Correlation coefficient must be finite, got {v}")
        if abs(v) > 1.0 + BELL_EIGEN_TOL:
            raise ValueError(f"Correlation coefficient {v} outside [-1, 1]")
        return float(v)

    def to_array(self) -> np.ndarray:
        return np.array([self.r11, self.r22, self.r33], dtype=float)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.r11, self.r22, self.r33)

    @classmethod
    def from_array(cls, values) -> "BellDiagonal":
        r11, r22, r33 = (float(v) for v in values)
        return cls(r11=r11, r22=r22, r33=r33)

    def component(self, index: int) -> float:
        """Return R_ii for a 1-based index."""
        return self.as_tuple()[index - 1]

    def __repr__(self):
        return f"<BellDiagonal(r11={self.r11:.12g}, r22={self.r22:.12g}, r33={self.r33:.12g})>"


class BellSpectrum(BaseModel):
    """
    Eigenvalues of a Bell diagonal state in the Bell basis.

    Ordering follows |1+>, |1->, |2+>, |2-> with |1±> = (|01> ± |10>)/√2 and
    |2±> = (|00> ± |11>)/√2. Values coming out of bell_states.bd_spectrum for
    unphysical coefficients may be negative; use is_valid() to check.
    """
    model_config = ConfigDict(frozen=True)

    l1p: float
    l1m: float
    l2p: float
    l2m: float

    def to_array(self) -> np.ndarray:
        return np.array([self.l1p, self.l1m, self.l2p, self.l2m], dtype=float)

    @classmethod
    def from_array(cls, values) -> "BellSpectrum":
        l1p, l1m, l2p, l2m = (float(v) for v in values)
        return cls(l1p=l1p, l1m=l1m, l2p=l2p, l2m=l2m)

    def is_valid(self) -> bool:
        values = self.to_array()
        return bool(np.all(values >= -BELL_EIGEN_TOL) and np.all(values <= 1.0 + BELL_EIGEN_TOL)
                    and abs(values.sum() - 1.0) <= BELL_EIGEN_TOL)


class BlochQubit(BaseModel):
    """Single-qubit Bloch vector inside the unit ball (norm at most 1 + 1e-12)."""
    model_config = ConfigDict(frozen=True)

    v: Tuple[float, float, float]

    @field_validator('v')
    @classmethod
    def validate_components(cls, v):
        if not all(math.isfinite(x) for x in v):
            raise ValueError(f"Bloch components must be finite, got {v}")
        norm = math.sqrt(sum(float(x) ** 2 for x in v))
        if norm > 1.0 + BLOCH_TOL:
            raise ValueError(f"Bloch vector {tuple(v)} has norm {norm:.12g} > 1")
        return tuple(float(x) for x in v)

    def to_array(self) -> np.ndarray:
        return np.array(self.v, dtype=float)

    def norm(self) -> float:
        return float(np.linalg.norm(self.to_array()))

    @classmethod
    def from_array(cls, values) -> "BlochQubit":
        """
        Build from any 3-sequence.

        Raises:
            InvalidBloch: If the vector is longer than 1 + 1e-12
        """
        v = tuple(float(x) for x in values)
        norm = math.sqrt(sum(x * x for x in v))
        if norm > 1.0 + BLOCH_TOL:
            raise InvalidBloch(f"Bloch vector {v} has norm {norm:.12g} > 1")
        return cls(v=v)


class ProductState(BaseModel):
    """
    Product state gamma_A ⊗ tau_B in Bloch form.

    Attributes:
        a: Bloch vector of subsystem A
        b: Bloch vector of subsystem B
    """
    model_config = ConfigDict(frozen=True)

    a: BlochQubit
    b: BlochQubit

    @classmethod
    def from_arrays(cls, a, b) -> "ProductState":
        return cls(a=BlochQubit.from_array(a), b=BlochQubit.from_array(b))

    @classmethod
    def maximally_mixed(cls) -> "ProductState":
        return cls.from_arrays((0.0, 0.0, 0.0), (0.0, 0.0, 0.0))

    def to_dict(self) -> Dict[str, List[float]]:
        return {"a": list(self.a.v), "b": list(self.b.v)}


class MeasurementAxis(BaseModel):
    """Spherical angles of a projective measurement axis on subsystem A."""
    model_config = ConfigDict(frozen=True)

    theta: float = Field(..., ge=0.0, le=math.pi)
    phi: float = Field(..., ge=0.0, lt=2.0 * math.pi)

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "MeasurementAxis":
        """Fold unconstrained optimizer angles into the canonical ranges."""
        theta = math.fmod(theta, 2.0 * math.pi)
        if theta < 0.0:
            theta += 2.0 * math.pi
        if theta > math.pi:
            theta = 2.0 * math.pi - theta
            phi += math.pi
        phi = math.fmod(phi, 2.0 * math.pi)
        if phi < 0.0:
            phi += 2.0 * math.pi
        if phi >= 2.0 * math.pi:
            phi = 0.0
        return cls(theta=min(theta, math.pi), phi=phi)

    def unit_vector(self) -> np.ndarray:
        return np.array([
            math.sin(self.theta) * math.cos(self.phi),
            math.sin(self.theta) * math.sin(self.phi),
            math.cos(self.theta),
        ])


# ---------------------------------------------------------------------------
# Configuration models
# ---------------------------------------------------------------------------

class OptimizerConfig(BaseModel):
    """Settings for the multi-start simplex searches of the numerical oracle."""
    starts: int = Field(default=32, ge=1, description="Random interior starts per search")
    max_iters: int = Field(default=2000, ge=1, description="Simplex iterations per start")
    f_tol: float = Field(default=1e-12, gt=0, description="Smallest gain that justifies another polishing restart")
    x_tol: float = Field(default=1e-10, gt=0, description="Stop when simplex diameter is below")
    initial_step: float = Field(default=0.1, gt=0, description="Edge length of the initial simplex")
    seed: int = Field(default=42, description="Seed for start-point generation")


class PhaseFlipParams(BaseModel):
    """
    Parameters of the non-Markovian phase-flip (random telegraph) channel.

    Attributes:
        tau: Memory time in seconds
        alpha_abs: Coupling |alpha| in 1/s
    """
    tau: float = Field(default=5.0, gt=0)
    alpha_abs: float = Field(default=1.0, gt=0)

    def mu(self) -> float:
        """Oscillation frequency of the memory kernel; requires 4|alpha|tau > 1."""
        x = 4.0 * self.alpha_abs * self.tau
        if x <= 1.0:
            raise UnsupportedRegime(
                f"4*|alpha|*tau = {x:.6g} <= 1: only the oscillatory kernel (real mu) is supported"
            )
        return math.sqrt(x * x - 1.0)


class RandomFieldParams(BaseModel):
    """Parameters of the random external field channel (coupling g in 1/s)."""
    g: float = Field(default=1.0, gt=0)


class StateInput(BaseModel):
    """A state supplied either as an R triple or as a Bell-basis λ quadruple."""
    r: Optional[Tuple[float, float, float]] = None
    lam: Optional[Tuple[float, float, float, float]] = None

    @model_validator(mode='after')
    def exactly_one(self):
        if (self.r is None) == (self.lam is None):
            raise ValueError("Exactly one of an R triple or a lambda quadruple must be supplied")
        return self


class RunConfig(BaseModel):
    """Options shared by all CLI commands."""
    seed: int = Field(default=42)
    output: Optional[str] = Field(default=None, description="Output path; stdout when omitted")
    fmt: OutputFormat = Field(default=OutputFormat.CSV)


class CorrelationsConfig(RunConfig):
    state: StateInput
    fmt: OutputFormat = Field(default=OutputFormat.JSON)


class VerifyConfig(RunConfig):
    samples: int = Field(default=1000, ge=1)
    full_scale: bool = False
    workers: int = Field(default=1, ge=1)
    optimizer: OptimizerConfig = Field(default_factory=OptimizerConfig)


class DynamicsConfig(RunConfig):
    state: StateInput
    model: DynamicsModel
    phase_flip: PhaseFlipParams = Field(default_factory=PhaseFlipParams)
    random_field: RandomFieldParams = Field(default_factory=RandomFieldParams)
    t_max: float = Field(default=3.0, gt=0)
    steps: int = Field(default=2000, ge=2)


class SweepConfig(RunConfig):
    family: StateFamily
    points: int = Field(default=101, ge=2)


class FreezingScanConfig(RunConfig):
    lambda1p_values: List[float] = Field(default_factory=lambda: [1.0, 0.9, 0.8, 0.7])
    t_max: float = Field(default=math.pi / 2, gt=0)
    steps: int = Field(default=2000, ge=2)
    output_dir: Optional[str] = None

    @field_validator('lambda1p_values')
    @classmethod
    def validate_lambdas(cls, v):
        if not v:
            raise ValueError("At least one lambda_1^+ value is required")
        return v


# ---------------------------------------------------------------------------
# Result records
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Spectrum:
    """Ascending real eigenvalues of a Hermitian matrix."""
    values: np.ndarray

    def __len__(self):
        return len(self.values)

    def __iter__(self):
        return iter(self.values)


@dataclass(frozen=True)
class SortedModuli:
    """Moduli |R_ii| in ascending order with 1-based original indices."""
    r_min: float
    r_int: float
    r_max: float
    idx_min: int
    idx_int: int
    idx_max: int


@dataclass
class TotalCorrelation:
    """Outcome of the total trace-distance correlation search."""
    value: float
    witness: ProductState
    a_k: float
    is_marginal_product: bool
    grid_fallback: bool = False


@dataclass
class CorrelationRecord:
    """
    Quantum, classical and total correlations under one metric.

    Attributes:
        quantum: Discord
        classical: Classical correlations
        total: Total correlations
        metric: Distance used
        closest_classical: Classical state attaining the discord
        closest_product_classical: Product state closest to closest_classical
        closest_product_total: Product state closest to the state itself
    """
    quantum: float
    classical: float
    total: float
    metric: MetricTag
    closest_classical: Optional[BellDiagonal] = None
    closest_product_classical: Optional[ProductState] = None
    closest_product_total: Optional[ProductState] = None

    def to_dict(self) -> Dict[str, Any]:
        witnesses: Dict[str, Any] = {}
        if self.closest_classical is not None:
            witnesses["closest_classical"] = list(self.closest_classical.as_tuple())
        if self.closest_product_classical is not None:
            witnesses["closest_product_classical"] = self.closest_product_classical.to_dict()
        if self.closest_product_total is not None:
            witnesses["closest_product_total"] = self.closest_product_total.to_dict()
        return {
            "metric": self.metric.value,
            "quantum": self.quantum,
            "classical": self.classical,
            "total": self.total,
            "witnesses": witnesses,
        }


@dataclass
class OptimizerResult:
    """Best point found by a simplex search."""
    x: np.ndarray
    fun: float
    converged: bool
    iterations: int
    evaluations: int


@dataclass
class VerifyRecord:
    """One row of an analytic-versus-oracle comparison."""
    state: BellDiagonal
    analytic_T: float
    oracle_T: float
    analytic_D: float
    oracle_D: float
    near_vertex: bool = False


@dataclass
class VerifySummary:
    """Aggregate statistics of a verification sweep."""
    samples: int
    seed: int
    max_abs_diff_T: float
    max_abs_diff_D: float
    undercut_count: int
    agree_fraction_T: float
    off_vertex_undercut_count: int = 0
    records: List[VerifyRecord] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return self.undercut_count == 0
