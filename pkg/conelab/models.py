"""
Data models for conelab.

This module holds the shared vocabulary of the package:
- algebra tags and run-mode enums
- the error hierarchy raised by the library
- pydantic payloads for every JSON artifact (scalars, matrices, cone maps,
  reports and certificates)
"""

from enum import Enum
from fractions import Fraction
from typing import Any

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

# Exact values are rendered as "p/q" strings, floats stay floats.
JsonNumber = str | float


class Algebra(str, Enum):
    """The four Euclidean Hurwitz algebras."""

    R = "R"
    C = "C"
    H = "H"
    O = "O"  # noqa: E741

    @property
    def dim(self) -> int:
        return {"R": 1, "C": 2, "H": 4, "O": 8}[self.value]

    @property
    def is_associative(self) -> bool:
        return self is not Algebra.O

    @property
    def is_commutative(self) -> bool:
        return self in (Algebra.R, Algebra.C)


class CheckMode(str, Enum):
    """Verification modes for cross-positivity."""

    SAMPLED = "sampled"
    EXACT = "exact"
    POSITIVE = "positive"


class DecomposeMode(str, Enum):
    CERTIFICATE = "certificate"
    LP = "lp"


class Verdict(str, Enum):
    """Outcome labels used by the decomposition machinery."""

    INDECOMPOSABLE = "INDECOMPOSABLE"
    INCONCLUSIVE = "INCONCLUSIVE"
    FEASIBLE = "FEASIBLE"
    INFEASIBLE = "INFEASIBLE"


class AlgebraMismatchError(ValueError):
    """Operands carry different algebra tags."""


class ShapeError(ValueError):
    """Operands have incompatible sizes."""


class DomainError(ValueError):
    """An argument lies outside the domain of an operation."""


class PreconditionError(ValueError):
    """A documented precondition does not hold for the given input."""


class InputError(ValueError):
    """A JSON input file could not be read or validated."""


class NumericalError(RuntimeError):
    """A floating-point computation gave out (overflow, solver failure)."""


class LPNumericalError(NumericalError):
    """The floating-point LP solver failed for reasons other than infeasibility."""


def format_number(value: Fraction | float | int) -> JsonNumber:
    """Render a scalar for JSON: exact values as "p/q", floats unchanged."""
    if isinstance(value, float):
        return value
    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def parse_number(value: JsonNumber | int) -> Fraction | float:
    """Inverse of :func:`format_number`; integers are read as exact."""
    if isinstance(value, str):
        try:
            return Fraction(value)
        except (ValueError, ZeroDivisionError) as e:
            raise InputError(f"Malformed rational literal {value!r}") from e
    if isinstance(value, int):
        return Fraction(value)
    return float(value)


class ScalarPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algebra: Algebra
    coeffs: list[JsonNumber]

    @model_validator(mode="after")
    def _check_dim(self) -> "ScalarPayload":
        if len(self.coeffs) != self.algebra.dim:
            raise ValueError(
                f"algebra {self.algebra.value} needs {self.algebra.dim} coefficients, "
                f"got {len(self.coeffs)}"
            )
        return self


class VectorPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algebra: Algebra
    components: list[ScalarPayload]


class MatrixPayload(BaseModel):
    """A hermitian matrix; symmetry is checked when converted back."""

    model_config = ConfigDict(extra="forbid")

    algebra: Algebra
    n: int = Field(ge=1)
    entries: list[list[ScalarPayload]]

    @model_validator(mode="after")
    def _check_shape(self) -> "MatrixPayload":
        if len(self.entries) != self.n or any(len(row) != self.n for row in self.entries):
            raise ValueError(f"entries must form a {self.n}x{self.n} array")
        return self


class ConeMapPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    algebra: Algebra
    n: int = Field(ge=1)
    dim: int = Field(ge=1)
    label: str | None = None
    matrix: list[list[float]]

    @model_validator(mode="after")
    def _check_shape(self) -> "ConeMapPayload":
        expected = self.n + self.algebra.dim * self.n * (self.n - 1) // 2
        if self.dim != expected:
            raise ValueError(f"dim must be {expected} for n={self.n}, {self.algebra.value}")
        if len(self.matrix) != self.dim or any(len(r) != self.dim for r in self.matrix):
            raise ValueError(f"matrix must be {self.dim}x{self.dim}")
        return self


class WitnessPair(BaseModel):
    model_config = ConfigDict(extra="forbid")

    u: VectorPayload
    v: VectorPayload
    value: float


class RunConfig(BaseModel):
    """Validated parameters of one CLI run."""

    model_config = ConfigDict(extra="forbid")

    subcommand: str
    n: int | None = None
    algebra: Algebra | None = None
    mode: str | None = None
    samples: int = Field(default=100_000, gt=0)
    seed: int = 0
    eps: float = Field(default=1e-9, gt=0)
    t_grid: list[float] = Field(default_factory=list)
    pairs: int = Field(default=1000, ge=0)
    float_lp: bool = False
    target: str | None = None
    space: str | None = None
    input_path: str | None = None
    output_path: str | None = None

    @field_validator("t_grid")
    @classmethod
    def _check_grid(cls, grid: list[float]) -> list[float]:
        if any(t < 0 for t in grid):
            raise ValueError("t_grid must be nonnegative")
        if any(b <= a for a, b in zip(grid, grid[1:], strict=False)):
            raise ValueError("t_grid must be strictly increasing")
        return grid

    @model_validator(mode="after")
    def _check_sizes(self) -> "RunConfig":
        exotic = self.subcommand in {"build", "verify", "exp", "decompose"}
        if exotic and self.input_path is None and (self.n is None or self.n < 3):
            if not (self.subcommand == "decompose" and self.n == 2):
                raise ValueError(f"{self.subcommand} needs n >= 3")
        if self.algebra is Algebra.O and self.n is not None and self.n != 3:
            raise ValueError("octonion matrices exist only for n = 3")
        return self


class CheckReport(BaseModel):
    """Result of a sampled or exact check."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    check: str
    params: dict[str, Any] = Field(default_factory=dict)
    samples: int
    min_value: float
    witness: WitnessPair | None = None
    passed: bool = Field(serialization_alias="pass")
    details: dict[str, Any] = Field(default_factory=dict)


class OrbitPoint(BaseModel):
    model_config = ConfigDict(extra="forbid")

    t: float
    min_eigenvalue: float
    cone_member: bool


class OrbitReport(BaseModel):
    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    check: str = "semigroup_orbit"
    points: list[OrbitPoint]
    passed: bool = Field(serialization_alias="pass")


class RowPayload(BaseModel):
    """One real linear equation: sum(coefficients[i] * unknown[i]) = rhs."""

    model_config = ConfigDict(extra="forbid")

    coefficients: dict[str, str]
    rhs: str


class CertificateStepPayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: str
    description: str
    source: dict[str, Any]
    rows: list[RowPayload]
    forced_value: ScalarPayload | None = None
    conclusion: str | None = None


class CertificatePayload(BaseModel):
    model_config = ConfigDict(extra="forbid")

    n: int
    algebra: Algebra
    unknowns: list[str]
    steps: list[CertificateStepPayload]
    residual: str
    verdict: Verdict
    consistent: bool


class LPReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    verdict: Verdict
    equality_rows: int
    inequality_rows: int
    witness: dict[str, str] | None = None
    witness_verified: bool = False
    h: list[list[ScalarPayload]] | None = None
    exact_verified: bool = False


class DimsReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    space: str
    dimension: int


class FailureReport(BaseModel):
    """Emitted in place of a result when the numerics give out."""

    model_config = ConfigDict(extra="forbid")

    error: str
    message: str


class ReportEnvelope(BaseModel):
    """What the CLI prints: the run configuration, the version and one result."""

    model_config = ConfigDict(extra="forbid")

    version: str
    config: RunConfig
    result: (
        CheckReport
        | OrbitReport
        | CertificatePayload
        | LPReport
        | DimsReport
        | ConeMapPayload
        | FailureReport
    )
