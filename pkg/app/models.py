"""Validated parameter and report models."""

from __future__ import annotations

import math
from enum import Enum
from pathlib import Path

from pydantic import BaseModel, ConfigDict, Field, model_validator

from app.constants import (
    CRITICAL_ALPHA_LINE,
    DEFAULT_POLICY,
    EIG_TOL_RELATIVE,
    GRID_INTEGRALITY_TOLERANCE,
    MIN_GRID_HALF_LENGTH,
)


class Side(str, Enum):
    """Side of a threshold on which eigenvalues are counted."""

    ABOVE = "above"
    BELOW = "below"


class Geometry(str, Enum):
    """Geometry carrying the transmission condition."""

    LINE = "line"
    STAR = "star"


class OutputFormat(str, Enum):
    """Report serialization formats."""

    CSV = "csv"
    JSON = "json"


class TruncationPolicy(BaseModel):
    """Represents the plateau-detection schedule for the matrix size."""

    model_config = ConfigDict(frozen=True)

    n_start: int = Field(default=DEFAULT_POLICY.n_start, ge=2)
    growth_factor: int = Field(default=DEFAULT_POLICY.growth_factor, ge=2)
    plateau_window: int = Field(default=DEFAULT_POLICY.plateau_window, ge=1)
    n_max: int = Field(default=DEFAULT_POLICY.n_max, ge=2)

    @model_validator(mode="after")
    def check_cap(self) -> TruncationPolicy:
        """Ensure the cap is not below the starting size."""

        if self.n_max < self.n_start:
            raise ValueError("n_max must be greater than or equal to n_start")
        return self


class SpectralQuery(BaseModel):
    """Represents what to count or locate relative to a threshold."""

    model_config = ConfigDict(frozen=True)

    s: float
    side: Side = Side.ABOVE
    eig_tol: float | None = Field(default=None, gt=0)
    k_max: int | None = Field(default=None, ge=0)

    @property
    def tolerance(self) -> float:
        """Absolute bisection tolerance, defaulting to a relative one."""

        if self.eig_tol is not None:
            return self.eig_tol
        return EIG_TOL_RELATIVE * max(1.0, abs(self.s))


class CountReport(BaseModel):
    """Represents an eigenvalue count with its provenance.

    Levels are (size, count) pairs in the order they were inspected; size is
    the matrix dimension for Jacobi counts and the mode count for operator
    counts. Eigenvalues equal to the threshold are counted on neither side.
    """

    count: int = Field(ge=0)
    n_used: int = Field(ge=1)
    stabilized: bool
    levels: list[tuple[int, int]]
    perturbed: bool = False
    notes: list[str] = Field(default_factory=list)
    provenance: dict[str, float | int | str] = Field(default_factory=dict)


class PollaczekParams(BaseModel):
    """Represents the parameters of the zero-diagonal Pollaczek family."""

    model_config = ConfigDict(frozen=True)

    lam: float
    r: float

    @model_validator(mode="after")
    def check_range(self) -> PollaczekParams:
        """Ensure the admissible case lambda > r > 0."""

        if not self.lam > self.r > 0.0:
            raise ValueError(
                f"Pollaczek parameters require lambda > r > 0, "
                f"got lambda={self.lam}, r={self.r}"
            )
        return self


class ModeSpaceGrid(BaseModel):
    """Represents the Hermite-mode and finite-difference discretization.

    Interior nodes sit at x = -L + i*h, i = 1..2L/h - 1, with Dirichlet
    conditions at x = +-L; x = 0 is the node i = L/h.
    """

    model_config = ConfigDict(frozen=True)

    modes: int = Field(ge=1)
    half_length: float = Field(ge=MIN_GRID_HALF_LENGTH)
    step: float = Field(gt=0)

    @model_validator(mode="after")
    def check_origin_node(self) -> ModeSpaceGrid:
        """Ensure x = 0 is a grid node."""

        ratio = self.half_length / self.step
        if abs(ratio - round(ratio)) > GRID_INTEGRALITY_TOLERANCE * ratio:
            raise ValueError(
                "x=0 must be a grid node: half_length/step must be an "
                f"integer, got {ratio}"
            )
        return self

    @property
    def intervals_per_side(self) -> int:
        """Number of grid intervals between x = 0 and x = L."""

        return int(round(self.half_length / self.step))

    @property
    def nodes_per_mode(self) -> int:
        """Number of interior nodes in each mode chain."""

        return 2 * self.intervals_per_side - 1

    @property
    def origin_index(self) -> int:
        """Position of x = 0 among the interior nodes."""

        return self.intervals_per_side - 1


class SmilanskyProblem(BaseModel):
    """Represents a coupling constant and counting threshold 1/2 - eps."""

    model_config = ConfigDict(frozen=True)

    alpha: float = Field(ge=0)
    eps: float = Field(gt=0, lt=0.5)
    geometry: Geometry = Geometry.LINE

    @model_validator(mode="after")
    def check_coupling(self) -> SmilanskyProblem:
        """Ensure the line coupling keeps the form bounded below."""

        on_line = self.geometry is Geometry.LINE
        if on_line and self.alpha >= CRITICAL_ALPHA_LINE:
            raise ValueError(
                f"alpha must lie in [0, sqrt(2)) on the line, got {self.alpha}"
            )
        return self

    @property
    def threshold(self) -> float:
        """Counting threshold 1/2 - eps."""

        return 0.5 - self.eps


class StarGraphSpec(BaseModel):
    """Represents a star graph with m bonds; None or inf marks infinite ones.
    """

    model_config = ConfigDict(frozen=True)

    m: int = Field(ge=1)
    lengths: list[float] | None = None

    @model_validator(mode="after")
    def check_lengths(self) -> StarGraphSpec:
        """Ensure one positive length per bond."""

        if self.lengths is None:
            return self
        if len(self.lengths) != self.m:
            raise ValueError(
                f"expected {self.m} bond lengths, got {len(self.lengths)}"
            )
        for length in self.lengths:
            if not length > 0.0:
                raise ValueError(
                    f"bond lengths must be positive, got {length}"
                )
        return self

    @property
    def bond_lengths(self) -> list[float]:
        """Bond lengths with infinite bonds expanded to math.inf."""

        if self.lengths is None:
            return [math.inf] * self.m
        return list(self.lengths)

    @property
    def critical_alpha(self) -> float:
        """Borderline coupling m / sqrt(2)."""

        return self.m / math.sqrt(2.0)


class RunConfig(BaseModel):
    """Represents a parsed command line invocation."""

    model_config = ConfigDict(frozen=True)

    group: str
    action: str
    output_format: OutputFormat = OutputFormat.JSON
    output_path: Path | None = None
    seed: int = 0
    verbose: bool = False
