"""Application constants, default policies and tolerances."""

from __future__ import annotations

import math
from dataclasses import dataclass


@dataclass(frozen=True)
class PolicyDefaults:
    """Represents the default truncation schedule for plateau detection.

    Attributes:
        n_start: First truncation size.
        growth_factor: Multiplier between consecutive levels.
        plateau_window: Consecutive agreeing levels required.
        n_max: Largest truncation size tried.
    """

    n_start: int
    growth_factor: int
    plateau_window: int
    n_max: int


DEFAULT_POLICY = PolicyDefaults(
    n_start=1024,
    growth_factor=2,
    plateau_window=2,
    n_max=2**22,
)

# Jacobi engine
EIG_TOL_RELATIVE = 1e-12
ZERO_PIVOT_FACTOR = 10.0
MAX_BISECTION_ITERATIONS = 200
MULTISECTION_POINTS = 15
DENSE_ORACLE_MAX_N = 4096

# Mode-space grid
DEFAULT_MODES = 64
MIN_HALF_LENGTH = 24.0
HALF_LENGTH_DECAY_FACTOR = 12.0
MAX_STEP = 1.0 / 64.0
STEP_MODE_FACTOR = 0.1
MIN_GRID_HALF_LENGTH = 10.0
GRID_INTEGRALITY_TOLERANCE = 1e-9
THRESHOLD_PERTURBATION = 1e-12

# The line is the two-bond star graph; borderline coupling is m / sqrt(2).
LINE_BONDS = 2
CRITICAL_ALPHA_LINE = math.sqrt(2.0)

# Asymptotic law checks
ENGINE_LAW_BAND = (0.7, 1.3)
CLOSED_FORM_LAW_TOLERANCE = 0.02
MIN_FIT_POINTS = 8
MIN_FIT_INDEX = 10

# Trace inequality constant for the discrete chain; the discrete
# Dirichlet-to-Neumann value never falls below its continuum value.
TRACE_CONSTANT = 0.0

# CLI exit codes
EXIT_OK = 0
EXIT_USAGE = 2
EXIT_DOMAIN = 3
EXIT_NOT_CONVERGED = 4

# Verification sweeps
BS_ALPHAS = (0.8, 1.0, 1.2, 1.3)
BS_EPSILONS = (0.1, 0.25)
SANDWICH_ALPHAS = (1.2, 1.3)
SANDWICH_EPSILONS = (0.1, 0.05, 0.02)
J0_LAW_OFFSETS = (1e-2, 3e-3, 1e-3)
# Rows with a larger offset hold one or two eigenvalues; the ratio is
# reported without asserting the band.
J0_LAW_ASSERTED_MAX_OFFSET = 5e-3
FINAL_LAW_ALPHAS = (1.40, 1.41)
POLLACZEK_CHECK_THRESHOLDS = (1.01, 1.05, 1.1, 1.2)
