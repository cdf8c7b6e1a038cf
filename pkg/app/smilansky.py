"""Mode-space discretization of the operator A_alpha and inertia counts.

Each Hermite mode n carries a finite-difference chain in x with the form
sum (u_{i+1} - u_i)^2 / h + h (n + 1/2) sum u_i^2. The transmission
condition couples the values at x = 0 of neighbouring modes through the
exact interface entry alpha sqrt(2n) / 2. Counting eigenvalues below
1/2 - eps eliminates every chain interior and then the M x M interface
Schur complement; the negative pivots of both add up to the inertia.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import eigsh

from app.constants import (
    DEFAULT_MODES,
    GRID_INTEGRALITY_TOLERANCE,
    HALF_LENGTH_DECAY_FACTOR,
    LINE_BONDS,
    MAX_BISECTION_ITERATIONS,
    MAX_STEP,
    MIN_HALF_LENGTH,
    STEP_MODE_FACTOR,
    THRESHOLD_PERTURBATION,
)
from app.errors import ConvergenceError, DomainError
from app.inertia import Inertia, inertia_from_pivots, ldl_pivots
from app.models import (
    CountReport,
    Geometry,
    ModeSpaceGrid,
    SmilanskyProblem,
    StarGraphSpec,
)

logger = logging.getLogger(__name__)

MAX_PERTURBATIONS = 8
DEFAULT_EIGENVALUE_TOL = 1e-10


def coupling_coefficient(n: int) -> float:
    """Coefficient sqrt(2n) of Re(u_n(0) conj u_{n-1}(0)) in the form b[U].

    Raises:
        DomainError: If n < 1.
    """

    if n < 1:
        raise DomainError(f"coupling index must be >= 1, got {n}")
    return math.sqrt(2.0 * n)


def default_grid(eps: float, modes: int = DEFAULT_MODES) -> ModeSpaceGrid:
    """Documented default grid for a threshold 1/2 - eps.

    L = max(24, 12/sqrt(eps)) rounded up to a multiple of
    h = min(1/64, 0.1/sqrt(M)).
    """

    if not 0.0 < eps < 0.5:
        raise DomainError(f"eps must lie in (0, 1/2), got {eps}")
    step = min(MAX_STEP, STEP_MODE_FACTOR / math.sqrt(modes))
    half_length = max(
        MIN_HALF_LENGTH, HALF_LENGTH_DECAY_FACTOR / math.sqrt(eps)
    )
    intervals = math.ceil(half_length / step - GRID_INTEGRALITY_TOLERANCE)
    grid = ModeSpaceGrid(modes=modes, half_length=intervals * step, step=step)
    logger.debug("default grid for eps=%r: %s", eps, grid)
    return grid


def continuum_dtn(gamma: float, length: float = math.inf) -> float:
    """One-sided Dirichlet-to-Neumann value gamma or gamma coth(gamma B)."""

    if math.isinf(length):
        return gamma
    return gamma / math.tanh(gamma * length)


def _bond_intervals(length: float, grid: ModeSpaceGrid) -> int:
    if math.isinf(length):
        return grid.intervals_per_side
    ratio = length / grid.step
    intervals = int(round(ratio))
    off_grid = abs(ratio - intervals) > GRID_INTEGRALITY_TOLERANCE * ratio
    if intervals < 1 or off_grid:
        raise DomainError(
            f"bond length {length} must be a positive multiple of the step "
            f"{grid.step}"
        )
    return intervals


@dataclass(frozen=True)
class BondElimination:
    """Represents one bond's chain after elimination of its interior.

    Attributes:
        dtn: One-sided Schur value per mode, vertex half-cell included.
        negatives: Negative chain pivots per mode.
        singular: True when an exact zero pivot occurred.
    """

    dtn: np.ndarray
    negatives: np.ndarray
    singular: bool


def _eliminate_bond(
    gamma_sq: np.ndarray,
    intervals: int,
    step: float,
) -> BondElimination:
    # Interior nodes 1..intervals-1, eliminated from the Dirichlet end inward.
    vertex_share = 1.0 / step + 0.5 * step * gamma_sq
    negatives = np.zeros(gamma_sq.shape, dtype=np.int64)
    if intervals == 1:
        return BondElimination(
            dtn=vertex_share, negatives=negatives, singular=False
        )
    diagonal = 2.0 / step + step * gamma_sq
    coupling = 1.0 / (step * step)
    pivots = diagonal.copy()
    negatives += pivots < 0.0
    remaining = intervals - 2
    while remaining > 0:
        if np.any(pivots == 0.0):
            return BondElimination(
                dtn=vertex_share, negatives=negatives, singular=True
            )
        updated = diagonal - coupling / pivots
        remaining -= 1
        if np.array_equal(updated, pivots):
            # Fixed point: every further pivot repeats this one.
            negatives += (pivots < 0.0) * (remaining + 1)
            break
        pivots = updated
        negatives += pivots < 0.0
    if np.any(pivots == 0.0):
        return BondElimination(
            dtn=vertex_share, negatives=negatives, singular=True
        )
    return BondElimination(
        dtn=vertex_share - coupling / pivots,
        negatives=negatives,
        singular=False,
    )


def dtn_value(
    gamma: float,
    grid: ModeSpaceGrid,
    end: float | None = None,
) -> float:
    """Discrete one-sided Dirichlet-to-Neumann value at decay rate gamma.

    Args:
        gamma: Decay rate, gamma > 0.
        grid: Grid providing the step and the truncation length L.
        end: Finite bond length B (Dirichlet at x = B), or None for the
            half-line truncated at L.

    Returns:
        float: Tends to gamma (half-line) or gamma coth(gamma B) as h -> 0.
    """

    if gamma <= 0.0:
        raise DomainError(f"gamma must be positive, got {gamma}")
    intervals = _bond_intervals(math.inf if end is None else end, grid)
    bond = _eliminate_bond(np.array([gamma * gamma]), intervals, grid.step)
    return float(bond.dtn[0])


@dataclass(frozen=True)
class InterfaceMatrix:
    """Represents the symmetric tridiagonal interface Schur complement.

    Attributes:
        diag: Dirichlet-to-Neumann sums d_n, n = 0..M-1.
        off: Couplings c_n = alpha sqrt(2n)/2 between modes n-1 and n.
        threshold: Spectral threshold the complement was taken at.
    """

    diag: np.ndarray
    off: np.ndarray
    threshold: float

    @property
    def size(self) -> int:
        """Number of interface unknowns."""

        return len(self.diag)

    def to_dense(self) -> np.ndarray:
        """Dense symmetric matrix."""

        off = np.diag(self.off, 1)
        return np.diag(self.diag) + off + off.T

    def symmetrized(self, reference: np.ndarray) -> np.ndarray:
        """Return D^(-1/2) S D^(-1/2) for the diagonal D = diag(reference)."""

        scale = 1.0 / np.sqrt(np.asarray(reference, dtype=float))
        return scale[:, None] * self.to_dense() * scale[None, :]

    def inertia(self) -> Inertia:
        """Pivot sign counts of the matrix."""

        pivots = ldl_pivots(self.diag.tolist(), (self.off * self.off).tolist())
        return inertia_from_pivots(pivots, self.size)


@dataclass(frozen=True)
class _Elimination:
    diag: np.ndarray
    off: np.ndarray
    chain_negatives: np.ndarray
    pivots: list[float]
    chain_singular: bool
    interface_singular: bool

    @property
    def singular(self) -> bool:
        return self.chain_singular or self.interface_singular


def _eliminate(
    alpha: float,
    threshold: float,
    grid: ModeSpaceGrid,
    bond_intervals: Sequence[int],
) -> _Elimination:
    modes = np.arange(grid.modes, dtype=float)
    gamma_sq = modes + 0.5 - threshold
    diag = np.zeros(grid.modes)
    chain_negatives = np.zeros(grid.modes, dtype=np.int64)
    chain_singular = False
    for intervals in bond_intervals:
        bond = _eliminate_bond(gamma_sq, intervals, grid.step)
        diag += bond.dtn
        chain_negatives += bond.negatives
        chain_singular = chain_singular or bond.singular
    off = alpha * np.sqrt(2.0 * modes[1:]) / 2.0
    pivots = ldl_pivots(diag.tolist(), (off * off).tolist())
    interface_singular = len(pivots) < grid.modes or pivots[-1] == 0.0
    return _Elimination(
        diag=diag,
        off=off,
        chain_negatives=chain_negatives,
        pivots=pivots,
        chain_singular=chain_singular,
        interface_singular=interface_singular,
    )


def _mode_levels(modes: int) -> list[int]:
    return sorted({max(1, modes // 4), max(1, modes // 2), modes})


def _inertia_report(
    alpha: float,
    threshold: float,
    grid: ModeSpaceGrid,
    bond_lengths: Sequence[float],
) -> CountReport:
    bond_intervals = [_bond_intervals(length, grid) for length in bond_lengths]
    current = threshold
    for attempt in range(MAX_PERTURBATIONS + 1):
        elimination = _eliminate(alpha, current, grid, bond_intervals)
        if not elimination.singular:
            break
        current = threshold - (
            THRESHOLD_PERTURBATION * max(1.0, abs(threshold)) * (attempt + 1)
        )
        logger.debug(
            "zero pivot at threshold %r, retrying at %r", threshold, current
        )
    else:
        raise ConvergenceError(
            "zero pivots persisted after perturbing the threshold",
            {"threshold": threshold, "alpha": alpha},
        )
    chain_prefix = np.cumsum(elimination.chain_negatives)
    interface_prefix = np.cumsum(np.asarray(elimination.pivots) < 0.0)
    levels = [
        (size, int(chain_prefix[size - 1] + interface_prefix[size - 1]))
        for size in _mode_levels(grid.modes)
    ]
    stabilized = len(levels) >= 2 and levels[-1][1] == levels[-2][1]
    perturbed = current != threshold
    notes: list[str] = []
    if perturbed:
        notes.append("threshold perturbed after an exact zero pivot")
    if not stabilized:
        notes.append("count still changes with the mode count")
    return CountReport(
        count=levels[-1][1],
        n_used=grid.modes,
        stabilized=stabilized,
        levels=levels,
        perturbed=perturbed,
        notes=notes,
        provenance={
            "alpha": alpha,
            "threshold": current,
            "modes": grid.modes,
            "half_length": grid.half_length,
            "step": grid.step,
            "bonds": len(bond_lengths),
            "chain_negatives": int(chain_prefix[-1]),
            "interface_negatives": int(interface_prefix[-1]),
        },
    )


def _line_bonds() -> list[float]:
    return [math.inf] * LINE_BONDS


def _require_line(problem: SmilanskyProblem) -> None:
    if problem.geometry is not Geometry.LINE:
        raise DomainError("this operation covers the line geometry")


def count_below(problem: SmilanskyProblem, grid: ModeSpaceGrid) -> CountReport:
    """Number of eigenvalues of the discretized A_alpha below 1/2 - eps.

    Args:
        problem: Coupling and threshold.
        grid: Mode-space discretization.

    Returns:
        CountReport: Count with mode-truncation levels M/4, M/2, M and the
        split into chain and interface negatives.
    """

    _require_line(problem)
    return _inertia_report(
        problem.alpha, problem.threshold, grid, _line_bonds()
    )


def _check_star(spec: StarGraphSpec, problem: SmilanskyProblem) -> None:
    if not 0.0 <= problem.alpha < spec.critical_alpha:
        raise DomainError(
            "alpha must lie in [0, m/sqrt(2)) = "
            f"[0, {spec.critical_alpha:.6f}) "
            f"for m={spec.m}, got {problem.alpha}"
        )


def star_graph_count(
    spec: StarGraphSpec,
    problem: SmilanskyProblem,
    grid: ModeSpaceGrid,
) -> CountReport:
    """Count eigenvalues below 1/2 - eps for the star-graph operator.

    The vertex value of each mode is shared by all bonds; every bond adds
    its own Dirichlet-to-Neumann value. Infinite bonds are truncated at L.
    """

    _check_star(spec, problem)
    return _inertia_report(
        problem.alpha, problem.threshold, grid, spec.bond_lengths
    )


def interface_schur(
    problem: SmilanskyProblem,
    grid: ModeSpaceGrid,
    star: StarGraphSpec | None = None,
) -> InterfaceMatrix:
    """Schur complement of K - (1/2 - eps) B onto the values u_n(0).

    Raises:
        RuntimeError: If a chain block is not positive definite.
    """

    if star is None:
        _require_line(problem)
        lengths = _line_bonds()
    else:
        _check_star(star, problem)
        lengths = star.bond_lengths
    intervals = [_bond_intervals(length, grid) for length in lengths]
    elimination = _eliminate(problem.alpha, problem.threshold, grid, intervals)
    if elimination.chain_singular or np.any(elimination.chain_negatives):
        raise RuntimeError("a chain block is not positive definite")
    return InterfaceMatrix(
        diag=elimination.diag,
        off=elimination.off,
        threshold=problem.threshold,
    )


def continuum_interface_diagonal(
    problem: SmilanskyProblem,
    modes: int,
    star: StarGraphSpec | None = None,
) -> np.ndarray:
    """Continuum values sum_j gamma_n coth(gamma_n B_j), gamma_n^2 = n+eps."""

    lengths = _line_bonds() if star is None else star.bond_lengths
    gammas = np.sqrt(np.arange(modes) + problem.eps)
    return np.array(
        [sum(continuum_dtn(float(gamma), length) for length in lengths)
         for gamma in gammas]
    )


def assemble(
    problem: SmilanskyProblem,
    grid: ModeSpaceGrid,
) -> tuple[sparse.csr_matrix, sparse.csr_matrix]:
    """Assemble the stiffness form K and the lumped mass form B = h I.

    Unknowns are ordered mode by mode; within a mode, by interior node.
    """

    _require_line(problem)
    nodes = grid.nodes_per_mode
    step = grid.step
    chain = sparse.diags(
        [
            np.full(nodes - 1, -1.0 / step),
            np.full(nodes, 2.0 / step),
            np.full(nodes - 1, -1.0 / step),
        ],
        [-1, 0, 1],
    )
    potential = np.repeat(step * (np.arange(grid.modes) + 0.5), nodes)
    stiffness = sparse.kron(sparse.identity(grid.modes), chain) + sparse.diags(
        potential
    )
    n = np.arange(1, grid.modes)
    rows = n * nodes + grid.origin_index
    cols = (n - 1) * nodes + grid.origin_index
    values = problem.alpha * np.sqrt(2.0 * n) / 2.0
    size = grid.modes * nodes
    interface = sparse.coo_matrix((values, (rows, cols)), shape=(size, size))
    stiffness = stiffness + interface + interface.T
    mass = step * sparse.identity(size)
    return stiffness.tocsr(), mass.tocsr()


def chain_energy(grid: ModeSpaceGrid, u: np.ndarray, gamma_sq: float) -> float:
    """sum (u_{i+1} - u_i)^2 / h + gamma^2 h sum u_i^2 for one mode chain."""

    padded = np.pad(np.asarray(u, dtype=float), 1)
    kinetic = np.sum(np.diff(padded) ** 2) / grid.step
    return float(kinetic + gamma_sq * grid.step * np.sum(padded * padded))


def form_parts(grid: ModeSpaceGrid, u: np.ndarray) -> tuple[float, float]:
    """Direct sums of the unperturbed form a0[U] and the coupling form b[U].

    Args:
        grid: Grid the samples live on.
        u: Array of shape (modes, nodes_per_mode).

    Returns:
        tuple[float, float]: (a0, b).
    """

    u = np.asarray(u, dtype=float)
    a0 = sum(chain_energy(grid, u[n], n + 0.5) for n in range(grid.modes))
    origin = u[:, grid.origin_index]
    coefficients = np.sqrt(2.0 * np.arange(1, grid.modes))
    b = float(np.sum(coefficients * origin[1:] * origin[:-1]))
    return float(a0), b


def quadratic_form(
    problem: SmilanskyProblem,
    grid: ModeSpaceGrid,
    u: np.ndarray,
) -> float:
    """Value of the assembled stiffness form on a sampled function."""

    stiffness, _ = assemble(problem, grid)
    vector = np.asarray(u, dtype=float).ravel()
    return float(vector @ (stiffness @ vector))


def lowest_eigenvalue(problem: SmilanskyProblem, grid: ModeSpaceGrid) -> float:
    """Smallest eigenvalue of the pencil (K, B) by shift-invert Lanczos."""

    stiffness, mass = assemble(problem, grid)
    values = eigsh(
        stiffness.tocsc(),
        k=1,
        M=mass.tocsc(),
        sigma=0.0,
        which="LM",
        return_eigenvectors=False,
    )
    return float(values.min())


def lower_bound(alpha: float, bonds: int = LINE_BONDS) -> float:
    """Form lower bound (1/2)(1 - alpha / (m/sqrt(2)))."""

    return 0.5 * (1.0 - alpha * math.sqrt(2.0) / bonds)


def eigenvalues_below(
    problem: SmilanskyProblem,
    grid: ModeSpaceGrid,
    tol: float = DEFAULT_EIGENVALUE_TOL,
) -> list[float]:
    """Locate the eigenvalues of the discretized operator below 1/2 - eps.

    Bisection on the threshold t with inertia counts: the k-th eigenvalue is
    the smallest t whose count reaches k.

    Returns:
        list[float]: Eigenvalues in increasing order.

    Raises:
        ConvergenceError: If bisection exceeds its iteration budget.
    """

    _require_line(problem)
    intervals = [_bond_intervals(length, grid) for length in _line_bonds()]

    def count_at(threshold: float) -> int:
        elimination = _eliminate(problem.alpha, threshold, grid, intervals)
        return int(
            elimination.chain_negatives.sum()
            + np.count_nonzero(np.asarray(elimination.pivots) < 0.0)
        )

    top = problem.threshold
    total = count_at(top)
    bottom = min(lower_bound(problem.alpha), top) - tol
    eigenvalues: list[float] = []
    for rank in range(1, total + 1):
        low = bottom if not eigenvalues else eigenvalues[-1] - tol
        high = top
        for _ in range(MAX_BISECTION_ITERATIONS):
            if high - low <= tol:
                break
            middle = 0.5 * (low + high)
            if count_at(middle) >= rank:
                high = middle
            else:
                low = middle
        else:
            raise ConvergenceError(
                "threshold bisection did not converge",
                {"rank": rank, "low": low, "high": high},
            )
        eigenvalues.append(0.5 * (low + high))
    return eigenvalues


def observed_order(coarse: float, medium: float, fine: float) -> float:
    """Order log2(|coarse - medium| / |medium - fine|) under step halving."""

    return math.log2(abs(coarse - medium) / abs(medium - fine))
