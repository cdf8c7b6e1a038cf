"""Zero-diagonal Jacobi matrix families and the Sturm counting engine."""

from __future__ import annotations

import logging
import math
from collections.abc import Callable
from dataclasses import dataclass, field
from enum import Enum
from functools import partial

import numpy as np

from app.constants import (
    DENSE_ORACLE_MAX_N,
    MAX_BISECTION_ITERATIONS,
    MULTISECTION_POINTS,
    ZERO_PIVOT_FACTOR,
)
from app.errors import ConvergenceError, DomainError
from app.inertia import zero_diagonal_inertia, zero_diagonal_positive_counts
from app.models import CountReport, Side, SpectralQuery, TruncationPolicy

logger = logging.getLogger(__name__)

MAX_PERTURBATIONS = 8


class Family(str, Enum):
    """Named off-diagonal sequence families."""

    J_EPS = "jeps"
    J0 = "j0"
    POLLACZEK = "pollaczek"
    CONSTANT = "const"
    CUSTOM = "custom"


def offdiag_j_eps(eps: float, n: int) -> float:
    """Entry j_{n,n-1}(eps) of the matrix J(eps).

    Args:
        eps: Spectral shift in (0, 1/2].
        n: Row index, n >= 1.

    Returns:
        float: n^(1/2) / (2 (n+eps)^(1/4) (n-1+eps)^(1/4)).

    Raises:
        DomainError: If n < 1 or the entry diverges.
    """

    if n < 1:
        raise DomainError(f"J(eps) entries start at n=1, got n={n}")
    if n - 1 + eps <= 0.0:
        raise DomainError(
            f"eps must be positive for n=1 since j_(1,0)(0)=inf, got eps={eps}"
        )
    return math.sqrt(n) / (2.0 * (n + eps) ** 0.25 * (n - 1 + eps) ** 0.25)


def offdiag_j0(n: int) -> float:
    """Entry j_{n,n-1} of J0, defined for n >= 2.

    Raises:
        DomainError: If n < 2; J0 has no entry there once the first
            coordinate is deleted.
    """

    if n < 2:
        raise DomainError(f"J0 entries are defined for n >= 2, got n={n}")
    return 0.5 * (1.0 - 1.0 / n) ** -0.25


def pollaczek_coefficient(lam: float, r: float, n: int) -> float:
    """Recurrence coefficient p_n(lambda, r) of the monic Pollaczek family.

    Args:
        lam: Parameter lambda.
        r: Parameter r.
        n: Index, n >= 1.

    Returns:
        float: n(n+2lambda-1) / (4(n-r+lambda-1)(n-r+lambda)).

    Raises:
        DomainError: If the denominator is not positive or p_n < 0.
    """

    if n < 1:
        raise DomainError(f"Pollaczek coefficients start at n=1, got n={n}")
    denominator = 4.0 * (n - r + lam - 1.0) * (n - r + lam)
    if denominator <= 0.0:
        raise DomainError(
            f"Pollaczek denominator must be positive at n={n} "
            f"(lambda={lam}, r={r})"
        )
    value = n * (n + 2.0 * lam - 1.0) / denominator
    if value < 0.0:
        raise DomainError(f"p_n is negative at n={n} (lambda={lam}, r={r})")
    return value


def offdiag_pollaczek(lam: float, r: float, n: int) -> float:
    """Entry sqrt(p_n(lambda, r)) of the Pollaczek Jacobi matrix."""

    return math.sqrt(pollaczek_coefficient(lam, r, n))


def _j_eps_block(eps: float, indices: np.ndarray) -> np.ndarray:
    n = indices.astype(float)
    return np.sqrt(n) / (2.0 * (n + eps) ** 0.25 * (n - 1.0 + eps) ** 0.25)


def _j0_block(indices: np.ndarray) -> np.ndarray:
    # Stored index m is row m + 1 of J0.
    n = indices.astype(float) + 1.0
    return 0.5 * (1.0 - 1.0 / n) ** -0.25


def _pollaczek_block(lam: float, r: float, indices: np.ndarray) -> np.ndarray:
    n = indices.astype(float)
    denominator = 4.0 * (n - r + lam - 1.0) * (n - r + lam)
    numerator = n * (n + 2.0 * lam - 1.0)
    if np.any(denominator <= 0.0) or np.any(numerator < 0.0):
        raise DomainError(
            f"Pollaczek entries undefined for lambda={lam}, r={r} on the "
            "requested range"
        )
    return np.sqrt(numerator / denominator)


def _constant_block(value: float, indices: np.ndarray) -> np.ndarray:
    return np.full(indices.shape, value, dtype=float)


def _j0_entry(n: int) -> float:
    return offdiag_j0(n + 1)


def _constant_entry(value: float, n: int) -> float:
    return value


@dataclass(frozen=True)
class OffDiagSequence:
    """Represents a zero-diagonal Jacobi matrix through n -> b_n, n >= 1.

    Coordinates are indexed 0..N-1 and b_n couples coordinates n-1 and n.

    Attributes:
        family: Family tag.
        params: Family parameters (eps, (lambda, r) or the constant).
        entry: Scalar map n -> b_n.
        block: Vectorized map over an index array.
    """

    family: Family
    params: tuple[float, ...]
    entry: Callable[[int], float] = field(compare=False, repr=False)
    block: Callable[[np.ndarray], np.ndarray] = field(
        compare=False,
        repr=False,
    )

    @classmethod
    def j_eps(cls, eps: float) -> OffDiagSequence:
        """Build J(eps)."""

        if not 0.0 < eps <= 0.5:
            raise DomainError(f"eps must lie in (0, 1/2], got {eps}")
        return cls(
            family=Family.J_EPS,
            params=(eps,),
            entry=partial(offdiag_j_eps, eps),
            block=partial(_j_eps_block, eps),
        )

    @classmethod
    def j0(cls) -> OffDiagSequence:
        """Build J0 without its first coordinate; stored entry 1 is j_{2,1}."""

        return cls(
            family=Family.J0,
            params=(),
            entry=_j0_entry,
            block=_j0_block,
        )

    @classmethod
    def pollaczek(cls, lam: float, r: float) -> OffDiagSequence:
        """Build the Pollaczek matrix J(lambda, r)."""

        # Validates the first (smallest) denominator.
        pollaczek_coefficient(lam, r, 1)
        return cls(
            family=Family.POLLACZEK,
            params=(lam, r),
            entry=partial(offdiag_pollaczek, lam, r),
            block=partial(_pollaczek_block, lam, r),
        )

    @classmethod
    def constant(cls, value: float = 0.5) -> OffDiagSequence:
        """Build the constant sequence; value 1/2 is the free matrix."""

        if value <= 0.0:
            raise DomainError(f"constant entry must be positive, got {value}")
        return cls(
            family=Family.CONSTANT,
            params=(value,),
            entry=partial(_constant_entry, value),
            block=partial(_constant_block, value),
        )

    @classmethod
    def custom(
        cls,
        entry: Callable[[int], float],
        params: tuple[float, ...] = (),
    ) -> OffDiagSequence:
        """Build a sequence from an arbitrary positive entry function."""

        def block(indices: np.ndarray) -> np.ndarray:
            return np.fromiter(
                (entry(int(n)) for n in indices),
                dtype=float,
                count=len(indices),
            )

        return cls(
            family=Family.CUSTOM,
            params=params,
            entry=entry,
            block=block,
        )

    def eval(self, n: int) -> float:
        """Return b_n for n >= 1."""

        if n < 1:
            raise DomainError(f"sequence index must be >= 1, got {n}")
        return self.entry(n)

    def at(self, indices: np.ndarray) -> np.ndarray:
        """Return b_n for an array of indices >= 1."""

        indices = np.asarray(indices)
        if indices.size and indices.min() < 1:
            raise DomainError("sequence indices must be >= 1")
        return self.block(indices)

    def values(self, size: int) -> np.ndarray:
        """Return the size - 1 off-diagonal entries of the truncation."""

        if size < 1:
            raise DomainError(f"truncation size must be positive, got {size}")
        return self.at(np.arange(1, size))

    def squares(self, size: int) -> np.ndarray:
        """Return the squared off-diagonal entries of the truncation."""

        values = self.values(size)
        return values * values


@dataclass(frozen=True)
class SturmResult:
    """Represents a Sturm count with the shift that produced it.

    Attributes:
        count: Eigenvalues strictly on the requested side.
        shift: Shift actually used (differs from s after a zero pivot).
        perturbations: Number of zero-pivot retries.
    """

    count: int
    shift: float
    perturbations: int


def _sturm_from_squares(
    off_squared: np.ndarray,
    s: float,
    side: Side,
) -> SturmResult:
    above = side is Side.ABOVE
    direction = 1.0 if above else -1.0
    delta = ZERO_PIVOT_FACTOR * np.finfo(float).eps * max(1.0, abs(s))
    shift = s
    for attempt in range(MAX_PERTURBATIONS + 1):
        inertia = zero_diagonal_inertia(shift, off_squared)
        if not inertia.singular:
            count = inertia.positive if above else inertia.negative
            return SturmResult(count=count, shift=shift, perturbations=attempt)
        shift = s + direction * delta * (attempt + 1)
        logger.debug("zero pivot at shift %r, retrying at %r", s, shift)
    raise ConvergenceError(
        "zero pivots persisted after perturbing the shift",
        {"s": s, "attempts": MAX_PERTURBATIONS + 1},
    )


def sturm_inertia(
    seq: OffDiagSequence,
    size: int,
    s: float,
    side: Side = Side.ABOVE,
) -> SturmResult:
    """Count eigenvalues of the size x size truncation beyond s.

    A zero pivot moves s away from the counted side by a few ulps and the
    count is repeated, so ties at s are counted on neither side.

    Args:
        seq: Off-diagonal sequence.
        size: Truncation size N >= 1.
        s: Threshold.
        side: Count strictly above or strictly below s.

    Returns:
        SturmResult: Count and perturbation diagnostics.
    """

    return _sturm_from_squares(seq.squares(size), s, side)


def sturm_count(
    seq: OffDiagSequence,
    size: int,
    s: float,
    side: Side = Side.ABOVE,
) -> int:
    """Number of eigenvalues of the truncation strictly on one side of s."""

    return sturm_inertia(seq, size, s, side).count


def sturm_counts(
    seq: OffDiagSequence,
    size: int,
    shifts: np.ndarray,
) -> np.ndarray:
    """Number of eigenvalues of the truncation strictly above each shift."""

    return zero_diagonal_positive_counts(np.asarray(shifts), seq.squares(size))


def _eigs_above(
    off_squared: np.ndarray,
    s: float,
    tolerance: float,
    k_max: int | None,
) -> list[float]:
    available = _sturm_from_squares(off_squared, s, Side.ABOVE).count
    wanted = available if k_max is None else min(k_max, available)
    if wanted == 0:
        return []
    largest = float(np.sqrt(off_squared.max())) if len(off_squared) else 0.0
    upper = 1.0 + 2.0 * largest
    ranks = np.arange(1, wanted + 1)
    lower_ends = np.full(wanted, s, dtype=float)
    upper_ends = np.full(wanted, upper, dtype=float)
    points_range = np.arange(1, MULTISECTION_POINTS + 1)
    fractions = points_range / (MULTISECTION_POINTS + 1)
    for iteration in range(MAX_BISECTION_ITERATIONS):
        active = np.flatnonzero(upper_ends - lower_ends > tolerance)
        if active.size == 0:
            return ((lower_ends + upper_ends) / 2.0).tolist()
        widths = upper_ends[active] - lower_ends[active]
        points = lower_ends[active, None] + widths[:, None] * fractions
        counts = zero_diagonal_positive_counts(points.ravel(), off_squared)
        grid_counts = counts.reshape(points.shape)
        reached = (grid_counts >= ranks[active, None]).sum(axis=1)
        below = reached > 0
        lower_ends[active[below]] = points[below, reached[below] - 1]
        inside = reached < MULTISECTION_POINTS
        upper_ends[active[inside]] = points[inside, reached[inside]]
    raise ConvergenceError(
        "bisection did not reach the eigenvalue tolerance",
        {
            "s": s,
            "tolerance": tolerance,
            "iterations": MAX_BISECTION_ITERATIONS,
            "widest": float((upper_ends - lower_ends).max()),
        },
    )


def eigs_outside(
    seq: OffDiagSequence,
    size: int,
    query: SpectralQuery,
) -> list[float]:
    """Locate the eigenvalues of the truncation beyond the threshold.

    Above-side eigenvalues come back from the largest downward; below-side
    ones from the smallest upward, as exact negatives of the above-side
    values at -s.

    Args:
        seq: Off-diagonal sequence.
        size: Truncation size N.
        query: Threshold, side, tolerance and number of eigenvalues.

    Returns:
        list[float]: The first min(k_max, count) eigenvalues beyond s.

    Raises:
        ConvergenceError: If multisection exceeds its iteration budget.
    """

    if query.k_max == 0:
        return []
    off_squared = seq.squares(size)
    if query.side is Side.ABOVE:
        return _eigs_above(off_squared, query.s, query.tolerance, query.k_max)
    mirrored = _eigs_above(off_squared, -query.s, query.tolerance, query.k_max)
    return [-value for value in mirrored]


def _plateau_reached(levels: list[tuple[int, int]], window: int) -> bool:
    if len(levels) < window:
        return False
    tail = [count for _, count in levels[-window:]]
    return all(count == tail[0] for count in tail)


def stabilized_count(
    seq: OffDiagSequence,
    s: float,
    side: Side = Side.ABOVE,
    policy: TruncationPolicy | None = None,
) -> CountReport:
    """Count eigenvalues beyond s on growing truncations until a plateau.

    Args:
        seq: Off-diagonal sequence.
        s: Threshold, |s| > 1 for a finite count on these families.
        side: Count above or below s.
        policy: Truncation schedule; defaults to TruncationPolicy().

    Returns:
        CountReport: Last count with the inspected levels; stabilized is
        False when the cap was reached without a plateau.
    """

    policy = policy or TruncationPolicy()
    if abs(s) <= 1.0:
        logger.warning("threshold %r lies in the essential spectrum", s)
    levels: list[tuple[int, int]] = []
    perturbed = False
    size = policy.n_start
    while True:
        result = sturm_inertia(seq, size, s, side)
        perturbed = perturbed or result.perturbations > 0
        levels.append((size, result.count))
        logger.debug("level N=%d count=%d", size, result.count)
        stabilized = _plateau_reached(levels, policy.plateau_window)
        if stabilized or size >= policy.n_max:
            break
        size = min(size * policy.growth_factor, policy.n_max)
    notes: list[str] = []
    if not stabilized:
        logger.warning("no plateau for s=%r up to N=%d", s, size)
        notes.append(f"cap N={policy.n_max} reached without a plateau")
    if perturbed:
        notes.append("threshold perturbed after an exact zero pivot")
    return CountReport(
        count=levels[-1][1],
        n_used=size,
        stabilized=stabilized,
        levels=levels,
        perturbed=perturbed,
        notes=notes,
        provenance={
            "family": seq.family.value,
            "s": s,
            "side": side.value,
            "plateau_window": policy.plateau_window,
        },
    )


def dense_count(
    seq: OffDiagSequence,
    size: int,
    s: float,
    side: Side = Side.ABOVE,
) -> int:
    """Count eigenvalues beyond s with a dense symmetric eigensolver.

    Raises:
        DomainError: If size exceeds DENSE_ORACLE_MAX_N.
    """

    if size > DENSE_ORACLE_MAX_N:
        raise DomainError(
            f"dense oracle is limited to N <= {DENSE_ORACLE_MAX_N}, got {size}"
        )
    values = seq.values(size)
    matrix = np.diag(values, 1) + np.diag(values, -1)
    eigenvalues = np.linalg.eigvalsh(matrix)
    if side is Side.ABOVE:
        return int(np.count_nonzero(eigenvalues > s))
    return int(np.count_nonzero(eigenvalues < s))
