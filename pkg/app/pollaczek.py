"""Closed-form eigenvalues and monic recurrence of the Pollaczek family."""

from __future__ import annotations

import math

import numpy as np

from app.errors import DomainError
from app.jacobi import OffDiagSequence, pollaczek_coefficient
from app.models import PollaczekParams


def sequence(params: PollaczekParams) -> OffDiagSequence:
    """Return the off-diagonal sequence sqrt(p_n) of J(lambda, r)."""

    return OffDiagSequence.pollaczek(params.lam, params.r)


def mu_k(params: PollaczekParams, k: int) -> float:
    """Eigenvalue mu_k = (1 - r^2/(k+lambda)^2)^(-1/2), always above 1.

    Args:
        params: Admissible parameters lambda > r > 0.
        k: Eigenvalue index, k >= 0, mu_0 the largest.

    Returns:
        float: Closed-form eigenvalue.

    Raises:
        DomainError: If k is negative.
    """

    if k < 0:
        raise DomainError(f"eigenvalue index must be >= 0, got {k}")
    ratio = params.r / (k + params.lam)
    return (1.0 - ratio * ratio) ** -0.5


def _enumeration_bound(params: PollaczekParams, s: float) -> float:
    return params.r * s / math.sqrt(s * s - 1.0)


def count_above_closed_form(params: PollaczekParams, s: float) -> int:
    """Number of k >= 0 with mu_k > s.

    The estimate ceil(r s / sqrt(s^2 - 1) - lambda) is corrected against
    mu_k itself, so the boundary mu_k = s is excluded consistently with the
    enumeration.

    Args:
        params: Admissible parameters.
        s: Threshold, s > 1.

    Returns:
        int: Exact count.

    Raises:
        DomainError: If s <= 1 (count infinite at the essential spectrum).
    """

    if s <= 1.0:
        raise DomainError(
            f"closed-form count requires s > 1, got s={s}; the count is "
            "infinite at the essential spectrum edge"
        )
    count = max(0, math.ceil(_enumeration_bound(params, s) - params.lam))
    while count > 0 and not mu_k(params, count - 1) > s:
        count -= 1
    while mu_k(params, count) > s:
        count += 1
    return count


def enumeration_cutoff(params: PollaczekParams, s: float) -> int:
    """Largest index worth enumerating for the threshold s."""

    return math.ceil(_enumeration_bound(params, s)) + 2


def closed_form_eigenvalues(params: PollaczekParams, s: float) -> list[float]:
    """All closed-form eigenvalues above s, largest first."""

    return [mu_k(params, k) for k in range(count_above_closed_form(params, s))]


def monic_eval(
    params: PollaczekParams,
    n: int,
    x: float | np.ndarray,
) -> float | np.ndarray:
    """Evaluate the monic polynomial Q_n at x by forward recurrence.

    Q_0 = 1, Q_1 = x, Q_{k+1} = x Q_k - p_k Q_{k-1}.

    Args:
        params: Family parameters.
        n: Degree, n >= 0.
        x: Point or array of points.

    Returns:
        float | np.ndarray: Q_n(x), matching the shape of x.

    Raises:
        DomainError: If n is negative.
        OverflowError: If the recurrence leaves the floating-point range.
    """

    if n < 0:
        raise DomainError(f"degree must be >= 0, got {n}")
    points = np.asarray(x, dtype=float)
    previous = np.ones_like(points)
    current = points.copy() if n >= 1 else previous
    with np.errstate(over="ignore", invalid="ignore"):
        for k in range(1, n):
            coefficient = pollaczek_coefficient(params.lam, params.r, k)
            previous, current = (
                current,
                points * current - coefficient * previous,
            )
    if not np.all(np.isfinite(current)):
        raise OverflowError(
            f"Q_{n} overflows at the requested points; use a scaled "
            "(ratio) evaluation instead"
        )
    if current.ndim == 0:
        return float(current)
    return current
