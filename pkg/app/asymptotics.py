"""Estimation of the coupling q and checks of the asymptotic laws."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from app.constants import MIN_FIT_INDEX, MIN_FIT_POINTS
from app.errors import DomainError, DominationError
from app.jacobi import Family, OffDiagSequence, eigs_outside, stabilized_count
from app.models import PollaczekParams, Side, SpectralQuery, TruncationPolicy
from app.pollaczek import count_above_closed_form, mu_k

logger = logging.getLogger(__name__)

# Ranks below this and offsets s - 1 above the next one are outside the
# asymptotic regime; rows there carry no assertion.
EIGENVALUE_LAW_MIN_RANK = 5
COUNTING_LAW_MAX_OFFSET = 0.1
EIGENVALUE_STABILITY = 1e-3
DOMINATION_SLACK = 8.0 * np.finfo(float).eps


@dataclass(frozen=True)
class AsymptoticFit:
    """Represents an estimate of q in b_n = 1/2 + q/n (1 + o(1)).

    Attributes:
        q_hat: Median of n (b_n - 1/2) over the window.
        window: Inclusive index range used.
        residual: Max relative deviation of n (b_n - 1/2) from q_hat.
    """

    q_hat: float
    window: tuple[int, int]
    residual: float


def estimate_q(
    seq: OffDiagSequence,
    window: tuple[int, int] = (1000, 10000),
) -> AsymptoticFit:
    """Estimate q as the median of n (b_n - 1/2) over an index window.

    The window and the factor n are row indices of the matrix; for J0,
    whose stored entry m sits at row m + 1, entry n - 1 is read.

    Raises:
        DomainError: If the window starts below 10 or holds fewer than 8
            points.
    """

    first, last = window
    if first < MIN_FIT_INDEX:
        raise DomainError(
            f"window must start at index >= {MIN_FIT_INDEX}, got {first}"
        )
    if last - first + 1 < MIN_FIT_POINTS:
        raise DomainError(
            f"window must hold at least {MIN_FIT_POINTS} points, got "
            f"{max(0, last - first + 1)}"
        )
    indices = np.arange(first, last + 1)
    offset = 1 if seq.family is Family.J0 else 0
    scaled = indices * (seq.at(indices - offset) - 0.5)
    q_hat = float(np.median(scaled))
    deviation = np.abs(scaled - q_hat)
    if q_hat != 0.0:
        deviation = deviation / abs(q_hat)
    return AsymptoticFit(
        q_hat=q_hat,
        window=(first, last),
        residual=float(deviation.max()),
    )


@dataclass(frozen=True)
class EigenvalueLawRow:
    """Represents one row (k, lambda_k, k^2 (lambda_k - 1) / (2 q^2))."""

    k: int
    eigenvalue: float
    ratio: float
    asymptotic: bool


@dataclass(frozen=True)
class EigenvalueLawTable:
    """Represents the eigenvalue-law table with its provenance.

    Attributes:
        rows: One row per available rank.
        source: "closed_form" or "engine".
        n_used: Truncation size for engine rows, 0 for closed form.
        stabilized: Whether the eigenvalues settled across truncations.
        notes: Remarks such as ranks beyond the available eigenvalues.
    """

    rows: list[EigenvalueLawRow]
    source: str
    n_used: int
    stabilized: bool
    notes: list[str] = field(default_factory=list)


def _pollaczek_params(seq: OffDiagSequence) -> PollaczekParams | None:
    if seq.family is not Family.POLLACZEK:
        return None
    lam, r = seq.params
    if not lam > r > 0.0:
        return None
    return PollaczekParams(lam=lam, r=r)


def _settled_eigenvalues(
    seq: OffDiagSequence,
    count: int,
    policy: TruncationPolicy,
) -> tuple[list[float], int, bool]:
    """Top eigenvalues above 1 on doubling truncations until they settle."""

    query = SpectralQuery(s=1.0, k_max=count)
    size = policy.n_start
    previous: list[float] | None = None
    while True:
        current = eigs_outside(seq, size, query)
        if previous is not None and len(current) == len(previous):
            gaps = [
                abs(new - old) <= EIGENVALUE_STABILITY * (new - 1.0)
                for new, old in zip(current, previous)
            ]
            if all(gaps):
                return current, size, True
        if size >= policy.n_max:
            return current, size, False
        previous = current
        size = min(size * policy.growth_factor, policy.n_max)


def check_eigenvalue_law(
    seq: OffDiagSequence,
    q: float,
    ranks: Sequence[int],
    policy: TruncationPolicy | None = None,
) -> EigenvalueLawTable:
    """Tabulate k^2 (lambda_k - 1) / (2 q^2), which tends to 1.

    Ranks start at k = 1 for the largest eigenvalue above 1. Pollaczek
    families use their closed-form eigenvalues; others use settled
    truncations of the spectral engine.

    Raises:
        DomainError: If q <= 0 or a rank is below 1.
    """

    if q <= 0.0:
        raise DomainError(f"the eigenvalue law requires q > 0, got {q}")
    if any(k < 1 for k in ranks):
        raise DomainError("eigenvalue ranks start at k=1")
    policy = policy or TruncationPolicy()
    wanted = max(ranks)
    params = _pollaczek_params(seq)
    if params is not None:
        eigenvalues = [mu_k(params, k) for k in range(wanted)]
        source, n_used, stabilized = "closed_form", 0, True
    else:
        eigenvalues, n_used, stabilized = _settled_eigenvalues(
            seq,
            wanted,
            policy,
        )
        source = "engine"
    rows: list[EigenvalueLawRow] = []
    notes: list[str] = []
    for k in ranks:
        if k > len(eigenvalues):
            notes.append(
                f"rank {k} beyond the {len(eigenvalues)} available eigenvalues"
            )
            continue
        value = eigenvalues[k - 1]
        rows.append(
            EigenvalueLawRow(
                k=k,
                eigenvalue=value,
                ratio=k * k * (value - 1.0) / (2.0 * q * q),
                asymptotic=k >= EIGENVALUE_LAW_MIN_RANK,
            )
        )
    if not stabilized:
        notes.append("eigenvalues did not settle before the truncation cap")
    return EigenvalueLawTable(
        rows=rows,
        source=source,
        n_used=n_used,
        stabilized=stabilized,
        notes=notes,
    )


@dataclass(frozen=True)
class CountingLawRow:
    """Represents one row (s, N+(s), N+(s) sqrt(s - 1) / (q sqrt(2)))."""

    s: float
    count: int
    ratio: float
    stabilized: bool
    n_used: int
    source: str
    asymptotic: bool


def check_counting_law(
    seq: OffDiagSequence,
    q: float,
    s_values: Sequence[float],
    policy: TruncationPolicy | None = None,
) -> list[CountingLawRow]:
    """Tabulate N+(s) sqrt(s - 1) / (q sqrt(2)), which tends to 1 as s -> 1.

    Rows from non-stabilized counts are flagged with stabilized=False.

    Raises:
        DomainError: If q <= 0 or some s <= 1.
    """

    if q <= 0.0:
        raise DomainError(f"the counting law requires q > 0, got {q}")
    policy = policy or TruncationPolicy()
    params = _pollaczek_params(seq)
    rows: list[CountingLawRow] = []
    for s in s_values:
        if s <= 1.0:
            raise DomainError(f"the counting law requires s > 1, got {s}")
        if params is not None:
            count = count_above_closed_form(params, s)
            stabilized, n_used, source = True, 0, "closed_form"
        else:
            report = stabilized_count(seq, s, Side.ABOVE, policy)
            count, stabilized, n_used = (
                report.count,
                report.stabilized,
                report.n_used,
            )
            source = "engine"
            if not stabilized:
                logger.warning("counting-law row s=%r is not stabilized", s)
        rows.append(
            CountingLawRow(
                s=s,
                count=count,
                ratio=count * math.sqrt(s - 1.0) / (q * math.sqrt(2.0)),
                stabilized=stabilized,
                n_used=n_used,
                source=source,
                asymptotic=s - 1.0 <= COUNTING_LAW_MAX_OFFSET,
            )
        )
    return rows


def coupling_threshold(alpha: float, bonds: int = 2) -> float:
    """Threshold s(alpha) = m / (alpha sqrt(2)); the line has m = 2.

    Raises:
        DomainError: Unless 0 < alpha < m / sqrt(2).
    """

    critical = bonds / math.sqrt(2.0)
    if not 0.0 < alpha < critical:
        raise DomainError(
            f"alpha must lie in (0, {critical:.6f}) for m={bonds}, got {alpha}"
        )
    return bonds / (alpha * math.sqrt(2.0))


def predict_count_A(alpha: float, bonds: int = 2) -> float:
    """Asymptotic count 1 / (4 sqrt(2 (s(alpha) - 1))) below the threshold.

    Meaningful as alpha approaches m / sqrt(2), where it diverges.
    """

    s = coupling_threshold(alpha, bonds)
    return 1.0 / (4.0 * math.sqrt(2.0 * (s - 1.0)))


@dataclass(frozen=True)
class ComparisonRow:
    """Represents N+(s) for a dominated and a dominating sequence."""

    s: float
    count_small: int
    count_large: int
    ordered: bool
    stabilized: bool
    n_used: int


def check_domination(
    seq_small: OffDiagSequence,
    seq_large: OffDiagSequence,
    size: int,
) -> None:
    """Verify 1/2 <= b_n <= b'_n for the entries of a size x size truncation.

    Raises:
        DominationError: Naming the first violating index.
    """

    small = seq_small.values(size)
    large = seq_large.values(size)
    slack = DOMINATION_SLACK * np.abs(large)
    violations = np.flatnonzero(
        (small < 0.5 - slack) | (small > large + slack)
    )
    if violations.size:
        index = int(violations[0]) + 1
        raise DominationError(
            f"entrywise domination 1/2 <= b_n <= b'_n fails at n={index} "
            f"(b_n={small[index - 1]!r}, b'_n={large[index - 1]!r})",
            index,
        )


def comparison_check(
    seq_small: OffDiagSequence,
    seq_large: OffDiagSequence,
    s_values: Sequence[float],
    policy: TruncationPolicy | None = None,
) -> list[ComparisonRow]:
    """Check N+(s; J) <= N+(s; J') for entrywise dominated sequences.

    Raises:
        DominationError: If domination fails on the truncation range.
        DomainError: If some s <= 1.
    """

    policy = policy or TruncationPolicy()
    check_domination(seq_small, seq_large, policy.n_max)
    rows: list[ComparisonRow] = []
    for s in s_values:
        if s <= 1.0:
            raise DomainError(f"comparison requires s > 1, got {s}")
        small = stabilized_count(seq_small, s, Side.ABOVE, policy)
        large = stabilized_count(seq_large, s, Side.ABOVE, policy)
        rows.append(
            ComparisonRow(
                s=s,
                count_small=small.count,
                count_large=large.count,
                ordered=small.count <= large.count,
                stabilized=small.stabilized and large.stabilized,
                n_used=max(small.n_used, large.n_used),
            )
        )
    return rows
