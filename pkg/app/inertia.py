"""Pivot recurrences for symmetric tridiagonal inertia counts."""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np

CHUNK_SIZE = 65536


@dataclass(frozen=True)
class Inertia:
    """Represents the inertia of a symmetric matrix.

    Attributes:
        negative: Number of negative pivots.
        positive: Number of positive pivots.
        singular: True when an exact zero pivot stopped the elimination.
    """

    negative: int
    positive: int
    singular: bool


def ldl_pivots(
    diag: Sequence[float],
    off_squared: Sequence[float],
) -> list[float]:
    """Compute the LDL^T pivots of a symmetric tridiagonal matrix.

    Args:
        diag: Diagonal entries.
        off_squared: Squares of the off-diagonal entries, one fewer than diag.

    Returns:
        list[float]: Pivots in elimination order. The list stops at the first
        exact zero pivot, which is kept as its last element.
    """

    pivot = float(diag[0])
    pivots = [pivot]
    for entry, coupling in zip(diag[1:], off_squared):
        if pivot == 0.0:
            break
        pivot = float(entry) - float(coupling) / pivot
        pivots.append(pivot)
    return pivots


def inertia_from_pivots(pivots: Sequence[float], size: int) -> Inertia:
    """Summarize pivots of a size x size matrix into its inertia.

    Args:
        pivots: Output of ldl_pivots.
        size: Matrix dimension.

    Returns:
        Inertia: Pivot sign counts.
    """

    negative = sum(1 for pivot in pivots if pivot < 0.0)
    positive = sum(1 for pivot in pivots if pivot > 0.0)
    singular = len(pivots) < size or pivots[-1] == 0.0
    return Inertia(negative=negative, positive=positive, singular=singular)


def zero_diagonal_inertia(shift: float, off_squared: np.ndarray) -> Inertia:
    """Inertia of T - shift*I for a zero-diagonal tridiagonal T.

    The loop runs over chunks of plain floats; memory beyond the entry array
    stays constant.

    Args:
        shift: Spectral shift.
        off_squared: Squares of the off-diagonal entries of T.

    Returns:
        Inertia: Pivot sign counts; singular on an exact zero pivot.
    """

    size = len(off_squared) + 1
    pivot = -shift
    if pivot == 0.0:
        return Inertia(negative=0, positive=0, singular=True)
    positive = 1 if pivot > 0.0 else 0
    for start in range(0, size - 1, CHUNK_SIZE):
        for coupling in off_squared[start:start + CHUNK_SIZE].tolist():
            pivot = -shift - coupling / pivot
            if pivot == 0.0:
                return Inertia(negative=0, positive=positive, singular=True)
            if pivot > 0.0:
                positive += 1
    return Inertia(negative=size - positive, positive=positive, singular=False)


def zero_diagonal_positive_counts(
    shifts: np.ndarray,
    off_squared: np.ndarray,
) -> np.ndarray:
    """Count eigenvalues above many shifts at once.

    Exact zero pivots are replaced by a small negative floor, which treats
    the shift as lying just above a tied eigenvalue.

    Args:
        shifts: Array of spectral shifts.
        off_squared: Squares of the off-diagonal entries of T.

    Returns:
        np.ndarray: Number of eigenvalues strictly above each shift.
    """

    shifts = np.asarray(shifts, dtype=float)
    floor = 10.0 * np.finfo(float).eps * np.maximum(1.0, np.abs(shifts))
    pivots = np.where(shifts == 0.0, -floor, -shifts)
    positive = (pivots > 0.0).astype(np.int64)
    for coupling in off_squared.tolist():
        pivots = -shifts - coupling / pivots
        pivots = np.where(pivots == 0.0, -floor, pivots)
        positive += pivots > 0.0
    return positive
