"""Normalized Hermite functions and Gauss-Hermite quadrature checks."""

from __future__ import annotations

import math

import numpy as np
from numpy.polynomial.hermite import hermgauss

from app.errors import DomainError

DEFAULT_QUADRATURE_NODES = 64
HERMITE_SEED = math.pi ** -0.25


def _recurrence_table(
    n_max: int,
    y: np.ndarray,
    seed: np.ndarray,
) -> np.ndarray:
    """sqrt(n+1) f_{n+1} = sqrt(2) y f_n - sqrt(n) f_{n-1} from f_0 = seed."""

    table = np.zeros((n_max + 1,) + y.shape)
    table[0] = seed
    if n_max >= 1:
        table[1] = math.sqrt(2.0) * y * seed
    for n in range(1, n_max):
        table[n + 1] = (
            math.sqrt(2.0) * y * table[n] - math.sqrt(n) * table[n - 1]
        ) / math.sqrt(n + 1)
    return table


def hermite_table(n_max: int, y: float | np.ndarray) -> np.ndarray:
    """Values chi_0..chi_{n_max} at y, one row per index.

    For |y| large enough that exp(-y^2/2) underflows, every row is 0.

    Raises:
        DomainError: If n_max is negative.
    """

    if n_max < 0:
        raise DomainError(f"Hermite index must be >= 0, got {n_max}")
    points = np.asarray(y, dtype=float)
    seed = HERMITE_SEED * np.exp(-0.5 * points * points)
    return _recurrence_table(n_max, points, seed)


def hermite_eval(n: int, y: float | np.ndarray) -> float | np.ndarray:
    """Normalized Hermite function chi_n(y) by forward recurrence.

    Args:
        n: Index, n >= 0.
        y: Point or array of points.

    Returns:
        float | np.ndarray: chi_n(y); 0 where the Gaussian factor underflows.
    """

    value = hermite_table(n, y)[n]
    if np.ndim(value) == 0:
        return float(value)
    return value


def _weighted_table(n_max: int, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """chi_n * exp(y^2/2) at Gauss-Hermite nodes, with the weights."""

    points, weights = hermgauss(nodes)
    seed = np.full(points.shape, HERMITE_SEED)
    return _recurrence_table(n_max, points, seed), weights


def gram_matrix(
    size: int,
    nodes: int = DEFAULT_QUADRATURE_NODES,
) -> np.ndarray:
    """Gram matrix of chi_0..chi_{size-1} under Gauss-Hermite quadrature."""

    if size < 1:
        raise DomainError(f"Gram size must be positive, got {size}")
    table, weights = _weighted_table(size - 1, nodes)
    return (table * weights) @ table.T


def position_matrix_element(
    n: int,
    nodes: int = DEFAULT_QUADRATURE_NODES,
) -> float:
    """Quadrature value of the integral of y chi_n(y) chi_{n-1}(y).

    The exact value is sqrt(n/2), half the coupling coefficient sqrt(2n).
    """

    if n < 1:
        raise DomainError(f"index must be >= 1, got {n}")
    table, weights = _weighted_table(n, nodes)
    points, _ = hermgauss(nodes)
    return float(np.sum(weights * points * table[n] * table[n - 1]))
