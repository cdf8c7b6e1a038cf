"""Tests for the Hermite functions."""

import math

import numpy as np
import pytest

from app.errors import DomainError
from app.hermite import (
    gram_matrix,
    hermite_eval,
    hermite_table,
    position_matrix_element,
)
from app.smilansky import coupling_coefficient


def test_values_at_origin() -> None:
    """chi_0(0) = pi^(-1/4) and odd functions vanish at 0."""

    assert hermite_eval(0, 0.0) == pytest.approx(0.7511256, rel=1e-6)
    assert hermite_eval(1, 0.0) == 0.0
    assert hermite_eval(3, 0.0) == 0.0


def test_first_functions_closed_form() -> None:
    """chi_1 and chi_2 against their explicit formulas."""

    y = np.linspace(-3.0, 3.0, 13)
    gauss = math.pi ** -0.25 * np.exp(-0.5 * y * y)
    np.testing.assert_allclose(
        hermite_eval(1, y), math.sqrt(2.0) * y * gauss, atol=1e-14
    )
    np.testing.assert_allclose(
        hermite_eval(2, y), (2.0 * y * y - 1.0) / math.sqrt(2.0) * gauss,
        atol=1e-14,
    )


def test_gram_matrix_is_identity() -> None:
    """Gauss-Hermite quadrature reproduces orthonormality."""

    np.testing.assert_allclose(gram_matrix(16), np.eye(16), atol=1e-8)


def test_norm_by_trapezoid() -> None:
    """Integral of chi_3^2 on a fine grid is 1."""

    y = np.linspace(-12.0, 12.0, 24001)
    values = hermite_eval(3, y)
    assert np.trapz(values * values, y) == pytest.approx(1.0, abs=1e-8)


@pytest.mark.parametrize("n", range(1, 9))
def test_position_matrix_element(n: int) -> None:
    """<y chi_n, chi_(n-1)> = sqrt(n/2), half the coupling coefficient."""

    value = position_matrix_element(n)
    assert value == pytest.approx(math.sqrt(n / 2.0), rel=1e-10)
    assert 2.0 * value == pytest.approx(coupling_coefficient(n), rel=1e-10)


def test_coupling_coefficients() -> None:
    """sqrt(2n) at n = 2 and n = 8."""

    assert coupling_coefficient(2) == 2.0
    assert coupling_coefficient(8) == 4.0
    with pytest.raises(DomainError):
        coupling_coefficient(0)


def test_underflow_returns_zero() -> None:
    """Far in the tail the Gaussian factor underflows to 0."""

    assert hermite_eval(5, 60.0) == 0.0
    assert np.all(hermite_table(4, np.array([-60.0, 60.0])) == 0.0)


def test_negative_index_is_rejected() -> None:
    """Hermite indices start at 0."""

    with pytest.raises(DomainError):
        hermite_eval(-1, 0.0)
    with pytest.raises(DomainError):
        position_matrix_element(0)
