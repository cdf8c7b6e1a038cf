"""Tests for the Jacobi families and the Sturm counting engine."""

import math

import mpmath
import numpy as np
import pytest

from app.errors import DomainError
from app.jacobi import (
    Family,
    OffDiagSequence,
    dense_count,
    eigs_outside,
    offdiag_j0,
    offdiag_j_eps,
    offdiag_pollaczek,
    pollaczek_coefficient,
    stabilized_count,
    sturm_count,
    sturm_counts,
    sturm_inertia,
)
from app.models import PollaczekParams, Side, SpectralQuery, TruncationPolicy
from app.pollaczek import count_above_closed_form, mu_k

SEEDS = [1, 2, 3, 4, 5]


def families() -> list[OffDiagSequence]:
    return [
        OffDiagSequence.j_eps(0.25),
        OffDiagSequence.j_eps(0.1),
        OffDiagSequence.j0(),
        OffDiagSequence.pollaczek(1.0, 0.5),
        OffDiagSequence.constant(),
    ]


def test_j_eps_first_entry() -> None:
    """Direct evaluation at eps=0.25, n=1."""

    assert offdiag_j_eps(0.25, 1) == pytest.approx(0.66875, rel=1e-4)


def test_j_eps_tends_to_one_half() -> None:
    """Entries approach 1/2 far out."""

    assert abs(offdiag_j_eps(0.25, 10**6) - 0.5) < 1e-6


def test_j_eps_matches_extended_precision() -> None:
    """Double-precision entry agrees with an mpmath re-evaluation."""

    mpmath.mp.dps = 40
    n, eps = 2, mpmath.mpf("0.1")
    exact = mpmath.sqrt(n) / (
        2 * mpmath.power(n + eps, 0.25) * mpmath.power(n - 1 + eps, 0.25)
    )
    assert offdiag_j_eps(0.1, 2) == pytest.approx(float(exact), rel=1e-14)


def test_j_eps_diverges_at_zero_shift() -> None:
    """The first entry is infinite at eps=0."""

    with pytest.raises(DomainError, match="j_\\(1,0\\)\\(0\\)=inf"):
        offdiag_j_eps(0.0, 1)


def test_j_eps_family_rejects_shift_outside_range() -> None:
    """The family accepts eps in (0, 1/2] only."""

    with pytest.raises(DomainError):
        OffDiagSequence.j_eps(0.75)


def test_j0_entries() -> None:
    """Direct and series values of the J0 entries."""

    assert offdiag_j0(2) == pytest.approx(2 ** -0.75, rel=1e-12)
    assert offdiag_j0(100) == pytest.approx(0.5012578, abs=1e-6)
    assert abs(offdiag_j0(100) - (0.5 + 1.0 / 800.0)) < 1e-5
    assert abs(offdiag_j0(10**8) - 0.5) < 1e-8


def test_j0_has_no_first_entry() -> None:
    """J0 starts at n=2."""

    with pytest.raises(DomainError):
        offdiag_j0(1)


def test_j0_sequence_is_shifted_by_one() -> None:
    """Stored entry n of the J0 sequence is the entry at row n + 1."""

    seq = OffDiagSequence.j0()
    assert seq.eval(1) == offdiag_j0(2)
    np.testing.assert_allclose(
        seq.values(6),
        [offdiag_j0(n) for n in range(2, 7)],
        rtol=1e-15,
    )


def test_pollaczek_entries() -> None:
    """Hand-computed Pollaczek entries."""

    assert offdiag_pollaczek(1.0, 0.5, 1) == pytest.approx(
        math.sqrt(2.0 / 3.0), rel=1e-12
    )
    assert pollaczek_coefficient(2.0, 1.0, 3) == pytest.approx(0.375)
    assert offdiag_pollaczek(2.0, 1.0, 3) == pytest.approx(0.612372, rel=1e-6)
    for n in (1, 5, 50):
        assert offdiag_pollaczek(1.0, 1e-12, n) == pytest.approx(0.5, rel=1e-9)


def test_pollaczek_rejects_non_positive_denominator() -> None:
    """A vanishing denominator is a domain error."""

    with pytest.raises(DomainError):
        pollaczek_coefficient(0.5, 0.5, 1)


def test_block_evaluation_matches_entries() -> None:
    """Vectorized values agree with the scalar map."""

    for seq in families():
        expected = [seq.eval(n) for n in range(1, 40)]
        np.testing.assert_allclose(seq.values(40), expected, rtol=1e-14)


def test_families_tend_to_one_half() -> None:
    """Every named family approaches 1/2 at n = 10^6."""

    for seq in families():
        assert abs(seq.eval(10**6) - 0.5) < 1e-3
    assert OffDiagSequence.j0().family is Family.J0


def test_custom_family() -> None:
    """A custom entry map feeds the same engine."""

    seq = OffDiagSequence.custom(lambda n: 0.5)
    assert seq.family is Family.CUSTOM
    assert sturm_count(seq, 2, 0.25) == 1


def test_two_by_two_counts() -> None:
    """The 2x2 free matrix has eigenvalues -1/2 and 1/2."""

    seq = OffDiagSequence.constant()
    assert sturm_count(seq, 2, 0.75, Side.ABOVE) == 0
    assert sturm_count(seq, 2, 0.25, Side.ABOVE) == 1
    assert sturm_count(seq, 2, -0.25, Side.BELOW) == 1


def test_pollaczek_count_at_large_truncation() -> None:
    """Only mu_0 exceeds 1.1."""

    seq = OffDiagSequence.pollaczek(1.0, 0.5)
    assert sturm_count(seq, 2000, 1.1) == 1


def test_zero_pivot_is_perturbed() -> None:
    """A threshold on an eigenvalue is moved and counted on neither side."""

    seq = OffDiagSequence.constant()
    result = sturm_inertia(seq, 3, 0.0, Side.ABOVE)
    assert result.perturbations > 0
    assert result.shift > 0.0
    assert result.count == 1
    assert sturm_count(seq, 3, 0.0, Side.BELOW) == 1


def test_eigs_two_by_two() -> None:
    """The single eigenvalue above 0.25."""

    seq = OffDiagSequence.constant()
    values = eigs_outside(seq, 2, SpectralQuery(s=0.25))
    assert values == pytest.approx([0.5], abs=1e-10)


def test_eigs_pollaczek_closed_form() -> None:
    """The three largest eigenvalues match mu_0, mu_1, mu_2."""

    params = PollaczekParams(lam=1.0, r=0.5)
    seq = OffDiagSequence.pollaczek(1.0, 0.5)
    values = eigs_outside(seq, 5000, SpectralQuery(s=1.01, k_max=3))
    expected = [mu_k(params, k) for k in range(3)]
    assert values == pytest.approx(expected, rel=1e-4)
    assert values[0] == pytest.approx(1.1547005, rel=1e-6)


def test_eigs_empty_request() -> None:
    """k_max=0 returns nothing."""

    seq = OffDiagSequence.pollaczek(1.0, 0.5)
    assert eigs_outside(seq, 100, SpectralQuery(s=1.01, k_max=0)) == []


@pytest.mark.parametrize("seed", SEEDS)
def test_eigs_reflect(seed: int) -> None:
    """Eigenvalues below -s are the negatives of those above s."""

    rng = np.random.default_rng(seed)
    for seq in families():
        size = int(rng.integers(2, 300))
        s = float(rng.uniform(0.0, 1.2))
        above = eigs_outside(seq, size, SpectralQuery(s=s, k_max=5))
        below = eigs_outside(
            seq,
            size,
            SpectralQuery(s=-s, side=Side.BELOW, k_max=5),
        )
        assert below == pytest.approx([-value for value in above], abs=1e-10)


@pytest.mark.parametrize("seed", SEEDS)
def test_count_symmetry(seed: int) -> None:
    """Counts above s equal counts below -s exactly."""

    rng = np.random.default_rng(seed)
    for seq in families():
        size = int(rng.integers(2, 500))
        for s in rng.uniform(0.0, 2.0, 100):
            assert sturm_count(seq, size, float(s), Side.ABOVE) == sturm_count(
                seq, size, -float(s), Side.BELOW
            )


@pytest.mark.parametrize("seed", SEEDS)
def test_count_monotone_and_complete(seed: int) -> None:
    """Counts decrease in s and the two sides add up to N."""

    rng = np.random.default_rng(seed)
    for seq in families():
        size = int(rng.integers(2, 500))
        shifts = np.sort(rng.uniform(-2.0, 2.0, 50))
        above = [sturm_count(seq, size, float(s), Side.ABOVE) for s in shifts]
        below = [sturm_count(seq, size, float(s), Side.BELOW) for s in shifts]
        assert all(a >= b for a, b in zip(above, above[1:]))
        assert all(a + b == size for a, b in zip(above, below))
        np.testing.assert_array_equal(sturm_counts(seq, size, shifts), above)


@pytest.mark.parametrize("seed", SEEDS)
def test_count_matches_dense_solver(seed: int) -> None:
    """Sturm counts equal dense eigensolver counts."""

    rng = np.random.default_rng(seed)
    for seq in families():
        size = int(rng.integers(2, 200))
        for s in rng.uniform(-1.5, 1.5, 10):
            for side in Side:
                assert sturm_count(seq, size, float(s), side) == dense_count(
                    seq, size, float(s), side
                )


def test_dense_oracle_size_limit() -> None:
    """The dense oracle refuses very large matrices."""

    with pytest.raises(DomainError):
        dense_count(OffDiagSequence.j0(), 5000, 1.01)


def test_stabilized_free_matrix() -> None:
    """The free matrix has nothing above 1.1."""

    report = stabilized_count(OffDiagSequence.constant(), 1.1)
    assert report.count == 0
    assert report.stabilized
    assert all(count == 0 for _, count in report.levels)


def test_stabilized_pollaczek() -> None:
    """Stabilized count agrees with the closed form."""

    report = stabilized_count(OffDiagSequence.pollaczek(1.0, 0.5), 1.05)
    assert report.count == 1
    assert report.stabilized
    tail = [count for _, count in report.levels[-2:]]
    assert tail == [1, 1]


def test_stabilized_j0_matches_dense_solver() -> None:
    """The plateau agrees with a dense eigensolve at the final size."""

    policy = TruncationPolicy(n_start=256, n_max=4096)
    seq = OffDiagSequence.j0()
    report = stabilized_count(seq, 1.01, Side.ABOVE, policy)
    assert report.stabilized
    assert report.count == dense_count(seq, report.n_used, 1.01)


@pytest.mark.parametrize("offset", [1e-2, 3e-3, 1e-3])
def test_stabilized_j0_near_edge_matches_dense_solver(offset: float) -> None:
    """Counts just above 1 agree with a dense eigensolve."""

    policy = TruncationPolicy(n_start=256, n_max=4096)
    seq = OffDiagSequence.j0()
    s = 1.0 + offset
    report = stabilized_count(seq, s, Side.ABOVE, policy)
    assert report.stabilized
    assert report.count == dense_count(seq, report.n_used, s)


def test_stabilized_reports_cap() -> None:
    """Reaching the cap without a plateau is reported, not raised."""

    policy = TruncationPolicy(n_start=2, n_max=2, plateau_window=2)
    report = stabilized_count(OffDiagSequence.j0(), 1.001, Side.ABOVE, policy)
    assert not report.stabilized
    assert report.n_used == 2
    assert report.notes


@pytest.mark.parametrize("lam", [1.0, 1.5, 2.0])
@pytest.mark.parametrize("r", [0.25, 0.5, 0.9])
def test_stabilized_counts_match_closed_form(lam: float, r: float) -> None:
    """Engine counts equal the closed-form Pollaczek counts."""

    params = PollaczekParams(lam=lam, r=r)
    seq = OffDiagSequence.pollaczek(lam, r)
    for s in (1.01, 1.05, 1.2):
        report = stabilized_count(seq, s)
        assert report.count == count_above_closed_form(params, s)


def test_truncation_eigenvalues_increase_with_size() -> None:
    """Eigenvalues above 1 grow toward their limits as N doubles."""

    seq = OffDiagSequence.pollaczek(1.0, 0.5)
    query = SpectralQuery(s=1.01, k_max=2)
    previous = eigs_outside(seq, 64, query)
    for size in (128, 256, 512):
        current = eigs_outside(seq, size, query)
        assert all(
            new >= old - 1e-10 for new, old in zip(current, previous)
        )
        previous = current
