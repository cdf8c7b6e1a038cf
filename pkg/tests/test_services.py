"""Tests for the report builders."""

import math

import pytest

from app.errors import DomainError
from app.jacobi import Family, OffDiagSequence
from app.models import (
    Geometry,
    ModeSpaceGrid,
    PollaczekParams,
    Side,
    SmilanskyProblem,
    SpectralQuery,
    StarGraphSpec,
    TruncationPolicy,
)
from app.services import (
    Report,
    asymptotics_compare_report,
    asymptotics_laws_report,
    asymptotics_predict_report,
    asymptotics_q_report,
    jacobi_count_report,
    jacobi_eigs_report,
    make_sequence,
    pollaczek_eval_report,
    pollaczek_oracle_report,
    resolve_grid,
    smilansky_count_report,
    smilansky_eigs_report,
    smilansky_schur_report,
    smilansky_star_report,
    verify_all_report,
    verify_bs_report,
)

SMALL_POLICY = TruncationPolicy(n_start=256, n_max=8192)
SMALL_GRID = ModeSpaceGrid(modes=8, half_length=10.0, step=1.0 / 32.0)


def test_report_document_layout() -> None:
    """Documents carry inputs, results and diagnostics."""

    report = Report(inputs={"a": 1}, results=[{"b": 2}])
    assert report.to_document() == {
        "inputs": {"a": 1},
        "results": [{"b": 2}],
        "diagnostics": {},
    }


def test_make_sequence_builds_families() -> None:
    """Named families come back with their parameters."""

    assert make_sequence(Family.J_EPS, eps=0.25).params == (0.25,)
    assert make_sequence(Family.J0).family is Family.J0
    assert make_sequence(Family.POLLACZEK, lam=1.0, r=0.5).params == (1.0, 0.5)
    assert make_sequence(Family.CONSTANT).params == (0.5,)
    assert make_sequence(Family.CONSTANT, value=0.6).params == (0.6,)


def test_make_sequence_requires_parameters() -> None:
    """Missing family parameters are domain errors."""

    with pytest.raises(DomainError, match="--eps"):
        make_sequence(Family.J_EPS)
    with pytest.raises(DomainError, match="--lambda"):
        make_sequence(Family.POLLACZEK, lam=1.0)
    with pytest.raises(DomainError):
        make_sequence(Family.CUSTOM)
    with pytest.raises(ValueError):
        make_sequence(Family.POLLACZEK, lam=0.5, r=1.0)


def test_resolve_grid_defaults_and_overrides() -> None:
    """Unset values follow the default rule; L snaps to the step."""

    assert resolve_grid(0.25).half_length == pytest.approx(24.0)
    grid = resolve_grid(0.25, modes=16, step=0.07)
    assert grid.step == 0.07
    assert grid.intervals_per_side == 343
    explicit = resolve_grid(0.25, modes=4, half_length=10.0, step=0.125)
    assert explicit == ModeSpaceGrid(modes=4, half_length=10.0, step=0.125)
    with pytest.raises(ValueError):
        resolve_grid(0.25, half_length=10.0, step=0.3)


def test_jacobi_count_report() -> None:
    """One row per threshold with its levels."""

    seq = make_sequence(Family.POLLACZEK, lam=1.0, r=0.5)
    document = jacobi_count_report(
        seq, [1.05, 1.2], Side.ABOVE, SMALL_POLICY
    ).to_document()
    counts = [row["count"] for row in document["results"]]
    assert counts == [1, 0]
    assert document["inputs"]["family"] == "pollaczek"
    assert document["inputs"]["n_max"] == 8192
    assert document["diagnostics"]["stabilized"] is True
    assert document["results"][0]["levels"].startswith("256:1")


def test_jacobi_eigs_report() -> None:
    """Eigenvalues are ranked from k = 1."""

    seq = OffDiagSequence.constant()
    report = jacobi_eigs_report(seq, 2, SpectralQuery(s=0.25))
    assert report.results[0]["k"] == 1
    assert report.results[0]["eigenvalue"] == pytest.approx(0.5, abs=1e-10)
    assert report.diagnostics == {"located": 1}


def test_pollaczek_oracle_report() -> None:
    """Closed-form counts at s = 1.1 and 1.2."""

    params = PollaczekParams(lam=1.0, r=0.5)
    report = pollaczek_oracle_report(params, [1.1, 1.2])
    assert [row["count_closed_form"] for row in report.results] == [1, 0]
    assert report.results[0]["mu_0"] == pytest.approx(1.1547005, rel=1e-6)
    assert len(report.diagnostics["eigenvalues"]["1.1"]) == 1


def test_pollaczek_eval_report() -> None:
    """Q_2 = x^2 - 2/3 for lambda = 1, r = 1/2."""

    params = PollaczekParams(lam=1.0, r=0.5)
    report = pollaczek_eval_report(params, 2, [0.0, 1.0])
    values = [row["value"] for row in report.results]
    assert values == pytest.approx([-2.0 / 3.0, 1.0 / 3.0], rel=1e-12)


def test_smilansky_count_report() -> None:
    """The uncoupled operator has nothing below 1/2 - eps."""

    problem = SmilanskyProblem(alpha=0.0, eps=0.25)
    document = smilansky_count_report(problem, SMALL_GRID).to_document()
    (row,) = document["results"]
    assert row["count"] == 0
    assert row["threshold"] == 0.25
    assert row["modes"] == 8
    assert document["diagnostics"]["bonds"] == 2


def test_smilansky_schur_report() -> None:
    """Normalized complement is close to I + (alpha/sqrt(2)) J(eps)."""

    problem = SmilanskyProblem(alpha=1.0, eps=0.25)
    report = smilansky_schur_report(problem, SMALL_GRID)
    assert len(report.results) == 8
    assert report.results[0]["off"] == 0.0
    assert report.results[1]["off"] == pytest.approx(math.sqrt(2.0) / 2.0)
    assert report.diagnostics["max_deviation"] < 5e-3


def test_smilansky_star_report() -> None:
    """alpha = 0 has no Jacobi threshold."""

    problem = SmilanskyProblem(alpha=0.0, eps=0.25, geometry=Geometry.STAR)
    report = smilansky_star_report(StarGraphSpec(m=3), problem, SMALL_GRID)
    assert report.results[0]["s"] is None
    assert report.inputs["lengths"] == ["inf", "inf", "inf"]

    coupled = SmilanskyProblem(alpha=1.0, eps=0.25, geometry=Geometry.STAR)
    report = smilansky_star_report(StarGraphSpec(m=3), coupled, SMALL_GRID)
    assert report.results[0]["s"] == pytest.approx(3.0 / math.sqrt(2.0))


def test_smilansky_eigs_report() -> None:
    """Rows carry the lower bound of the form."""

    problem = SmilanskyProblem(alpha=1.4, eps=0.02)
    report = smilansky_eigs_report(problem, SMALL_GRID, 1e-10)
    assert report.diagnostics["located"] == len(report.results)
    for row in report.results:
        assert row["eigenvalue"] >= row["lower_bound"]
        assert row["eigenvalue"] < problem.threshold


def test_asymptotics_q_report() -> None:
    """q for J0 over the default window."""

    report = asymptotics_q_report(OffDiagSequence.j0(), (1000, 10000))
    assert report.results[0]["q_hat"] == pytest.approx(0.125, rel=1e-2)
    assert report.inputs["window"] == [1000, 10000]


def test_asymptotics_laws_report() -> None:
    """Rows are tagged by law."""

    seq = OffDiagSequence.pollaczek(1.0, 0.5)
    report = asymptotics_laws_report(seq, 0.25, [5], [1.001], SMALL_POLICY)
    assert [row["law"] for row in report.results] == ["eigenvalue", "counting"]
    assert report.results[0]["source"] == "closed_form"


def test_asymptotics_predict_report() -> None:
    """Prediction rows include the J0 count."""

    report = asymptotics_predict_report([1.2], 2, SMALL_POLICY)
    (row,) = report.results
    assert row["s"] == pytest.approx(math.sqrt(2.0) / 1.2)
    assert row["count_j0"] >= 0
    assert "prediction" in row


def test_asymptotics_compare_report() -> None:
    """Dominated sequences compare in order."""

    report = asymptotics_compare_report(
        OffDiagSequence.j_eps(0.3),
        OffDiagSequence.j_eps(0.1),
        [1.05],
        SMALL_POLICY,
    )
    assert report.diagnostics["ordered"] is True
    assert report.inputs["small"] == {"family": "jeps", "params": [0.3]}


def test_verify_bs_report_small_sweep() -> None:
    """A weak coupling has no eigenvalue on either side."""

    report = verify_bs_report([0.8], [0.25], modes=16, policy=SMALL_POLICY)
    (row,) = report.results
    assert row["check"] == "birman_schwinger"
    assert row["observed"] == row["expected"] == 0
    assert report.diagnostics["all_passed"] is True


@pytest.fixture(scope="module")
def full_check() -> Report:
    """One run of every end-to-end check at the default grids."""

    return verify_all_report(seed=1)


def rows_for(report: Report, check: str) -> list[dict]:
    return [row for row in report.results if row["check"] == check]


def test_verify_all_passes(full_check: Report) -> None:
    """Every row passes and nothing is listed as failed."""

    assert full_check.diagnostics == {"all_passed": True, "failed": []}
    assert full_check.inputs["seed"] == 1


def test_verify_all_birman_schwinger_table(full_check: Report) -> None:
    """Operator and Jacobi counts agree on all eight (alpha, eps) pairs."""

    rows = rows_for(full_check, "birman_schwinger")
    assert len(rows) == 8
    assert all(row["observed"] == row["expected"] for row in rows)
    (strongest,) = [row for row in rows if row["case"] == "alpha=1.3 eps=0.1"]
    assert strongest["observed"] == 1


def test_verify_all_sandwich(full_check: Report) -> None:
    """N(A) lies in {N+(J0), N+(J0) + 1} for every eps in the sequence."""

    rows = rows_for(full_check, "sandwich")
    assert len(rows) == 6
    for row in rows:
        low, high = (int(part) for part in row["expected"].split(".."))
        assert low <= row["observed"] <= high


def test_verify_all_j0_counting_law(full_check: Report) -> None:
    """The s - 1 = 1e-2 row is reported only; the others sit in the band."""

    rows = rows_for(full_check, "j0_counting_law")
    assert [row["count"] for row in rows] == [1, 3, 5]
    assert [row["asserted"] for row in rows] == [False, True, True]
    assert rows[0]["expected"] == "pre-asymptotic"
    assert rows[0]["passed"] is True
    for row in rows[1:]:
        assert 0.7 <= row["observed"] <= 1.3


def test_verify_all_final_asymptotic(full_check: Report) -> None:
    """N+(s(alpha); J0) is within max(2, 0.3 prediction) of the prediction."""

    rows = rows_for(full_check, "final_asymptotic")
    assert [row["case"] for row in rows] == ["alpha=1.4", "alpha=1.41"]
    for row in rows:
        slack = max(2.0, 0.3 * row["expected"])
        assert abs(row["observed"] - row["expected"]) <= slack


def test_verify_all_schur_star_and_symmetry(full_check: Report) -> None:
    """Schur identity, star graph and symmetry rows all pass."""

    for check in (
        "schur_identity",
        "schur_order",
        "star_graph",
        "star_graph_line",
        "symmetry",
        "pollaczek_eigenvalue",
        "pollaczek_count",
    ):
        rows = rows_for(full_check, check)
        assert rows, check
        assert all(row["passed"] for row in rows), check
    (order,) = rows_for(full_check, "schur_order")
    assert order["observed"] == pytest.approx(2.0, abs=0.25)
