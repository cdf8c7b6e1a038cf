"""Tests for the FastAPI app."""

from fastapi.testclient import TestClient

from app import main
from app.errors import ConvergenceError
from app.main import app


def test_root_returns_service_metadata() -> None:
    """Role: Ensure the root endpoint returns service metadata.

    Inputs: None.
    Outputs: Response JSON with status, service and command groups.
    Errors: None.
    """

    client = TestClient(app)
    response = client.get("/")

    assert response.status_code == 200
    assert response.json() == {
        "status": "ok",
        "service": "Smilansky Spectra API",
        "groups": [
            "jacobi",
            "pollaczek",
            "smilansky",
            "asymptotics",
            "verify",
        ],
    }


def test_pollaczek_oracle_endpoint() -> None:
    """Role: Ensure the oracle endpoint returns closed-form counts.

    Inputs: lambda=1, r=0.5 and two thresholds.
    Outputs: One row per threshold.
    Errors: None.
    """

    client = TestClient(app)
    response = client.get(
        "/api/pollaczek/oracle",
        params={"lam": 1.0, "r": 0.5, "s": [1.1, 1.2]},
    )

    assert response.status_code == 200
    payload = response.json()
    assert [row["count_closed_form"] for row in payload["results"]] == [1, 0]
    assert payload["inputs"] == {"lambda": 1.0, "r": 0.5, "s": [1.1, 1.2]}


def test_jacobi_count_endpoint() -> None:
    """Role: Ensure Jacobi counts are served with their provenance.

    Inputs: Pollaczek family, s=1.05 and a small truncation schedule.
    Outputs: Count 1 with n_used and stabilized.
    Errors: None.
    """

    client = TestClient(app)
    response = client.get(
        "/api/jacobi/count",
        params={
            "family": "pollaczek",
            "lam": 1.0,
            "r": 0.5,
            "s": 1.05,
            "n_start": 256,
            "n_max": 4096,
        },
    )

    assert response.status_code == 200
    (row,) = response.json()["results"]
    assert row["count"] == 1
    assert row["stabilized"] is True
    assert row["n_used"] <= 4096


def test_smilansky_count_endpoint() -> None:
    """Role: Ensure operator counts accept grid overrides.

    Inputs: alpha=0, eps=0.25 on a small grid.
    Outputs: Count 0 and the grid in the row.
    Errors: None.
    """

    client = TestClient(app)
    response = client.get(
        "/api/smilansky/count",
        params={"alpha": 0.0, "eps": 0.25, "modes": 8, "step": 0.125},
    )

    assert response.status_code == 200
    (row,) = response.json()["results"]
    assert row["count"] == 0
    assert row["step"] == 0.125
    assert row["half_length"] == 24.0


def test_smilansky_star_endpoint() -> None:
    """Role: Ensure the star action uses the star geometry.

    Inputs: m=3, alpha=1.5 (above the line range), eps=0.25.
    Outputs: A star-graph row with its Jacobi threshold.
    Errors: None.
    """

    client = TestClient(app)
    response = client.get(
        "/api/smilansky/star",
        params={"alpha": 1.5, "eps": 0.25, "m": 3, "modes": 8},
    )

    assert response.status_code == 200
    (row,) = response.json()["results"]
    assert row["m"] == 3
    assert row["s"] > 1.0


def test_unknown_action_returns_404() -> None:
    """Role: Ensure unknown operator actions are rejected.

    Inputs: action "plot".
    Outputs: 404 response.
    Errors: None.
    """

    client = TestClient(app)
    response = client.get(
        "/api/smilansky/plot",
        params={"alpha": 1.0, "eps": 0.25},
    )

    assert response.status_code == 404


def test_domain_errors_return_422() -> None:
    """Role: Ensure inadmissible parameters map to 422.

    Inputs: Pollaczek parameters with lambda < r, and a line coupling
    above sqrt(2).
    Outputs: 422 responses with a message.
    Errors: None.
    """

    client = TestClient(app)
    oracle = client.get(
        "/api/pollaczek/oracle",
        params={"lam": 0.5, "r": 1.0, "s": 1.1},
    )
    count = client.get(
        "/api/smilansky/count",
        params={"alpha": 1.5, "eps": 0.25},
    )

    assert oracle.status_code == 422
    assert count.status_code == 422
    assert "alpha" in count.json()["detail"]


def test_missing_family_parameter_returns_422() -> None:
    """Role: Ensure family parameters are required.

    Inputs: jeps family without eps.
    Outputs: 422 response naming the missing flag.
    Errors: None.
    """

    client = TestClient(app)
    response = client.get(
        "/api/jacobi/count",
        params={"family": "jeps", "s": 1.01},
    )

    assert response.status_code == 422
    assert "eps" in response.json()["detail"]


def test_non_convergence_returns_503(monkeypatch) -> None:
    """Role: Ensure non-converged computations map to 503.

    Inputs: A predict builder patched to raise ConvergenceError.
    Outputs: 503 response.
    Errors: None.
    """

    def fail(*args):
        raise ConvergenceError("bisection stalled", {"rank": 1})

    monkeypatch.setattr(main, "asymptotics_predict_report", fail)
    client = TestClient(app)
    response = client.get("/api/asymptotics/predict", params={"alpha": 1.2})

    assert response.status_code == 503
    assert response.json()["detail"] == "bisection stalled"
