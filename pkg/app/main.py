"""FastAPI application exposing the spectral reports."""

from __future__ import annotations

import logging
from collections.abc import Callable
from typing import Annotated

from fastapi import FastAPI, HTTPException, Query

from app.constants import (
    BS_ALPHAS,
    BS_EPSILONS,
    DEFAULT_MODES,
    DEFAULT_POLICY,
    LINE_BONDS,
)
from app.errors import ConvergenceError
from app.jacobi import Family
from app.models import (
    Geometry,
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
from app.smilansky import DEFAULT_EIGENVALUE_TOL

logger = logging.getLogger(__name__)

app = FastAPI(title="Smilansky Spectra")

FloatList = Annotated[list[float], Query()]


def respond(build: Callable[[], Report]) -> dict[str, object]:
    """Role: Run a report builder and translate its errors.

    Inputs: zero-argument callable returning a Report.
    Outputs: The {inputs, results, diagnostics} document.
    Errors: 422 for inadmissible parameters, 503 for non-converged runs.
    """

    try:
        return build().to_document()
    except ConvergenceError as exc:
        logger.warning("computation did not converge: %s", exc.diagnostics)
        raise HTTPException(status_code=503, detail=str(exc)) from exc
    except (ValueError, OverflowError) as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def build_policy(n_start: int, n_max: int) -> TruncationPolicy:
    """Role: Build a truncation policy from query values.

    Inputs: n_start and n_max.
    Outputs: TruncationPolicy with default growth and plateau window.
    Errors: Raises ValueError for an invalid schedule.
    """

    return TruncationPolicy(n_start=n_start, n_max=n_max)


@app.get("/")
def root() -> dict[str, object]:
    """Role: Provide a basic health response.

    Inputs: None.
    Outputs: A JSON payload with service metadata.
    Errors: None.
    """

    return {
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


@app.get("/api/jacobi/count")
def jacobi_count(
    family: Family,
    s: FloatList,
    side: Side = Side.ABOVE,
    eps: float | None = None,
    lam: float | None = None,
    r: float | None = None,
    value: float | None = None,
    n_start: int = DEFAULT_POLICY.n_start,
    n_max: int = DEFAULT_POLICY.n_max,
) -> dict[str, object]:
    """Stabilized eigenvalue counts beyond each threshold."""

    return respond(
        lambda: jacobi_count_report(
            make_sequence(family, eps, lam, r, value),
            s,
            side,
            build_policy(n_start, n_max),
        )
    )


@app.get("/api/jacobi/eigs")
def jacobi_eigs(
    family: Family,
    s: float,
    side: Side = Side.ABOVE,
    size: int = DEFAULT_POLICY.n_start,
    k_max: int | None = None,
    tol: float | None = None,
    eps: float | None = None,
    lam: float | None = None,
    r: float | None = None,
    value: float | None = None,
) -> dict[str, object]:
    """Eigenvalues of a truncation beyond the threshold."""

    return respond(
        lambda: jacobi_eigs_report(
            make_sequence(family, eps, lam, r, value),
            size,
            SpectralQuery(s=s, side=side, eig_tol=tol, k_max=k_max),
        )
    )


@app.get("/api/pollaczek/oracle")
def pollaczek_oracle(lam: float, r: float, s: FloatList) -> dict[str, object]:
    """Closed-form Pollaczek counts."""

    return respond(
        lambda: pollaczek_oracle_report(PollaczekParams(lam=lam, r=r), s)
    )


@app.get("/api/pollaczek/eval")
def pollaczek_eval(
    lam: float,
    r: float,
    n: int,
    x: FloatList,
) -> dict[str, object]:
    """Monic Pollaczek polynomial values."""

    return respond(
        lambda: pollaczek_eval_report(PollaczekParams(lam=lam, r=r), n, x)
    )


@app.get("/api/smilansky/{action}")
def smilansky(
    action: str,
    alpha: float,
    eps: float,
    modes: int = DEFAULT_MODES,
    half_length: float | None = None,
    step: float | None = None,
    m: int | None = None,
    lengths: Annotated[list[float] | None, Query()] = None,
    tol: float = DEFAULT_EIGENVALUE_TOL,
) -> dict[str, object]:
    """Role: Serve the operator-side reports.

    Inputs: action (count, schur, star or eigs), coupling, threshold shift,
    grid overrides and, for star, the bond count and lengths.
    Outputs: Report document.
    Errors: 404 for an unknown action, 422 for inadmissible parameters.
    """

    def build() -> Report:
        geometry = Geometry.STAR if action == "star" else Geometry.LINE
        problem = SmilanskyProblem(alpha=alpha, eps=eps, geometry=geometry)
        grid = resolve_grid(eps, modes, half_length, step)
        if action == "count":
            return smilansky_count_report(problem, grid)
        if action == "schur":
            return smilansky_schur_report(problem, grid)
        if action == "eigs":
            return smilansky_eigs_report(problem, grid, tol)
        spec = StarGraphSpec(m=LINE_BONDS if m is None else m, lengths=lengths)
        return smilansky_star_report(spec, problem, grid)

    if action not in ("count", "schur", "star", "eigs"):
        raise HTTPException(status_code=404, detail=f"unknown action {action}")
    return respond(build)


@app.get("/api/asymptotics/q")
def asymptotics_q(
    family: Family,
    window_start: int = 1000,
    window_end: int = 10000,
    eps: float | None = None,
    lam: float | None = None,
    r: float | None = None,
    value: float | None = None,
) -> dict[str, object]:
    """Estimate of q over an index window."""

    return respond(
        lambda: asymptotics_q_report(
            make_sequence(family, eps, lam, r, value),
            (window_start, window_end),
        )
    )


@app.get("/api/asymptotics/laws")
def asymptotics_laws(
    family: Family,
    q: float,
    k: Annotated[list[int] | None, Query()] = None,
    s: Annotated[list[float] | None, Query()] = None,
    eps: float | None = None,
    lam: float | None = None,
    r: float | None = None,
    value: float | None = None,
    n_start: int = DEFAULT_POLICY.n_start,
    n_max: int = DEFAULT_POLICY.n_max,
) -> dict[str, object]:
    """Eigenvalue-law and counting-law tables."""

    return respond(
        lambda: asymptotics_laws_report(
            make_sequence(family, eps, lam, r, value),
            q,
            k or [],
            s or [],
            build_policy(n_start, n_max),
        )
    )


@app.get("/api/asymptotics/predict")
def asymptotics_predict(
    alpha: FloatList,
    m: int = LINE_BONDS,
    n_start: int = DEFAULT_POLICY.n_start,
    n_max: int = DEFAULT_POLICY.n_max,
) -> dict[str, object]:
    """Asymptotic count prediction per coupling."""

    return respond(
        lambda: asymptotics_predict_report(
            alpha,
            m,
            build_policy(n_start, n_max),
        )
    )


@app.get("/api/asymptotics/compare")
def asymptotics_compare(
    family: Family,
    against_family: Family,
    s: FloatList,
    eps: float | None = None,
    lam: float | None = None,
    r: float | None = None,
    value: float | None = None,
    against_eps: float | None = None,
    against_lam: float | None = None,
    against_r: float | None = None,
    against_value: float | None = None,
    n_start: int = DEFAULT_POLICY.n_start,
    n_max: int = DEFAULT_POLICY.n_max,
) -> dict[str, object]:
    """Comparison of counts for entrywise dominated sequences."""

    return respond(
        lambda: asymptotics_compare_report(
            make_sequence(family, eps, lam, r, value),
            make_sequence(
                against_family,
                against_eps,
                against_lam,
                against_r,
                against_value,
            ),
            s,
            build_policy(n_start, n_max),
        )
    )


@app.get("/api/verify/bs")
def verify_bs(
    alpha: Annotated[list[float] | None, Query()] = None,
    eps: Annotated[list[float] | None, Query()] = None,
    modes: int = DEFAULT_MODES,
) -> dict[str, object]:
    """Operator counts against N+(sqrt(2)/alpha; J(eps))."""

    return respond(
        lambda: verify_bs_report(alpha or BS_ALPHAS, eps or BS_EPSILONS, modes)
    )


@app.get("/api/verify/all")
def verify_all(seed: int = 0, modes: int = DEFAULT_MODES) -> dict[str, object]:
    """Every end-to-end check; slow."""

    return respond(lambda: verify_all_report(seed, modes))
