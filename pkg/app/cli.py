"""Command line front end: one subcommand, one CSV or JSON document."""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
from collections.abc import Callable, Sequence
from typing import TextIO

from app.constants import (
    BS_ALPHAS,
    BS_EPSILONS,
    DEFAULT_MODES,
    DEFAULT_POLICY,
    EXIT_DOMAIN,
    EXIT_NOT_CONVERGED,
    EXIT_OK,
    EXIT_USAGE,
    LINE_BONDS,
)
from app.errors import ConvergenceError
from app.jacobi import Family, OffDiagSequence
from app.models import (
    Geometry,
    ModeSpaceGrid,
    OutputFormat,
    PollaczekParams,
    RunConfig,
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

FAMILY_CHOICES = [
    Family.J_EPS.value,
    Family.J0.value,
    Family.POLLACZEK.value,
    Family.CONSTANT.value,
]


def _add_output_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--format",
        dest="output_format",
        choices=[item.value for item in OutputFormat],
        default=OutputFormat.JSON.value,
    )
    parser.add_argument("--out", dest="output_path", default=None)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--verbose", action="store_true")


def _add_family_flags(
    parser: argparse.ArgumentParser,
    prefix: str = "",
) -> None:
    dest = prefix.replace("-", "_")
    parser.add_argument(
        f"--{prefix}family",
        dest=f"{dest}family",
        choices=FAMILY_CHOICES,
        required=True,
    )
    parser.add_argument(f"--{prefix}eps", dest=f"{dest}eps", type=float)
    parser.add_argument(f"--{prefix}lambda", dest=f"{dest}lam", type=float)
    parser.add_argument(f"--{prefix}r", dest=f"{dest}r", type=float)
    parser.add_argument(f"--{prefix}value", dest=f"{dest}value", type=float)


def _add_policy_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--n-start", type=int, default=DEFAULT_POLICY.n_start)
    parser.add_argument("--n-max", type=int, default=DEFAULT_POLICY.n_max)


def _add_grid_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--modes", type=int, default=DEFAULT_MODES)
    parser.add_argument("--half-length", type=float, default=None)
    parser.add_argument("--step", type=float, default=None)


def _add_problem_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--alpha", type=float, required=True)
    parser.add_argument("--eps", type=float, required=True)
    _add_grid_flags(parser)


def _add_side_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--side",
        choices=[item.value for item in Side],
        default=Side.ABOVE.value,
    )


def build_parser() -> argparse.ArgumentParser:
    """Build the subcommand tree group -> action -> flags."""

    parser = argparse.ArgumentParser(
        prog="smilansky-spectra",
        description="Eigenvalue counts for Jacobi matrices and the "
        "Smilansky model.",
    )
    groups = parser.add_subparsers(dest="group", required=True)

    jacobi = groups.add_parser("jacobi").add_subparsers(
        dest="action",
        required=True,
    )
    count = jacobi.add_parser("count", help="stabilized N+(s) or N-(s)")
    _add_family_flags(count)
    count.add_argument("--s", action="append", type=float, required=True)
    _add_side_flag(count)
    _add_policy_flags(count)
    eigs = jacobi.add_parser("eigs", help="eigenvalues beyond s")
    _add_family_flags(eigs)
    eigs.add_argument("--s", type=float, required=True)
    eigs.add_argument("--size", type=int, default=DEFAULT_POLICY.n_start)
    eigs.add_argument("--k-max", type=int, default=None)
    eigs.add_argument("--tol", type=float, default=None)
    _add_side_flag(eigs)

    pollaczek = groups.add_parser("pollaczek").add_subparsers(
        dest="action",
        required=True,
    )
    oracle = pollaczek.add_parser("oracle", help="closed-form counts")
    oracle.add_argument("--lambda", dest="lam", type=float, required=True)
    oracle.add_argument("--r", type=float, required=True)
    oracle.add_argument("--s", action="append", type=float, required=True)
    evaluate = pollaczek.add_parser("eval", help="monic polynomial values")
    evaluate.add_argument("--lambda", dest="lam", type=float, required=True)
    evaluate.add_argument("--r", type=float, required=True)
    evaluate.add_argument("--n", type=int, required=True)
    evaluate.add_argument("--x", action="append", type=float, required=True)

    smilansky = groups.add_parser("smilansky").add_subparsers(
        dest="action",
        required=True,
    )
    for action, help_text in (
        ("count", "eigenvalues below 1/2 - eps on the line"),
        ("schur", "interface Schur complement"),
        ("eigs", "eigenvalues below 1/2 - eps"),
    ):
        sub = smilansky.add_parser(action, help=help_text)
        _add_problem_flags(sub)
        if action == "eigs":
            sub.add_argument(
                "--tol", type=float, default=DEFAULT_EIGENVALUE_TOL
            )
    star = smilansky.add_parser("star", help="star-graph count")
    _add_problem_flags(star)
    star.add_argument("--m", type=int, required=True)
    star.add_argument("--lengths", action="append", type=float, default=None)

    asymptotics = groups.add_parser("asymptotics").add_subparsers(
        dest="action",
        required=True,
    )
    estimate = asymptotics.add_parser("q", help="estimate q")
    _add_family_flags(estimate)
    estimate.add_argument("--window-start", type=int, default=1000)
    estimate.add_argument("--window-end", type=int, default=10000)
    laws = asymptotics.add_parser("laws", help="eigenvalue and counting laws")
    _add_family_flags(laws)
    laws.add_argument("--q", type=float, required=True)
    laws.add_argument("--k", action="append", type=int, default=None)
    laws.add_argument("--k-max", type=int, default=None)
    laws.add_argument("--s", action="append", type=float, default=None)
    _add_policy_flags(laws)
    predict = asymptotics.add_parser("predict", help="count prediction")
    predict.add_argument("--alpha", action="append", type=float, required=True)
    predict.add_argument("--m", type=int, default=LINE_BONDS)
    _add_policy_flags(predict)
    compare = asymptotics.add_parser("compare", help="comparison check")
    _add_family_flags(compare)
    _add_family_flags(compare, prefix="against-")
    compare.add_argument("--s", action="append", type=float, required=True)
    _add_policy_flags(compare)

    verify = groups.add_parser("verify").add_subparsers(
        dest="action",
        required=True,
    )
    bs = verify.add_parser("bs", help="operator counts against J(eps)")
    bs.add_argument("--alpha", action="append", type=float, default=None)
    bs.add_argument("--eps", action="append", type=float, default=None)
    bs.add_argument("--modes", type=int, default=DEFAULT_MODES)
    _add_policy_flags(bs)
    everything = verify.add_parser("all", help="every end-to-end check")
    everything.add_argument("--modes", type=int, default=DEFAULT_MODES)
    _add_policy_flags(everything)

    for subparsers in (jacobi, pollaczek, smilansky, asymptotics, verify):
        for sub in subparsers.choices.values():
            sub.allow_abbrev = False
            _add_output_flags(sub)
    return parser


def _policy(args: argparse.Namespace) -> TruncationPolicy:
    return TruncationPolicy(n_start=args.n_start, n_max=args.n_max)


def _sequence(
    args: argparse.Namespace,
    prefix: str = "",
) -> OffDiagSequence:
    return make_sequence(
        Family(getattr(args, f"{prefix}family")),
        eps=getattr(args, f"{prefix}eps"),
        lam=getattr(args, f"{prefix}lam"),
        r=getattr(args, f"{prefix}r"),
        value=getattr(args, f"{prefix}value"),
    )


def _grid(args: argparse.Namespace) -> ModeSpaceGrid:
    return resolve_grid(args.eps, args.modes, args.half_length, args.step)


def _problem(
    args: argparse.Namespace,
    geometry: Geometry = Geometry.LINE,
) -> SmilanskyProblem:
    return SmilanskyProblem(alpha=args.alpha, eps=args.eps, geometry=geometry)


def _jacobi_count(args: argparse.Namespace) -> Report:
    return jacobi_count_report(
        _sequence(args),
        args.s,
        Side(args.side),
        _policy(args),
    )


def _jacobi_eigs(args: argparse.Namespace) -> Report:
    query = SpectralQuery(
        s=args.s,
        side=Side(args.side),
        eig_tol=args.tol,
        k_max=args.k_max,
    )
    return jacobi_eigs_report(_sequence(args), args.size, query)


def _pollaczek_oracle(args: argparse.Namespace) -> Report:
    params = PollaczekParams(lam=args.lam, r=args.r)
    return pollaczek_oracle_report(params, args.s)


def _pollaczek_eval(args: argparse.Namespace) -> Report:
    return pollaczek_eval_report(
        PollaczekParams(lam=args.lam, r=args.r),
        args.n,
        args.x,
    )


def _smilansky_count(args: argparse.Namespace) -> Report:
    problem = _problem(args)
    return smilansky_count_report(problem, _grid(args))


def _smilansky_schur(args: argparse.Namespace) -> Report:
    problem = _problem(args)
    return smilansky_schur_report(problem, _grid(args))


def _smilansky_eigs(args: argparse.Namespace) -> Report:
    problem = _problem(args)
    return smilansky_eigs_report(problem, _grid(args), args.tol)


def _smilansky_star(args: argparse.Namespace) -> Report:
    spec = StarGraphSpec(m=args.m, lengths=args.lengths)
    problem = _problem(args, Geometry.STAR)
    return smilansky_star_report(spec, problem, _grid(args))


def _asymptotics_q(args: argparse.Namespace) -> Report:
    window = (args.window_start, args.window_end)
    return asymptotics_q_report(_sequence(args), window)


def _asymptotics_laws(args: argparse.Namespace) -> Report:
    ranks = list(args.k or [])
    if args.k_max is not None:
        ranks.extend(range(1, args.k_max + 1))
    return asymptotics_laws_report(
        _sequence(args),
        args.q,
        sorted(set(ranks)),
        args.s or [],
        _policy(args),
    )


def _asymptotics_predict(args: argparse.Namespace) -> Report:
    return asymptotics_predict_report(args.alpha, args.m, _policy(args))


def _asymptotics_compare(args: argparse.Namespace) -> Report:
    return asymptotics_compare_report(
        _sequence(args),
        _sequence(args, prefix="against_"),
        args.s,
        _policy(args),
    )


def _verify_bs(args: argparse.Namespace) -> Report:
    return verify_bs_report(
        args.alpha or BS_ALPHAS,
        args.eps or BS_EPSILONS,
        args.modes,
        _policy(args),
    )


def _verify_all(args: argparse.Namespace) -> Report:
    return verify_all_report(args.seed, args.modes, _policy(args))


HANDLERS: dict[tuple[str, str], Callable[[argparse.Namespace], Report]] = {
    ("jacobi", "count"): _jacobi_count,
    ("jacobi", "eigs"): _jacobi_eigs,
    ("pollaczek", "oracle"): _pollaczek_oracle,
    ("pollaczek", "eval"): _pollaczek_eval,
    ("smilansky", "count"): _smilansky_count,
    ("smilansky", "schur"): _smilansky_schur,
    ("smilansky", "star"): _smilansky_star,
    ("smilansky", "eigs"): _smilansky_eigs,
    ("asymptotics", "q"): _asymptotics_q,
    ("asymptotics", "laws"): _asymptotics_laws,
    ("asymptotics", "predict"): _asymptotics_predict,
    ("asymptotics", "compare"): _asymptotics_compare,
    ("verify", "bs"): _verify_bs,
    ("verify", "all"): _verify_all,
}


def _cell(value: object) -> object:
    if isinstance(value, (list, tuple)):
        return ";".join(str(item) for item in value)
    return value


def write_csv(report: Report, stream: TextIO) -> None:
    """Write the result rows with a header; columns in first-seen order."""

    fieldnames: list[str] = []
    for row in report.results:
        for key in row:
            if key not in fieldnames:
                fieldnames.append(key)
    writer = csv.DictWriter(stream, fieldnames=fieldnames, lineterminator="\n")
    writer.writeheader()
    for row in report.results:
        writer.writerow({key: _cell(value) for key, value in row.items()})


def write_json(report: Report, stream: TextIO) -> None:
    """Write the single top-level {inputs, results, diagnostics} object."""

    json.dump(report.to_document(), stream, indent=2, allow_nan=False)
    stream.write("\n")


def _emit(report: Report, config: RunConfig, stdout: TextIO) -> int:
    csv_output = config.output_format is OutputFormat.CSV
    writer = write_csv if csv_output else write_json
    if config.output_path is None:
        writer(report, stdout)
        return EXIT_OK
    try:
        with config.output_path.open(
            "w", encoding="utf-8", newline=""
        ) as stream:
            writer(report, stream)
    except OSError as exc:
        print(
            f"error: cannot write {config.output_path}: {exc.strerror}",
            file=sys.stderr,
        )
        return EXIT_USAGE
    logger.info("report written to %s", config.output_path)
    return EXIT_OK


def configure_logging(verbose: bool) -> None:
    """Send log records to stderr; stdout carries only the report."""

    logging.basicConfig(
        level=logging.DEBUG if verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
        force=True,
    )


def run(
    argv: Sequence[str] | None = None,
    stdout: TextIO | None = None,
) -> int:
    """Parse argv, run exactly one subcommand and emit its report.

    Args:
        argv: Arguments without the program name; sys.argv[1:] if None.
        stdout: Stream for the report when no --out is given.

    Returns:
        int: 0 on success, 2 on usage errors or an unwritable --out, 3 on
        domain errors, 4 when a computation did not converge.
    """

    stdout = stdout or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        config = RunConfig(
            group=args.group,
            action=args.action,
            output_format=OutputFormat(args.output_format),
            output_path=args.output_path,
            seed=args.seed,
            verbose=args.verbose,
        )
        configure_logging(config.verbose)
        report = HANDLERS[(config.group, config.action)](args)
        return _emit(report, config, stdout)
    except ConvergenceError as exc:
        logger.error("%s (%s)", exc, exc.diagnostics)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NOT_CONVERGED
    except (ValueError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


def main() -> None:
    """Console entry point."""

    sys.exit(run())
