"""
Command-line interface for conelab.

Each subcommand prints one JSON report (the run configuration, the library
version and the result) to stdout and a one-line summary to stderr.

Exit codes: 0 when the check passes, 1 when it fails or the numerics give
out, 2 on usage errors and malformed input.
"""

import argparse
import logging
import sys
from collections.abc import Sequence

import numpy as np
from pydantic import BaseModel, ValidationError

from conelab import __version__
from conelab.decompose import attempt_decomposition_lp, indecomposability_certificate
from conelab.exotic import ExoticGenerator, semigroup_orbit, verify_cross_positive
from conelab.jordan import HermitianMatrix
from conelab.linmap import (
    check_lie_condition,
    check_positive,
    check_sv_condition,
    derivation_dimension,
    lie_map,
    random_lie_matrix,
)
from conelab.models import (
    Algebra,
    CheckMode,
    DecomposeMode,
    DimsReport,
    FailureReport,
    InputError,
    NumericalError,
    ReportEnvelope,
    RunConfig,
    Verdict,
)
from conelab.utils.config import get_settings
from conelab.utils.io import dump_json, load_cone_map, load_matrix, write_json

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

DEFAULT_T_GRID = "0.1,1,10"


def _t_grid(text: str) -> list[float]:
    try:
        return [float(x) for x in text.split(",") if x.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"invalid t grid {text!r}") from e


def build_parser() -> argparse.ArgumentParser:
    settings = get_settings()
    parser = argparse.ArgumentParser(
        prog="conelab", description="Cross-positive maps on symmetric cones"
    )
    parser.add_argument("--version", action="version", version=f"conelab {__version__}")
    parser.add_argument("--log-level", default=settings.log_level, help="Logging level")
    parser.add_argument("--threads", type=int, default=settings.threads, help="Worker cap")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    def common(p: argparse.ArgumentParser, algebra: bool = True) -> None:
        p.add_argument("--n", type=int, help="Matrix size")
        if algebra:
            p.add_argument(
                "--algebra", type=Algebra, choices=list(Algebra), default=Algebra.R,
                help="Entry algebra: R, C, H or O",
            )
        p.add_argument("--seed", type=int, default=settings.seed)
        p.add_argument("--eps", type=float, default=settings.eps)
        p.add_argument("--samples", type=int, default=settings.samples)

    p = sub.add_parser("build", help="Emit the exotic generator B as a ConeMap")
    common(p)
    p.add_argument("--out", dest="output_path", help="Also write the map to this file")

    p = sub.add_parser("verify", help="Cross-positivity report for B or a stored map")
    common(p)
    p.add_argument("--mode", choices=[m.value for m in CheckMode], default=CheckMode.SAMPLED.value)
    p.add_argument("--map", dest="input_path", help="ConeMap JSON produced by build")

    p = sub.add_parser("exp", help="Cone membership along the orbit e^{tB} X0")
    common(p)
    p.add_argument("--t-grid", type=_t_grid, default=_t_grid(DEFAULT_T_GRID))
    p.add_argument("--input", dest="input_path", help="HermitianMatrix JSON for X0")

    p = sub.add_parser("lie-check", help="Sampled Lie-algebra condition")
    common(p)
    p.add_argument("--target", choices=["exotic", "lie-random"], default="exotic")
    p.add_argument("--map", dest="input_path", help="ConeMap JSON to test instead")

    p = sub.add_parser("decompose", help="Indecomposability certificate or LP falsifier")
    common(p)
    p.add_argument(
        "--mode", choices=[m.value for m in DecomposeMode], default=DecomposeMode.CERTIFICATE.value
    )
    p.add_argument("--pairs", type=int, default=1000, help="Random pairs for the LP")
    p.add_argument("--float", dest="float_lp", action="store_true", help="Solve the LP with HiGHS first")
    p.add_argument("--out", dest="output_path", help="Also write the certificate JSON here")

    p = sub.add_parser("dims", help="Dimension of a derivation algebra")
    p.add_argument("--space", required=True, help="R, C, H, O or H<n><R|C|H|O>, e.g. H3O")
    return parser


def _config(args: argparse.Namespace) -> RunConfig:
    fields = {
        k: v
        for k, v in vars(args).items()
        if k in RunConfig.model_fields and v is not None
    }
    if "t_grid" in fields:
        fields["t_grid"] = list(fields["t_grid"])
    return RunConfig(**fields)


def _emit(config: RunConfig, result: BaseModel) -> None:
    envelope = ReportEnvelope(version=__version__, config=config, result=result)
    sys.stdout.write(dump_json(envelope) + "\n")


def _require_n(config: RunConfig) -> int:
    if config.n is None:
        raise InputError(f"{config.subcommand} needs --n")
    return config.n


def _cmd_build(config: RunConfig, threads: int) -> int:
    b = ExoticGenerator(config.n, config.algebra)
    payload = b.cone_map.to_payload()
    if config.output_path:
        write_json(payload, config.output_path)
    _emit(config, payload)
    logger.info(f"B for n={b.n} over {b.algebra.value}: p={b.p}, q={b.q}")
    return EXIT_PASS


def _cmd_verify(config: RunConfig, threads: int) -> int:
    mode = CheckMode(config.mode or CheckMode.SAMPLED.value)
    if config.input_path:
        a = load_cone_map(config.input_path)
        if mode is CheckMode.EXACT:
            raise InputError("exact verification needs the built-in generator, not a stored map")
        check = check_positive if mode is CheckMode.POSITIVE else check_sv_condition
        report = check(a, config.samples, config.seed, config.eps, threads)
    else:
        b = ExoticGenerator(config.n, config.algebra)
        report = verify_cross_positive(b, mode, config.samples, config.seed, config.eps, threads)
    _emit(config, report)
    logger.info(f"{report.check}: min={report.min_value:.3e}, pass={report.passed}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_exp(config: RunConfig, threads: int) -> int:
    if config.input_path:
        x0 = load_matrix(config.input_path)
        b = ExoticGenerator(x0.n, x0.algebra)
    else:
        b = ExoticGenerator(_require_n(config), config.algebra or Algebra.R)
        x0 = HermitianMatrix.identity(b.algebra, b.n)
    report = semigroup_orbit(b, x0, config.t_grid)
    _emit(config, report)
    worst = min((p.min_eigenvalue for p in report.points), default=0.0)
    logger.info(f"orbit over {len(report.points)} times: min eigenvalue {worst:.3e}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_lie_check(config: RunConfig, threads: int) -> int:
    if config.input_path:
        a = load_cone_map(config.input_path)
    elif config.target == "lie-random":
        rng = np.random.default_rng(config.seed)
        a = lie_map(random_lie_matrix(_require_n(config), config.algebra or Algebra.R, rng))
    else:
        a = ExoticGenerator(_require_n(config), config.algebra or Algebra.R).cone_map
    report = check_lie_condition(a, config.samples, config.seed, config.eps, threads)
    _emit(config, report)
    logger.info(f"lie condition: max |value|={report.details.get('max_abs')}, pass={report.passed}")
    return EXIT_PASS if report.passed else EXIT_FAIL


def _cmd_decompose(config: RunConfig, threads: int) -> int:
    mode = DecomposeMode(config.mode or DecomposeMode.CERTIFICATE.value)
    if mode is DecomposeMode.CERTIFICATE:
        cert = indecomposability_certificate(config.n, config.algebra)
        payload = cert.to_payload()
        if config.output_path:
            write_json(payload, config.output_path)
        _emit(config, payload)
        logger.info(f"certificate: residual {payload.residual}, {payload.verdict.value}")
        return EXIT_PASS if cert.verdict is Verdict.INDECOMPOSABLE else EXIT_FAIL
    b = ExoticGenerator(config.n, config.algebra)
    outcome = attempt_decomposition_lp(
        b, b.n, b.algebra, random_pairs=config.pairs, seed=config.seed, exact=not config.float_lp
    )
    if config.output_path:
        write_json(outcome.report, config.output_path)
    _emit(config, outcome.report)
    logger.info(f"LP: {outcome.report.verdict.value}, witness verified={outcome.report.witness_verified}")
    refuted = outcome.report.verdict is Verdict.INFEASIBLE and outcome.report.witness_verified
    return EXIT_PASS if refuted else EXIT_FAIL


def _cmd_dims(config: RunConfig, threads: int) -> int:
    space = config.space or ""
    report = DimsReport(space=space, dimension=derivation_dimension(space))
    _emit(config, report)
    logger.info(f"dim Der({space}) = {report.dimension}")
    return EXIT_PASS


def run(argv: Sequence[str] | None = None) -> int:
    """Parse ``argv``, run one subcommand and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return int(e.code) if isinstance(e.code, int) else EXIT_USAGE

    logging.basicConfig(
        level=str(args.log_level).upper(),
        stream=sys.stderr,
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )
    try:
        config = _config(args)
    except ValidationError as e:
        logger.error(f"Invalid arguments: {e}")
        return EXIT_USAGE

    commands = {
        "build": _cmd_build,
        "verify": _cmd_verify,
        "exp": _cmd_exp,
        "lie-check": _cmd_lie_check,
        "decompose": _cmd_decompose,
        "dims": _cmd_dims,
    }
    try:
        return commands[config.subcommand](config, args.threads)
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        _emit(config, FailureReport(error=type(e).__name__, message=str(e)))
        return EXIT_FAIL
    except (InputError, ValueError) as e:
        logger.error(f"{type(e).__name__}: {e}")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
