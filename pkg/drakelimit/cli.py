"""
Drake Limit command line

Counting-statistics view of the Drake equation: lower limits implied by one
observed civilization, occurrence probabilities, and Monte Carlo sampling of
the Drake product.

Usage:
    # Lower limits at 95% C.L. (observable universe and Galaxy)
    python -m drakelimit limit --confidence 0.95

    # Per-planet limit for a given number of habitable planets
    python -m drakelimit limit --confidence 0.99 --habitable 4e21

    # Probability of a second civilization given the first
    python -m drakelimit prob --n 1 --given-one

    # Monte Carlo run from a scenario file
    python -m drakelimit sample scenarios/table1.scenario --threads 4
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from collections.abc import Sequence
from pathlib import Path

from pydantic import ValidationError

from drakelimit import __version__
from drakelimit.config import configure_logging, settings
from drakelimit.errors import DrakeLimitError, ScenarioIOError, ValidationFailure
from drakelimit.models import DrakeScenario, LimitResult, PlanetClass, ScenarioFile
from drakelimit.services import counting_stats, mc_engine, reporting
from drakelimit.services.priors import describe

logger = logging.getLogger(__name__)


# ──────────────────────────────────────────────────────────────────────────────
# Scenario files
# ──────────────────────────────────────────────────────────────────────────────


def load_scenario_file(path: str | Path) -> ScenarioFile:
    """Read and validate a JSON scenario file."""
    source = Path(path)
    try:
        text = source.read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioIOError(str(source), exc.strerror or str(exc)) from exc
    except UnicodeDecodeError as exc:
        raise ValidationFailure(f"{source}: not UTF-8 ({exc.reason} at byte {exc.start})") from exc
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationFailure(f"{source}: invalid JSON ({exc.msg} at line {exc.lineno})") from exc
    try:
        scenario_file = ScenarioFile.model_validate(data)
    except ValidationError as exc:
        raise ValidationFailure.from_pydantic(exc) from exc
    logger.info(
        "Loaded %s: %d factors, %d samples, seed %d",
        source, len(scenario_file.scenario.factors),
        scenario_file.scenario.n_samples, scenario_file.scenario.seed,
    )
    return scenario_file


def _with_overrides(scenario: DrakeScenario, **overrides: int | None) -> DrakeScenario:
    updates = {k: v for k, v in overrides.items() if v is not None}
    if not updates:
        return scenario
    try:
        return DrakeScenario.model_validate({**scenario.model_dump(), **updates})
    except ValidationError as exc:
        raise ValidationFailure.from_pydantic(exc, prefix="scenario") from exc


def _resolve(base: Path, override: str | None, configured: str | None) -> Path | None:
    chosen = override if override is not None else configured
    if chosen is None:
        return None
    candidate = Path(chosen)
    # CLI overrides are relative to the working directory, file paths to the file.
    if override is None and not candidate.is_absolute():
        candidate = base / candidate
    return candidate


def _limit_set(
    confidence: float, stars_galaxy: float, stars_universe: float,
) -> list[LimitResult]:
    universe = counting_stats.lower_limit(confidence)
    galaxy = counting_stats.scale_limit_to_galaxy(universe, stars_galaxy, stars_universe)
    return [universe, galaxy]


# ──────────────────────────────────────────────────────────────────────────────
# Subcommands
# ──────────────────────────────────────────────────────────────────────────────


def cmd_limit(args: argparse.Namespace) -> int:
    limits = _limit_set(args.confidence, args.stars_galaxy, args.stars_universe)
    print(reporting.limit_block(limits))
    if args.habitable is not None:
        f_lower = counting_stats.per_planet_limit(args.confidence, args.habitable)
        print(
            f"p_L > {reporting.format_sig(f_lower)} per habitable planet "
            f"at {reporting.format_sig(100 * args.confidence)}% C.L. "
            f"(N_H = {reporting.format_sig(args.habitable)})"
        )
    return 0


def _parse_class(text: str) -> PlanetClass:
    try:
        n_habitable, p_life = (float(part) for part in text.split(":"))
    except ValueError as exc:
        raise ValidationFailure(f"classes: {text!r} is not N_H:p_L") from exc
    try:
        return PlanetClass(n_habitable=n_habitable, p_life=p_life)
    except ValidationError as exc:
        raise ValidationFailure.from_pydantic(exc, prefix=f"classes[{text}]") from exc


def cmd_prob(args: argparse.Namespace) -> int:
    if args.classes:
        occurrence = counting_stats.p_at_least_one_classes([_parse_class(c) for c in args.classes])
        print(f"sum N_H*p_L = {reporting.format_sig(occurrence.total_expectation)}")
        print(f"P(n_obs >= 1) exact   = {reporting.format_sig(occurrence.exact)}")
        print(f"P(n_obs >= 1) poisson = {reporting.format_sig(occurrence.poisson)}")
        return 0
    if args.n is None:
        raise ValidationFailure("n: --n is required unless --classes is given")
    n = args.n
    if args.given_one:
        value = counting_stats.p_second_given_first(n)
        print(f"P(n_obs >= 2 | n={reporting.format_sig(n)}, n_obs >= 1) = {reporting.format_sig(value)}")
    else:
        value = counting_stats.p_at_least_one(n)
        print(f"P(n_obs >= 1 | n={reporting.format_sig(n)}) = {reporting.format_sig(value)}")
    return 0


def cmd_sample(args: argparse.Namespace) -> int:
    path = Path(args.scenario)
    scenario_file = load_scenario_file(path)
    scenario = _with_overrides(scenario_file.scenario, n_samples=args.samples, seed=args.seed)
    base = path.parent
    outputs = scenario_file.outputs
    summary_path = _resolve(base, args.summary, outputs.summary)
    histogram_path = _resolve(base, args.histogram, outputs.histogram)
    curve_path = _resolve(base, args.curve, outputs.curve)
    raw_path = _resolve(base, args.raw, outputs.raw_samples)

    print(f"{'─' * 60}")
    print(f"  Drake Limit {__version__}: {path.name}")
    for factor in scenario.factors:
        print(f"  {factor.name:<8} {describe(factor.prior)}")
    print(f"  Samples: {scenario.n_samples}  Seed: {scenario.seed}  Threads: {args.threads}")
    print(f"{'─' * 60}\n")

    summary, stream = mc_engine.run_stream(scenario, threads=args.threads)

    limits: list[LimitResult] = []
    for confidence in scenario_file.limits:
        limits.extend(_limit_set(confidence, scenario.stars_galaxy, scenario.stars_universe))

    if summary_path is not None:
        document = reporting.emit_summary(summary, limits, scenario, timestamp=not args.no_timestamp)
        reporting.write_summary(document, summary_path)
    if histogram_path is not None:
        reporting.write_histogram(summary, histogram_path)
    if curve_path is not None:
        reporting.write_curve(reporting.emit_curve(), curve_path)
    if raw_path is not None:
        reporting.write_raw_samples(stream, raw_path)

    print(reporting.alone_fraction_block(summary))
    if limits:
        print()
        print(reporting.limit_block(limits))
    return 0


def cmd_curve(args: argparse.Namespace) -> int:
    if args.reference_points:
        for point in reporting.reference_curve_points():
            print(f"{reporting.format_sig(point.n_civ)}\t{reporting.format_sig(point.p_second)}")
    points = reporting.emit_curve(args.min, args.max, args.points, args.spacing)
    if args.output:
        reporting.write_curve(points, args.output)
    elif not args.reference_points:
        sys.stdout.write(reporting.curve_csv(points))
    return 0


# ──────────────────────────────────────────────────────────────────────────────
# Argument parsing
# ──────────────────────────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="drakelimit",
        description="Drake equation as a Poisson counting experiment",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  drakelimit limit --confidence 0.95
  drakelimit limit --confidence 0.99 --habitable 4e21
  drakelimit prob --n 1 --given-one
  drakelimit prob --classes 5e5:1e-6 5e5:1e-6
  drakelimit sample scenarios/table1.scenario --threads 4
  drakelimit curve --paper-points

Exit codes:
  0  success
  1  runtime or I/O failure
  2  usage or validation error
        """,
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument(
        "--verbose", "-v",
        action="count",
        default=0,
        help="Log progress to stderr (-vv for debug output)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    limit = sub.add_parser("limit", help="Lower limits implied by one observed civilization")
    limit.add_argument("--confidence", type=float, default=settings.DEFAULT_LIMIT_CONFIDENCE)
    limit.add_argument("--stars-galaxy", type=float, default=settings.DEFAULT_STARS_GALAXY)
    limit.add_argument("--stars-universe", type=float, default=settings.DEFAULT_STARS_UNIVERSE)
    limit.add_argument(
        "--habitable",
        type=float,
        help="Number of habitable planets; prints the per-planet probability limit",
    )
    limit.set_defaults(handler=cmd_limit)

    prob = sub.add_parser("prob", help="Occurrence probabilities for an expectation value")
    prob.add_argument("--n", type=float, help="Expected number of civilizations")
    prob.add_argument(
        "--given-one",
        action="store_true",
        help="P(at least two | at least one) instead of P(at least one)",
    )
    prob.add_argument(
        "--classes",
        nargs="+",
        metavar="N_H:P_L",
        help="Planet classes for the multi-class occurrence probability",
    )
    prob.set_defaults(handler=cmd_prob)

    sample = sub.add_parser("sample", help="Monte Carlo run from a scenario file")
    sample.add_argument("scenario", help="Path to a JSON scenario file")
    sample.add_argument("--threads", type=int, default=settings.DEFAULT_THREADS)
    sample.add_argument("--samples", type=int, help="Override the scenario sample count")
    sample.add_argument("--seed", type=int, help="Override the scenario seed")
    sample.add_argument("--summary", help="Summary JSON path")
    sample.add_argument("--histogram", help="Histogram CSV path")
    sample.add_argument("--curve", help="Conditional-probability curve CSV path")
    sample.add_argument("--raw", help="Raw log10 sample dump path")
    sample.add_argument(
        "--no-timestamp",
        action="store_true",
        help="Leave generated_at out of the summary",
    )
    sample.set_defaults(handler=cmd_sample)

    curve = sub.add_parser("curve", help="P(second | first) as a function of n")
    curve.add_argument("--min", type=float, default=settings.CURVE_MIN)
    curve.add_argument("--max", type=float, default=settings.CURVE_MAX)
    curve.add_argument("--points", type=int, default=settings.CURVE_POINTS)
    curve.add_argument("--spacing", choices=["linear", "log"], default=settings.CURVE_SPACING)
    curve.add_argument("--output", "-o", help="CSV path (stdout when omitted)")
    curve.add_argument(
        "--paper-points",
        "--reference-points",
        dest="reference_points",
        action="store_true",
        help="Print the reference grid n = 0.051, 0.5, 1, 2, 4",
    )
    curve.set_defaults(handler=cmd_curve)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)

    configure_logging(args.verbose)
    try:
        return args.handler(args)
    except DrakeLimitError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return exc.exit_code
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
