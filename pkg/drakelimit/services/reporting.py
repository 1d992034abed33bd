"""Result serialization: summary JSON, histogram and curve CSV, text blocks."""

from __future__ import annotations

import csv
import io
import logging
import math
from dataclasses import dataclass
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from drakelimit import __version__
from drakelimit.config import settings
from drakelimit.errors import ScenarioIOError, ValidationFailure
from drakelimit.models import (
    CurveSpacing,
    DrakeScenario,
    LimitResult,
    RunSummary,
    SummaryDocument,
    ToolInfo,
)
from drakelimit.services.counting_stats import p_second_given_first
from drakelimit.services.mc_engine import SampleStream

logger = logging.getLogger(__name__)

TOOL_NAME = "drakelimit"
HISTOGRAM_COLUMNS = ("bin_low_log10", "bin_high_log10", "count", "density")
CURVE_COLUMNS = ("n_civ", "p_second_given_first")
REFERENCE_GRID = (0.051, 0.5, 1.0, 2.0, 4.0)

# Alone-fractions of the earlier literature estimate, printed for context.
_LITERATURE_ROW = ("Literature estimate", 0.52, 0.38)


def format_sig(value: float, digits: int = settings.DISPLAY_DIGITS) -> str:
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return f"{value:.{digits}g}"


def _write_text(path: str | Path, text: str) -> Path:
    target = Path(path)
    try:
        target.parent.mkdir(parents=True, exist_ok=True)
        with open(target, "w", encoding="utf-8", newline="") as f:
            f.write(text)
    except OSError as exc:
        raise ScenarioIOError(str(target), exc.strerror or str(exc)) from exc
    logger.info("Wrote %s", target)
    return target


# ──────────────────────────────────────────────────────────────────────────────
# Conditional-probability curve
# ──────────────────────────────────────────────────────────────────────────────


@dataclass(frozen=True)
class CurvePoint:
    n_civ: float
    p_second: float

    @classmethod
    def at(cls, n_civ: float) -> "CurvePoint":
        return cls(n_civ=n_civ, p_second=p_second_given_first(n_civ))


def emit_curve(
    n_min: float = settings.CURVE_MIN,
    n_max: float = settings.CURVE_MAX,
    n_points: int = settings.CURVE_POINTS,
    spacing: CurveSpacing = settings.CURVE_SPACING,
) -> list[CurvePoint]:
    """P(second | first) on a grid including both endpoints."""
    violations = []
    if n_points < 2:
        violations.append(f"n_points: {n_points!r} must be >= 2")
    if not (math.isfinite(n_min) and math.isfinite(n_max)):
        violations.append("range: bounds must be finite")
    elif n_min < 0:
        violations.append(f"n_min: {n_min!r} must be >= 0")
    elif not n_min < n_max:
        violations.append(f"range: n_min < n_max violated ({n_min!r} >= {n_max!r})")
    if spacing not in ("linear", "log"):
        violations.append(f"spacing: {spacing!r} must be 'linear' or 'log'")
    elif spacing == "log" and not n_min > 0:
        violations.append("n_min: log spacing requires n_min > 0")
    if violations:
        raise ValidationFailure(violations)

    if spacing == "log":
        grid = np.geomspace(n_min, n_max, n_points)
    else:
        grid = np.linspace(n_min, n_max, n_points)
    grid[0], grid[-1] = n_min, n_max
    return [CurvePoint.at(float(n)) for n in grid]


def reference_curve_points() -> list[CurvePoint]:
    return [CurvePoint.at(n) for n in REFERENCE_GRID]


def curve_csv(points: list[CurvePoint]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CURVE_COLUMNS)
    for point in points:
        writer.writerow([format_sig(point.n_civ), format_sig(point.p_second)])
    return buf.getvalue()


def write_curve(points: list[CurvePoint], path: str | Path) -> Path:
    return _write_text(path, curve_csv(points))


# ──────────────────────────────────────────────────────────────────────────────
# Summary document
# ──────────────────────────────────────────────────────────────────────────────


def _display(summary: RunSummary) -> dict[str, str]:
    keys = (
        "frac_alone_galaxy",
        "frac_alone_universe",
        "frac_below_limit",
        "frac_alone_galaxy_truncated",
        "frac_alone_universe_truncated",
        "frac_not_alone_universe_truncated",
        "threshold_alone_universe",
        "threshold_limit",
    )
    return {key: format_sig(getattr(summary, key)) for key in keys}


def emit_summary(
    summary: RunSummary,
    limits: list[LimitResult],
    scenario: DrakeScenario,
    timestamp: bool = True,
) -> SummaryDocument:
    """Assemble the machine-readable summary of a run.

    ``generated_at`` is the only field that differs between identical runs;
    pass ``timestamp=False`` to leave it out.
    """
    generated_at = datetime.now(timezone.utc).isoformat() if timestamp else None
    return SummaryDocument(
        tool=ToolInfo(name=TOOL_NAME, version=__version__),
        generated_at=generated_at,
        scenario=scenario,
        summary=summary,
        limits=list(limits),
        display=_display(summary),
    )


def summary_json(document: SummaryDocument) -> str:
    return document.model_dump_json(indent=2) + "\n"


def parse_summary(text: str) -> SummaryDocument:
    try:
        return SummaryDocument.model_validate_json(text)
    except ValidationError as exc:
        raise ValidationFailure.from_pydantic(exc, prefix="summary") from exc


def write_summary(document: SummaryDocument, path: str | Path) -> Path:
    return _write_text(path, summary_json(document))


# ──────────────────────────────────────────────────────────────────────────────
# Histogram export
# ──────────────────────────────────────────────────────────────────────────────


def histogram_rows(summary: RunSummary) -> list[tuple[float, float, int, float | None]]:
    """(low, high, count, density) rows; under/overflow rows have no density.

    Density is normalized per unit log10 over all samples, so it integrates
    to the in-range fraction.
    """
    width = (summary.log10_max - summary.log10_min) / summary.n_bins
    total = max(summary.n_samples, 1)
    rows: list[tuple[float, float, int, float | None]] = [
        (-math.inf, summary.log10_min, summary.underflow, None),
    ]
    for i, count in enumerate(summary.histogram):
        low = summary.log10_min + i * width
        high = summary.log10_max if i == summary.n_bins - 1 else low + width
        rows.append((low, high, count, count / (total * width)))
    rows.append((summary.log10_max, math.inf, summary.overflow, None))
    return rows


def emit_histogram(summary: RunSummary) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(HISTOGRAM_COLUMNS)
    for low, high, count, density in histogram_rows(summary):
        writer.writerow([
            format_sig(low),
            format_sig(high),
            count,
            "" if density is None else format_sig(density),
        ])
    return buf.getvalue()


def write_histogram(summary: RunSummary, path: str | Path) -> Path:
    return _write_text(path, emit_histogram(summary))


def write_raw_samples(stream: SampleStream, path: str | Path) -> Path:
    """One log10(n_g) per line at full precision."""
    lines = "\n".join(repr(float(v)) for v in stream.values)
    return _write_text(path, lines + "\n" if lines else "")


# ──────────────────────────────────────────────────────────────────────────────
# Text blocks
# ──────────────────────────────────────────────────────────────────────────────


def alone_fraction_block(summary: RunSummary) -> str:
    """Alone-fractions before and after the limit truncation."""
    def pct(x: float) -> str:
        return f"{format_sig(100 * x)}%"

    header = f"{'Model':<22}{'P(n<1) Galaxy':>18}{'P(n<1) Universe':>20}"
    lines = [
        header,
        "─" * len(header),
        f"{_LITERATURE_ROW[0]:<22}{pct(_LITERATURE_ROW[1]):>18}{pct(_LITERATURE_ROW[2]):>20}",
        f"{'This run':<22}{pct(summary.frac_alone_galaxy):>18}"
        f"{pct(summary.frac_alone_universe):>20}",
        f"{'With lower limit':<22}{pct(summary.frac_alone_galaxy_truncated):>18}"
        f"{pct(summary.frac_alone_universe_truncated):>20}",
        "─" * len(header),
        f"samples: {summary.n_samples}  seed: {summary.seed}",
        f"limit: log10(n_g) >= {format_sig(summary.threshold_limit)} "
        f"at {format_sig(100 * summary.limit_confidence)}% C.L.; "
        f"excluded fraction {format_sig(summary.frac_below_limit)}",
        f"not alone in the observable universe after truncation: "
        f"{pct(summary.frac_not_alone_universe_truncated)}",
    ]
    return "\n".join(lines)


def limit_block(limits: list[LimitResult]) -> str:
    lines = []
    for limit in limits:
        cl = format_sig(100 * limit.confidence)
        if limit.context == "universe":
            lines.append(f"n_o > {format_sig(limit.n_lower)} at {cl}% C.L. (observable universe)")
        elif limit.context == "galaxy":
            lines.append(f"n_g > {format_sig(limit.n_lower)} at {cl}% C.L. (Galaxy)")
        else:
            label = limit.label or "custom star population"
            lines.append(f"n > {format_sig(limit.n_lower)} at {cl}% C.L. ({label})")
    return "\n".join(lines)
