"""Batch evaluation: per-expression success rates, confusion, timing.

Each manifest entry is classified against a trained model; the report
tallies correctness per expression, a 6x6 confusion grid (true expression
by decided expression), tie-break usage, and wall-clock classification
time.  Timing covers classification of an already-decoded image only;
decoding, model loading, and training are excluded.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

from .classify import classify
from .errors import EigenExprError, ParameterError, ShapeError
from .image_io import read_image
from .model import EXPRESSIONS, Expression, ExpressionModel, TrainingManifest

_OVERLAP_MODES = ("disjoint", "overlapping", "unknown")


@dataclass(frozen=True)
class ExpressionStats:
    """One expression's row of the report: tested, correct, success rate."""

    tested: int
    correct: int
    success_rate: float | None

    def __post_init__(self):
        if self.tested < 0 or self.correct < 0 or self.correct > self.tested:
            raise ShapeError(
                f"invalid counts: correct {self.correct} of tested {self.tested}"
            )
        if self.tested == 0:
            if self.success_rate is not None:
                raise ShapeError("success_rate must be absent when nothing was tested")
        elif self.success_rate != self.correct / self.tested:
            raise ShapeError("success_rate does not equal correct / tested")


@dataclass(frozen=True, eq=False)
class EvalReport:
    """Everything evaluate measures; timing fields vary run to run, the rest
    is deterministic for fixed inputs.  Equality ignores the timing fields
    so identical evaluations compare equal across runs."""

    per_expression: dict[Expression, ExpressionStats]
    confusion: tuple[tuple[int, ...], ...]
    overall_rate: float | None
    mean_classify_seconds: float
    max_classify_seconds: float
    tie_count: int
    overlap: str
    errors: tuple[tuple[str, str], ...]

    def __eq__(self, other):
        if not isinstance(other, EvalReport):
            return NotImplemented
        return (
            self.per_expression == other.per_expression
            and self.confusion == other.confusion
            and self.overall_rate == other.overall_rate
            and self.tie_count == other.tie_count
            and self.overlap == other.overlap
            and self.errors == other.errors
        )

    def __post_init__(self):
        if set(self.per_expression) != set(EXPRESSIONS):
            raise ShapeError("report must carry stats for exactly the six expressions")
        n = len(EXPRESSIONS)
        confusion = tuple(tuple(int(c) for c in row) for row in self.confusion)
        if len(confusion) != n or any(len(row) != n for row in confusion):
            raise ShapeError(f"confusion grid must be {n}x{n}")
        if any(c < 0 for row in confusion for c in row):
            raise ShapeError("confusion counts cannot be negative")
        for i, expr in enumerate(EXPRESSIONS):
            if sum(confusion[i]) != self.per_expression[expr].tested:
                raise ShapeError(
                    f"confusion row for {expr.value} does not sum to its tested count"
                )
        if self.overlap not in _OVERLAP_MODES:
            raise ParameterError(
                f"overlap must be one of {_OVERLAP_MODES}, got {self.overlap!r}"
            )
        if self.tie_count < 0:
            raise ShapeError("tie_count cannot be negative")
        object.__setattr__(self, "per_expression", dict(self.per_expression))
        object.__setattr__(self, "confusion", confusion)
        object.__setattr__(
            self, "errors", tuple((str(a), str(b)) for a, b in self.errors)
        )

    @property
    def total_tested(self) -> int:
        return sum(stats.tested for stats in self.per_expression.values())

    @property
    def total_correct(self) -> int:
        return sum(stats.correct for stats in self.per_expression.values())


def evaluate(
    model: ExpressionModel, manifest: TrainingManifest, *, threads: int = 0
) -> EvalReport:
    """Classify every manifest entry and tally the results.

    Entries that fail (unreadable file, out-of-bounds crop, degenerate
    region) are recorded in the report's errors list instead of aborting
    the run.  ``threads`` > 1 classifies entries concurrently; tallies do
    not depend on completion order.
    """
    if not isinstance(model, ExpressionModel):
        raise ParameterError(f"model must be an ExpressionModel, got {model!r}")
    if not isinstance(manifest, TrainingManifest):
        raise ParameterError(f"manifest must be a TrainingManifest, got {manifest!r}")

    row_of = {e: i for i, e in enumerate(EXPRESSIONS)}

    def run_entry(entry):
        try:
            image = read_image(entry.image_path)
            start = time.perf_counter()
            result = classify(image, entry.crops, model)
            elapsed = time.perf_counter() - start
            return entry, result, elapsed, None
        except (EigenExprError, OSError) as exc:
            return entry, None, 0.0, str(exc)

    if threads > 1 and len(manifest.entries) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            outcomes = list(pool.map(run_entry, manifest.entries))
    else:
        outcomes = [run_entry(entry) for entry in manifest.entries]

    confusion = [[0] * len(EXPRESSIONS) for _ in EXPRESSIONS]
    times = []
    tie_count = 0
    errors = []
    for entry, result, elapsed, failure in outcomes:
        if failure is not None:
            errors.append((str(entry.image_path), failure))
            continue
        confusion[row_of[entry.expression]][row_of[result.decided]] += 1
        times.append(elapsed)
        if result.tie_broken:
            tie_count += 1

    per_expression = {}
    for expr in EXPRESSIONS:
        row = confusion[row_of[expr]]
        tested = sum(row)
        correct = row[row_of[expr]]
        per_expression[expr] = ExpressionStats(
            tested=tested,
            correct=correct,
            success_rate=(correct / tested) if tested else None,
        )
    total_tested = sum(s.tested for s in per_expression.values())
    total_correct = sum(s.correct for s in per_expression.values())

    if not model.trained_on:
        overlap = "unknown"
    elif any(
        str(entry.image_path) in set(model.trained_on) for entry in manifest.entries
    ):
        overlap = "overlapping"
    else:
        overlap = "disjoint"

    return EvalReport(
        per_expression=per_expression,
        confusion=tuple(tuple(row) for row in confusion),
        overall_rate=(total_correct / total_tested) if total_tested else None,
        mean_classify_seconds=(sum(times) / len(times)) if times else 0.0,
        max_classify_seconds=max(times) if times else 0.0,
        tie_count=tie_count,
        overlap=overlap,
        errors=tuple(errors),
    )


def report_to_dict(r: EvalReport) -> dict:
    """Machine-readable form; report_from_dict inverts it exactly."""
    if not isinstance(r, EvalReport):
        raise ParameterError(f"r must be an EvalReport, got {r!r}")
    return {
        "per_expression": {
            expr.value: {
                "tested": stats.tested,
                "correct": stats.correct,
                "success_rate": stats.success_rate,
            }
            for expr, stats in ((e, r.per_expression[e]) for e in EXPRESSIONS)
        },
        "confusion": [list(row) for row in r.confusion],
        "overall_rate": r.overall_rate,
        "mean_classify_seconds": r.mean_classify_seconds,
        "max_classify_seconds": r.max_classify_seconds,
        "tie_count": r.tie_count,
        "overlap": r.overlap,
        "errors": [list(pair) for pair in r.errors],
    }


def report_from_dict(data: dict) -> EvalReport:
    """Rebuild an EvalReport from its machine-readable form."""
    if not isinstance(data, dict):
        raise ParameterError(f"report document must be an object, got {data!r}")
    expected = {
        "per_expression",
        "confusion",
        "overall_rate",
        "mean_classify_seconds",
        "max_classify_seconds",
        "tie_count",
        "overlap",
        "errors",
    }
    if set(data) != expected:
        raise ParameterError(
            f"report document must hold exactly: {', '.join(sorted(expected))}"
        )
    raw_stats = data["per_expression"]
    if not isinstance(raw_stats, dict) or set(raw_stats) != {
        e.value for e in EXPRESSIONS
    }:
        raise ParameterError("per_expression must cover exactly the six expressions")
    per_expression = {}
    for expr in EXPRESSIONS:
        cell = raw_stats[expr.value]
        if not isinstance(cell, dict) or set(cell) != {
            "tested",
            "correct",
            "success_rate",
        }:
            raise ParameterError(f"bad per_expression entry for {expr.value}")
        per_expression[expr] = ExpressionStats(
            tested=cell["tested"],
            correct=cell["correct"],
            success_rate=cell["success_rate"],
        )
    return EvalReport(
        per_expression=per_expression,
        confusion=tuple(tuple(row) for row in data["confusion"]),
        overall_rate=data["overall_rate"],
        mean_classify_seconds=data["mean_classify_seconds"],
        max_classify_seconds=data["max_classify_seconds"],
        tie_count=data["tie_count"],
        overlap=data["overlap"],
        errors=tuple((a, b) for a, b in data["errors"]),
    )


def _percent(rate: float | None) -> str:
    return "-" if rate is None else f"{rate * 100:.4g}%"


def render_report(r: EvalReport) -> str:
    """Human-readable table: per-expression success rates plus the confusion
    grid, tie usage, overlap mode, timing, and any per-entry errors."""
    if not isinstance(r, EvalReport):
        raise ParameterError(f"r must be an EvalReport, got {r!r}")
    name_width = max(len(e.value) for e in EXPRESSIONS) + 2
    lines = [
        "Expression".ljust(name_width) + f"{'Tested':>8}{'Correct':>9}   Success rate"
    ]
    for expr in EXPRESSIONS:
        stats = r.per_expression[expr]
        lines.append(
            expr.value.ljust(name_width)
            + f"{stats.tested:>8}{stats.correct:>9}   {_percent(stats.success_rate)}"
        )
    lines.append(
        "Overall".ljust(name_width)
        + f"{r.total_tested:>8}{r.total_correct:>9}   {_percent(r.overall_rate)}"
    )
    lines.append("")
    lines.append("Confusion (rows: true, columns: decided)")
    header = " " * name_width + "".join(f"{e.value:>10}" for e in EXPRESSIONS)
    lines.append(header)
    for i, expr in enumerate(EXPRESSIONS):
        lines.append(
            expr.value.ljust(name_width)
            + "".join(f"{c:>10}" for c in r.confusion[i])
        )
    lines.append("")
    lines.append(
        f"Ties broken: {r.tie_count}   Overlap with training set: {r.overlap}"
    )
    lines.append(
        f"Classification time: mean {r.mean_classify_seconds:.4f}s, "
        f"max {r.max_classify_seconds:.4f}s"
    )
    if r.errors:
        lines.append("")
        lines.append(f"Entries skipped with errors: {len(r.errors)}")
        for path, message in r.errors:
            lines.append(f"  {path}: {message}")
    return "\n".join(lines)
