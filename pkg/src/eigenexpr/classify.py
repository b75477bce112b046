"""Minimum-Euclidean-distance voting over eigen subspaces.

Each region compares the test image's five eigenvectors against every
expression's reference eigenvectors index by index (vector k against
vector k, never across k).  Every eigenvector casts one vote for the
expression at minimal distance; 25 votes across the five regions decide
the expression.
"""

from __future__ import annotations

from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import (
    CoverageError,
    EigenExprError,
    FixtureFormatError,
    ParameterError,
    ShapeError,
)
from .features import NUM_EIGENVECTORS, EigenBasis, extract_basis
from .imaging import CropRect, GrayImage, RegionKind, RegionSpec, crop, resize
from .linalg import as_vector
from .model import EXPRESSIONS, Expression, ExpressionModel


@dataclass(frozen=True)
class EDMatrix:
    """6x5 distance grid for one region: rows follow canonical Expression order,
    column k holds the distance between test eigenvector k and each reference
    eigenvector k."""

    region: RegionKind
    ed: np.ndarray

    def __post_init__(self):
        if not isinstance(self.region, RegionKind):
            raise ParameterError(f"region must be a RegionKind, got {self.region!r}")
        a = np.asarray(self.ed, dtype=np.float64)
        expected = (len(EXPRESSIONS), NUM_EIGENVECTORS)
        if a.shape != expected:
            raise ShapeError(f"ED grid must be {expected[0]}x{expected[1]}, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ShapeError("ED grid contains NaN or infinite entries")
        if float(a.min()) < 0.0:
            raise ShapeError("distances cannot be negative")
        a = a.copy()
        a.flags.writeable = False
        object.__setattr__(self, "ed", a)


@dataclass(frozen=True)
class VoteTable:
    """Per-region winners (5 per region) and the vote totals they add up to.

    Totals may be omitted (None), in which case they are derived from the
    winner lists; supplied totals are verified against that derivation.
    """

    winners: dict[RegionKind, tuple[Expression, ...]]
    totals: dict[Expression, int] | None = None

    def __post_init__(self):
        missing = [kind.key for kind in RegionKind if kind not in self.winners]
        if missing:
            raise CoverageError(f"winners missing for region(s): {', '.join(missing)}")
        winners = {}
        for region, row in self.winners.items():
            if not isinstance(region, RegionKind):
                raise ParameterError(f"winner keys must be RegionKind, got {region!r}")
            row = tuple(row)
            if len(row) != NUM_EIGENVECTORS or not all(
                isinstance(w, Expression) for w in row
            ):
                raise ShapeError(
                    f"{region.key} winners must be {NUM_EIGENVECTORS} Expression values"
                )
            winners[region] = row
        counted = Counter(w for row in winners.values() for w in row)
        totals = {e: int(counted.get(e, 0)) for e in EXPRESSIONS}
        if self.totals is not None:
            supplied = dict(self.totals)
            unknown = [k for k in supplied if not isinstance(k, Expression)]
            if unknown:
                raise ParameterError(f"total keys must be Expression values: {unknown!r}")
            if {e: int(supplied.get(e, 0)) for e in EXPRESSIONS} != totals:
                raise ShapeError("totals do not match the winner lists")
        object.__setattr__(self, "winners", winners)
        object.__setattr__(self, "totals", totals)

    @property
    def total_votes(self) -> int:
        return sum(self.totals.values())


@dataclass(frozen=True)
class ClassificationResult:
    """The decision plus everything needed to audit it."""

    decided: Expression
    votes: VoteTable
    ed_matrices: dict[RegionKind, EDMatrix]
    tie_broken: bool

    def __post_init__(self):
        if not isinstance(self.decided, Expression):
            raise ParameterError(f"decided must be an Expression, got {self.decided!r}")
        peak = max(self.votes.totals.values())
        if self.votes.totals[self.decided] != peak:
            raise ShapeError("decided expression does not hold the maximal vote total")
        object.__setattr__(self, "ed_matrices", dict(self.ed_matrices))


def euclidean_distance(a, b) -> float:
    """Plain Euclidean distance between two equal-length vectors."""
    va = as_vector(a)
    vb = as_vector(b)
    if va.shape != vb.shape:
        raise ShapeError(f"vector lengths differ: {va.shape[0]} vs {vb.shape[0]}")
    return float(np.linalg.norm(va - vb))


def region_ed_matrix(
    test: EigenBasis, model: ExpressionModel, region: RegionKind
) -> EDMatrix:
    """Distances between a test basis and all six reference bases of one region."""
    if not isinstance(test, EigenBasis):
        raise ParameterError(f"test must be an EigenBasis, got {test!r}")
    if not isinstance(model, ExpressionModel):
        raise ParameterError(f"model must be an ExpressionModel, got {model!r}")
    if test.region is not region:
        raise ShapeError(
            f"test basis is for {test.region.key}, not {region.key}"
        )
    grid = np.empty((len(EXPRESSIONS), NUM_EIGENVECTORS))
    for row, expr in enumerate(EXPRESSIONS):
        reference = model.bases[(expr, region)]
        for k in range(NUM_EIGENVECTORS):
            grid[row, k] = euclidean_distance(
                test.pairs[k].vector, reference.pairs[k].vector
            )
    return EDMatrix(region=region, ed=grid)


def region_votes(ed: EDMatrix) -> tuple[Expression, ...]:
    """Column-wise argmin winners; distance ties go to the earlier expression."""
    if not isinstance(ed, EDMatrix):
        raise ParameterError(f"ed must be an EDMatrix, got {ed!r}")
    # np.argmin returns the first minimal row, which is exactly the
    # canonical-order tie rule.
    rows = np.argmin(ed.ed, axis=0)
    return tuple(EXPRESSIONS[int(r)] for r in rows)


def _require_all_regions(mapping, what: str) -> None:
    missing = [kind.key for kind in RegionKind if kind not in mapping]
    if missing:
        raise CoverageError(f"{what} missing for region(s): {', '.join(missing)}")
    extra = [key for key in mapping if not isinstance(key, RegionKind)]
    if extra:
        raise ParameterError(f"{what} has non-region keys: {extra!r}")


def aggregate(
    winners: dict[RegionKind, tuple[Expression, ...]],
    ed_matrices: dict[RegionKind, EDMatrix],
) -> ClassificationResult:
    """Count all 25 votes and decide the expression.

    A vote-total tie is broken by the smaller sum of winning distances over
    the tied expression's own winning cells, then by canonical order; any
    tie at the totals level sets tie_broken.
    """
    _require_all_regions(winners, "winners")
    _require_all_regions(ed_matrices, "ED matrices")
    table = VoteTable(winners=dict(winners))
    peak = max(table.totals.values())
    leaders = [e for e in EXPRESSIONS if table.totals[e] == peak]
    tie_broken = len(leaders) > 1
    if tie_broken:
        expr_row = {e: i for i, e in enumerate(EXPRESSIONS)}

        def winning_ed_sum(expr: Expression) -> float:
            total = 0.0
            for region, row in table.winners.items():
                grid = ed_matrices[region].ed
                for k, winner in enumerate(row):
                    if winner is expr:
                        total += float(grid[expr_row[expr], k])
            return total

        sums = {e: winning_ed_sum(e) for e in leaders}
        best = min(sums.values())
        decided = next(e for e in EXPRESSIONS if e in sums and sums[e] == best)
    else:
        decided = leaders[0]
    return ClassificationResult(
        decided=decided,
        votes=table,
        ed_matrices=dict(ed_matrices),
        tie_broken=tie_broken,
    )


def classify_replay(ed_matrices: dict[RegionKind, EDMatrix]) -> ClassificationResult:
    """Run voting on raw ED grids, bypassing imaging and features entirely."""
    _require_all_regions(ed_matrices, "ED matrices")
    winners = {region: region_votes(ed) for region, ed in ed_matrices.items()}
    return aggregate(winners, ed_matrices)


def classify_bases(
    test_bases: dict[RegionKind, EigenBasis], model: ExpressionModel
) -> ClassificationResult:
    """Classify from already-extracted test bases for all five regions."""
    _require_all_regions(test_bases, "test bases")
    ed_matrices = {
        region: region_ed_matrix(test_bases[region], model, region)
        for region in RegionKind
    }
    winners = {region: region_votes(ed) for region, ed in ed_matrices.items()}
    return aggregate(winners, ed_matrices)


def classify(
    image: GrayImage,
    crops: dict[RegionKind, CropRect],
    model: ExpressionModel,
    *,
    threads: int = 0,
) -> ClassificationResult:
    """Full pipeline: crop and resize the five regions, extract their bases,
    and vote against the model.  ``threads`` > 1 runs the region pipelines
    concurrently; the result is identical either way."""
    if not isinstance(image, GrayImage):
        raise ParameterError(f"image must be a GrayImage, got {image!r}")
    if not isinstance(model, ExpressionModel):
        raise ParameterError(f"model must be an ExpressionModel, got {model!r}")
    _require_all_regions(crops, "crops")

    def basis_for(kind: RegionKind) -> EigenBasis:
        try:
            region = resize(
                crop(image, RegionSpec(kind=kind, rect=crops[kind])),
                kind.rows,
                kind.cols,
            )
            return extract_basis(region, kind)
        except EigenExprError as exc:
            raise type(exc)(f"{kind.key} region: {exc}") from exc

    regions = list(RegionKind)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            bases = list(pool.map(basis_for, regions))
    else:
        bases = [basis_for(kind) for kind in regions]
    return classify_bases(dict(zip(regions, bases)), model)


def read_ed_fixture(path, region: RegionKind) -> EDMatrix:
    """Parse a replay fixture: six rows of five distances, canonical order.

    Blank lines and `#` comments are ignored, so fixtures can annotate
    which expression each row belongs to.
    """
    if not isinstance(region, RegionKind):
        raise ParameterError(f"region must be a RegionKind, got {region!r}")
    p = Path(path)
    rows = []
    for lineno, raw in enumerate(p.read_text(encoding="utf-8").splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        if len(tokens) != NUM_EIGENVECTORS:
            raise FixtureFormatError(
                f"{p}: line {lineno} has {len(tokens)} values, expected {NUM_EIGENVECTORS}"
            )
        try:
            rows.append([float(tok) for tok in tokens])
        except ValueError as exc:
            raise FixtureFormatError(f"{p}: line {lineno} holds a non-numeric value") from exc
    if len(rows) != len(EXPRESSIONS):
        raise FixtureFormatError(
            f"{p}: expected {len(EXPRESSIONS)} distance rows, found {len(rows)}"
        )
    try:
        return EDMatrix(region=region, ed=np.array(rows))
    except EigenExprError as exc:
        raise FixtureFormatError(f"{p}: {exc}") from exc


def load_replay_fixtures(directory) -> dict[RegionKind, EDMatrix]:
    """Read `<region>.txt` fixtures for all five regions from one directory."""
    d = Path(directory)
    missing = [kind.key for kind in RegionKind if not (d / f"{kind.key}.txt").is_file()]
    if missing:
        raise CoverageError(
            f"{d}: no fixture file for region(s): {', '.join(missing)}"
        )
    return {
        kind: read_ed_fixture(d / f"{kind.key}.txt", kind) for kind in RegionKind
    }


def format_ed_matrix(ed: EDMatrix) -> str:
    """Render one region's grid with expression rows and ED1..ED5 columns."""
    name_width = max(len(e.value) for e in EXPRESSIONS)
    header = ed.region.key.ljust(name_width) + "".join(
        f"{f'ED{k + 1}':>10}" for k in range(NUM_EIGENVECTORS)
    )
    lines = [header]
    for row, expr in enumerate(EXPRESSIONS):
        cells = "".join(f"{ed.ed[row, k]:>10.4f}" for k in range(NUM_EIGENVECTORS))
        lines.append(expr.value.ljust(name_width) + cells)
    return "\n".join(lines)


def format_vote_table(votes: VoteTable) -> str:
    """Render per-region vote counts with a totals row."""
    label_width = max(len(k.key) for k in RegionKind) + 2
    label_width = max(label_width, len("Total votes") + 2)
    header = " " * label_width + "".join(f"{e.value:>10}" for e in EXPRESSIONS)
    lines = [header]
    for region, row in votes.winners.items():
        counts = Counter(row)
        cells = "".join(f"{counts.get(e, 0):>10}" for e in EXPRESSIONS)
        lines.append(region.key.ljust(label_width) + cells)
    totals = "".join(f"{votes.totals[e]:>10}" for e in EXPRESSIONS)
    lines.append("Total votes".ljust(label_width) + totals)
    return "\n".join(lines)
