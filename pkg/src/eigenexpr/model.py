"""Reference subspaces per expression: training, persistence, manifests.

A trained model holds one EigenBasis per (expression, region) cell, built
from the pixel-wise mean of each expression's training region images.  The
model file is versioned JSON with round-trip-exact floats, so training,
saving, and reloading are all bit-reproducible.
"""

from __future__ import annotations

import json
import os
import tempfile
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from .errors import (
    CoverageError,
    DegenerateRankError,
    EigenExprError,
    ManifestError,
    ModelFormatError,
    ParameterError,
)
from .features import NUM_EIGENVECTORS, EigenBasis, extract_basis
from .image_io import read_image
from .imaging import CropRect, GrayImage, RegionKind, RegionSpec, crop, resize
from .linalg import EigenPair

MODEL_FORMAT_VERSION = "eigenexpr-model/1"


class Expression(Enum):
    """The six basic expressions in canonical order (fixed, never resorted)."""

    SURPRISE = "Surprise"
    HAPPY = "Happy"
    FEAR = "Fear"
    ANGER = "Anger"
    SAD = "Sad"
    DISGUST = "Disgust"

    @classmethod
    def parse(cls, name: str) -> "Expression":
        """Case-insensitive lookup by canonical name."""
        if isinstance(name, str):
            for expr in cls:
                if expr.value.lower() == name.lower():
                    return expr
        valid = ", ".join(e.value for e in cls)
        raise ParameterError(f"unknown expression {name!r}; expected one of: {valid}")


EXPRESSIONS: tuple[Expression, ...] = tuple(Expression)


@dataclass(frozen=True)
class ManifestEntry:
    """One training or evaluation sample: an image, its label, and five crops."""

    image_path: Path
    expression: Expression
    crops: dict[RegionKind, CropRect]

    def __post_init__(self):
        if not isinstance(self.expression, Expression):
            raise ParameterError(f"expression must be an Expression, got {self.expression!r}")
        if set(self.crops) != set(RegionKind):
            missing = [k.key for k in RegionKind if k not in self.crops]
            extra = [getattr(k, "key", repr(k)) for k in self.crops if k not in set(RegionKind)]
            raise ParameterError(
                f"entry for {self.image_path} must supply exactly the five regions"
                + (f"; missing: {', '.join(missing)}" if missing else "")
                + (f"; unknown: {', '.join(extra)}" if extra else "")
            )
        for kind, rect in self.crops.items():
            if not isinstance(rect, CropRect):
                raise ParameterError(f"{kind.key} crop must be a CropRect, got {rect!r}")
            if rect.w < 2 or rect.h < 2:
                raise ParameterError(
                    f"{kind.key} crop for {self.image_path} must be at least 2x2, "
                    f"got {rect.w}x{rect.h}"
                )
        object.__setattr__(self, "image_path", Path(self.image_path))
        object.__setattr__(self, "crops", dict(self.crops))


@dataclass(frozen=True)
class TrainingManifest:
    """An ordered list of manifest entries; order never affects training output.

    May be empty: train rejects the gaps via coverage checking, while batch
    evaluation of an empty manifest is a legitimate vacuous run.
    """

    entries: tuple[ManifestEntry, ...]

    def __post_init__(self):
        entries = tuple(self.entries)
        for entry in entries:
            if not isinstance(entry, ManifestEntry):
                raise ParameterError(f"entries must be ManifestEntry values, got {entry!r}")
        object.__setattr__(self, "entries", entries)


@dataclass(frozen=True)
class ExpressionModel:
    """Complete set of 30 reference bases: six expressions times five regions."""

    bases: dict[tuple[Expression, RegionKind], EigenBasis]
    trained_on: tuple[str, ...] = ()
    version: str = MODEL_FORMAT_VERSION

    def __post_init__(self):
        if self.version != MODEL_FORMAT_VERSION:
            raise ParameterError(
                f"unsupported model version {self.version!r}; "
                f"this build writes {MODEL_FORMAT_VERSION!r}"
            )
        expected = {(e, r) for e in EXPRESSIONS for r in RegionKind}
        if set(self.bases) != expected:
            missing = sorted(
                f"{e.value}/{r.key}" for (e, r) in expected - set(self.bases)
            )
            extra = sorted(
                str(key) for key in set(self.bases) - expected
            )
            raise CoverageError(
                "model must hold exactly 30 (expression, region) bases"
                + (f"; missing: {', '.join(missing)}" if missing else "")
                + (f"; unexpected: {', '.join(extra)}" if extra else "")
            )
        for (expr, kind), basis in self.bases.items():
            if not isinstance(basis, EigenBasis) or basis.region is not kind:
                raise ParameterError(f"cell {expr.value}/{kind.key} holds an invalid basis")
        object.__setattr__(self, "bases", dict(self.bases))
        object.__setattr__(self, "trained_on", tuple(self.trained_on))

    def basis(self, expression: Expression, region: RegionKind) -> EigenBasis:
        return self.bases[(expression, region)]


def _canonical_region(img: GrayImage, kind: RegionKind, rect: CropRect) -> GrayImage:
    return resize(crop(img, RegionSpec(kind=kind, rect=rect)), kind.rows, kind.cols)


def train(manifest: TrainingManifest, *, threads: int = 0) -> ExpressionModel:
    """Build the 30 reference bases from a training manifest.

    Per (expression, region): decode, grayscale, crop, resize every matching
    image, average the region images pixel-wise, then extract the basis from
    the mean image.  Accumulation runs in sorted-path order, so permuting the
    manifest cannot change a single output bit.  ``threads`` > 1 extracts the
    30 cell bases concurrently; the result is identical either way.
    """
    if not isinstance(manifest, TrainingManifest):
        raise ParameterError(f"manifest must be a TrainingManifest, got {manifest!r}")
    present = {entry.expression for entry in manifest.entries}
    missing = [e.value for e in EXPRESSIONS if e not in present]
    if missing:
        raise CoverageError(f"manifest has no images for: {', '.join(missing)}")

    cells: dict[tuple[Expression, RegionKind], list[tuple[str, np.ndarray]]] = {
        (e, r): [] for e in EXPRESSIONS for r in RegionKind
    }
    decoded: dict[str, GrayImage] = {}
    for entry in manifest.entries:
        key = str(entry.image_path)
        img = decoded.get(key)
        if img is None:
            img = read_image(entry.image_path)
            decoded[key] = img
        for kind in RegionKind:
            region = _canonical_region(img, kind, entry.crops[kind])
            cells[(entry.expression, kind)].append((key, region.pixels))

    def build_cell(expr: Expression, kind: RegionKind) -> EigenBasis:
        samples = sorted(cells[(expr, kind)], key=lambda item: item[0])
        acc = np.zeros((kind.rows, kind.cols))
        for _, pixels in samples:
            acc = acc + pixels
        mean = np.clip(acc / len(samples), 0.0, 1.0)
        try:
            return extract_basis(GrayImage(mean), kind)
        except DegenerateRankError as exc:
            raise DegenerateRankError(f"{expr.value}/{kind.key}: {exc}") from exc

    order = [(e, r) for e in EXPRESSIONS for r in RegionKind]
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            built = list(pool.map(lambda cell: build_cell(*cell), order))
    else:
        built = [build_cell(e, r) for e, r in order]
    bases = {cell: basis for cell, basis in zip(order, built)}
    trained_on = tuple(sorted({str(entry.image_path) for entry in manifest.entries}))
    return ExpressionModel(bases=bases, trained_on=trained_on)


def save_model(m: ExpressionModel, path) -> None:
    """Serialize a model as versioned JSON; floats survive reload bit-exactly.

    The file is written to a temporary sibling and atomically renamed into
    place, so readers never observe a partial model.
    """
    if not isinstance(m, ExpressionModel):
        raise ParameterError(f"m must be an ExpressionModel, got {m!r}")
    doc = {
        "version": m.version,
        "trained_on": list(m.trained_on),
        "bases": {
            expr.value: {
                kind.key: {
                    "rows": kind.rows,
                    "cols": kind.cols,
                    "eigenvalues": [pair.value for pair in m.bases[(expr, kind)].pairs],
                    "eigenvectors": [
                        [float(x) for x in pair.vector]
                        for pair in m.bases[(expr, kind)].pairs
                    ],
                }
                for kind in RegionKind
            }
            for expr in EXPRESSIONS
        },
    }
    text = json.dumps(doc, indent=1, allow_nan=False) + "\n"
    p = Path(path)
    fd, tmp = tempfile.mkstemp(dir=str(p.parent) if str(p.parent) else ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, p)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _require(condition: bool, message: str) -> None:
    if not condition:
        raise ModelFormatError(message)


def _as_float(value, context: str) -> float:
    _require(
        isinstance(value, (int, float)) and not isinstance(value, bool),
        f"{context}: expected a number, got {value!r}",
    )
    return float(value)


def load_model(path) -> ExpressionModel:
    """Load a model file, failing closed on any structural or numeric problem."""
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ModelFormatError(f"{p}: not a valid model file: {exc}") from exc
    _require(isinstance(data, dict), f"{p}: model file must hold a JSON object")
    _require(
        data.get("version") == MODEL_FORMAT_VERSION,
        f"{p}: unsupported model version {data.get('version')!r}; "
        f"expected {MODEL_FORMAT_VERSION!r}",
    )
    _require(
        set(data) == {"version", "trained_on", "bases"},
        f"{p}: model file must hold exactly version, trained_on, and bases",
    )
    trained_on = data["trained_on"]
    _require(
        isinstance(trained_on, list) and all(isinstance(t, str) for t in trained_on),
        f"{p}: trained_on must be a list of paths",
    )
    raw_bases = data["bases"]
    _require(isinstance(raw_bases, dict), f"{p}: bases must be an object")
    _require(
        set(raw_bases) == {e.value for e in EXPRESSIONS},
        f"{p}: bases must hold exactly the six canonical expressions",
    )
    bases: dict[tuple[Expression, RegionKind], EigenBasis] = {}
    for expr in EXPRESSIONS:
        raw_regions = raw_bases[expr.value]
        _require(isinstance(raw_regions, dict), f"{p}: {expr.value} bases must be an object")
        _require(
            set(raw_regions) == {r.key for r in RegionKind},
            f"{p}: {expr.value} must hold exactly the five canonical regions",
        )
        for kind in RegionKind:
            cell = raw_regions[kind.key]
            where = f"{p}: {expr.value}/{kind.key}"
            _require(isinstance(cell, dict), f"{where}: cell must be an object")
            _require(
                set(cell) == {"rows", "cols", "eigenvalues", "eigenvectors"},
                f"{where}: cell must hold rows, cols, eigenvalues, eigenvectors",
            )
            _require(
                cell["rows"] == kind.rows and cell["cols"] == kind.cols,
                f"{where}: dimensions {cell.get('rows')}x{cell.get('cols')} "
                f"do not match canonical {kind.rows}x{kind.cols}",
            )
            values = cell["eigenvalues"]
            vectors = cell["eigenvectors"]
            _require(
                isinstance(values, list) and len(values) == NUM_EIGENVECTORS,
                f"{where}: expected {NUM_EIGENVECTORS} eigenvalues",
            )
            _require(
                isinstance(vectors, list) and len(vectors) == NUM_EIGENVECTORS,
                f"{where}: expected {NUM_EIGENVECTORS} eigenvectors",
            )
            pairs = []
            for i, (value, vector) in enumerate(zip(values, vectors)):
                _require(
                    isinstance(vector, list) and len(vector) == kind.cols,
                    f"{where}: eigenvector {i} must have length {kind.cols}",
                )
                lam = _as_float(value, f"{where}: eigenvalue {i}")
                comps = np.array(
                    [_as_float(x, f"{where}: eigenvector {i}") for x in vector]
                )
                try:
                    pairs.append(EigenPair(value=lam, vector=comps))
                except EigenExprError as exc:
                    raise ModelFormatError(f"{where}: invalid eigenpair {i}: {exc}") from exc
            try:
                bases[(expr, kind)] = EigenBasis(region=kind, pairs=tuple(pairs))
            except EigenExprError as exc:
                raise ModelFormatError(f"{where}: invalid basis: {exc}") from exc
    try:
        return ExpressionModel(bases=bases, trained_on=tuple(trained_on))
    except EigenExprError as exc:
        raise ModelFormatError(f"{p}: invalid model: {exc}") from exc


def load_manifest(path) -> TrainingManifest:
    """Read a JSON manifest; image paths resolve relative to the manifest file.

    Layout: {"entries": [{"image": path, "expression": name,
    "crops": {region: {"x": .., "y": .., "w": .., "h": ..}, ...}}, ...]}
    """
    p = Path(path)
    try:
        data = json.loads(p.read_text(encoding="utf-8"))
    except (json.JSONDecodeError, UnicodeDecodeError) as exc:
        raise ManifestError(f"{p}: not a valid manifest: {exc}") from exc
    if not isinstance(data, dict) or set(data) != {"entries"}:
        raise ManifestError(f"{p}: manifest must be an object with a single 'entries' list")
    raw_entries = data["entries"]
    if not isinstance(raw_entries, list):
        raise ManifestError(f"{p}: 'entries' must be a list")
    base_dir = p.parent
    entries = []
    for i, raw in enumerate(raw_entries):
        where = f"{p}: entry {i}"
        if not isinstance(raw, dict) or set(raw) != {"image", "expression", "crops"}:
            raise ManifestError(f"{where}: must hold exactly image, expression, crops")
        if not isinstance(raw["image"], str) or not raw["image"]:
            raise ManifestError(f"{where}: image must be a non-empty path string")
        image_path = base_dir / raw["image"]
        if not isinstance(raw["crops"], dict):
            raise ManifestError(f"{where}: crops must be an object")
        known = {kind.key: kind for kind in RegionKind}
        if set(raw["crops"]) != set(known):
            raise ManifestError(
                f"{where}: crops must hold exactly: {', '.join(known)}"
            )
        try:
            expression = Expression.parse(raw["expression"])
            crops = {}
            for key, kind in known.items():
                rect = raw["crops"][key]
                if not isinstance(rect, dict) or set(rect) != {"x", "y", "w", "h"}:
                    raise ManifestError(f"{where}: {key} crop must hold exactly x, y, w, h")
                crops[kind] = CropRect(x=rect["x"], y=rect["y"], w=rect["w"], h=rect["h"])
            entries.append(
                ManifestEntry(image_path=image_path, expression=expression, crops=crops)
            )
        except ManifestError:
            raise
        except EigenExprError as exc:
            raise ManifestError(f"{where}: {exc}") from exc
    return TrainingManifest(entries=tuple(entries))
