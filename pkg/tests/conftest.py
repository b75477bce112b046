"""Shared fixtures: a tiny trained model over one image per expression."""

import json
from types import SimpleNamespace

import numpy as np
import pytest

from eigenexpr import EXPRESSIONS, CropRect, GrayImage, RegionKind
from eigenexpr.image_io import write_gray_text
from eigenexpr.model import ManifestEntry, TrainingManifest, save_model, train

# Five regions laid out like a face inside a 160x160 frame.
TOY_CROPS = {
    RegionKind.LEFT_EYE: CropRect(x=16, y=24, w=48, h=40),
    RegionKind.RIGHT_EYE: CropRect(x=96, y=24, w=48, h=40),
    RegionKind.NOSE: CropRect(x=56, y=56, w=48, h=56),
    RegionKind.LIP: CropRect(x=40, y=112, w=80, h=40),
    RegionKind.NOSE_LIP: CropRect(x=40, y=56, w=80, h=96),
}


def random_symmetric(rng, n: int, scale: float = 1.0) -> np.ndarray:
    a = rng.standard_normal((n, n)) * scale
    return (a + a.T) / 2.0


def crops_as_json(crops) -> dict:
    return {
        kind.key: {"x": r.x, "y": r.y, "w": r.w, "h": r.h} for kind, r in crops.items()
    }


def write_manifest(path, rows) -> None:
    """rows: (image name relative to the manifest, Expression, crops dict)."""
    doc = {
        "entries": [
            {"image": name, "expression": expr.value, "crops": crops_as_json(crops)}
            for name, expr, crops in rows
        ]
    }
    path.write_text(json.dumps(doc, indent=1) + "\n", encoding="utf-8")


@pytest.fixture(scope="session")
def toy(tmp_path_factory):
    """One random 160x160 image per expression, the manifest naming them,
    and the model trained on them, all on disk for CLI runs."""
    base = tmp_path_factory.mktemp("toy")
    rng = np.random.default_rng(31)
    entries = []
    rows = []
    for expr in EXPRESSIONS:
        name = f"{expr.value}.txt"
        write_gray_text(base / name, GrayImage(pixels=rng.random((160, 160))))
        entries.append(
            ManifestEntry(
                image_path=base / name, expression=expr, crops=dict(TOY_CROPS)
            )
        )
        rows.append((name, expr, TOY_CROPS))
    manifest = TrainingManifest(entries=tuple(entries))
    manifest_path = base / "manifest.json"
    write_manifest(manifest_path, rows)
    model = train(manifest)
    model_path = base / "model.json"
    save_model(model, model_path)
    return SimpleNamespace(
        dir=base,
        entries=entries,
        manifest=manifest,
        manifest_path=manifest_path,
        model=model,
        model_path=model_path,
    )
