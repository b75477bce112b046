"""Command-line front end: train, classify, votes, eval.

Exit statuses: 0 success, 1 usage error (bad flags, unknown subcommand,
malformed EIGENEXPR_THREADS), 2 data error (unreadable or malformed
input files, out-of-bounds crops, degenerate regions).  Output files are
written via temp-then-rename, so a failed run never leaves a partial
model or report behind.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path

from .classify import classify, classify_replay, format_ed_matrix, format_vote_table
from .classify import load_replay_fixtures
from .errors import EigenExprError, ParameterError
from .image_io import read_image
from .imaging import CropRect, RegionKind
from .evaluate import evaluate, render_report, report_to_dict
from .model import EXPRESSIONS, load_manifest, load_model, save_model, train


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors; 2 is reserved for data errors
    # here, so usage problems exit 1 instead.
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _threads_from_env() -> int:
    """EIGENEXPR_THREADS caps internal parallelism; 0 or absent runs serial."""
    raw = os.environ.get("EIGENEXPR_THREADS")
    if raw is None or raw.strip() == "":
        return 0
    try:
        value = int(raw)
    except ValueError:
        raise ValueError(f"EIGENEXPR_THREADS must be an integer, got {raw!r}")
    if value < 0:
        raise ValueError(f"EIGENEXPR_THREADS cannot be negative, got {value}")
    return value


def _write_text_atomic(path, text: str) -> None:
    target = Path(path)
    directory = target.parent if str(target.parent) else Path(".")
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=target.name + ".")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, target)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def _load_crops(path) -> dict[RegionKind, CropRect]:
    """Crops file: a JSON object keyed by region name, each value holding
    that region's x, y, w, h rectangle in the source image."""
    text = Path(path).read_text(encoding="utf-8")
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParameterError(f"{path}: not valid JSON: {exc}") from exc
    expected = {kind.key for kind in RegionKind}
    if not isinstance(data, dict) or set(data) != expected:
        raise ParameterError(
            f"{path}: crops file must hold exactly the regions "
            f"{', '.join(sorted(expected))}"
        )
    crops = {}
    for kind in RegionKind:
        cell = data[kind.key]
        if not isinstance(cell, dict) or set(cell) != {"x", "y", "w", "h"}:
            raise ParameterError(f"{path}: region {kind.key} must hold x, y, w, h")
        for name in ("x", "y", "w", "h"):
            if not isinstance(cell[name], int) or isinstance(cell[name], bool):
                raise ParameterError(
                    f"{path}: region {kind.key} field {name} must be an integer"
                )
        try:
            crops[kind] = CropRect(x=cell["x"], y=cell["y"], w=cell["w"], h=cell["h"])
        except EigenExprError as exc:
            raise type(exc)(f"{path}: region {kind.key}: {exc}") from exc
    return crops


def _cmd_train(args, threads: int) -> int:
    manifest = load_manifest(args.manifest)
    model = train(manifest, threads=threads)
    save_model(model, args.out)
    for expr in EXPRESSIONS:
        for kind in RegionKind:
            basis = model.basis(expr, kind)
            values = " ".join(f"{p.value:.6e}" for p in basis.pairs)
            print(f"{expr.value}/{kind.key}: {values}")
    print(f"Model written to {args.out}")
    return 0


def _cmd_classify(args, threads: int) -> int:
    model = load_model(args.model)
    image = read_image(args.image)
    crops = _load_crops(args.crops)
    result = classify(image, crops, model, threads=threads)
    for kind in RegionKind:
        print(format_ed_matrix(result.ed_matrices[kind]))
        print()
    print(format_vote_table(result.votes))
    print()
    print(f"Decided expression: {result.decided.value}")
    return 0


def _cmd_votes(args) -> int:
    fixtures = load_replay_fixtures(args.replay)
    result = classify_replay(fixtures)
    print(format_vote_table(result.votes))
    print()
    print(f"Decided expression: {result.decided.value}")
    return 0


def _cmd_eval(args, threads: int) -> int:
    model = load_model(args.model)
    manifest = load_manifest(args.manifest)
    report = evaluate(model, manifest, threads=threads)
    text = json.dumps(report_to_dict(report), indent=1, allow_nan=False) + "\n"
    _write_text_atomic(args.report, text)
    print(render_report(report))
    print()
    print(f"Report written to {args.report}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="eigenexpr",
        description="Facial expression recognition from region eigen features.",
    )
    sub = parser.add_subparsers(dest="command", required=True, metavar="command")

    p_train = sub.add_parser("train", help="build and save a model from a manifest")
    p_train.add_argument("--manifest", required=True, help="training manifest JSON")
    p_train.add_argument("--out", required=True, help="model file to write")

    p_classify = sub.add_parser("classify", help="classify one image")
    p_classify.add_argument("--model", required=True, help="trained model file")
    p_classify.add_argument("--image", required=True, help="image to classify")
    p_classify.add_argument("--crops", required=True, help="region crops JSON")

    p_votes = sub.add_parser("votes", help="run voting on stored distance grids")
    p_votes.add_argument(
        "--replay", required=True, help="directory of per-region distance grids"
    )

    p_eval = sub.add_parser("eval", help="evaluate a model over a manifest")
    p_eval.add_argument("--model", required=True, help="trained model file")
    p_eval.add_argument("--manifest", required=True, help="evaluation manifest JSON")
    p_eval.add_argument("--report", required=True, help="report JSON to write")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        threads = _threads_from_env()
    except ValueError as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 1
    try:
        if args.command == "train":
            return _cmd_train(args, threads)
        if args.command == "classify":
            return _cmd_classify(args, threads)
        if args.command == "votes":
            return _cmd_votes(args)
        return _cmd_eval(args, threads)
    except (EigenExprError, OSError) as exc:
        print(f"{parser.prog}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
