"""eigenexpr: facial expression recognition from eigenvector region features.

The pipeline crops five facial regions from a grayscale image, extracts the
five dominant eigenvectors of each region's column covariance, and decides
one of six basic expressions by minimum-Euclidean-distance voting against
per-expression reference subspaces.
"""

from .classify import (
    ClassificationResult,
    EDMatrix,
    VoteTable,
    aggregate,
    classify,
    classify_bases,
    classify_replay,
    euclidean_distance,
    load_replay_fixtures,
    read_ed_fixture,
    region_ed_matrix,
    region_votes,
)
from .errors import (
    BoundsError,
    CoverageError,
    DegenerateRankError,
    DegenerateSampleError,
    EigenExprError,
    FixtureFormatError,
    ImageFormatError,
    ManifestError,
    ModelFormatError,
    ParameterError,
    ShapeError,
)
from .evaluate import EvalReport, evaluate, render_report, report_from_dict, report_to_dict
from .features import NUM_EIGENVECTORS, EigenBasis, extract_basis
from .imaging import CropRect, GrayImage, RegionKind, RegionSpec, crop, region_to_matrix, resize, to_grayscale
from .image_io import read_gray_text, read_image, write_gray_text
from .linalg import EigenPair, center, column_mean, covariance, eigen_symmetric, normalize_sign, top_k
from .model import (
    EXPRESSIONS,
    MODEL_FORMAT_VERSION,
    Expression,
    ExpressionModel,
    ManifestEntry,
    TrainingManifest,
    load_manifest,
    load_model,
    save_model,
    train,
)

__version__ = "0.1.0"

__all__ = [
    "BoundsError",
    "ClassificationResult",
    "CoverageError",
    "CropRect",
    "DegenerateRankError",
    "DegenerateSampleError",
    "EDMatrix",
    "EXPRESSIONS",
    "EigenBasis",
    "EigenExprError",
    "EigenPair",
    "EvalReport",
    "Expression",
    "ExpressionModel",
    "FixtureFormatError",
    "GrayImage",
    "ImageFormatError",
    "MODEL_FORMAT_VERSION",
    "ManifestEntry",
    "ManifestError",
    "ModelFormatError",
    "NUM_EIGENVECTORS",
    "ParameterError",
    "RegionKind",
    "RegionSpec",
    "ShapeError",
    "TrainingManifest",
    "VoteTable",
    "aggregate",
    "center",
    "classify",
    "classify_bases",
    "classify_replay",
    "column_mean",
    "covariance",
    "crop",
    "eigen_symmetric",
    "euclidean_distance",
    "evaluate",
    "extract_basis",
    "load_manifest",
    "load_model",
    "load_replay_fixtures",
    "normalize_sign",
    "read_ed_fixture",
    "read_gray_text",
    "read_image",
    "region_ed_matrix",
    "region_to_matrix",
    "region_votes",
    "render_report",
    "report_from_dict",
    "report_to_dict",
    "resize",
    "save_model",
    "to_grayscale",
    "top_k",
    "train",
    "write_gray_text",
]
