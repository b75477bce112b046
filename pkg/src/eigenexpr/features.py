"""Feature extraction: the five dominant eigenpairs of a region image.

A region's feature is the eigen subspace of its column covariance: five
eigenvectors, eigenvalue-descending, each as long as the region is wide.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateRankError, ParameterError, ShapeError
from .imaging import GrayImage, RegionKind, region_to_matrix
from .linalg import EigenPair, covariance, eigen_symmetric, top_k

NUM_EIGENVECTORS = 5

# Eigenvalues of a covariance matrix may dip below zero only by rounding.
_MIN_EIGENVALUE = -1e-10
_ORTHO_TOL = 1e-8
# Relative floor under which the fifth eigenvalue counts as rank-deficient.
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class EigenBasis:
    """Five dominant eigenpairs of one region's covariance, eigenvalue-descending."""

    region: RegionKind
    pairs: tuple[EigenPair, ...]

    def __post_init__(self):
        if not isinstance(self.region, RegionKind):
            raise ParameterError(f"region must be a RegionKind, got {self.region!r}")
        pairs = tuple(self.pairs)
        if len(pairs) != NUM_EIGENVECTORS:
            raise ShapeError(f"a basis holds exactly {NUM_EIGENVECTORS} pairs, got {len(pairs)}")
        for pair in pairs:
            if not isinstance(pair, EigenPair):
                raise ParameterError(f"pairs must be EigenPair values, got {pair!r}")
            if len(pair.vector) != self.region.cols:
                raise ShapeError(
                    f"{self.region.key} eigenvectors must have length "
                    f"{self.region.cols}, got {len(pair.vector)}"
                )
            if pair.value < _MIN_EIGENVALUE:
                raise ShapeError(
                    f"eigenvalue {pair.value!r} is negative beyond rounding tolerance"
                )
        for i in range(len(pairs)):
            if i > 0 and pairs[i].value > pairs[i - 1].value:
                raise ShapeError("eigenvalues must be non-increasing")
            for j in range(i + 1, len(pairs)):
                dot = abs(float(np.dot(pairs[i].vector, pairs[j].vector)))
                if dot > _ORTHO_TOL:
                    raise ShapeError(
                        f"eigenvectors {i} and {j} are not orthogonal (|dot| = {dot:.3e})"
                    )
        object.__setattr__(self, "pairs", pairs)

    @property
    def vectors(self) -> np.ndarray:
        """The five eigenvectors as rows of a 5 x cols matrix."""
        return np.stack([pair.vector for pair in self.pairs])


def extract_basis(region_img: GrayImage, kind: RegionKind) -> EigenBasis:
    """Extract the five dominant eigenpairs of a canonical region image.

    The image must already have the region's canonical dimensions.  Raises
    DegenerateRankError when the covariance has fewer than five meaningfully
    positive eigenvalues (a constant or near-constant region).
    """
    if not isinstance(region_img, GrayImage):
        raise ParameterError(f"region_img must be a GrayImage, got {region_img!r}")
    if not isinstance(kind, RegionKind):
        raise ParameterError(f"kind must be a RegionKind, got {kind!r}")
    if region_img.height != kind.rows or region_img.width != kind.cols:
        raise ShapeError(
            f"{kind.key} region must be {kind.rows}x{kind.cols}, "
            f"got {region_img.height}x{region_img.width}"
        )
    cov = covariance(region_to_matrix(region_img))
    pairs = top_k(eigen_symmetric(cov), NUM_EIGENVECTORS)
    if len(pairs) < NUM_EIGENVECTORS:
        raise DegenerateRankError(
            f"{kind.key} region covariance is only {len(pairs)}x{len(pairs)}"
        )
    floor = _RANK_TOL * max(1.0, pairs[0].value)
    if pairs[-1].value <= floor:
        raise DegenerateRankError(
            f"{kind.key} region covariance has rank below {NUM_EIGENVECTORS}: "
            f"eigenvalue {NUM_EIGENVECTORS} is {pairs[-1].value:.3e}"
        )
    return EigenBasis(region=kind, pairs=tuple(pairs))
