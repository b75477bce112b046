"""Dense real-matrix numerics: means, centering, covariance, symmetric eigendecomposition.

Matrices are 2-D float64 numpy arrays (rows are observations, columns are
variables); vectors are 1-D float64 arrays.  All functions are pure: inputs
are never mutated and identical input bits always produce identical output
bits, which the rest of the pipeline relies on for reproducible models.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from .errors import DegenerateSampleError, ParameterError, ShapeError

# Stop sweeping once the off-diagonal Frobenius norm has dropped by this
# factor relative to the starting matrix.
_JACOBI_RELATIVE_TOL = 1e-12
_JACOBI_MAX_SWEEPS = 100
# Rounding floor: below ~machine epsilon times the matrix scale no further
# off-diagonal reduction is possible, so treat the matrix as diagonalized.
_JACOBI_ABS_FLOOR = 5e-16

_SYMMETRY_RTOL = 1e-8

_UNIT_NORM_TOL = 1e-10


def as_matrix(m) -> np.ndarray:
    """Validate and convert an array-like into a 2-D float64 matrix.

    Raises ShapeError for empty or non-2-D input and for NaN/infinity entries.
    """
    a = np.asarray(m, dtype=np.float64)
    if a.ndim != 2:
        raise ShapeError(f"expected a 2-D matrix, got {a.ndim}-D data")
    if a.size == 0:
        raise ShapeError(f"matrix must be non-empty, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ShapeError("matrix contains NaN or infinite entries")
    return a


def as_vector(v) -> np.ndarray:
    """Validate and convert an array-like into a 1-D float64 vector."""
    a = np.asarray(v, dtype=np.float64)
    if a.ndim != 1:
        raise ShapeError(f"expected a 1-D vector, got {a.ndim}-D data")
    if not np.all(np.isfinite(a)):
        raise ShapeError("vector contains NaN or infinite entries")
    return a


@dataclass(frozen=True, eq=False)
class EigenPair:
    """One eigenvalue with its unit, sign-normalized eigenvector.

    The sign convention (component of largest absolute magnitude is
    non-negative, first such index winning ties) removes the inherent
    sign ambiguity so that Euclidean distances between eigenvectors
    are well defined.
    """

    value: float
    vector: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, EigenPair):
            return NotImplemented
        return self.value == other.value and np.array_equal(self.vector, other.vector)

    def __post_init__(self):
        vec = as_vector(self.vector)
        if not math.isfinite(self.value):
            raise ShapeError("eigenvalue must be finite")
        norm = float(np.linalg.norm(vec))
        if abs(norm - 1.0) > _UNIT_NORM_TOL:
            raise ShapeError(f"eigenvector norm {norm!r} is not 1 within {_UNIT_NORM_TOL}")
        peak = int(np.argmax(np.abs(vec)))
        if vec[peak] < 0.0:
            raise ShapeError("eigenvector violates the sign convention (dominant component negative)")
        vec = vec.copy()
        vec.flags.writeable = False
        object.__setattr__(self, "vector", vec)


def normalize_sign(v: np.ndarray) -> np.ndarray:
    """Return v or -v so the component of largest magnitude is non-negative.

    Ties in magnitude are broken by the lowest index.
    """
    vec = as_vector(v)
    peak = int(np.argmax(np.abs(vec)))
    if vec[peak] < 0.0:
        return -vec
    return vec.copy()


def column_mean(m) -> np.ndarray:
    """Per-column arithmetic mean; result has one entry per column."""
    a = as_matrix(m)
    return a.sum(axis=0) / a.shape[0]


def center(m) -> np.ndarray:
    """Subtract each column's mean from that column."""
    a = as_matrix(m)
    return a - column_mean(a)


def covariance(m) -> np.ndarray:
    """Sample covariance of the columns (denominator rows - 1).

    Result is cols x cols, exactly symmetric, and positive semidefinite
    up to rounding.  Requires at least two rows.
    """
    a = as_matrix(m)
    rows = a.shape[0]
    if rows < 2:
        raise DegenerateSampleError(
            f"covariance needs at least 2 rows of observations, got {rows}"
        )
    centered = a - a.sum(axis=0) / rows
    cov = centered.T @ centered / (rows - 1)
    # Enforce bitwise symmetry against any BLAS summation-order effects.
    return (cov + cov.T) * 0.5


@numba.njit(cache=True, nogil=True)
def _jacobi_kernel(a, v, rel_tol, abs_floor, max_sweeps):  # pragma: no cover
    """Cyclic-by-rows Jacobi sweeps, in place on ``a`` and ``v``."""
    n = a.shape[0]
    total = 0.0
    off2 = 0.0
    for i in range(n):
        for j in range(n):
            x = a[i, j] * a[i, j]
            total += x
            if i != j:
                off2 += x
    if off2 == 0.0:
        return
    tol = np.sqrt(off2) * rel_tol
    floor = np.sqrt(total) * abs_floor
    if floor > tol:
        tol = floor
    for _ in range(max_sweeps):
        # Off-diagonal Frobenius norm, summed directly: subtracting the
        # diagonal from the full norm would cancel catastrophically once
        # the off-diagonal part is small.
        off2 = 0.0
        for i in range(n - 1):
            for j in range(i + 1, n):
                off2 += a[i, j] * a[i, j]
        if np.sqrt(2.0 * off2) <= tol:
            return
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                # Smaller-magnitude root of t^2 + 2t*tau - 1 = 0 keeps the
                # rotation angle within +-pi/4; for huge tau it underflows
                # to an identity rotation, which is the correct limit.
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (np.sqrt(1.0 + tau * tau) - tau)
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                for j in range(n):
                    rp = a[p, j]
                    rq = a[q, j]
                    a[p, j] = c * rp - s * rq
                    a[q, j] = s * rp + c * rq
                for j in range(n):
                    cp = a[j, p]
                    cq = a[j, q]
                    a[j, p] = c * cp - s * cq
                    a[j, q] = s * cp + c * cq
                # Analytically exact zeros for the rotated pair.
                a[p, q] = 0.0
                a[q, p] = 0.0
                for j in range(n):
                    vp = v[j, p]
                    vq = v[j, q]
                    v[j, p] = c * vp - s * vq
                    v[j, q] = s * vp + c * vq


# Compile at import so the first decomposition is not billed the JIT cost;
# the on-disk cache makes later imports cheap.
_jacobi_kernel(
    np.array([[2.0, 1.0], [1.0, 2.0]]),
    np.eye(2),
    _JACOBI_RELATIVE_TOL,
    _JACOBI_ABS_FLOOR,
    _JACOBI_MAX_SWEEPS,
)


def _jacobi(a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Diagonalize a symmetric matrix by cyclic Jacobi rotations.

    Sweeps all (p, q) pairs in fixed row-cyclic order, zeroing each
    off-diagonal entry with a Givens rotation, until the off-diagonal
    Frobenius norm falls to 1e-12 of its initial value (or to the rounding
    floor), capped at 100 sweeps.  Mutates ``a``; returns (eigenvalues,
    eigenvector-columns), unsorted.
    """
    v = np.eye(a.shape[0])
    _jacobi_kernel(a, v, _JACOBI_RELATIVE_TOL, _JACOBI_ABS_FLOOR, _JACOBI_MAX_SWEEPS)
    return np.diagonal(a).copy(), v


def eigen_symmetric(c) -> list[EigenPair]:
    """All eigenpairs of a symmetric matrix, eigenvalue-descending.

    The input must be square and symmetric within 1e-8 relative tolerance.
    Eigenvalue ties are broken by the sign-normalized lexicographic order of
    the eigenvectors, and every vector follows the EigenPair sign convention,
    making the decomposition a deterministic pure function.
    """
    a = as_matrix(c)
    n, ncols = a.shape
    if n != ncols:
        raise ShapeError(f"eigendecomposition needs a square matrix, got {n}x{ncols}")
    frob = float(np.linalg.norm(a))
    asym = float(np.linalg.norm(a - a.T))
    if frob > 0.0 and asym > _SYMMETRY_RTOL * frob:
        raise ShapeError(
            f"matrix is asymmetric beyond tolerance (relative asymmetry {asym / frob:.3e})"
        )
    work = (a + a.T) * 0.5
    values, vectors = _jacobi(work)
    # Defensive renormalization (rotations keep columns orthonormal to
    # round-off) plus the sign convention, applied to all columns at once.
    norms = np.linalg.norm(vectors, axis=0)
    np.divide(vectors, norms, out=vectors, where=norms > 0.0)
    peaks = np.argmax(np.abs(vectors), axis=0)
    flips = np.where(vectors[peaks, np.arange(n)] < 0.0, -1.0, 1.0)
    vectors *= flips
    order = list(np.argsort(-values, kind="stable"))
    # Lexicographic tie-break only where eigenvalues are exactly equal;
    # the stable argsort already fixes every other position.
    run = 0
    while run < n:
        end = run + 1
        while end < n and values[order[end]] == values[order[run]]:
            end += 1
        if end - run > 1:
            order[run:end] = sorted(order[run:end], key=lambda i: tuple(vectors[:, i]))
        run = end
    return [EigenPair(value=float(values[i]), vector=vectors[:, i]) for i in order]


def top_k(pairs: list[EigenPair], k: int) -> list[EigenPair]:
    """First min(k, len) pairs of an eigenvalue-descending list.

    A result shorter than k signals degenerate rank to the caller.
    """
    if k <= 0:
        raise ParameterError(f"k must be a positive integer, got {k}")
    return list(pairs[:k])
