"""
Dense complex linear algebra shared by every other module: state vectors,
square operators, Kronecker products and mixed-radix multi-indices.

Kronecker ordering: in a (x) b the index of a is the slow (most significant)
index, everywhere in the code base. Multi-indices follow the same rule
(first factor most significant), so flatten_index(dims, idx) addresses the
same amplitude as the flattened tensor product of the factors.
"""

from dataclasses import dataclass, field
from math import prod
from typing import Optional, Sequence, Union
import logging

import numpy as np

from src.service.util import max_dimension, resolve_tolerance
from src.utils.exceptions import (
    DimensionLimitError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    NotHermitianError,
    NumericFailureError,
    ValidationError,
)

logger = logging.getLogger(__name__)


def _check_limit(dim: int) -> None:
    limit = max_dimension()
    if dim > limit:
        raise DimensionLimitError(dim, limit)


def _frozen_array(values, ndim: int, what: str) -> np.ndarray:
    arr = np.array(values, dtype=np.complex128)
    if arr.ndim != ndim:
        raise ValidationError(f"{what} must be {ndim}-dimensional, got shape {arr.shape}")
    if arr.size == 0:
        raise ValidationError(f"{what} must not be empty")
    if not np.all(np.isfinite(arr)):
        raise ValidationError(f"{what} contains NaN or Inf")
    arr.setflags(write=False)
    return arr


def hermitian_deviation(matrix: np.ndarray) -> float:
    """max |M - M^dagger| over all entries."""
    return float(np.max(np.abs(matrix - matrix.conj().T)))


@dataclass(frozen=True, eq=False)
class StateVector:
    """Immutable dense ket. With normalized=True the 2-norm is checked against 1."""

    amps: np.ndarray
    normalized: bool = False

    def __post_init__(self):
        arr = _frozen_array(self.amps, 1, "StateVector")
        _check_limit(arr.size)
        object.__setattr__(self, "amps", arr)
        if self.normalized:
            tol = resolve_tolerance()
            norm = float(np.linalg.norm(arr))
            if abs(norm - 1.0) > tol:
                raise ValidationError(f"StateVector flagged normalized has norm {norm!r}")

    @property
    def dim(self) -> int:
        return int(self.amps.shape[0])

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @classmethod
    def basis(cls, index: int, dim: int) -> "StateVector":
        if not 0 <= index < dim:
            raise IndexOutOfRangeError(f"Basis index {index} outside [0, {dim})")
        amps = np.zeros(dim, dtype=np.complex128)
        amps[index] = 1.0
        return cls(amps, normalized=True)

    @classmethod
    def zeros(cls, dim: int) -> "StateVector":
        return cls(np.zeros(dim, dtype=np.complex128))

    def __eq__(self, other) -> bool:
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.amps.shape == other.amps.shape and bool(np.array_equal(self.amps, other.amps))

    __hash__ = None


@dataclass(frozen=True, eq=False)
class Operator:
    """Immutable dense square matrix. With hermitian=True hermiticity is verified."""

    matrix: np.ndarray
    hermitian: bool = False
    tolerance: Optional[float] = field(default=None, repr=False)

    def __post_init__(self):
        arr = _frozen_array(self.matrix, 2, "Operator")
        if arr.shape[0] != arr.shape[1]:
            raise ValidationError(f"Operator must be square, got shape {arr.shape}")
        _check_limit(arr.shape[0])
        object.__setattr__(self, "matrix", arr)
        if self.hermitian:
            tol = resolve_tolerance(self.tolerance)
            deviation = hermitian_deviation(arr)
            if deviation > tol:
                raise NotHermitianError("Operator", deviation, tol)

    @property
    def dim(self) -> int:
        return int(self.matrix.shape[0])

    @classmethod
    def identity(cls, dim: int) -> "Operator":
        return cls(np.eye(dim, dtype=np.complex128), hermitian=True)

    @classmethod
    def diagonal(cls, values: Sequence[complex]) -> "Operator":
        return cls(np.diag(np.asarray(values, dtype=np.complex128)))

    def is_hermitian(self, tolerance: Optional[float] = None) -> bool:
        return hermitian_deviation(self.matrix) <= resolve_tolerance(tolerance)

    def __eq__(self, other) -> bool:
        if not isinstance(other, Operator):
            return NotImplemented
        return self.matrix.shape == other.matrix.shape and bool(np.array_equal(self.matrix, other.matrix))

    __hash__ = None


@dataclass(frozen=True)
class EigenDecomposition:
    """values ascending; vectors holds the orthonormal eigenvectors as columns."""

    values: np.ndarray
    vectors: np.ndarray


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b>, conjugate-linear in a."""
    if a.dim != b.dim:
        raise DimensionMismatchError("inner_product", a.dim, b.dim)
    return complex(np.vdot(a.amps, b.amps))


def tensor_product(
    a: Union[StateVector, Operator], b: Union[StateVector, Operator]
) -> Union[StateVector, Operator]:
    """Kronecker product; a's index is the most significant one."""
    if isinstance(a, StateVector) and isinstance(b, StateVector):
        return StateVector(np.kron(a.amps, b.amps))
    if isinstance(a, Operator) and isinstance(b, Operator):
        return Operator(np.kron(a.matrix, b.matrix), hermitian=a.hermitian and b.hermitian)
    raise ValidationError(
        f"tensor_product needs two operands of the same kind, got {type(a).__name__} and {type(b).__name__}"
    )


def apply(op: Operator, v: StateVector) -> StateVector:
    if op.dim != v.dim:
        raise DimensionMismatchError("apply", op.dim, v.dim)
    return StateVector(op.matrix @ v.amps)


def eig_hermitian(h: Operator, tolerance: Optional[float] = None) -> EigenDecomposition:
    """Eigendecomposition H = V diag(values) V^dagger of a hermitian operator.

    The input is checked for hermiticity; the reconstruction and the
    orthonormality of V are verified against the tolerance scaled by the
    largest entry of H.
    """
    tol = resolve_tolerance(tolerance)
    deviation = hermitian_deviation(h.matrix)
    if deviation > tol:
        raise NotHermitianError("eig_hermitian input", deviation, tol)
    try:
        values, vectors = np.linalg.eigh(h.matrix)
    except np.linalg.LinAlgError as exc:
        raise NumericFailureError(f"Hermitian eigensolver did not converge: {exc}")

    scale = max(1.0, float(np.max(np.abs(h.matrix))))
    rebuilt = (vectors * values) @ vectors.conj().T
    error = float(np.max(np.abs(rebuilt - h.matrix)))
    ortho = float(np.max(np.abs(vectors.conj().T @ vectors - np.eye(h.dim))))
    logger.debug("eig_hermitian dim=%d reconstruction=%.3e orthogonality=%.3e", h.dim, error, ortho)
    if error > tol * scale or ortho > tol:
        raise NumericFailureError(
            f"Eigendecomposition misses its contract (reconstruction {error:.3e}, orthogonality {ortho:.3e})"
        )
    return EigenDecomposition(values=values, vectors=vectors)


# ---------------------------------------------------------------------------
# Multi-indices
# ---------------------------------------------------------------------------


def _check_dims(dims: Sequence[int]) -> tuple[int, ...]:
    dims = tuple(int(d) for d in dims)
    if not dims:
        raise IndexOutOfRangeError("Multi-index needs at least one factor")
    if any(d < 1 for d in dims):
        raise IndexOutOfRangeError(f"Factor dimensions must be positive, got {dims}")
    return dims


@dataclass(frozen=True)
class MultiIndex:
    dims: tuple[int, ...]
    idx: tuple[int, ...]

    def __post_init__(self):
        dims = _check_dims(self.dims)
        idx = tuple(int(i) for i in self.idx)
        if len(idx) != len(dims):
            raise IndexOutOfRangeError(f"Index {idx} has {len(idx)} components for {len(dims)} factors")
        for pos, (i, d) in enumerate(zip(idx, dims)):
            if not 0 <= i < d:
                raise IndexOutOfRangeError(f"Component {pos} of {idx} outside [0, {d})")
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "idx", idx)


def flatten_index(m: MultiIndex) -> int:
    """Mixed-radix encoding with the first factor most significant."""
    return int(np.ravel_multi_index(m.idx, m.dims))


def unflatten_index(n: int, dims: Sequence[int]) -> MultiIndex:
    dims = _check_dims(dims)
    total = prod(dims)
    if not 0 <= n < total:
        raise IndexOutOfRangeError(f"Flat index {n} outside [0, {total})")
    return MultiIndex(dims=dims, idx=tuple(int(i) for i in np.unravel_index(n, dims)))
