"""
Density service: micro/macro joint states and the density matrices built from them.

A joint state is sum_j sum_i C^j_{i1..ik} |phi_i1> ... |phi_ik> |theta_j> with
orthonormal macrolevel states |theta_j>. The flattened joint vector puts the
macro index first (most significant), so the full-state form of a micro
observable A is I_macro (x) A.

Density convention: rho[i, i'] = sum_j C^j_i * conj(C^j_i'), i.e. the row
index carries the un-conjugated coefficient.
"""

from dataclasses import dataclass
from math import prod
from typing import Optional, Sequence
import logging

import numpy as np

from src.service.hilbert import Operator, eig_hermitian, hermitian_deviation
from src.service.util import max_dimension, resolve_tolerance
from src.utils.exceptions import (
    DimensionLimitError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    NotHermitianError,
    NotNormalizedError,
    NumericFailureError,
    ValidationError,
)

logger = logging.getLogger(__name__)


def _freeze(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=np.complex128)
    if not np.all(np.isfinite(arr)):
        raise ValidationError("Array contains NaN or Inf")
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class JointCoefficients:
    """C^j_{i1..ik}; coeffs may be given flat (macro index most significant) or shaped (M, d1..dk)."""

    macro_dim: int
    micro_dims: tuple[int, ...]
    coeffs: np.ndarray

    def __post_init__(self):
        dims = tuple(int(d) for d in self.micro_dims)
        if self.macro_dim < 1:
            raise ValidationError(f"macro_dim must be >= 1, got {self.macro_dim}")
        if not dims or any(d < 1 for d in dims):
            raise ValidationError(f"micro_dims must be a non-empty list of positive integers, got {dims}")
        total = self.macro_dim * prod(dims)
        if total > max_dimension():
            raise DimensionLimitError(total, max_dimension())
        arr = np.asarray(self.coeffs, dtype=np.complex128)
        if arr.size != total:
            raise DimensionMismatchError("JointCoefficients.coeffs", total, arr.size)
        object.__setattr__(self, "micro_dims", dims)
        object.__setattr__(self, "coeffs", _freeze(arr.reshape((self.macro_dim, *dims))))

    @property
    def micro_dim(self) -> int:
        return prod(self.micro_dims)

    @property
    def k(self) -> int:
        return len(self.micro_dims)

    def macro_slices(self) -> np.ndarray:
        """(M, D) matrix whose row j is the micro vector c_j."""
        return self.coeffs.reshape(self.macro_dim, self.micro_dim)

    def flattened(self) -> np.ndarray:
        """Joint state vector of length M*D, macro index most significant."""
        return self.coeffs.reshape(-1)

    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.coeffs) ** 2))


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    entries: np.ndarray

    def __post_init__(self):
        arr = _freeze(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1] or arr.shape[0] == 0:
            raise ValidationError(f"DensityMatrix must be a non-empty square matrix, got shape {arr.shape}")
        object.__setattr__(self, "entries", arr)

    @property
    def dim(self) -> int:
        return int(self.entries.shape[0])

    def trace(self) -> complex:
        return complex(np.trace(self.entries))


@dataclass(frozen=True, eq=False)
class MacroConditionedOperator:
    """Micro-level blocks B^m, one per macrolevel state |theta_m>."""

    blocks: np.ndarray
    observable: bool = True

    def __post_init__(self):
        arr = _freeze(self.blocks)
        if arr.ndim != 3 or arr.shape[1] != arr.shape[2] or arr.shape[0] == 0:
            raise ValidationError(f"Blocks must have shape (M, D, D), got {arr.shape}")
        object.__setattr__(self, "blocks", arr)

    @property
    def macro_dim(self) -> int:
        return int(self.blocks.shape[0])

    @property
    def dim(self) -> int:
        return int(self.blocks.shape[1])

    @classmethod
    def uniform(cls, op: Operator, macro_dim: int) -> "MacroConditionedOperator":
        """Same block for every macro state: the unconditioned observable."""
        return cls(np.repeat(op.matrix[np.newaxis, :, :], macro_dim, axis=0))


@dataclass(frozen=True)
class DensitySpectrum:
    """Occupation probabilities (descending) and eigenvectors as columns."""

    weights: np.ndarray
    vectors: np.ndarray

    def purity(self) -> float:
        return float(np.sum(self.weights ** 2))

    def entropy(self) -> float:
        w = self.weights[self.weights > 0]
        return float(-np.sum(w * np.log(w)))


def _canonical_phase(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real and positive."""
    out = np.array(vectors, dtype=np.complex128)
    for col in range(out.shape[1]):
        pivot = out[int(np.argmax(np.abs(out[:, col]))), col]
        if abs(pivot) > 0:
            out[:, col] *= np.conj(pivot) / abs(pivot)
    return out


class DensityService:
    """Builds and analyses density matrices of micro/macro joint states."""

    def __init__(self, tolerance: Optional[float] = None):
        self._tolerance = resolve_tolerance(tolerance)

    @property
    def tolerance(self) -> float:
        return self._tolerance

    def _check_normalized(self, c: JointCoefficients) -> None:
        norm_sq = c.norm_sq()
        if abs(norm_sq - 1.0) > self._tolerance:
            raise NotNormalizedError(norm_sq, self._tolerance)

    def _check_observable(self, matrix: np.ndarray, what: str) -> None:
        deviation = hermitian_deviation(matrix)
        if deviation > self._tolerance:
            raise NotHermitianError(what, deviation, self._tolerance)

    def _real_part(self, value: complex, scale: float, what: str) -> float:
        if abs(value.imag) > self._tolerance * max(1.0, scale):
            raise NumericFailureError(f"{what} has imaginary residue {value.imag:.3e}")
        return float(value.real)

    def as_density(self, matrix: np.ndarray) -> DensityMatrix:
        """Wrap a matrix read from outside; it must be hermitian within tolerance."""
        matrix = np.asarray(matrix)
        self._check_observable(matrix, "Density matrix")
        return DensityMatrix(matrix)

    def check_density(self, rho: DensityMatrix) -> None:
        """Raise NumericFailureError unless rho is hermitian, unit-trace and PSD within tolerance."""
        deviation = hermitian_deviation(rho.entries)
        if deviation > self._tolerance:
            raise NumericFailureError(f"Density matrix not hermitian (deviation {deviation:.3e})")
        trace = rho.trace()
        if abs(trace - 1.0) > self._tolerance:
            raise NumericFailureError(f"Density matrix trace {trace!r} differs from 1")
        lowest = float(np.linalg.eigvalsh(rho.entries)[0])
        if lowest < -self._tolerance:
            raise NumericFailureError(f"Density matrix has negative eigenvalue {lowest:.3e}")

    def build_density(self, c: JointCoefficients) -> DensityMatrix:
        self._check_normalized(c)
        slices = c.macro_slices()
        rho = slices.T @ slices.conj()
        # symmetrize so hermiticity holds exactly
        rho = (rho + rho.conj().T) / 2
        logger.debug("build_density M=%d D=%d", c.macro_dim, c.micro_dim)
        return DensityMatrix(rho)

    def expectation(self, c: JointCoefficients, a: Operator) -> float:
        """<A> = Sp(rho A) for an observable acting on the whole microlevel."""
        if a.dim != c.micro_dim:
            raise DimensionMismatchError("expectation operator", c.micro_dim, a.dim)
        self._check_observable(a.matrix, "Observable")
        rho = self.build_density(c)
        value = complex(np.trace(rho.entries @ a.matrix))
        return self._real_part(value, float(np.max(np.abs(a.matrix))), "Expectation value")

    def reduce(self, c: JointCoefficients, s: int) -> DensityMatrix:
        """Density matrix of micro factor s (1-based), averaged over the macro index and all other factors."""
        if not 1 <= s <= c.k:
            raise IndexOutOfRangeError(f"Subsystem {s} outside [1, {c.k}]")
        self._check_normalized(c)
        # axis 0 of coeffs is the macro index, so factor s sits on axis s
        moved = np.moveaxis(c.coeffs, s, 0).reshape(c.micro_dims[s - 1], -1)
        rho = moved @ moved.conj().T
        rho = (rho + rho.conj().T) / 2
        return DensityMatrix(rho)

    def diagonalize(self, rho: DensityMatrix) -> DensitySpectrum:
        """Eigen-weights in descending order; tiny negative weights are clamped to 0."""
        eig = eig_hermitian(Operator(rho.entries), tolerance=self._tolerance)
        weights = np.array(eig.values[::-1], dtype=float)
        vectors = _canonical_phase(eig.vectors[:, ::-1])
        if weights[-1] < -self._tolerance:
            raise NumericFailureError(f"Density matrix has negative weight {weights[-1]:.3e}")
        if np.any(weights < 0):
            logger.warning("Clamping %d negative weight(s) to 0", int(np.sum(weights < 0)))
            weights = np.where(weights < 0, 0.0, weights)
        total = float(np.sum(weights))
        if abs(total - 1.0) > self._tolerance:
            raise NumericFailureError(f"Weights sum to {total!r}, not 1")
        return DensitySpectrum(weights=weights, vectors=vectors)

    def macro_expectation(self, c: JointCoefficients, b: MacroConditionedOperator) -> float:
        """<B> = sum_j sum_{i,i'} conj(C^j_i) B^j_{i i'} C^j_i'."""
        if b.macro_dim != c.macro_dim:
            raise DimensionMismatchError("macro-conditioned operator macro_dim", c.macro_dim, b.macro_dim)
        if b.dim != c.micro_dim:
            raise DimensionMismatchError("macro-conditioned operator block", c.micro_dim, b.dim)
        if b.observable:
            for m, block in enumerate(b.blocks):
                self._check_observable(block, f"Block B^{m}")
        self._check_normalized(c)
        slices = c.macro_slices()
        value = complex(np.einsum("ji,jik,jk->", slices.conj(), b.blocks, slices))
        return self._real_part(value, float(np.max(np.abs(b.blocks))), "Macro-conditioned expectation")

    def purity(self, rho: DensityMatrix) -> float:
        return float(np.real(np.trace(rho.entries @ rho.entries)))

    def entropy(self, rho: DensityMatrix) -> float:
        return self.diagonalize(rho).entropy()


def joint_coefficients(macro_dim: int, micro_dims: Sequence[int], coeffs) -> JointCoefficients:
    return JointCoefficients(macro_dim=int(macro_dim), micro_dims=tuple(micro_dims), coeffs=np.asarray(coeffs))
