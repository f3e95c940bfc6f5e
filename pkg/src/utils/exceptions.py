from typing import Optional


class AppError(Exception):
    """Base exception for application errors."""

    def __init__(self, message: str, code: str = "APP_ERROR"):
        self.message = message
        self.code = code
        super().__init__(message)


class ValidationError(AppError):
    """Raised when input validation fails."""

    def __init__(self, message: str, code: str = "VALIDATION_ERROR"):
        super().__init__(message, code=code)


class DimensionMismatchError(ValidationError):
    """Raised when two operands live in spaces of different dimension."""

    def __init__(self, what: str, expected: int, actual: int):
        super().__init__(
            f"{what}: dimension mismatch (expected {expected}, got {actual})",
            code="DIMENSION_MISMATCH",
        )


class DimensionLimitError(ValidationError):
    """Raised when a dense object would exceed the configured MaxDimension."""

    def __init__(self, dim: int, limit: int):
        super().__init__(
            f"Total dimension {dim} exceeds the limit of {limit}",
            code="DIMENSION_LIMIT",
        )


class IndexOutOfRangeError(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, code="INDEX_OUT_OF_RANGE")


class NotHermitianError(ValidationError):
    def __init__(self, what: str, deviation: float, tolerance: float):
        super().__init__(
            f"{what} is not hermitian (max deviation {deviation:.3e} > {tolerance:.1e})",
            code="NOT_HERMITIAN",
        )


class NotNormalizedError(ValidationError):
    def __init__(self, norm_sq: float, tolerance: float):
        super().__init__(
            f"Coefficients are not normalized (sum |C|^2 = {norm_sq!r}, tolerance {tolerance:.1e})",
            code="NOT_NORMALIZED",
        )


class LevelMismatchError(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, code="LEVEL_MISMATCH")


class EmptyPartsError(ValidationError):
    def __init__(self):
        super().__init__("bind requires at least one part", code="EMPTY_PARTS")


class ShapeMismatchError(ValidationError):
    """Raised when hierarchical states of different shapes are compared."""

    def __init__(self, message: str):
        super().__init__(message, code="SHAPE_MISMATCH")


class ParseError(ValidationError):
    """Raised when a JSON document is malformed or violates its schema."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (line {line}, column {column})"
        super().__init__(message, code="PARSE_ERROR")


class MalformedTreeError(ValidationError):
    def __init__(self, message: str):
        super().__init__(message, code="MALFORMED_TREE")


class EmptyRemainderError(ValidationError):
    def __init__(self, cell_count: int):
        super().__init__(
            f"Damage removes all {cell_count} cells; nothing remains to repair",
            code="EMPTY_REMAINDER",
        )


class UnsupportedDepthError(ValidationError):
    def __init__(self, depth: int):
        super().__init__(
            f"Only 3-level organisms can be repaired (got depth {depth})",
            code="UNSUPPORTED_DEPTH",
        )


class InfeasibleRebuildError(AppError):
    """Raised when no assembly of cells contains the organism's target irrep."""

    def __init__(self, message: str):
        super().__init__(message, code="INFEASIBLE_REBUILD")


class NumericFailureError(AppError):
    """Raised when a numeric routine breaks one of its own postconditions."""

    def __init__(self, message: str):
        super().__init__(message, code="NUMERIC_FAILURE")
