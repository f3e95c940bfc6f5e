"""Shared plumbing for CLI commands: run config, input/output, exit codes."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Type
import sys

import numpy as np

from src.service.documents import DocT, OperatorDocument, dumps_canonical, matrix_from_json, parse_document
from src.service.hilbert import Operator
from src.utils.exceptions import (
    AppError,
    DimensionMismatchError,
    InfeasibleRebuildError,
    NumericFailureError,
    ValidationError,
)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_INFEASIBLE = 2
EXIT_NUMERIC = 3


@dataclass(frozen=True)
class ScenarioConfig:
    """One CLI invocation: which operation, on which files, at which tolerance."""

    operation: str
    inputs: tuple[Path, ...] = ()
    tolerance: Optional[float] = None
    output: Optional[Path] = None
    output_dir: Optional[Path] = None
    seed: Optional[int] = None
    options: dict[str, Any] = field(default_factory=dict)

    @property
    def input(self) -> Path:
        if len(self.inputs) != 1:
            raise ValidationError(f"'{self.operation}' takes exactly one input file")
        return self.inputs[0]


@dataclass(frozen=True)
class CommandResult:
    payload: Any
    exit_code: int = EXIT_OK


def exit_code_for(exc: AppError) -> int:
    if isinstance(exc, InfeasibleRebuildError):
        return EXIT_INFEASIBLE
    if isinstance(exc, NumericFailureError):
        return EXIT_NUMERIC
    return EXIT_INVALID


def read_text(path: Path) -> str:
    """Read an input file; '-' reads stdin."""
    if str(path) == "-":
        return sys.stdin.read()
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"Cannot read '{path}': {exc.strerror}")


def read_document(path: Path, model: Type[DocT]) -> DocT:
    return parse_document(read_text(path), model)


def write_text(text: str, path: Optional[Path]) -> None:
    if path is None or str(path) == "-":
        sys.stdout.write(text)
        return
    try:
        path.write_text(text, encoding="utf-8")
    except OSError as exc:
        raise ValidationError(f"Cannot write '{path}': {exc.strerror}")


def write_json(payload: Any, path: Optional[Path]) -> None:
    write_text(dumps_canonical(payload), path)


def square_from_json(dim: int, rows: Sequence, what: str) -> np.ndarray:
    matrix = matrix_from_json(rows)
    if matrix.shape != (dim, dim):
        bad = matrix.shape[0] if matrix.shape[0] != dim else matrix.shape[1]
        raise DimensionMismatchError(f"{what} entries", dim, bad)
    return matrix


def operator_from_document(doc: OperatorDocument) -> Operator:
    return Operator(square_from_json(doc.dim, doc.entries, "operator"))
