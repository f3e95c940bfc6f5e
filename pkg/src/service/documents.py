"""
JSON documents exchanged by the CLI and the golden files.

Every model forbids unknown fields and non-finite numbers. Complex numbers
travel as [re, im] pairs. Canonical text is json.dumps(indent=2) with a
trailing newline; floats use Python's shortest round-trip repr and -0.0 is
written as 0.0.
"""

from typing import Any, Optional, Sequence, Type, TypeVar
import json

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, StrictFloat, StrictInt, StrictStr
from pydantic import ValidationError as PydanticValidationError

from src.service.util import clean_zero
from src.utils.exceptions import ParseError

ComplexPair = tuple[StrictFloat, StrictFloat]
Vector = list[ComplexPair]
Matrix = list[list[ComplexPair]]

DocT = TypeVar("DocT", bound=BaseModel)


class StrictDocument(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class TreeDocument(StrictDocument):
    label: StrictStr
    level: StrictInt = Field(ge=0)
    two_j: StrictInt = Field(ge=0)
    state: Optional[Vector] = None
    children: list["TreeDocument"] = Field(default_factory=list)


TreeDocument.model_rebuild()


class JointCoefficientsDocument(StrictDocument):
    macro_dim: StrictInt = Field(ge=1)
    micro_dims: list[StrictInt] = Field(min_length=1)
    coeffs: Vector


class OperatorDocument(StrictDocument):
    """Square matrix as a list of rows; also used for density matrices."""

    dim: StrictInt = Field(ge=1)
    entries: Matrix


class MacroOperatorDocument(StrictDocument):
    macro_dim: StrictInt = Field(ge=1)
    dim: StrictInt = Field(ge=1)
    blocks: list[Matrix]


class LeafLayerDocument(StrictDocument):
    leaves: list[Vector] = Field(min_length=1)


class HaarTreeDocument(StrictDocument):
    dim: StrictInt = Field(ge=1)
    phi: Vector
    psi: list[list[Vector]] = Field(default_factory=list)


class ScenarioDocument(StrictDocument):
    organism: TreeDocument
    target: StrictInt = Field(ge=0)
    cell_count: Optional[StrictInt] = Field(default=None, ge=1)
    remove: list[StrictInt] = Field(default_factory=list)


# ---------------------------------------------------------------------------
# Parsing / writing
# ---------------------------------------------------------------------------


def parse_document(text: str, model: Type[DocT]) -> DocT:
    """Parse JSON text into a strict document model.

    Syntax errors carry line/column; schema errors name the offending field.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"Invalid JSON: {exc.msg}", line=exc.lineno, column=exc.colno)
    try:
        return model.model_validate(raw)
    except PydanticValidationError as exc:
        first = exc.errors()[0]
        loc = ".".join(str(p) for p in first["loc"]) or "<root>"
        raise ParseError(f"{model.__name__} field '{loc}': {first['msg']}")


def dumps_canonical(obj: Any) -> str:
    return json.dumps(obj, indent=2, ensure_ascii=False) + "\n"


def vector_to_json(amps: np.ndarray) -> Vector:
    return [[clean_zero(z.real), clean_zero(z.imag)] for z in np.asarray(amps, dtype=np.complex128)]


def vector_from_json(pairs: Sequence[ComplexPair]) -> np.ndarray:
    return np.array([complex(re, im) for re, im in pairs], dtype=np.complex128)


def matrix_to_json(matrix: np.ndarray) -> Matrix:
    return [vector_to_json(row) for row in np.asarray(matrix, dtype=np.complex128)]


def matrix_from_json(rows: Sequence[Sequence[ComplexPair]]) -> np.ndarray:
    if not rows:
        raise ParseError("Matrix has no rows")
    width = len(rows[0])
    if any(len(r) != width for r in rows):
        raise ParseError("Matrix rows have unequal lengths")
    return np.array([[complex(re, im) for re, im in row] for row in rows], dtype=np.complex128)
