"""
Hierarchical wave functions: a tree with one wave-function slot per entity
per level. The slot of a whole is independent information, not something
derived from its parts, so binding parts leaves the new slot empty.

Trees are immutable. Numeric comparison of two trees is only defined when
their shapes (labels, levels, occupied slots and slot dimensions) agree.
"""

from dataclasses import dataclass, field, replace
from typing import Iterator, Optional, Sequence
import logging
import math

import numpy as np

from src.service.documents import (
    TreeDocument,
    dumps_canonical,
    parse_document,
    vector_from_json,
    vector_to_json,
)
from src.service.hilbert import StateVector
from src.service.repgroup import IrrepLabel, RepLike, as_irrep, contains
from src.utils.exceptions import (
    EmptyPartsError,
    LevelMismatchError,
    ShapeMismatchError,
    ValidationError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class HierNode:
    label: str
    level: int
    rep: IrrepLabel
    state: Optional[StateVector] = None
    children: tuple["HierNode", ...] = field(default_factory=tuple)

    def __post_init__(self):
        if self.level < 0:
            raise ValidationError(f"Node '{self.label}' has negative level {self.level}")
        object.__setattr__(self, "rep", as_irrep(self.rep))
        object.__setattr__(self, "children", tuple(self.children))

    @property
    def two_j(self) -> int:
        return self.rep.two_j

    def is_leaf(self) -> bool:
        return not self.children


@dataclass(frozen=True)
class TreeShape:
    """States-erased skeleton: label, level, slot occupancy and slot dimension."""

    label: str
    level: int
    state_dim: Optional[int]
    children: tuple["TreeShape", ...]


@dataclass(frozen=True)
class Violation:
    path: str
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def valid(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {
            "valid": self.valid,
            "violations": [{"path": v.path, "message": v.message} for v in self.violations],
        }


# ---------------------------------------------------------------------------
# Traversal helpers
# ---------------------------------------------------------------------------


def iter_nodes(root: HierNode, path: Optional[str] = None) -> Iterator[tuple[str, HierNode]]:
    """Pre-order (path, node) pairs; paths join labels with '/'."""
    here = path if path is not None else root.label
    yield here, root
    for child in root.children:
        yield from iter_nodes(child, f"{here}/{child.label}")


def depth(root: HierNode) -> int:
    """Number of levels below and including root."""
    if not root.children:
        return 1
    return 1 + max(depth(c) for c in root.children)


def leaves(root: HierNode) -> list[HierNode]:
    return [n for _, n in iter_nodes(root) if n.is_leaf()]


def without_states(root: HierNode) -> HierNode:
    return replace(root, state=None, children=tuple(without_states(c) for c in root.children))


def tree_shape(root: HierNode) -> TreeShape:
    return TreeShape(
        label=root.label,
        level=root.level,
        state_dim=root.state.dim if root.state is not None else None,
        children=tuple(tree_shape(c) for c in root.children),
    )


# ---------------------------------------------------------------------------
# validate / bind
# ---------------------------------------------------------------------------


def validate(root: HierNode, check_consistency: bool = False) -> ValidationReport:
    """Collect every violated tree invariant. An empty report means the tree is valid."""
    violations: list[Violation] = []
    for path, node in iter_nodes(root):
        if not node.label:
            violations.append(Violation(path, "empty label"))
        seen: set[str] = set()
        for child in node.children:
            if child.level != node.level + 1:
                violations.append(
                    Violation(
                        f"{path}/{child.label}",
                        f"level step ≠ 1 (parent level {node.level}, child level {child.level})",
                    )
                )
            if child.label in seen:
                violations.append(Violation(path, f"duplicate child label '{child.label}'"))
            seen.add(child.label)
        if check_consistency and node.children:
            reps = [c.rep for c in node.children]
            if contains(reps, node.rep) == 0:
                violations.append(
                    Violation(
                        path,
                        f"two_j={node.two_j} is not contained in the product of child reps "
                        f"{[r.two_j for r in reps]}",
                    )
                )
    return ValidationReport(tuple(violations))


def bind(parts: Sequence[HierNode], new_label: str, new_rep: RepLike) -> HierNode:
    """Form a new whole one level above the parts; its own slot starts empty."""
    if not parts:
        raise EmptyPartsError()
    levels = {p.level for p in parts}
    if len(levels) > 1:
        raise LevelMismatchError(f"Parts sit at different levels {sorted(levels)}")
    level = levels.pop()
    if level < 1:
        raise LevelMismatchError("Parts at level 0 have no level above them to bind into")
    logger.debug("bind %d parts at level %d into '%s'", len(parts), level, new_label)
    return HierNode(label=new_label, level=level - 1, rep=as_irrep(new_rep), state=None, children=tuple(parts))


# ---------------------------------------------------------------------------
# Cross-tree comparison (shape gated)
# ---------------------------------------------------------------------------


def _require_same_shape(a: HierNode, b: HierNode) -> None:
    if tree_shape(a) != tree_shape(b):
        raise ShapeMismatchError(
            f"Trees '{a.label}' and '{b.label}' have different shapes; "
            "their states live in different functional spaces"
        )


def _paired_states(a: HierNode, b: HierNode) -> Iterator[tuple[StateVector, StateVector]]:
    if a.state is not None:
        yield a.state, b.state
    for ca, cb in zip(a.children, b.children):
        yield from _paired_states(ca, cb)


def tree_inner_product(a: HierNode, b: HierNode) -> complex:
    """Sum of slot-wise <a|b> over all occupied slots."""
    _require_same_shape(a, b)
    return complex(sum(np.vdot(sa.amps, sb.amps) for sa, sb in _paired_states(a, b)))


def tree_distance(a: HierNode, b: HierNode) -> float:
    _require_same_shape(a, b)
    total = sum(float(np.sum(np.abs(sa.amps - sb.amps) ** 2)) for sa, sb in _paired_states(a, b))
    return math.sqrt(total)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def tree_to_dict(root: HierNode) -> dict:
    return {
        "label": root.label,
        "level": root.level,
        "two_j": root.two_j,
        "state": vector_to_json(root.state.amps) if root.state is not None else None,
        "children": [tree_to_dict(c) for c in root.children],
    }


def tree_from_document(doc: TreeDocument) -> HierNode:
    return HierNode(
        label=doc.label,
        level=doc.level,
        rep=IrrepLabel(doc.two_j),
        state=StateVector(vector_from_json(doc.state)) if doc.state is not None else None,
        children=tuple(tree_from_document(c) for c in doc.children),
    )


def serialize(root: HierNode) -> str:
    return dumps_canonical(tree_to_dict(root))


def deserialize(text: str) -> HierNode:
    return tree_from_document(parse_document(text, TreeDocument))
