"""
Hierarchical Haar codec for a register of 2^(N-1) leaf states.

Each level pairs sibling vectors u, v into phi = (u+v)/sqrt(2) and
psi = (u-v)/sqrt(2). The phi vectors move up a level, the psi vectors stay.
After N-1 levels the register is held by phi^0, psi^0 and the psi vectors of
every lower level: exactly as many vectors as there were leaves.

The codec is a linear isometry on the stacked amplitudes; individual phi/psi
vectors are not renormalized. Levels are numbered from 0 at the top.
"""

from dataclasses import dataclass
from typing import Sequence
import logging

import numpy as np

from src.service.hier_state import HierNode
from src.service.hilbert import StateVector
from src.service.repgroup import IrrepLabel
from src.utils.exceptions import DimensionMismatchError, MalformedTreeError, ValidationError

logger = logging.getLogger(__name__)

SQRT_HALF = np.sqrt(0.5)


@dataclass(frozen=True)
class LeafLayer:
    leaves: tuple[StateVector, ...]

    def __post_init__(self):
        leaves = tuple(self.leaves)
        count = len(leaves)
        if count == 0 or count & (count - 1):
            raise ValidationError(f"Leaf count must be a power of two, got {count}")
        dims = {leaf.dim for leaf in leaves}
        if len(dims) > 1:
            raise ValidationError(f"Leaves have unequal dimensions {sorted(dims)}")
        object.__setattr__(self, "leaves", leaves)

    @property
    def dim(self) -> int:
        return self.leaves[0].dim

    @property
    def depth(self) -> int:
        """N, with len(leaves) = 2^(N-1)."""
        return len(self.leaves).bit_length()

    def stacked(self) -> np.ndarray:
        return np.stack([leaf.amps for leaf in self.leaves])


@dataclass(frozen=True)
class HaarTree:
    """phi^0 plus the detail vectors psi of every level, level 0 first.

    details[l] holds the 2^l vectors psi^l_1 .. psi^l_{2^l}.
    """

    top: StateVector
    details: tuple[tuple[StateVector, ...], ...] = ()

    def __post_init__(self):
        details = tuple(tuple(level) for level in self.details)
        for index, level in enumerate(details):
            if len(level) != 2 ** index:
                raise MalformedTreeError(f"Level {index} holds {len(level)} detail vectors, expected {2 ** index}")
            for psi in level:
                if psi.dim != self.top.dim:
                    raise MalformedTreeError(
                        f"Detail vector at level {index} has dimension {psi.dim}, expected {self.top.dim}"
                    )
        object.__setattr__(self, "details", details)

    @property
    def dim(self) -> int:
        return self.top.dim

    @property
    def leaf_count(self) -> int:
        return 2 ** len(self.details)

    def independent_vectors(self) -> list[StateVector]:
        """phi^0 followed by every psi, top level first."""
        return [self.top] + [psi for level in self.details for psi in level]

    def approximations(self, level: int) -> list[StateVector]:
        """The phi vectors of the given level, recovered from the levels above it."""
        if not 0 <= level <= len(self.details):
            raise ValidationError(f"Level {level} outside [0, {len(self.details)}]")
        return [StateVector(row) for row in _synthesize(self.top.amps[np.newaxis, :], self.details[:level])]

    def level(self, level: int) -> tuple[list[StateVector], list[StateVector]]:
        """(phi, psi) vectors at a level that has detail vectors."""
        if not 0 <= level < len(self.details):
            raise ValidationError(f"Level {level} outside [0, {len(self.details)})")
        return self.approximations(level), list(self.details[level])


def _synthesize(phis: np.ndarray, details: Sequence[Sequence[StateVector]]) -> np.ndarray:
    for level in details:
        psis = np.stack([psi.amps for psi in level])
        out = np.empty((2 * phis.shape[0], phis.shape[1]), dtype=np.complex128)
        out[0::2] = (phis + psis) * SQRT_HALF
        out[1::2] = (phis - psis) * SQRT_HALF
        phis = out
    return phis


def encode_pair(u: StateVector, v: StateVector) -> tuple[StateVector, StateVector]:
    """phi = (u+v)/sqrt(2), psi = (u-v)/sqrt(2), without renormalization."""
    if u.dim != v.dim:
        raise DimensionMismatchError("encode_pair", u.dim, v.dim)
    return StateVector((u.amps + v.amps) * SQRT_HALF), StateVector((u.amps - v.amps) * SQRT_HALF)


def encode(layer: LeafLayer) -> HaarTree:
    phis = layer.stacked()
    collected: list[tuple[StateVector, ...]] = []
    while phis.shape[0] > 1:
        even, odd = phis[0::2], phis[1::2]
        collected.append(tuple(StateVector(row) for row in (even - odd) * SQRT_HALF))
        phis = (even + odd) * SQRT_HALF
    logger.debug("encode %d leaves of dim %d into %d levels", len(layer.leaves), layer.dim, len(collected))
    # collected runs bottom-up; the tree stores level 0 first
    return HaarTree(top=StateVector(phis[0]), details=tuple(reversed(collected)))


def decode(tree: HaarTree) -> LeafLayer:
    if not isinstance(tree, HaarTree):
        raise MalformedTreeError(f"Expected a HaarTree, got {type(tree).__name__}")
    rows = _synthesize(tree.top.amps[np.newaxis, :], tree.details)
    return LeafLayer(tuple(StateVector(row) for row in rows))


def truncate(tree: HaarTree, threshold: float) -> HaarTree:
    """Zero every detail vector whose norm is below threshold (lossy)."""
    if threshold < 0:
        raise ValidationError(f"Threshold must be >= 0, got {threshold}")
    dropped = 0
    levels = []
    for level in tree.details:
        kept = []
        for psi in level:
            if psi.norm() < threshold:
                kept.append(StateVector.zeros(psi.dim))
                dropped += 1
            else:
                kept.append(psi)
        levels.append(tuple(kept))
    if dropped:
        logger.warning("Truncation zeroed %d detail vector(s) below %.3e", dropped, threshold)
    return HaarTree(top=tree.top, details=tuple(levels))


def to_hierarchy(tree: HaarTree, label: str = "phi") -> HierNode:
    """Recording hierarchy: root holds phi^0, each node below holds its level's phi vector.

    Children are labelled by appending their 1-based sibling position to the
    parent label (phi -> phi1, phi2 -> phi11 ... phi22).
    """
    rep = IrrepLabel(tree.dim - 1)
    levels = [tree.approximations(level) for level in range(len(tree.details) + 1)]

    def build(level: int, index: int, node_label: str) -> HierNode:
        children = ()
        if level + 1 < len(levels):
            children = tuple(
                build(level + 1, 2 * index + offset, f"{node_label}{offset + 1}") for offset in (0, 1)
            )
        return HierNode(label=node_label, level=level, rep=rep, state=levels[level][index], children=children)

    return build(0, 0, label)
