"""Seeded random generators for states, operators, joint coefficients and trees."""

from typing import Optional, Sequence
import numpy as np

from src.service.density_service import JointCoefficients, MacroConditionedOperator
from src.service.hier_state import HierNode
from src.service.hilbert import Operator, StateVector
from src.service.repgroup import IrrepLabel


def make_rng(seed: Optional[int] = None) -> np.random.Generator:
    return np.random.default_rng(seed)


def random_amplitudes(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.standard_normal(size) + 1j * rng.standard_normal(size)


def random_state(rng: np.random.Generator, dim: int, normalized: bool = True) -> StateVector:
    amps = random_amplitudes(rng, dim)
    if normalized:
        amps = amps / np.linalg.norm(amps)
    return StateVector(amps, normalized=normalized)


def random_matrix(rng: np.random.Generator, dim: int) -> np.ndarray:
    return random_amplitudes(rng, dim * dim).reshape(dim, dim)


def random_hermitian(rng: np.random.Generator, dim: int) -> Operator:
    m = random_matrix(rng, dim)
    return Operator((m + m.conj().T) / 2, hermitian=True)


def random_joint_coefficients(
    rng: np.random.Generator, macro_dim: int, micro_dims: Sequence[int]
) -> JointCoefficients:
    size = macro_dim * int(np.prod(micro_dims))
    amps = random_amplitudes(rng, size)
    amps = amps / np.linalg.norm(amps)
    return JointCoefficients(macro_dim=macro_dim, micro_dims=tuple(micro_dims), coeffs=amps)


def random_macro_operator(rng: np.random.Generator, macro_dim: int, dim: int) -> MacroConditionedOperator:
    return MacroConditionedOperator(np.stack([random_hermitian(rng, dim).matrix for _ in range(macro_dim)]))


def random_tree(
    rng: np.random.Generator,
    max_depth: int = 4,
    max_children: int = 3,
    max_dim: int = 4,
    state_probability: float = 0.5,
    level: int = 0,
    label: str = "n",
) -> HierNode:
    """Tree with unique sibling labels, unit level steps and random slots/reps."""
    state = None
    if rng.random() < state_probability:
        state = StateVector(random_amplitudes(rng, int(rng.integers(1, max_dim + 1))))
    children = ()
    if max_depth > 1:
        count = int(rng.integers(0, max_children + 1))
        children = tuple(
            random_tree(rng, max_depth - 1, max_children, max_dim, state_probability, level + 1, f"{label}.{i}")
            for i in range(count)
        )
    return HierNode(
        label=label,
        level=level,
        rep=IrrepLabel(int(rng.integers(0, 5))),
        state=state,
        children=children,
    )


def organism_tree(
    cell_reps: Sequence[int],
    component_reps: Sequence[int],
    target: int = 0,
    label: str = "organism",
) -> HierNode:
    """Three-level organism: one cell per entry of cell_reps, each with the same component reps."""
    cells = tuple(
        HierNode(
            label=f"cell-{i + 1}",
            level=1,
            rep=IrrepLabel(cell_rep),
            children=tuple(
                HierNode(label=f"c{k + 1}", level=2, rep=IrrepLabel(rep)) for k, rep in enumerate(component_reps)
            ),
        )
        for i, cell_rep in enumerate(cell_reps)
    )
    return HierNode(label=label, level=0, rep=IrrepLabel(target), children=cells)
