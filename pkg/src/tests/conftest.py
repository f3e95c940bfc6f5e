"""
Pytest fixtures for the hierq tests.
Provides a seeded RNG, a clean config cache per test, tree/organism builders
and the paths of the golden CLI files under src/tests/golden.
"""
from pathlib import Path
from typing import Optional, Sequence

import numpy as np
import pytest

from src.service.hier_state import HierNode
from src.service.hilbert import StateVector
from src.service.repair_service import DamageEvent, Organism, Scenario
from src.service.repgroup import IrrepLabel
from src.service.sampling import organism_tree
from src.service.util import _load_config


TESTS_DIR = Path(__file__).resolve().parent
GOLDEN_DIR = TESTS_DIR / "golden"

H = float(np.sqrt(0.5))


@pytest.fixture(autouse=True)
def clean_config(monkeypatch):
    """Every test starts from config.json defaults with no env overrides."""
    monkeypatch.delenv("HIERQ_TOLERANCE", raising=False)
    monkeypatch.delenv("HIERQ_CONFIG", raising=False)
    _load_config.cache_clear()
    yield
    _load_config.cache_clear()


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def golden_dir():
    return GOLDEN_DIR


# -----------------------------------------------------------------------------
# Builders
# -----------------------------------------------------------------------------

def make_state(*amps) -> StateVector:
    return StateVector(np.asarray(amps, dtype=np.complex128))


def make_node(
    label: str,
    level: int = 0,
    two_j: int = 0,
    state: Optional[Sequence[complex]] = None,
    children: Sequence[HierNode] = (),
) -> HierNode:
    return HierNode(
        label=label,
        level=level,
        rep=IrrepLabel(two_j),
        state=make_state(*state) if state is not None else None,
        children=tuple(children),
    )


def make_recording_tree(root_state: bool = True) -> HierNode:
    """Three-level recording tree: 1 root, 2 mid nodes, 4 leaves, all slots dim 2."""
    leaves = [[1, 0], [0, 1], [1, 0], [0, 1]]
    mids = [
        make_node(
            f"phi{m + 1}",
            level=1,
            two_j=1,
            state=[H, H],
            children=[make_node(f"phi{m + 1}{k + 1}", level=2, two_j=1, state=leaves[2 * m + k]) for k in range(2)],
        )
        for m in range(2)
    ]
    return make_node("phi", level=0, two_j=1, state=[1, 0] if root_state else None, children=mids)


def make_organism(
    cell_reps: Sequence[int],
    component_reps: Sequence[int] = (1, 1, 1),
    target: int = 0,
    label: str = "organism",
) -> Organism:
    return Organism.from_tree(organism_tree(cell_reps, component_reps, target, label), target)


def make_hydra_scenario() -> Scenario:
    """Two spin-1/2 cells of three spin-1/2 components, singlet target, cell index 1 cut off."""
    return Scenario(organism=make_organism([1, 1], label="hydra"), damage=DamageEvent.of([1]))


@pytest.fixture
def recording_tree():
    return make_recording_tree()


@pytest.fixture
def hydra_scenario():
    return make_hydra_scenario()
