"""
Self-repair cascade on a three-level organism (organism -> cells -> cell components).

    damage      a block of cells is cut off; the remainder keeps K of N cells
    feasibility the product of the remaining cell irreps must contain the target irrep
    descent     an infeasible remainder breaks down to its component level
    rebuild     missing cells are regrown by cloning the lowest-index survivor

Only the three-level cascade is modelled; deeper trees are rejected.
Rewrite steps (removed cells + descended components + cloned cells) are
the only energy bookkeeping kept.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Iterable, Optional, Sequence
import logging

from src.service.documents import ScenarioDocument, dumps_canonical, parse_document
from src.service.enums import CascadeOutcome, CascadeStage
from src.service.hier_state import (
    HierNode,
    depth,
    tree_from_document,
    tree_to_dict,
    validate,
    without_states,
)
from src.service.repgroup import IrrepLabel, RepLike, as_irrep, contains
from src.service.util import batch_workers
from src.utils.exceptions import (
    AppError,
    EmptyRemainderError,
    IndexOutOfRangeError,
    InfeasibleRebuildError,
    LevelMismatchError,
    UnsupportedDepthError,
    ValidationError,
)

logger = logging.getLogger(__name__)

ORGANISM_DEPTH = 3


@dataclass(frozen=True)
class Organism:
    tree: HierNode
    target: IrrepLabel
    cell_count: int

    def __post_init__(self):
        object.__setattr__(self, "target", as_irrep(self.target))
        levels = depth(self.tree)
        if levels != ORGANISM_DEPTH:
            raise UnsupportedDepthError(levels)
        report = validate(self.tree)
        if not report.valid:
            first = report.violations[0]
            raise ValidationError(f"Organism tree is invalid at {first.path}: {first.message}")
        if self.tree.rep != self.target:
            raise ValidationError(
                f"Organism root '{self.tree.label}' has two_j={self.tree.two_j}, "
                f"but the declared target is two_j={self.target.two_j}"
            )
        for cell in self.cells:
            # depth() follows the deepest branch; each cell must reach the component level itself
            if 1 + depth(cell) != ORGANISM_DEPTH:
                raise UnsupportedDepthError(1 + depth(cell))
            cell_report = validate(cell, check_consistency=True)
            if not cell_report.valid:
                first = cell_report.violations[0]
                raise ValidationError(f"Cell {first.path} is inconsistent: {first.message}")
        if self.cell_count < len(self.cells):
            raise ValidationError(
                f"cell_count {self.cell_count} is below the {len(self.cells)} cells present in the tree"
            )

    @classmethod
    def from_tree(cls, tree: HierNode, target: RepLike, cell_count: Optional[int] = None) -> "Organism":
        return cls(tree=tree, target=as_irrep(target), cell_count=cell_count or len(tree.children))

    @property
    def cells(self) -> tuple[HierNode, ...]:
        return self.tree.children

    def cell_reps(self) -> list[IrrepLabel]:
        return [c.rep for c in self.cells]

    def feasibility(self) -> int:
        """Multiplicity of the target irrep in the product of cell irreps."""
        return contains(self.cell_reps(), self.target)

    def is_healthy(self) -> bool:
        return len(self.cells) == self.cell_count and self.feasibility() > 0


@dataclass(frozen=True)
class DamageEvent:
    removed: frozenset[int] = frozenset()

    @classmethod
    def of(cls, indices: Iterable[int]) -> "DamageEvent":
        indices = list(indices)
        if len(set(indices)) != len(indices):
            raise ValidationError(f"Damage indices must be distinct, got {indices}")
        if any(i < 0 for i in indices):
            raise IndexOutOfRangeError(f"Damage indices must be >= 0, got {indices}")
        return cls(frozenset(indices))


@dataclass(frozen=True)
class Remainder:
    """The damaged tree: surviving cells in original order, original N kept."""

    tree: HierNode
    target: IrrepLabel
    cell_count: int
    removed: tuple[int, ...]

    @property
    def cells(self) -> tuple[HierNode, ...]:
        return self.tree.children

    def feasibility(self) -> int:
        return contains([c.rep for c in self.cells], self.target)


@dataclass(frozen=True)
class PoolEntry:
    """One component with a link back to the cell it came from."""

    cell_index: int
    cell_label: str
    cell_rep: IrrepLabel
    component: HierNode


@dataclass(frozen=True)
class ComponentPool:
    root_label: str
    root_level: int
    entries: tuple[PoolEntry, ...]

    def reps(self) -> list[IrrepLabel]:
        return [e.component.rep for e in self.entries]

    def as_tree(self, target: IrrepLabel) -> HierNode:
        """Component-level snapshot: components hang directly under the root and keep their levels."""
        children = tuple(replace(e.component, label=f"{e.cell_label}/{e.component.label}") for e in self.entries)
        return HierNode(label=self.root_label, level=self.root_level, rep=target, state=None, children=children)

    def surviving_cells(self) -> list[HierNode]:
        """Reassemble the source cells from their components; cell slots come back empty."""
        grouped: dict[int, list[PoolEntry]] = {}
        for entry in self.entries:
            grouped.setdefault(entry.cell_index, []).append(entry)
        cells = []
        for index in sorted(grouped):
            group = grouped[index]
            cells.append(
                HierNode(
                    label=group[0].cell_label,
                    level=self.root_level + 1,
                    rep=group[0].cell_rep,
                    state=None,
                    children=tuple(e.component for e in group),
                )
            )
        return cells


@dataclass(frozen=True)
class StageRecord:
    stage: CascadeStage
    multiplicity: int
    tree: HierNode

    def to_dict(self) -> dict:
        return {"stage": self.stage.value, "multiplicity": self.multiplicity, "tree": tree_to_dict(self.tree)}


@dataclass(frozen=True)
class CascadeTrace:
    target: IrrepLabel
    cell_count: int
    removed: tuple[int, ...]
    stages: tuple[StageRecord, ...]
    outcome: CascadeOutcome
    rewrite_steps: int
    failure: Optional[str] = None

    def stage_names(self) -> list[str]:
        return [s.stage.value for s in self.stages]

    def final_tree(self) -> HierNode:
        return self.stages[-1].tree

    def to_dict(self) -> dict:
        return {
            "target": self.target.two_j,
            "cell_count": self.cell_count,
            "removed": list(self.removed),
            "stages": [s.to_dict() for s in self.stages],
            "outcome": self.outcome.value,
            "rewrite_steps": self.rewrite_steps,
            "failure": self.failure,
        }

    def serialize(self) -> str:
        return dumps_canonical(self.to_dict())


# ---------------------------------------------------------------------------
# Cascade steps
# ---------------------------------------------------------------------------


def apply_damage(org: Organism, g: DamageEvent) -> Remainder:
    n = len(org.cells)
    bad = sorted(i for i in g.removed if not 0 <= i < n)
    if bad:
        raise IndexOutOfRangeError(f"Damage indices {bad} outside [0, {n})")
    if len(g.removed) == n:
        raise EmptyRemainderError(n)
    tree = org.tree
    if g.removed:
        kept = tuple(c for i, c in enumerate(org.cells) if i not in g.removed)
        # the whole's wave function does not survive the cut
        tree = replace(org.tree, state=None, children=kept)
    return Remainder(tree=tree, target=org.target, cell_count=org.cell_count, removed=tuple(sorted(g.removed)))


def descend(remainder: Remainder) -> ComponentPool:
    if not remainder.cells:
        raise EmptyRemainderError(remainder.cell_count)
    entries = tuple(
        PoolEntry(cell_index=index, cell_label=cell.label, cell_rep=cell.rep, component=component)
        for index, cell in enumerate(remainder.cells)
        for component in cell.children
    )
    return ComponentPool(root_label=remainder.tree.label, root_level=remainder.tree.level, entries=entries)


def _clone_label(base: str, taken: set[str]) -> str:
    n = 1
    while f"{base}-clone{n}" in taken:
        n += 1
    return f"{base}-clone{n}"


def rebuild(pool: ComponentPool, template: HierNode, n: int, target: RepLike) -> Organism:
    """Regrow cells by cloning template until exactly n cells exist."""
    target = as_irrep(target)
    if not template.children or any(not c.is_leaf() for c in template.children):
        raise ValidationError(f"Template '{template.label}' is not a cell with leaf components")
    report = validate(template, check_consistency=True)
    if not report.valid:
        first = report.violations[0]
        raise ValidationError(f"Template is invalid at {first.path}: {first.message}")
    if template.level != pool.root_level + 1:
        raise LevelMismatchError(
            f"Template level {template.level} does not sit below the organism level {pool.root_level}"
        )

    cells = pool.surviving_cells()
    if len(cells) > n:
        raise ValidationError(f"Pool holds {len(cells)} cells, more than the requested {n}")
    blank = without_states(template)
    taken = {c.label for c in cells}
    while len(cells) < n:
        label = _clone_label(template.label, taken)
        taken.add(label)
        cells.append(replace(blank, label=label))

    reps = [c.rep for c in cells]
    if contains(reps, target) == 0:
        raise InfeasibleRebuildError(
            f"{n} cells with two_j {[r.two_j for r in reps]} cannot contain two_j={target.two_j}"
        )
    tree = HierNode(label=pool.root_label, level=pool.root_level, rep=target, state=None, children=tuple(cells))
    report = validate(tree, check_consistency=True)
    if not report.valid:
        first = report.violations[0]
        raise InfeasibleRebuildError(f"Rebuilt organism is inconsistent at {first.path}: {first.message}")
    return Organism(tree=tree, target=target, cell_count=n)


def repair_cascade(org: Organism, g: DamageEvent) -> CascadeTrace:
    """Run damage -> feasibility -> descent -> rebuild and record every stage."""
    stages: list[StageRecord] = []
    steps = 0

    remainder = apply_damage(org, g)
    multiplicity = remainder.feasibility()
    if g.removed:
        steps += len(g.removed)
        stages.append(StageRecord(CascadeStage.DAMAGED, multiplicity, remainder.tree))
        logger.info("damaged: removed %s, remaining feasibility %d", sorted(g.removed), multiplicity)

    def finish(outcome: CascadeOutcome, failure: Optional[str] = None) -> CascadeTrace:
        return CascadeTrace(
            target=org.target,
            cell_count=org.cell_count,
            removed=remainder.removed,
            stages=tuple(stages),
            outcome=outcome,
            rewrite_steps=steps,
            failure=failure,
        )

    if multiplicity > 0:
        stages.append(StageRecord(CascadeStage.HEALTHY, multiplicity, remainder.tree))
        return finish(CascadeOutcome.HEALTHY)

    stages.append(StageRecord(CascadeStage.INFEASIBLE, multiplicity, remainder.tree))
    pool = descend(remainder)
    steps += len(pool.entries)
    stages.append(StageRecord(CascadeStage.DESCENDED, contains(pool.reps(), org.target), pool.as_tree(org.target)))
    logger.info("descended: %d components in pool", len(pool.entries))

    try:
        rebuilt = rebuild(pool, remainder.cells[0], org.cell_count, org.target)
    except InfeasibleRebuildError as exc:
        logger.info("rebuild failed: %s", exc.message)
        return finish(CascadeOutcome.INFEASIBLE_REBUILD, failure=exc.message)
    steps += org.cell_count - len(remainder.cells)
    stages.append(StageRecord(CascadeStage.REBUILT, rebuilt.feasibility(), rebuilt.tree))
    logger.info("rebuilt: %d cells, feasibility %d", len(rebuilt.cells), rebuilt.feasibility())
    return finish(CascadeOutcome.REBUILT)


# ---------------------------------------------------------------------------
# Scenarios
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Scenario:
    organism: Organism
    damage: DamageEvent = field(default_factory=DamageEvent)


def scenario_from_document(doc: ScenarioDocument) -> Scenario:
    tree = tree_from_document(doc.organism)
    organism = Organism.from_tree(tree, doc.target, doc.cell_count)
    return Scenario(organism=organism, damage=DamageEvent.of(doc.remove))


def load_scenario(text: str) -> Scenario:
    return scenario_from_document(parse_document(text, ScenarioDocument))


@dataclass(frozen=True)
class BatchResult:
    path: Path
    trace: Optional[CascadeTrace] = None
    error: Optional[AppError] = None


class RepairService:
    """Runs repair scenarios, one at a time or as a concurrent batch of files."""

    def __init__(self, max_workers: Optional[int] = None):
        self._max_workers = max_workers or batch_workers()

    def run(self, scenario: Scenario) -> CascadeTrace:
        return repair_cascade(scenario.organism, scenario.damage)

    def _run_file(self, path: Path) -> BatchResult:
        try:
            try:
                text = path.read_text(encoding="utf-8")
            except OSError as exc:
                raise ValidationError(f"Cannot read '{path}': {exc.strerror}")
            return BatchResult(path=path, trace=self.run(load_scenario(text)))
        except AppError as exc:
            logger.warning("Scenario %s failed: %s", path, exc.message)
            return BatchResult(path=path, error=exc)

    def run_batch(self, paths: Sequence[Path]) -> list[BatchResult]:
        """Scenarios are isolated per file; results come back in input order."""
        with ThreadPoolExecutor(max_workers=self._max_workers) as ex:
            results = list(ex.map(self._run_file, paths))
        logger.info("Batch finished: %d scenario(s)", len(results))
        return results
