"""
SU(2) irrep arithmetic: the Clebsch-Gordan series, iterated product
decomposition with multiplicities, and containment tests.

Irreps are labelled by two_j (dimension two_j + 1) so spin-1/2 is two_j = 1
and no half-integer arithmetic is needed.
"""

from collections import Counter
from dataclasses import dataclass
from typing import Iterable, Mapping, Union

from src.utils.exceptions import ValidationError


@dataclass(frozen=True, order=True)
class IrrepLabel:
    two_j: int

    def __post_init__(self):
        if not isinstance(self.two_j, int) or isinstance(self.two_j, bool):
            raise ValidationError(f"two_j must be an integer, got {self.two_j!r}")
        if self.two_j < 0:
            raise ValidationError(f"two_j must be >= 0, got {self.two_j}")

    @property
    def dimension(self) -> int:
        return self.two_j + 1


RepLike = Union[IrrepLabel, int]


def as_irrep(rep: RepLike) -> IrrepLabel:
    return rep if isinstance(rep, IrrepLabel) else IrrepLabel(int(rep))


@dataclass(frozen=True)
class RepMultiset:
    """Irreps with multiplicities, stored as sorted (two_j, multiplicity) pairs."""

    items: tuple[tuple[int, int], ...]

    @classmethod
    def from_counts(cls, counts: Mapping[int, int]) -> "RepMultiset":
        return cls(tuple(sorted((int(j), int(m)) for j, m in counts.items() if m > 0)))

    def multiplicity(self, rep: RepLike) -> int:
        return self.as_dict().get(as_irrep(rep).two_j, 0)

    def as_dict(self) -> dict[int, int]:
        return dict(self.items)

    def dimension(self) -> int:
        """Sum of multiplicity * (two_j + 1)."""
        return sum(m * (j + 1) for j, m in self.items)

    def labels(self) -> list[IrrepLabel]:
        return [IrrepLabel(j) for j, _ in self.items]


def couple_pair(a: RepLike, b: RepLike) -> RepMultiset:
    """Clebsch-Gordan series: |a-b|, |a-b|+2, ..., a+b, each once."""
    a, b = as_irrep(a), as_irrep(b)
    lo, hi = abs(a.two_j - b.two_j), a.two_j + b.two_j
    return RepMultiset(tuple((j, 1) for j in range(lo, hi + 1, 2)))


def decompose_product(reps: Iterable[RepLike]) -> RepMultiset:
    """Left fold of couple_pair over the sequence, carrying multiplicities.

    The empty product is the trivial irrep {0: 1}.
    """
    acc: Counter = Counter({0: 1})
    for rep in reps:
        rep = as_irrep(rep)
        nxt: Counter = Counter()
        for two_j, mult in acc.items():
            for coupled, _ in couple_pair(two_j, rep).items:
                nxt[coupled] += mult
        acc = nxt
    return RepMultiset.from_counts(acc)


def contains(reps: Iterable[RepLike], target: RepLike) -> int:
    """Multiplicity of target in the product of reps; 0 means the assembly is infeasible."""
    return decompose_product(reps).multiplicity(target)
