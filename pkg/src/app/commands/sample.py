"""Seeded sample documents for every input format the CLI reads."""

from typing import Callable, Sequence

import numpy as np

from src.app.commands.common import CommandResult, ScenarioConfig
from src.service.documents import matrix_to_json, vector_to_json
from src.service.hier_state import tree_to_dict
from src.service.sampling import (
    make_rng,
    random_hermitian,
    random_joint_coefficients,
    random_macro_operator,
    random_state,
    random_tree,
)
from src.service.util import max_dimension
from src.utils.exceptions import DimensionLimitError, ValidationError


def parse_dims(text: str) -> tuple[int, ...]:
    try:
        dims = tuple(int(part) for part in text.split(","))
    except ValueError:
        raise ValidationError(f"--micro-dims must be a comma-separated list of integers, got '{text}'")
    if any(d < 1 for d in dims):
        raise ValidationError(f"--micro-dims entries must be positive, got {list(dims)}")
    return dims


def leaves_document(rng: np.random.Generator, depth: int, dim: int) -> dict:
    """2^(depth-1) normalized leaves of one shared dimension."""
    count = 2 ** (depth - 1)
    if count * dim > max_dimension():
        raise DimensionLimitError(count * dim, max_dimension())
    return {"leaves": [vector_to_json(random_state(rng, dim).amps) for _ in range(count)]}


def joint_document(rng: np.random.Generator, macro_dim: int, micro_dims: Sequence[int]) -> dict:
    joint = random_joint_coefficients(rng, macro_dim, micro_dims)
    return {
        "macro_dim": joint.macro_dim,
        "micro_dims": list(joint.micro_dims),
        "coeffs": vector_to_json(joint.flattened()),
    }


def operator_document(rng: np.random.Generator, dim: int) -> dict:
    return {"dim": dim, "entries": matrix_to_json(random_hermitian(rng, dim).matrix)}


def macro_operator_document(rng: np.random.Generator, macro_dim: int, dim: int) -> dict:
    macro = random_macro_operator(rng, macro_dim, dim)
    return {
        "macro_dim": macro.macro_dim,
        "dim": macro.dim,
        "blocks": [matrix_to_json(block) for block in macro.blocks],
    }


def tree_document(rng: np.random.Generator, max_depth: int) -> dict:
    # up to 3 children per node
    if 3 ** (max_depth - 1) > max_dimension():
        raise DimensionLimitError(3 ** (max_depth - 1), max_dimension())
    return tree_to_dict(random_tree(rng, max_depth=max_depth))


_BUILDERS: dict[str, Callable[[np.random.Generator, dict], dict]] = {
    "leaves": lambda rng, o: leaves_document(rng, o["depth"], o["dim"]),
    "joint": lambda rng, o: joint_document(rng, o["macro_dim"], o["micro_dims"]),
    "operator": lambda rng, o: operator_document(rng, int(np.prod(o["micro_dims"]))),
    "macro-operator": lambda rng, o: macro_operator_document(rng, o["macro_dim"], int(np.prod(o["micro_dims"]))),
    "tree": lambda rng, o: tree_document(rng, o["depth"]),
}

SAMPLE_KINDS = tuple(_BUILDERS)


def sample(config: ScenarioConfig) -> CommandResult:
    """One random document of the requested kind; the same seed gives the same bytes."""
    options = dict(config.options)
    kind = options["kind"]
    if kind not in _BUILDERS:
        raise ValidationError(f"Unknown sample kind '{kind}', expected one of {list(SAMPLE_KINDS)}")
    options["micro_dims"] = parse_dims(options.get("micro_dims", "2,2"))
    for name in ("macro_dim", "dim", "depth"):
        if options[name] < 1:
            raise ValidationError(f"--{name.replace('_', '-')} must be >= 1, got {options[name]}")
    total = options["macro_dim"] * int(np.prod(options["micro_dims"]))
    if kind in ("joint", "operator", "macro-operator") and total > max_dimension():
        raise DimensionLimitError(total, max_dimension())
    return CommandResult(_BUILDERS[kind](make_rng(config.seed), options))
