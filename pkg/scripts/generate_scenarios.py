#!/usr/bin/env python3
"""
Generate sample CLI inputs: a random leaf layer, joint state, operators,
a random tree and the three reference repair scenarios.
Same seed, same files.
"""

import argparse
import sys
from pathlib import Path

# Add project root to path
project_root = Path(__file__).parent.parent
sys.path.insert(0, str(project_root))

from src.app.commands.sample import (
    joint_document,
    leaves_document,
    macro_operator_document,
    operator_document,
    tree_document,
)
from src.service.documents import dumps_canonical
from src.service.hier_state import tree_to_dict
from src.service.sampling import make_rng, organism_tree


def _scenario(tree, target: int, remove: list[int]) -> dict:
    return {"organism": tree_to_dict(tree), "target": target, "cell_count": None, "remove": remove}


def generate(out_dir: Path, seed: int) -> list[Path]:
    rng = make_rng(seed)
    files = {
        "leaves.json": leaves_document(rng, 3, 2),
        "joint.json": joint_document(rng, 2, (2, 2)),
        "operator.json": operator_document(rng, 4),
        "macro_operator.json": macro_operator_document(rng, 2, 4),
        "tree.json": tree_document(rng, 3),
        "hydra.json": _scenario(organism_tree([1, 1], [1, 1, 1], label="hydra"), 0, [1]),
        "parity.json": _scenario(organism_tree([1, 1, 1], [1, 1, 1]), 0, []),
        "healthy.json": _scenario(organism_tree([1, 1, 1, 1], [1, 1, 1]), 0, [2, 3]),
    }
    out_dir.mkdir(parents=True, exist_ok=True)
    written = []
    for name, payload in files.items():
        path = out_dir / name
        path.write_text(dumps_canonical(payload), encoding="utf-8")
        written.append(path)
        print(f"✓ {path}")
    return written


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", type=Path, default=project_root / "samples")
    args = parser.parse_args()
    generate(args.out, args.seed)


if __name__ == "__main__":
    main()
