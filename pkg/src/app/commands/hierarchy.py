from src.app.commands.common import EXIT_INVALID, EXIT_OK, CommandResult, ScenarioConfig, read_text
from src.service.hier_state import deserialize, validate as validate_tree
from src.service.repgroup import IrrepLabel, contains, decompose_product
from src.utils.exceptions import ValidationError


def parse_reps(text: str) -> list[IrrepLabel]:
    """'1,1,2' -> irreps; an empty string is the empty product."""
    if not text.strip():
        return []
    try:
        return [IrrepLabel(int(part)) for part in text.split(",")]
    except ValueError:
        raise ValidationError(f"--reps must be a comma-separated list of integers, got '{text}'")


def cg(config: ScenarioConfig) -> CommandResult:
    reps = parse_reps(config.options["reps"])
    payload = {
        "reps": [r.two_j for r in reps],
        "decomposition": {str(k): v for k, v in decompose_product(reps).as_dict().items()},
    }
    target = config.options.get("target")
    if target is not None:
        payload["target"] = target
        payload["multiplicity"] = contains(reps, IrrepLabel(target))
    return CommandResult(payload)


def validate(config: ScenarioConfig) -> CommandResult:
    root = deserialize(read_text(config.input))
    report = validate_tree(root, check_consistency=config.options.get("consistency", False))
    return CommandResult(report.to_dict(), EXIT_OK if report.valid else EXIT_INVALID)
