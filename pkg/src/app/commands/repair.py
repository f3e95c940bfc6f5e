from pathlib import Path
import logging

from src.app.commands.common import (
    EXIT_INFEASIBLE,
    EXIT_OK,
    CommandResult,
    ScenarioConfig,
    exit_code_for,
    read_text,
    write_text,
)
from src.service.enums import CascadeOutcome
from src.service.repair_service import BatchResult, CascadeTrace, RepairService, load_scenario
from src.utils.exceptions import ValidationError

logger = logging.getLogger(__name__)


def _trace_exit_code(trace: CascadeTrace) -> int:
    return EXIT_INFEASIBLE if trace.outcome == CascadeOutcome.INFEASIBLE_REBUILD else EXIT_OK


def _trace_path(output_dir: Path, source: Path) -> Path:
    return output_dir / f"{source.stem}.trace.json"


def repair(config: ScenarioConfig) -> CommandResult:
    svc = RepairService()
    trace = svc.run(load_scenario(read_text(config.input)))
    return CommandResult(trace.to_dict(), _trace_exit_code(trace))


def _summarize(result: BatchResult, output_dir: Path) -> tuple[dict, int]:
    entry = {"input": str(result.path), "output": None, "outcome": None, "error": None}
    if result.error is not None:
        entry["error"] = {"code": result.error.code, "message": result.error.message}
        return entry, exit_code_for(result.error)
    out = _trace_path(output_dir, result.path)
    write_text(result.trace.serialize(), out)
    entry["output"] = str(out)
    entry["outcome"] = result.trace.outcome.value
    return entry, _trace_exit_code(result.trace)


def repair_batch(config: ScenarioConfig) -> CommandResult:
    """Run every scenario file; one trace per input in output_dir, exit code is the worst per-file code."""
    if config.output_dir is None:
        raise ValidationError("--batch requires --output-dir")
    stems = [p.stem for p in config.inputs]
    if len(set(stems)) != len(stems):
        raise ValidationError("Batch inputs must have distinct file names")
    try:
        config.output_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ValidationError(f"Cannot create '{config.output_dir}': {exc.strerror}")
    results = RepairService().run_batch(list(config.inputs))
    entries, worst = [], EXIT_OK
    for result in results:
        entry, code = _summarize(result, config.output_dir)
        entries.append(entry)
        worst = max(worst, code)
    logger.info("Wrote %d trace(s) to %s", sum(e["output"] is not None for e in entries), config.output_dir)
    return CommandResult({"results": entries}, worst)
