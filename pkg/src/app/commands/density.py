import numpy as np

from src.app.commands.common import (
    CommandResult,
    ScenarioConfig,
    operator_from_document,
    read_document,
    square_from_json,
)
from src.service.density_service import (
    DensityMatrix,
    DensityService,
    JointCoefficients,
    MacroConditionedOperator,
    joint_coefficients,
)
from src.service.documents import (
    JointCoefficientsDocument,
    MacroOperatorDocument,
    OperatorDocument,
    matrix_to_json,
    vector_from_json,
    vector_to_json,
)
from src.service.util import clean_zero
from src.utils.exceptions import DimensionMismatchError


def _joint_from_document(doc: JointCoefficientsDocument) -> JointCoefficients:
    return joint_coefficients(doc.macro_dim, doc.micro_dims, vector_from_json(doc.coeffs))


def _macro_operator_from_document(doc: MacroOperatorDocument) -> MacroConditionedOperator:
    if len(doc.blocks) != doc.macro_dim:
        raise DimensionMismatchError("macro-conditioned operator block count", doc.macro_dim, len(doc.blocks))
    blocks = [square_from_json(doc.dim, block, f"block {m}") for m, block in enumerate(doc.blocks)]
    return MacroConditionedOperator(np.stack(blocks))


def _load_joint(config: ScenarioConfig) -> JointCoefficients:
    return _joint_from_document(read_document(config.input, JointCoefficientsDocument))


def density_to_dict(rho: DensityMatrix) -> dict:
    return {"dim": rho.dim, "entries": matrix_to_json(rho.entries)}


def density(config: ScenarioConfig) -> CommandResult:
    svc = DensityService(config.tolerance)
    return CommandResult(density_to_dict(svc.build_density(_load_joint(config))))


def reduce(config: ScenarioConfig) -> CommandResult:
    svc = DensityService(config.tolerance)
    return CommandResult(density_to_dict(svc.reduce(_load_joint(config), config.options["subsystem"])))


def expect(config: ScenarioConfig) -> CommandResult:
    svc = DensityService(config.tolerance)
    c = _load_joint(config)
    op = operator_from_document(read_document(config.options["operator"], OperatorDocument))
    return CommandResult({"expectation": clean_zero(svc.expectation(c, op))})


def macro_expect(config: ScenarioConfig) -> CommandResult:
    svc = DensityService(config.tolerance)
    c = _load_joint(config)
    b = _macro_operator_from_document(read_document(config.options["operator"], MacroOperatorDocument))
    return CommandResult({"expectation": clean_zero(svc.macro_expectation(c, b))})


def diag(config: ScenarioConfig) -> CommandResult:
    """Spectrum of a density matrix document: weights, eigenvectors, purity and entropy."""
    svc = DensityService(config.tolerance)
    op = operator_from_document(read_document(config.input, OperatorDocument))
    rho = svc.as_density(op.matrix)
    spectrum = svc.diagonalize(rho)
    return CommandResult(
        {
            "weights": [clean_zero(w) for w in spectrum.weights],
            "vectors": [vector_to_json(spectrum.vectors[:, i]) for i in range(rho.dim)],
            "purity": clean_zero(spectrum.purity()),
            "entropy": clean_zero(spectrum.entropy()),
        }
    )
