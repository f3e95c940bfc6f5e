from src.app.commands.common import CommandResult, ScenarioConfig, read_document
from src.service.documents import HaarTreeDocument, LeafLayerDocument, vector_from_json, vector_to_json
from src.service.haar_codec import HaarTree, LeafLayer, decode, encode, truncate
from src.service.hilbert import StateVector
from src.utils.exceptions import MalformedTreeError


def _layer_from_document(doc: LeafLayerDocument) -> LeafLayer:
    return LeafLayer(tuple(StateVector(vector_from_json(leaf)) for leaf in doc.leaves))


def _tree_from_document(doc: HaarTreeDocument) -> HaarTree:
    top = StateVector(vector_from_json(doc.phi))
    if top.dim != doc.dim:
        raise MalformedTreeError(f"phi has dimension {top.dim}, document declares {doc.dim}")
    details = tuple(tuple(StateVector(vector_from_json(psi)) for psi in level) for level in doc.psi)
    return HaarTree(top=top, details=details)


def layer_to_dict(layer: LeafLayer) -> dict:
    return {"leaves": [vector_to_json(leaf.amps) for leaf in layer.leaves]}


def tree_to_dict(tree: HaarTree) -> dict:
    return {
        "dim": tree.dim,
        "phi": vector_to_json(tree.top.amps),
        "psi": [[vector_to_json(psi.amps) for psi in level] for level in tree.details],
    }


def haar_encode(config: ScenarioConfig) -> CommandResult:
    layer = _layer_from_document(read_document(config.input, LeafLayerDocument))
    tree = encode(layer)
    threshold = config.options.get("threshold")
    if threshold is not None:
        tree = truncate(tree, threshold)
    return CommandResult(tree_to_dict(tree))


def haar_decode(config: ScenarioConfig) -> CommandResult:
    tree = _tree_from_document(read_document(config.input, HaarTreeDocument))
    return CommandResult(layer_to_dict(decode(tree)))
