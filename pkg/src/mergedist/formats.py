"""JSON documents for trees, barcodes, presentations and complexes."""
from __future__ import annotations

import json
import math
from pathlib import Path

from .errors import MergeDistError
from .filtration import CellComplex1, CellularFunction
from .metrics.barcodes import Barcode
from .presentation import Presentation
from .trees import MergeForest, MergeNode, MergeTree


class FormatError(MergeDistError, ValueError):
    pass


def tree_to_dict(tree: MergeTree) -> dict:
    return {
        "nodes": [
            {"id": n.id, "height": n.height, "children": list(n.children)} for n in tree.nodes
        ],
        "root": tree.root,
    }


def tree_from_dict(d: dict) -> MergeTree:
    try:
        nodes = tuple(
            MergeNode(str(n["id"]), _real(n["height"]), tuple(str(c) for c in n.get("children", [])))
            for n in d["nodes"]
        )
        return MergeTree(nodes, str(d["root"]))
    except (KeyError, TypeError) as e:
        raise FormatError(f"malformed merge tree document: missing or bad field {e}") from None


def _real(x) -> float:
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise FormatError(f"height {x!r} is not a number")
    return float(x)


def forest_to_dict(forest: MergeForest) -> dict:
    return {"trees": [tree_to_dict(t) for t in forest]}


def dumps(obj) -> str:
    """Deterministic JSON: sorted keys, repr-exact floats, +inf spelled "inf"."""
    return json.dumps(_encode(obj), sort_keys=True, indent=2, allow_nan=False) + "\n"


def _encode(x):
    if isinstance(x, float) and math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if isinstance(x, dict):
        return {str(k): _encode(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_encode(v) for v in x]
    return x


def read_json(path) -> dict:
    text = Path(path).read_text()
    try:
        return json.loads(text)
    except json.JSONDecodeError as e:
        raise FormatError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from None


def write_json(path, obj) -> None:
    Path(path).write_text(dumps(obj))


def load_tree(path) -> MergeTree:
    d = read_json(path)
    if not isinstance(d, dict) or "nodes" not in d:
        raise FormatError(f"{path}: not a merge tree document (needs 'nodes' and 'root')")
    try:
        return tree_from_dict(d)
    except FormatError as e:
        raise FormatError(f"{path}: {e}") from None


def load_barcode(path) -> Barcode:
    d = read_json(path)
    try:
        return Barcode.from_dict(d)
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{path}: malformed barcode document: {e}") from None


def load_presentation(path) -> Presentation:
    d = read_json(path)
    try:
        return Presentation.from_dict(d)
    except (KeyError, TypeError) as e:
        raise FormatError(f"{path}: malformed presentation document: {e}") from None


def load_complex(path, function: str | None = None):
    """Read ``{"complex": ..., "<name>": {"vertices": [...], "edges": [...]}}``.

    Returns the complex and a dict of every function found in the document.
    """
    d = read_json(path)
    try:
        X = CellComplex1.from_dict(d["complex"])
        fns = {
            k: CellularFunction.from_dict(v)
            for k, v in d.items()
            if k != "complex" and isinstance(v, dict) and "vertices" in v
        }
    except (KeyError, TypeError, ValueError) as e:
        raise FormatError(f"{path}: malformed complex document: {e}") from None
    if function is not None:
        if function not in fns:
            raise FormatError(f"{path}: no function named {function!r}")
        fns = {function: fns[function]}
    return X, fns
