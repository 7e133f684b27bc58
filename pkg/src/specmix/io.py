"""JSON persistence for complexes and hypergraphs."""

from __future__ import annotations

import json

import jsonschema

from .complexes import Hypergraph, SimplicialComplex
from .reports import SCHEMA_VERSION, load_schema

__all__ = ["ObjectFormatError", "object_to_dict", "object_from_dict", "read_object", "write_object",
           "validate_report"]


class ObjectFormatError(ValueError):
    pass


def object_to_dict(obj) -> dict:
    if isinstance(obj, SimplicialComplex):
        return {"schema": SCHEMA_VERSION, "type": "simplicial", "n": obj.n, "d": obj.d, "skeleton": obj.skeleton,
                "facets": [list(f) for f in obj.facets]}
    if isinstance(obj, Hypergraph):
        return {"schema": SCHEMA_VERSION, "type": "hypergraph", "n": obj.n, "k": obj.k,
                "edges": [list(e) for e in obj.edges]}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _path(err) -> str:
    return "$" + "".join(f"[{p}]" if isinstance(p, int) else f".{p}" for p in err.absolute_path)


def object_from_dict(doc: dict, source: str = "<object>"):
    try:
        jsonschema.validate(doc, load_schema("object"))
    except jsonschema.ValidationError as err:
        best = jsonschema.exceptions.best_match([err]) or err
        raise ObjectFormatError(f"{source}: {_path(best)}: {best.message}") from None
    try:
        if doc["type"] == "simplicial":
            return SimplicialComplex(doc["n"], doc["d"], doc["facets"])
        return Hypergraph(doc["n"], doc["k"], doc["edges"])
    except ValueError as err:
        raise ObjectFormatError(f"{source}: {err}") from None


def read_object(path):
    with open(path) as fh:
        text = fh.read()
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ObjectFormatError(f"{path}: line {err.lineno} column {err.colno}: {err.msg}") from None
    return object_from_dict(doc, str(path))


def write_object(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump(object_to_dict(obj), fh, indent=1)
        fh.write("\n")


def validate_report(doc: dict) -> None:
    """Raise jsonschema.ValidationError if ``doc`` is not a valid report."""
    jsonschema.validate(doc, load_schema("report"))
