"""Canonical JSON persistence for workbench values.

Writing is hand-rolled so every real is emitted with 17 significant digits
(doubles round-trip bit-exactly through that form); reading uses the
standard parser.  Dict key order follows insertion order, which the readers
and writers below keep deterministic, so write -> read -> write is the
identity on files.

File schemas:

  triangulation  {"vertices": ["A", ...], "tets": [["A","B","C","D"], ...]}
  decoration     {"coords": {"A": [x, y, z], ...}}
  lengths        {"A-B": 1.25, ...}                      (sorted keys)
  jacobian       {"edges": [...], "matrix": [[...]], "fd_step": h,
                  "symmetry_defect": x}
  complex        {"dims": [...], "boundaries": [[[...]], ...]}  (row-major,
                  boundaries[k] maps the space with dims[k] to dims[k+1])
  movelog        [{"kind": "2-3", "consumed": [...], "produced": [...],
                   "new_labels": [...]}, ...]
"""

import json
import math

import numpy as np

from .errors import PachnerLabError
from .moves import MoveRecord
from .simplicial import Triangulation, build


def format_real(x: float) -> str:
    """A float as a decimal JSON token with 17 significant digits."""
    if not math.isfinite(x):
        raise PachnerLabError(f"cannot serialize non-finite real {x!r}")
    s = format(float(x), ".17g")
    if "." not in s and "e" not in s and "E" not in s:
        s += ".0"
    return s


def dumps(obj) -> str:
    """Serialize nested dict/list/str/int/float with canonical reals."""
    out = []
    _write(obj, out)
    return "".join(out)


def _write(obj, out):
    if isinstance(obj, dict):
        out.append("{")
        for i, (k, v) in enumerate(obj.items()):
            if i:
                out.append(", ")
            if not isinstance(k, str):
                raise PachnerLabError(f"non-string JSON key {k!r}")
            out.append(json.dumps(k))
            out.append(": ")
            _write(v, out)
        out.append("}")
    elif isinstance(obj, (list, tuple)):
        out.append("[")
        for i, v in enumerate(obj):
            if i:
                out.append(", ")
            _write(v, out)
        out.append("]")
    elif isinstance(obj, bool):
        out.append("true" if obj else "false")
    elif isinstance(obj, (int, np.integer)):
        out.append(str(int(obj)))
    elif isinstance(obj, (float, np.floating)):
        out.append(format_real(float(obj)))
    elif isinstance(obj, str):
        out.append(json.dumps(obj))
    elif obj is None:
        out.append("null")
    else:
        raise PachnerLabError(f"cannot serialize {type(obj).__name__}")


def dump(obj, path):
    with open(path, "w") as fh:
        fh.write(dumps(obj))
        fh.write("\n")


def load(path):
    with open(path) as fh:
        return json.load(fh)


# --- triangulations --------------------------------------------------------

def triangulation_to_obj(tri: Triangulation) -> dict:
    return {"vertices": list(tri.vertices),
            "tets": [list(t) for t in tri.tets]}


def triangulation_from_obj(obj) -> Triangulation:
    return build(obj["tets"], vertices=obj["vertices"])


def write_triangulation(tri: Triangulation, path):
    dump(triangulation_to_obj(tri), path)


def read_triangulation(path) -> Triangulation:
    return triangulation_from_obj(load(path))


# --- decorations and lengths ------------------------------------------------

def edge_key(u: str, v: str) -> str:
    for label in (u, v):
        if "-" in label:
            raise PachnerLabError(
                f"label {label!r} contains '-' and cannot be used in edge keys")
    return "-".join(sorted((u, v)))


def decoration_to_obj(coords: dict) -> dict:
    return {"coords": {v: [float(c) for c in xyz] for v, xyz in coords.items()}}


def decoration_from_obj(obj) -> dict:
    return {v: tuple(float(c) for c in xyz) for v, xyz in obj["coords"].items()}


def write_decoration(coords, path):
    dump(decoration_to_obj(coords), path)


def read_decoration(path) -> dict:
    return decoration_from_obj(load(path))


def lengths_to_obj(lengths: dict) -> dict:
    return {edge_key(*e): float(l) for e, l in sorted(lengths.items())}


def lengths_from_obj(obj) -> dict:
    out = {}
    for key, l in obj.items():
        u, v = key.split("-")
        out[tuple(sorted((u, v)))] = float(l)
    return out


# --- matrices / complexes ---------------------------------------------------

def jacobian_to_obj(edges, matrix, fd_step, symmetry_defect) -> dict:
    return {
        "edges": [edge_key(*e) for e in edges],
        "matrix": [[float(x) for x in row] for row in matrix],
        "fd_step": float(fd_step),
        "symmetry_defect": float(symmetry_defect),
    }


def complex_to_obj(dims, boundaries) -> dict:
    return {
        "dims": [int(d) for d in dims],
        "boundaries": [[[float(x) for x in row] for row in mat] for mat in boundaries],
    }


def complex_from_obj(obj):
    dims = [int(d) for d in obj["dims"]]
    boundaries = [np.array(mat, dtype=float).reshape(len(mat), -1)
                  if len(mat) else np.zeros((0, 0))
                  for mat in obj["boundaries"]]
    return dims, boundaries


# --- move logs ---------------------------------------------------------------

def movelog_to_obj(log) -> list:
    return [
        {
            "kind": r.kind,
            "consumed": [list(t) for t in r.consumed],
            "produced": [list(t) for t in r.produced],
            "new_labels": list(r.new_labels),
        }
        for r in log
    ]


def movelog_from_obj(obj):
    return tuple(
        MoveRecord(
            kind=str(r["kind"]),
            consumed=tuple(tuple(t) for t in r["consumed"]),
            produced=tuple(tuple(t) for t in r["produced"]),
            new_labels=tuple(r["new_labels"]),
        )
        for r in obj
    )
