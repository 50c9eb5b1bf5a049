"""JSON documents for layout graphs and effective lattices (schema ``hyperlat/lattice/v1``)."""
from __future__ import annotations

import json
from typing import Union

import jsonschema
import numpy as np

from .lattice import EffectiveLattice, LayoutGraph

SCHEMA_ID = "hyperlat/lattice/v1"

_INT = {"type": "integer", "minimum": 0}
_PAIR = {"type": "array", "items": _INT, "minItems": 2, "maxItems": 2}
_NUM = {"type": "number"}

_LAYOUT = {
    "type": "object",
    "required": ["p", "shells", "geometry", "vertices", "edges", "faces"],
    "additionalProperties": False,
    "properties": {
        "p": {"type": "integer", "minimum": 3},
        "shells": _INT,
        "geometry": {"enum": ["hyperbolic", "euclidean"]},
        "vertices": {"type": "array", "items": {
            "type": "object", "required": ["id", "x", "y"], "additionalProperties": False,
            "properties": {"id": _INT, "x": _NUM, "y": _NUM, "shell": _INT}}},
        "edges": {"type": "array", "items": {
            "type": "object", "required": ["id", "v"], "additionalProperties": False,
            "properties": {"id": _INT, "v": _PAIR, "mid": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}}}},
        "faces": {"type": "array", "items": {
            "type": "object", "required": ["id", "edges", "vertices"], "additionalProperties": False,
            "properties": {"id": _INT, "edges": {"type": "array", "items": _INT, "minItems": 3},
                           "vertices": {"type": "array", "items": _INT, "minItems": 3}, "shell": _INT}}},
    },
}

_EFFECTIVE = {
    "type": "object",
    "required": ["sites", "bonds"],
    "additionalProperties": False,
    "properties": {
        "p": {"type": ["integer", "null"]},
        "geometry": {"enum": ["hyperbolic", "euclidean"]},
        "sites": {"type": "array", "items": {
            "type": "object", "required": ["id", "x", "y"], "additionalProperties": False,
            "properties": {"id": _INT, "x": _NUM, "y": _NUM, "parent_edge": _INT, "ends": _PAIR,
                           "boundary": {"type": "boolean"}, "shell": _INT}}},
        "bonds": {"type": "array", "items": {
            "type": "object", "required": ["sites"], "additionalProperties": False,
            "properties": {"sites": _PAIR, "vertex": _INT}}},
        "triangles": {"type": "array", "items": {"type": "array", "items": _INT, "minItems": 3, "maxItems": 3}},
        "polygons": {"type": "array", "items": {"type": "array", "items": _INT, "minItems": 3}},
        "layout": _LAYOUT,
    },
}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "required": ["schema", "kind"],
    "properties": {
        "schema": {"const": SCHEMA_ID},
        "kind": {"enum": ["layout", "effective"]},
        "layout": _LAYOUT,
        "effective": _EFFECTIVE,
    },
    "additionalProperties": False,
    "allOf": [
        {"if": {"properties": {"kind": {"const": "layout"}}}, "then": {"required": ["layout"]}},
        {"if": {"properties": {"kind": {"const": "effective"}}}, "then": {"required": ["effective"]}},
    ],
}

_VALIDATOR = jsonschema.Draft202012Validator(SCHEMA)


class SchemaError(ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path


def _layout_doc(g: LayoutGraph) -> dict:
    return {
        "p": int(g.p),
        "shells": int(g.shells),
        "geometry": g.geometry,
        "vertices": [{"id": i, "x": float(z.real), "y": float(z.imag), "shell": int(s)}
                     for i, (z, s) in enumerate(zip(g.vertices, g.vertex_shell))],
        "edges": [{"id": i, "v": [int(u), int(v)], "mid": [float(m.real), float(m.imag)]}
                  for i, ((u, v), m) in enumerate(zip(g.edges, g.edge_midpoints))],
        "faces": [{"id": i, "edges": [int(e) for e in cyc], "vertices": [int(v) for v in verts], "shell": int(s)}
                  for i, (cyc, verts, s) in enumerate(zip(g.faces, g.face_vertices, g.face_shell))],
    }


def _effective_doc(lat: EffectiveLattice) -> dict:
    sites = []
    for i, z in enumerate(lat.coords):
        s = {"id": i, "x": float(z.real), "y": float(z.imag)}
        if lat.parent_edge is not None:
            s["parent_edge"] = int(lat.parent_edge[i])
        if lat.ends is not None:
            s["ends"] = [int(x) for x in lat.ends[i]]
        s["boundary"] = bool(lat.boundary[i])
        s["shell"] = int(lat.site_shell[i])
        sites.append(s)
    bonds = []
    for k, (i, j) in enumerate(lat.bonds):
        b = {"sites": [int(i), int(j)]}
        if lat.bond_vertex is not None:
            b["vertex"] = int(lat.bond_vertex[k])
        bonds.append(b)
    doc = {
        "p": None if lat.p is None else int(lat.p),
        "geometry": lat.geometry,
        "sites": sites,
        "bonds": bonds,
        "triangles": [[int(x) for x in t] for t in lat.triangles],
        "polygons": [[int(x) for x in c] for c in lat.polygons],
    }
    if lat.layout is not None:
        doc["layout"] = _layout_doc(lat.layout)
    return doc


def to_dict(obj: Union[LayoutGraph, EffectiveLattice]) -> dict:
    if isinstance(obj, LayoutGraph):
        return {"schema": SCHEMA_ID, "kind": "layout", "layout": _layout_doc(obj)}
    if isinstance(obj, EffectiveLattice):
        return {"schema": SCHEMA_ID, "kind": "effective", "effective": _effective_doc(obj)}
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def serialize(obj: Union[LayoutGraph, EffectiveLattice], indent=None) -> str:
    return json.dumps(to_dict(obj), indent=indent)


def _check_ids(items, path: str) -> None:
    for k, item in enumerate(items):
        if item["id"] != k:
            raise SchemaError(f"{path}[{k}].id", f"ids must be 0..n-1 in order, got {item['id']}")


def _check_refs(values, limit: int, path: str) -> None:
    for k, v in enumerate(values):
        if not 0 <= v < limit:
            raise SchemaError(f"{path}[{k}]", f"reference {v} out of range (0..{limit - 1})")


def _layout_from(d: dict, path: str) -> LayoutGraph:
    _check_ids(d["vertices"], f"{path}.vertices")
    _check_ids(d["edges"], f"{path}.edges")
    _check_ids(d["faces"], f"{path}.faces")
    nv = len(d["vertices"])
    for k, e in enumerate(d["edges"]):
        _check_refs(e["v"], nv, f"{path}.edges[{k}].v")
    for k, f in enumerate(d["faces"]):
        _check_refs(f["edges"], len(d["edges"]), f"{path}.faces[{k}].edges")
        _check_refs(f["vertices"], nv, f"{path}.faces[{k}].vertices")
        if len(f["edges"]) != d["p"] or len(f["vertices"]) != d["p"]:
            raise SchemaError(f"{path}.faces[{k}]", f"face must have p = {d['p']} edges and vertices")
    verts = np.array([complex(v["x"], v["y"]) for v in d["vertices"]], dtype=complex)
    edges = np.array([e["v"] for e in d["edges"]], dtype=int).reshape(-1, 2)
    mids = []
    for e in d["edges"]:
        if "mid" in e:
            mids.append(complex(*e["mid"]))
        else:
            mids.append((verts[e["v"][0]] + verts[e["v"][1]]) / 2)
    return LayoutGraph(
        p=d["p"], shells=d["shells"], geometry=d["geometry"],
        vertices=verts,
        vertex_shell=np.array([v.get("shell", 0) for v in d["vertices"]], dtype=int),
        edges=edges,
        edge_midpoints=np.array(mids, dtype=complex),
        faces=tuple(tuple(f["edges"]) for f in d["faces"]),
        face_vertices=tuple(tuple(f["vertices"]) for f in d["faces"]),
        face_shell=np.array([f.get("shell", 0) for f in d["faces"]], dtype=int),
    )


def _effective_from(d: dict, path: str) -> EffectiveLattice:
    sites = d["sites"]
    _check_ids(sites, f"{path}.sites")
    n = len(sites)
    for k, b in enumerate(d["bonds"]):
        _check_refs(b["sites"], n, f"{path}.bonds[{k}].sites")
        if b["sites"][0] == b["sites"][1]:
            raise SchemaError(f"{path}.bonds[{k}].sites", "self-bond")
    for key in ("triangles", "polygons"):
        for k, c in enumerate(d.get(key, [])):
            _check_refs(c, n, f"{path}.{key}[{k}]")
    has_ends = all("ends" in s for s in sites) and n > 0
    has_vertex = all("vertex" in b for b in d["bonds"]) and has_ends
    bonds = np.array([sorted(b["sites"]) for b in d["bonds"]], dtype=int).reshape(-1, 2)
    layout = _layout_from(d["layout"], f"{path}.layout") if "layout" in d else None
    return EffectiveLattice(
        coords=np.array([complex(s["x"], s["y"]) for s in sites], dtype=complex),
        parent_edge=np.array([s.get("parent_edge", i) for i, s in enumerate(sites)], dtype=int),
        ends=np.array([s["ends"] for s in sites], dtype=int).reshape(-1, 2) if has_ends else None,
        bonds=bonds,
        bond_vertex=np.array([b["vertex"] for b in d["bonds"]], dtype=int) if has_vertex else None,
        boundary=np.array([s.get("boundary", False) for s in sites], dtype=bool),
        site_shell=np.array([s.get("shell", 0) for s in sites], dtype=int),
        triangles=tuple(tuple(t) for t in d.get("triangles", [])),
        polygons=tuple(tuple(c) for c in d.get("polygons", [])),
        p=d.get("p"),
        geometry=d.get("geometry", "hyperbolic"),
        layout=layout,
    )


def from_dict(doc) -> Union[LayoutGraph, EffectiveLattice]:
    errors = sorted(_VALIDATOR.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise SchemaError(e.json_path, e.message)
    if doc["kind"] == "layout":
        return _layout_from(doc["layout"], "$.layout")
    return _effective_from(doc["effective"], "$.effective")


def deserialize(text: str) -> Union[LayoutGraph, EffectiveLattice]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("$", f"invalid JSON: {exc}") from None
    return from_dict(doc)


def _arr_eq(a, b, tol) -> bool:
    if a is None or b is None:
        return a is None and b is None
    a, b = np.asarray(a), np.asarray(b)
    if a.shape != b.shape:
        return False
    if np.iscomplexobj(a) or np.iscomplexobj(b) or a.dtype.kind == "f":
        return bool(np.all(np.abs(a - b) <= tol))
    return bool(np.array_equal(a, b))


def layouts_equal(a: LayoutGraph, b: LayoutGraph, tol: float = 1e-12) -> bool:
    return (a.p == b.p and a.shells == b.shells and a.geometry == b.geometry
            and _arr_eq(a.vertices, b.vertices, tol) and _arr_eq(a.vertex_shell, b.vertex_shell, 0)
            and _arr_eq(a.edges, b.edges, 0) and _arr_eq(a.edge_midpoints, b.edge_midpoints, tol)
            and a.faces == b.faces and a.face_vertices == b.face_vertices
            and _arr_eq(a.face_shell, b.face_shell, 0))


def lattices_equal(a: EffectiveLattice, b: EffectiveLattice, tol: float = 1e-12) -> bool:
    same = (_arr_eq(a.coords, b.coords, tol) and _arr_eq(a.parent_edge, b.parent_edge, 0)
            and _arr_eq(a.ends, b.ends, 0) and _arr_eq(a.bonds, b.bonds, 0)
            and _arr_eq(a.bond_vertex, b.bond_vertex, 0) and _arr_eq(a.boundary, b.boundary, 0)
            and _arr_eq(a.site_shell, b.site_shell, 0) and a.triangles == b.triangles
            and a.polygons == b.polygons and a.p == b.p and a.geometry == b.geometry)
    if not same:
        return False
    if (a.layout is None) != (b.layout is None):
        return False
    return a.layout is None or layouts_equal(a.layout, b.layout, tol)
