"""JSON serialization for graphs, cospans, and e-graphs.

Graph documents carry ``vertices``, ``edges`` (id, label, sources, targets)
and ``parents`` (child, parent, component); children are written as ``"v3"``
or ``"e7"`` since vertex and edge ids live in separate spaces.  Cospan
documents add the four interface fields.  Round-trips are exact after
canonical renumbering.  E-graph documents carry ``classes`` with their nodes.
"""

from __future__ import annotations

import json
from typing import Any

from .core import EHypergraph
from .cospan import ExtendedCospan
from .egraph import EGraph, ENode


class SerializationError(Exception):
    pass


HIERARCHICAL = "#box"


def _child_ref(kind: str, i: int) -> str:
    return f"{kind}{i}"


def _parse_child(ref: str) -> tuple[str, int]:
    if not ref or ref[0] not in "ve" or not ref[1:].isdigit():
        raise SerializationError(f"bad child reference {ref!r}")
    return ref[0], int(ref[1:])


def graph_to_doc(g: EHypergraph) -> dict[str, Any]:
    parents = []
    for v in g.vertices:
        if v in g.vparent:
            parents.append(
                {"child": _child_ref("v", v), "parent": g.vparent[v],
                 "component": g.vcomp[v]}
            )
    for e in g.edges:
        if e in g.eparent:
            parents.append(
                {"child": _child_ref("e", e), "parent": g.eparent[e],
                 "component": g.ecomp[e]}
            )
    return {
        "vertices": list(g.vertices),
        "edges": [
            {
                "id": e,
                "label": HIERARCHICAL if g.label[e] is None else g.label[e],
                "sources": list(g.source[e]),
                "targets": list(g.target[e]),
            }
            for e in g.edges
        ],
        "parents": parents,
    }


def graph_from_doc(doc: dict[str, Any]) -> EHypergraph:
    g = EHypergraph()
    try:
        vmap = {}
        for v in doc["vertices"]:
            vmap[int(v)] = g.add_vertex()
        emap = {}
        for ed in doc["edges"]:
            label = ed["label"]
            emap[int(ed["id"])] = g.add_edge(
                None if label == HIERARCHICAL else str(label),
                [vmap[int(v)] for v in ed["sources"]],
                [vmap[int(v)] for v in ed["targets"]],
            )
        for pd in doc.get("parents", []):
            kind, i = _parse_child(str(pd["child"]))
            parent = emap[int(pd["parent"])]
            comp = int(pd["component"])
            if kind == "v":
                g.vparent[vmap[i]] = parent
                g.vcomp[vmap[i]] = comp
            else:
                g.eparent[emap[i]] = parent
                g.ecomp[emap[i]] = comp
        # remember the renumbering for interface fields
        g._doc_vmap = vmap  # type: ignore[attr-defined]
        return g
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError(f"malformed graph document: {exc}") from exc


def cospan_to_doc(c: ExtendedCospan) -> dict[str, Any]:
    doc = graph_to_doc(c.carrier)
    doc["int_in"] = list(c.int_in)
    doc["int_out"] = list(c.int_out)
    doc["ext_in"] = list(c.ext_in)
    doc["ext_out"] = list(c.ext_out)
    return doc


def cospan_from_doc(doc: dict[str, Any]) -> ExtendedCospan:
    g = graph_from_doc(doc)
    vmap = g._doc_vmap  # type: ignore[attr-defined]
    del g._doc_vmap  # type: ignore[attr-defined]
    try:
        return ExtendedCospan(
            g,
            tuple(vmap[int(v)] for v in doc.get("int_in", [])),
            tuple(vmap[int(v)] for v in doc.get("int_out", [])),
            tuple(int(p) for p in doc.get("ext_in", [])),
            tuple(int(p) for p in doc.get("ext_out", [])),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError(f"malformed cospan document: {exc}") from exc


def canonical_renumber(c: ExtendedCospan) -> ExtendedCospan:
    """Rebuild with vertex/edge ids 0..n-1 in allocation order."""
    g = c.carrier
    ng = EHypergraph()
    vmap = {v: ng.add_vertex() for v in g.vertices}
    emap = {}
    for e in g.edges:
        emap[e] = ng.add_edge(
            g.label[e],
            [vmap[v] for v in g.source[e]],
            [vmap[v] for v in g.target[e]],
        )
    for v in g.vertices:
        if v in g.vparent:
            ng.vparent[vmap[v]] = emap[g.vparent[v]]
            ng.vcomp[vmap[v]] = g.vcomp[v]
    for e in g.edges:
        if e in g.eparent:
            ng.eparent[emap[e]] = emap[g.eparent[e]]
            ng.ecomp[emap[e]] = g.ecomp[e]
    return ExtendedCospan(
        ng,
        tuple(vmap[v] for v in c.int_in),
        tuple(vmap[v] for v in c.int_out),
        tuple(c.ext_in),
        tuple(c.ext_out),
    )


def dumps_cospan(c: ExtendedCospan) -> str:
    return json.dumps(cospan_to_doc(canonical_renumber(c)), indent=2) + "\n"


def loads_cospan(text: str) -> ExtendedCospan:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SerializationError("top-level document must be an object")
    return cospan_from_doc(doc)


# ---------------------------------------------------------------------------
# E-graphs
# ---------------------------------------------------------------------------


def egraph_to_doc(eg: EGraph) -> dict[str, Any]:
    return {
        "classes": [
            {
                "id": c,
                "nodes": [
                    {"head": n.head, "children": list(n.children)}
                    for n in eg.nodes(c)
                ],
            }
            for c in eg.class_ids()
        ]
    }


def egraph_from_doc(doc: dict[str, Any]) -> EGraph:
    eg = EGraph()
    try:
        for cd in doc["classes"]:
            cid = int(cd["id"])
            eg._uf[cid] = cid
            eg.classes[cid] = set()
            eg._next = max(eg._next, cid + 1)
        for cd in doc["classes"]:
            cid = int(cd["id"])
            for nd in cd["nodes"]:
                n = ENode(str(nd["head"]), tuple(int(x) for x in nd["children"]))
                eg.classes[cid].add(n)
                eg.hashcons[n] = cid
    except (KeyError, TypeError, ValueError) as exc:
        raise SerializationError(f"malformed e-graph document: {exc}") from exc
    bad = eg.check_invariants()
    if bad:
        raise SerializationError(f"e-graph document violates invariants: {bad[0]}")
    return eg


def loads_egraph(text: str) -> EGraph:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SerializationError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise SerializationError("top-level document must be an object")
    return egraph_from_doc(doc)


def dumps_egraph(eg: EGraph) -> str:
    return json.dumps(egraph_to_doc(eg), indent=2) + "\n"
