"""Hierarchical hypergraphs with per-box consistency components.

The central data structure is :class:`EHypergraph`: a directed hypergraph
whose edges carry either a generator label or no label at all.  Unlabelled
edges are *hierarchical* ("boxes"): other vertices and edges may be nested
inside them via the immediate-parent map, and the children of each box are
partitioned into *consistency components* (the alternative branches the box
represents).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

# An element of a graph is a tagged id: ("v", vertex_id) or ("e", edge_id).
Element = tuple[str, int]


@dataclass(frozen=True)
class Generator:
    """A named operation with fixed input and output arity."""

    name: str
    arity: int
    coarity: int

    def __post_init__(self) -> None:
        if self.arity < 0 or self.coarity < 0:
            raise ValueError(f"generator {self.name}: negative arity")
        if self.arity == 0 and self.coarity == 0:
            raise ValueError(
                f"generator {self.name}: operations with no inputs and no "
                "outputs are not supported"
            )


COPY = "dup"
DISCARD = "del"


class Signature:
    """A finite set of generators, optionally with copy/delete structure.

    When ``cartesian`` is set, the signature contains the fan-out generator
    ``dup: 1 -> 2`` and the discard generator ``del: 1 -> 0`` used to encode
    sharing and unused values.
    """

    def __init__(self, generators: Iterable[Generator] = (), cartesian: bool = False):
        self.generators: dict[str, Generator] = {}
        self.cartesian = cartesian
        for gen in generators:
            self.add(gen)
        if cartesian:
            if COPY not in self.generators:
                self.add(Generator(COPY, 1, 2))
            if DISCARD not in self.generators:
                self.add(Generator(DISCARD, 1, 0))
            if self.generators[COPY].arity != 1 or self.generators[COPY].coarity != 2:
                raise ValueError(f"{COPY} must have type 1 -> 2")
            if self.generators[DISCARD].arity != 1 or self.generators[DISCARD].coarity != 0:
                raise ValueError(f"{DISCARD} must have type 1 -> 0")

    def add(self, gen: Generator) -> None:
        if gen.name in self.generators:
            raise ValueError(f"duplicate generator name: {gen.name}")
        self.generators[gen.name] = gen

    def __contains__(self, name: str) -> bool:
        return name in self.generators

    def __getitem__(self, name: str) -> Generator:
        return self.generators[name]

    def arity(self, name: str) -> tuple[int, int]:
        gen = self.generators[name]
        return gen.arity, gen.coarity


class EHypergraph:
    """A directed hypergraph with hierarchy and consistency components.

    Vertices and edges have integer ids in separate namespaces.  ``label[e]``
    is a generator name, or ``None`` for a hierarchical (box) edge.  The
    partial maps ``vparent``/``eparent`` give the immediate enclosing box of
    a vertex/edge; ``vcomp``/``ecomp`` give the index of the consistency
    component the element belongs to inside that box.  An element has a
    component index iff it has a parent.
    """

    def __init__(self) -> None:
        self.vertices: list[int] = []
        self.edges: list[int] = []
        self.source: dict[int, tuple[int, ...]] = {}
        self.target: dict[int, tuple[int, ...]] = {}
        self.label: dict[int, Optional[str]] = {}
        self.vparent: dict[int, int] = {}
        self.eparent: dict[int, int] = {}
        self.vcomp: dict[int, int] = {}
        self.ecomp: dict[int, int] = {}
        self._next_v = 0
        self._next_e = 0

    # -- construction -----------------------------------------------------

    def add_vertex(self, parent: Optional[int] = None, component: Optional[int] = None) -> int:
        v = self._next_v
        self._next_v += 1
        self.vertices.append(v)
        if parent is not None:
            if component is None:
                raise ValueError("nested vertex needs a component index")
            self.vparent[v] = parent
            self.vcomp[v] = component
        return v

    def add_edge(
        self,
        label: Optional[str],
        sources: Iterable[int],
        targets: Iterable[int],
        parent: Optional[int] = None,
        component: Optional[int] = None,
    ) -> int:
        e = self._next_e
        self._next_e += 1
        self.edges.append(e)
        self.source[e] = tuple(sources)
        self.target[e] = tuple(targets)
        self.label[e] = label
        if parent is not None:
            if component is None:
                raise ValueError("nested edge needs a component index")
            self.eparent[e] = parent
            self.ecomp[e] = component
        return e

    def copy(self) -> "EHypergraph":
        g = EHypergraph()
        g.vertices = list(self.vertices)
        g.edges = list(self.edges)
        g.source = dict(self.source)
        g.target = dict(self.target)
        g.label = dict(self.label)
        g.vparent = dict(self.vparent)
        g.eparent = dict(self.eparent)
        g.vcomp = dict(self.vcomp)
        g.ecomp = dict(self.ecomp)
        g._next_v = self._next_v
        g._next_e = self._next_e
        return g

    # -- element-level accessors ------------------------------------------

    def elements(self) -> Iterator[Element]:
        for v in self.vertices:
            yield ("v", v)
        for e in self.edges:
            yield ("e", e)

    def parent_of(self, elem: Element) -> Optional[int]:
        kind, i = elem
        return self.vparent.get(i) if kind == "v" else self.eparent.get(i)

    def component_of(self, elem: Element) -> Optional[int]:
        kind, i = elem
        return self.vcomp.get(i) if kind == "v" else self.ecomp.get(i)

    def placement(self, elem: Element) -> tuple[Optional[int], Optional[int]]:
        """(parent box id, component index) of an element; (None, None) at top level."""
        return self.parent_of(elem), self.component_of(elem)

    def is_top_level(self, elem: Element) -> bool:
        return self.parent_of(elem) is None

    def is_box(self, e: int) -> bool:
        return self.label[e] is None

    def children(self, box: int) -> list[Element]:
        out: list[Element] = [("v", v) for v in self.vertices if self.vparent.get(v) == box]
        out.extend(("e", e) for e in self.edges if self.eparent.get(e) == box)
        return out

    def ancestors(self, elem: Element) -> list[int]:
        """Chain of enclosing box ids, innermost first."""
        chain: list[int] = []
        p = self.parent_of(elem)
        seen: set[int] = set()
        while p is not None and p not in seen:
            chain.append(p)
            seen.add(p)
            p = self.eparent.get(p)
        return chain

    def depth(self, elem: Element) -> int:
        return len(self.ancestors(elem))

    def endpoints(self, e: int) -> list[int]:
        return list(self.source[e]) + list(self.target[e])

    # -- convenience ------------------------------------------------------

    def __repr__(self) -> str:
        return (
            f"EHypergraph(|V|={len(self.vertices)}, |E|={len(self.edges)}, "
            f"boxes={sum(1 for e in self.edges if self.label[e] is None)})"
        )


def validate(g: EHypergraph, sig: Optional[Signature] = None) -> list[str]:
    """Check every well-formedness condition; return the list of violations."""
    report: list[str] = []
    vset = set(g.vertices)
    eset = set(g.edges)
    if len(vset) != len(g.vertices):
        report.append("duplicate vertex ids")
    if len(eset) != len(g.edges):
        report.append("duplicate edge ids")
    for e in g.edges:
        for v in g.endpoints(e):
            if v not in vset:
                report.append(f"edge {e}: unknown endpoint vertex {v}")

    # Parents are hierarchical edges and form a forest.
    for elem in g.elements():
        p = g.parent_of(elem)
        if p is None:
            if g.component_of(elem) is not None:
                report.append(f"{elem}: component index without a parent")
            continue
        if g.component_of(elem) is None:
            report.append(f"{elem}: parent without a component index")
        if p not in eset:
            report.append(f"{elem}: unknown parent edge {p}")
        elif g.label[p] is not None:
            report.append(f"{elem}: parent edge {p} is not hierarchical")
    for e in g.edges:
        chain = set()
        p: Optional[int] = g.eparent.get(e)
        while p is not None:
            if p == e or p in chain:
                report.append(f"edge {e}: cyclic nesting chain")
                break
            chain.add(p)
            p = g.eparent.get(p)

    # Childless edges are labelled; boxes have children in >= 2 components.
    child_comps: dict[int, set[int]] = {}
    for elem in g.elements():
        p = g.parent_of(elem)
        if p is not None:
            c = g.component_of(elem)
            if c is not None:
                child_comps.setdefault(p, set()).add(c)
    for e in g.edges:
        comps = child_comps.get(e, set())
        if not comps and g.label[e] is None:
            report.append(f"edge {e}: hierarchical edge with no children")
        if comps and g.label[e] is not None:
            report.append(f"edge {e}: labelled edge used as a parent")
        if g.label[e] is None and len(comps) == 1:
            report.append(f"edge {e}: single-component box")

    # Edges live at the same placement as their endpoints, and consistency
    # is closed under connectivity.
    for e in g.edges:
        ep, ec = g.placement(("e", e))
        for v in g.endpoints(e):
            if v not in vset:
                continue
            vp, vc = g.placement(("v", v))
            if vp != ep:
                report.append(f"edge {e} and endpoint {v}: different parents")
            elif ep is not None and vc != ec:
                report.append(
                    f"edge {e} and endpoint {v}: same box, different components"
                )

    # Generator typing.
    if sig is not None:
        for e in g.edges:
            lbl = g.label[e]
            if lbl is None:
                continue
            if lbl not in sig:
                report.append(f"edge {e}: unknown generator {lbl}")
                continue
            ar, coar = sig.arity(lbl)
            if len(g.source[e]) != ar or len(g.target[e]) != coar:
                report.append(
                    f"edge {e}: generator {lbl} expects {ar} -> {coar}, "
                    f"got {len(g.source[e])} -> {len(g.target[e])}"
                )
    return report


def degrees(g: EHypergraph, v: int) -> tuple[int, int]:
    """(in-degree, out-degree) of a vertex, counting multiplicity."""
    if v not in set(g.vertices):
        raise KeyError(f"unknown vertex id {v}")
    ind = sum(g.target[e].count(v) for e in g.edges)
    outd = sum(g.source[e].count(v) for e in g.edges)
    return ind, outd


def successors(g: EHypergraph) -> dict[int, set[int]]:
    """Vertex-level step relation: v -> w when some edge consumes v and produces w."""
    succ: dict[int, set[int]] = {v: set() for v in g.vertices}
    for e in g.edges:
        for u in g.source[e]:
            succ[u].update(g.target[e])
    return succ


def is_acyclic(g: EHypergraph) -> bool:
    """True when no directed path of edges returns to its starting edge."""
    enext: dict[int, set[int]] = {e: set() for e in g.edges}
    produced: dict[int, list[int]] = {}
    for e in g.edges:
        for v in g.target[e]:
            produced.setdefault(v, []).append(e)
    for e in g.edges:
        for v in g.source[e]:
            for d in produced.get(v, ()):
                enext[d].add(e)
    # Kahn-style cycle detection over the edge graph.
    indeg = {e: 0 for e in g.edges}
    for e, outs in enext.items():
        for d in outs:
            indeg[d] += 1
    queue = [e for e, k in indeg.items() if k == 0]
    seen = 0
    while queue:
        e = queue.pop()
        seen += 1
        for d in enext[e]:
            indeg[d] -= 1
            if indeg[d] == 0:
                queue.append(d)
    return seen == len(g.edges)


def down_closure(g: EHypergraph, seed: Iterable[int]) -> set[Element]:
    """Smallest element set containing the seed edges, closed under taking
    children of included edges and endpoints of included edges."""
    closed: set[Element] = set()
    todo: list[Element] = [("e", e) for e in seed]
    while todo:
        elem = todo.pop()
        if elem in closed:
            continue
        closed.add(elem)
        if elem[0] == "e":
            e = elem[1]
            for v in g.endpoints(e):
                if ("v", v) not in closed:
                    todo.append(("v", v))
            if g.label[e] is None:
                for child in g.children(e):
                    if child not in closed:
                        todo.append(child)
    return closed


def is_convex(g: EHypergraph, sub: set[Element]) -> bool:
    """True when every directed path between vertices of ``sub`` stays in ``sub``."""
    sub_vs = {i for k, i in sub if k == "v"}
    if not sub_vs:
        return True
    succ = successors(g)

    def reach(starts: set[int]) -> set[int]:
        seen = set(starts)
        todo = list(starts)
        while todo:
            v = todo.pop()
            for w in succ[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    fwd = reach(sub_vs)
    pred: dict[int, set[int]] = {v: set() for v in g.vertices}
    for v, ws in succ.items():
        for w in ws:
            pred[w].add(v)
    bwd = set(sub_vs)
    todo = list(sub_vs)
    while todo:
        v = todo.pop()
        for u in pred[v]:
            if u not in bwd:
                bwd.add(u)
                todo.append(u)
    # A vertex lies on some sub-to-sub path iff it is both reachable from sub
    # and reaches sub; an edge does iff one of its sources is reachable and
    # one of its targets reaches back.
    between = fwd & bwd
    for v in between:
        if ("v", v) not in sub:
            return False
    for e in g.edges:
        if ("e", e) in sub:
            continue
        if any(u in fwd for u in g.source[e]) and any(w in bwd for w in g.target[e]):
            return False
    return True


@dataclass
class EHomomorphism:
    """A structure-preserving map between hierarchical hypergraphs."""

    dom: EHypergraph
    cod: EHypergraph
    vmap: dict[int, int] = field(default_factory=dict)
    emap: dict[int, int] = field(default_factory=dict)

    def apply(self, elem: Element) -> Element:
        kind, i = elem
        return (kind, self.vmap[i] if kind == "v" else self.emap[i])

    def violations(self) -> list[str]:
        report: list[str] = []
        cod_vs = set(self.cod.vertices)
        cod_es = set(self.cod.edges)
        for v in self.dom.vertices:
            if v not in self.vmap:
                report.append(f"vertex {v} unmapped")
            elif self.vmap[v] not in cod_vs:
                report.append(f"vertex {v} maps outside codomain")
        for e in self.dom.edges:
            if e not in self.emap:
                report.append(f"edge {e} unmapped")
                continue
            img = self.emap[e]
            if img not in cod_es:
                report.append(f"edge {e} maps outside codomain")
                continue
            if self.dom.label[e] != self.cod.label[img]:
                report.append(f"edge {e}: label not preserved")
            try:
                src = tuple(self.vmap[v] for v in self.dom.source[e])
                tgt = tuple(self.vmap[v] for v in self.dom.target[e])
            except KeyError:
                continue
            if src != self.cod.source[img] or tgt != self.cod.target[img]:
                report.append(f"edge {e}: sources/targets not preserved")
        if report:
            return report
        # Immediate parents.
        for elem in self.dom.elements():
            p = self.dom.parent_of(elem)
            if p is None:
                continue
            img_parent = self.cod.parent_of(self.apply(elem))
            if img_parent != self.emap.get(p):
                report.append(f"{elem}: immediate parent not preserved")
        # Consistency: elements sharing a (box, component) placement must map
        # to elements sharing a placement.
        groups: dict[tuple[int, int], list[Element]] = {}
        for elem in self.dom.elements():
            p, c = self.dom.placement(elem)
            if p is not None and c is not None:
                groups.setdefault((p, c), []).append(elem)
        for key, members in groups.items():
            placements = {self.cod.placement(self.apply(x)) for x in members}
            if len(placements) > 1 or (None, None) in placements:
                report.append(f"consistency group {key}: not preserved")
        return report

    def is_valid(self) -> bool:
        return not self.violations()

    def is_mono(self) -> bool:
        return len(set(self.vmap.values())) == len(self.vmap) and len(
            set(self.emap.values())
        ) == len(self.emap)

    def image(self) -> set[Element]:
        out: set[Element] = {("v", w) for w in self.vmap.values()}
        out.update(("e", d) for d in self.emap.values())
        return out

    def then(self, other: "EHomomorphism") -> "EHomomorphism":
        if other.dom is not self.cod:
            raise ValueError("composition mismatch")
        return EHomomorphism(
            dom=self.dom,
            cod=other.cod,
            vmap={v: other.vmap[w] for v, w in self.vmap.items()},
            emap={e: other.emap[d] for e, d in self.emap.items()},
        )


def identity_hom(g: EHypergraph) -> EHomomorphism:
    return EHomomorphism(
        dom=g, cod=g, vmap={v: v for v in g.vertices}, emap={e: e for e in g.edges}
    )
