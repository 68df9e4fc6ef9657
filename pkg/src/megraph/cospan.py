"""Cospans of hierarchical hypergraphs with two-level interfaces.

An :class:`ExtendedCospan` wraps a carrier graph together with ordered input
and output interfaces.  Each side has an *internal* interface (one slot per
dangling wire, including wires hidden inside boxes) and an *external*
interface (the subsequence of internal slots that is visible from outside).
Slots of the internal interface that are not external point at vertices
nested inside boxes.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Iterator, Optional, Sequence

from .core import (
    EHomomorphism,
    EHypergraph,
    Element,
    Signature,
    degrees,
    is_acyclic,
    validate,
)


class CospanError(Exception):
    """Malformed cospan or ill-typed cospan operation."""


class PushoutPreconditionError(Exception):
    """A gluing does not satisfy the preconditions for the pushout to exist.

    ``assumptions`` lists the numbers of the violated preconditions:
    (1) shared part discrete, (2) equal ancestor chains across all glue
    points of one leg, (3) no glue point nested on both sides, (4) equal
    consistency classes across all glue points of one leg.
    """

    def __init__(self, assumptions: list[int], message: str = ""):
        self.assumptions = assumptions
        super().__init__(f"pushout preconditions violated: {assumptions} {message}")


@dataclass
class ExtendedCospan:
    """A carrier graph with ordered two-level interfaces.

    ``int_in``/``int_out`` hold the carrier vertex for each internal slot, in
    slot order.  ``ext_in``/``ext_out`` hold the positions (indices into
    ``int_in``/``int_out``) of the external slots, in external order.
    """

    carrier: EHypergraph
    int_in: tuple[int, ...]
    int_out: tuple[int, ...]
    ext_in: tuple[int, ...]
    ext_out: tuple[int, ...]

    # -- derived views -----------------------------------------------------

    @property
    def arity(self) -> int:
        return len(self.ext_in)

    @property
    def coarity(self) -> int:
        return len(self.ext_out)

    def ext_in_vertices(self) -> tuple[int, ...]:
        return tuple(self.int_in[p] for p in self.ext_in)

    def ext_out_vertices(self) -> tuple[int, ...]:
        return tuple(self.int_out[p] for p in self.ext_out)

    def strict_in_positions(self) -> tuple[int, ...]:
        ext = set(self.ext_in)
        return tuple(p for p in range(len(self.int_in)) if p not in ext)

    def strict_out_positions(self) -> tuple[int, ...]:
        ext = set(self.ext_out)
        return tuple(p for p in range(len(self.int_out)) if p not in ext)

    def copy(self) -> "ExtendedCospan":
        return ExtendedCospan(
            self.carrier.copy(), self.int_in, self.int_out, self.ext_in, self.ext_out
        )

    def __repr__(self) -> str:
        return (
            f"ExtendedCospan({self.arity} -> {self.coarity}, "
            f"slots {len(self.int_in)}/{len(self.int_out)}, {self.carrier!r})"
        )


def validate_cospan(c: ExtendedCospan, sig: Optional[Signature] = None) -> list[str]:
    """Interface well-formedness; carrier conditions included when possible."""
    report = validate(c.carrier, sig)
    vset = set(c.carrier.vertices)
    for side, slots, ext in (
        ("input", c.int_in, c.ext_in),
        ("output", c.int_out, c.ext_out),
    ):
        for v in slots:
            if v not in vset:
                report.append(f"{side} slot vertex {v} not in carrier")
        if len(set(ext)) != len(ext):
            report.append(f"{side} external positions not injective")
        for p in ext:
            if not (0 <= p < len(slots)):
                report.append(f"{side} external position {p} out of range")
                continue
            if slots[p] in vset and not c.carrier.is_top_level(("v", slots[p])):
                report.append(f"{side} external slot {p} maps to a nested vertex")
        for p in range(len(slots)):
            if p in set(ext) or slots[p] not in vset:
                continue
            if c.carrier.is_top_level(("v", slots[p])):
                report.append(
                    f"{side} strictly internal slot {p} maps to a top-level vertex"
                )
    return report


def is_mda_well_typed(c: ExtendedCospan) -> list[str]:
    """Monogamous-directed-acyclic and box-typing conditions; [] when all hold."""
    report: list[str] = []
    g = c.carrier
    if not is_acyclic(g):
        report.append("carrier has a directed cycle")
    if len(set(c.int_in)) != len(c.int_in):
        report.append("input internal interface not injective")
    if len(set(c.int_out)) != len(c.int_out):
        report.append("output internal interface not injective")
    ins, outs = set(c.int_in), set(c.int_out)
    for v in g.vertices:
        ind, outd = degrees(g, v)
        if ind > 1 or outd > 1:
            report.append(f"vertex {v}: degree above 1 (in={ind}, out={outd})")
        if (ind == 0) != (v in ins):
            report.append(f"vertex {v}: in-degree-0 iff input-slot violated")
        if (outd == 0) != (v in outs):
            report.append(f"vertex {v}: out-degree-0 iff output-slot violated")
    report.extend(_box_typing(c))
    return report


def _box_typing(c: ExtendedCospan) -> list[str]:
    """Each component of each box must expose |sources| inputs and |targets| outputs."""
    report: list[str] = []
    g = c.carrier
    strict_in = {c.int_in[p] for p in c.strict_in_positions()}
    strict_out = {c.int_out[p] for p in c.strict_out_positions()}
    for e in g.edges:
        if g.label[e] is not None:
            continue
        comps: set[int] = set()
        box_in: dict[int, int] = {}
        box_out: dict[int, int] = {}
        for kind, i in g.children(e):
            comp = g.vcomp[i] if kind == "v" else g.ecomp[i]
            comps.add(comp)
            if kind == "v":
                if i in strict_in:
                    box_in[comp] = box_in.get(comp, 0) + 1
                if i in strict_out:
                    box_out[comp] = box_out.get(comp, 0) + 1
        want_in, want_out = len(g.source[e]), len(g.target[e])
        for comp in sorted(comps):
            if box_in.get(comp, 0) != want_in:
                report.append(
                    f"box {e} component {comp}: {box_in.get(comp, 0)} inputs, "
                    f"expected {want_in}"
                )
            if box_out.get(comp, 0) != want_out:
                report.append(
                    f"box {e} component {comp}: {box_out.get(comp, 0)} outputs, "
                    f"expected {want_out}"
                )
    return report


# ---------------------------------------------------------------------------
# Carrier isomorphism search
# ---------------------------------------------------------------------------


def _vertex_invariant(g: EHypergraph, flags: dict[int, object]):
    degs = {v: degrees(g, v) for v in g.vertices}

    def sig(v: int):
        return (g.depth(("v", v)), degs[v], flags.get(v))

    return sig


def carrier_isomorphisms(
    ga: EHypergraph,
    gb: EHypergraph,
    forced: Optional[dict[int, int]] = None,
    flags_a: Optional[dict[int, object]] = None,
    flags_b: Optional[dict[int, object]] = None,
) -> Iterator[tuple[dict[int, int], dict[int, int]]]:
    """Yield (vertex map, edge map) pairs witnessing carrier isomorphism.

    ``forced`` pins vertex assignments up front.  ``flags`` attach extra
    invariants (e.g. interface membership) that must be preserved.
    """
    forced = forced or {}
    flags_a = flags_a or {}
    flags_b = flags_b or {}
    if len(ga.vertices) != len(gb.vertices) or len(ga.edges) != len(gb.edges):
        return
    siga = _vertex_invariant(ga, flags_a)
    sigb = _vertex_invariant(gb, flags_b)
    if sorted(map(repr, (siga(v) for v in ga.vertices))) != sorted(
        map(repr, (sigb(v) for v in gb.vertices))
    ):
        return

    def esig(g: EHypergraph, e: int):
        return (g.label[e], len(g.source[e]), len(g.target[e]), g.depth(("e", e)))

    if sorted(map(repr, (esig(ga, e) for e in ga.edges))) != sorted(
        map(repr, (esig(gb, e) for e in gb.edges))
    ):
        return

    vmap: dict[int, int] = {}
    emap: dict[int, int] = {}
    used_v: set[int] = set()
    used_e: set[int] = set()
    # Component correspondence per box: (dom box, dom comp) -> cod comp,
    # with a reverse map enforcing injectivity per box.
    compmap: dict[tuple[int, int], int] = {}
    comprev: dict[tuple[int, int], int] = {}

    def try_vertex(va: int, vb: int, undo: list) -> bool:
        if va in vmap:
            return vmap[va] == vb
        if vb in used_v:
            return False
        if repr(siga(va)) != repr(sigb(vb)):
            return False
        pa, pb = ga.vparent.get(va), gb.vparent.get(vb)
        if (pa is None) != (pb is None):
            return False
        if pa is not None:
            if emap.get(pa) != pb:
                return False
            if not try_comp(pa, ga.vcomp[va], gb.vcomp[vb], undo):
                return False
        vmap[va] = vb
        used_v.add(vb)
        undo.append(("v", va, vb))
        return True

    def try_comp(pa: int, ca: int, cb: int, undo: list) -> bool:
        key = (pa, ca)
        if key in compmap:
            return compmap[key] == cb
        rkey = (pa, cb)
        if rkey in comprev:
            return False
        compmap[key] = cb
        comprev[rkey] = ca
        undo.append(("c", key, rkey))
        return True

    def undo_all(undo: list) -> None:
        for item in reversed(undo):
            if item[0] == "v":
                del vmap[item[1]]
                used_v.discard(item[2])
            elif item[0] == "e":
                del emap[item[1]]
                used_e.discard(item[2])
            else:
                del compmap[item[1]]
                del comprev[item[2]]

    # Seed forced assignments.
    seed_undo: list = []
    for va, vb in forced.items():
        if not try_vertex(va, vb, seed_undo):
            return

    edges_a = sorted(ga.edges, key=lambda e: (ga.depth(("e", e)), e))
    by_sig: dict[str, list[int]] = {}
    for e in gb.edges:
        by_sig.setdefault(repr(esig(gb, e)), []).append(e)

    def try_edge(ea: int, eb: int, undo: list) -> bool:
        if eb in used_e:
            return False
        pa, pb = ga.eparent.get(ea), gb.eparent.get(eb)
        if (pa is None) != (pb is None):
            return False
        if pa is not None:
            if emap.get(pa) != pb:
                return False
            if not try_comp(pa, ga.ecomp[ea], gb.ecomp[eb], undo):
                return False
        emap[ea] = eb
        used_e.add(eb)
        undo.append(("e", ea, eb))
        for va, vb in zip(ga.endpoints(ea), gb.endpoints(eb)):
            if not try_vertex(va, vb, undo):
                return False
        return True

    rest_a = None  # filled once edges are matched

    def search(idx: int) -> Iterator[tuple[dict[int, int], dict[int, int]]]:
        if idx == len(edges_a):
            yield from assign_vertices(0)
            return
        ea = edges_a[idx]
        for eb in by_sig.get(repr(esig(ga, ea)), ()):
            undo: list = []
            if try_edge(ea, eb, undo):
                yield from search(idx + 1)
            undo_all(undo)

    def assign_vertices(idx: int) -> Iterator[tuple[dict[int, int], dict[int, int]]]:
        nonlocal rest_a
        if idx == 0:
            rest_a = [v for v in ga.vertices if v not in vmap]
        if idx == len(rest_a):
            yield dict(vmap), dict(emap)
            return
        va = rest_a[idx]
        for vb in gb.vertices:
            undo: list = []
            if try_vertex(va, vb, undo):
                yield from assign_vertices(idx + 1)
            undo_all(undo)

    yield from search(0)


@dataclass
class IsoWitness:
    """Carrier isomorphism plus the two interface bijections (as position maps)."""

    alpha: EHomomorphism
    beta: tuple[int, ...]  # input slot p of a corresponds to slot beta[p] of b
    gamma: tuple[int, ...]


def _slot_blocks(
    c: ExtendedCospan, slots: tuple[int, ...], strict: tuple[int, ...]
) -> dict[tuple[int, int], list[int]]:
    """Group strictly internal slot positions by the (box, component) of their image."""
    blocks: dict[tuple[int, int], list[int]] = {}
    for p in strict:
        v = slots[p]
        parent, comp = c.carrier.placement(("v", v))
        if parent is None or comp is None:
            # Invalid cospan shape; treat each as its own block.
            blocks.setdefault((-1, -p - 1), []).append(p)
        else:
            blocks.setdefault((parent, comp), []).append(p)
    return blocks


def _interface_bijection(
    a: ExtendedCospan,
    b: ExtendedCospan,
    side: str,
    vmap: dict[int, int],
) -> Optional[tuple[int, ...]]:
    if side == "in":
        slots_a, ext_a, strict_a = a.int_in, a.ext_in, a.strict_in_positions()
        slots_b, ext_b, strict_b = b.int_in, b.ext_in, b.strict_in_positions()
    else:
        slots_a, ext_a, strict_a = a.int_out, a.ext_out, a.strict_out_positions()
        slots_b, ext_b, strict_b = b.int_out, b.ext_out, b.strict_out_positions()
    if len(slots_a) != len(slots_b) or len(ext_a) != len(ext_b):
        return None
    out: dict[int, int] = {}
    # External slots are pinned pointwise and must commute with the carrier map.
    for pa, pb in zip(ext_a, ext_b):
        if vmap.get(slots_a[pa]) != slots_b[pb]:
            return None
        out[pa] = pb
    blocks_a = _slot_blocks(a, slots_a, strict_a)
    blocks_b = _slot_blocks(b, slots_b, strict_b)
    if len(blocks_a) != len(blocks_b):
        return None
    for key_a, positions_a in blocks_a.items():
        v0 = slots_a[positions_a[0]]
        image_key = b.carrier.placement(("v", vmap[v0]))
        positions_b = blocks_b.get(image_key)  # type: ignore[arg-type]
        if positions_b is None or len(positions_b) != len(positions_a):
            return None
        # Order must be preserved within the block.
        for pa, pb in zip(positions_a, positions_b):
            if vmap[slots_a[pa]] != slots_b[pb]:
                return None
            out[pa] = pb
    if len(out) != len(slots_a):
        return None
    return tuple(out[p] for p in range(len(slots_a)))


def iso(a: ExtendedCospan, b: ExtendedCospan) -> Optional[IsoWitness]:
    """Find an isomorphism witness between two cospans, or None.

    External slots must correspond pointwise; strictly internal slots may be
    permuted blockwise (one block per box component), keeping the order of
    slots within each block.
    """
    if (
        a.arity != b.arity
        or a.coarity != b.coarity
        or len(a.int_in) != len(b.int_in)
        or len(a.int_out) != len(b.int_out)
    ):
        return None
    forced: dict[int, int] = {}
    for va, vb in zip(a.ext_in_vertices(), b.ext_in_vertices()):
        if forced.get(va, vb) != vb:
            return None
        forced[va] = vb
    for va, vb in zip(a.ext_out_vertices(), b.ext_out_vertices()):
        if forced.get(va, vb) != vb:
            return None
        forced[va] = vb

    def flags(c: ExtendedCospan) -> dict[int, object]:
        ins, outs = set(c.int_in), set(c.int_out)
        return {v: (v in ins, v in outs) for v in c.carrier.vertices}

    for vmap, emap in carrier_isomorphisms(
        a.carrier, b.carrier, forced, flags(a), flags(b)
    ):
        beta = _interface_bijection(a, b, "in", vmap)
        if beta is None:
            continue
        gamma = _interface_bijection(a, b, "out", vmap)
        if gamma is None:
            continue
        alpha = EHomomorphism(dom=a.carrier, cod=b.carrier, vmap=vmap, emap=emap)
        return IsoWitness(alpha=alpha, beta=beta, gamma=gamma)
    return None


# ---------------------------------------------------------------------------
# Pushout
# ---------------------------------------------------------------------------


@dataclass
class PushoutResult:
    obj: EHypergraph
    inj_left: EHomomorphism
    inj_right: EHomomorphism


class _UnionFind:
    def __init__(self) -> None:
        self.parent: dict = {}

    def find(self, x):
        self.parent.setdefault(x, x)
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x, y) -> None:
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


def check_pushout_preconditions(
    left: EHomomorphism, right: EHomomorphism
) -> list[int]:
    """Return the list of violated precondition numbers (see class docstring)."""
    violated: list[int] = []
    z = left.dom
    if z.edges:
        violated.append(1)
    x, y = left.cod, right.cod
    anc_f = {frozenset(x.ancestors(("v", left.vmap[v]))) for v in z.vertices}
    anc_g = {frozenset(y.ancestors(("v", right.vmap[v]))) for v in z.vertices}
    if len(anc_f) > 1 or len(anc_g) > 1:
        violated.append(2)
    for v in z.vertices:
        if x.vparent.get(left.vmap[v]) is not None and y.vparent.get(
            right.vmap[v]
        ) is not None:
            violated.append(3)
            break
    place_f = {x.placement(("v", left.vmap[v])) for v in z.vertices}
    place_g = {y.placement(("v", right.vmap[v])) for v in z.vertices}
    if len(place_f) > 1 or len(place_g) > 1:
        violated.append(4)
    return violated


def pushout(left: EHomomorphism, right: EHomomorphism) -> PushoutResult:
    """Glue the codomains of two maps out of a shared discrete graph.

    The result is the disjoint union with glue-point vertices identified,
    edges kept apart, and nesting/consistency data propagated onto glued-in
    material that ends up (transitively connected) inside a box.
    """
    if left.dom is not right.dom:
        raise ValueError("pushout legs must share their domain")
    violated = check_pushout_preconditions(left, right)
    if violated:
        raise PushoutPreconditionError(violated)
    z, x, y = left.dom, left.cod, right.cod

    uf = _UnionFind()
    for v in z.vertices:
        uf.union(("X", left.vmap[v]), ("Y", right.vmap[v]))
    for v in x.vertices:
        uf.find(("X", v))
    for v in y.vertices:
        uf.find(("Y", v))

    # Vertex classes in deterministic order: X vertices first, then unglued Y.
    classes: dict = {}
    members: dict = {}
    order: list = []
    for tag, g in (("X", x), ("Y", y)):
        for v in g.vertices:
            root = uf.find((tag, v))
            members.setdefault(root, []).append((tag, v))
            if root not in classes:
                classes[root] = None
                order.append(root)

    p = EHypergraph()
    vclass: dict = {}
    for root in order:
        vclass[root] = p.add_vertex()
    exmap: dict[int, int] = {}
    eymap: dict[int, int] = {}
    for e in x.edges:
        exmap[e] = p.add_edge(
            x.label[e],
            [vclass[uf.find(("X", v))] for v in x.source[e]],
            [vclass[uf.find(("X", v))] for v in x.target[e]],
        )
    for e in y.edges:
        eymap[e] = p.add_edge(
            y.label[e],
            [vclass[uf.find(("Y", v))] for v in y.source[e]],
            [vclass[uf.find(("Y", v))] for v in y.target[e]],
        )

    # Placement of each result element, with component keys namespaced per
    # side; merged keys tracked by union-find.
    comp_uf = _UnionFind()
    parent_of: dict[Element, int] = {}
    compkey_of: dict[Element, tuple] = {}

    def record(elem: Element, parent: int, key: tuple) -> None:
        if elem in parent_of:
            if parent_of[elem] != parent:
                raise PushoutPreconditionError(
                    [2], "glued elements nested in different boxes"
                )
            comp_uf.union(compkey_of[elem], key)
        else:
            parent_of[elem] = parent
            compkey_of[elem] = key

    for root in order:
        for tag, v in members[root]:
            g = x if tag == "X" else y
            pe = g.vparent.get(v)
            if pe is not None:
                pp = exmap[pe] if tag == "X" else eymap[pe]
                record(("v", vclass[root]), pp, (tag, pe, g.vcomp[v]))
    for e in x.edges:
        pe = x.eparent.get(e)
        if pe is not None:
            record(("e", exmap[e]), exmap[pe], ("X", pe, x.ecomp[e]))
    for e in y.edges:
        pe = y.eparent.get(e)
        if pe is not None:
            record(("e", eymap[e]), eymap[pe], ("Y", pe, y.ecomp[e]))

    # Propagate nesting along undirected connectivity: a parentless element
    # connected to a placed one joins its box and component class.
    adjacency: dict[Element, set[Element]] = {el: set() for el in p.elements()}
    for e in p.edges:
        for v in p.endpoints(e):
            adjacency[("e", e)].add(("v", v))
            adjacency[("v", v)].add(("e", e))
    seen: set[Element] = set()
    for start in p.elements():
        if start in seen:
            continue
        comp_elems: list[Element] = []
        stack = [start]
        seen.add(start)
        while stack:
            el = stack.pop()
            comp_elems.append(el)
            for nb in adjacency[el]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        placed = [el for el in comp_elems if el in parent_of]
        if not placed:
            continue
        parents = {parent_of[el] for el in placed}
        if len(parents) > 1:
            raise PushoutPreconditionError(
                [2], "connected glued material spans different boxes"
            )
        parent = parents.pop()
        key0 = compkey_of[placed[0]]
        for el in placed[1:]:
            comp_uf.union(key0, compkey_of[el])
        for el in comp_elems:
            if el not in parent_of:
                parent_of[el] = parent
                compkey_of[el] = key0

    # Renumber component classes per box, in order of first appearance.
    comp_index: dict[tuple[int, object], int] = {}
    counters: dict[int, int] = {}
    for el in p.elements():
        if el not in parent_of:
            continue
        parent = parent_of[el]
        key = comp_uf.find(compkey_of[el])
        idx = comp_index.get((parent, key))
        if idx is None:
            idx = counters.get(parent, 0)
            counters[parent] = idx + 1
            comp_index[(parent, key)] = idx
        kind, i = el
        if kind == "v":
            p.vparent[i] = parent
            p.vcomp[i] = idx
        else:
            p.eparent[i] = parent
            p.ecomp[i] = idx

    inj_left = EHomomorphism(
        dom=x, cod=p, vmap={v: vclass[uf.find(("X", v))] for v in x.vertices}, emap=exmap
    )
    inj_right = EHomomorphism(
        dom=y, cod=p, vmap={v: vclass[uf.find(("Y", v))] for v in y.vertices}, emap=eymap
    )
    return PushoutResult(obj=p, inj_left=inj_left, inj_right=inj_right)


def discrete(n: int) -> EHypergraph:
    g = EHypergraph()
    for _ in range(n):
        g.add_vertex()
    return g


# ---------------------------------------------------------------------------
# Categorical operations
# ---------------------------------------------------------------------------


def compose(f: ExtendedCospan, g: ExtendedCospan) -> ExtendedCospan:
    """Sequential composition: glue f's external outputs to g's external inputs."""
    if f.coarity != g.arity:
        raise CospanError(
            f"composition mismatch: {f.coarity} outputs vs {g.arity} inputs"
        )
    z = discrete(f.coarity)
    leg_f = EHomomorphism(
        dom=z,
        cod=f.carrier,
        vmap={z.vertices[i]: f.ext_out_vertices()[i] for i in range(f.coarity)},
        emap={},
    )
    leg_g = EHomomorphism(
        dom=z,
        cod=g.carrier,
        vmap={z.vertices[i]: g.ext_in_vertices()[i] for i in range(g.arity)},
        emap={},
    )
    try:
        po = pushout(leg_f, leg_g)
    except PushoutPreconditionError as exc:  # pragma: no cover - internal bug class
        raise CospanError(f"internal error: composition pushout failed: {exc}") from exc
    p1, p2 = po.inj_left, po.inj_right
    int_in = tuple(p1.vmap[v] for v in f.int_in) + tuple(
        p2.vmap[g.int_in[q]] for q in g.strict_in_positions()
    )
    int_out = tuple(p2.vmap[v] for v in g.int_out) + tuple(
        p1.vmap[f.int_out[q]] for q in f.strict_out_positions()
    )
    return ExtendedCospan(
        carrier=po.obj,
        int_in=int_in,
        int_out=int_out,
        ext_in=f.ext_in,
        ext_out=g.ext_out,
    )


def tensor(f: ExtendedCospan, g: ExtendedCospan) -> ExtendedCospan:
    """Parallel composition: disjoint union with concatenated interfaces."""
    z = discrete(0)
    leg_f = EHomomorphism(dom=z, cod=f.carrier, vmap={}, emap={})
    leg_g = EHomomorphism(dom=z, cod=g.carrier, vmap={}, emap={})
    po = pushout(leg_f, leg_g)
    p1, p2 = po.inj_left, po.inj_right
    int_in = tuple(p1.vmap[v] for v in f.int_in) + tuple(p2.vmap[v] for v in g.int_in)
    int_out = tuple(p1.vmap[v] for v in f.int_out) + tuple(
        p2.vmap[v] for v in g.int_out
    )
    ext_in = f.ext_in + tuple(p + len(f.int_in) for p in g.ext_in)
    ext_out = f.ext_out + tuple(p + len(f.int_out) for p in g.ext_out)
    return ExtendedCospan(po.obj, int_in, int_out, ext_in, ext_out)


def join_raw(parts: Sequence[ExtendedCospan]) -> ExtendedCospan:
    """Box a list of alternatives without deduplication.

    Each part becomes one consistency component of a fresh box; each part's
    former external wires become strictly internal slots.
    """
    if not parts:
        raise CospanError("join of an empty list")
    arities = {(p.arity, p.coarity) for p in parts}
    if len(arities) > 1:
        raise CospanError(f"join of differently typed parts: {sorted(arities)}")
    if len(parts) == 1:
        return parts[0].copy()
    n, k = parts[0].arity, parts[0].coarity
    g = EHypergraph()
    box_in = [g.add_vertex() for _ in range(n)]
    box_out = [g.add_vertex() for _ in range(k)]
    box = g.add_edge(None, box_in, box_out)
    int_in: list[int] = list(box_in)
    int_out: list[int] = list(box_out)
    for comp, part in enumerate(parts):
        pc = part.carrier
        vmap: dict[int, int] = {}
        emap: dict[int, int] = {}
        for v in pc.vertices:
            vmap[v] = g.add_vertex()
        for e in pc.edges:
            emap[e] = g.add_edge(
                pc.label[e],
                [vmap[v] for v in pc.source[e]],
                [vmap[v] for v in pc.target[e]],
            )
        # Top-level part elements become children of the fresh box; nested
        # ones keep their (remapped) placement.
        for v in pc.vertices:
            if pc.vparent.get(v) is None:
                g.vparent[vmap[v]], g.vcomp[vmap[v]] = box, comp
            else:
                g.vparent[vmap[v]] = emap[pc.vparent[v]]
                g.vcomp[vmap[v]] = pc.vcomp[v]
        for e in pc.edges:
            if pc.eparent.get(e) is None:
                g.eparent[emap[e]], g.ecomp[emap[e]] = box, comp
            else:
                g.eparent[emap[e]] = emap[pc.eparent[e]]
                g.ecomp[emap[e]] = pc.ecomp[e]
        int_in.extend(vmap[v] for v in part.int_in)
        int_out.extend(vmap[v] for v in part.int_out)
    return ExtendedCospan(
        carrier=g,
        int_in=tuple(int_in),
        int_out=tuple(int_out),
        ext_in=tuple(range(n)),
        ext_out=tuple(range(k)),
    )


def join(parts: Sequence[ExtendedCospan]) -> ExtendedCospan:
    """Box a list of alternatives, deduplicating parts up to isomorphism."""
    distinct: list[ExtendedCospan] = []
    for part in parts:
        if not any(iso(part, other) for other in distinct):
            distinct.append(part)
    if len(distinct) == 1:
        return distinct[0].copy()
    return join_raw(distinct)


def identity_cospan(n: int) -> ExtendedCospan:
    g = discrete(n)
    slots = tuple(g.vertices)
    pos = tuple(range(n))
    return ExtendedCospan(g, slots, slots, pos, pos)


def symmetry_cospan(n: int, m: int) -> ExtendedCospan:
    g = discrete(n + m)
    vs = tuple(g.vertices)
    int_in = vs
    int_out = vs[n:] + vs[:n]
    pos_in = tuple(range(n + m))
    pos_out = tuple(range(n + m))
    return ExtendedCospan(g, int_in, int_out, pos_in, pos_out)


def generator_cospan(gen) -> ExtendedCospan:
    g = EHypergraph()
    ins = [g.add_vertex() for _ in range(gen.arity)]
    outs = [g.add_vertex() for _ in range(gen.coarity)]
    g.add_edge(gen.name, ins, outs)
    return ExtendedCospan(
        g,
        tuple(ins),
        tuple(outs),
        tuple(range(gen.arity)),
        tuple(range(gen.coarity)),
    )
