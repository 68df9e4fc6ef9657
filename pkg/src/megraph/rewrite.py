"""Rewrite rules over cospans and their double-pushout application.

A rule is a pair of cospans with equal external interfaces.  A match embeds
the left-hand carrier into a host carrier as a convex, down-closed subgraph;
applying the rule removes the matched material (keeping the glue vertices of
the external interface), then glues the right-hand side into the hole.

The structural schemas implement the semilattice laws (distribution over
alternatives, flattening of nested alternative boxes, idempotence and
singleton unboxing); each schema instance is synthesised as an ordinary
concrete rule plus match, so the single generic engine covers every rewrite.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator, Optional, Sequence

from .core import (
    EHomomorphism,
    EHypergraph,
    Element,
    Signature,
    down_closure,
    is_convex,
)
from .cospan import (
    CospanError,
    ExtendedCospan,
    PushoutPreconditionError,
    discrete,
    identity_cospan,
    is_mda_well_typed,
    iso,
    join_raw,
    pushout,
    tensor,
    compose,
    validate_cospan,
)
from .term import Term, TermType, interpret, typecheck


class RuleError(Exception):
    pass


class NoComplement(Exception):
    """No boundary complement exists; ``condition`` is the first violated one."""

    def __init__(self, condition: int, message: str = ""):
        self.condition = condition
        super().__init__(f"no boundary complement (condition {condition}): {message}")


class RewriteInternalError(Exception):
    """A rewrite step produced an ill-formed result; indicates a bug."""


@dataclass
class RewriteRule:
    name: str
    lhs: ExtendedCospan
    rhs: ExtendedCospan

    def __post_init__(self) -> None:
        if (self.lhs.arity, self.lhs.coarity) != (self.rhs.arity, self.rhs.coarity):
            raise RuleError(
                f"rule {self.name}: sides have different external interfaces"
            )
        for side, c in (("lhs", self.lhs), ("rhs", self.rhs)):
            bad = validate_cospan(c) + is_mda_well_typed(c)
            if bad:
                raise RuleError(f"rule {self.name}: {side} ill-formed: {bad[0]}")
            if _has_closed_component(c):
                raise RuleError(
                    f"rule {self.name}: {side} has a subdiagram with no inputs "
                    "and no outputs, which is not supported"
                )

    def reversed(self) -> "RewriteRule":
        return RewriteRule(name=f"{self.name}~rev", lhs=self.rhs, rhs=self.lhs)


def _has_closed_component(c: ExtendedCospan) -> bool:
    """True when some connected piece of the carrier touches no interface slot."""
    g = c.carrier
    slots = set(c.int_in) | set(c.int_out)
    adj: dict[Element, set[Element]] = {el: set() for el in g.elements()}
    for e in g.edges:
        for v in g.endpoints(e):
            adj[("e", e)].add(("v", v))
            adj[("v", v)].add(("e", e))
        p = g.eparent.get(e)
        if p is not None:
            adj[("e", e)].add(("e", p))
            adj[("e", p)].add(("e", e))
    for v in g.vertices:
        p = g.vparent.get(v)
        if p is not None:
            adj[("v", v)].add(("e", p))
            adj[("e", p)].add(("v", v))
    seen: set[Element] = set()
    for start in g.elements():
        if start in seen:
            continue
        stack, members = [start], []
        seen.add(start)
        while stack:
            el = stack.pop()
            members.append(el)
            for nb in adj[el]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        if not any(k == "v" and i in slots for k, i in members):
            return True
    return False


def rule_from_terms(name: str, l: Term, r: Term, sig: Signature) -> RewriteRule:
    tl, tr = typecheck(l, sig), typecheck(r, sig)
    if tl != tr:
        raise RuleError(
            f"rule {name}: sides have types {tl.dom}->{tl.cod} and {tr.dom}->{tr.cod}"
        )
    return RewriteRule(name=name, lhs=interpret(l, sig), rhs=interpret(r, sig))


@dataclass
class Match:
    rule: RewriteRule
    hom: EHomomorphism  # lhs carrier -> host carrier
    host: ExtendedCospan


# ---------------------------------------------------------------------------
# Monomorphism enumeration
# ---------------------------------------------------------------------------


def monomorphisms(
    pat: EHypergraph, host: EHypergraph
) -> Iterator[EHomomorphism]:
    """All injective structure-preserving maps from ``pat`` into ``host``.

    Top-level pattern elements may land inside host boxes (nested matches);
    nested pattern structure must be preserved exactly.
    """
    vmap: dict[int, int] = {}
    emap: dict[int, int] = {}
    used_v: set[int] = set()
    used_e: set[int] = set()
    # Consistency: pattern elements in one (box, component) must land in one
    # (box, component) of the host.
    compimg: dict[tuple[int, int], int] = {}

    def try_vertex(va: int, vb: int, undo: list) -> bool:
        if va in vmap:
            return vmap[va] == vb
        if vb in used_v:
            return False
        pa = pat.vparent.get(va)
        if pa is not None:
            if emap.get(pa) != host.vparent.get(vb):
                return False
            if not try_comp(pa, pat.vcomp[va], host.vcomp[vb], undo):
                return False
        vmap[va] = vb
        used_v.add(vb)
        undo.append(("v", va, vb))
        return True

    def try_comp(pa: int, ca: int, cb: int, undo: list) -> bool:
        key = (pa, ca)
        if key in compimg:
            return compimg[key] == cb
        compimg[key] = cb
        undo.append(("c", key))
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
                del compimg[item[1]]

    def try_edge(ea: int, eb: int, undo: list) -> bool:
        if eb in used_e:
            return False
        if pat.label[ea] != host.label[eb]:
            return False
        if len(pat.source[ea]) != len(host.source[eb]) or len(pat.target[ea]) != len(
            host.target[eb]
        ):
            return False
        pa = pat.eparent.get(ea)
        if pa is not None:
            if emap.get(pa) != host.eparent.get(eb):
                return False
            if not try_comp(pa, pat.ecomp[ea], host.ecomp[eb], undo):
                return False
        emap[ea] = eb
        used_e.add(eb)
        undo.append(("e", ea, eb))
        for va, vb in zip(pat.endpoints(ea), host.endpoints(eb)):
            if not try_vertex(va, vb, undo):
                return False
        return True

    edges = sorted(pat.edges, key=lambda e: (pat.depth(("e", e)), e))
    by_label: dict = {}
    for e in host.edges:
        by_label.setdefault(host.label[e], []).append(e)

    loose = None

    def search(idx: int) -> Iterator[EHomomorphism]:
        if idx == len(edges):
            yield from assign_vertices(0)
            return
        ea = edges[idx]
        for eb in by_label.get(pat.label[ea], ()):
            undo: list = []
            if try_edge(ea, eb, undo):
                yield from search(idx + 1)
            undo_all(undo)

    def assign_vertices(idx: int) -> Iterator[EHomomorphism]:
        nonlocal loose
        if idx == 0:
            loose = [v for v in pat.vertices if v not in vmap]
        if idx == len(loose):
            hom = EHomomorphism(dom=pat, cod=host, vmap=dict(vmap), emap=dict(emap))
            if hom.is_valid():
                yield hom
            return
        va = loose[idx]
        for vb in host.vertices:
            undo: list = []
            if try_vertex(va, vb, undo):
                yield from assign_vertices(idx + 1)
            undo_all(undo)

    yield from search(0)


def _glue_vertices(m: Match) -> tuple[tuple[int, ...], tuple[int, ...]]:
    """Host images of the rule's external input/output interface vertices."""
    ins = tuple(m.hom.vmap[v] for v in m.rule.lhs.ext_in_vertices())
    outs = tuple(m.hom.vmap[v] for v in m.rule.lhs.ext_out_vertices())
    return ins, outs


def _interface_images_admissible(host: EHypergraph, vs: Sequence[int]) -> bool:
    """All glue images top-level, or all in one box component with equal ancestry."""
    placements = {host.placement(("v", v)) for v in vs}
    if len(placements) > 1:
        return False
    ancestries = {tuple(host.ancestors(("v", v))) for v in vs}
    return len(ancestries) <= 1


def find_matches(rule: RewriteRule, host: ExtendedCospan) -> list[Match]:
    """Enumerate admissible convex down-closed matches, deterministically ordered."""
    out: list[Match] = []
    hg = host.carrier
    for hom in monomorphisms(rule.lhs.carrier, hg):
        if not hom.is_mono():
            continue
        image = hom.image()
        # Down-closed: every child of a matched box is matched.
        image_edges = set(hom.emap.values())
        ok = True
        for e in image_edges:
            if hg.label[e] is None:
                if any(child not in image for child in hg.children(e)):
                    ok = False
                    break
        if not ok:
            continue
        if not is_convex(hg, image):
            continue
        gi, go = _glue_vertices(Match(rule, hom, host))
        if not _interface_images_admissible(hg, gi + go):
            continue
        out.append(Match(rule, hom, host))
    out.sort(
        key=lambda m: (
            sorted(m.hom.emap.values()),
            sorted(m.hom.vmap.values()),
        )
    )
    return out


# ---------------------------------------------------------------------------
# Boundary complement and rule application
# ---------------------------------------------------------------------------


@dataclass
class Complement:
    """The host minus the matched material, with gluing bookkeeping.

    The complement graph keeps host ids.  ``in_glue`` are the images of the
    rule's external *outputs* (they feed what remains downstream, so they sit
    on the complement's input side); ``out_glue`` are the images of the
    external *inputs*.
    """

    graph: EHypergraph
    kept_int_in: tuple[int, ...]
    kept_int_out: tuple[int, ...]
    in_glue: tuple[int, ...]
    out_glue: tuple[int, ...]
    top_level: bool
    host: ExtendedCospan

    def as_cospan(self) -> ExtendedCospan:
        int_in = self.kept_int_in + self.in_glue
        int_out = self.kept_int_out + self.out_glue
        pos_in = {v: p for p, v in enumerate(self.kept_int_in)}
        ext_in = [pos_in[self.host.int_in[p]] for p in self.host.ext_in]
        pos_out = {v: p for p, v in enumerate(self.kept_int_out)}
        ext_out = [pos_out[self.host.int_out[p]] for p in self.host.ext_out]
        if self.top_level:
            base_in = len(self.kept_int_in)
            ext_in += list(range(base_in, base_in + len(self.in_glue)))
            base_out = len(self.kept_int_out)
            ext_out += list(range(base_out, base_out + len(self.out_glue)))
        return ExtendedCospan(
            self.graph, int_in, int_out, tuple(ext_in), tuple(ext_out)
        )


def _delete(g: EHypergraph, rm_v: set[int], rm_e: set[int]) -> EHypergraph:
    out = EHypergraph()
    out.vertices = [v for v in g.vertices if v not in rm_v]
    out.edges = [e for e in g.edges if e not in rm_e]
    out.source = {e: g.source[e] for e in out.edges}
    out.target = {e: g.target[e] for e in out.edges}
    out.label = {e: g.label[e] for e in out.edges}
    out.vparent = {v: p for v, p in g.vparent.items() if v not in rm_v and p not in rm_e}
    out.eparent = {e: p for e, p in g.eparent.items() if e not in rm_e and p not in rm_e}
    out.vcomp = {v: c for v, c in g.vcomp.items() if v in out.vparent}
    out.ecomp = {e: c for e, c in g.ecomp.items() if e in out.eparent}
    out._next_v = g._next_v
    out._next_e = g._next_e
    return out


def boundary_complement(m: Match) -> Complement:
    hg = m.host.carrier
    gi, go = _glue_vertices(m)
    glue = gi + go
    # Condition (2): the combined gluing map must be injective.
    if len(set(glue)) != len(glue):
        raise NoComplement(2, "external input and output images overlap")
    # Conditions (3): interface images uniformly placed in the host.
    if not _interface_images_admissible(hg, glue):
        raise NoComplement(3, "interface images not uniformly placed")
    removed_v = set(m.hom.vmap.values()) - set(glue)
    removed_e = set(m.hom.emap.values())
    # No dangling incidence or dangling nesting may remain.
    for e in hg.edges:
        if e in removed_e:
            continue
        if any(v in removed_v for v in hg.endpoints(e)):
            raise NoComplement(1, f"edge {e} would dangle")
    for v in glue:
        if hg.vparent.get(v) in removed_e:
            raise NoComplement(1, f"glue vertex {v} would lose its box")
    graph = _delete(hg, removed_v, removed_e)
    # Condition (4): interface images uniformly placed in the complement too.
    if not _interface_images_admissible(graph, glue):
        raise NoComplement(4, "interface images not uniformly placed in complement")
    # Condition (5): the host's own external interface survives.
    vset = set(graph.vertices)
    for v in m.host.ext_in_vertices() + m.host.ext_out_vertices():
        if v not in vset:
            raise NoComplement(5, "host external interface was removed")
    top_level = all(hg.vparent.get(v) is None for v in glue)
    comp = Complement(
        graph=graph,
        kept_int_in=tuple(v for v in m.host.int_in if v not in removed_v),
        kept_int_out=tuple(v for v in m.host.int_out if v not in removed_v),
        in_glue=go,
        out_glue=gi,
        top_level=top_level,
        host=m.host,
    )
    cospan = comp.as_cospan()
    report = validate_cospan(cospan) + is_mda_well_typed(cospan)
    if top_level:
        if report:
            raise NoComplement(6, report[0])
    else:
        # Condition (7): box typing of the complement is waived.
        report = [r for r in report if not r.startswith("box ")]
        # A box that lost the matched component may be left single-component;
        # it will be refilled by the right-hand side.
        report = [r for r in report if "single-component box" not in r]
        if report:
            raise NoComplement(7, report[0])
    return comp


def apply(m: Match) -> ExtendedCospan:
    """One double-pushout step: carve out the match, glue in the replacement."""
    comp = boundary_complement(m)
    rhs = m.rule.rhs
    n_in = len(comp.out_glue)  # rule external inputs
    n_out = len(comp.in_glue)
    z = discrete(n_in + n_out)
    leg_c = EHomomorphism(
        dom=z,
        cod=comp.graph,
        vmap={
            z.vertices[t]: (comp.out_glue + comp.in_glue)[t]
            for t in range(n_in + n_out)
        },
        emap={},
    )
    leg_r = EHomomorphism(
        dom=z,
        cod=rhs.carrier,
        vmap={
            z.vertices[t]: (rhs.ext_in_vertices() + rhs.ext_out_vertices())[t]
            for t in range(n_in + n_out)
        },
        emap={},
    )
    try:
        po = pushout(leg_c, leg_r)
    except PushoutPreconditionError as exc:  # pragma: no cover - bug class
        raise RewriteInternalError(f"insertion pushout failed: {exc}") from exc
    inj_c, inj_r = po.inj_left, po.inj_right
    int_in = tuple(inj_c.vmap[v] for v in comp.kept_int_in) + tuple(
        inj_r.vmap[rhs.int_in[p]] for p in rhs.strict_in_positions()
    )
    int_out = tuple(inj_c.vmap[v] for v in comp.kept_int_out) + tuple(
        inj_r.vmap[rhs.int_out[p]] for p in rhs.strict_out_positions()
    )
    pos_in = {v: p for p, v in enumerate(comp.kept_int_in)}
    ext_in = tuple(pos_in[m.host.int_in[p]] for p in m.host.ext_in)
    pos_out = {v: p for p, v in enumerate(comp.kept_int_out)}
    ext_out = tuple(pos_out[m.host.int_out[p]] for p in m.host.ext_out)
    result = ExtendedCospan(po.obj, int_in, int_out, ext_in, ext_out)
    report = validate_cospan(result) + is_mda_well_typed(result)
    if report:
        raise RewriteInternalError(f"rewrite produced ill-formed cospan: {report[0]}")
    return result


# ---------------------------------------------------------------------------
# Closed-subdiagram extraction
# ---------------------------------------------------------------------------


def extract_subdiagram(
    host: ExtendedCospan,
    elements: set[Element],
    ext_in_vs: Sequence[int],
    ext_out_vs: Sequence[int],
) -> tuple[ExtendedCospan, EHomomorphism]:
    """Lift a down-closed element set into a standalone cospan.

    ``elements`` must be down-closed with all endpoints included, and its top
    elements (those whose parent is not among the included edges) must share
    one placement; they become top-level in the result.  ``ext_in_vs`` /
    ``ext_out_vs`` give the external interface order (host vertex ids); the
    remaining dangling wires become strictly internal slots in host interface
    order.  Returns the cospan and the embedding back into the host carrier.
    """
    hg = host.carrier
    edge_ids = {i for k, i in elements if k == "e"}
    g = EHypergraph()
    vmap: dict[int, int] = {}
    emap: dict[int, int] = {}
    for v in hg.vertices:
        if ("v", v) in elements:
            vmap[v] = g.add_vertex()
    for e in hg.edges:
        if ("e", e) in elements:
            emap[e] = g.add_edge(
                hg.label[e],
                [vmap[v] for v in hg.source[e]],
                [vmap[v] for v in hg.target[e]],
            )
    for v, nv in vmap.items():
        p = hg.vparent.get(v)
        if p is not None and p in edge_ids:
            g.vparent[nv] = emap[p]
            g.vcomp[nv] = hg.vcomp[v]
    for e, ne in emap.items():
        p = hg.eparent.get(e)
        if p is not None and p in edge_ids:
            g.eparent[ne] = emap[p]
            g.ecomp[ne] = hg.ecomp[e]

    consumed: set[int] = set()
    produced: set[int] = set()
    for e in edge_ids:
        consumed.update(hg.source[e])
        produced.update(hg.target[e])
    host_in_order = {v: p for p, v in enumerate(host.int_in)}
    host_out_order = {v: p for p, v in enumerate(host.int_out)}

    def dangling(side: str) -> list[int]:
        incident = produced if side == "in" else consumed
        order = host_in_order if side == "in" else host_out_order
        vs = [v for v in vmap if v not in incident]
        return sorted(vs, key=lambda v: (order.get(v, len(order)), v))

    strict_in = [v for v in dangling("in") if v not in set(ext_in_vs)]
    strict_out = [v for v in dangling("out") if v not in set(ext_out_vs)]
    int_in = tuple(vmap[v] for v in list(ext_in_vs) + strict_in)
    int_out = tuple(vmap[v] for v in list(ext_out_vs) + strict_out)
    cospan = ExtendedCospan(
        g,
        int_in,
        int_out,
        tuple(range(len(ext_in_vs))),
        tuple(range(len(ext_out_vs))),
    )
    hom = EHomomorphism(dom=g, cod=hg, vmap={nv: v for v, nv in vmap.items()},
                        emap={ne: e for e, ne in emap.items()})
    return cospan, hom


def component_cospan(host: ExtendedCospan, box: int, comp: int) -> ExtendedCospan:
    """One alternative of a box, lifted to a standalone cospan.

    The external slot order follows the host's internal interface order,
    which positionally matches the box's source/target order.
    """
    hg = host.carrier
    seeds = [
        i
        for k, i in hg.children(box)
        if k == "e" and hg.ecomp[i] == comp
    ]
    elements = down_closure(hg, seeds)
    for k, i in hg.children(box):
        if k == "v" and hg.vcomp[i] == comp:
            elements.add(("v", i))
    host_in_order = {v: p for p, v in enumerate(host.int_in)}
    host_out_order = {v: p for p, v in enumerate(host.int_out)}
    ins = sorted(
        (
            i
            for k, i in hg.children(box)
            if k == "v" and hg.vcomp[i] == comp and i in set(host.int_in)
        ),
        key=lambda v: host_in_order[v],
    )
    outs = sorted(
        (
            i
            for k, i in hg.children(box)
            if k == "v" and hg.vcomp[i] == comp and i in set(host.int_out)
        ),
        key=lambda v: host_out_order[v],
    )
    cospan, _ = extract_subdiagram(host, elements, ins, outs)
    return cospan


# ---------------------------------------------------------------------------
# Structural schemas
# ---------------------------------------------------------------------------

SCHEMA_IDS = (
    "Flatten",
    "Idem",
    "Singleton-absorb",
    "SeqDistL",
    "SeqDistR",
    "TensDistL",
    "TensDistR",
)


@dataclass(frozen=True)
class StructuralSchema:
    schema_id: str
    direction: str = "forward"


def _wiring(n: int, out_of: Sequence[int]) -> ExtendedCospan:
    """Discrete cospan with n inputs whose output j is input ``out_of[j]``."""
    g = discrete(n)
    vs = tuple(g.vertices)
    return ExtendedCospan(
        g,
        vs,
        tuple(vs[i] for i in out_of),
        tuple(range(n)),
        tuple(range(len(out_of))),
    )


def _box_components(g: EHypergraph, box: int) -> list[int]:
    comps: list[int] = []
    for kind, i in g.children(box):
        c = g.vcomp[i] if kind == "v" else g.ecomp[i]
        if c not in comps:
            comps.append(c)
    return sorted(comps)


def _box_instances(host: ExtendedCospan) -> list[int]:
    hg = host.carrier
    return sorted(
        (e for e in hg.edges if hg.label[e] is None),
        key=lambda e: (hg.depth(("e", e)), e),
    )


def _sibling_match(
    host: ExtendedCospan, elements: set[Element], lhs: ExtendedCospan,
    hom: EHomomorphism, rhs: ExtendedCospan, schema: str, name: str,
) -> Optional[tuple[StructuralSchema, Match]]:
    if not is_convex(host.carrier, elements):
        return None
    try:
        rule = RewriteRule(name=name, lhs=lhs, rhs=rhs)
    except RuleError:
        return None
    return StructuralSchema(schema), Match(rule=rule, hom=hom, host=host)


def _host_ordered(host: ExtendedCospan, vs: Sequence[int], side: str) -> list[int]:
    """Order wires by their host interface position (fallback: vertex id)."""
    slots = host.int_in if side == "in" else host.int_out
    pos = {v: p for p, v in enumerate(slots)}
    return sorted(vs, key=lambda v: (pos.get(v, len(pos)), v))


def _reordered(
    part: ExtendedCospan,
    raw_in: list[int],
    raw_out: list[int],
    ext_in: list[int],
    ext_out: list[int],
) -> ExtendedCospan:
    """Re-wire a part whose ports follow ``raw_*`` order into ``ext_*`` order."""
    if raw_in != ext_in:
        part = compose(_wiring(len(ext_in), [ext_in.index(v) for v in raw_in]), part)
    if raw_out != ext_out:
        part = compose(part, _wiring(len(raw_out), [raw_out.index(v) for v in ext_out]))
    return part


def _seq_dist_instance(
    host: ExtendedCospan, e: int, box: int, direction: str
) -> Optional[tuple[StructuralSchema, Match]]:
    """Absorb an edge feeding (or fed by) a box into every component."""
    hg = host.carrier
    elements = down_closure(hg, [e, box])
    if direction == "L":
        producer_out = list(hg.target[e])
        consumer_in = list(hg.source[box])
    else:
        producer_out = list(hg.target[box])
        consumer_in = list(hg.source[e])
    fed = [v for v in producer_out if v in set(consumer_in)]
    if not fed:
        return None
    open_out = [v for v in producer_out if v not in set(fed)]
    unfed_in = [v for v in consumer_in if v not in set(fed)]
    if direction == "L":
        raw_in = list(hg.source[e]) + unfed_in
        raw_out = list(hg.target[box]) + open_out
    else:
        raw_in = list(hg.source[box]) + unfed_in
        raw_out = list(hg.target[e]) + open_out
    ext_in = _host_ordered(host, raw_in, "in")
    ext_out = _host_ordered(host, raw_out, "out")
    lhs, hom = extract_subdiagram(host, elements, ext_in, ext_out)
    # Standalone cospans for the context edge and each component.
    e_elements = down_closure(hg, [e])
    ectx, _ = extract_subdiagram(host, e_elements, list(hg.source[e]), list(hg.target[e]))
    comps = [component_cospan(host, box, c) for c in _box_components(hg, box)]
    parts = []
    for d in comps:
        if direction == "L":
            # inputs: e.sources ++ unfed; run e, reorder (targets ++ unfed)
            # into (box.sources ++ open), feed the component, pass open wires.
            stage1 = tensor(ectx, identity_cospan(len(unfed_in)))
            mid = producer_out + unfed_in  # vertex ids in stage-1 output order
            want = consumer_in + open_out
            perm = _wiring(len(mid), [mid.index(v) for v in want])
            stage2 = compose(stage1, perm)
            part = compose(stage2, tensor(d, identity_cospan(len(open_out))))
        else:
            stage1 = tensor(d, identity_cospan(len(unfed_in)))
            mid = producer_out + unfed_in
            want = consumer_in + open_out
            perm = _wiring(len(mid), [mid.index(v) for v in want])
            stage2 = compose(stage1, perm)
            part = compose(stage2, tensor(ectx, identity_cospan(len(open_out))))
        parts.append(_reordered(part, raw_in, raw_out, ext_in, ext_out))
    rhs = join_raw(parts)
    schema = "SeqDistL" if direction == "L" else "SeqDistR"
    return _sibling_match(host, elements, lhs, hom, rhs, schema, f"dist-{schema}")


def _tens_dist_instance(
    host: ExtendedCospan, e: Optional[int], wire: Optional[int], box: int
) -> Optional[tuple[StructuralSchema, Match]]:
    """Absorb a parallel sibling (edge or bare wire) into every component."""
    hg = host.carrier
    if e is not None:
        elements = down_closure(hg, [e, box])
        ectx, _ = extract_subdiagram(
            host, down_closure(hg, [e]), list(hg.source[e]), list(hg.target[e])
        )
        e_in, e_out = list(hg.source[e]), list(hg.target[e])
    else:
        elements = down_closure(hg, [box])
        elements.add(("v", wire))
        ectx = identity_cospan(1)
        e_in, e_out = [wire], [wire]
    if set(e_in + e_out) & set(hg.endpoints(box)):
        return None  # connected: a sequential instance, not a parallel one
    raw_in = e_in + list(hg.source[box])
    raw_out = e_out + list(hg.target[box])
    ext_in = _host_ordered(host, raw_in, "in")
    ext_out = _host_ordered(host, raw_out, "out")
    lhs, hom = extract_subdiagram(host, elements, ext_in, ext_out)
    comps = [component_cospan(host, box, c) for c in _box_components(hg, box)]
    rhs = join_raw(
        [_reordered(tensor(ectx, d), raw_in, raw_out, ext_in, ext_out) for d in comps]
    )
    return _sibling_match(host, elements, lhs, hom, rhs, "TensDistL", "dist-tens")


def _flatten_instance(
    host: ExtendedCospan, outer: int, inner: int
) -> Optional[tuple[StructuralSchema, Match]]:
    """Splice a component that consists of exactly one box into its parent."""
    hg = host.carrier
    comp = hg.ecomp[inner]
    comp_elems = {
        el
        for el in hg.children(outer)
        if (hg.vcomp[el[1]] if el[0] == "v" else hg.ecomp[el[1]]) == comp
    }
    if comp_elems != {("e", inner)} | {("v", v) for v in hg.endpoints(inner)}:
        return None
    elements = down_closure(hg, [outer])
    lhs, hom = extract_subdiagram(
        host, elements, list(hg.source[outer]), list(hg.target[outer])
    )
    parts = []
    for c in _box_components(hg, outer):
        if c == comp:
            parts.extend(
                component_cospan(host, inner, d) for d in _box_components(hg, inner)
            )
        else:
            parts.append(component_cospan(host, outer, c))
    rhs = join_raw(parts)
    return _sibling_match(host, elements, lhs, hom, rhs, "Flatten", "flatten")


def _idem_instances(
    host: ExtendedCospan, box: int
) -> list[tuple[StructuralSchema, Match]]:
    """Drop a duplicate component, or unbox a two-component box of duplicates."""
    hg = host.carrier
    comps = _box_components(hg, box)
    dup: Optional[tuple[int, int]] = None
    parts = {c: component_cospan(host, box, c) for c in comps}
    for i, c1 in enumerate(comps):
        for c2 in comps[i + 1 :]:
            if iso(parts[c1], parts[c2]):
                dup = (c1, c2)
                break
        if dup:
            break
    if dup is None:
        return []
    c1, c2 = dup
    elements = down_closure(hg, [box])
    lhs, hom = extract_subdiagram(
        host, elements, list(hg.source[box]), list(hg.target[box])
    )
    if len(comps) >= 3:
        rhs = join_raw([parts[c] for c in comps if c != c2])
        inst = _sibling_match(host, elements, lhs, hom, rhs, "Idem", "idem")
    else:
        rhs = parts[c1]
        inst = _sibling_match(
            host, elements, lhs, hom, rhs, "Singleton-absorb", "singleton"
        )
    return [inst] if inst else []


def structural_matches(
    host: ExtendedCospan,
) -> list[tuple[StructuralSchema, Match]]:
    """Forward structural-rule instances present in the host, outermost first."""
    hg = host.carrier
    out: list[tuple[StructuralSchema, Match]] = []
    for box in _box_instances(host):
        placement = hg.placement(("e", box))
        # Flattening of directly nested boxes.
        for kind, i in hg.children(box):
            if kind == "e" and hg.label[i] is None:
                inst = _flatten_instance(host, box, i)
                if inst:
                    out.append(inst)
        out.extend(_idem_instances(host, box))
        siblings = sorted(
            e
            for e in hg.edges
            if e != box and hg.placement(("e", e)) == placement
        )
        box_src, box_tgt = set(hg.source[box]), set(hg.target[box])
        for e in siblings:
            if set(hg.target[e]) & box_src:
                inst = _seq_dist_instance(host, e, box, "L")
            elif set(hg.source[e]) & box_tgt:
                inst = _seq_dist_instance(host, e, box, "R")
            else:
                inst = _tens_dist_instance(host, e, None, box)
            if inst:
                out.append(inst)
        # Bare parallel wires (vertices with no incident edge at this level).
        incident: set[int] = set()
        for e in hg.edges:
            incident.update(hg.endpoints(e))
        wires = sorted(
            v
            for v in hg.vertices
            if v not in incident and hg.placement(("v", v)) == placement
        )
        for w in wires:
            inst = _tens_dist_instance(host, None, w, box)
            if inst:
                out.append(inst)
    return out
