"""Classical e-graphs and their bridge to extended cospans.

An :class:`EGraph` is the usual union-find + class-map + hashcons triple.
``translate`` renders a canonical, acyclic, connected e-graph as an extended
cospan over a signature with copy ("dup") and delete ("del") generators:
every multi-node class becomes a hierarchical edge with one component per
node, sharing is realized with left-leaning chains of "dup", and each
component discards the input slots belonging to its sibling nodes with
"del".  ``replay`` expresses one e-graph rewrite (add + merge + upward
merging) as a sequence of double-pushout steps on the translated cospan.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

from .core import EHypergraph, Element, Signature, down_closure
from . import cospan as cs
from .cospan import ExtendedCospan
from .rewrite import (
    Match,
    RewriteRule,
    apply,
    extract_subdiagram,
    find_matches,
    rule_from_terms,
)
from .term import Term, interpret


class EGraphError(Exception):
    pass


class ReplayIncomplete(Exception):
    """The scripted replay strategy could not reach the target graph."""


@dataclass(frozen=True)
class ENode:
    head: str
    children: tuple[int, ...]

    def __repr__(self) -> str:
        if not self.children:
            return self.head
        return f"{self.head}({','.join(map(str, self.children))})"


class EGraph:
    """Union-find over class ids, class map, and hashcons."""

    def __init__(self) -> None:
        self._uf: dict[int, int] = {}
        self.classes: dict[int, set[ENode]] = {}
        self.hashcons: dict[ENode, int] = {}
        self._next = 0

    def copy(self) -> "EGraph":
        eg = EGraph()
        eg._uf = dict(self._uf)
        eg.classes = {c: set(ns) for c, ns in self.classes.items()}
        eg.hashcons = dict(self.hashcons)
        eg._next = self._next
        return eg

    def find(self, a: int) -> int:
        while self._uf[a] != a:
            self._uf[a] = self._uf[self._uf[a]]
            a = self._uf[a]
        return a

    def canonicalize(self, n: ENode) -> ENode:
        return ENode(n.head, tuple(self.find(c) for c in n.children))

    def class_ids(self) -> list[int]:
        return sorted(c for c in self.classes if self.find(c) == c)

    def nodes(self, c: int) -> list[ENode]:
        ns = {self.canonicalize(n) for n in self.classes[self.find(c)]}
        return sorted(ns, key=lambda n: (n.head, n.children))

    def add(self, n: ENode) -> int:
        n = self.canonicalize(n)
        if n in self.hashcons:
            return self.find(self.hashcons[n])
        cid = self._next
        self._next += 1
        self._uf[cid] = cid
        self.classes[cid] = {n}
        self.hashcons[n] = cid
        return cid

    def merge(self, a: int, b: int) -> int:
        """Union two classes; the second argument becomes the representative.

        Congruence is restored by upward merging: nodes that become equal
        after re-canonicalization force their classes to merge too.
        """
        a, b = self.find(a), self.find(b)
        if a == b:
            return a
        self._uf[a] = b
        self.classes[b] = self.classes.pop(a) | self.classes[b]
        self._rebuild()
        return self.find(b)

    def _rebuild(self) -> None:
        changed = True
        while changed:
            changed = False
            seen: dict[ENode, int] = {}
            for c in list(self.classes):
                if self.find(c) != c:
                    continue
                for n in list(self.classes[c]):
                    cn = self.canonicalize(n)
                    if cn in seen and self.find(seen[cn]) != self.find(c):
                        x, y = self.find(seen[cn]), self.find(c)
                        self._uf[x] = y
                        self.classes[y] = self.classes.pop(x) | self.classes[y]
                        changed = True
                    else:
                        seen[cn] = self.find(c)
        # re-key everything canonically
        for c in list(self.classes):
            if self.find(c) != c:
                self.classes[self.find(c)] |= self.classes.pop(c)
        for c in list(self.classes):
            self.classes[c] = {self.canonicalize(n) for n in self.classes[c]}
        self.hashcons = {}
        for c, ns in self.classes.items():
            for n in ns:
                self.hashcons[n] = c

    # -- invariants ---------------------------------------------------------

    def check_invariants(self) -> list[str]:
        """Full rescan of the congruence and hashcons invariants."""
        report: list[str] = []
        for c in self.classes:
            if self.find(c) != c:
                report.append(f"class map keyed by non-canonical id {c}")
        seen: dict[ENode, int] = {}
        for c, ns in self.classes.items():
            for n in ns:
                cn = self.canonicalize(n)
                if cn in seen and seen[cn] != self.find(c):
                    report.append(
                        f"congruent nodes {cn!r} in distinct classes "
                        f"{seen[cn]} and {self.find(c)}"
                    )
                seen[cn] = self.find(c)
                if self.hashcons.get(cn) is None:
                    report.append(f"hashcons missing canonical node {cn!r}")
                elif self.find(self.hashcons[cn]) != self.find(c):
                    report.append(f"hashcons maps {cn!r} to the wrong class")
        return report

    def is_acyclic(self) -> bool:
        deps = {
            c: {self.find(ch) for n in self.nodes(c) for ch in n.children}
            for c in self.class_ids()
        }
        # Kahn over the "class uses class" relation
        indeg = {c: 0 for c in deps}
        for c, ds in deps.items():
            for d in ds:
                if d == c:
                    return False
                indeg[d] += 1
        queue = [c for c, d in indeg.items() if d == 0]
        seen = 0
        while queue:
            c = queue.pop()
            seen += 1
            for d in deps[c]:
                indeg[d] -= 1
                if indeg[d] == 0:
                    queue.append(d)
        return seen == len(deps)

    def is_connected(self) -> bool:
        ids = self.class_ids()
        if len(ids) <= 1:
            return True
        adj: dict[int, set[int]] = {c: set() for c in ids}
        for c in ids:
            for n in self.nodes(c):
                for ch in n.children:
                    adj[c].add(self.find(ch))
                    adj[self.find(ch)].add(c)
        seen = {ids[0]}
        stack = [ids[0]]
        while stack:
            for nb in adj[stack.pop()]:
                if nb not in seen:
                    seen.add(nb)
                    stack.append(nb)
        return len(seen) == len(ids)

    def __repr__(self) -> str:
        parts = [f"{c}: {{{', '.join(map(repr, self.nodes(c)))}}}" for c in self.class_ids()]
        return "EGraph(" + "; ".join(parts) + ")"


def egraph_of_term_tree(tree) -> tuple[EGraph, int]:
    """Build an e-graph from a nested ``(head, child_trees...)`` tuple."""
    eg = EGraph()

    def go(t) -> int:
        if isinstance(t, str):
            return eg.add(ENode(t, ()))
        head, *kids = t
        return eg.add(ENode(head, tuple(go(k) for k in kids)))

    return eg, go(tree)


# ---------------------------------------------------------------------------
# Translation to cospans
# ---------------------------------------------------------------------------

COPY = "dup"
DISCARD = "del"


def _fanout(
    g: EHypergraph, src: int, k: int, elems: Optional[list[Element]] = None
) -> list[int]:
    """k wires carrying copies of ``src``, via a left-leaning chain of copies."""
    if k <= 0:
        raise EGraphError("fan-out of a wire with no consumers")
    wires = []
    cur = src
    for _ in range(k - 1):
        w = g.add_vertex()
        nxt = g.add_vertex()
        d = g.add_edge(COPY, [cur], [w, nxt])
        if elems is not None:
            elems.extend([("e", d), ("v", w), ("v", nxt)])
        wires.append(w)
        cur = nxt
    wires.append(cur)
    return wires


def _node_arity(sig: Signature, n: ENode) -> int:
    if n.head not in sig:
        raise EGraphError(f"unknown generator {n.head!r}")
    ar, coar = sig.arity(n.head)
    if coar != 1 or ar != len(n.children):
        raise EGraphError(
            f"node {n!r} does not fit generator {n.head}: {ar} -> {coar}"
        )
    return ar


def _emit_producer(
    g: EHypergraph,
    sig: Signature,
    nodes: Sequence[ENode],
    slot_wires: Sequence[int],
    out: int,
    interior_ins: list[int],
    interior_outs: list[int],
    elems: Optional[list[Element]] = None,
) -> None:
    """One class's producer: a plain edge for a singleton class, otherwise a
    hierarchical edge with one component per node; sibling nodes' input slots
    are consumed by explicit discards inside each component."""
    rec = elems if elems is not None else []
    if len(nodes) == 1:
        n = nodes[0]
        _node_arity(sig, n)
        rec.append(("e", g.add_edge(n.head, list(slot_wires), [out])))
        return
    arities = [_node_arity(sig, n) for n in nodes]
    offsets = [sum(arities[:i]) for i in range(len(nodes))]
    total = sum(arities)
    box = g.add_edge(None, list(slot_wires), [out])
    rec.append(("e", box))
    for i, n in enumerate(nodes):
        us = [g.add_vertex(parent=box, component=i) for _ in range(total)]
        w = g.add_vertex(parent=box, component=i)
        rec.extend(("v", u) for u in us)
        rec.append(("v", w))
        own = range(offsets[i], offsets[i] + arities[i])
        ge = g.add_edge(n.head, [us[s] for s in own], [w], parent=box, component=i)
        rec.append(("e", ge))
        for s in range(total):
            if s not in own:
                de = g.add_edge(DISCARD, [us[s]], [], parent=box, component=i)
                rec.append(("e", de))
        interior_ins.extend(us)
        interior_outs.append(w)


@dataclass
class _Layout:
    """Which carrier elements each class's rendering produced, in order."""

    elems: dict[int, list[Element]]
    out: dict[int, int]


def _render(eg: EGraph, sig: Signature) -> tuple[ExtendedCospan, _Layout]:
    """Render a canonical, acyclic, connected e-graph as an extended cospan."""
    bad = eg.check_invariants()
    if bad:
        raise EGraphError("e-graph not canonical: " + bad[0])
    if not eg.is_acyclic():
        raise EGraphError("e-graph has a cyclic class dependency")
    if not eg.is_connected():
        raise EGraphError("e-graph is not connected")
    ids = eg.class_ids()
    if not ids:
        raise EGraphError("empty e-graph")

    # Occurrence list per class, in deterministic consumer order.
    uses: dict[int, list[tuple[int, int, int]]] = {c: [] for c in ids}
    for c in ids:
        for ni, n in enumerate(eg.nodes(c)):
            for si, ch in enumerate(n.children):
                uses[eg.find(ch)].append((c, ni, si))
    roots = [c for c in ids if not uses[c]]

    g = EHypergraph()
    out = {c: g.add_vertex() for c in ids}
    layout = _Layout(elems={c: [("v", out[c])] for c in ids}, out=dict(out))
    wire: dict[tuple[int, int, int], int] = {}
    for c in ids:
        k = len(uses[c]) if uses[c] else 1
        ws = _fanout(g, out[c], k, elems=layout.elems[c])
        for slot, w in zip(uses[c], ws):
            wire[slot] = w
    interior_ins: list[int] = []
    interior_outs: list[int] = []
    for c in ids:
        nodes = eg.nodes(c)
        slot_wires = [
            wire[(c, ni, si)]
            for ni, n in enumerate(nodes)
            for si in range(len(n.children))
        ]
        _emit_producer(
            g, sig, nodes, slot_wires, out[c], interior_ins, interior_outs,
            elems=layout.elems[c],
        )

    int_out = tuple(out[c] for c in roots) + tuple(interior_outs)
    result = ExtendedCospan(
        g,
        tuple(interior_ins),
        int_out,
        (),
        tuple(range(len(roots))),
    )
    return result, layout


def translate(eg: EGraph, sig: Signature) -> ExtendedCospan:
    """Render a canonical, acyclic, connected e-graph as an extended cospan."""
    return _render(eg, sig)[0]


# ---------------------------------------------------------------------------
# Replay of an e-graph rewrite as double-pushout steps
# ---------------------------------------------------------------------------


@dataclass
class ReplayStep:
    description: str
    rule: RewriteRule
    result: ExtendedCospan


@dataclass
class ReplayResult:
    steps: list[ReplayStep]
    result: ExtendedCospan


def _top_level_producers(c: ExtendedCospan) -> list[int]:
    """Top-level edges/boxes with no inputs and one output."""
    g = c.carrier
    return [
        e
        for e in g.edges
        if g.eparent.get(e) is None
        and not g.source[e]
        and len(g.target[e]) == 1
    ]


def _producer_cospan(host: ExtendedCospan, e: int) -> tuple[ExtendedCospan, set[Element]]:
    g = host.carrier
    elements = down_closure(g, [e])
    sub, _ = extract_subdiagram(host, elements, list(g.source[e]), list(g.target[e]))
    return sub, elements


def _apply_step(
    steps: list[ReplayStep],
    description: str,
    host: ExtendedCospan,
    lhs_elements: set[Element],
    ext_in_vs: Sequence[int],
    ext_out_vs: Sequence[int],
    rhs: ExtendedCospan,
) -> ExtendedCospan:
    lhs, hom = extract_subdiagram(host, lhs_elements, ext_in_vs, ext_out_vs)
    rule = RewriteRule(description, lhs, rhs)
    result = apply(Match(rule=rule, hom=hom, host=host))
    steps.append(ReplayStep(description, rule, result))
    return result


def _duplicate_cospan(part: ExtendedCospan) -> ExtendedCospan:
    """A box holding two copies of ``part`` (idempotence, read backwards)."""
    return cs.join_raw([part.copy(), part.copy()])


def _share_producers_step(
    steps: list[ReplayStep], host: ExtendedCospan, dup_gen
) -> Optional[ExtendedCospan]:
    """Merge two isomorphic input-free producers into one shared via a copy."""
    g = host.carrier
    ext_outs = set(host.ext_out_vertices())
    prods = _top_level_producers(host)
    for e1, e2 in itertools.combinations(prods, 2):
        w1, w2 = g.target[e1][0], g.target[e2][0]
        if w1 in ext_outs or w2 in ext_outs:
            continue
        p1, el1 = _producer_cospan(host, e1)
        p2, el2 = _producer_cospan(host, e2)
        if cs.iso(p1, p2) is None:
            continue
        rhs = cs.compose(p1.copy(), cs.generator_cospan(dup_gen))
        return _apply_step(
            steps,
            "share duplicate producer",
            host,
            el1 | el2,
            [],
            [w1, w2],
            rhs,
        )
    return None


def _merge_congruent_edges_step(
    steps: list[ReplayStep], host: ExtendedCospan, sig: Signature
) -> Optional[ExtendedCospan]:
    """Merge two same-label edges whose inputs are copies of the same wires
    (naturality of copy, read backwards)."""
    g = host.carrier
    ext_outs = set(host.ext_out_vertices())
    tops = [
        e
        for e in g.edges
        if g.eparent.get(e) is None
        and g.label[e] not in (None, COPY, DISCARD)
        and g.source[e]
        and len(g.target[e]) == 1
    ]
    for e1, e2 in itertools.combinations(tops, 2):
        if g.label[e1] != g.label[e2]:
            continue
        w1, w2 = g.target[e1][0], g.target[e2][0]
        if w1 in ext_outs or w2 in ext_outs:
            continue
        dups = []
        ok = True
        for s1, s2 in zip(g.source[e1], g.source[e2]):
            d = next(
                (
                    d
                    for d in g.edges
                    if g.label[d] == COPY and set(g.target[d]) == {s1, s2}
                ),
                None,
            )
            if d is None or s1 == s2:
                ok = False
                break
            dups.append(d)
        if not ok or len(set(dups)) != len(dups):
            continue
        elements: set[Element] = {("e", e1), ("e", e2)}
        for d in dups:
            elements.add(("e", d))
            elements.update(("v", v) for v in g.endpoints(d))
        elements.update(("v", v) for v in g.endpoints(e1))
        elements.update(("v", v) for v in g.endpoints(e2))
        rhs = cs.compose(
            cs.generator_cospan(sig[g.label[e1]]), cs.generator_cospan(sig[COPY])
        )
        return _apply_step(
            steps,
            f"share duplicate {g.label[e1]} application",
            host,
            elements,
            [g.source[d][0] for d in dups],
            [w1, w2],
            rhs,
        )
    return None


def _reshare_fixpoint(
    steps: list[ReplayStep], host: ExtendedCospan, sig: Signature, budget: int = 64
) -> ExtendedCospan:
    for _ in range(budget):
        nxt = _share_producers_step(steps, host, sig[COPY])
        if nxt is None:
            nxt = _merge_congruent_edges_step(steps, host, sig)
        if nxt is None:
            return host
        host = nxt
    raise ReplayIncomplete("sharing fixpoint not reached within budget")


def _find_producer_iso(
    host: ExtendedCospan, pattern: ExtendedCospan
) -> Optional[tuple[int, set[Element], ExtendedCospan]]:
    for e in _top_level_producers(host):
        sub, elements = _producer_cospan(host, e)
        if cs.iso(sub, pattern) is not None:
            return e, elements, sub
    return None


def _apply_rule_inside_box(
    steps: list[ReplayStep],
    host: ExtendedCospan,
    rule: RewriteRule,
    box_pattern: ExtendedCospan,
) -> ExtendedCospan:
    """Apply ``rule`` to a match nested inside the box isomorphic to
    ``box_pattern``; exactly one component is rewritten."""
    found = _find_producer_iso(host, box_pattern)
    if found is None:
        raise ReplayIncomplete("expanded alternative box not found")
    box = found[0]
    g = host.carrier
    for m in find_matches(rule, host):
        img_edges = set(m.hom.emap.values())
        if img_edges and all(g.eparent.get(e) == box for e in img_edges):
            result = apply(m)
            steps.append(ReplayStep(f"apply {rule.name} inside alternatives", rule, result))
            return result
    raise ReplayIncomplete(f"no nested match for {rule.name}")


def _replay_leaf_merge(
    steps: list[ReplayStep],
    cur: ExtendedCospan,
    lhs_t: Term,
    rhs_t: Term,
    sig: Signature,
) -> ExtendedCospan:
    """Merge of two existing input-free producers, per the five-stage recipe:
    duplicate each side (idempotence backwards), rewrite one copy in each box
    with the rule and its inverse, then re-share the now-isomorphic halves."""
    lc, rc = interpret(lhs_t, sig), interpret(rhs_t, sig)
    rule = RewriteRule("theory", lc, rc)
    for pat in (lc, rc):
        found = _find_producer_iso(cur, pat)
        if found is None:
            raise ReplayIncomplete("producer for rule side not found")
        e, elements, sub = found
        g = cur.carrier
        cur = _apply_step(
            steps,
            "duplicate alternative",
            cur,
            elements,
            list(g.source[e]),
            list(g.target[e]),
            _duplicate_cospan(sub),
        )
    cur = _apply_rule_inside_box(steps, cur, rule, _duplicate_cospan(lc))
    cur = _apply_rule_inside_box(steps, cur, rule.reversed(), _duplicate_cospan(rc))
    return _reshare_fixpoint(steps, cur, sig)


def _all_elements(g: EHypergraph) -> set[Element]:
    return {("v", v) for v in g.vertices} | {("e", e) for e in g.edges}


def _convex_hull(g: EHypergraph, elements: set[Element]) -> set[Element]:
    """Grow an element set until every directed path between its top-level
    vertices stays inside it (adding whole hierarchical edges as needed)."""
    from .core import successors

    elements = set(elements)
    succ = successors(g)
    pred: dict[int, set[int]] = {v: set() for v in g.vertices}
    for v, ws in succ.items():
        for w in ws:
            pred[w].add(v)

    def reach(starts: set[int], rel: dict[int, set[int]]) -> set[int]:
        seen = set(starts)
        todo = list(starts)
        while todo:
            v = todo.pop()
            for w in rel[v]:
                if w not in seen:
                    seen.add(w)
                    todo.append(w)
        return seen

    while True:
        top_vs = {
            i for k, i in elements if k == "v" and g.vparent.get(i) is None
        }
        fwd = reach(top_vs, succ)
        bwd = reach(top_vs, pred)
        grew = False
        for e in g.edges:
            if ("e", e) in elements or g.eparent.get(e) is not None:
                continue
            if any(v in fwd for v in g.source[e]) and any(
                v in bwd for v in g.target[e]
            ):
                elements |= down_closure(g, [e])
                grew = True
        for v in fwd & bwd:
            if g.vparent.get(v) is None and ("v", v) not in elements:
                elements.add(("v", v))
                grew = True
        if not grew:
            return elements


def _region_interface(g: EHypergraph, elements: set[Element]) -> tuple[list[int], list[int]]:
    """Top-level boundary wires of a region: consumed-but-not-produced inputs
    and produced-but-not-consumed outputs, ordered by vertex id."""
    edge_ids = {i for k, i in elements if k == "e"}
    consumed = {v for e in edge_ids for v in g.source[e]}
    produced = {v for e in edge_ids for v in g.target[e]}
    top_vs = sorted(
        i for k, i in elements if k == "v" and g.vparent.get(i) is None
    )
    ins = [v for v in top_vs if v not in produced]
    outs = [v for v in top_vs if v not in consumed]
    return ins, outs


def _mapped_uses(
    eg: EGraph, after: EGraph
) -> dict[int, list[tuple[int, ENode, int]]]:
    """Occurrence list per class, with consumers expressed in the vocabulary
    of ``after`` (class ids and canonical nodes) so the two graphs compare."""
    out: dict[int, list[tuple[int, ENode, int]]] = {}
    for c in eg.class_ids():
        for n in eg.nodes(c):
            mn = after.canonicalize(n)
            for si, ch in enumerate(n.children):
                out.setdefault(after.find(eg.find(ch)), []).append(
                    (after.find(c), mn, si)
                )
    return out


def _replay_diff_composite(
    steps: list[ReplayStep], before: EGraph, after: EGraph, sig: Signature
) -> ExtendedCospan:
    """One composite step rewriting exactly the region of the rendered graph
    that the e-graph transformation touched, convex-closed in the host."""
    rb, lb = _render(before, sig)
    ra, la = _render(after, sig)
    gb, ga = rb.carrier, ra.carrier

    # Element correspondence for classes whose rendering is unaffected.
    ub = _mapped_uses(before, after)
    ua = _mapped_uses(after, after)
    groups: dict[int, list[int]] = {}
    for b in before.class_ids():
        groups.setdefault(after.find(b), []).append(b)
    m: dict[Element, Element] = {}
    for gamma in after.class_ids():
        members = groups.get(gamma, [])
        if len(members) != 1:
            continue
        b = members[0]
        if [after.canonicalize(n) for n in before.nodes(b)] != after.nodes(gamma):
            continue
        if ub.get(gamma, []) != ua.get(gamma, []):
            continue
        eb, ea = lb.elems[b], la.elems[gamma]
        if len(eb) != len(ea):
            continue
        m.update(zip(eb, ea))
    m_image = set(m.values())

    region_b = _all_elements(gb) - set(m)
    region_b |= down_closure(
        gb, [i for k, i in region_b if k == "e" and gb.eparent.get(i) is None]
    )
    region_b = _convex_hull(gb, region_b)
    if not any(k == "e" for k, _ in region_b):
        raise ReplayIncomplete("no changed region found")
    region_a = (_all_elements(ga) - m_image) | {
        m[el] for el in region_b if el in m
    }
    region_a |= down_closure(
        ga, [i for k, i in region_a if k == "e" and ga.eparent.get(i) is None]
    )

    ins_b, outs_b = _region_interface(gb, region_b)
    out_class_b = {v: c for c, v in lb.out.items()}

    def map_in(w: int) -> int:
        el = m.get(("v", w))
        if el is None:
            raise ReplayIncomplete("boundary input wire has no counterpart")
        return el[1]

    def map_out(w: int) -> int:
        el = m.get(("v", w))
        if el is not None:
            return el[1]
        for e in gb.edges:
            if gb.eparent.get(e) is None and ("e", e) not in region_b and w in gb.source[e]:
                me = m.get(("e", e))
                if me is None:
                    raise ReplayIncomplete("boundary consumer has no counterpart")
                return ga.source[me[1]][gb.source[e].index(w)]
        c = out_class_b.get(w)
        if c is None:
            raise ReplayIncomplete("boundary output wire has no counterpart")
        return la.out[after.find(c)]

    ins_a = [map_in(w) for w in ins_b]
    outs_a = [map_out(w) for w in outs_b]
    check_ins, check_outs = _region_interface(ga, region_a)
    if set(ins_a) != set(check_ins) or set(outs_a) != set(check_outs):
        raise ReplayIncomplete("region boundaries do not correspond")
    rhs, _ = extract_subdiagram(ra, region_a, ins_a, outs_a)
    return _apply_step(
        steps,
        "rewrite changed region",
        rb,
        region_b,
        ins_b,
        outs_b,
        rhs,
    )


def replay(
    before: EGraph, rule: tuple[Term, Term], after: EGraph, sig: Signature
) -> ReplayResult:
    """Express ``before`` ~> ``after`` as double-pushout steps on cospans.

    Returns the step sequence together with the final cospan, which is
    isomorphic to ``translate(after, sig)``; raises :class:`ReplayIncomplete`
    when the scripted strategy cannot bridge the two graphs.
    """
    steps: list[ReplayStep] = []
    cur = translate(before, sig)
    target = translate(after, sig)
    if cs.iso(cur, target) is not None:
        return ReplayResult([], cur)

    before_ids = before.class_ids()
    groups: dict[int, list[int]] = {}
    for b in before_ids:
        groups.setdefault(after.find(b), []).append(b)
    changed = [
        gamma
        for gamma, members in groups.items()
        if len(members) > 1
        or {after.canonicalize(n) for n in before.nodes(members[0])}
        != set(after.nodes(gamma))
    ]
    fresh = [c for c in after.class_ids() if c not in groups]

    from .term import typecheck

    rule_closed = typecheck(rule[0], sig).dom == 0
    if not fresh and rule_closed and any(len(groups[c]) == 2 for c in changed):
        # A merge of two existing input-free producers; upward merging is
        # absorbed by the sharing fixpoint at the end of the recipe.
        cur = _replay_leaf_merge(steps, cur, rule[0], rule[1], sig)
    else:
        cur = _replay_diff_composite(steps, before, after, sig)

    if cs.iso(cur, target) is None:
        raise ReplayIncomplete("replayed result differs from the target graph")
    return ReplayResult(steps, cur)
