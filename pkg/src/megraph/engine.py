"""Rewriting engine: normalization, saturation, extraction, DOT export.

Normalization drives the forward structural schemas to a fixpoint, yielding
a (possibly trivial) alternative of box-free, pairwise non-isomorphic
subdiagrams.  Saturation grows the alternative structure non-destructively:
every rule application whose result contributes a new alternative (up to
isomorphism) is joined into the graph.  Extraction picks one alternative per
hierarchical edge minimizing a per-generator cost and re-expresses the
pruned diagram as a term.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from .core import down_closure
from . import cospan as cs
from .cospan import ExtendedCospan
from . import term as tm
from .rewrite import (
    Match,
    RewriteRule,
    SCHEMA_IDS,
    apply,
    component_cospan,
    extract_subdiagram,
    find_matches,
    structural_matches,
)


class EngineError(Exception):
    pass


@dataclass
class Strategy:
    rules: list[RewriteRule] = field(default_factory=list)
    schemas: tuple[str, ...] = SCHEMA_IDS
    max_steps: int = 100
    bidirectional: bool = False
    seed: int = 0

    def __post_init__(self) -> None:
        if self.max_steps < 0:
            raise EngineError("max_steps must be non-negative")


@dataclass
class CostModel:
    costs: dict[str, Fraction] = field(default_factory=dict)
    default: Fraction = Fraction(1)

    def cost(self, label: str) -> Fraction:
        c = self.costs.get(label, self.default)
        if c < 0:
            raise EngineError(f"negative cost for {label!r}")
        return c


def parse_costs(text: str) -> CostModel:
    """Parse ``name = cost`` lines; '#' starts a comment."""
    costs: dict[str, Fraction] = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise EngineError(f"cost line {lineno}: cannot parse {raw!r}")
        name, val = (part.strip() for part in line.split("=", 1))
        try:
            costs[name] = Fraction(val)
        except (ValueError, ZeroDivisionError) as exc:
            raise EngineError(f"cost line {lineno}: {exc}") from exc
    return CostModel(costs)


# ---------------------------------------------------------------------------
# Normalization
# ---------------------------------------------------------------------------


def normalize(
    c: ExtendedCospan, budget: int = 10_000, order: str = "first"
) -> ExtendedCospan:
    """Apply forward structural schemas to a fixpoint.

    ``order`` selects which available step runs first ("first" or "last"),
    used to probe order-independence.  Raises :class:`EngineError` when the
    step budget is exhausted.
    """
    cur = c
    for _ in range(budget):
        ms = structural_matches(cur)
        if not ms:
            return _canonical_join(cur)
        _, match = ms[0] if order == "first" else ms[-1]
        cur = apply(match)
    raise EngineError("normalization step budget exceeded")


def _canonical_join(c: ExtendedCospan) -> ExtendedCospan:
    """Rebuild a top-level alternative box with its wires attached in
    external-interface order, so the result does not depend on the order in
    which alternatives were accumulated."""
    g = c.carrier
    tops = [e for e in g.edges if g.eparent.get(e) is None]
    if len(tops) != 1 or not g.is_box(tops[0]):
        return c
    box = tops[0]
    endpoints = set(g.endpoints(box))
    if not all(v in endpoints for v in g.vertices if g.vparent.get(v) is None):
        return c
    src, tgt = list(g.source[box]), list(g.target[box])
    ext_in = list(c.ext_in_vertices())
    ext_out = list(c.ext_out_vertices())
    if set(src) != set(ext_in) or set(tgt) != set(ext_out):
        return c
    comps = sorted(
        {(g.vcomp[i] if k == "v" else g.ecomp[i]) for k, i in g.children(box)}
    )
    parts = []
    for k in comps:
        d = component_cospan(c, box, k)  # ports follow the box's wire order
        part = d
        if src != ext_in:
            part = cs.compose(
                _port_wiring(len(ext_in), [ext_in.index(v) for v in src]), part
            )
        if tgt != ext_out:
            part = cs.compose(
                part, _port_wiring(len(tgt), [tgt.index(v) for v in ext_out])
            )
        parts.append(part)
    return cs.join(parts)


def _port_wiring(n: int, out_of: Sequence[int]) -> ExtendedCospan:
    g = cs.discrete(n)
    vs = tuple(g.vertices)
    return ExtendedCospan(
        g,
        vs,
        tuple(vs[i] for i in out_of),
        tuple(range(n)),
        tuple(range(len(out_of))),
    )


def components(c: ExtendedCospan) -> list[ExtendedCospan]:
    """The alternatives of a top-level alternative box, or ``[c]`` itself."""
    g = c.carrier
    tops = [e for e in g.edges if g.eparent.get(e) is None]
    if len(tops) == 1 and g.is_box(tops[0]):
        box = tops[0]
        endpoints = set(g.endpoints(box))
        if all(v in endpoints for v in g.vertices if g.vparent.get(v) is None):
            comps = sorted(
                {
                    (g.vcomp[i] if k == "v" else g.ecomp[i])
                    for k, i in g.children(box)
                }
            )
            return [component_cospan(c, box, k) for k in comps]
    return [c]


# ---------------------------------------------------------------------------
# Saturation
# ---------------------------------------------------------------------------


@dataclass
class SaturationResult:
    result: ExtendedCospan
    steps: int
    saturated: bool


def saturate(c: ExtendedCospan, s: Strategy) -> SaturationResult:
    """Join in every rule-application result that adds a new alternative."""
    rules = list(s.rules)
    if s.bidirectional:
        rules += [r.reversed() for r in s.rules]
    comps = components(c)
    steps = 0
    while steps < s.max_steps:
        cur = comps[0] if len(comps) == 1 else cs.join(comps)
        added = False
        for rule in rules:
            for m in find_matches(rule, cur):
                cand = apply(m)
                for new in components(cand):
                    if all(cs.iso(new, old) is None for old in comps):
                        comps.append(new)
                        steps += 1
                        added = True
                        break
                if added:
                    break
            if added:
                break
        if not added:
            result = c if steps == 0 else cur
            return SaturationResult(result, steps, True)
    result = c if steps == 0 else (comps[0] if len(comps) == 1 else cs.join(comps))
    return SaturationResult(result, steps, False)


# ---------------------------------------------------------------------------
# Extraction
# ---------------------------------------------------------------------------


def _edge_cost(c: ExtendedCospan, e: int, m: CostModel) -> Fraction:
    g = c.carrier
    if not g.is_box(e):
        return m.cost(g.label[e])
    by_comp: dict[int, Fraction] = {}
    for k, i in g.children(e):
        if k != "e":
            continue
        comp = g.ecomp[i]
        by_comp[comp] = by_comp.get(comp, Fraction(0)) + _edge_cost(c, i, m)
    return min(by_comp.values())


def _best_component(c: ExtendedCospan, box: int, m: CostModel) -> int:
    g = c.carrier
    by_comp: dict[int, Fraction] = {}
    for k, i in g.children(box):
        comp = g.vcomp[i] if k == "v" else g.ecomp[i]
        by_comp.setdefault(comp, Fraction(0))
        if k == "e":
            by_comp[comp] += _edge_cost(c, i, m)
    return min(sorted(by_comp), key=lambda k: by_comp[k])


def prune(c: ExtendedCospan, m: Optional[CostModel] = None) -> ExtendedCospan:
    """Keep the cheapest alternative of every hierarchical edge."""
    m = m or CostModel()
    cur = c
    for _ in range(len(c.carrier.edges) + 1):
        g = cur.carrier
        boxes = sorted(
            (e for e in g.edges if g.is_box(e)), key=lambda e: g.depth(("e", e))
        )
        if not boxes:
            return cur
        box = boxes[0]
        best = _best_component(cur, box, m)
        lhs, hom = extract_subdiagram(
            cur, down_closure(g, [box]), list(g.source[box]), list(g.target[box])
        )
        rhs = component_cospan(cur, box, best)
        rule = RewriteRule("keep cheapest alternative", lhs, rhs)
        cur = apply(Match(rule=rule, hom=hom, host=cur))
    raise EngineError("pruning did not terminate")  # pragma: no cover


def _perm_term(cur: list[int], want: list[int]) -> Optional[tm.Term]:
    """Adjacent-swap wiring turning wire order ``cur`` into ``want``."""
    if cur == want:
        return None
    work = list(cur)
    t: Optional[tm.Term] = None
    for i, target in enumerate(want):
        j = work.index(target)
        while j > i:
            work[j - 1], work[j] = work[j], work[j - 1]
            swap: tm.Term = tm.Sym(1, 1)
            if j - 1 > 0:
                swap = tm.Tensor(tm.Id(j - 1), swap)
            if len(work) - j - 1 > 0:
                swap = tm.Tensor(swap, tm.Id(len(work) - j - 1))
            t = swap if t is None else tm.Comp(t, swap)
            j -= 1
    return t


def term_of(c: ExtendedCospan) -> tm.Term:
    """Re-express a box-free MDA cospan as a term interpreting to it."""
    g = c.carrier
    if any(g.is_box(e) for e in g.edges):
        raise EngineError("cannot express a diagram with alternatives as a term")
    avail = list(c.ext_in_vertices())
    remaining = set(g.edges)
    parts: list[tm.Term] = []

    def emit(t: Optional[tm.Term]) -> None:
        if t is not None:
            parts.append(t)

    while remaining:
        ready = sorted(
            e for e in remaining if all(s in set(avail) for s in g.source[e])
        )
        if not ready:
            raise EngineError("diagram is not acyclic")
        consumed = [s for e in ready for s in g.source[e]]
        rest = [w for w in avail if w not in set(consumed)]
        emit(_perm_term(avail, consumed + rest))
        layer: Optional[tm.Term] = None
        for e in ready:
            gen = tm.Gen(g.label[e])
            layer = gen if layer is None else tm.Tensor(layer, gen)
        if rest:
            pad = tm.Id(len(rest))
            layer = pad if layer is None else tm.Tensor(layer, pad)
        emit(layer)
        avail = [t for e in ready for t in g.target[e]] + rest
        remaining -= set(ready)
    emit(_perm_term(avail, list(c.ext_out_vertices())))
    if not parts:
        if not avail:
            raise EngineError("cannot express an empty diagram as a term")
        parts.append(tm.Id(len(avail)))
    t = parts[0]
    for p in parts[1:]:
        t = tm.Comp(t, p)
    return t


def extract(c: ExtendedCospan, m: Optional[CostModel] = None) -> tm.Term:
    """A cheapest term: one alternative chosen per hierarchical edge."""
    return term_of(prune(c, m))


# ---------------------------------------------------------------------------
# DOT export
# ---------------------------------------------------------------------------


def export_dot(c: ExtendedCospan) -> str:
    """Deterministic DOT rendering: hierarchical edges become dashed
    clusters, their alternatives nested dashed sub-clusters."""
    g = c.carrier
    out: list[str] = [
        "digraph diagram {",
        "  compound=true;",
        "  rankdir=LR;",
        "  node [fontname=\"Helvetica\"];",
    ]

    def vertex_line(v: int, indent: str) -> str:
        return f'{indent}v{v} [shape=point, xlabel="{v}"];'

    def edge_node_line(e: int, indent: str) -> str:
        return f'{indent}e{e} [shape=box, label="{g.label[e]}"];'

    def emit_box(e: int, indent: str) -> None:
        out.append(f"{indent}subgraph cluster_e{e} {{")
        out.append(f'{indent}  style=dashed;')
        out.append(f'{indent}  label="e{e}";')
        out.append(f"{indent}  a{e} [shape=point, style=invis];")
        comps = sorted(
            {
                (g.vcomp[i] if k == "v" else g.ecomp[i])
                for k, i in g.children(e)
            }
        )
        for comp in comps:
            out.append(f"{indent}  subgraph cluster_e{e}_c{comp} {{")
            out.append(f"{indent}    style=dashed;")
            out.append(f'{indent}    label="alt {comp}";')
            for v in sorted(v for v in g.vertices if g.vparent.get(v) == e and g.vcomp[v] == comp):
                out.append(vertex_line(v, indent + "    "))
            for ch in sorted(i for i in g.edges if g.eparent.get(i) == e and g.ecomp[i] == comp):
                if g.is_box(ch):
                    emit_box(ch, indent + "    ")
                else:
                    out.append(edge_node_line(ch, indent + "    "))
            out.append(f"{indent}  }}")
        out.append(f"{indent}}}")

    for v in sorted(v for v in g.vertices if g.vparent.get(v) is None):
        out.append(vertex_line(v, "  "))
    for e in sorted(e for e in g.edges if g.eparent.get(e) is None):
        if g.is_box(e):
            emit_box(e, "  ")
        else:
            out.append(edge_node_line(e, "  "))

    def anchor(e: int) -> tuple[str, str]:
        if g.is_box(e):
            return f"a{e}", f" [lhead=cluster_e{e}]"
        return f"e{e}", ""

    def anchor_out(e: int) -> tuple[str, str]:
        if g.is_box(e):
            return f"a{e}", f" [ltail=cluster_e{e}]"
        return f"e{e}", ""

    for e in sorted(g.edges):
        node_in, attr_in = anchor(e)
        node_out, attr_out = anchor_out(e)
        for v in g.source[e]:
            out.append(f"  v{v} -> {node_in}{attr_in};")
        for v in g.target[e]:
            out.append(f"  {node_out} -> v{v}{attr_out};")

    ins = sorted(set(c.ext_in_vertices()))
    outs = sorted(set(c.ext_out_vertices()) - set(ins))
    if ins:
        out.append("  { rank=source; " + " ".join(f"v{v};" for v in ins) + " }")
    if outs:
        out.append("  { rank=sink; " + " ".join(f"v{v};" for v in outs) + " }")
    out.append("}")
    return "\n".join(out) + "\n"


# ---------------------------------------------------------------------------
# Rule files
# ---------------------------------------------------------------------------


def parse_rules(text: str, sig) -> list[RewriteRule]:
    """Parse ``name : term => term`` lines; '#' starts a comment."""
    from .rewrite import rule_from_terms

    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line or "=>" not in line:
            raise EngineError(f"rule line {lineno}: cannot parse {raw!r}")
        name, rest = (p.strip() for p in line.split(":", 1))
        lhs_text, rhs_text = (p.strip() for p in rest.split("=>", 1))
        rules.append(
            rule_from_terms(name, tm.parse(lhs_text), tm.parse(rhs_text), sig)
        )
    return rules
