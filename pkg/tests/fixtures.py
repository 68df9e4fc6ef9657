"""Hand-built reference diagrams and e-graph scenarios for the pipeline and
commuting-square acceptance tests.

The expected diagrams are constructed vertex-by-vertex, independently of the
library's e-graph renderer, and compared up to isomorphism.
"""

from __future__ import annotations

from megraph.core import EHypergraph
from megraph.cospan import ExtendedCospan
from megraph.egraph import EGraph, egraph_of_term_tree
from megraph.term import parse

# ---------------------------------------------------------------------------
# The (a*2)/2 pipeline: import, x*2 -> x<<1, then (x*y)/z -> x*(y/z)
# ---------------------------------------------------------------------------


def pipeline_egraphs():
    """(stage_a, stage_b, stage_c) e-graphs for (a*2)/2 under the two rules."""
    eg0, _root = egraph_of_term_tree(("div", ("mul", "a", "two"), "two"))
    # x*2 -> x<<1 at the only mul node: add shl(a, one), merge into mul's class
    eg1 = eg0.copy()
    from megraph.egraph import ENode

    a_c = eg1.hashcons[ENode("a", ())]
    two_c = eg1.hashcons[ENode("two", ())]
    mul_c = eg1.find(eg1.hashcons[ENode("mul", (a_c, two_c))])
    one_c = eg1.add(ENode("one", ()))
    shl_c = eg1.add(ENode("shl", (a_c, one_c)))
    eg1.merge(shl_c, mul_c)
    # (x*y)/z -> x*(y/z) at div(mul(a,two), two): add mul(a, div(two,two))
    eg2 = eg1.copy()
    div_c = eg2.find(eg2.hashcons[ENode("div", (eg2.find(mul_c), two_c))])
    d2 = eg2.add(ENode("div", (two_c, two_c)))
    m2 = eg2.add(ENode("mul", (a_c, d2)))
    eg2.merge(m2, div_c)
    return eg0, eg1, eg2


def pipeline_rules():
    """The two rewrites as (lhs_term, rhs_term) pairs over the arithmetic
    signature, each with one open input per pattern variable."""
    r1 = (parse("(id:1 * two) ; mul"), parse("(id:1 * one) ; shl"))
    r2 = (parse("(mul * id:1) ; div"), parse("(id:1 * div) ; mul"))
    return r1, r2


def _alternatives_box(
    g: EHypergraph, ins: list[int], out: int, comps: list[tuple[str, list[int]]]
) -> list[tuple[list[int], int]]:
    """A box over ``ins`` -> ``out`` with one component per (label, own-slots)
    entry; every component discards the slots owned by its siblings.
    Returns each component's (slot vertices, result vertex)."""
    box = g.add_edge(None, ins, [out])
    made = []
    for ci, (label, own) in enumerate(comps):
        us = [g.add_vertex(parent=box, component=ci) for _ in ins]
        w = g.add_vertex(parent=box, component=ci)
        g.add_edge(label, [us[s] for s in own], [w], parent=box, component=ci)
        for s in range(len(ins)):
            if s not in own:
                g.add_edge("del", [us[s]], [], parent=box, component=ci)
        made.append((us, w))
    return made


def expected_stage_b() -> ExtendedCospan:
    """(a*2)/2 after x*2 -> x<<1: div applied to an alternatives box holding
    mul(a, two) and shl(a, one), with a and two each copied once."""
    g = EHypergraph()
    root = g.add_vertex()
    alt = g.add_vertex()
    a_w = g.add_vertex()
    two_w = g.add_vertex()
    one_w = g.add_vertex()
    a1, a2 = g.add_vertex(), g.add_vertex()
    t1, t2 = g.add_vertex(), g.add_vertex()
    g.add_edge("a", [], [a_w])
    g.add_edge("two", [], [two_w])
    g.add_edge("one", [], [one_w])
    g.add_edge("dup", [a_w], [a1, a2])
    g.add_edge("dup", [two_w], [t1, t2])
    comps = _alternatives_box(
        g, [a1, t1, a2, one_w], alt, [("mul", [0, 1]), ("shl", [2, 3])]
    )
    g.add_edge("div", [alt, t2], [root])
    int_in = [v for us, _ in comps for v in us]
    int_out = [root] + [w for _, w in comps]
    return ExtendedCospan(g, tuple(int_in), tuple(int_out), (), (0,))


def expected_stage_c() -> ExtendedCospan:
    """Stage b after (x*y)/z -> x*(y/z): the root becomes an alternatives box
    holding div(alt, two) and mul(a, div(two, two))."""
    g = EHypergraph()
    root = g.add_vertex()
    alt = g.add_vertex()  # mul/shl alternatives
    a_w = g.add_vertex()
    two_w = g.add_vertex()
    one_w = g.add_vertex()
    dd_w = g.add_vertex()  # div(two, two)
    # a feeds three consumers: mul and shl in the first box, mul in the second
    a1, a2, a3, ax = (g.add_vertex() for _ in range(4))
    g.add_edge("a", [], [a_w])
    g.add_edge("dup", [a_w], [a1, ax])
    g.add_edge("dup", [ax], [a2, a3])
    # two feeds four consumers: mul, the root div, and both slots of div(two,two)
    t1, t2, t3, t4, tx, ty = (g.add_vertex() for _ in range(6))
    g.add_edge("two", [], [two_w])
    g.add_edge("dup", [two_w], [t1, tx])
    g.add_edge("dup", [tx], [t2, ty])
    g.add_edge("dup", [ty], [t3, t4])
    g.add_edge("one", [], [one_w])
    g.add_edge("div", [t3, t4], [dd_w])
    comps1 = _alternatives_box(
        g, [a1, t1, a2, one_w], alt, [("mul", [0, 1]), ("shl", [2, 3])]
    )
    comps2 = _alternatives_box(
        g, [alt, t2, a3, dd_w], root, [("div", [0, 1]), ("mul", [2, 3])]
    )
    int_in = [v for us, _ in comps1 + comps2 for v in us]
    int_out = [root] + [w for _, w in comps1 + comps2]
    return ExtendedCospan(g, tuple(int_in), tuple(int_out), (), (0,))


# ---------------------------------------------------------------------------
# Shared-leaf merge: f(a,b) + f(a,c) with b -> c
# ---------------------------------------------------------------------------


def leaf_merge_egraphs():
    """(before, after) for plus(f(a,b), f(a,c)) when b and c are equated."""
    eg, _root = egraph_of_term_tree(("plus", ("f", "a", "b"), ("f", "a", "c")))
    from megraph.egraph import ENode

    after = eg.copy()
    after.merge(after.hashcons[ENode("b", ())], after.hashcons[ENode("c", ())])
    return eg, after


def leaf_merge_rule():
    return parse("b"), parse("c")
