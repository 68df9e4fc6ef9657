"""Unit tests for normalization, saturation, extraction, and DOT export."""

import pytest

from megraph.cospan import identity_cospan, is_mda_well_typed, iso, join_raw
from megraph.engine import (
    CostModel,
    EngineError,
    Strategy,
    components,
    export_dot,
    extract,
    normalize,
    parse_costs,
    parse_rules,
    saturate,
)
from megraph.rewrite import rule_from_terms
from megraph.term import interpret, parse, print_term, typecheck

from .fixtures import expected_stage_b
from .helpers import ARITH, BASIC, interp


class TestNormalize:
    def test_distributes_context_into_alternatives(self):
        result = normalize(interp("h ; (f + g)"))
        assert iso(result, interp("(h ; f) + (h ; g)")) is not None

    def test_collapses_duplicate_alternatives(self):
        result = normalize(join_raw([interp("f"), interp("f")]))
        assert iso(result, interp("f")) is not None

    def test_box_free_input_is_a_fixpoint(self):
        c = interp("f ; g")
        assert iso(normalize(c), c) is not None

    def test_idempotent_up_to_iso(self):
        c = interp("s ; ((f + g) * h) ; k")
        once = normalize(c)
        assert iso(normalize(once), once) is not None

    def test_components_are_box_free_and_distinct(self):
        result = normalize(interp("h ; (f + g + f)"))
        parts = components(result)
        for p in parts:
            assert all(p.carrier.label[e] is not None for e in p.carrier.edges)
        for i, p in enumerate(parts):
            for q in parts[i + 1 :]:
                assert iso(p, q) is None

    def test_budget_guard(self):
        with pytest.raises(EngineError):
            normalize(interp("h ; (f + g)"), budget=1)


class TestSaturate:
    def test_empty_rule_set_is_identity(self):
        c = interp("f ; g")
        res = saturate(c, Strategy(rules=[]))
        assert res.saturated and res.steps == 0
        assert iso(res.result, c) is not None

    def test_zero_budget_is_identity(self):
        c = interp("f")
        rule = rule_from_terms("r", parse("f"), parse("g"), BASIC)
        res = saturate(c, Strategy(rules=[rule], max_steps=0))
        assert res.steps == 0
        assert iso(res.result, c) is not None

    def test_grows_alternatives_nondestructively(self):
        rule = rule_from_terms("r", parse("f"), parse("g"), BASIC)
        res = saturate(interp("f"), Strategy(rules=[rule]))
        assert res.saturated
        assert iso(res.result, interp("f + g")) is not None

    def test_monotone_component_set(self):
        rule = rule_from_terms("r", parse("f"), parse("g ; h"), BASIC)
        c = interp("f + (h ; h)")
        res = saturate(c, Strategy(rules=[rule]))
        before = components(normalize(c))
        after = components(normalize(res.result))
        for p in before:
            assert any(iso(p, q) is not None for q in after)

    def test_negative_budget_rejected(self):
        with pytest.raises(EngineError):
            Strategy(max_steps=-1)


class TestExtract:
    def test_prefers_fewer_edges_by_default(self):
        t = extract(interp("(f ; g) + f"))
        assert print_term(t) == "f"

    def test_box_free_input_round_trips(self):
        t = extract(interp("h"))
        assert print_term(t) == "h"

    def test_cost_model_changes_the_winner(self):
        c = interp("(f ; g) + h")
        assert print_term(extract(c)) == "h"
        expensive_h = CostModel({"h": __import__("fractions").Fraction(10)})
        assert iso(interpret(extract(c, expensive_h), BASIC), interp("f ; g")) is not None

    def test_extracted_term_interprets_to_a_component(self):
        c = expected_stage_b()
        t = extract(c)
        ty = typecheck(t, ARITH)
        assert (ty.dom, ty.cod) == (0, 1)
        s = print_term(t)
        assert ("mul" in s) != ("shl" in s)
        assert is_mda_well_typed(interpret(t, ARITH)) == []


class TestExportDot:
    def test_identity_is_stable(self):
        c = identity_cospan(1)
        assert export_dot(c) == export_dot(c)
        assert "digraph" in export_dot(c)

    def test_alternatives_become_nested_clusters(self):
        c = interp("f + g")
        dot = export_dot(c)
        assert dot.count("subgraph cluster") >= 3  # the box and two branches
        assert "f" in dot and "g" in dot

    def test_deterministic_for_equal_inputs(self):
        a = interp("h ; (f + g)")
        b = interp("h ; (f + g)")
        assert export_dot(a) == export_dot(b)


class TestRuleAndCostFiles:
    def test_parse_rules(self):
        rules = parse_rules("swap : f ; g => g ; f\n# comment\n", BASIC)
        assert len(rules) == 1
        assert rules[0].name == "swap"
        assert iso(rules[0].lhs, interp("f ; g")) is not None

    def test_parse_rules_rejects_garbage(self):
        with pytest.raises(EngineError):
            parse_rules("not a rule line", BASIC)

    def test_parse_costs(self):
        m = parse_costs("f = 2\ng = 1/2\n")
        assert m.cost("f") == 2
        assert m.cost("g") * 2 == 1
        assert m.cost("unlisted") == 1
