"""Round-trip tests for the structured-text graph/diagram/e-graph formats."""

import pytest

from megraph.cospan import iso, join
from megraph.egraph import ENode, egraph_of_term_tree, translate
from megraph.serialize import (
    SerializationError,
    canonical_renumber,
    dumps_cospan,
    dumps_egraph,
    loads_cospan,
    loads_egraph,
)

from .helpers import ARITH, interp


class TestCospanRoundTrip:
    CASES = [
        "f",
        "f ; g",
        "f * g",
        "s ; (f * f) ; k",
        "h ; (f + g)",
        "a ; ((f ; g) + h)",
    ]

    @pytest.mark.parametrize("text", CASES)
    def test_loads_inverts_dumps_up_to_iso(self, text):
        c = interp(text)
        assert iso(loads_cospan(dumps_cospan(c)), c) is not None

    @pytest.mark.parametrize("text", CASES)
    def test_bit_exact_after_canonical_renumbering(self, text):
        c = canonical_renumber(interp(text))
        once = dumps_cospan(c)
        again = dumps_cospan(canonical_renumber(loads_cospan(once)))
        assert once == again

    def test_boxes_survive_the_round_trip(self):
        c = join([interp("f"), interp("g")])
        back = loads_cospan(dumps_cospan(c))
        assert sum(1 for e in back.carrier.edges if back.carrier.label[e] is None) == 1
        assert iso(back, c) is not None

    def test_garbage_is_rejected(self):
        with pytest.raises(SerializationError):
            loads_cospan("not a diagram")
        with pytest.raises(SerializationError):
            loads_cospan("{}")


class TestEGraphRoundTrip:
    def test_round_trip_preserves_translation(self):
        eg, _ = egraph_of_term_tree(("div", ("mul", "a", "two"), "two"))
        back = loads_egraph(dumps_egraph(eg))
        assert back.check_invariants() == []
        assert iso(translate(back, ARITH), translate(eg, ARITH)) is not None

    def test_round_trip_preserves_classes(self):
        eg, root = egraph_of_term_tree(("mul", "a", "two"))
        extra = eg.add(ENode("one", ()))
        shl = eg.add(ENode("shl", (eg.hashcons[ENode("a", ())], extra)))
        eg.merge(shl, root)
        back = loads_egraph(dumps_egraph(eg))
        assert {frozenset(map(repr, back.nodes(c))) for c in back.class_ids()} == {
            frozenset(map(repr, eg.nodes(c))) for c in eg.class_ids()
        }

    def test_garbage_is_rejected(self):
        with pytest.raises(SerializationError):
            loads_egraph("nonsense")
