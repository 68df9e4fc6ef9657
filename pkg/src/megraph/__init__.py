"""megraph: monoidal e-graphs as hierarchical hypergraphs with
extended-interface cospans, convex double-pushout rewriting, structural
normalization, classical e-graph import, and cost-based extraction."""

from .core import (
    EHomomorphism,
    EHypergraph,
    Generator,
    Signature,
    degrees,
    down_closure,
    is_acyclic,
    is_convex,
    validate,
)
from .cospan import (
    ExtendedCospan,
    compose,
    generator_cospan,
    identity_cospan,
    is_mda_well_typed,
    iso,
    join,
    pushout,
    symmetry_cospan,
    tensor,
    validate_cospan,
)
from .term import Term, interpret, parse, parse_signature, print_term, typecheck
from .rewrite import (
    Match,
    RewriteRule,
    apply,
    boundary_complement,
    find_matches,
    rule_from_terms,
    structural_matches,
)
from .egraph import EGraph, ENode, replay, translate
from .engine import CostModel, Strategy, export_dot, extract, normalize, saturate

__version__ = "0.1.0"

__all__ = [
    "CostModel",
    "EGraph",
    "EHomomorphism",
    "EHypergraph",
    "ENode",
    "ExtendedCospan",
    "Generator",
    "Match",
    "RewriteRule",
    "Signature",
    "Strategy",
    "Term",
    "apply",
    "boundary_complement",
    "compose",
    "degrees",
    "down_closure",
    "export_dot",
    "extract",
    "find_matches",
    "generator_cospan",
    "identity_cospan",
    "interpret",
    "is_acyclic",
    "is_convex",
    "is_mda_well_typed",
    "iso",
    "join",
    "normalize",
    "parse",
    "parse_signature",
    "print_term",
    "pushout",
    "replay",
    "rule_from_terms",
    "saturate",
    "structural_matches",
    "symmetry_cospan",
    "tensor",
    "translate",
    "typecheck",
    "validate",
    "validate_cospan",
]
