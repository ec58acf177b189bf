"""Finite partial incidence structures: openness, closures, amalgams and completions."""

from .construction import (AmalgamError, CompletionStage, IndependenceReport, Provenance,
                           algebraic_extensions_in, canonical_amalgam, completion_fixed_point,
                           completion_step, free_amalgam, free_completion, independent_icl, k_iterate)
from .fixtures import AmalgamFixture, C6Report, WitnessConfig, builtin, verify_c6
from .kinds import (ExtensionClass, HyperfreeTuple, Violation, algebraic_degree, classify_one_step,
                    hyperfree_tuples, is_nondegenerate, is_valid, nondegeneracy_criterion,
                    validate_T_forall, valency)
from .openness import (Certificate, HFOrder, IclResult, closed_witness_bruteforce, gaifman_closure,
                       hf_closure, intrinsic_closure, intrinsic_closure_report, is_open_over,
                       is_strong, minimal_closed_sets, peel, verify_hf_order)
from .predimension import DeltaSpec, check_delta_axioms, default_spec, delta, leq_delta
from .structure import (Kind, Structure, StructureError, count_copies_over, distance, empty,
                        gaifman_graph, girth_and_bipartite, induced_substructure, is_isomorphic,
                        iter_embeddings_over)
from .textio import Document, ParseError, emit_certificate, parse, serialize

__version__ = "0.1.0"

__all__ = [
    "algebraic_degree",
    "algebraic_extensions_in",
    "AmalgamError",
    "AmalgamFixture",
    "builtin",
    "C6Report",
    "canonical_amalgam",
    "Certificate",
    "check_delta_axioms",
    "classify_one_step",
    "closed_witness_bruteforce",
    "completion_fixed_point",
    "completion_step",
    "CompletionStage",
    "count_copies_over",
    "default_spec",
    "delta",
    "DeltaSpec",
    "distance",
    "Document",
    "emit_certificate",
    "empty",
    "ExtensionClass",
    "free_amalgam",
    "free_completion",
    "gaifman_closure",
    "gaifman_graph",
    "girth_and_bipartite",
    "hf_closure",
    "HFOrder",
    "hyperfree_tuples",
    "HyperfreeTuple",
    "IclResult",
    "IndependenceReport",
    "independent_icl",
    "induced_substructure",
    "intrinsic_closure",
    "intrinsic_closure_report",
    "is_isomorphic",
    "is_nondegenerate",
    "is_open_over",
    "is_strong",
    "is_valid",
    "iter_embeddings_over",
    "k_iterate",
    "Kind",
    "leq_delta",
    "minimal_closed_sets",
    "nondegeneracy_criterion",
    "parse",
    "ParseError",
    "peel",
    "Provenance",
    "serialize",
    "Structure",
    "StructureError",
    "valency",
    "validate_T_forall",
    "verify_c6",
    "verify_hf_order",
    "Violation",
    "WitnessConfig",
]
