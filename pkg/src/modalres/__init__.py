"""Resolution-based prover for multimodal logics of confluence, with a
bounded Kripke-model oracle for testing and countermodels."""

from .calculus import LogicSpec
from .formula import Formula, Lit, ParseError, complement, parse, render
from .saturation import (Limits, Proof, ResourceLimit, Saturated,
                         Unsatisfiable, saturate)
from .semantics import (FrameProperty, KripkeModel, bounded_model_search,
                        frame_has_property, holds_universally, satisfies)
from .snf import Clause, ClauseSet, definition_clauses, to_snf

__all__ = [
    "Clause", "ClauseSet", "Formula", "FrameProperty", "KripkeModel",
    "Limits", "Lit", "LogicSpec", "ParseError", "Proof", "ResourceLimit",
    "Saturated", "Unsatisfiable", "bounded_model_search", "complement",
    "definition_clauses", "frame_has_property", "holds_universally", "parse",
    "render", "satisfies", "saturate", "to_snf",
]

__version__ = "0.1.0"
