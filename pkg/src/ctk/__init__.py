"""Compositional CTMC model checking of signalling pathways.

Build pathway models from reusable guarded-command modules, compose them
by synchronising parallel composition with renaming and hiding, verify
CSL properties exactly, and classify, detect and characterise cross-talk
between pathways.
"""

from .algebra import (
    FlatSystem,
    IndependenceResult,
    alphabet,
    flatten,
    independence_check,
    instantiate,
)
from .ast_nodes import Model
from .checker import (
    CheckResult,
    CheckSettings,
    check_property,
    eval_state_formula,
    prob_bounded_until,
    prob_unbounded_until,
    qualitative_check,
)
from .crosstalk import (
    CharacterisationReport,
    Classification,
    CrosstalkCategory,
    DetectionReport,
    characterise,
    classify,
    detect,
)
from .ctmc import Ctmc, build, export_tables, label_transitions
from .errors import (
    BuildError,
    CheckError,
    CtkError,
    MissingAnnotationError,
    ModelError,
    ParseError,
    SolverError,
    StateCapError,
)
from .parser import parse_composition, parse_model, parse_model_file
from .properties import parse_property, parse_property_file
from .serialize import (
    serialize_composition,
    serialize_model,
    serialize_module,
    serialize_property,
)
from .stdlib import Fixture, case_study_skeleton, list_fixtures, load_fixture

__all__ = [
    "BuildError", "CharacterisationReport", "CheckError", "CheckResult",
    "CheckSettings", "Classification", "CrosstalkCategory", "Ctmc",
    "CtkError", "DetectionReport", "Fixture", "FlatSystem",
    "IndependenceResult", "MissingAnnotationError", "Model", "ModelError",
    "ParseError", "SolverError", "StateCapError", "alphabet", "build",
    "case_study_skeleton", "characterise", "check_property", "classify",
    "detect", "eval_state_formula", "export_tables", "flatten",
    "independence_check", "instantiate", "label_transitions",
    "list_fixtures", "load_fixture", "parse_composition", "parse_model",
    "parse_model_file", "parse_property", "parse_property_file",
    "prob_bounded_until", "prob_unbounded_until", "qualitative_check",
    "serialize_composition", "serialize_model", "serialize_module",
    "serialize_property",
]

__version__ = "0.1.0"
