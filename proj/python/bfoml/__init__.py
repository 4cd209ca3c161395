"""Satisfiability toolkit for bundled fragments of first-order modal logic."""

from ._bfoml import (
    bounded_sat,
    classify,
    clean,
    corpus,
    enumerate_models,
    evaluate_model,
    fo_eval,
    free_variables,
    modal_depth,
    parse_check,
    pnf,
    solve,
    translate,
    validate_model,
)

__version__ = "0.1.0"

__all__ = [
    "bounded_sat",
    "classify",
    "clean",
    "corpus",
    "enumerate_models",
    "evaluate_model",
    "fo_eval",
    "free_variables",
    "modal_depth",
    "parse_check",
    "pnf",
    "solve",
    "translate",
    "validate_model",
    "__version__",
]
