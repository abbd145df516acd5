"""Exact decision engine for the tame Deligne-Simpson problem."""

from .multgroup import MultElement, ParamVector, PreconditionError, almost_generic_check, evaluate_char, generic_check
from .roots import DimVector, RootKind, StarGraph, cartan_pairing, classify_root, p_value, simple_reflection
from .sigma import Kind, classify, ds_verdict, sigma_membership
from .spectral import ClassSpec, ValidationError, build_problem

__version__ = "0.1.0"

__all__ = [
    "ClassSpec",
    "DimVector",
    "Kind",
    "MultElement",
    "ParamVector",
    "PreconditionError",
    "RootKind",
    "StarGraph",
    "ValidationError",
    "almost_generic_check",
    "build_problem",
    "cartan_pairing",
    "classify",
    "classify_root",
    "ds_verdict",
    "evaluate_char",
    "generic_check",
    "p_value",
    "sigma_membership",
    "simple_reflection",
]
