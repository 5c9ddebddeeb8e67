"""Exact symbolic verification of the point symmetries of Lame's first-order system."""
from .batch import BatchVerifier, verify_generator_async
from .expression import Polynomial, normalize
from .jet import differentiate, total_derivative
from .parser import parse
from .prolongation import VectorFieldAnsatz, builtin_generator, load_ansatz_file, parse_ansatz, prolong_first
from .reduction import on_shell_reduce
from .verify import GroupAction, SymmetryReport, group_action_test, verify_generator

__all__ = [
    "Polynomial",
    "normalize",
    "parse",
    "differentiate",
    "total_derivative",
    "VectorFieldAnsatz",
    "builtin_generator",
    "parse_ansatz",
    "load_ansatz_file",
    "prolong_first",
    "on_shell_reduce",
    "SymmetryReport",
    "verify_generator",
    "verify_generator_async",
    "BatchVerifier",
    "GroupAction",
    "group_action_test",
]
