"""Gradient methods with inexact models of the objective.

Thin bindings over the C++ core. Vectors and matrices are numpy arrays.
Failures raise ``ModeloptError`` with a ``kind`` attribute such as
``"rejected_input"`` or ``"infeasible"``.
"""

from ._modelopt import (
    ModeloptError,
    Problem,
    RunReport,
    argdual,
    bregman,
    build_problem,
    holder_L,
    largest_root,
    problem_names,
    run_benchmark,
    run_command,
    solve,
)

__all__ = [
    "ModeloptError",
    "Problem",
    "RunReport",
    "argdual",
    "bregman",
    "build_problem",
    "holder_L",
    "largest_root",
    "problem_names",
    "run_benchmark",
    "run_command",
    "solve",
]
