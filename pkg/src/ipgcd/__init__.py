"""Exact solver for integer programs with gcd constraints.

Decides feasibility and optimizes linear objectives over integer points
subject to linear inequalities and constraints of the form
gcd(f(x), g(x)) ~ c, and solves systems of divisibility constraints
between linear polynomials through a local-global reduction: solve the
system modulo finitely many difficult primes, then lift by a guided
Chinese-remainder construction.  Everything is verified exactly; a
brute-force oracle backs the test suite.
"""

from .config import DEFAULT_CONFIG, SolverConfig
from .divsys import (
    DivConstraint,
    DivSystem,
    VarPartition,
    close_elimination,
    delta_terms,
    is_increasing,
    module_span,
    pdiff,
    pzero,
    substitute,
)
from .errors import (
    DecompositionUnsupported,
    FactorizationBudgetExceeded,
    MemberLimitExceeded,
    MixedModeError,
    NoModPSolution,
    NotCoprime,
    ParseError,
    SearchBudgetExceeded,
    SolverError,
    UnsatisfiableAfterSubstitution,
    WindowExhausted,
    WindowTooLarge,
)
from .fileformat import ParsedFile, parse, parse_file, pretty
from .instance import (
    GcdConstraint,
    GcdToDivTriple,
    IpGcdInstance,
    LinRow,
    Objective,
    ShiftedCone,
    SolveOutcome,
)
from .localglobal import ModPSolution, SolveStats, solve_increasing, solve_mod_easy_prime
from .numthy import CongruenceSystem, ecrtf, solve_mixed_crt
from .oracle import Window, enumerate_mod_p, enumerate_solutions
from .cones import vzgs_decompose
from .poly import LinearPoly
from .solver import (
    feasible,
    force_increasing,
    normalize,
    optimize,
    sign_split,
    solve_triple_mod_p,
    to_triples,
)

__all__ = [
    "DEFAULT_CONFIG",
    "SolverConfig",
    "DivConstraint",
    "DivSystem",
    "VarPartition",
    "close_elimination",
    "delta_terms",
    "is_increasing",
    "module_span",
    "pdiff",
    "pzero",
    "substitute",
    "DecompositionUnsupported",
    "FactorizationBudgetExceeded",
    "MemberLimitExceeded",
    "MixedModeError",
    "NoModPSolution",
    "NotCoprime",
    "ParseError",
    "SearchBudgetExceeded",
    "SolverError",
    "UnsatisfiableAfterSubstitution",
    "WindowExhausted",
    "WindowTooLarge",
    "ParsedFile",
    "parse",
    "parse_file",
    "pretty",
    "GcdConstraint",
    "GcdToDivTriple",
    "IpGcdInstance",
    "LinRow",
    "Objective",
    "ShiftedCone",
    "SolveOutcome",
    "ModPSolution",
    "SolveStats",
    "solve_increasing",
    "solve_mod_easy_prime",
    "CongruenceSystem",
    "ecrtf",
    "solve_mixed_crt",
    "Window",
    "enumerate_mod_p",
    "enumerate_solutions",
    "vzgs_decompose",
    "LinearPoly",
    "feasible",
    "force_increasing",
    "normalize",
    "optimize",
    "sign_split",
    "solve_triple_mod_p",
    "to_triples",
]

__version__ = "0.1.0"
