"""Typed errors shared across the solver modules.

Every budget or cap in the library converts resource blowup into one of
these exceptions instead of silently truncating an answer.  Callers can
therefore trust that a returned value is exact.
"""

from __future__ import annotations


class SolverError(Exception):
    """Base class for all library-specific errors."""


class FactorizationBudgetExceeded(SolverError):
    """Integer factorization gave up within the configured budget."""

    def __init__(self, n: int, budget: int):
        self.n = n
        self.budget = budget
        super().__init__(f"could not factor {n} within budget {budget}")


class NotCoprime(SolverError):
    """Two CRT moduli share a common factor."""

    def __init__(self, m1: int, m2: int):
        self.moduli = (m1, m2)
        super().__init__(f"moduli {m1} and {m2} are not coprime")


class WindowExhausted(SolverError):
    """Mixed CRT scan left its provable window without finding a value.

    This must never fire on inputs satisfying the CongruenceSystem
    invariants; reaching it indicates a bug, not bad luck.
    """


class WindowTooLarge(SolverError):
    """Brute-force enumeration window exceeds the configured point cap."""


class UnsatisfiableAfterSubstitution(SolverError):
    """Substitution produced a ground divisibility that is false."""

    def __init__(self, constraint):
        self.constraint = constraint
        super().__init__(f"ground constraint violated: {constraint}")


class NoModPSolution(SolverError):
    """A required solution modulo p does not exist."""

    def __init__(self, p: int, detail: str = ""):
        self.p = p
        msg = f"no solution modulo {p}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DecompositionUnsupported(SolverError):
    """Polyhedron falls outside the supported decomposition classes.

    Supported: bounded polyhedra and unbounded ones whose recession cone
    is pointed.  A non-trivial lineality space raises this error.
    """


class SearchBudgetExceeded(SolverError):
    """A bounded residue or branch search hit its configured cap."""


class MemberLimitExceeded(SolverError):
    """Sign splitting or decomposition produced more members than allowed."""


class ParseError(SolverError):
    """Input text rejected by the problem-file parser."""

    def __init__(self, message: str, line: int, column: int):
        self.line = line
        self.column = column
        super().__init__(f"line {line}, column {column}: {message}")


class MixedModeError(SolverError):
    """A problem file mixes GCD constraints with raw divisibility lines."""
