"""Tunable budgets for the solving pipeline."""

from __future__ import annotations

from dataclasses import dataclass


@dataclass(frozen=True)
class SolverConfig:
    """Caps converting combinatorial blowup into typed errors.

    factor_budget: Pollard-rho step budget per factorization.
    max_members: cap on sign-split members times gcd-tautology branches.
    residue_cap: cap on the residue enumeration space of triple mod-p search.
    point_cap: cap on integer-point enumeration (decomposition and oracle).
    """

    factor_budget: int = 5000000
    max_members: int = 20000
    residue_cap: int = 2000000
    point_cap: int = 10000000


DEFAULT_CONFIG = SolverConfig()
