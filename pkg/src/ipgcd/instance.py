"""Problem types: integer programs with gcd constraints and their cone shapes.

An instance holds a fixed variable tuple, inequality rows a.x <= b over that
order, gcd constraints between two linear polynomials, and an optional linear
objective.  Solutions range over all integers unless rows say otherwise.

The gcd of two values is taken non-negative: gcd(0, n) = |n| and
gcd(0, 0) = 0, matching math.gcd.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Mapping, Optional, Sequence, Tuple

from .divsys import DivSystem
from .intlinalg import IntMatrix
from .localglobal import SolveStats
from .poly import LinearPoly

RELATIONS = ("<=", "=", "!=", ">=")


@dataclass(frozen=True)
class LinRow:
    """One inequality row: coeffs . x <= bound."""

    coeffs: Tuple[int, ...]
    bound: int

    def holds_at(self, point: Sequence[int]) -> bool:
        return sum(c * v for c, v in zip(self.coeffs, point)) <= self.bound


@dataclass(frozen=True)
class GcdConstraint:
    """gcd(f, g) rel c with rel in {<=, =, !=, >=} and c >= 1."""

    f: LinearPoly
    g: LinearPoly
    rel: str
    c: int

    def __post_init__(self) -> None:
        if self.rel not in RELATIONS:
            raise ValueError(f"unknown relation {self.rel!r}")
        if self.c < 1:
            raise ValueError("gcd bound must be at least 1")

    def holds_at(self, assignment: Mapping[str, int]) -> bool:
        value = math.gcd(self.f.evaluate(assignment), self.g.evaluate(assignment))
        if self.rel == "<=":
            return value <= self.c
        if self.rel == "=":
            return value == self.c
        if self.rel == "!=":
            return value != self.c
        return value >= self.c

    def __str__(self) -> str:
        return f"gcd({self.f}, {self.g}) {self.rel} {self.c}"


@dataclass(frozen=True)
class Objective:
    coeffs: Tuple[int, ...]
    direction: str  # "min" or "max"

    def __post_init__(self) -> None:
        if self.direction not in ("min", "max"):
            raise ValueError(f"unknown direction {self.direction!r}")


@dataclass(frozen=True)
class IpGcdInstance:
    """Integer program with gcd constraints over a fixed variable order."""

    variables: Tuple[str, ...]
    inequalities: Tuple[LinRow, ...]
    gcd_constraints: Tuple[GcdConstraint, ...]
    objective: Optional[Objective] = None

    def __post_init__(self) -> None:
        if not self.variables:
            raise ValueError("instance needs at least one variable")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable names")
        d = len(self.variables)
        for row in self.inequalities:
            if len(row.coeffs) != d:
                raise ValueError("row width does not match variable count")
        scope = set(self.variables)
        for con in self.gcd_constraints:
            used = set(con.f.variables()) | set(con.g.variables())
            if not used <= scope:
                raise ValueError(f"constraint {con} uses unknown variables")
        if self.objective is not None and len(self.objective.coeffs) != d:
            raise ValueError("objective width does not match variable count")

    @property
    def d(self) -> int:
        return len(self.variables)

    def point_of(self, assignment: Mapping[str, int]) -> Tuple[int, ...]:
        return tuple(assignment[v] for v in self.variables)

    def assignment_of(self, point: Sequence[int]) -> Dict[str, int]:
        return dict(zip(self.variables, point))

    def holds_at(self, assignment: Mapping[str, int]) -> bool:
        point = self.point_of(assignment)
        return all(row.holds_at(point) for row in self.inequalities) and all(
            con.holds_at(assignment) for con in self.gcd_constraints
        )

    def objective_value(self, assignment: Mapping[str, int]) -> int:
        if self.objective is None:
            raise ValueError("instance has no objective")
        point = self.point_of(assignment)
        return sum(c * v for c, v in zip(self.objective.coeffs, point))

    def with_row(self, row: LinRow) -> "IpGcdInstance":
        return IpGcdInstance(
            self.variables,
            self.inequalities + (row,),
            self.gcd_constraints,
            self.objective,
        )


@dataclass(frozen=True)
class ShiftedCone:
    """Integer point set {u + e.lam : lam in N^k}; e has one row per variable."""

    u: Tuple[int, ...]
    e: IntMatrix

    def __post_init__(self) -> None:
        if self.e.rows != len(self.u):
            raise ValueError("generator matrix height does not match u")

    @property
    def k(self) -> int:
        return self.e.cols

    def point_at(self, lam: Sequence[int]) -> Tuple[int, ...]:
        if len(lam) != self.e.cols:
            raise ValueError("parameter width mismatch")
        return tuple(
            self.u[i] + sum(self.e.at(i, j) * lam[j] for j in range(self.e.cols))
            for i in range(self.e.rows)
        )


@dataclass(frozen=True)
class GcdToDivTriple:
    """Divisibility system plus the affine map back to instance space.

    psi ranges over zvars + yvars + wvars (in that order); e has one column
    per such variable, with the z and w columns all zero.  psi is None when
    substitution eliminated every constraint, leaving the bare cone.
    """

    psi: Optional[DivSystem]
    u: Tuple[int, ...]
    e: IntMatrix
    zvars: Tuple[str, ...]
    yvars: Tuple[str, ...]
    wvars: Tuple[str, ...]

    @property
    def all_vars(self) -> Tuple[str, ...]:
        return self.zvars + self.yvars + self.wvars

    def __post_init__(self) -> None:
        if self.e.rows != len(self.u):
            raise ValueError("generator matrix height does not match u")
        if self.e.cols != len(self.all_vars):
            raise ValueError("one generator column per triple variable required")
        if self.psi is not None and self.psi.variables != self.all_vars:
            raise ValueError("psi universe must equal zvars + yvars + wvars")

    def column_of(self, var: str) -> Tuple[int, ...]:
        return self.e.col_tuple(self.all_vars.index(var))

    def point_at(self, lam: Mapping[str, int]) -> Tuple[int, ...]:
        values = [lam.get(v, 0) for v in self.all_vars]
        return tuple(
            self.u[i] + sum(self.e.at(i, j) * values[j] for j in range(self.e.cols))
            for i in range(self.e.rows)
        )

    def validate_shape(self) -> None:
        """Check the structural invariants the local-global solver relies on."""
        zs, ys, ws = set(self.zvars), set(self.yvars), set(self.wvars)
        z_seen: Dict[str, list] = {z: [] for z in zs}
        w_seen: Dict[str, list] = {w: [] for w in ws}
        for name in self.zvars + self.wvars:
            col = self.column_of(name)
            if any(col):
                raise ValueError(f"generator column for {name} must be zero")
        if self.psi is None:
            return
        for con in self.psi.constraints:
            lv = set(con.lhs.variables())
            rv = set(con.rhs.variables())
            for poly in (con.lhs, con.rhs):
                if poly.constant < 0 or any(c < 0 for _, c in poly.coeffs):
                    raise ValueError(f"negative coefficient in {con}")
            if con.lhs.constant < 1:
                raise ValueError(f"lhs constant of {con} must be positive")
            if lv <= zs and rv <= ys:
                # h(z) | f(y) block; h is a constant or a single z + c.
                if lv:
                    (z,) = lv
                    if con.lhs.coeff(z) != 1 or len(con.lhs.coeffs) != 1:
                        raise ValueError(f"lhs of {con} is not of shape z + c")
                    z_seen[z].append(con.lhs.constant)
            elif lv <= ys and rv and rv <= ws:
                (w,) = rv
                if con.rhs.coeff(w) != 1 or len(con.rhs.coeffs) != 1:
                    raise ValueError(f"rhs of {con} is not of shape w + c")
                w_seen[w].append(con.rhs.constant)
            else:
                raise ValueError(f"constraint {con} fits no triple shape")
        for z, consts in z_seen.items():
            if consts and (len(consts) != 2 or consts[0] != consts[1]):
                raise ValueError(f"{z} must appear as the same z + c in two lhs")
        for w, consts in w_seen.items():
            if len(consts) != 2 or 0 not in consts or max(consts) < 1:
                raise ValueError(f"{w} must appear in rhs pair w, w + c")


@dataclass
class SolveOutcome:
    """Result of feasibility or optimization.

    status: one of "infeasible", "feasible", "optimal", "unbounded".
    assignment present for feasible/optimal, value for optimal.
    """

    status: str
    assignment: Optional[Dict[str, int]] = None
    value: Optional[int] = None
    stats: SolveStats = field(default_factory=SolveStats)
