"""Shared random generators and exact cross-check helpers for the test suite.

Everything here is deliberately independent of the solver pipeline: solution
sets come from brute enumeration, cone membership from Fraction elimination.
"""

import itertools
import math
import random
from fractions import Fraction
from typing import Dict, FrozenSet, List, Optional, Sequence, Tuple

from ipgcd.divsys import DivConstraint, DivSystem
from ipgcd.instance import GcdConstraint, IpGcdInstance, LinRow, Objective, ShiftedCone
from ipgcd.poly import LinearPoly


def random_poly(rng: random.Random, variables: Sequence[str], coeff: int = 5,
                allow_zero: bool = False) -> LinearPoly:
    while True:
        coeffs = {v: rng.randint(-coeff, coeff) for v in variables
                  if rng.random() < 0.7}
        poly = LinearPoly.make(coeffs, rng.randint(-coeff, coeff))
        if allow_zero or not poly.is_zero():
            return poly


def random_instance(rng: random.Random, max_vars: int = 3, coeff: int = 5,
                    max_gcds: int = 2, max_c: int = 6, box: int = 20,
                    with_objective: bool = False) -> IpGcdInstance:
    """Bounded IP-GCD instance: +-box rows on every variable, small gcd constraints."""
    d = rng.randint(1, max_vars)
    variables = tuple(f"x{i}" for i in range(d))
    rows: List[LinRow] = []
    for i in range(d):
        vec = [0] * d
        vec[i] = 1
        rows.append(LinRow(tuple(vec), box))
        rows.append(LinRow(tuple(-x for x in vec), box))
    for _ in range(rng.randint(0, 2)):
        rows.append(LinRow(tuple(rng.randint(-coeff, coeff) for _ in range(d)),
                           rng.randint(-coeff, 3 * coeff)))
    gcds: List[GcdConstraint] = []
    for _ in range(rng.randint(0, max_gcds)):
        rel = rng.choice(("<=", "=", "!=", ">="))
        gcds.append(GcdConstraint(random_poly(rng, variables, coeff),
                                  random_poly(rng, variables, coeff),
                                  rel, rng.randint(1, max_c)))
    objective = None
    if with_objective:
        objective = Objective(tuple(rng.randint(-3, 3) for _ in range(d)),
                              rng.choice(("min", "max")))
    return IpGcdInstance(variables, tuple(rows), tuple(gcds), objective)


def random_divsystem(rng: random.Random, max_vars: int = 4, max_cons: int = 4,
                     coeff: int = 4) -> DivSystem:
    d = rng.randint(1, max_vars)
    variables = tuple(f"x{i}" for i in range(d))
    cons: List[DivConstraint] = []
    for _ in range(rng.randint(1, max_cons)):
        lhs = random_poly(rng, variables, coeff)
        rhs = random_poly(rng, variables, coeff, allow_zero=True)
        cons.append(DivConstraint(lhs, rhs))
    return DivSystem.make(cons, variables)


def box_solution_set(inst: IpGcdInstance, radius: int) -> FrozenSet[Tuple[int, ...]]:
    """Brute solution points of inst within [-radius, radius]^d, independent of oracle.py."""
    points = itertools.product(range(-radius, radius + 1), repeat=inst.d)
    return frozenset(p for p in points if inst.holds_at(inst.assignment_of(p)))


def div_window_set(phi: DivSystem, radius: int) -> FrozenSet[Tuple[int, ...]]:
    points = itertools.product(range(-radius, radius + 1), repeat=phi.d)
    return frozenset(p for p in points
                     if phi.holds_at(dict(zip(phi.variables, p))))


def solve_nonneg_integer(cols: Sequence[Sequence[int]], target: Sequence[int]
                         ) -> Optional[Tuple[int, ...]]:
    """Unique lam >= 0 integer with sum(lam_j * cols[j]) == target, if any.

    Requires linearly independent columns; decided exactly by Fraction
    elimination, so usable as an oracle for cone membership.
    """
    rows = len(target)
    k = len(cols)
    if k == 0:
        return () if all(t == 0 for t in target) else None
    aug = [[Fraction(cols[j][i]) for j in range(k)] + [Fraction(target[i])]
           for i in range(rows)]
    pivots = []
    r = 0
    for c in range(k):
        pivot = next((i for i in range(r, rows) if aug[i][c] != 0), None)
        if pivot is None:
            raise ValueError("columns are linearly dependent")
        aug[r], aug[pivot] = aug[pivot], aug[r]
        inv = 1 / aug[r][c]
        aug[r] = [x * inv for x in aug[r]]
        for i in range(rows):
            if i != r and aug[i][c] != 0:
                f = aug[i][c]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[r])]
        pivots.append(c)
        r += 1
    for i in range(r, rows):
        if aug[i][k] != 0:
            return None
    lam = [aug[i][k] for i in range(k)]
    if any(x.denominator != 1 or x < 0 for x in lam):
        return None
    return tuple(int(x) for x in lam)


def cone_contains(cone: ShiftedCone, point: Sequence[int]) -> bool:
    cols = [cone.e.col_tuple(j) for j in range(cone.e.cols)]
    target = [p - u for p, u in zip(point, cone.u)]
    return solve_nonneg_integer(cols, target) is not None


def cone_is_sound(cone: ShiftedCone, rows: Sequence[LinRow]) -> bool:
    """u satisfies every row and every generator column is a recession direction."""
    if not all(row.holds_at(cone.u) for row in rows):
        return False
    for j in range(cone.e.cols):
        ray = cone.e.col_tuple(j)
        if all(v == 0 for v in ray):
            return False
        for row in rows:
            if sum(c * v for c, v in zip(row.coeffs, ray)) > 0:
                return False
    return True


def gcd_rel_holds(value: int, rel: str, c: int) -> bool:
    if rel == "<=":
        return value <= c
    if rel == "=":
        return value == c
    if rel == "!=":
        return value != c
    return value >= c
