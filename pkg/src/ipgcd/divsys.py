"""Systems of divisibility constraints between linear integer polynomials.

A constraint f | g is satisfied by an integer assignment a when f(a) is a
non-zero integer dividing g(a).  Systems are conjunctions; construction
reduces every constraint by its joint content (c*f | c*g and f | g have the
same solutions), preserves duplicates, and keeps an explicit ordered
variable universe.

The module also provides the lattice machinery built on divisibility
modules M_f: span computation by a divide-and-multiply fixpoint, the
elimination-property closure, S-term sets, the prime sets pdiff/pzero and
the increasing-form test.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Dict, FrozenSet, Iterable, List, Mapping, Optional, Sequence, Set, Tuple

from .errors import UnsatisfiableAfterSubstitution
from .intlinalg import IntMatrix, hnf, min_positive_multiplier
from .numthy import factorize, factorize_partial, primes_upto
from .poly import (
    LinearPoly,
    VarOrder,
    content_and_primitive,
    lv,
    order_position,
    s_polynomial,
)


@dataclass(frozen=True)
class DivConstraint:
    lhs: LinearPoly
    rhs: LinearPoly

    def __post_init__(self):
        if self.lhs.is_zero():
            raise ValueError("left-hand side must be a non-zero polynomial")

    def holds_at(self, assignment: Mapping[str, int]) -> bool:
        left = self.lhs.evaluate(assignment)
        if left == 0:
            return False
        return self.rhs.evaluate(assignment) % left == 0

    def __str__(self) -> str:
        return f"({self.lhs} | {self.rhs})"


def _joint_reduce(c: DivConstraint) -> DivConstraint:
    g = 0
    for _, v in c.lhs.coeffs:
        g = math.gcd(g, v)
    g = math.gcd(g, c.lhs.constant)
    for _, v in c.rhs.coeffs:
        g = math.gcd(g, v)
    g = math.gcd(g, c.rhs.constant)
    if g <= 1:
        return c
    lhs = LinearPoly(tuple((v, a // g) for v, a in c.lhs.coeffs), c.lhs.constant // g)
    rhs = LinearPoly(tuple((v, a // g) for v, a in c.rhs.coeffs), c.rhs.constant // g)
    return DivConstraint(lhs, rhs)


@dataclass(frozen=True)
class DivSystem:
    constraints: Tuple[DivConstraint, ...]
    variables: Tuple[str, ...]

    def __post_init__(self):
        if not self.constraints:
            raise ValueError("a divisibility system must have at least one constraint")
        if len(set(self.variables)) != len(self.variables):
            raise ValueError("duplicate variable in universe")
        scope = set(self.variables)
        for c in self.constraints:
            used = set(c.lhs.variables()) | set(c.rhs.variables())
            if not used <= scope:
                raise ValueError(f"constraint {c} mentions variables outside the universe")
            if _joint_reduce(c) != c:
                raise ValueError(f"constraint {c} is not reduced")

    @staticmethod
    def make(constraints: Sequence[DivConstraint], variables: Sequence[str]) -> "DivSystem":
        """Build a system, reducing each constraint by its joint content."""
        return DivSystem(tuple(_joint_reduce(c) for c in constraints), tuple(variables))

    @property
    def m(self) -> int:
        return len(self.constraints)

    @property
    def d(self) -> int:
        return len(self.variables)

    def norm_inf(self) -> int:
        return max(max(c.lhs.norm_inf(), c.rhs.norm_inf()) for c in self.constraints)

    def holds_at(self, assignment: Mapping[str, int]) -> bool:
        return all(c.holds_at(assignment) for c in self.constraints)

    def terms(self) -> Tuple[LinearPoly, ...]:
        """All polynomials occurring in the system, deduplicated."""
        seen: Dict[LinearPoly, None] = {}
        for c in self.constraints:
            seen.setdefault(c.lhs)
            seen.setdefault(c.rhs)
        return tuple(seen)

    def lhs_primitive_parts(self, include_constants: bool = False) -> Tuple[LinearPoly, ...]:
        """Distinct primitive parts of left-hand sides, in first occurrence order."""
        seen: Dict[LinearPoly, None] = {}
        for c in self.constraints:
            prim, _ = content_and_primitive(c.lhs)
            if include_constants or not prim.is_constant():
                seen.setdefault(prim)
        return tuple(seen)

    def __str__(self) -> str:
        return " /\\ ".join(str(c) for c in self.constraints)


@dataclass(frozen=True)
class VarPartition:
    blocks: Tuple[Tuple[str, ...], ...]

    def __post_init__(self):
        if not self.blocks:
            raise ValueError("a partition needs at least one block")
        flat = [v for b in self.blocks for v in b]
        if len(set(flat)) != len(flat):
            raise ValueError("partition blocks overlap")
        if any(not b for b in self.blocks):
            raise ValueError("empty partition block")

    @property
    def r(self) -> int:
        return len(self.blocks)

    def covered(self) -> FrozenSet[str]:
        return frozenset(v for b in self.blocks for v in b)

    def check_covers(self, universe: Sequence[str]) -> None:
        if self.covered() != set(universe):
            raise ValueError("partition does not cover the variable universe")

    def block_of(self) -> Dict[str, int]:
        return {v: i for i, b in enumerate(self.blocks) for v in b}

    def induced_order(self, universe: Sequence[str]) -> VarOrder:
        """One representative total order: blocks in sequence, universe order inside."""
        out: List[str] = []
        for b in self.blocks:
            members = set(b)
            out.extend(v for v in universe if v in members)
        return tuple(out)


@dataclass(frozen=True)
class ModuleSpan:
    pivot: LinearPoly
    scalars: Tuple[int, ...]


def _vec(f: LinearPoly, row_vars: Sequence[str]) -> List[int]:
    return f.to_vector(row_vars)


def _from_vec(vec: Sequence[int], row_vars: Sequence[str]) -> LinearPoly:
    return LinearPoly.make({v: c for v, c in zip(row_vars, vec)}, vec[-1])


def module_span(phi: DivSystem, f: LinearPoly) -> ModuleSpan:
    """Per-constraint multipliers c_i with {f, c_1*g_1, ..., c_m*g_m} spanning M_f.

    Fixpoint: each round recomputes every c_i as the least positive multiple
    of the i-th left-hand side lying in the lattice spanned by the previous
    round's columns (0 when no multiple lies there).  Multipliers only ever
    shrink divisor-wise once positive, so the iteration stabilizes.
    """
    prim, cont = content_and_primitive(f)
    if abs(cont) != 1:
        raise ValueError("module pivot must be primitive")
    rows = phi.variables
    fvec = _vec(f, rows)
    lhs_vecs = [_vec(c.lhs, rows) for c in phi.constraints]
    rhs = [c.rhs for c in phi.constraints]
    scalars = [0] * phi.m
    while True:
        cols = [fvec] + [_vec(rhs[j].scale(scalars[j]), rows) for j in range(phi.m) if scalars[j] > 0]
        basis = IntMatrix.from_cols(cols, rows=len(rows) + 1)
        fresh = [min_positive_multiplier(lhs_vecs[j], basis) or 0 for j in range(phi.m)]
        if fresh == scalars:
            return ModuleSpan(f, tuple(scalars))
        scalars = fresh


def span_columns(phi: DivSystem, span: ModuleSpan) -> Tuple[LinearPoly, ...]:
    """Lattice generators {pivot} ∪ {c_i * g_i : c_i > 0}."""
    cols = [span.pivot]
    for j, c in enumerate(span.scalars):
        if c > 0:
            cols.append(phi.constraints[j].rhs.scale(c))
    return tuple(cols)


def _hnf_basis(polys: Sequence[LinearPoly], order: VarOrder) -> List[LinearPoly]:
    """Hermite basis of the lattice spanned by polys.

    Rows are ordered largest variable first, constant last, so column pivots
    are leading variables and pivots strictly decrease column by column.
    """
    row_vars = tuple(reversed(order))
    mat = IntMatrix.from_cols([_vec(p, row_vars) for p in polys], rows=len(row_vars) + 1)
    h = hnf(mat).h
    out = []
    for col in h.to_cols():
        if any(col):
            out.append(_from_vec(col, row_vars))
    return out


def close_elimination(phi: DivSystem, order: VarOrder) -> DivSystem:
    """Equivalent system whose per-pivot right-hand sides form prefix bases.

    For every non-constant primitive part f of a left-hand side, the
    constraints with lhs ±f are replaced by f | b over the Hermite basis b
    of the span lattice of M_f; other constraints survive verbatim.  The
    result and the input have identical solution sets, over the integers
    and modulo every prime, and identical divisibility modules.
    """
    if set(order) != set(phi.variables):
        raise ValueError("order must enumerate the universe")
    groups: Dict[LinearPoly, List[DivConstraint]] = {}
    for f in phi.lhs_primitive_parts():
        span = module_span(phi, f)
        basis = _hnf_basis(span_columns(phi, span), order)
        groups[f] = [DivConstraint(f, b) for b in basis]
    fresh: List[DivConstraint] = []
    emitted: Set[LinearPoly] = set()
    for c in phi.constraints:
        prim, cont = content_and_primitive(c.lhs)
        if prim.is_constant():
            fresh.append(c)
            continue
        if prim not in emitted:
            emitted.add(prim)
            fresh.extend(groups[prim])
        if abs(cont) != 1:
            fresh.append(c)
    out = DivSystem.make(fresh, phi.variables)
    assert out.m <= phi.m * (phi.d + 2), "closure exceeded the m(d+2) size bound"
    return out


def sterms(phi: DivSystem, f: LinearPoly, order: VarOrder) -> FrozenSet[LinearPoly]:
    """S-term set for pivot f: terms(phi) closed under cross-cancellation.

    Whenever f | g occurs in phi and a member h shares g's leading variable,
    the cross-scaled difference S(g, h) joins the set.  On systems with the
    elimination property the closure stays within 2m(d+2) polynomials.
    """
    neg = f.scale(-1)
    triggers = [c.rhs for c in phi.constraints if c.lhs == f or c.lhs == neg]
    acc: Set[LinearPoly] = set(phi.terms())
    bound = 2 * phi.m * (phi.d + 2)
    grew = True
    while grew:
        grew = False
        for g in triggers:
            top = lv(g, order)
            for h in list(acc):
                if lv(h, order) != top:
                    continue
                s = s_polynomial(g, h, order)
                if s not in acc:
                    acc.add(s)
                    grew = True
        assert len(acc) <= bound, "S-term closure exceeded its size bound"
    return frozenset(acc)


def delta_terms(phi: DivSystem, order: VarOrder) -> FrozenSet[LinearPoly]:
    """Union of the S-term sets over all left-hand-side primitive parts."""
    acc: Set[LinearPoly] = set(phi.terms())
    for f in phi.lhs_primitive_parts(include_constants=True):
        acc |= sterms(phi, f, order)
    return frozenset(acc)


def s_closure(polys: FrozenSet[LinearPoly], order: VarOrder) -> FrozenSet[LinearPoly]:
    """polys together with S(f, g) for every ordered pair."""
    acc = set(polys)
    for a in polys:
        for b in polys:
            acc.add(s_polynomial(a, b, order))
    return frozenset(acc)


def _prime_factors_of_poly(f: LinearPoly, factor: Callable[[int], Iterable[int]]) -> Set[int]:
    out: Set[int] = set()
    for value in [c for _, c in f.coeffs] + [f.constant]:
        if abs(value) > 1:
            out.update(factor(abs(value)))
    return out


def _pdiff_with(phi: DivSystem, wide: bool, factor: Callable[[int], Iterable[int]]) -> FrozenSet[int]:
    ps: Set[int] = set(primes_upto(phi.m))
    for c in phi.constraints:
        ps |= _prime_factors_of_poly(c.lhs, factor)
        if wide:
            ps |= _prime_factors_of_poly(c.rhs, factor)
    return frozenset(ps)


def pdiff(phi: DivSystem, wide: bool = False, budget: int = 5000000) -> FrozenSet[int]:
    """Primes p <= m plus primes dividing a left-hand-side coefficient/constant.

    With wide=True right-hand sides contribute too (the coarser textbook
    set); the default narrow set is what the mod-p solving layer needs.
    """
    return _pdiff_with(phi, wide, lambda n: factorize(n, budget))


def pdiff_partial(phi: DivSystem, wide: bool = False, budget: int = 5000000) -> FrozenSet[int]:
    """pdiff restricted to the primes the budget can actually expose.

    Factors that resist the budget are silently dropped instead of raising;
    callers carry the corresponding composite obligations whole.
    """
    return _pdiff_with(phi, wide, lambda n: factorize_partial(n, budget)[0])


def _pzero_with(phi: DivSystem, order: VarOrder, factor: Callable[[int], Iterable[int]]) -> FrozenSet[int]:
    delta = delta_terms(phi, order)
    sdelta = s_closure(delta, order)
    ps: Set[int] = set(primes_upto(max(phi.m, len(sdelta))))
    for poly in sdelta:
        ps |= _prime_factors_of_poly(poly, factor)
    rows = phi.variables
    for f in phi.lhs_primitive_parts():
        span = module_span(phi, f)
        basis = IntMatrix.from_cols(
            [_vec(g, rows) for g in span_columns(phi, span)], rows=len(rows) + 1
        )
        for g in sterms(phi, f, order):
            if g.is_zero():
                continue
            lam = min_positive_multiplier(_vec(g, rows), basis)
            if lam is not None and lam > 1:
                ps.update(factor(lam))
    return frozenset(ps)


def pzero(phi: DivSystem, order: VarOrder, budget: int = 5000000) -> FrozenSet[int]:
    """The difficult primes of a system with the elimination property.

    Union of: primes up to max(m, |S(Δ)|); primes dividing a coefficient or
    constant in S(Δ); primes dividing the least non-zero multiplier taking
    an S-term of a left-hand-side pivot f into f's divisibility module.
    Always a superset of pdiff(phi).
    """
    return _pzero_with(phi, order, lambda n: factorize(n, budget))


def pzero_partial(phi: DivSystem, order: VarOrder, budget: int = 5000000) -> FrozenSet[int]:
    """pzero restricted to the primes the budget can actually expose."""
    return _pzero_with(phi, order, lambda n: factorize_partial(n, budget)[0])


def _integer_multiple_of(h: LinearPoly, f: LinearPoly) -> bool:
    """True when h = k*f for an integer k (h = 0 counts with k = 0)."""
    if h.is_zero():
        return True
    ref = f.constant if f.constant != 0 else f.coeffs[0][1]
    val = h.constant if f.constant != 0 else h.coeff(f.coeffs[0][0])
    if val % ref != 0:
        return False
    return h == f.scale(val // ref)


def is_increasing(phi: DivSystem, partition: VarPartition) -> bool:
    """Whether phi is in increasing form for every order refining the partition.

    For each non-constant lhs primitive part f, every Hermite basis element
    of its span lattice must either be an integer multiple of f or lead with
    a variable from a strictly later block than lv(f).  Basis pivots are
    leading variables, so this captures all of M_f, not just the basis.
    """
    partition.check_covers(phi.variables)
    rep = partition.induced_order(phi.variables)
    blk = partition.block_of()
    for f in phi.lhs_primitive_parts():
        span = module_span(phi, f)
        basis = _hnf_basis(span_columns(phi, span), rep)
        bf = blk[lv(f, rep)]
        for h in basis:
            if _integer_multiple_of(h, f):
                continue
            top = lv(h, rep)
            if top is None or blk[top] <= bf:
                return False
    return True


def substitute(phi: DivSystem, bindings: Mapping[str, int]) -> Optional[DivSystem]:
    """Evaluate some variables; drop constraints that become ground and true.

    Returns None when every constraint is satisfied outright.  A ground
    constraint whose lhs evaluates to 0 or fails to divide the rhs raises
    UnsatisfiableAfterSubstitution carrying the original constraint.
    """
    if not set(bindings) <= set(phi.variables):
        raise ValueError("binding a variable outside the universe")
    kept: List[DivConstraint] = []
    for c in phi.constraints:
        left = c.lhs.partial_eval(bindings)
        right = c.rhs.partial_eval(bindings)
        if left.is_constant():
            if left.constant == 0:
                raise UnsatisfiableAfterSubstitution(c)
            if right.is_constant():
                if right.constant % left.constant == 0:
                    continue
                raise UnsatisfiableAfterSubstitution(c)
        kept.append(DivConstraint(left, right))
    if not kept:
        return None
    remaining = tuple(v for v in phi.variables if v not in bindings)
    return DivSystem.make(kept, remaining)
