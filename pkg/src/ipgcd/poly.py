"""Linear integer polynomials over named variables.

A LinearPoly is an affine form  a_1*v_1 + ... + a_n*v_n + c  with
arbitrary-precision integer coefficients.  Storage is canonical (no zero
coefficients, variables sorted by name), so structural equality matches
semantic equality.

Variable orders are plain tuples of names; index position decides which
variable is "larger".  The leading variable lv(f) of a non-constant f is
its largest variable under the active order; constants have lv None.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Optional, Sequence, Tuple

VarOrder = Tuple[str, ...]


@dataclass(frozen=True)
class LinearPoly:
    coeffs: Tuple[Tuple[str, int], ...]
    constant: int

    def __post_init__(self):
        names = [v for v, _ in self.coeffs]
        if names != sorted(names):
            raise ValueError("coefficients must be sorted by variable name")
        if len(set(names)) != len(names):
            raise ValueError("duplicate variable")
        if any(c == 0 for _, c in self.coeffs):
            raise ValueError("explicit zero coefficient")

    @staticmethod
    def make(coeffs: Mapping[str, int] | Iterable[Tuple[str, int]], constant: int = 0) -> "LinearPoly":
        acc: Dict[str, int] = {}
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        for v, c in items:
            acc[v] = acc.get(v, 0) + int(c)
        packed = tuple(sorted((v, c) for v, c in acc.items() if c != 0))
        return LinearPoly(packed, int(constant))

    @staticmethod
    def const(c: int) -> "LinearPoly":
        return LinearPoly((), int(c))

    @staticmethod
    def var(name: str, coeff: int = 1, constant: int = 0) -> "LinearPoly":
        return LinearPoly.make({name: coeff}, constant)

    # ---- queries ----

    def coeff(self, var: str) -> int:
        for v, c in self.coeffs:
            if v == var:
                return c
        return 0

    def variables(self) -> Tuple[str, ...]:
        return tuple(v for v, _ in self.coeffs)

    def is_constant(self) -> bool:
        return not self.coeffs

    def is_zero(self) -> bool:
        return not self.coeffs and self.constant == 0

    def norm_inf(self) -> int:
        return max([abs(self.constant)] + [abs(c) for _, c in self.coeffs])

    # ---- arithmetic ----

    def add(self, other: "LinearPoly") -> "LinearPoly":
        return LinearPoly.make(list(self.coeffs) + list(other.coeffs), self.constant + other.constant)

    def sub(self, other: "LinearPoly") -> "LinearPoly":
        return self.add(other.scale(-1))

    def scale(self, k: int) -> "LinearPoly":
        if k == 0:
            return LinearPoly.const(0)
        return LinearPoly(tuple((v, k * c) for v, c in self.coeffs), k * self.constant)

    def evaluate(self, assignment: Mapping[str, int]) -> int:
        total = self.constant
        for v, c in self.coeffs:
            total += c * assignment[v]
        return total

    def partial_eval(self, bindings: Mapping[str, int]) -> "LinearPoly":
        const = self.constant
        left = []
        for v, c in self.coeffs:
            if v in bindings:
                const += c * bindings[v]
            else:
                left.append((v, c))
        return LinearPoly(tuple(left), const)

    def rename(self, mapping: Mapping[str, str]) -> "LinearPoly":
        return LinearPoly.make({mapping.get(v, v): c for v, c in self.coeffs}, self.constant)

    def to_vector(self, variables: Sequence[str]) -> list:
        """Coefficient vector over the given variables, constant last."""
        extra = set(self.variables()) - set(variables)
        if extra:
            raise ValueError(f"polynomial mentions {extra} outside the universe")
        return [self.coeff(v) for v in variables] + [self.constant]

    def __str__(self) -> str:
        parts = []
        for v, c in self.coeffs:
            if c == 1:
                term = v
            elif c == -1:
                term = f"-{v}"
            else:
                term = f"{c}{v}"
            parts.append(term)
        if self.constant != 0 or not parts:
            parts.append(str(self.constant))
        out = parts[0]
        for term in parts[1:]:
            out += f" - {term[1:]}" if term.startswith("-") else f" + {term}"
        return out


def content_and_primitive(f: LinearPoly) -> Tuple[LinearPoly, int]:
    """Split f = content * primitive with gcd(primitive) = 1.

    The content takes the sign of the name-wise last non-zero coefficient
    (the constant for constant polynomials), a deterministic convention
    independent of any variable order.
    """
    if f.is_zero():
        raise ValueError("zero polynomial has no primitive part")
    g = abs(f.constant)
    for _, c in f.coeffs:
        g = math.gcd(g, c)
    lead = f.coeffs[-1][1] if f.coeffs else f.constant
    if lead < 0:
        g = -g
    prim = LinearPoly(tuple((v, c // g) for v, c in f.coeffs), f.constant // g)
    return prim, g


def primitive_part(f: LinearPoly) -> Tuple[LinearPoly, int]:
    """Alias of content_and_primitive returning (primitive, content)."""
    return content_and_primitive(f)


def order_position(order: VarOrder, var: Optional[str]) -> int:
    """Position of a variable in the order; constants (None) sit below all."""
    if var is None:
        return -1
    return order.index(var)


def lv(f: LinearPoly, order: VarOrder) -> Optional[str]:
    """Leading variable under the order, None for constants."""
    best = None
    best_pos = -1
    for v, _ in f.coeffs:
        pos = order.index(v)
        if pos > best_pos:
            best, best_pos = v, pos
    return best


def leading_coeff(f: LinearPoly, order: VarOrder) -> int:
    """Coefficient of lv(f); whole constant when f is constant."""
    top = lv(f, order)
    if top is None:
        return f.constant
    return f.coeff(top)


def s_polynomial(f: LinearPoly, g: LinearPoly, order: VarOrder) -> LinearPoly:
    """Cross-scaled difference b*f - a*g canceling the leading terms.

    a is the leading coefficient of f and b the one of g; a constant
    polynomial contributes its whole value as the coefficient.  When f
    and g share a leading variable the result's lv drops strictly.
    """
    a = leading_coeff(f, order)
    b = leading_coeff(g, order)
    return f.scale(b).sub(g.scale(a))
