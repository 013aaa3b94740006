"""Brute-force ground truth by windowed and residue enumeration.

Everything here is deliberately naive: direct evaluation of the exact
semantics over finite windows, used to validate the clever code paths.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple, Union

from .divsys import DivSystem
from .errors import WindowTooLarge
from .instance import IpGcdInstance
from .numthy import vp

Target = Union[IpGcdInstance, DivSystem]


@dataclass(frozen=True)
class Window:
    """Inclusive per-variable integer bounds."""

    bounds: Tuple[Tuple[str, int, int], ...]

    def __post_init__(self) -> None:
        for name, lo, hi in self.bounds:
            if lo > hi:
                raise ValueError(f"empty window for {name}: [{lo}, {hi}]")

    @staticmethod
    def uniform(variables: Tuple[str, ...], lo: int, hi: int) -> "Window":
        return Window(tuple((v, lo, hi) for v in variables))

    def range_of(self, var: str) -> range:
        for name, lo, hi in self.bounds:
            if name == var:
                return range(lo, hi + 1)
        raise KeyError(var)

    def volume(self) -> int:
        n = 1
        for _, lo, hi in self.bounds:
            n *= hi - lo + 1
        return n


def enumerate_solutions(
    target: Target, w: Window, cap: int = 10000000
) -> List[Dict[str, int]]:
    """All window assignments satisfying the target, lexicographic by variable order."""
    volume = 1
    for var in target.variables:
        volume *= len(w.range_of(var))
        if volume > cap:
            raise WindowTooLarge(f"window volume exceeds cap {cap}")
    ranges = [w.range_of(var) for var in target.variables]
    out: List[Dict[str, int]] = []
    for point in itertools.product(*ranges):
        assignment = dict(zip(target.variables, point))
        if target.holds_at(assignment):
            out.append(assignment)
    return out


def _capped_valuation(n: int, p: int, cap: int) -> int:
    """min(v_p, cap) of the residue class of n modulo p^cap; the zero class maps to cap."""
    if n % p ** cap == 0:
        return cap
    return vp(n, p)


def enumerate_mod_p(
    phi: DivSystem, p: int, exponent_cap: int, cap: int = 10000000
) -> Optional[Dict[str, int]]:
    """Search residues modulo p^exponent_cap for a witness of mod-p solvability.

    A constraint is accepted when the lhs valuation resolves strictly below
    the exponent cap and does not exceed the rhs valuation (capped; the
    residue class of 0 counts as valuation exponent_cap).  Any returned
    assignment is a genuine solution modulo p; absence is conclusive only
    for solutions whose lhs valuations stay below the cap.
    """
    if exponent_cap < 1:
        raise ValueError("exponent cap must be at least 1")
    modulus = p ** exponent_cap
    if modulus * len(phi.variables) > cap:
        raise WindowTooLarge(f"residue space {modulus}^{len(phi.variables)} too large")

    order = phi.variables
    position = {v: i for i, v in enumerate(order)}
    # Constraints become checkable once their last-positioned variable is set.
    ready: List[List] = [[] for _ in order]
    ground: List = []
    for con in phi.constraints:
        used = set(con.lhs.variables()) | set(con.rhs.variables())
        if used:
            ready[max(position[v] for v in used)].append(con)
        else:
            ground.append(con)

    def accepted(con, values: Dict[str, int]) -> bool:
        vl = _capped_valuation(con.lhs.evaluate(values), p, exponent_cap)
        if vl >= exponent_cap:
            return False
        return vl <= _capped_valuation(con.rhs.evaluate(values), p, exponent_cap)

    if not all(accepted(con, {}) for con in ground):
        return None

    values: Dict[str, int] = {}

    def search(i: int) -> bool:
        if i == len(order):
            return True
        for r in range(modulus):
            values[order[i]] = r
            if all(accepted(con, values) for con in ready[i]) and search(i + 1):
                return True
        del values[order[i]]
        return False

    if search(0):
        return {v: values[v] for v in order}
    return None
