"""Line-oriented problem files: parsing and canonical printing.

A file is either a pure IP-GCD instance (vars, optional objective,
inequality rows, gcd constraints) or a pure divisibility system (div:
lines plus an optional `increasing` partition directive).  `#` starts a
comment anywhere on a line.  parse and pretty round-trip: reparsing a
printed file reproduces the structured form exactly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .divsys import DivConstraint, DivSystem, VarPartition
from .errors import MixedModeError, ParseError
from .instance import GcdConstraint, IpGcdInstance, LinRow, Objective
from .poly import LinearPoly

_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*\Z")
_INT = re.compile(r"[+-]?\d+\Z")
_TOKEN = re.compile(r"\S+")

Target = Union[IpGcdInstance, DivSystem]


@dataclass(frozen=True)
class ParsedFile:
    target: Target
    partition: Optional[VarPartition] = None


def _tokens(text: str, line_no: int, offset: int = 0) -> List[Tuple[str, int]]:
    return [(m.group(), offset + m.start() + 1) for m in _TOKEN.finditer(text)]


def _parse_linear(text: str, line_no: int, offset: int, declared: Sequence[str]) -> LinearPoly:
    """Sum of items `coeff var`, `var`, or `coeff`, joined by + or -."""
    toks = _tokens(text, line_no, offset)
    if not toks:
        raise ParseError("empty linear term", line_no, offset + 1)
    coeffs: Dict[str, int] = {}
    constant = 0
    sign = 1
    i = 0
    expect_item = True
    while i < len(toks):
        tok, col = toks[i]
        if tok in ("+", "-"):
            if expect_item:
                raise ParseError(f"unexpected '{tok}'", line_no, col)
            sign = 1 if tok == "+" else -1
            expect_item = True
            i += 1
            continue
        if not expect_item:
            raise ParseError(f"expected '+' or '-' before '{tok}'", line_no, col)
        if _INT.match(tok):
            value = sign * int(tok)
            if i + 1 < len(toks) and _NAME.match(toks[i + 1][0]):
                name, ncol = toks[i + 1]
                if name not in declared:
                    raise ParseError(f"undeclared variable '{name}'", line_no, ncol)
                coeffs[name] = coeffs.get(name, 0) + value
                i += 2
            else:
                constant += value
                i += 1
        elif _NAME.match(tok):
            if tok not in declared:
                raise ParseError(f"undeclared variable '{tok}'", line_no, col)
            coeffs[tok] = coeffs.get(tok, 0) + sign
            i += 1
        else:
            raise ParseError(f"unexpected token '{tok}'", line_no, col)
        sign = 1
        expect_item = False
    if expect_item:
        raise ParseError("dangling sign at end of term", line_no, toks[-1][1])
    return LinearPoly.make(coeffs, constant)


_GCD_LINE = re.compile(r"gcd\s*\((.*)\)\s*(<=|>=|!=|=)\s*(\S+)\s*\Z")
_ROW_REL = re.compile(r"(<=|>=|(?<![<>!])=)")


def _parse_gcd(line: str, line_no: int, declared: Sequence[str]) -> GcdConstraint:
    m = _GCD_LINE.match(line)
    if not m:
        raise ParseError("malformed gcd constraint", line_no, 1)
    inner, rel, bound = m.group(1), m.group(2), m.group(3)
    parts = inner.split(",")
    if len(parts) != 2:
        raise ParseError("gcd takes exactly two arguments", line_no, line.index("(") + 2)
    col_f = line.index("(") + 1
    col_g = col_f + len(parts[0]) + 1
    f = _parse_linear(parts[0], line_no, col_f, declared)
    g = _parse_linear(parts[1], line_no, col_g, declared)
    if not _INT.match(bound):
        raise ParseError(f"gcd bound must be an integer, got '{bound}'", line_no, 1)
    try:
        return GcdConstraint(f, g, rel, int(bound))
    except ValueError as e:
        raise ParseError(str(e), line_no, 1)


def _parse_row(line: str, line_no: int, declared: Sequence[str]) -> List[LinRow]:
    m = _ROW_REL.search(line)
    if not m:
        raise ParseError("expected an inequality relation", line_no, 1)
    rel = m.group(1)
    lhs = _parse_linear(line[: m.start()], line_no, 0, declared)
    rhs = _parse_linear(line[m.end() :], line_no, m.end(), declared)
    diff = lhs.sub(rhs)
    coeffs = tuple(diff.coeff(v) for v in declared)
    bound = -diff.constant
    if rel == "<=":
        return [LinRow(coeffs, bound)]
    if rel == ">=":
        return [LinRow(tuple(-c for c in coeffs), -bound)]
    return [LinRow(coeffs, bound), LinRow(tuple(-c for c in coeffs), -bound)]


def _parse_div(line: str, line_no: int, declared: Sequence[str]) -> DivConstraint:
    body = line[len("div:") :]
    if body.count("|") != 1:
        raise ParseError("div line needs exactly one '|'", line_no, 1)
    left, right = body.split("|")
    offset = len("div:")
    lhs = _parse_linear(left, line_no, offset, declared)
    rhs = _parse_linear(right, line_no, offset + len(left) + 1, declared)
    try:
        return DivConstraint(lhs, rhs)
    except ValueError as e:
        raise ParseError(str(e), line_no, 1)


def _parse_partition(line: str, line_no: int, declared: Sequence[str]) -> VarPartition:
    body = line[len("increasing") :]
    blocks: List[Tuple[str, ...]] = []
    for chunk in body.split("|"):
        names = chunk.split()
        for name in names:
            if name not in declared:
                raise ParseError(f"undeclared variable '{name}'", line_no, 1)
        blocks.append(tuple(names))
    try:
        return VarPartition(tuple(blocks))
    except ValueError as e:
        raise ParseError(str(e), line_no, 1)


def parse_file(text: str) -> ParsedFile:
    declared: Optional[Tuple[str, ...]] = None
    objective: Optional[Objective] = None
    rows: List[LinRow] = []
    gcds: List[GcdConstraint] = []
    divs: List[DivConstraint] = []
    partition: Optional[VarPartition] = None
    saw_ip = False
    saw_div = False
    for line_no, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head = line.split()[0]
        if head == "vars":
            if declared is not None:
                raise ParseError("duplicate vars line", line_no, 1)
            names = line.split()[1:]
            if not names:
                raise ParseError("vars line declares no variables", line_no, 1)
            for name in names:
                if not _NAME.match(name):
                    raise ParseError(f"invalid variable name '{name}'", line_no, 1)
            if len(set(names)) != len(names):
                raise ParseError("duplicate variable name", line_no, 1)
            declared = tuple(names)
            continue
        if declared is None:
            raise ParseError("vars line must come first", line_no, 1)
        if head in ("minimize", "maximize"):
            if objective is not None:
                raise ParseError("duplicate objective line", line_no, 1)
            poly = _parse_linear(line[len(head) :], line_no, len(head), declared)
            if poly.constant != 0:
                raise ParseError("objective must not have a constant term", line_no, 1)
            direction = "min" if head == "minimize" else "max"
            objective = Objective(tuple(poly.coeff(v) for v in declared), direction)
            saw_ip = True
        elif head == "div:" or line.startswith("div:"):
            divs.append(_parse_div(line, line_no, declared))
            saw_div = True
        elif head == "increasing":
            if partition is not None:
                raise ParseError("duplicate increasing directive", line_no, 1)
            partition = _parse_partition(line, line_no, declared)
            saw_div = True
        elif line.startswith("gcd"):
            gcds.append(_parse_gcd(line, line_no, declared))
            saw_ip = True
        else:
            rows.extend(_parse_row(line, line_no, declared))
            saw_ip = True
    if declared is None:
        raise ParseError("missing vars line", 1, 1)
    if saw_ip and saw_div:
        raise MixedModeError("file mixes gcd/inequality lines with div: lines")
    if saw_div:
        if not divs:
            raise ParseError("divisibility file has no div: lines", 1, 1)
        return ParsedFile(DivSystem.make(tuple(divs), declared), partition)
    return ParsedFile(IpGcdInstance(declared, tuple(rows), tuple(gcds), objective))


def parse(text: str) -> Target:
    """Structured form of a problem file; raises ParseError or MixedModeError."""
    return parse_file(text).target


def _term_str(items: Sequence[Tuple[int, Optional[str]]]) -> str:
    parts = [f"{c} {v}" if v is not None else str(c) for c, v in items if v is None or c != 0]
    return " + ".join(parts) if parts else "0"


def _poly_str(poly: LinearPoly) -> str:
    items: List[Tuple[int, Optional[str]]] = [(c, v) for v, c in poly.coeffs]
    if poly.constant != 0 or not items:
        items.append((poly.constant, None))
    return _term_str(items)


def pretty(parsed: Union[ParsedFile, Target]) -> str:
    """Canonical text for a parsed file; parse(pretty(x)) == x."""
    if not isinstance(parsed, ParsedFile):
        parsed = ParsedFile(parsed)
    target = parsed.target
    out: List[str] = ["vars " + " ".join(target.variables)]
    if isinstance(target, DivSystem):
        for con in target.constraints:
            out.append(f"div: {_poly_str(con.lhs)} | {_poly_str(con.rhs)}")
        if parsed.partition is not None:
            out.append(
                "increasing " + " | ".join(" ".join(b) for b in parsed.partition.blocks)
            )
        return "\n".join(out) + "\n"
    if target.objective is not None:
        word = "minimize" if target.objective.direction == "min" else "maximize"
        items = [(c, v) for v, c in zip(target.variables, target.objective.coeffs)]
        out.append(f"{word} {_term_str(items)}")
    for row in target.inequalities:
        items = [(c, v) for v, c in zip(target.variables, row.coeffs)]
        out.append(f"{_term_str(items)} <= {row.bound}")
    for con in target.gcd_constraints:
        out.append(f"gcd({_poly_str(con.f)}, {_poly_str(con.g)}) {con.rel} {con.c}")
    return "\n".join(out) + "\n"
