"""Decomposing inequality systems into shifted integer cones.

The integer solution set of A.x <= b is rewritten as a finite union of sets
{u + E.lam : lam in N^k}.  Supported shapes: bounded polyhedra (every integer
point becomes its own u, E has no columns) and unbounded polyhedra whose
recession cone is pointed (E collects primitive extreme rays; the u's are
integer points inside a window sized by the vertices and rays).  A recession
cone containing a line raises DecompositionUnsupported.
"""

from __future__ import annotations

import math
from fractions import Fraction
from itertools import combinations
from typing import Iterator, List, Optional, Sequence, Tuple

from .config import DEFAULT_CONFIG, SolverConfig
from .errors import DecompositionUnsupported, SearchBudgetExceeded
from .instance import LinRow, ShiftedCone
from .intlinalg import IntMatrix, integer_kernel

Point = Tuple[int, ...]
# [lo, hi] with None for an open side
Bounds = List[List[Optional[int]]]


def _solve_square(rows: Sequence[Sequence[int]], rhs: Sequence[int]) -> Optional[List[Fraction]]:
    """Exact solution of a square linear system, or None if singular."""
    n = len(rhs)
    aug = [[Fraction(v) for v in row] + [Fraction(rhs[i])] for i, row in enumerate(rows)]
    for col in range(n):
        pivot = next((r for r in range(col, n) if aug[r][col] != 0), None)
        if pivot is None:
            return None
        aug[col], aug[pivot] = aug[pivot], aug[col]
        for r in range(n):
            if r != col and aug[r][col] != 0:
                factor = aug[r][col] / aug[col][col]
                aug[r] = [x - factor * y for x, y in zip(aug[r], aug[col])]
    return [aug[i][n] / aug[i][i] for i in range(n)]


def _satisfies(rows: Sequence[LinRow], point: Sequence) -> bool:
    return all(
        sum(c * x for c, x in zip(row.coeffs, point)) <= row.bound for row in rows
    )


def _extreme_rays(rows: Sequence[LinRow], d: int) -> List[Point]:
    """Primitive extreme rays of the recession cone {r : A.r <= 0}."""
    candidates: List[Point] = []
    if d == 1:
        candidates = [(1,), (-1,)]
    else:
        for combo in combinations(rows, d - 1):
            sub = IntMatrix.from_rows([row.coeffs for row in combo], cols=d)
            kernel = integer_kernel(sub)
            if kernel.cols != 1:
                continue
            vec = list(kernel.col_tuple(0))
            g = math.gcd(*[abs(v) for v in vec])
            vec = [v // g for v in vec]
            candidates.append(tuple(vec))
            candidates.append(tuple(-v for v in vec))
    rays = {
        ray
        for ray in candidates
        if any(ray)
        and all(sum(c * r for c, r in zip(row.coeffs, ray)) <= 0 for row in rows)
    }
    return sorted(rays)


def _vertices(rows: Sequence[LinRow], d: int) -> List[Tuple[Fraction, ...]]:
    seen = set()
    out: List[Tuple[Fraction, ...]] = []
    for combo in combinations(rows, d):
        sol = _solve_square([row.coeffs for row in combo], [row.bound for row in combo])
        if sol is None:
            continue
        point = tuple(sol)
        if point not in seen and _satisfies(rows, point):
            seen.add(point)
            out.append(point)
    return out


def propagate_bounds(rows: Sequence[LinRow], d: int, passes: int = 64) -> Optional[Bounds]:
    """Per-variable interval bounds implied by the rows; None if provably empty.

    Starts from unbounded intervals and repeatedly isolates one variable per
    row against the minimal contribution of the others.  Sound but not
    complete: a returned open side does not prove unboundedness of the set,
    but every returned closed side is valid.
    """
    box: Bounds = [[None, None] for _ in range(d)]
    for _ in range(passes):
        changed = False
        for row in rows:
            mins: List[Optional[int]] = []
            for j, c in enumerate(row.coeffs):
                if c == 0:
                    mins.append(0)
                elif c > 0:
                    mins.append(None if box[j][0] is None else c * box[j][0])
                else:
                    mins.append(None if box[j][1] is None else c * box[j][1])
            for i, c in enumerate(row.coeffs):
                if c == 0:
                    continue
                rest = 0
                open_rest = False
                for j, m in enumerate(mins):
                    if j == i:
                        continue
                    if row.coeffs[j] == 0:
                        continue
                    if m is None:
                        open_rest = True
                        break
                    rest += m
                if open_rest:
                    continue
                slack = row.bound - rest
                if c > 0:
                    hi = math.floor(Fraction(slack, c))
                    if box[i][1] is None or hi < box[i][1]:
                        box[i][1] = hi
                        changed = True
                else:
                    lo = math.ceil(Fraction(slack, c))
                    if box[i][0] is None or lo > box[i][0]:
                        box[i][0] = lo
                        changed = True
                if (
                    box[i][0] is not None
                    and box[i][1] is not None
                    and box[i][0] > box[i][1]
                ):
                    return None
        if not changed:
            break
    return box


def iter_integer_points(
    rows: Sequence[LinRow], box: Sequence[Tuple[int, int]]
) -> Iterator[Point]:
    """Integer points of the row system inside the box, lexicographic, lazily.

    Subtrees that cannot satisfy some row even with the remaining variables
    at their minimal contributions are pruned.
    """
    d = len(box)
    n_rows = len(rows)
    coeffs = [row.coeffs for row in rows]
    limits = [row.bound for row in rows]
    # rest[r][k]: minimal contribution of variables k.. to row r inside the box
    rest = [[0] * (d + 1) for _ in range(n_rows)]
    for r in range(n_rows):
        for k in range(d - 1, -1, -1):
            c = coeffs[r][k]
            low = c * (box[k][0] if c > 0 else box[k][1]) if c else 0
            rest[r][k] = rest[r][k + 1] + low
    # each row only needs re-checking at depths where its coefficient moves
    relevant = [[r for r in range(n_rows) if coeffs[r][k] != 0] for k in range(d)]
    if any(rest[r][0] > limits[r] for r in range(n_rows)):
        return iter(())

    def scan() -> Iterator[Point]:
        if d == 0:
            yield ()
            return
        totals = [0] * n_rows
        val = [0] * d
        his = [0] * d
        base = [[0] * len(relevant[k]) for k in range(d)]
        last = d - 1

        def enter(k: int) -> None:
            # snapshot row totals and intersect the per-row feasible
            # intervals for this variable (rows are linear in it, with the
            # deeper variables at their minimal contributions)
            bk = base[k]
            vlo, vhi = box[k]
            nxt = k + 1
            for i, r in enumerate(relevant[k]):
                t = totals[r]
                bk[i] = t
                c = coeffs[r][k]
                slack = limits[r] - t - rest[r][nxt]
                if c > 0:
                    q = slack // c
                    if q < vhi:
                        vhi = q
                else:
                    q = -(slack // -c)
                    if q > vlo:
                        vlo = q
            val[k] = vlo
            his[k] = vhi

        if last > 0:
            enter(0)
        k = 0
        while k >= 0:
            if k == last:
                vlo, vhi = box[k]
                for r in relevant[k]:
                    c = coeffs[r][k]
                    slack = limits[r] - totals[r]
                    if c > 0:
                        q = slack // c
                        if q < vhi:
                            vhi = q
                    else:
                        q = -(slack // -c)
                        if q > vlo:
                            vlo = q
                for v in range(vlo, vhi + 1):
                    val[k] = v
                    yield tuple(val)
                k -= 1
                if k >= 0:
                    val[k] += 1
                continue
            if val[k] > his[k]:
                for i, r in enumerate(relevant[k]):
                    totals[r] = base[k][i]
                k -= 1
                if k >= 0:
                    val[k] += 1
                continue
            v = val[k]
            bk = base[k]
            for i, r in enumerate(relevant[k]):
                totals[r] = bk[i] + coeffs[r][k] * v
            k += 1
            if k < last:
                enter(k)
            continue

    return scan()


def _integer_points(
    rows: Sequence[LinRow], box: List[Tuple[int, int]], cap: int
) -> List[Point]:
    """All integer points of the row system inside the box, lexicographic."""
    volume = 1
    for lo, hi in box:
        volume *= hi - lo + 1
        if volume > cap:
            raise SearchBudgetExceeded(f"cone point enumeration space exceeds cap {cap}")
    return list(iter_integer_points(rows, box))


def vzgs_decompose(
    rows: Sequence[LinRow], d: int, config: SolverConfig = DEFAULT_CONFIG
) -> List[ShiftedCone]:
    """Rewrite the integer points of A.x <= b as a union of shifted cones.

    Exactness: every returned cone lies inside the row system, and every
    integer solution equals some u plus a natural combination of ray columns.
    """
    if d < 1:
        raise ValueError("need at least one variable")
    matrix = IntMatrix.from_rows([row.coeffs for row in rows], cols=d)
    if integer_kernel(matrix).cols > 0:
        raise DecompositionUnsupported(
            "recession cone contains a line; only pointed recession cones are supported"
        )
    implied = propagate_bounds(rows, d)
    if implied is None:
        return []
    if all(lo is not None and hi is not None for lo, hi in implied):
        # Bounded: one zero-generator cone per integer point.
        finite = [(lo, hi) for lo, hi in implied]
        points = _integer_points(rows, finite, config.point_cap)
        empty = IntMatrix.from_cols([], rows=d)
        cones = [ShiftedCone(p, empty) for p in points]
        return _assert_norms(rows, d, cones)

    rays = _extreme_rays(rows, d)
    vertices = _vertices(rows, d)
    if not vertices:
        # Pointed and non-empty implies a vertex exists, so the set is empty.
        return []
    max_vertex = max(
        max(abs(math.ceil(c)) if c >= 0 else abs(math.floor(c)) for c in vert)
        for vert in vertices
    )
    max_ray = max((max(abs(v) for v in ray) for ray in rays), default=0)
    radius = max_vertex + d * max_ray
    window = []
    for i in range(d):
        lo = implied[i][0] if implied[i][0] is not None else -radius
        hi = implied[i][1] if implied[i][1] is not None else radius
        window.append((max(lo, -radius), min(hi, radius)))
    points = _integer_points(rows, window, config.point_cap)

    if len(rays) <= d:
        # One generator matrix of all rays; keep only shifts from which no
        # ray can be walked back (every solution descends to such a point).
        generator = IntMatrix.from_cols([list(ray) for ray in rays], rows=d)

        def minimal(point: Point) -> bool:
            return all(
                not _satisfies(rows, tuple(x - r for x, r in zip(point, ray)))
                for ray in rays
            )

        cones = [ShiftedCone(p, generator) for p in points if minimal(p)]
    else:
        # More extreme rays than dimensions: pair every window point with
        # every maximal independent ray subset.  Any solution splits over
        # some independent subset with its fractional part landing in the
        # window, so the union is still exact.
        full = IntMatrix.from_cols([list(ray) for ray in rays], rows=d)
        rank = full.cols - integer_kernel(full).cols
        subsets = [
            combo
            for combo in combinations(rays, rank)
            if integer_kernel(IntMatrix.from_cols([list(r) for r in combo], rows=d)).cols
            == 0
        ]
        cones = [
            ShiftedCone(p, IntMatrix.from_cols([list(r) for r in combo], rows=d))
            for p in points
            for combo in subsets
        ]
    return _assert_norms(rows, d, cones)


def _assert_norms(
    rows: Sequence[LinRow], d: int, cones: List[ShiftedCone]
) -> List[ShiftedCone]:
    s = max(1, len(rows))
    scale = max(
        [2]
        + [abs(c) for row in rows for c in row.coeffs]
        + [abs(row.bound) for row in rows]
    )
    norm_cap = (d + 1) * (s * scale) ** s
    for cone in cones:
        assert all(abs(v) <= norm_cap for v in cone.u), "shift norm exceeds bound"
        assert all(
            abs(cone.e.at(i, j)) <= norm_cap
            for i in range(cone.e.rows)
            for j in range(cone.e.cols)
        ), "generator norm exceeds bound"
    return cones
