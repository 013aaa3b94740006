"""Feasibility and optimization for integer programs with gcd constraints.

Pipeline: normalize gcd arguments into single variables; split into members
with pinned signs and gcd relations reduced to = / >=; eliminate inequalities
into shifted cones; translate the gcd constraints of each cone into Bezout
divisibility blocks over natural-number variables; force those systems into
increasing form; solve each modulo its difficult primes and assemble an
integer solution; map back and re-verify against the original instance.
"""

from __future__ import annotations

import itertools
from collections import deque
from typing import Dict, Iterator, List, Optional, Sequence, Set, Tuple

from .cones import iter_integer_points, propagate_bounds, vzgs_decompose
from .config import DEFAULT_CONFIG, SolverConfig
from .divsys import (
    DivConstraint,
    DivSystem,
    VarPartition,
    is_increasing,
    module_span,
    pdiff,
    span_columns,
    substitute,
)
from .errors import MemberLimitExceeded, SearchBudgetExceeded, UnsatisfiableAfterSubstitution
from .instance import (
    GcdConstraint,
    GcdToDivTriple,
    IpGcdInstance,
    LinRow,
    Objective,
    ShiftedCone,
    SolveOutcome,
)
from .intlinalg import IntMatrix, min_positive_multiplier
from .localglobal import ModPSolution, SolveStats, solve_increasing, solve_mod_easy_prime
from .numthy import vp
from .poly import LinearPoly


def _bare_var(poly: LinearPoly) -> Optional[str]:
    if poly.constant == 0 and len(poly.coeffs) == 1 and poly.coeffs[0][1] == 1:
        return poly.coeffs[0][0]
    return None


def _fresh_name(base: str, used: Set[str]) -> str:
    i = 0
    while f"{base}{i}" in used:
        i += 1
    used.add(f"{base}{i}")
    return f"{base}{i}"


def normalize(inst: IpGcdInstance) -> IpGcdInstance:
    """Pin every non-variable gcd argument to a fresh equality-constrained variable."""
    used = set(inst.variables)
    cache: Dict[LinearPoly, str] = {}
    pins: List[Tuple[str, LinearPoly]] = []
    gcds: List[GcdConstraint] = []
    for con in inst.gcd_constraints:
        args: List[LinearPoly] = []
        for poly in (con.f, con.g):
            name = _bare_var(poly)
            if name is None:
                if poly not in cache:
                    fresh = _fresh_name("t", used)
                    cache[poly] = fresh
                    pins.append((fresh, poly))
                name = cache[poly]
            args.append(LinearPoly.var(name))
        gcds.append(GcdConstraint(args[0], args[1], con.rel, con.c))
    if not pins:
        return IpGcdInstance(inst.variables, inst.inequalities, tuple(gcds), inst.objective)
    variables = inst.variables + tuple(name for name, _ in pins)
    pad = len(pins)
    rows = [LinRow(row.coeffs + (0,) * pad, row.bound) for row in inst.inequalities]
    index = {v: i for i, v in enumerate(variables)}
    for name, poly in pins:
        vec = [0] * len(variables)
        for var, a in poly.coeffs:
            vec[index[var]] = -a
        vec[index[name]] = 1
        rows.append(LinRow(tuple(vec), poly.constant))
        rows.append(LinRow(tuple(-x for x in vec), -poly.constant))
    objective = None
    if inst.objective is not None:
        objective = Objective(inst.objective.coeffs + (0,) * pad, inst.objective.direction)
    return IpGcdInstance(variables, tuple(rows), tuple(gcds), objective)


Branch = Tuple[Tuple[LinRow, ...], Tuple[GcdConstraint, ...]]


def _unit_row(d: int, i: int, sign: int, bound: int) -> LinRow:
    """Row (sign * x_i) <= bound."""
    vec = [0] * d
    vec[i] = sign
    return LinRow(tuple(vec), bound)


def _abs_branches(i: int, s: int, rel: str, c: int, d: int) -> List[Branch]:
    """Branches for |x_i| rel c when x_i is pinned to sign s."""
    le = lambda k: _unit_row(d, i, s, k)  # s*x_i <= k
    ge = lambda k: _unit_row(d, i, -s, -k)  # s*x_i >= k
    if rel == "=":
        return [((le(c), ge(c)), ())]
    if rel == "<=":
        return [((le(c),), ())]
    if rel == ">=":
        return [((ge(c),), ())]
    return [((le(c - 1),), ()), ((ge(c + 1),), ())]


def _zero_value_branches(rel: str) -> List[Branch]:
    """gcd evaluates to 0: the relation decides the branch outright (c >= 1)."""
    if rel in ("<=", "!="):
        return [((), ())]
    return []


def _gcd_branches(con: GcdConstraint, signs: Dict[str, int], index: Dict[str, int], d: int) -> List[Branch]:
    fv, gv = _bare_var(con.f), _bare_var(con.g)
    assert fv is not None and gv is not None, "sign_split requires a normalized instance"
    sf, sg = signs[fv], signs[gv]
    if sf == 0 and sg == 0:
        return _zero_value_branches(con.rel)
    if fv == gv:
        return _abs_branches(index[fv], sf, con.rel, con.c, d)
    if sf == 0:
        return _abs_branches(index[gv], sg, con.rel, con.c, d)
    if sg == 0:
        return _abs_branches(index[fv], sf, con.rel, con.c, d)
    if con.rel in ("=", ">="):
        return [((), (con,))]
    if con.rel == "<=":
        return [((), (GcdConstraint(con.f, con.g, "=", j),)) for j in range(1, con.c + 1)]
    # != c over non-zero arguments: gcd is 1..c-1 or at least c+1
    out: List[Branch] = [
        ((), (GcdConstraint(con.f, con.g, "=", j),)) for j in range(1, con.c)
    ]
    out.append(((), (GcdConstraint(con.f, con.g, ">=", con.c + 1),)))
    return out


def sign_split(inst: IpGcdInstance, config: SolverConfig = DEFAULT_CONFIG) -> List[IpGcdInstance]:
    """Members with every gcd variable sign-pinned and relations reduced to = / >=.

    Sign cases are enumerated lexicographically over (-1, 0, +1) per variable;
    zero-pinned arguments degenerate the gcd into rows on the other argument,
    so the gcd-of-two-zeros corner is decided wholesale per member.
    """
    index = {v: i for i, v in enumerate(inst.variables)}
    gvars: List[str] = []
    for con in inst.gcd_constraints:
        for poly in (con.f, con.g):
            name = _bare_var(poly)
            assert name is not None, "sign_split requires a normalized instance"
            if name not in gvars:
                gvars.append(name)
    members: List[IpGcdInstance] = []
    d = inst.d
    for combo in itertools.product((-1, 0, 1), repeat=len(gvars)):
        signs = dict(zip(gvars, combo))
        sign_rows: List[LinRow] = []
        for v, s in signs.items():
            i = index[v]
            if s > 0:
                sign_rows.append(_unit_row(d, i, -1, -1))
            elif s < 0:
                sign_rows.append(_unit_row(d, i, 1, -1))
            else:
                sign_rows.append(_unit_row(d, i, 1, 0))
                sign_rows.append(_unit_row(d, i, -1, 0))
        branch_lists: List[List[Branch]] = []
        dead = False
        for con in inst.gcd_constraints:
            branches = _gcd_branches(con, signs, index, d)
            if not branches:
                dead = True
                break
            branch_lists.append(branches)
        if dead:
            continue
        for picks in itertools.product(*branch_lists):
            rows = list(inst.inequalities) + sign_rows
            kept: List[GcdConstraint] = []
            for extra_rows, extra_gcds in picks:
                rows.extend(extra_rows)
                kept.extend(extra_gcds)
            members.append(
                IpGcdInstance(inst.variables, tuple(rows), tuple(kept), inst.objective)
            )
            if len(members) > config.max_members:
                raise MemberLimitExceeded(
                    f"sign splitting produced more than {config.max_members} members"
                )
    return members


def _oriented(poly: LinearPoly) -> LinearPoly:
    """Flip a sign-uniform polynomial to non-negative coefficients, positive constant."""
    assert poly.constant != 0, "cone does not pin the argument away from zero"
    if poly.constant > 0:
        assert all(a >= 0 for _, a in poly.coeffs), "argument sign not pinned by the cone"
        return poly
    assert all(a <= 0 for _, a in poly.coeffs), "argument sign not pinned by the cone"
    return poly.scale(-1)


def _triple_for_cone(member: IpGcdInstance, cone: ShiftedCone) -> GcdToDivTriple:
    k = cone.e.cols
    yvars = tuple(f"y{j}" for j in range(k))
    index = {v: i for i, v in enumerate(member.variables)}

    def pushed(var: str) -> LinearPoly:
        i = index[var]
        return LinearPoly.make(
            {yvars[j]: cone.e.at(i, j) for j in range(k)}, cone.u[i]
        )

    zvars: List[str] = []
    wvars: List[str] = []
    constraints: List[DivConstraint] = []
    for con in member.gcd_constraints:
        fpoly = _oriented(pushed(_bare_var(con.f)))
        gpoly = _oriented(pushed(_bare_var(con.g)))
        if con.rel == "=":
            w = f"w{len(wvars)}"
            wvars.append(w)
            constraints += [
                DivConstraint(LinearPoly.const(con.c), fpoly),
                DivConstraint(LinearPoly.const(con.c), gpoly),
                DivConstraint(fpoly, LinearPoly.var(w)),
                DivConstraint(gpoly, LinearPoly.make({w: 1}, con.c)),
            ]
        else:
            assert con.rel == ">=", "sign_split leaves only = and >= relations"
            z = f"z{len(zvars)}"
            zvars.append(z)
            zc = LinearPoly.make({z: 1}, con.c)
            constraints += [DivConstraint(zc, fpoly), DivConstraint(zc, gpoly)]
    all_vars = tuple(zvars) + yvars + tuple(wvars)
    psi = DivSystem.make(tuple(constraints), all_vars) if constraints else None
    d = len(member.variables)
    cols = (
        [[0] * d for _ in zvars]
        + [list(cone.e.col_tuple(j)) for j in range(k)]
        + [[0] * d for _ in wvars]
    )
    triple = GcdToDivTriple(
        psi, cone.u, IntMatrix.from_cols(cols, rows=d), tuple(zvars), yvars, tuple(wvars)
    )
    triple.validate_shape()
    assert len(all_vars) <= cone.e.cols + len(member.gcd_constraints)
    assert psi is None or psi.m <= 4 * len(member.gcd_constraints)
    return triple


def to_triples(member: IpGcdInstance, config: SolverConfig = DEFAULT_CONFIG) -> List[GcdToDivTriple]:
    """One divisibility triple per shifted cone of the member's inequalities."""
    cones = vzgs_decompose(member.inequalities, member.d, config)
    return [_triple_for_cone(member, cone) for cone in cones]


def _triple_partition(triple: GcdToDivTriple) -> VarPartition:
    return VarPartition(
        tuple(block for block in (triple.zvars, triple.yvars, triple.wvars) if block)
    )


def _triple_norm(triple: GcdToDivTriple) -> int:
    best = 1
    if triple.psi is not None:
        best = max(best, triple.psi.norm_inf())
    best = max(best, max((abs(v) for v in triple.u), default=1))
    best = max(
        best,
        max(
            (
                abs(triple.e.at(i, j))
                for i in range(triple.e.rows)
                for j in range(triple.e.cols)
            ),
            default=1,
        ),
    )
    return best


def _increasing_obstruction(psi: DivSystem) -> Optional[Tuple[LinearPoly, int]]:
    """A non-constant lhs primitive part whose span admits a positive constant.

    Returns (f, c) with c the least positive integer multiple of the constant
    polynomial 1 inside f's divisibility module, or None if no part qualifies.
    """
    one = LinearPoly.const(1).to_vector(psi.variables)
    for f in psi.lhs_primitive_parts():
        span = module_span(psi, f)
        basis = IntMatrix.from_cols(
            [g.to_vector(psi.variables) for g in span_columns(psi, span)],
            rows=len(psi.variables) + 1,
        )
        c = min_positive_multiplier(one, basis)
        if c is not None:
            return f, c
    return None


def force_increasing(
    triples: Sequence[GcdToDivTriple], config: SolverConfig = DEFAULT_CONFIG
) -> List[GcdToDivTriple]:
    """Substitute away bounded-value parts until every system is increasing.

    When some lhs primitive part f divides a constant c everywhere, every
    solution keeps f's variables within [0, c]; enumerating those values and
    substituting yields strictly smaller triples covering the same points.
    """
    out: List[GcdToDivTriple] = []
    queue = deque(triples)
    while queue:
        triple = queue.popleft()
        if triple.psi is None:
            out.append(triple)
            continue
        psi = triple.psi
        hit = _increasing_obstruction(psi)
        partition = _triple_partition(triple)
        if hit is None:
            assert is_increasing(psi, partition), "criterion missed a non-increasing system"
            out.append(triple)
            continue
        assert not is_increasing(psi, partition), "criterion fired on an increasing system"
        f, c = hit
        fvars = f.variables()
        d_in = len(triple.all_vars)
        norm_in = _triple_norm(triple)
        norm_cap = 2 ** 15 * (d_in + 1) * (norm_in + 1) ** 7
        for combo in itertools.product(range(c + 1), repeat=len(fvars)):
            nu = dict(zip(fvars, combo))
            f_val = f.evaluate(nu)
            if f_val == 0 or c % f_val != 0:
                continue
            try:
                sub = substitute(psi, nu)
            except UnsatisfiableAfterSubstitution:
                continue
            keep = [v for v in triple.all_vars if v not in nu]
            u2 = tuple(
                triple.u[i]
                + sum(triple.e.at(i, triple.all_vars.index(v)) * nu[v] for v in nu)
                for i in range(len(triple.u))
            )
            e2 = IntMatrix.from_cols(
                [list(triple.column_of(v)) for v in keep], rows=len(triple.u)
            )
            smaller = GcdToDivTriple(
                sub,
                u2,
                e2,
                tuple(v for v in triple.zvars if v in keep),
                tuple(v for v in triple.yvars if v in keep),
                tuple(v for v in triple.wvars if v in keep),
            )
            if sub is not None:
                smaller.validate_shape()
                assert sub.norm_inf() <= norm_cap, "substituted system norm exceeds bound"
            queue.append(smaller)
    return out


def solve_triple_mod_p(
    triple: GcdToDivTriple, p: int, config: SolverConfig = DEFAULT_CONFIG
) -> Optional[ModPSolution]:
    """Solution of the triple's system modulo p, or None when none exists.

    Easy primes take the per-variable residue walk.  Difficult primes
    enumerate y-residues modulo p^(mu+1) (mu capped by the block constants)
    and derive z and w values from the Bezout block shapes; every candidate
    is validated exactly, so a returned solution is always genuine.
    """
    psi = triple.psi
    if psi is None:
        raise ValueError("triple has no divisibility system")
    if p not in pdiff(psi, budget=config.factor_budget):
        return solve_mod_easy_prime(psi, p)

    zset, wset = set(triple.zvars), set(triple.wvars)
    block_constants: List[int] = []
    z_const: Dict[str, int] = {}
    w_zero_lhs: Dict[str, LinearPoly] = {}
    w_offset: Dict[str, Tuple[LinearPoly, int]] = {}
    for con in psi.constraints:
        lvars = set(con.lhs.variables())
        rvars = set(con.rhs.variables())
        if lvars & zset:
            (z,) = lvars
            z_const[z] = con.lhs.constant
            block_constants.append(con.lhs.constant)
        elif con.lhs.is_constant():
            block_constants.append(con.lhs.constant)
        if rvars & wset:
            (w,) = rvars
            if con.rhs.constant == 0:
                w_zero_lhs[w] = con.lhs
            else:
                w_offset[w] = (con.lhs, con.rhs.constant)
                block_constants.append(con.rhs.constant)
    mu = max((vp(c, p) for c in block_constants), default=0)
    modulus = p ** (mu + 1)
    space = modulus ** len(triple.yvars)
    if space > config.residue_cap:
        raise SearchBudgetExceeded(
            f"triple mod-{p} residue space {space} exceeds cap {config.residue_cap}"
        )
    d = len(triple.all_vars)
    norm_cap = (d + 1) * psi.norm_inf() ** 3 * p * p
    for combo in itertools.product(range(modulus), repeat=len(triple.yvars)):
        values: Dict[str, int] = dict(zip(triple.yvars, combo))
        for z in triple.zvars:
            values[z] = 1 if z_const[z] % p == 0 else 0
        for w in triple.wvars:
            f_val = w_zero_lhs[w].evaluate(values)
            g_poly, offset = w_offset[w]
            mu_i = vp(offset, p)
            if f_val % p ** (mu_i + 1) != 0:
                values[w] = modulus * g_poly.evaluate(values) - offset
            else:
                values[w] = modulus * f_val
        try:
            sol = ModPSolution.for_system(psi, p, values)
        except ValueError:
            continue
        assert all(
            abs(v) <= norm_cap for v in sol.as_dict().values()
        ), "mod-p witness norm exceeds bound"
        return sol
    return None


def _triple_witness(
    triple: GcdToDivTriple, config: SolverConfig, stats: SolveStats
) -> Optional[Dict[str, int]]:
    """Natural-number assignment solving the triple's system, or None."""
    if triple.psi is None:
        return {}
    sols: Dict[int, ModPSolution] = {}
    for p in sorted(pdiff(triple.psi, budget=config.factor_budget)):
        sol = solve_triple_mod_p(triple, p, config)
        if sol is None:
            return None
        sols[p] = sol
    return solve_increasing(
        triple.psi, _triple_partition(triple), sols, config.factor_budget, stats
    )


def _scan_box(
    member: IpGcdInstance,
    box: List[Tuple[int, int]],
    inst: IpGcdInstance,
    config: SolverConfig,
    stats: SolveStats,
) -> Iterator[Dict[str, int]]:
    """Original-instance solutions inside a bounded member, lexicographic."""
    count = 0
    names = inst.variables  # prefix of member.variables
    for point in iter_integer_points(member.inequalities, box):
        count += 1
        if count > config.point_cap:
            raise SearchBudgetExceeded(
                f"bounded member scan exceeds point cap {config.point_cap}"
            )
        stats.scan_steps += 1
        restricted = dict(zip(names, point))
        if inst.holds_at(restricted):
            yield restricted


def _find_witness(
    inst: IpGcdInstance, config: SolverConfig, stats: SolveStats
) -> Optional[Dict[str, int]]:
    """First assignment passing exact verification against the instance."""
    norm = normalize(inst)
    members = sign_split(norm, config)
    stats.members += len(members)
    for member in members:
        implied = propagate_bounds(member.inequalities, member.d)
        if implied is None:
            continue
        if all(lo is not None and hi is not None for lo, hi in implied):
            box = [(lo, hi) for lo, hi in implied]
            for restricted in _scan_box(member, box, inst, config, stats):
                return restricted
            continue
        cones = vzgs_decompose(member.inequalities, member.d, config)
        ray_cones: List[ShiftedCone] = []
        for cone in cones:
            if cone.e.cols == 0:
                candidate = dict(zip(member.variables, cone.u))
                restricted = {v: candidate[v] for v in inst.variables}
                if inst.holds_at(restricted):
                    return restricted
            else:
                ray_cones.append(cone)
        if not ray_cones:
            continue
        triples = force_increasing(
            [_triple_for_cone(member, cone) for cone in ray_cones], config
        )
        for triple in triples:
            stats.triples += 1
            lam = _triple_witness(triple, config, stats)
            if lam is None:
                continue
            point = triple.point_at(lam)
            candidate = dict(zip(member.variables, point))
            restricted = {v: candidate[v] for v in inst.variables}
            if inst.holds_at(restricted):
                return restricted
    return None


def feasible(inst: IpGcdInstance, config: SolverConfig = DEFAULT_CONFIG) -> SolveOutcome:
    """Feasible with a verified witness, or Infeasible."""
    stats = SolveStats()
    witness = _find_witness(inst, config, stats)
    if witness is None:
        return SolveOutcome("infeasible", None, None, stats)
    return SolveOutcome("feasible", witness, None, stats)


def _dot(coeffs: Sequence[int], values: Sequence[int]) -> int:
    return sum(c * v for c, v in zip(coeffs, values))


def optimize(inst: IpGcdInstance, config: SolverConfig = DEFAULT_CONFIG) -> SolveOutcome:
    """Infeasible, Unbounded, or Optimal with a verified witness.

    Internally minimizes (maximization flips the objective sign).  A
    satisfiable cone whose pushed objective has a negative generator
    coefficient witnesses unboundedness; otherwise the optimum lies between
    the best pushed constant and any witness value, and binary search with
    an appended objective row pins it down.
    """
    if inst.objective is None:
        raise ValueError("instance has no objective")
    stats = SolveStats()
    sign = 1 if inst.objective.direction == "min" else -1
    c_orig = tuple(sign * c for c in inst.objective.coeffs)

    norm = normalize(inst)
    c_norm = c_orig + (0,) * (norm.d - inst.d)
    members = sign_split(norm, config)
    stats.members += len(members)

    lower: Optional[int] = None
    best_value: Optional[int] = None
    best_witness: Optional[Dict[str, int]] = None

    def consider(restricted: Dict[str, int]) -> None:
        nonlocal best_value, best_witness
        value = _dot(c_orig, [restricted[v] for v in inst.variables])
        if best_value is None or value < best_value:
            best_value = value
            best_witness = restricted

    def lower_to(value: int) -> None:
        nonlocal lower
        if lower is None or value < lower:
            lower = value

    for member in members:
        implied = propagate_bounds(member.inequalities, member.d)
        if implied is None:
            continue
        if all(lo is not None and hi is not None for lo, hi in implied):
            box = [(lo, hi) for lo, hi in implied]
            for restricted in _scan_box(member, box, inst, config, stats):
                value = _dot(c_orig, [restricted[v] for v in inst.variables])
                lower_to(value)
                consider(restricted)
            continue
        cones = vzgs_decompose(member.inequalities, member.d, config)
        ray_cones: List[ShiftedCone] = []
        for cone in cones:
            if cone.e.cols == 0:
                candidate = dict(zip(member.variables, cone.u))
                restricted = {v: candidate[v] for v in inst.variables}
                if inst.holds_at(restricted):
                    value = _dot(c_orig, [restricted[v] for v in inst.variables])
                    lower_to(value)
                    consider(restricted)
            else:
                ray_cones.append(cone)
        if not ray_cones:
            continue
        triples = force_increasing(
            [_triple_for_cone(member, cone) for cone in ray_cones], config
        )
        for triple in triples:
            stats.triples += 1
            lam = _triple_witness(triple, config, stats)
            if lam is None:
                continue
            point = triple.point_at(lam)
            candidate = dict(zip(member.variables, point))
            restricted = {v: candidate[v] for v in inst.variables}
            if not inst.holds_at(restricted):
                continue
            pushed_cols = [
                _dot(c_norm, triple.e.col_tuple(j)) for j in range(triple.e.cols)
            ]
            if any(col < 0 for col in pushed_cols):
                return SolveOutcome("unbounded", None, None, stats)
            lower_to(_dot(c_norm, triple.u))
            consider(restricted)

    if best_witness is None:
        return SolveOutcome("infeasible", None, None, stats)
    assert lower is not None and lower <= best_value
    lo, hi = lower, best_value
    while lo < hi:
        mid = (lo + hi) // 2
        probe = inst.with_row(LinRow(c_orig, mid))
        witness = _find_witness(probe, config, stats)
        if witness is None:
            lo = mid + 1
        else:
            value = _dot(c_orig, [witness[v] for v in inst.variables])
            best_value, best_witness = value, witness
            hi = value
    return SolveOutcome("optimal", best_witness, sign * hi, stats)
