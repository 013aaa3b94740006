import itertools
import math

import pytest

from ipgcd.config import SolverConfig
from ipgcd.divsys import DivConstraint, DivSystem, VarPartition, is_increasing
from ipgcd.errors import MemberLimitExceeded, SearchBudgetExceeded
from ipgcd.instance import (
    GcdConstraint,
    GcdToDivTriple,
    IpGcdInstance,
    LinRow,
    Objective,
)
from ipgcd.intlinalg import IntMatrix
from ipgcd.poly import LinearPoly as L
from ipgcd.solver import (
    feasible,
    force_increasing,
    normalize,
    optimize,
    sign_split,
    solve_triple_mod_p,
    to_triples,
)


def box_rows(*intervals):
    d = len(intervals)
    rows = []
    for i, (lo, hi) in enumerate(intervals):
        up = [0] * d
        up[i] = 1
        dn = [0] * d
        dn[i] = -1
        rows.append(LinRow(tuple(up), hi))
        rows.append(LinRow(tuple(dn), -lo))
    return tuple(rows)


def brute_solutions(inst, intervals):
    ranges = [range(lo, hi + 1) for lo, hi in intervals]
    names = inst.variables
    return {
        p for p in itertools.product(*ranges) if inst.holds_at(dict(zip(names, p)))
    }


def quadrant_member(rel, c):
    """Sign-pinned member x >= 1, y >= 1 with one gcd constraint kept."""
    return IpGcdInstance(
        ("x", "y"),
        (LinRow((-1, 0), -1), LinRow((0, -1), -1)),
        (GcdConstraint(L.var("x"), L.var("y"), rel, c),),
    )


def test_normalize_keeps_bare_variable_arguments():
    inst = IpGcdInstance(
        ("x", "y"),
        box_rows((1, 3), (1, 3)),
        (GcdConstraint(L.var("x"), L.var("y"), "=", 2),),
    )
    assert normalize(inst) == inst


def test_normalize_pins_compound_argument():
    inst = IpGcdInstance(
        ("x", "y"),
        (),
        (GcdConstraint(L.make({"x": 2}, 1), L.var("y"), "=", 3),),
    )
    norm = normalize(inst)
    assert norm.variables == ("x", "y", "t0")
    # two rows pin t0 = 2x + 1
    assert LinRow((-2, 0, 1), 1) in norm.inequalities
    assert LinRow((2, 0, -1), -1) in norm.inequalities
    (con,) = norm.gcd_constraints
    assert con.f == L.var("t0") and con.g == L.var("y")


def test_normalize_caches_repeated_arguments():
    poly = L.make({"x": 1}, 1)
    inst = IpGcdInstance(
        ("x", "y", "z"),
        (),
        (
            GcdConstraint(poly, L.var("y"), "=", 1),
            GcdConstraint(poly, L.var("z"), "=", 2),
        ),
    )
    norm = normalize(inst)
    assert norm.variables == ("x", "y", "z", "t0")
    assert all(_bare(con.f) == "t0" for con in norm.gcd_constraints)


def _bare(poly):
    assert len(poly.coeffs) == 1 and poly.constant == 0
    return poly.coeffs[0][0]


def test_normalize_pads_objective_and_rows():
    inst = IpGcdInstance(
        ("x",),
        (LinRow((1,), 5),),
        (GcdConstraint(L.var("x"), L.const(6), "=", 3),),
        Objective((1,), "min"),
    )
    norm = normalize(inst)
    assert norm.objective == Objective((1, 0), "min")
    assert norm.inequalities[0] == LinRow((1, 0), 5)


def test_sign_split_member_count_for_one_equality():
    inst = IpGcdInstance(
        ("x", "y"), (), (GcdConstraint(L.var("x"), L.var("y"), "=", 2),)
    )
    # 4 members with both signs non-zero, 4 with exactly one zero
    # (degenerating to |other| = 2), none for the double-zero case
    assert len(sign_split(inst)) == 8


@pytest.mark.parametrize("rel,c", [("=", 2), ("<=", 3), (">=", 2), ("!=", 2)])
def test_sign_split_union_matches_instance(rel, c):
    intervals = ((-6, 6), (-6, 6))
    inst = IpGcdInstance(
        ("x", "y"), box_rows(*intervals), (GcdConstraint(L.var("x"), L.var("y"), rel, c),)
    )
    members = sign_split(inst)
    want = brute_solutions(inst, intervals)
    got = set()
    for member in members:
        sols = brute_solutions(member, intervals)
        assert sols <= want  # every member refines the instance
        got |= sols
    assert got == want


def test_sign_split_members_pin_relations_to_eq_or_geq():
    inst = IpGcdInstance(
        ("x", "y"), (), (GcdConstraint(L.var("x"), L.var("y"), "!=", 3),)
    )
    for member in sign_split(inst):
        assert all(con.rel in ("=", ">=") for con in member.gcd_constraints)


def test_sign_split_member_cap():
    inst = IpGcdInstance(
        ("x", "y"), (), (GcdConstraint(L.var("x"), L.var("y"), "=", 1),)
    )
    with pytest.raises(MemberLimitExceeded):
        sign_split(inst, SolverConfig(max_members=3))


def test_to_triples_equality_builds_bezout_block():
    member = quadrant_member("=", 2)
    (triple,) = to_triples(member)
    assert triple.u == (1, 1)
    assert triple.zvars == () and triple.yvars == ("y0", "y1") and triple.wvars == ("w0",)
    f, g = L.make({"y1": 1}, 1), L.make({"y0": 1}, 1)  # pushed x and y
    assert triple.psi.constraints == (
        DivConstraint(L.const(2), f),
        DivConstraint(L.const(2), g),
        DivConstraint(f, L.var("w0")),
        DivConstraint(g, L.make({"w0": 1}, 2)),
    )


def test_to_triples_geq_builds_shared_shift_block():
    member = quadrant_member(">=", 3)
    (triple,) = to_triples(member)
    assert triple.zvars == ("z0",) and triple.wvars == ()
    zc = L.make({"z0": 1}, 3)
    assert triple.psi.constraints == (
        DivConstraint(zc, L.make({"y1": 1}, 1)),
        DivConstraint(zc, L.make({"y0": 1}, 1)),
    )


def test_triple_solutions_satisfy_the_member():
    member = quadrant_member("=", 2)
    (triple,) = to_triples(member)
    for lam in itertools.product(range(8), repeat=3):
        values = dict(zip(triple.all_vars, lam))
        if not triple.psi.holds_at(values):
            continue
        point = triple.point_at(values)
        assert member.holds_at(dict(zip(member.variables, point)))


def test_force_increasing_splits_bounded_pivot():
    # z0+3 divides two polynomials 6 apart, so it divides 6; enumeration
    # leaves the ground systems for z0 = 0 and z0 = 3
    psi = DivSystem.make(
        [
            DivConstraint(L.make({"z0": 1}, 3), L.make({"y0": 1}, 1)),
            DivConstraint(L.make({"z0": 1}, 3), L.make({"y0": 1}, 7)),
        ],
        ("z0", "y0"),
    )
    triple = GcdToDivTriple(
        psi, (1, 7), IntMatrix.from_cols([[0, 0], [1, 1]], rows=2), ("z0",), ("y0",), ()
    )
    assert not is_increasing(psi, VarPartition((("z0",), ("y0",))))
    out = force_increasing([triple])
    assert len(out) == 2
    assert sorted(t.psi.constraints[0].lhs.constant for t in out) == [3, 6]
    for t in out:
        assert t.zvars == () and t.u == (1, 7)
        assert all(c.lhs.is_constant() for c in t.psi.constraints)
        assert is_increasing(t.psi, VarPartition((("y0",),)))


def test_force_increasing_keeps_increasing_triples():
    member = quadrant_member("=", 2)
    (triple,) = to_triples(member)
    out = force_increasing([triple])
    assert len(out) == 1 and out[0].psi == triple.psi


def test_solve_triple_mod_two_frozen_witness():
    member = quadrant_member("=", 2)
    (triple,) = to_triples(member)
    sol = solve_triple_mod_p(triple, 2)
    assert sol.as_dict() == {"y0": 1, "y1": 1, "w0": 6}
    assert sol.mu == 1


def test_solve_triple_mod_easy_prime():
    member = quadrant_member("=", 2)
    (triple,) = to_triples(member)
    sol = solve_triple_mod_p(triple, 5)
    assert sol.mu == 0
    assert all(0 <= v < 5 for v in sol.as_dict().values())


def test_solve_triple_mod_p_unsolvable_returns_none():
    psi = DivSystem.make(
        [
            DivConstraint(L.const(2), L.make({"y0": 1}, 1)),
            DivConstraint(L.const(2), L.make({"y0": 1}, 2)),
        ],
        ("y0",),
    )
    triple = GcdToDivTriple(
        psi, (0,), IntMatrix.from_cols([[1]], rows=1), (), ("y0",), ()
    )
    assert solve_triple_mod_p(triple, 2) is None


def test_solve_triple_mod_p_residue_cap():
    member = quadrant_member("=", 2)
    (triple,) = to_triples(member)
    with pytest.raises(SearchBudgetExceeded):
        solve_triple_mod_p(triple, 2, SolverConfig(residue_cap=10))


def test_solve_triple_mod_p_needs_a_system():
    triple = GcdToDivTriple(None, (0,), IntMatrix.from_cols([[1]], rows=1), (), ("y0",), ())
    with pytest.raises(ValueError):
        solve_triple_mod_p(triple, 2)


def test_feasible_bounded_witness():
    inst = IpGcdInstance(
        ("x", "y"),
        box_rows((1, 3), (1, 3)),
        (GcdConstraint(L.var("x"), L.var("y"), "=", 2),),
    )
    out = feasible(inst)
    assert out.status == "feasible"
    assert inst.holds_at(out.assignment)


def test_feasible_bounded_infeasible():
    inst = IpGcdInstance(
        ("x", "y"),
        box_rows((2, 2), (4, 4)),
        (GcdConstraint(L.var("x"), L.var("y"), "=", 5),),
    )
    assert feasible(inst).status == "infeasible"


def test_feasible_gcd_of_zeros():
    pinned = box_rows((0, 0), (0, 0))
    low = IpGcdInstance(
        ("x", "y"), pinned, (GcdConstraint(L.var("x"), L.var("y"), "<=", 3),)
    )
    assert feasible(low).status == "feasible"  # gcd(0, 0) = 0
    high = IpGcdInstance(
        ("x", "y"), pinned, (GcdConstraint(L.var("x"), L.var("y"), ">=", 1),)
    )
    assert feasible(high).status == "infeasible"


def test_feasible_unbounded_region_routes_through_cones():
    inst = IpGcdInstance(
        ("x", "y"),
        (LinRow((-1, 0), -1), LinRow((0, -1), -1)),
        (GcdConstraint(L.var("x"), L.var("y"), "=", 7),),
    )
    out = feasible(inst)
    assert out.status == "feasible"
    assert inst.holds_at(out.assignment)
    assert out.stats.triples >= 1


def test_feasible_agrees_with_brute_force_corpus():
    intervals = ((-5, 5), (-5, 5))
    corpus = [
        (GcdConstraint(L.var("x"), L.var("y"), ">=", 4),),
        (GcdConstraint(L.make({"x": 1}, 1), L.var("y"), "=", 6),),
        (
            GcdConstraint(L.var("x"), L.var("y"), "=", 2),
            GcdConstraint(L.var("x"), L.var("y"), "!=", 2),
        ),
        (GcdConstraint(L.make({"x": 2, "y": 3}), L.var("y"), "=", 5),),
    ]
    for gcds in corpus:
        inst = IpGcdInstance(("x", "y"), box_rows(*intervals), gcds)
        want = bool(brute_solutions(inst, intervals))
        assert (feasible(inst).status == "feasible") == want


def test_optimize_two_variable_minimum():
    inst = IpGcdInstance(
        ("x", "y"),
        box_rows((1, 4), (1, 4)),
        (GcdConstraint(L.var("x"), L.var("y"), "=", 3),),
        Objective((1, 1), "min"),
    )
    out = optimize(inst)
    assert out.status == "optimal" and out.value == 6
    assert out.assignment == {"x": 3, "y": 3}


def test_optimize_maximum_with_constant_argument():
    inst = IpGcdInstance(
        ("x",),
        box_rows((1, 9)),
        (GcdConstraint(L.var("x"), L.const(6), "=", 3),),
        Objective((1,), "max"),
    )
    out = optimize(inst)
    assert out.status == "optimal" and out.value == 9
    assert out.assignment["x"] == 9


def test_optimize_same_variable_twice_means_absolute_value():
    inst = IpGcdInstance(
        ("x",),
        box_rows((-10, 10)),
        (GcdConstraint(L.var("x"), L.var("x"), "=", 4),),
        Objective((1,), "min"),
    )
    out = optimize(inst)
    assert out.status == "optimal" and out.value == -4


def test_optimize_unbounded_above():
    inst = IpGcdInstance(
        ("x",), (LinRow((-1,), -1),), (), Objective((1,), "max")
    )
    assert optimize(inst).status == "unbounded"


def test_optimize_unbounded_below():
    inst = IpGcdInstance(("x",), (LinRow((1,), 5),), (), Objective((1,), "min"))
    assert optimize(inst).status == "unbounded"


def test_optimize_bounded_direction_with_gcd_on_open_region():
    # region open above but minimization drives x down to the vertex
    inst = IpGcdInstance(
        ("x", "y"),
        (LinRow((-1, 0), -1), LinRow((0, -1), -1)),
        (GcdConstraint(L.var("x"), L.var("y"), ">=", 2),),
        Objective((1, 1), "min"),
    )
    out = optimize(inst)
    assert out.status == "optimal" and out.value == 4
    assert math.gcd(out.assignment["x"], out.assignment["y"]) >= 2


def test_optimize_infeasible():
    inst = IpGcdInstance(
        ("x",), box_rows((3, 2)), (), Objective((1,), "min")
    )
    assert optimize(inst).status == "infeasible"


def test_optimize_requires_objective():
    inst = IpGcdInstance(("x",), box_rows((0, 1)), ())
    with pytest.raises(ValueError):
        optimize(inst)


def test_optimize_agrees_with_brute_force_corpus():
    intervals = ((-4, 4), (-4, 4))
    corpus = [
        ((2, -1), "min", (GcdConstraint(L.var("x"), L.var("y"), ">=", 2),)),
        ((1, 1), "max", (GcdConstraint(L.make({"x": 1}, 2), L.var("y"), "<=", 2),)),
        ((3, 1), "min", (GcdConstraint(L.var("x"), L.var("y"), "!=", 1),)),
    ]
    for coeffs, direction, gcds in corpus:
        inst = IpGcdInstance(
            ("x", "y"), box_rows(*intervals), gcds, Objective(coeffs, direction)
        )
        sols = brute_solutions(inst, intervals)
        values = [
            sum(c * v for c, v in zip(coeffs, p)) for p in sols
        ]
        out = optimize(inst)
        if not values:
            assert out.status == "infeasible"
            continue
        want = min(values) if direction == "min" else max(values)
        assert out.status == "optimal" and out.value == want
        assert inst.holds_at(out.assignment)
        assert inst.objective_value(out.assignment) == want
