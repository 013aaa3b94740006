import pytest

from ipgcd.divsys import (
    DivConstraint,
    DivSystem,
    VarPartition,
    is_increasing,
    pdiff,
    substitute,
)
from ipgcd.localglobal import ModPSolution, SolveStats, solve_increasing, solve_mod_easy_prime
from ipgcd.numthy import vp
from ipgcd.oracle import enumerate_mod_p
from ipgcd.poly import LinearPoly as L


def mod_sols_for(phi, primes):
    out = {}
    for p in primes:
        found = None
        for cap in range(1, 7):
            found = enumerate_mod_p(phi, p, cap)
            if found is not None:
                break
        assert found is not None, f"no solution modulo {p}"
        out[p] = ModPSolution.for_system(phi, p, found)
    return out


def singleton_partition(variables):
    return VarPartition(tuple(frozenset({v}) for v in variables))


def chain_system():
    return DivSystem.make(
        [
            DivConstraint(L.var("v"), L.make({"u": 1, "x": 1, "y": 1})),
            DivConstraint(L.var("v"), L.var("x")),
            DivConstraint(L.make({"y": 1}, 2), L.make({"z": 1}, 1)),
            DivConstraint(L.var("v"), L.var("z")),
        ],
        ("v", "u", "x", "y", "z"),
    )


def test_mod_p_solution_validation():
    phi = DivSystem.make([DivConstraint(L.const(5), L.var("x"))], ("x",))
    sol = ModPSolution.for_system(phi, 5, {"x": 0})
    assert sol.mu == 1
    assert sol.value("x") == 0
    with pytest.raises(ValueError):
        ModPSolution.for_system(phi, 5, {"x": 1})  # v_5(5)=1 > v_5(1)=0
    with pytest.raises(ValueError):
        ModPSolution.for_system(phi, 5, {})  # missing variable
    zero_lhs = DivSystem.make([DivConstraint(L.var("x"), L.var("y"))], ("x", "y"))
    with pytest.raises(ValueError):
        ModPSolution.for_system(zero_lhs, 3, {"x": 0, "y": 0})


def test_easy_prime_single_constraint():
    phi = DivSystem.make(
        [DivConstraint(L.make({"x": 1}, 1), L.var("y"))], ("x", "y")
    )
    sol = solve_mod_easy_prime(phi, 5)
    values = sol.as_dict()
    assert all(0 <= v <= 4 for v in values.values())
    assert vp(L.make({"x": 1}, 1).evaluate(values), 5) == 0
    assert sol.mu == 0


def test_easy_prime_avoids_both_exclusions():
    phi = DivSystem.make(
        [DivConstraint(L.make({"x": 1}, 1), L.var("y")),
         DivConstraint(L.make({"x": 1}, 2), L.var("z"))],
        ("x", "y", "z"),
    )
    sol = solve_mod_easy_prime(phi, 5)
    x = sol.value("x")
    assert 0 <= x <= 4 and x not in (3, 4)
    assert sol.mu == 0


def test_solve_increasing_base_case_constant_lhs():
    phi = DivSystem.make([DivConstraint(L.const(5), L.var("x"))], ("x",))
    got = solve_increasing(phi, singleton_partition(("x",)), mod_sols_for(phi, pdiff(phi)))
    assert got["x"] >= 1
    assert got["x"] % 5 == 0


def test_solve_increasing_base_case_trivial_system():
    phi = DivSystem.make([DivConstraint(L.var("x"), L.var("x", 3))], ("x",))
    got = solve_increasing(phi, VarPartition((frozenset({"x"}),)), mod_sols_for(phi, pdiff(phi)))
    assert got["x"] >= 1


def test_solve_increasing_lcm_pair():
    # x fixed at 2 in x | y and x+1 | y leaves 2 | y and 3 | y
    phi = DivSystem.make(
        [DivConstraint(L.const(2), L.var("y")), DivConstraint(L.const(3), L.var("y"))],
        ("y",),
    )
    got = solve_increasing(phi, singleton_partition(("y",)), mod_sols_for(phi, pdiff(phi)))
    assert got["y"] >= 1
    assert got["y"] % 6 == 0


def test_solve_increasing_two_blocks():
    phi = DivSystem.make(
        [DivConstraint(L.make({"x": 1}, 1), L.make({"y": 1}, -2))], ("x", "y")
    )
    part = VarPartition((frozenset({"x"}), frozenset({"y"})))
    stats = SolveStats()
    got = solve_increasing(phi, part, mod_sols_for(phi, pdiff(phi)), stats=stats)
    assert got["x"] >= 1 and got["y"] >= 1
    assert (got["y"] - 2) % (got["x"] + 1) == 0


def test_solve_increasing_running_example():
    phi = chain_system()
    part = VarPartition(
        (frozenset({"u", "v"}), frozenset({"x", "y"}), frozenset({"z"}))
    )
    got = solve_increasing(phi, part, mod_sols_for(phi, pdiff(phi)))
    assert all(v >= 1 for v in got.values())
    assert phi.holds_at(got)


def test_running_example_rejects_fixing_u_to_two():
    # substituting u = 2 collapses the module of v onto a constant,
    # so no partition keeps the remaining system solvable by this method
    fixed = substitute(chain_system(), {"u": 2})
    part = VarPartition((frozenset({"v"}), frozenset({"x", "y"}), frozenset({"z"})))
    assert not is_increasing(fixed, part)
    with pytest.raises(ValueError):
        solve_increasing(fixed, part, mod_sols_for(fixed, pdiff(fixed)))


def test_solve_increasing_requires_matching_mod_solutions():
    phi = DivSystem.make([DivConstraint(L.const(5), L.var("x"))], ("x",))
    with pytest.raises(ValueError):
        solve_increasing(phi, singleton_partition(("x",)), {})
    wrong_key = {3: ModPSolution.for_system(phi, 5, {"x": 0})}
    with pytest.raises(ValueError):
        solve_increasing(phi, singleton_partition(("x",)), wrong_key)


def test_returned_point_sits_on_a_ladder_of_solutions():
    # the top variable admits at least 3 valid values stepping by the lhs value
    phi = DivSystem.make(
        [DivConstraint(L.make({"x": 1}, 1), L.make({"y": 1}, -2))], ("x", "y")
    )
    part = VarPartition((frozenset({"x"}), frozenset({"y"})))
    got = solve_increasing(phi, part, mod_sols_for(phi, pdiff(phi)))
    step = got["x"] + 1
    hits = sum(
        phi.holds_at({"x": got["x"], "y": got["y"] + k * step}) for k in range(4)
    )
    assert hits >= 3
