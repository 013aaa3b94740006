"""Local-to-global solving of increasing divisibility systems.

A system is solved modulo a prime p when every left-hand side evaluates to
a non-zero integer whose p-adic valuation does not exceed the right-hand
side's (v_p(0) being infinite).  For systems in increasing form, solutions
modulo the finitely many difficult primes are enough: an exact integer
solution is assembled variable by variable with a mixed system of
congruences (pinning behaviour at difficult primes) and non-congruences
(keeping accumulated prime factors away from the terms still in play).

The construction self-verifies: every returned assignment is checked
against the input constraints with exact integer arithmetic.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Mapping, Optional, Sequence, Set, Tuple

from .divsys import (
    DivConstraint,
    DivSystem,
    VarPartition,
    close_elimination,
    delta_terms,
    is_increasing,
    module_span,
    pdiff,
    pdiff_partial,
    pzero_partial,
    s_closure,
    span_columns,
    sterms,
    substitute,
)
from .errors import NoModPSolution, UnsatisfiableAfterSubstitution
from .intlinalg import IntMatrix, min_positive_multiplier
from .numthy import (
    CongruenceSystem,
    factorize_partial,
    smallest_prime_not_in,
    solve_mixed_crt,
    vp,
)
from .poly import LinearPoly, VarOrder, content_and_primitive, lv, s_polynomial


@dataclass
class SolveStats:
    """Counters filled in by the solving pipeline."""

    triples: int = 0
    members: int = 0
    primes: int = 0
    scan_steps: int = 0

    def as_dict(self) -> Dict[str, int]:
        return {"triples": self.triples, "primes": self.primes, "scan_steps": self.scan_steps}


@dataclass(frozen=True)
class ModPSolution:
    """Witness that a system is solvable modulo p, with its peak lhs valuation."""

    p: int
    values: Tuple[Tuple[str, int], ...]
    mu: int

    def value(self, var: str) -> int:
        for v, n in self.values:
            if v == var:
                return n
        raise KeyError(var)

    def as_dict(self) -> Dict[str, int]:
        return dict(self.values)

    @staticmethod
    def for_system(phi: DivSystem, p: int, values: Mapping[str, int]) -> "ModPSolution":
        """Validate values against phi and compute mu; raises ValueError if invalid."""
        mu = _check_mod_solution(phi, p, values)
        packed = tuple(sorted((v, int(values[v])) for v in phi.variables))
        return ModPSolution(p, packed, mu)


def _check_mod_solution(phi: DivSystem, p: int, values: Mapping[str, int]) -> int:
    missing = set(phi.variables) - set(values)
    if missing:
        raise ValueError(f"mod-{p} solution misses variables {sorted(missing)}")
    mu = 0
    for c in phi.constraints:
        left = c.lhs.evaluate(values)
        if left == 0:
            raise ValueError(f"lhs of {c} vanishes modulo-{p} candidate")
        vl = vp(left, p)
        right = c.rhs.evaluate(values)
        if right != 0 and vp(right, p) < vl:
            raise ValueError(f"{c} not satisfied modulo {p}: v_p {vl} > {vp(right, p)}")
        mu = max(mu, vl)
    return mu


def _easy_mod_values(phi: DivSystem, p: int) -> Dict[str, int]:
    order: VarOrder = phi.variables
    values: Dict[str, int] = {}
    for x in order:
        forbidden: Set[int] = set()
        for c in phi.constraints:
            f = c.lhs
            if lv(f, order) != x:
                continue
            part = f.partial_eval(values)
            a = part.coeff(x)
            assert a % p != 0, "difficult prime leaked past the pdiff check"
            forbidden.add((-part.constant * pow(a, -1, p)) % p)
        assert len(forbidden) < p, "no residue left for an easy prime"
        b = 0
        while b in forbidden:
            b += 1
        values[x] = b
    return values


def solve_mod_easy_prime(phi: DivSystem, p: int) -> ModPSolution:
    """Solution modulo an easy prime with every lhs valuation zero.

    Walks the universe assigning each variable the least residue in
    [0, p-1] at which no left-hand side led by that variable vanishes
    modulo p.  Since p exceeds m and divides no lhs coefficient, fewer
    than p residues are ever forbidden.
    """
    if p in pdiff(phi):
        raise ValueError(f"{p} is a difficult prime for this system")
    return ModPSolution.for_system(phi, p, _easy_mod_values(phi, p))


def _strip_primes(n: int, primes: FrozenSet[int]) -> int:
    n = abs(n)
    for p in primes:
        while n % p == 0:
            n //= p
    return n


def _strip_common(n: int, c: int) -> int:
    """Remove from n every prime factor it shares with c, factoring neither."""
    n, c = abs(n), abs(c)
    if n == 0:
        return 0
    g = math.gcd(n, c)
    while g > 1:
        while n % g == 0:
            n //= g
        g = math.gcd(n, c)
    return n


def _crt_merge(pairs: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    """Combine congruences whose moduli need not be coprime.

    Raises ValueError when two congruences disagree at a shared factor;
    for the systems built here that signals unsolvability modulo a prime
    too large for the factoring budget to name.
    """
    r, m = 0, 1
    for a, n in pairs:
        g = math.gcd(m, n)
        if (a - r) % g != 0:
            raise ValueError("inconsistent congruences at a shared modulus factor")
        t = ((a - r) // g * pow(m // g, -1, n // g)) % (n // g)
        lcm = m // g * n
        r = (r + m * t) % lcm
        m = lcm
    return r, m


def _linear_congruence(a: int, c: int, modulus: int) -> Tuple[int, int]:
    """The solutions of a*x = c (mod modulus) as a residue class r mod m."""
    g = math.gcd(a, modulus)
    if c % g != 0:
        raise ValueError("linear congruence has no solution")
    m = modulus // g
    if m == 1:
        return 0, 1
    return (c // g) * pow(a // g, -1, m) % m, m


def _first_lattice_point(a: int, m: int, anchor: int) -> int:
    return a + m * (-((a - anchor) // m))


def _zero_residue(part: LinearPoly, x: str, modulus: int) -> int:
    """Residue class of x making the single-variable polynomial vanish mod modulus."""
    a = part.coeff(x)
    return (-part.constant * pow(a, -1, modulus)) % modulus


def _assert_infinitude(phi: DivSystem, assignment: Mapping[str, int], order: VarOrder) -> None:
    """The largest variable admits at least 3 valid values on a short ladder.

    Stepping the top variable by the lcm of the fixed lhs values attached to
    it preserves every constraint except for at most m zero-crossings, so 3
    hits must appear within m+3 steps.
    """
    last = order[-1]
    step = 1
    for c in phi.constraints:
        if lv(c.rhs, order) == last and lv(c.lhs, order) != last:
            step = math.lcm(step, abs(c.lhs.evaluate(assignment)))
    probe = dict(assignment)
    hits = 0
    for k in range(phi.m + 3):
        probe[last] = assignment[last] + k * step
        if phi.holds_at(probe):
            hits += 1
            if hits >= 3:
                return
    raise AssertionError("largest variable does not admit 3 solutions on its ladder")


def solve_increasing(
    phi: DivSystem,
    partition: VarPartition,
    mod_solutions: Mapping[int, ModPSolution],
    budget: int = 5000000,
    stats: Optional[SolveStats] = None,
) -> Dict[str, int]:
    """Exact positive solution of an increasing system from its mod-p solutions.

    mod_solutions must cover every difficult prime the factoring budget can
    exhibit; primes hiding in constants the budget cannot split are pinned
    wholesale through composite congruences instead of one at a time.  The
    returned assignment is verified against phi before being returned;
    failure to verify is an internal error, never a silent wrong answer.
    """
    partition.check_covers(phi.variables)
    if not is_increasing(phi, partition):
        raise ValueError("system is not in increasing form for the given partition")
    for c in phi.constraints:
        if c.lhs.is_constant() and c.rhs.is_constant():
            if c.rhs.constant % c.lhs.constant != 0:
                raise ValueError(f"ground constraint {c} has no solution")
    needed = pdiff_partial(phi, budget=budget)
    sols: Dict[int, ModPSolution] = {}
    for p in sorted(needed):
        if p not in mod_solutions:
            raise ValueError(f"missing solution modulo the difficult prime {p}")
    for p, s in mod_solutions.items():
        if s.p != p:
            raise ValueError(f"solution keyed {p} claims prime {s.p}")
        sols[p] = ModPSolution.for_system(phi, p, s.as_dict())
        if stats is not None:
            stats.primes += 1
    order = partition.induced_order(phi.variables)
    if partition.r == 1:
        assignment = _solve_base(phi, order, {p: sols[p] for p in needed}, stats)
    else:
        assignment = _solve_step(phi, partition, order, sols, budget, stats)
    for v in phi.variables:
        assert assignment[v] >= 1, "constructed value must be positive"
    assert phi.holds_at(assignment), "constructed assignment failed self-verification"
    _assert_infinitude(phi, assignment, order)
    return assignment


def _solve_base(
    phi: DivSystem,
    order: VarOrder,
    sols: Dict[int, ModPSolution],
    stats: Optional[SolveStats],
) -> Dict[str, int]:
    """One-block systems: congruences per constant lhs plus zero dodging.

    In increasing one-block form every constraint has a constant lhs or a
    rhs that is an integer multiple of its lhs.  Constant lhs's C become
    congruences C | rhs at the rhs leading variable (merged whole, so
    prime factors beyond the factoring budget are still honoured exactly);
    multiples only need their lhs zeros dodged.
    """
    pairs = sorted(sols.items())
    assignment: Dict[str, int] = {}
    for x in order:
        cong = [(s.value(x) % p ** (s.mu + 1), p ** (s.mu + 1)) for p, s in pairs]
        for c in phi.constraints:
            if not c.lhs.is_constant() or lv(c.rhs, order) != x:
                continue
            part = c.rhs.partial_eval(assignment)
            r0, m0 = _linear_congruence(part.coeff(x), -part.constant, abs(c.lhs.constant))
            if m0 > 1:
                cong.append((r0, m0))
        a, m = _crt_merge(cong)
        t = _first_lattice_point(a, m, 1)
        bads: Set[int] = set()
        for c in phi.constraints:
            if c.lhs.is_constant() or lv(c.lhs, order) != x:
                continue
            part = c.lhs.partial_eval(assignment)
            coeff = part.coeff(x)
            if part.constant % coeff == 0:
                bads.add(-part.constant // coeff)
        start = t
        while t in bads:
            t += m
        if stats is not None:
            stats.scan_steps += (t - start) // m + 1
        assignment[x] = t
    return assignment


def _solve_step(
    phi: DivSystem,
    partition: VarPartition,
    order: VarOrder,
    sols: Dict[int, ModPSolution],
    budget: int,
    stats: Optional[SolveStats],
) -> Dict[str, int]:
    """Multi-block systems: close, fix the first block by mixed CRT, recurse."""
    # opportunistic factoring may stop early; exactness never rests on it,
    # so deeper levels run with a capped effort instead of the full budget
    effort = min(budget, 250000)
    psi = close_elimination(phi, order)
    pz = pzero_partial(psi, order, effort)
    delta = delta_terms(psi, order)
    sdelta = s_closure(delta, order)
    sd_nonzero = [h for h in sdelta if not h.is_zero()]
    phi_diff = pdiff_partial(phi, budget=effort)

    # Moduli whose prime factors count as difficult even when the budget
    # cannot name them: constant lhs's are pinned wholesale by composite
    # congruences below, and constants produced by the S-closure may share
    # factors with fixed terms exactly as known difficult primes may.
    ground_lhs = sorted({abs(c.lhs.constant) for c in psi.constraints if c.lhs.is_constant()})
    hygiene = sorted(
        set(ground_lhs) | {abs(h.constant) for h in sdelta if h.is_constant() and not h.is_zero()}
    )

    # solutions for every difficult prime of the closure, validated against it
    ext: Dict[int, ModPSolution] = {}
    for p in sorted(pz):
        if p in sols:
            base_vals = sols[p].as_dict()
        else:
            base_vals = _easy_mod_values(phi, p)
        ext[p] = ModPSolution.for_system(psi, p, base_vals)
        if stats is not None:
            stats.primes += 1

    x1 = [v for v in order if v in set(partition.blocks[0])]
    nu: Dict[str, int] = {}
    qset: Set[int] = set()
    residuals: List[int] = []
    forced: Dict[int, ModPSolution] = {}
    for x in x1:
        cong = [(ext[p].value(x) % p ** (ext[p].mu + 1), p ** (ext[p].mu + 1)) for p in sorted(pz)]
        cong += [(s.value(x) % q ** (s.mu + 1), q ** (s.mu + 1)) for q, s in sorted(forced.items())]
        for c in psi.constraints:
            if not c.lhs.is_constant() or lv(c.rhs, order) != x:
                continue
            part = c.rhs.partial_eval(nu)
            r0, m0 = _linear_congruence(part.coeff(x), -part.constant, abs(c.lhs.constant))
            if m0 > 1:
                cong.append((r0, m0))
        qextra = sorted(
            q for q in qset - pz - set(forced) if all(cc % q != 0 for cc in ground_lhs)
        )
        if not qextra:
            avoid = set(pz) | set(forced)
            q = smallest_prime_not_in(avoid)
            while any(cc % q == 0 for cc in ground_lhs):
                avoid.add(q)
                q = smallest_prime_not_in(avoid)
            qextra = [q]
        relevant = [g for g in sd_nonzero if lv(g, order) == x]
        forbidden: Dict[int, Tuple[int, ...]] = {}
        moved: List[int] = []
        for q in qextra:
            residues: Set[int] = set()
            usable = True
            for g in relevant:
                a = g.coeff(x)
                if a % q == 0:
                    usable = False
                    break
                residues.add(_zero_residue(g.partial_eval(nu), x, q))
            if usable and len(residues) < q:
                if residues:
                    forbidden[q] = tuple(sorted(residues))
            else:
                moved.append(q)
        for q in moved:
            # defensive: a forbidding prime breaking the residue-count or
            # coefficient-coprimality argument migrates to the congruence
            # side, pinned by its own mod-q solution
            if q in sols:
                forced[q] = ModPSolution.for_system(psi, q, sols[q].as_dict())
            else:
                assert q not in phi_diff, "difficult prime without a provided solution"
                forced[q] = ModPSolution.for_system(psi, q, _easy_mod_values(phi, q))
            s = forced[q]
            cong.append((s.value(x) % q ** (s.mu + 1), q ** (s.mu + 1)))
        a, m = _crt_merge(cong)
        system = CongruenceSystem.build([(a % m, m)], forbidden, anchor=1)
        val = solve_mixed_crt(system)
        if stats is not None:
            stats.scan_steps += (val - _first_lattice_point(a, m, 1)) // m + 1
        if residuals:
            # unfactored residuals stand for batches of avoided primes;
            # coprimality against them enforces every non-congruence the
            # budget could not spell out one prime at a time
            parts = [g.partial_eval(nu) for g in relevant]
            guard = 0
            while True:
                if all(val % q not in rs for q, rs in forbidden.items()):
                    values = [part.evaluate({x: val}) for part in parts]
                    if all(
                        math.gcd(abs(v), rem) == 1 for v in values for rem in residuals
                    ):
                        break
                val += m
                guard += 1
                if stats is not None:
                    stats.scan_steps += 1
                assert guard <= 100000, "residual coprimality walk ran out of patience"
        nu[x] = val
        for p in sorted(pz):
            assert (val - ext[p].value(x)) % p ** (ext[p].mu + 1) == 0, "IH1 violated"
        for h in delta:
            if lv(h, order) == x:
                assert h.evaluate(nu) != 0, "IH3 violated"
        for h in relevant:
            value = abs(h.evaluate(nu))
            assert value != 0, "accumulated S-term evaluated to zero"
            reduced = _strip_primes(value, pz)
            reduced = _strip_primes(reduced, frozenset(forced))
            for cc in hygiene:
                reduced = _strip_common(reduced, cc)
            if reduced == 1:
                continue
            found, rem = factorize_partial(reduced, effort)
            qset |= set(found)
            if rem > 1:
                residuals.append(rem)

    x1set = set(x1)
    fixed_terms = [(h, h.evaluate(nu)) for h in delta if lv(h, order) in x1set]
    for i, (h, hval) in enumerate(fixed_terms):
        for h2, hval2 in fixed_terms[i + 1 :]:
            if s_polynomial(h, h2, order).is_zero():
                continue
            shared = _strip_primes(math.gcd(hval, hval2), pz)
            shared = _strip_primes(shared, frozenset(forced))
            for cc in hygiene:
                shared = _strip_common(shared, cc)
            assert shared == 1, "IH2 violated"

    try:
        phi_prime = substitute(phi, nu)
    except UnsatisfiableAfterSubstitution as exc:
        raise AssertionError(f"first-block values broke a ground constraint: {exc}") from exc
    if phi_prime is None:
        rest = {v: 1 for v in phi.variables if v not in nu}
        return {**nu, **rest}
    part2 = VarPartition(partition.blocks[1:])
    fresh = _fresh_solutions(psi, nu, phi_prime, order, pz, ext, effort)
    sub = solve_increasing(phi_prime, part2, fresh, effort, stats)
    return {**nu, **sub}


def _fresh_solutions(
    psi: DivSystem,
    nu: Mapping[str, int],
    phi_prime: DivSystem,
    order: VarOrder,
    pz: FrozenSet[int],
    ext: Dict[int, ModPSolution],
    budget: int,
) -> Dict[int, ModPSolution]:
    """Solutions modulo every reachable difficult prime of the substituted system.

    Primes already difficult before substitution restrict their existing
    solution.  A genuinely new prime p either misses every ground lhs value
    (then residues avoiding the zeros of all partially evaluated terms give
    a valuation-zero solution) or hits the value of a unique primitive f;
    then every term tied to f's module is steered to valuation exactly
    v_p(f(nu)) and all others to zero.
    """
    out: Dict[int, ModPSolution] = {}
    for p in sorted(pdiff_partial(phi_prime, budget=budget)):
        if p in pz:
            restricted = {v: ext[p].value(v) for v in phi_prime.variables}
            try:
                out[p] = ModPSolution.for_system(phi_prime, p, restricted)
            except ValueError as exc:
                raise NoModPSolution(p, f"restriction failed: {exc}") from exc
            continue
        assert p > phi_prime.m, "a small fresh prime should already be difficult"
        ground = []
        for c in psi.constraints:
            left = c.lhs.partial_eval(nu)
            right = c.rhs.partial_eval(nu)
            if left.is_constant() and not right.is_constant():
                ground.append((c, left.constant))
        hits = [(c, alpha) for c, alpha in ground if alpha % p == 0]
        if not hits:
            out[p] = _fresh_case_all_coprime(psi, nu, phi_prime, order, p)
        else:
            out[p] = _fresh_case_module_hit(psi, nu, phi_prime, order, p, hits)
    return out


def _fresh_case_all_coprime(
    psi: DivSystem,
    nu: Mapping[str, int],
    psi_prime: DivSystem,
    order: VarOrder,
    p: int,
) -> ModPSolution:
    """p divides no ground lhs: dodge every term's zero residue, valuations 0."""
    values: Dict[str, int] = {}
    fixed: Dict[str, int] = dict(nu)
    for y in psi_prime.variables:
        forbidden: Set[int] = set()
        for t in psi.terms():
            if lv(t, order) != y:
                continue
            part = t.partial_eval(fixed)
            a = part.coeff(y)
            assert a % p != 0, "fresh prime divides a term coefficient"
            forbidden.add(_zero_residue(part, y, p))
        assert len(forbidden) < p, "fresh prime smaller than the term count"
        b = 0
        while b in forbidden:
            b += 1
        values[y] = b
        fixed[y] = b
    try:
        return ModPSolution.for_system(psi_prime, p, values)
    except ValueError as exc:
        raise NoModPSolution(p, f"valuation-zero construction failed: {exc}") from exc


def _fresh_case_module_hit(
    psi: DivSystem,
    nu: Mapping[str, int],
    psi_prime: DivSystem,
    order: VarOrder,
    p: int,
    hits: Sequence[Tuple[DivConstraint, int]],
) -> ModPSolution:
    """p divides the ground value of a unique primitive f.

    Terms whose integer multiples meet M_f share one residue class modulo
    p^u (u = v_p(f(nu))); choosing the new variables inside that class but
    off the exact zeros modulo p^(u+1) pins their valuation to u, while
    every unrelated term keeps valuation 0 automatically.
    """
    prims = []
    contents = []
    for c, alpha in hits:
        prim, cont = content_and_primitive(c.lhs)
        if prim not in prims:
            prims.append(prim)
        contents.append(cont)
    assert len(prims) == 1, "two independent lhs values share a fresh prime"
    assert all(cont % p != 0 for cont in contents), "fresh prime divides an lhs content"
    f = prims[0]
    u = vp(hits[0][1], p)
    assert u >= 1 and all(vp(alpha, p) == u for _, alpha in hits)
    span = module_span(psi, f)
    rows = psi.variables
    basis = IntMatrix.from_cols(
        [g.to_vector(rows) for g in span_columns(psi, span)], rows=len(rows) + 1
    )
    delta_f = sterms(psi, f, order)
    in_module: Dict[LinearPoly, bool] = {}
    for g in delta_f:
        if g.is_zero():
            in_module[g] = False
        else:
            in_module[g] = min_positive_multiplier(g.to_vector(rows), basis) is not None
    values: Dict[str, int] = {}
    fixed: Dict[str, int] = dict(nu)
    pu = p ** u
    pu1 = p ** (u + 1)
    for y in psi_prime.variables:
        tied = [g for g in delta_f if lv(g, order) == y and in_module[g]]
        loose = [g for g in delta_f if lv(g, order) == y and not in_module[g]]
        if tied:
            classes = set()
            bad = set()
            for g in tied:
                part = g.partial_eval(fixed)
                assert part.coeff(y) % p != 0, "fresh prime divides a term coefficient"
                classes.add(_zero_residue(part, y, pu))
                bad.add(_zero_residue(part, y, pu1))
            assert len(classes) == 1, "module-tied terms disagree on their residue class"
            rho = classes.pop()
            assert len(bad) < p, "fresh prime smaller than the tied-term count"
            b = None
            for t in range(p):
                cand = rho + t * pu
                if cand not in bad:
                    b = cand
                    break
            assert b is not None, "no residue dodges the tied terms' exact zeros"
            for h in loose:
                assert h.partial_eval(fixed).evaluate({y: b}) % p != 0, (
                    "unrelated term fell into the fresh prime's residue class"
                )
        else:
            forbidden = set()
            for h in loose:
                part = h.partial_eval(fixed)
                assert part.coeff(y) % p != 0, "fresh prime divides a term coefficient"
                forbidden.add(_zero_residue(part, y, p))
            assert len(forbidden) < p, "fresh prime smaller than the term count"
            b = 0
            while b in forbidden:
                b += 1
        values[y] = b
        fixed[y] = b
    try:
        return ModPSolution.for_system(psi_prime, p, values)
    except ValueError as exc:
        raise NoModPSolution(p, f"module-hit construction failed: {exc}") from exc
