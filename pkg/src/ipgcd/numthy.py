"""Primality, factorization and the mixed Chinese remainder scan.

The mixed CRT solver is the number-theoretic engine behind the
local-to-global construction: it finds the least value above an anchor
that satisfies a system of pairwise-coprime congruences together with
finitely many per-prime forbidden residues.  Its scan window carries an
explicit bound, so running out of window is a bug signal rather than a
timeout.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

from .errors import FactorizationBudgetExceeded, NotCoprime, WindowExhausted

# Deterministic Miller-Rabin witness set; correct for all n < 3.3 * 10^24,
# which covers 64-bit inputs with room to spare.
_MR_BASES_SMALL = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_LIMIT = 3317044064679887385961981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def _mr_witness(n: int, a: int) -> bool:
    """True when a witnesses compositeness of odd n > 2."""
    d = n - 1
    s = 0
    while d % 2 == 0:
        d //= 2
        s += 1
    x = pow(a, d, n)
    if x == 1 or x == n - 1:
        return False
    for _ in range(s - 1):
        x = x * x % n
        if x == n - 1:
            return False
    return True


def is_prime(n: int) -> bool:
    """Deterministic below 2^64; 40-round Miller-Rabin above that."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n == p:
            return True
        if n % p == 0:
            return False
    if n < _MR_LIMIT:
        bases = _MR_BASES_SMALL
    else:
        # Fixed bases keep the function deterministic; 40 rounds push the
        # error probability below 4^-40 < 2^-80.
        bases = tuple(range(2, 42))
    return not any(_mr_witness(n, a % n) for a in bases if a % n > 1)


def _pollard_rho(n: int, budget: int) -> Optional[int]:
    """Brent-cycle rho with batched gcds; a non-trivial factor or None on budget.

    The budget counts squarings modulo n across all retries, so callers can
    convert resistant inputs into a typed error instead of a hang.
    """
    if n % 2 == 0:
        return 2
    steps = 0
    c = 1
    while steps < budget:
        y, r, q, g = 2, 1, 1, 1
        x = ys = y
        while g == 1 and steps < budget:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            steps += r
            k = 0
            while k < r and g == 1:
                ys = y
                batch = min(128, r - k)
                for _ in range(batch):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                steps += batch
                g = math.gcd(q, n)
                k += batch
            r *= 2
        if g == n:
            # the batch overshot a factor; replay one step at a time
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if 1 < g < n:
            return g
        c += 1
    return None


def _factor_core(n: int, budget: int) -> Tuple[List[int], int]:
    out: List[int] = []
    for p in range(2, 10001):
        if p * p > n:
            break
        while n % p == 0:
            out.append(p)
            n //= p
    if n == 1:
        return out, 1
    residual = 1
    stack = [n]
    while stack:
        m = stack.pop()
        if is_prime(m):
            out.append(m)
            continue
        d = _pollard_rho(m, budget)
        if d is None:
            residual *= m
            continue
        stack.append(d)
        stack.append(m // d)
    return out, residual


def factorize(n: int, budget: int = 5000000) -> Tuple[int, ...]:
    """Prime factor multiset of n >= 1 as a sorted tuple.

    Trial division up to 10^4, then recursive Pollard rho splitting with
    a shared step budget.  Raises FactorizationBudgetExceeded when a
    composite cofactor survives the budget.
    """
    if n < 1:
        raise ValueError("factorize expects n >= 1")
    out, residual = _factor_core(n, budget)
    if residual != 1:
        raise FactorizationBudgetExceeded(residual, budget)
    return tuple(sorted(out))


def factorize_partial(n: int, budget: int = 5000000) -> Tuple[Tuple[int, ...], int]:
    """Best-effort factorization: (sorted prime factors found, composite residual).

    The residual is 1 on complete success, otherwise a product of composite
    cofactors that resisted the budget; it is never 1-or-prime.
    """
    if n < 1:
        raise ValueError("factorize_partial expects n >= 1")
    out, residual = _factor_core(n, budget)
    return tuple(sorted(out)), residual


def vp(n: int, p: int) -> int:
    """p-adic valuation of a non-zero integer."""
    if n == 0:
        raise ValueError("valuation of zero is undefined here; handle it at the call site")
    if p < 2:
        raise ValueError("p must be at least 2")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def crt_combine(congruences: Sequence[Tuple[int, int]]) -> Tuple[int, int]:
    """Combine pairwise-coprime congruences x = r (mod m).

    Args:
        congruences: sequence of (residue, modulus) pairs, moduli >= 1.

    Returns:
        (a, M) with M the product of the moduli and 0 <= a < M the unique
        combined residue.  The empty system yields (0, 1).

    Raises:
        NotCoprime: when two moduli share a factor.
    """
    a, m = 0, 1
    for r, mod in congruences:
        if mod < 1:
            raise ValueError(f"modulus {mod} < 1")
        g = math.gcd(m, mod)
        if g != 1:
            raise NotCoprime(m, mod)
        # a' = a (mod m), a' = r (mod mod)
        t = ((r - a) * pow(m, -1, mod)) % mod
        a = a + m * t
        m = m * mod
        a %= m
    return a, m


def ecrtf(q_count: int, d: int) -> int:
    """Integer scan-window factor for the mixed CRT search.

    For q_count forbidding primes and at most d forbidden residues per
    prime, the least admissible lattice point above the anchor lies
    within product-of-moduli times this factor.  The real-valued bound is
    ((d+1)*q_count) ** (4*(d+1)^2 * (3 + ln ln(q_count+1))); the exponent
    is rounded up so the integer returned dominates it.
    """
    if q_count < 1 or d < 1:
        raise ValueError("q_count and d must be >= 1")
    exponent = 4 * (d + 1) ** 2 * (3.0 + math.log(math.log(q_count + 1.0)))
    return ((d + 1) * q_count) ** math.ceil(exponent)


@dataclass(frozen=True)
class CongruenceSystem:
    """Mixed congruence/non-congruence system over one integer unknown.

    Fields:
        congruences: (residue, modulus) pairs with pairwise coprime moduli.
        forbidden: prime -> non-empty residue tuple; the unknown must avoid
            every listed residue modulo that prime.  Each prime must be
            coprime to all congruence moduli and strictly larger than its
            forbidden-residue count.
        anchor: the returned solution is the least admissible value >= anchor.
    """

    congruences: Tuple[Tuple[int, int], ...]
    forbidden: Tuple[Tuple[int, Tuple[int, ...]], ...]
    anchor: int = 0

    def __post_init__(self):
        _, m = crt_combine(self.congruences)
        seen = set()
        for q, residues in self.forbidden:
            if not is_prime(q):
                raise ValueError(f"forbidding modulus {q} is not prime")
            if q in seen:
                raise ValueError(f"duplicate forbidding prime {q}")
            seen.add(q)
            if math.gcd(q, m) != 1:
                raise NotCoprime(q, m)
            if len(residues) == 0:
                raise ValueError(f"prime {q} forbids nothing")
            if len(set(r % q for r in residues)) >= q:
                raise ValueError(f"prime {q} forbids every residue")

    @staticmethod
    def build(congruences: Sequence[Tuple[int, int]],
              forbidden: Dict[int, Sequence[int]],
              anchor: int = 0) -> "CongruenceSystem":
        packed = tuple(sorted((q, tuple(sorted(set(r % q for r in rs))))
                              for q, rs in forbidden.items()))
        return CongruenceSystem(tuple(congruences), packed, anchor)


def solve_mixed_crt(system: CongruenceSystem) -> int:
    """Least x >= anchor satisfying a valid CongruenceSystem.

    Scans the congruence lattice upward from the anchor.  The window is
    product-of-moduli times ecrtf(|Q|, max forbidden count); on a system
    satisfying the invariants the scan provably succeeds, so
    WindowExhausted signals a bug in the caller.
    """
    a, m = crt_combine(system.congruences)
    x = a + m * (-((a - system.anchor) // m))
    if not system.forbidden:
        return x
    d = max(len(rs) for _, rs in system.forbidden)
    limit = system.anchor + m * ecrtf(len(system.forbidden), d)
    while x <= limit:
        ok = True
        for q, residues in system.forbidden:
            r = x % q
            if any(r == f % q for f in residues):
                ok = False
                break
        if ok:
            return x
        x += m
    raise WindowExhausted(f"no admissible value in [{system.anchor}, {limit}]")


def primes_upto(n: int) -> Tuple[int, ...]:
    """All primes <= n by an Eratosthenes sieve."""
    if n < 2:
        return ()
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, int(n ** 0.5) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return tuple(i for i in range(2, n + 1) if sieve[i])


def smallest_prime_not_in(excluded: "set[int] | frozenset[int]") -> int:
    """Least prime outside the given set."""
    p = 2
    while True:
        if is_prime(p) and p not in excluded:
            return p
        p += 1
