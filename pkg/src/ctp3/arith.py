"""Exact integer and rational helpers: factoring, cube-free parts, cube roots.

Everything here is deterministic: Pollard rho runs a fixed parameter
schedule, and cube roots modulo primes use a derandomized non-residue
search, so repeated runs give identical results.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Optional

import gmpy2

from .errors import FactorTimeout, NotCubeMod

_TRIAL_BOUND = 20000
_SMALL_PRIMES: list[int] = []


def _small_primes() -> list[int]:
    global _SMALL_PRIMES
    if not _SMALL_PRIMES:
        sieve = bytearray([1]) * _TRIAL_BOUND
        sieve[0:2] = b"\x00\x00"
        for i in range(2, int(_TRIAL_BOUND**0.5) + 1):
            if sieve[i]:
                sieve[i * i :: i] = bytearray(len(sieve[i * i :: i]))
        _SMALL_PRIMES = [i for i in range(_TRIAL_BOUND) if sieve[i]]
    return _SMALL_PRIMES


def is_prime(n: int) -> bool:
    """Primality test (BPSW + 40 Miller-Rabin rounds via gmpy2)."""
    if n < 2:
        return False
    return bool(gmpy2.is_prime(int(n), 40))


@dataclass(frozen=True)
class Factorization:
    """Prime factorization of a positive integer, ascending primes."""

    factors: tuple[tuple[int, int], ...]

    def __post_init__(self):
        primes = [p for p, _ in self.factors]
        if primes != sorted(primes) or len(set(primes)) != len(primes):
            raise ValueError("factors must be ascending and distinct")
        if any(e < 1 for _, e in self.factors):
            raise ValueError("exponents must be positive")

    @property
    def value(self) -> int:
        out = 1
        for p, e in self.factors:
            out *= p**e
        return out

    def primes(self) -> list[int]:
        return [p for p, _ in self.factors]

    def __iter__(self):
        return iter(self.factors)


def _rho_brent(n: int, budget: list[int]) -> Optional[int]:
    """Brent-variant Pollard rho with a fixed, deterministic schedule."""
    if n % 2 == 0:
        return 2
    n = gmpy2.mpz(n)
    for c in range(1, 64):
        x = gmpy2.mpz(2 + c)
        y = x
        power = lam = 1
        q = gmpy2.mpz(1)
        while True:
            if budget[0] <= 0:
                return None
            if power == lam:
                y = x
                power *= 2
                lam = 0
            block = min(64, power - lam)
            for _ in range(block):
                x = (x * x + c) % n
                q = q * abs(x - y) % n
            lam += block
            budget[0] -= block
            d = gmpy2.gcd(q, n)
            if d == n:
                break  # unlucky cycle, retry with next c
            if d > 1:
                return int(d)
    return None


_factor_cache: dict[int, "Factorization"] = {}


def factor(
    n: int,
    budget: int = 4_000_000,
    hints: Optional[Iterable[int]] = None,
) -> Factorization:
    """Exact factorization of n >= 1.

    Trial division up to a fixed bound, then Pollard rho; every reported
    prime passes the primality test.  ``hints`` may carry known factors
    (not necessarily prime).  Raises FactorTimeout when the rho iteration
    budget runs out.
    """
    if n < 1:
        raise ValueError("factor() needs n >= 1")
    n = int(n)
    cached = _factor_cache.get(n)
    if cached is not None:
        return cached
    out: dict[int, int] = {}
    rem = n
    for h in sorted({abs(int(h)) for h in hints or []} - {0, 1}, reverse=True):
        g = math.gcd(h, rem)
        while g > 1:
            for p, e in factor(g, budget=budget):
                while rem % p == 0:
                    out[p] = out.get(p, 0) + 1
                    rem //= p
            g = math.gcd(h, rem)
    for p in _small_primes():
        if p * p > rem:
            break
        while rem % p == 0:
            out[p] = out.get(p, 0) + 1
            rem //= p
    stack = [rem] if rem > 1 else []
    work = [budget]
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            out[m] = out.get(m, 0) + 1
            continue
        root, exact = gmpy2.iroot(gmpy2.mpz(m), 2)
        if exact:
            stack.extend([int(root)] * 2)
            continue
        d = _rho_brent(m, work)
        if d is None or d == m:
            raise FactorTimeout(n, partial=sorted(out))
        stack.extend([d, m // d])
    result = Factorization(tuple(sorted(out.items())))
    if len(_factor_cache) < 100_000:
        _factor_cache[n] = result
    return result


def cube_free_part(n: int, budget: int = 4_000_000, hints=None) -> tuple[int, int]:
    """Write n = f * g**3 with f cube-free; returns (f, g)."""
    if n < 1:
        raise ValueError("cube_free_part() needs n >= 1")
    f = g = 1
    for p, e in factor(n, budget=budget, hints=hints):
        f *= p ** (e % 3)
        g *= p ** (e // 3)
    return f, g


def split_square(b: int, budget: int = 4_000_000, hints=None) -> tuple[int, int]:
    """Write cube-free b = b1 * b2**2 with b1, b2 coprime squarefree."""
    if b < 1:
        raise ValueError("split_square() needs b >= 1")
    b1 = b2 = 1
    for p, e in factor(b, budget=budget, hints=hints):
        if e == 1:
            b1 *= p
        elif e == 2:
            b2 *= p
        else:
            raise ValueError(f"{b} is not cube-free (prime {p} has exponent {e})")
    return b1, b2


def crt(residues: Iterable[int], moduli: Iterable[int]) -> int:
    """Chinese remainder for pairwise coprime moduli; smallest nonnegative."""
    x, m = 0, 1
    for r, q in zip(residues, moduli):
        g, s, _ = gmpy2.gcdext(gmpy2.mpz(m), gmpy2.mpz(q))
        if g != 1:
            raise ValueError("moduli not coprime")
        x = (x + (r - x) * int(s) % q * m) % (m * q)
        m *= q
    return int(x % m)


def zeta3_mod(q: int) -> int:
    """The smaller primitive cube root of unity mod prime q = 1 mod 3."""
    for g in range(2, q):
        w = pow(g, (q - 1) // 3, q)
        if w != 1:
            return int(min(w, w * w % q))
    raise ValueError(f"{q} has no primitive cube root of unity")


def _amm_cube_root(a: int, q: int) -> int:
    """Cube root mod prime q = 1 mod 3 of a known cubic residue a.

    Adleman-Manders-Miller with Pohlig-Hellman digit correction in the
    3-Sylow subgroup; the result is verified before returning.
    """
    t, s = q - 1, 0
    while t % 3 == 0:
        t //= 3
        s += 1
    for g in range(2, q):
        if pow(g, (q - 1) // 3, q) != 1:
            break
    b = pow(g, t, q)  # generator of the 3-Sylow, order 3^s
    w = pow(b, 3 ** (s - 1), q)  # primitive cube root of unity
    w2 = w * w % q
    if t % 3 == 2:
        x = pow(a, (t + 1) // 3, q)
    else:
        x = pow(a, (2 * t + 1) // 3, q)
    # x^3 / a lies in <b^3>; find m with x^3/a = (b^3)^m digit by digit
    big_b = pow(b, 3, q)
    err = x * x % q * x % q * pow(a, q - 2, q) % q
    m = 0
    for i in range(s - 1):
        d = pow(err * pow(big_b, (-m) % 3 ** (s - 1), q) % q, 3 ** (s - 2 - i), q)
        if d == w:
            m += 3**i
        elif d == w2:
            m += 2 * 3**i
        elif d != 1:
            raise NotCubeMod(a, q)
    x = x * pow(b, (-m) % 3 ** (s - 1), q) % q
    if x * x % q * x % q != a % q:
        raise NotCubeMod(a, q)
    return int(x)


def cube_roots_mod_prime(a: int, q: int) -> list[int]:
    """All cube roots of a mod prime q, ascending; NotCubeMod if none."""
    a %= q
    if a == 0:
        return [0]
    if q == 3:
        return [a % 3]
    if q % 3 == 2:
        # cubing is a bijection; the inverse exponent is (2q-1)/3
        return [int(pow(a, (2 * q - 1) // 3, q))]
    if pow(a, (q - 1) // 3, q) != 1:
        raise NotCubeMod(a, q)
    root = _amm_cube_root(a, q)
    w = zeta3_mod(q)
    return sorted({root, root * w % q, root * w % q * w % q})


def cube_root_mod(
    a: int,
    m: int,
    factorization: Optional[Factorization] = None,
    budget: int = 4_000_000,
) -> int:
    """Smallest c >= 0 with c**3 = a (mod m), m squarefree.

    Per-prime roots are combined by CRT over every root choice at primes
    q = 1 mod 3; raises NotCubeMod(q) when a is a non-cube mod some q | m
    with q not dividing a (local insolubility certificate).
    """
    if m < 1:
        raise ValueError("modulus must be positive")
    if m == 1:
        return 0
    fac = factorization or factor(m, budget=budget)
    if fac.value != m:
        raise ValueError("factorization does not match modulus")
    if any(e != 1 for _, e in fac):
        raise ValueError("modulus must be squarefree")
    primes = fac.primes()
    root_sets = [cube_roots_mod_prime(a, q) for q in primes]
    best: Optional[int] = None
    idx = [0] * len(primes)
    while True:
        c = crt([rs[i] for rs, i in zip(root_sets, idx)], primes)
        if best is None or c < best:
            best = c
        j = 0
        while j < len(idx):
            idx[j] += 1
            if idx[j] < len(root_sets[j]):
                break
            idx[j] = 0
            j += 1
        if j == len(idx):
            break
    assert best is not None and pow(best, 3, m) == a % m
    return best


def is_cube_rational(x: Fraction) -> tuple[bool, Fraction]:
    """Exact: is x a rational cube?  Returns (flag, cube root or 0)."""
    if x == 0:
        return True, Fraction(0)
    sign = -1 if x < 0 else 1
    num, den = abs(x.numerator), x.denominator
    rn, okn = gmpy2.iroot(gmpy2.mpz(num), 3)
    rd, okd = gmpy2.iroot(gmpy2.mpz(den), 3)
    if okn and okd:
        return True, Fraction(sign * int(rn), int(rd))
    return False, Fraction(0)


def valuation(x: Fraction, p: int) -> int:
    """p-adic valuation of a nonzero rational."""
    if x == 0:
        raise ValueError("valuation of zero")
    x = Fraction(x)
    v = 0
    num = abs(x.numerator)
    while num % p == 0:
        num //= p
        v += 1
    den = x.denominator
    while den % p == 0:
        den //= p
        v -= 1
    return v
