"""Bounded-precision p-adic arithmetic and the cubic Hilbert symbol.

Three regimes, keyed by p mod 3:
  * split (p = 1 mod 3): zeta3 lives in Q_p via a designated root, all
    work happens in Q_p itself;
  * inert (p = 2 mod 3): Q_p(zeta3) is the unramified quadratic, stored
    as pairs x + y*zeta3;
  * ramified (p = 3): Q_3(zeta3) with lambda = 1 - zeta3 as uniformiser,
    cube classes over the basis (lambda, eta1, eta2, eta3), eta_i = 1 -
    lambda^i, and the symbol given by a fixed 4x4 table.

Completions of M = Q(zeta3, cbrt n) are either the base field U (when
cbrt n exists there) or the cubic extension U[T]/(T^3 - n); the latter
supports exact valuations, residue characters, and descent of cube
classes to U.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence, Union

from . import arith
from .errors import (
    InsufficientPrecision,
    NoLift,
    NotUnit,
    PrecisionLoss,
    SearchExhausted,
    UnsupportedLocalField,
)
from .tower import TowerElement

# Hilbert symbol exponent table at p = 3 over the basis
# (lambda, eta1, eta2, eta3); entry [i][j] is the exponent of zeta3 in
# (basis_i, basis_j)_3.
P3_TABLE = (
    (0, 0, 0, 2),
    (0, 0, 1, 0),
    (0, 2, 0, 0),
    (1, 0, 0, 0),
)

P3_BASIS_NAMES = ("lambda", "eta1", "eta2", "eta3")


@dataclass(frozen=True)
class PadicNumber:
    """p^v * u with u a unit known modulo p^k (relative precision k digits)."""

    p: int
    v: int
    u: int
    k: int

    @classmethod
    def zero(cls, p: int, k: int) -> "PadicNumber":
        return cls(p, 0, 0, k)

    @property
    def is_zero(self) -> bool:
        return self.u == 0

    @classmethod
    def from_rational(cls, p: int, x, k: int) -> "PadicNumber":
        x = Fraction(x)
        if x == 0:
            return cls.zero(p, k)
        v = arith.valuation(x, p)
        num, den = x.numerator, x.denominator
        num //= p ** max(v, 0) if v > 0 else 1
        if v < 0:
            den //= p ** (-v)
        mod = p**k
        u = num * pow(den, -1, mod) % mod
        return cls(p, v, u, k)

    def _check(self, other: "PadicNumber"):
        if self.p != other.p:
            raise ValueError("mixed primes")

    def mul(self, other: "PadicNumber") -> "PadicNumber":
        self._check(other)
        k = min(self.k, other.k)
        if self.is_zero or other.is_zero:
            return PadicNumber.zero(self.p, k)
        return PadicNumber(
            self.p, self.v + other.v, self.u * other.u % self.p**k, k
        )

    def inv(self) -> "PadicNumber":
        if self.is_zero:
            raise ZeroDivisionError("inverse of p-adic zero")
        mod = self.p**self.k
        return PadicNumber(self.p, -self.v, pow(self.u, -1, mod), self.k)

    def div(self, other: "PadicNumber") -> "PadicNumber":
        return self.mul(other.inv())

    def add(self, other: "PadicNumber") -> "PadicNumber":
        self._check(other)
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        v = min(self.v, other.v)
        k = min(self.k + self.v, other.k + other.v) - v  # absolute precision
        if k <= 0:
            raise InsufficientPrecision("addition lost all precision")
        mod = self.p**k
        s = (
            self.u * self.p ** (self.v - v) + other.u * self.p ** (other.v - v)
        ) % mod
        if s == 0:
            # indistinguishable from zero at this precision
            return PadicNumber.zero(self.p, k)
        shift = 0
        while s % self.p == 0:
            s //= self.p
            shift += 1
        return PadicNumber(self.p, v + shift, s, k - shift)

    def neg(self) -> "PadicNumber":
        if self.is_zero:
            return self
        return PadicNumber(self.p, self.v, (-self.u) % self.p**self.k, self.k)

    def pow(self, e: int) -> "PadicNumber":
        out = PadicNumber(self.p, 0, 1, self.k)
        base = self if e >= 0 else self.inv()
        e = abs(e)
        while e:
            if e & 1:
                out = out.mul(base)
            base = base.mul(base)
            e >>= 1
        return out

    def residue(self) -> int:
        """Unit residue mod p; requires a unit (v may be any integer)."""
        if self.is_zero:
            raise NotUnit("zero has no unit residue")
        return self.u % self.p

    def lift(self, digits: Optional[int] = None) -> Fraction:
        """A rational representative p^v * (u mod p^digits)."""
        d = self.k if digits is None else min(digits, self.k)
        return Fraction(self.u % self.p**d) * Fraction(self.p) ** self.v

    def __str__(self):
        if self.is_zero:
            return f"O({self.p}^{self.k})"
        return f"{self.p}^{self.v}*({self.u} + O({self.p}^{self.k}))"


def hensel_root(
    coeffs: Sequence[int], p: int, seed: int, precision: int
) -> PadicNumber:
    """Root of the integer polynomial near seed, to the given precision.

    coeffs are ascending (c0 + c1 x + ...).  Requires the Newton
    condition v(f(seed)) > 2 v(f'(seed)); raises NoLift otherwise.
    """

    def poly(x, mod):
        acc = 0
        for c in reversed(coeffs):
            acc = (acc * x + c) % mod
        return acc

    def dpoly(x, mod):
        acc = 0
        n = len(coeffs) - 1
        for i, c in enumerate(reversed(coeffs[1:])):
            acc = (acc * x + (n - i) * c) % mod
        return acc

    probe = p ** (precision + 8)
    fs = poly(seed, probe)
    dfs = dpoly(seed, probe)
    m = 0
    d = dfs
    while d and d % p == 0:
        d //= p
        m += 1
    vf = 0
    f0 = fs
    while f0 and f0 % p == 0:
        f0 //= p
        vf += 1
    if fs != 0 and vf <= 2 * m:
        raise NoLift(f"Newton condition fails at seed {seed} (v(f)={vf}, v(f')={m})")
    work = precision + 2 * m + 4
    mod = p**work
    x = seed % mod
    for _ in range(work.bit_length() + 4):
        fx = poly(x, mod)
        if fx == 0:
            break
        dfx = dpoly(x, mod)
        t = dfx // p**m
        step = (fx // p**m) * pow(t, -1, mod) % mod
        x = (x - step) % mod
    if poly(x, p**precision) % p**precision != 0:
        raise NoLift("Newton iteration failed to converge")
    return PadicNumber.from_rational(p, x % p**precision, precision)


def padic_sqrt(x: PadicNumber) -> Optional[PadicNumber]:
    """A square root in Q_p, or None; exact-zero maps to zero."""
    if x.is_zero:
        return x
    if x.v % 2:
        return None
    p, u, k = x.p, x.u, x.k
    if p == 2:
        if k < 3:
            raise InsufficientPrecision("need 3 digits for 2-adic squares")
        if u % 8 != 1:
            return None
        # lift mod 2^k by Newton from seed 1 (v(f') = 1)
        mod = 2 ** (k + 2)
        r = 1
        for _ in range(k + 4):
            fr = (r * r - u) % mod
            if fr == 0:
                break
            r = (r - (fr // 2) * pow(r, -1, mod)) % mod
        if (r * r - u) % 2**k:
            return None
        return PadicNumber(2, x.v // 2, r % 2**k, k)
    if pow(u, (p - 1) // 2, p) != 1:
        return None
    # Tonelli-Shanks mod p, then Newton lift
    r = _sqrt_mod_p(u % p, p)
    mod = p**k
    for _ in range(k.bit_length() + 3):
        fr = (r * r - u) % mod
        if fr == 0:
            break
        r = (r - fr * pow(2 * r, -1, mod)) % mod
    if (r * r - u) % mod:
        return None
    return PadicNumber(p, x.v // 2, r, k)


def _sqrt_mod_p(a: int, p: int) -> int:
    if p % 4 == 3:
        return pow(a, (p + 1) // 4, p)
    # Tonelli-Shanks with deterministic non-residue search
    q, s = p - 1, 0
    while q % 2 == 0:
        q //= 2
        s += 1
    for z in range(2, p):
        if pow(z, (p - 1) // 2, p) == p - 1:
            break
    m, c, t, r = s, pow(z, q, p), pow(a, q, p), pow(a, (q + 1) // 2, p)
    while t != 1:
        t2, i = t, 0
        while t2 != 1:
            t2 = t2 * t2 % p
            i += 1
        b = pow(c, 1 << (m - i - 1), p)
        m, c = i, b * b % p
        t, r = t * c % p, r * b % p
    return r


@dataclass(frozen=True)
class EisensteinLocal:
    """p^v * (a + b*zeta3), components modulo p^k, (a, b) a unit pair.

    Used for the unramified quadratic (p = 2 mod 3) and for the ramified
    Q_3(zeta3); in the latter case the lambda-adic valuation is tracked
    separately by the context.
    """

    p: int
    v: int
    a: int
    b: int
    k: int

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    @classmethod
    def zero(cls, p: int, k: int) -> "EisensteinLocal":
        return cls(p, 0, 0, 0, k)

    @classmethod
    def make(cls, p: int, a, b, k: int) -> "EisensteinLocal":
        """From rational components a + b*zeta3, normalised."""
        a, b = Fraction(a), Fraction(b)
        if a == 0 and b == 0:
            return cls.zero(p, k)
        v = min(
            arith.valuation(a, p) if a else 10**9,
            arith.valuation(b, p) if b else 10**9,
        )
        mod = p**k
        sa = _rat_mod(a / Fraction(p) ** v, mod)
        sb = _rat_mod(b / Fraction(p) ** v, mod)
        return cls(p, v, sa, sb, k)

    def mul(self, other: "EisensteinLocal") -> "EisensteinLocal":
        if self.p != other.p:
            raise ValueError("mixed primes")
        k = min(self.k, other.k)
        if self.is_zero or other.is_zero:
            return EisensteinLocal.zero(self.p, k)
        mod = self.p**k
        a = (self.a * other.a - self.b * other.b) % mod
        b = (self.a * other.b + self.b * other.a - self.b * other.b) % mod
        out = EisensteinLocal(self.p, self.v + other.v, a, b, k)
        return out._normalise()

    def _normalise(self) -> "EisensteinLocal":
        a, b, v, k = self.a, self.b, self.v, self.k
        if a == 0 and b == 0:
            return EisensteinLocal.zero(self.p, k)
        while k > 0 and a % self.p == 0 and b % self.p == 0:
            a //= self.p
            b //= self.p
            v += 1
            k -= 1
        if k == 0:
            raise InsufficientPrecision("component precision exhausted")
        return EisensteinLocal(self.p, v, a % self.p**k, b % self.p**k, k)

    def conj(self) -> "EisensteinLocal":
        # zeta3 -> zeta3^2 = -1 - zeta3
        mod = self.p**self.k
        return EisensteinLocal(
            self.p, self.v, (self.a - self.b) % mod, (-self.b) % mod, self.k
        )

    def norm_q(self) -> PadicNumber:
        """Norm to Q_p: a^2 - a b + b^2 at the stored valuation."""
        mod = self.p**self.k
        n = (self.a * self.a - self.a * self.b + self.b * self.b) % mod
        if n == 0:
            raise InsufficientPrecision("norm vanished at working precision")
        v2 = 2 * self.v
        while n % self.p == 0:
            n //= self.p
            v2 += 1
        return PadicNumber(self.p, v2, n, self.k)

    def inv(self) -> "EisensteinLocal":
        if self.is_zero:
            raise ZeroDivisionError("inverse of zero")
        nq = self.norm_q()
        c = self.conj()
        mod = self.p**self.k
        ninv = pow(nq.u, -1, mod)
        out = EisensteinLocal(
            self.p,
            c.v - nq.v,
            c.a * ninv % mod,
            c.b * ninv % mod,
            min(self.k, nq.k),
        )
        return out._normalise()

    def div(self, other: "EisensteinLocal") -> "EisensteinLocal":
        return self.mul(other.inv())

    def add(self, other: "EisensteinLocal") -> "EisensteinLocal":
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        v = min(self.v, other.v)
        k = min(self.k + self.v, other.k + other.v) - v
        if k <= 0:
            raise InsufficientPrecision("addition lost all precision")
        mod = self.p**k
        sh1 = self.p ** (self.v - v)
        sh2 = self.p ** (other.v - v)
        a = (self.a * sh1 + other.a * sh2) % mod
        b = (self.b * sh1 + other.b * sh2) % mod
        if a == 0 and b == 0:
            return EisensteinLocal.zero(self.p, k)
        return EisensteinLocal(self.p, v, a, b, k)._normalise()

    def neg(self) -> "EisensteinLocal":
        mod = self.p**self.k
        return EisensteinLocal(
            self.p, self.v, (-self.a) % mod, (-self.b) % mod, self.k
        )

    def pow(self, e: int) -> "EisensteinLocal":
        out = EisensteinLocal(self.p, 0, 1, 0, self.k)
        base = self if e >= 0 else self.inv()
        e = abs(e)
        while e:
            if e & 1:
                out = out.mul(base)
            base = base.mul(base)
            e >>= 1
        return out

    def __str__(self):
        return f"{self.p}^{self.v}*(({self.a}) + ({self.b})z + O({self.p}^{self.k}))"


def _rat_mod(x: Fraction, mod: int) -> int:
    return x.numerator * pow(x.denominator, -1, mod) % mod


@dataclass(frozen=True)
class LocalCubeClass:
    """Class in U^x/(U^x)^3: tame (v mod 3, character); p = 3: 4-vector."""

    regime: str  # "split" | "inert" | "ramified"
    p: int
    vector: tuple[int, ...]

    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.vector)

    def mul(self, other: "LocalCubeClass") -> "LocalCubeClass":
        if (self.regime, self.p) != (other.regime, other.p):
            raise ValueError("mixed class groups")
        return LocalCubeClass(
            self.regime,
            self.p,
            tuple((x + y) % 3 for x, y in zip(self.vector, other.vector)),
        )

    def inv(self) -> "LocalCubeClass":
        return LocalCubeClass(
            self.regime, self.p, tuple((-x) % 3 for x in self.vector)
        )


def cubic_character(a: int, q: int, zeta_residue: int) -> int:
    """Exponent e with a^((q-1)/3) = zeta_residue^e in F_q (prime q)."""
    if q % 3 != 1:
        raise ValueError("residue field size must be 1 mod 3")
    a %= q
    if a == 0:
        raise NotUnit("character of a non-unit")
    val = pow(a, (q - 1) // 3, q)
    for e in range(3):
        if val == pow(zeta_residue, e, q):
            return e
    raise ValueError("zeta_residue is not a primitive cube root of unity")


# ---------------------------------------------------------------------------
# F_{p^2} helpers for the inert regime (represented as x + y*z, z^2 = -1-z).


def _fq2_mul(x, y, p):
    a, b = x
    c, d = y
    return ((a * c - b * d) % p, (a * d + b * c - b * d) % p)


def _fq2_pow(x, e, p):
    out = (1, 0)
    base = x
    while e:
        if e & 1:
            out = _fq2_mul(out, base, p)
        base = _fq2_mul(base, base, p)
        e >>= 1
    return out


def _fq2_char(x, p) -> int:
    """Exponent of the cubic character of x in F_{p^2}, base zeta3 = (0,1)."""
    val = _fq2_pow(x, (p * p - 1) // 3, p)
    if val == (1, 0):
        return 0
    if val == (0, 1):
        return 1
    if val == ((-1) % p, (-1) % p):
        return 2
    raise NotUnit("element is not a unit in F_p^2")


# ---------------------------------------------------------------------------
# Base contexts: U = Q_p (split) or Q_p(zeta3) (inert / ramified).


class LocalContext:
    """Arithmetic context for U = Q_p(zeta3) at one prime.

    regime: "split" (zeta3 in Q_p via a designated root), "inert"
    (unramified quadratic) or "ramified" (p = 3).  All cube classes and
    symbols at this prime go through one context so the designated root
    is used consistently.
    """

    def __init__(self, p: int, precision: Optional[int] = None, zeta_seed: Optional[int] = None):
        self.p = p
        if p == 3:
            self.regime = "ramified"
            self.precision = precision or 14
        elif p % 3 == 1:
            self.regime = "split"
            self.precision = precision or 10
        else:
            self.regime = "inert"
            self.precision = precision or 10
        if self.regime == "split":
            seed = zeta_seed if zeta_seed is not None else arith.zeta3_mod(p)
            self.zeta_root = hensel_root([1, 1, 1], p, seed, self.precision)
            self.zeta_residue = self.zeta_root.u % p
        else:
            if zeta_seed is not None:
                raise ValueError("zeta seed only applies to split primes")

    def degree(self) -> int:
        return 1 if self.regime == "split" else 2

    # -- elements -----------------------------------------------------
    def from_rational(self, x):
        if self.regime == "split":
            return PadicNumber.from_rational(self.p, x, self.precision)
        return EisensteinLocal.make(self.p, x, 0, self.precision)

    def embed_l1(self, x, y):
        """Image of x + y*zeta3 with rational x, y."""
        if self.regime == "split":
            xx = PadicNumber.from_rational(self.p, x, self.precision)
            yy = PadicNumber.from_rational(self.p, y, self.precision)
            return xx.add(yy.mul(self.zeta_root))
        return EisensteinLocal.make(self.p, x, y, self.precision)

    def one(self):
        return self.from_rational(1)

    def lam(self) -> EisensteinLocal:
        if self.regime != "ramified":
            raise UnsupportedLocalField("lambda lives at p = 3")
        return EisensteinLocal.make(3, 1, -1, self.precision)

    def eta(self, i: int) -> EisensteinLocal:
        lam = self.lam()
        one = self.from_rational(1)
        return one.add(lam.pow(i).neg())

    # -- lambda-adic valuation at p = 3 ---------------------------------
    def lambda_val(self, x: EisensteinLocal) -> int:
        if self.regime != "ramified":
            raise UnsupportedLocalField("lambda valuation needs p = 3")
        if x.is_zero:
            raise InsufficientPrecision("lambda valuation of (approximate) zero")
        # v_lambda = v_3(norm); component valuation v contributes 2v
        n = (x.a * x.a - x.a * x.b + x.b * x.b) % 3 ** x.k
        if n == 0:
            raise InsufficientPrecision("norm vanished at working precision")
        v = 2 * x.v
        while n % 3 == 0:
            n //= 3
            v += 1
        return v

    def valuation(self, x) -> int:
        if self.regime == "ramified":
            return self.lambda_val(x)
        if x.is_zero:
            raise InsufficientPrecision("valuation of (approximate) zero")
        return x.v

    # -- cube classes ----------------------------------------------------
    def cube_class(self, x) -> LocalCubeClass:
        if self.regime == "split":
            if not isinstance(x, PadicNumber):
                x = self.from_rational(x)
            if x.is_zero:
                raise InsufficientPrecision("cube class of zero")
            if x.k < 1:
                raise InsufficientPrecision("need at least one digit")
            e = cubic_character(x.residue(), self.p, self.zeta_residue)
            return LocalCubeClass("split", self.p, (x.v % 3, e))
        if self.regime == "inert":
            if not isinstance(x, EisensteinLocal):
                x = self.from_rational(x)
            if x.is_zero:
                raise InsufficientPrecision("cube class of zero")
            e = _fq2_char((x.a % self.p, x.b % self.p), self.p)
            return LocalCubeClass("inert", self.p, (x.v % 3, e))
        return self._cube_class_ramified(x)

    def _lambda_unit(self, x: EisensteinLocal) -> EisensteinLocal:
        """x / lambda^{v_lambda(x)}, a lambda-unit."""
        v = self.lambda_val(x)
        lam = self.lam()
        out = x
        if v > 0:
            out = x.mul(lam.inv().pow(v))
        elif v < 0:
            out = x.mul(lam.pow(-v))
        return out

    @staticmethod
    def _canon_mod_lambda5(a: int, b: int) -> tuple[int, int]:
        """Canonical representative of (a + b z) modulo lambda^5."""
        best = None
        for t in range(3):
            cand = ((a + 9 * t) % 27, (b + 18 * t) % 27)
            if best is None or cand < best:
                best = cand
        return best

    _CUBES_L5: Optional[frozenset] = None
    _ETA_PRODUCTS: Optional[dict] = None

    @classmethod
    def _cube_table(cls):
        if cls._CUBES_L5 is None:
            cubes = set()
            for a in range(27):
                for b in range(27):
                    if (a + b) % 3 == 0:
                        continue  # not a lambda-unit
                    # cube (a + b z) with z^2 = -1 - z, mod 27 components
                    x, y = a, b
                    # square
                    sa = (x * x - y * y) % 27
                    sb = (2 * x * y - y * y) % 27
                    ca = (sa * x - sb * y) % 27
                    cb = (sa * y + sb * x - sb * y) % 27
                    cubes.add(cls._canon_mod_lambda5(ca, cb))
            cls._CUBES_L5 = frozenset(cubes)
        return cls._CUBES_L5

    def _cube_class_ramified(self, x) -> LocalCubeClass:
        if not isinstance(x, EisensteinLocal):
            x = self.from_rational(x)
        if x.is_zero:
            raise InsufficientPrecision("cube class of zero")
        v = self.lambda_val(x)
        unit = self._lambda_unit(x)
        if unit.k < 3:
            raise InsufficientPrecision("need lambda-precision 5 for cube classes")
        e0 = v % 3
        # search (e1, e2, e3) with unit / eta products a cube mod lambda^5
        mod = 27
        shift = 3**unit.v  # unit.v can be 0 only; keep defensive
        ua, ub = unit.a * shift % mod, unit.b * shift % mod
        etas = [
            (0, 1),  # eta1 = zeta3
            (1, 3),  # eta2 = 1 + 3 zeta3
            (4, 6),  # eta3 = 1 + 3 + 6 zeta3
        ]
        cubes = self._cube_table()
        for e1 in range(3):
            for e2 in range(3):
                for e3 in range(3):
                    pa, pb = 1, 0
                    for (ga, gb), e in zip(etas, (e1, e2, e3)):
                        for _ in range(e):
                            pa, pb = (
                                (pa * ga - pb * gb) % mod,
                                (pa * gb + pb * ga - pb * gb) % mod,
                            )
                    # q = unit / (eta product): multiply by inverse
                    nrm = (pa * pa - pa * pb + pb * pb) % mod
                    ninv = pow(nrm, -1, mod)
                    ca_, cb_ = (pa - pb) % mod, (-pb) % mod  # conjugate
                    qa = (ua * ca_ - ub * cb_) % mod
                    qb = (ua * cb_ + ub * ca_ - ub * cb_) % mod
                    qa, qb = qa * ninv % mod, qb * ninv % mod
                    if self._canon_mod_lambda5(qa, qb) in cubes:
                        return LocalCubeClass(
                            "ramified", 3, (e0, e1, e2, e3)
                        )
        raise InsufficientPrecision("ramified cube class decomposition failed")

    # -- the symbol -------------------------------------------------------
    def symbol_classes(self, cx: LocalCubeClass, cy: LocalCubeClass) -> int:
        if cx.regime != cy.regime or cx.p != cy.p:
            raise ValueError("classes from different contexts")
        if self.regime == "ramified":
            s = 0
            for i in range(4):
                for j in range(4):
                    s += cx.vector[i] * cy.vector[j] * P3_TABLE[i][j]
            return s % 3
        m, a = cx.vector
        n, b = cy.vector
        return (n * a - m * b) % 3

    def symbol(self, x, y) -> int:
        """Exponent e with (x, y)_U = zeta3^e."""
        return self.symbol_classes(self.cube_class(x), self.cube_class(y))


def hilbert_symbol(p: int, x, y, context: Optional[LocalContext] = None) -> int:
    """Cubic Hilbert symbol exponent over Q_p(zeta3).

    x and y may be rationals, PadicNumbers, EisensteinLocals, or cube
    classes.  For split p the designated zeta3 root comes from the
    context (smallest root by default).
    """
    ctx = context or LocalContext(p)
    cx = x if isinstance(x, LocalCubeClass) else ctx.cube_class(x)
    cy = y if isinstance(y, LocalCubeClass) else ctx.cube_class(y)
    return ctx.symbol_classes(cx, cy)


def p3_basis_class(name: str) -> LocalCubeClass:
    """The class of a basis element lambda/eta1/eta2/eta3 at p = 3."""
    idx = P3_BASIS_NAMES.index(name)
    vec = [0, 0, 0, 0]
    vec[idx] = 1
    return LocalCubeClass("ramified", 3, tuple(vec))


# ---------------------------------------------------------------------------
# Completions of M = Q(zeta3, cbrt n) above the base context.


class MCompletion:
    """One completion of M over the base context U.

    Shape "degree1" when cbrt(n) exists in U (theta maps to a base
    element); shape "cubic" for the field extension U[T]/(T^3 - n),
    ramified or unramified.  Provides embedding of tower elements,
    valuations, cube testing, and descent of classes to U.
    """

    def __init__(self, ctx: LocalContext, n: int, theta_seed: Optional[int] = None):
        self.ctx = ctx
        self.n = n
        p = ctx.p
        vn = 0
        m = n
        while m % p == 0:
            m //= p
            vn += 1
        self.vn = vn
        self.n_unit = m
        if ctx.regime == "ramified":
            if vn % 3 != 0 or (m % 9) not in (1, 8):
                raise UnsupportedLocalField(
                    "cbrt(n) outside Q_3: wild cubic extensions unsupported"
                )
            seed = next(
                s for s in range(27) if s % 3 and (s**3 - m) % 27 == 0
            )
            root = hensel_root([-m, 0, 0, 1], 3, seed, ctx.precision)
            seed_val = root.lift() * Fraction(p) ** (vn // 3)
            self.shape = "degree1"
            self.theta_image = ctx.from_rational(seed_val)
            return
        if vn % 3 == 0:
            unit_is_cube = (
                ctx.regime == "inert"
                or pow(m % p, (p - 1) // 3, p) == 1
            )
            if unit_is_cube:
                self.shape = "degree1"
                seed = theta_seed
                if seed is None:
                    seed = arith.cube_roots_mod_prime(m % p, p)[0]
                root = hensel_root(
                    [-m, 0, 0, 1], p, seed, ctx.precision
                )
                val = root.lift() * Fraction(p) ** (vn // 3)
                if ctx.regime == "split":
                    self.theta_image = PadicNumber.from_rational(
                        p, val, ctx.precision
                    )
                else:
                    self.theta_image = EisensteinLocal.make(
                        p, val, 0, ctx.precision
                    )
                return
            self.shape = "cubic"
            self.ramified = False
        else:
            self.shape = "cubic"
            self.ramified = True

    # -- arithmetic on triples over the base --------------------------
    def _tri_mul(self, x, y):
        n = self.n
        nn = self.ctx.from_rational(n)
        a0, a1, a2 = x
        b0, b1, b2 = y
        c0 = a0.mul(b0).add(nn.mul(a1.mul(b2).add(a2.mul(b1))))
        c1 = a0.mul(b1).add(a1.mul(b0)).add(nn.mul(a2.mul(b2)))
        c2 = a0.mul(b2).add(a2.mul(b0)).add(a1.mul(b1))
        return (c0, c1, c2)

    def embed(self, e: TowerElement):
        """Image of a tower element in this completion."""
        if e.tower.n != self.n:
            raise ValueError("tower radicand mismatch")
        pairs = [
            (e.coords[i], e.coords[i + 3]) for i in range(3)
        ]  # theta^i coefficient as (x, y) with x + y zeta3
        base = [self.ctx.embed_l1(x, y) for x, y in pairs]
        if self.shape == "degree1":
            th = self.theta_image
            out = base[0]
            out = out.add(base[1].mul(th))
            out = out.add(base[2].mul(th).mul(th))
            return out
        return tuple(base)

    def one(self):
        if self.shape == "degree1":
            return self.ctx.one()
        z = self.ctx.from_rational(0)
        return (self.ctx.one(), z, z)

    def from_base(self, s):
        """A base-field element viewed in the completion."""
        if self.shape == "degree1":
            return s
        z = self.ctx.from_rational(0)
        return (s, z, z)

    def mul(self, x, y):
        if self.shape == "degree1":
            return x.mul(y)
        return self._tri_mul(x, y)

    def add(self, x, y):
        if self.shape == "degree1":
            return x.add(y)
        return tuple(a.add(b) for a, b in zip(x, y))

    def sub(self, x, y):
        if self.shape == "degree1":
            return x.add(y.neg())
        return tuple(a.add(b.neg()) for a, b in zip(x, y))

    def pow(self, x, e: int):
        out = self.one()
        base = x
        if e < 0:
            raise ValueError("negative powers not supported on triples")
        while e:
            if e & 1:
                out = self.mul(out, base)
            base = self.mul(base, base)
            e >>= 1
        return out

    # -- valuation and cube classes in the cubic shapes -----------------
    def _component_vals(self, x) -> list[tuple[int, int]]:
        """(valuation of coefficient i in U, i) for nonzero coefficients."""
        out = []
        for i, c in enumerate(x):
            if not c.is_zero:
                out.append((self.ctx.valuation(c), i))
        if not out:
            raise InsufficientPrecision("triple indistinguishable from zero")
        return out

    def w_valuation(self, x) -> int:
        """Valuation in the completion, normalised to the residue field of U.

        degree1: the U-valuation.  Unramified cubic: min of component
        valuations.  Ramified cubic: min over 3*v_U(a_i) + i*v_U(n),
        which the coprimality of v_U(n) and 3 makes uniquely attained.
        """
        if self.shape == "degree1":
            return self.ctx.valuation(x)
        vals = self._component_vals(x)
        if not self.ramified:
            return min(v for v, _ in vals)
        return min(3 * v + i * self.vn for v, i in vals)

    def residue_char_unit(self, x) -> int:
        """Cubic character of the residue of a w-unit element."""
        if self.shape == "degree1":
            cls = self.ctx.cube_class(x)
            return cls.vector[1] if cls.vector[0] == 0 else None
        if self.ramified:
            # unit triple: minimal term is the constant coefficient
            c0 = x[0]
            if self.ctx.valuation(c0) != 0:
                raise InsufficientPrecision("unit triple without unit constant term")
            if self.ctx.regime == "split":
                return cubic_character(
                    c0.residue(), self.ctx.p, self.ctx.zeta_residue
                )
            return _fq2_char((c0.a % self.ctx.p, c0.b % self.ctx.p), self.ctx.p)
        # unramified cubic: residue field F_{p^3} = F_p[t]/(t^3 - n)
        p = self.ctx.p
        res = tuple(c.u % p if not c.is_zero and c.v == 0 else 0 for c in x)
        return self._fq3_char(res)

    def _fq3_char(self, x: tuple[int, int, int]) -> int:
        p = self.ctx.p
        nn = self.n_unit % p

        def mul3(u, v):
            c0 = (u[0] * v[0] + nn * (u[1] * v[2] + u[2] * v[1])) % p
            c1 = (u[0] * v[1] + u[1] * v[0] + nn * u[2] * v[2]) % p
            c2 = (u[0] * v[2] + u[2] * v[0] + u[1] * v[1]) % p
            return (c0, c1, c2)

        out, base = (1, 0, 0), x
        e = (p**3 - 1) // 3
        while e:
            if e & 1:
                out = mul3(out, base)
            base = mul3(base, base)
            e >>= 1
        if out == (1, 0, 0):
            return 0
        zr = self.ctx.zeta_residue  # split regime only reaches here
        if out == (zr % p, 0, 0):
            return 1
        if out == (zr * zr % p, 0, 0):
            return 2
        raise NotUnit("residue is not a unit in F_p^3")

    def is_cube(self, x) -> bool:
        """Cube test in the completion (tame shapes only)."""
        if self.shape == "degree1":
            return self.ctx.cube_class(x).is_trivial()
        w = self.w_valuation(x)
        if w % 3:
            return False
        u = self._clear_uniformiser(x, w)
        return self.residue_char_unit(u) == 0

    def _clear_uniformiser(self, x, w: int):
        """x divided by a fixed element of valuation w."""
        if self.shape == "degree1":
            raise UnsupportedLocalField("not needed in degree 1")
        p = self.ctx.p
        if not self.ramified:
            scale = self.ctx.from_rational(Fraction(p) ** (-w))
            return tuple(c.mul(scale) for c in x)
        # ramified: uniformiser Pi with Pi^3 = unit * p^... built from
        # Theta and p: alpha*vn + 3*beta = w has integer solutions since
        # gcd(vn, 3) = 1; use Theta^alpha * p^beta with alpha in {0,1,2}
        inv2 = {1: 1, 2: 2}[self.vn]  # vn inverse mod 3
        alpha = (w * inv2) % 3
        beta = (w - alpha * self.vn) // 3
        z = self.ctx.from_rational(0)
        theta = (z, self.ctx.one(), z)
        out = x
        if alpha:
            # divide by Theta^alpha: multiply by Theta^(3-alpha)/n
            t_pow = self.pow(theta, 3 - alpha)
            out = self.mul(out, t_pow)
            out = tuple(
                c.mul(self.ctx.from_rational(Fraction(1, self.n))) for c in out
            )
        scale = self.ctx.from_rational(Fraction(1, 1) * Fraction(self.ctx.p) ** (-beta))
        return tuple(c.mul(scale) for c in out)

    # -- descent of classes to U ---------------------------------------
    def descend_class(self, x) -> LocalCubeClass:
        """A class c in U^x/(U^x)^3 whose image equals the class of x.

        In degree 1 this is the class itself.  In the cubic shapes the
        preimage is determined up to the kernel generated by n; the
        lexicographically smallest candidate is returned (any choice
        pairs identically against legitimate Selmer columns).
        """
        if self.shape == "degree1":
            return self.ctx.cube_class(x)
        candidates = []
        for m in range(3):
            for c in range(3):
                candidates.append((m, c))
        base_reps = self._class_representatives()
        for m, c in sorted(candidates):
            rep = base_reps[(m, c)]
            quot = self.mul(x, self.pow(rep, 2))  # x * rep^2 = x / rep mod cubes
            if self.is_cube(quot):
                return LocalCubeClass(self.ctx.regime, self.ctx.p, (m, c))
        raise PrecisionLoss("ratio class is not in the image of the base field")

    def _class_representatives(self) -> dict:
        """Triple representatives of the nine base classes (m, c)."""
        p = self.ctx.p
        if self.ctx.regime == "split":
            for g in range(2, p):
                if pow(g, (p - 1) // 3, p) != 1:
                    break
            unit = self.ctx.from_rational(g)
            # align character exponent: chi(g) may be 1 or 2
            e = cubic_character(g, p, self.ctx.zeta_residue)
            if e == 2:
                unit = self.ctx.from_rational(g * g)
        else:
            cand = None
            for a in range(p):
                for b in range(p):
                    if (a, b) == (0, 0):
                        continue
                    try:
                        if _fq2_char((a, b), p) == 1:
                            cand = (a, b)
                            break
                    except NotUnit:
                        continue
                if cand:
                    break
            unit = EisensteinLocal(p, 0, cand[0], cand[1], self.ctx.precision)
        pp = self.ctx.from_rational(p)
        z = self.ctx.from_rational(0)
        reps = {}
        for m in range(3):
            for c in range(3):
                val = self.ctx.one()
                for _ in range(m):
                    val = val.mul(pp)
                for _ in range(c):
                    val = val.mul(unit)
                reps[(m, c)] = (val, z, z)
        return reps


# ---------------------------------------------------------------------------
# Local points on the curve with prescribed connecting-map class.


def _y_roots(curve_coeffs, x: Fraction, ctx: LocalContext, precision: int):
    """p-adic y with y^2 + (a1 x + a3) y = x^3 + a2 x^2 + a4 x + a6."""
    a1, a2, a3, a4, a6 = curve_coeffs
    p = ctx.p
    bb = a1 * x + a3
    cc = x**3 + a2 * x * x + a4 * x + a6
    # y = (-bb + r)/2 with r^2 = bb^2 + 4 cc
    disc = bb * bb + 4 * cc
    if disc == 0:
        r = PadicNumber.zero(p, precision)
        roots = [r]
    else:
        r = padic_sqrt(PadicNumber.from_rational(p, disc, precision))
        if r is None:
            return []
        roots = [r, r.neg()]
    out = []
    half = PadicNumber.from_rational(p, Fraction(1, 2), precision)
    nb = PadicNumber.from_rational(p, -bb, precision)
    for rr in roots:
        y = nb.add(rr).mul(half)
        out.append(y)
    return out


def find_local_point(
    curve_coeffs,
    ctx: LocalContext,
    tan_s_eval,
    target: LocalCubeClass,
    bound: int = 400,
    precision: Optional[int] = None,
):
    """Point (x, y) in E(Q_p) with tan_S(P) = target modulo cubes.

    x sweeps small integers and small-height fractions of valuation -2;
    y is Hensel-lifted.  tan_s_eval(x: Fraction, y: PadicNumber) must
    return a base element of the context.  Raises SearchExhausted.
    """
    p = ctx.p
    prec = precision or (ctx.precision + 8)
    candidates: list[Fraction] = []
    for m in range(bound):
        x = Fraction(m if m % 2 == 0 else -m, 1)  # 0, -1, 2, -3, ...
        candidates.append(Fraction(m))
        candidates.append(Fraction(-m))
    for u in range(1, min(bound // 4, 3 * p) + 1):
        if u % p:
            candidates.append(Fraction(u, p * p))
            candidates.append(Fraction(-u, p * p))
    seen = set()
    for x in candidates:
        if x in seen:
            continue
        seen.add(x)
        try:
            ys = _y_roots(curve_coeffs, x, ctx, prec)
        except InsufficientPrecision:
            continue
        for y in ys:
            try:
                val = tan_s_eval(x, y)
                cls = ctx.cube_class(val)
            except (InsufficientPrecision, NotUnit, ZeroDivisionError):
                continue
            if cls.vector == target.vector:
                return x, y
    raise SearchExhausted(
        f"no local point with the requested class at p={p} within bound"
    )
