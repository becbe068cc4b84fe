"""Legendre-type descent for cubic norm equations over Q, with exact unwinding.

An instance (a, b) asserts "b is a norm for Q(cbrt(a))/Q".  The descent
repeatedly replaces the instance by a smaller one (cube-free reduction,
swap, a shrink step through a small value of a binary cubic form, or the
shift (a, b) -> (b - a, a^2 b)) until a is 0 or 1, then unwinds the
recorded trace into an explicit field element whose norm is checked
exactly at every step.  No floating point is used anywhere except inside
the cubic-form root isolation.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Sequence

from . import arith
from .cubic_forms import BinaryCubicForm, davenport_search
from .errors import (
    ChainVerificationFailed,
    DegenerateDenominator,
    IncompatibleRadicand,
    IterationCap,
    NotCubeMod,
)

MAX_ITERATIONS = 200


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class PureCubicSolution:
    """x + y*t + z*t^2 with t^3 = radicand, coordinates exact rationals.

    The radicand may be any rational (intermediate unwinding steps pass
    through radicands like -b/a); all identities used are polynomial in
    t modulo t^3 - radicand, so nothing assumes irrationality except
    division, which requires a nonzero norm.
    """

    radicand: Fraction
    coords: tuple[Fraction, Fraction, Fraction]

    @classmethod
    def make(cls, radicand, x, y=0, z=0) -> "PureCubicSolution":
        return cls(_frac(radicand), (_frac(x), _frac(y), _frac(z)))

    def norm(self) -> Fraction:
        x, y, z = self.coords
        r = self.radicand
        return x**3 + r * y**3 + r * r * z**3 - 3 * r * x * y * z

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coords)

    def mul(self, other: "PureCubicSolution") -> "PureCubicSolution":
        if self.radicand != other.radicand:
            raise IncompatibleRadicand("product needs matching radicands")
        r = self.radicand
        x1, y1, z1 = self.coords
        x2, y2, z2 = other.coords
        x = x1 * x2 + r * (y1 * z2 + z1 * y2)
        y = x1 * y2 + y1 * x2 + r * z1 * z2
        z = x1 * z2 + z1 * x2 + y1 * y2
        return PureCubicSolution(r, (x, y, z))

    def scale(self, q) -> "PureCubicSolution":
        q = _frac(q)
        x, y, z = self.coords
        return PureCubicSolution(self.radicand, (x * q, y * q, z * q))

    def inv(self) -> "PureCubicSolution":
        n = self.norm()
        if n == 0:
            raise DegenerateDenominator("inverting an element of norm zero")
        r = self.radicand
        x, y, z = self.coords
        # adjugate: (x + y t + z t^2)(x^2 - r y z + (r z^2 - x y) t + (y^2 - x z) t^2) = N
        ax = x * x - r * y * z
        ay = r * z * z - x * y
        az = y * y - x * z
        return PureCubicSolution(r, (ax / n, ay / n, az / n))

    def div(self, other: "PureCubicSolution") -> "PureCubicSolution":
        return self.mul(other.inv())

    def __str__(self):
        x, y, z = self.coords
        return f"{x} + {y}*t + {z}*t^2  (t^3 = {self.radicand})"


def norm(xi: PureCubicSolution) -> Fraction:
    """Exact norm of an element of Q(cbrt(radicand))."""
    return xi.norm()


def fractional_form(xi: PureCubicSolution) -> tuple[Fraction, Fraction, Fraction, Fraction]:
    """(alpha, beta, gamma, delta) with xi = (alpha + beta t)/(gamma + delta t)."""
    a, b, c = xi.coords
    r = xi.radicand
    if b == 0 and c == 0:
        return a, Fraction(0), Fraction(1), Fraction(0)
    return a * b - c * c * r, b * b - a * c, b, -c


@dataclass(frozen=True)
class SurfacePoint:
    """Primitive integer point (x1:x2:x3:x4) on x1^3 + A x2^3 + B x3^3 + A B x4^3 = 0."""

    coords: tuple[int, int, int, int]
    a: Fraction
    b: Fraction

    def residual(self) -> Fraction:
        x1, x2, x3, x4 = self.coords
        return x1**3 + self.a * x2**3 + self.b * x3**3 + self.a * self.b * x4**3


def to_surface_point(xi: PureCubicSolution) -> SurfacePoint:
    """Point on V_{m,n} from a norm-m element of Q(cbrt(n))."""
    m = xi.norm()
    n = xi.radicand
    al, be, ga, de = fractional_form(xi)
    raw = (al, -ga, be, -de)
    lcm = 1
    for q in raw:
        lcm = lcm * q.denominator // arith_gcd(lcm, q.denominator)
    ints = [int(q * lcm) for q in raw]
    g = 0
    for c in ints:
        g = arith_gcd(g, abs(c))
    if g:
        ints = [c // g for c in ints]
    for c in ints:
        if c != 0:
            if c < 0:
                ints = [-x for x in ints]
            break
    pt = SurfacePoint(tuple(ints), m, n)
    if pt.residual() != 0:
        raise ChainVerificationFailed("surface point residual nonzero")
    return pt


def arith_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


def swap_solution(pt: SurfacePoint) -> PureCubicSolution:
    """Norm-B element of Q(cbrt(A)) from a point on V_{A,B}.

    Raises DegenerateDenominator when the denominator x3 + x4*cbrt(A)
    vanishes, which forces A to be a rational cube.
    """
    x1, x2, x3, x4 = pt.coords
    num = PureCubicSolution.make(pt.a, -x1, -x2, 0)
    den = PureCubicSolution.make(pt.a, x3, x4, 0)
    if den.norm() == 0:
        raise DegenerateDenominator("x3 + x4*cbrt(a) has norm zero (cube radicand)")
    out = num.div(den)
    if out.norm() != pt.b:
        raise ChainVerificationFailed("swapped solution has wrong norm")
    return out


def scale_solution(xi: PureCubicSolution, q) -> PureCubicSolution:
    """q * xi; the norm scales by q^3."""
    q = _frac(q)
    if q == 0:
        raise ValueError("scale factor must be nonzero")
    return xi.scale(q)


def radicand_rebase(xi: PureCubicSolution, target) -> PureCubicSolution:
    """Rewrite xi over cbrt(target) when target = r*q^3 or r^2*q^3.

    The element and its norm are unchanged; only coordinates move.
    """
    target = _frac(target)
    r = xi.radicand
    if r == 0 or target == 0:
        raise IncompatibleRadicand("rebase needs nonzero radicands")
    x, y, z = xi.coords
    ok, q = arith.is_cube_rational(target / r)
    if ok:
        return PureCubicSolution(target, (x, y / q, z / q / q))
    ok, q = arith.is_cube_rational(target / (r * r))
    if ok:
        # cbrt(target) = q * cbrt(r)^2, so t_old = t_new^2/(q^2 r)
        return PureCubicSolution(target, (x, z / q, y / (q * q * r)))
    raise IncompatibleRadicand(f"{target} is not r*q^3 or r^2*q^3 for r={r}")


@dataclass(frozen=True)
class NormInstance:
    """Pair (a, b): 'b is a norm for Q(cbrt(a))/Q'."""

    a: int
    b: int

    def __post_init__(self):
        if self.a < 0 or self.b < 1:
            raise ValueError("instance needs a >= 0 and b >= 1")


@dataclass(frozen=True)
class DescentStep:
    """One instance replacement.  kind is cubefree/swap/shrink/swapshift.

    data: cubefree -> (ag, bg) cube factors removed from a and b;
    shrink and swapshift -> (b1, b2, c, u, v) from the form step.
    """

    kind: str
    before: NormInstance
    after: NormInstance
    data: Optional[tuple] = None


@dataclass(frozen=True)
class DescentTrace:
    start: NormInstance
    steps: tuple[DescentStep, ...]
    terminal: NormInstance

    def __len__(self):
        return len(self.steps)

    def iterations(self) -> int:
        """Form-evaluation iterations (shrink + swapshift steps)."""
        return sum(1 for s in self.steps if s.kind in ("shrink", "swapshift"))

    def instances(self) -> list[NormInstance]:
        out = [self.start]
        for s in self.steps:
            out.append(s.after)
        return out

    def support_integers(self) -> list[int]:
        """Every integer whose prime factors can meet a solution's support."""
        vals = set()
        for inst in self.instances():
            vals.update({inst.a, inst.b})
        for s in self.steps:
            if s.data and s.kind in ("shrink", "swapshift"):
                b1, b2, c, u, v = s.data
                vals.update({b1, b2})
        return sorted(v for v in vals if v > 1)


def _form_step(a: int, b: int, factor_budget: int):
    """Run steps (iii)-(iv): split b, find c, build F, find a small value."""
    b1, b2 = arith.split_square(b, budget=factor_budget)
    c = arith.cube_root_mod(a, b1, factorization=arith.factor(b1, budget=factor_budget))
    form = BinaryCubicForm((c**3 - a) // b1, 3 * c * c, 3 * c * b1, b1 * b1)
    u, v = davenport_search(form)
    if form(u, v) < 0:
        u, v = -u, -v
    fv = form(u, v)
    if fv <= 0 or 23 * fv**4 > 27 * a * a * b1 * b1:
        raise ChainVerificationFailed("form value failed its exact bound")
    return b1, b2, c, u, v, fv


def run_descent(
    inst: NormInstance,
    max_iterations: int = MAX_ITERATIONS,
    factor_budget: int = 8_000_000,
) -> DescentTrace:
    """Descend (a, b) to a terminal instance with a in {0, 1}.

    Raises NotCubeMod on a local insolubility certificate and
    IterationCap if the iteration limit is exceeded.
    """
    steps: list[DescentStep] = []
    a, b = inst.a, inst.b
    for _ in range(max_iterations):
        cur = NormInstance(a, b)
        if a == 0:
            return DescentTrace(inst, tuple(steps), cur)
        af, ag = arith.cube_free_part(a, budget=factor_budget)
        bf, bg = arith.cube_free_part(b, budget=factor_budget)
        if (ag, bg) != (1, 1):
            nxt = NormInstance(af, bf)
            steps.append(DescentStep("cubefree", cur, nxt, (ag, bg)))
            cur, (a, b) = nxt, (af, bf)
        if a > b:
            nxt = NormInstance(b, a)
            steps.append(DescentStep("swap", cur, nxt))
            cur, (a, b) = nxt, (b, a)
        if a in (0, 1):
            return DescentTrace(inst, tuple(steps), cur)
        b1, b2, c, u, v, fv = _form_step(a, b, factor_budget)
        if 4 * b2 * fv < 3 * b:
            nxt = NormInstance(a, b2 * fv)
            steps.append(DescentStep("shrink", cur, nxt, (b1, b2, c, u, v)))
        else:
            nxt = NormInstance(b - a, a * a * b)
            steps.append(DescentStep("swapshift", cur, nxt, (b1, b2, c, u, v)))
        a, b = nxt.a, nxt.b
    raise IterationCap(f"descent on {inst} exceeded {max_iterations} iterations")


def _terminal_solution(term: NormInstance) -> PureCubicSolution:
    if term.a == 1:
        b = Fraction(term.b)
        # (x - y)^2 (x + 2y) with x - y = 1, x + 2y = b
        return PureCubicSolution.make(1, (b + 2) / 3, (b - 1) / 3, (b - 1) / 3)
    if term.a == 0:
        ok, r = arith.is_cube_rational(Fraction(term.b))
        if not ok:
            raise ChainVerificationFailed("terminal (0, b) with b not a cube")
        return PureCubicSolution.make(0, r, 0, 0)
    raise ChainVerificationFailed("trace does not end at a in {0, 1}")


def shift_unwind(eta: Optional[PureCubicSolution], inst: NormInstance) -> PureCubicSolution:
    """Solution of (a, b) from a solution of (b - a, a^2 b).

    When b - a is a rational cube r^3 the answer is direct: r + cbrt(a)
    has norm r^3 + a = b.  Otherwise the constructive chain scales to
    norm -b/a, swaps onto Q(cbrt(-b/a)), divides by 1 + t (norm -s/a),
    swaps back onto Q(cbrt(a)) and multiplies by -cbrt(a).  Every link
    is norm-checked.
    """
    a, b = inst.a, inst.b
    if a in (0, 1) or not (0 < a <= b):
        raise ChainVerificationFailed("shift unwind needs 2 <= a <= b")
    s = b - a
    ok, r = arith.is_cube_rational(Fraction(s))
    if ok:
        out = PureCubicSolution.make(a, r, 1, 0)
        if out.norm() != b:
            raise ChainVerificationFailed("direct shift solution failed")
        return out
    if eta is None:
        raise ChainVerificationFailed("shift unwind needs the inner solution")
    if eta.radicand != s or eta.norm() != a * a * b:
        raise ChainVerificationFailed("inner solution does not match (b-a, a^2 b)")
    u1 = eta.scale(Fraction(-1, a))  # norm -b/a over cbrt(s)
    u2 = swap_solution(to_surface_point(u1))  # cbrt(-b/a), norm s
    one_plus_t = PureCubicSolution.make(Fraction(-b, a), 1, 1, 0)  # norm -s/a
    u3 = u2.div(one_plus_t)  # norm -a
    u4 = u3.scale(-1)  # norm a
    u5 = swap_solution(to_surface_point(u4))  # cbrt(a), norm -b/a
    xi = u5.mul(PureCubicSolution.make(a, 0, -1, 0))  # times -cbrt(a)
    if xi.radicand != a or xi.norm() != b:
        raise ChainVerificationFailed("shift unwind chain failed its norm check")
    return xi


def _unwind_step(step: DescentStep, sol: PureCubicSolution) -> PureCubicSolution:
    a0, b0 = step.before.a, step.before.b
    if step.kind == "cubefree":
        ag, bg = step.data
        out = radicand_rebase(sol, Fraction(a0)) if ag != 1 else sol
        if bg != 1:
            out = out.scale(bg)
    elif step.kind == "swap":
        out = swap_solution(to_surface_point(sol))
    elif step.kind == "shrink":
        b1, b2, c, u, v = step.data
        witness = PureCubicSolution.make(a0, b2 * (c * u + b1 * v), -b2 * u, 0)
        if witness.norm() != Fraction(b0) * step.after.b:
            raise ChainVerificationFailed("shrink witness has wrong norm")
        out = witness.div(sol)
    elif step.kind == "swapshift":
        out = shift_unwind(sol, step.before)
    else:
        raise ChainVerificationFailed(f"unknown step kind {step.kind}")
    if out.radicand != a0 or out.norm() != b0:
        raise ChainVerificationFailed(f"unwound {step.kind} step failed its norm check")
    return out


def small_direct_solution(
    a: int, b: int, height: int = 14, max_den: int = 12
) -> Optional[PureCubicSolution]:
    """Small solution of N(xi) = b over Q(cbrt a) by bounded search.

    Sweeps (y, z, d) with |y|, |z| <= height and denominator d <= max_den,
    solving the norm form (cubic in x) by vectorised float64 Cardano and
    verifying near-integral roots exactly.
    """
    import numpy as np

    if a < 1:
        return None
    rng = np.arange(-height, height + 1, dtype=float)
    ys, zs = np.meshgrid(rng, rng, indexing="ij")
    ys, zs = ys.ravel(), zs.ravel()
    p_arr = -3.0 * a * ys * zs
    base_q = a * ys**3 + float(a) * a * zs**3
    for d in range(1, max_den + 1):
        q_arr = base_q - float(b) * d**3
        disc = np.sqrt(q_arr**2 / 4 + p_arr**3 / 27 + 0j)
        for sign in (1.0, -1.0):
            w3 = -q_arr / 2 + sign * disc
            w = np.where(w3 == 0, 1e-30, w3) ** (1.0 / 3.0)
            for k in range(3):
                wk = w * np.exp(2j * np.pi * k / 3)
                x = wk - p_arr / (3 * wk)
                good = np.abs(x.imag) < 1e-6
                xr = np.rint(x.real)
                good &= np.abs(x.real - xr) < 1e-4
                for idx in np.nonzero(good)[0]:
                    for xx in (int(xr[idx]),):
                        cand = PureCubicSolution.make(
                            a,
                            Fraction(xx, d),
                            Fraction(int(ys[idx]), d),
                            Fraction(int(zs[idx]), d),
                        )
                        if not cand.is_zero() and cand.norm() == b:
                            return cand
    return None


def unwind(trace: DescentTrace, reanchor: bool = True) -> PureCubicSolution:
    """Exact element of Q(cbrt(a)) with norm b for the trace's start instance.

    With ``reanchor`` the chain restarts from a directly-found small
    solution wherever one exists, which keeps coordinate heights (and so
    the factorable support of the answer) small.
    """
    sol = _terminal_solution(trace.terminal)
    for step in reversed(trace.steps):
        if reanchor and step.after.a not in (0, 1):
            direct = small_direct_solution(step.after.a, step.after.b)
            if direct is not None:
                sol = direct
        sol = _unwind_step(step, sol)
    if sol.radicand != trace.start.a or sol.norm() != trace.start.b:
        raise ChainVerificationFailed("unwound solution failed the final norm check")
    return sol


def solve_norm_equation(a: int, b: int, **kw) -> tuple[DescentTrace, PureCubicSolution]:
    """Convenience: descend and unwind an instance (a, b)."""
    trace = run_descent(NormInstance(a, b), **kw)
    return trace, unwind(trace)


# ---------------------------------------------------------------------------
# Local solubility of V_{a,b} over Q_p.


@dataclass(frozen=True)
class SolubilityCertificate:
    soluble: bool
    prime: Optional[int] = None  # the obstructing prime when insoluble
    detail: str = ""


def _is_cube_mod_p(x: int, p: int) -> bool:
    x %= p
    if x == 0:
        return True
    if p == 3 or p % 3 == 2:
        return True
    return pow(x, (p - 1) // 3, p) == 1


def _soluble_at_tame(a: int, b: int, p: int) -> bool:
    """Q_p-solubility of V_{a,b} for p not dividing 3; exact criteria."""
    va, vb = 0, 0
    aa, bb = a, b
    while aa % p == 0:
        aa //= p
        va += 1
    while bb % p == 0:
        bb //= p
        vb += 1
    va, vb = va % 3, vb % 3
    if va == 0 and vb == 0:
        return True
    if va == 0:
        return _is_cube_mod_p(a, p)
    if vb == 0:
        return _is_cube_mod_p(b, p)
    if va == vb:
        return _is_cube_mod_p(aa * pow(bb, 2, p) % p, p)
    return _is_cube_mod_p(aa * bb % p, p)


def _strip_p(n: int, p: int) -> tuple[int, int]:
    v = 0
    while n and n % p == 0:
        n //= p
        v += 1
    return n, v


def _soluble_at_search(a: int, b: int, p: int) -> bool:
    """Q_p point search on the diagonal cubic with coefficients (1, a, b, ab).

    A point may lie on any coordinate subsurface, so the search runs over
    every support subset S of the four coordinates.  For fixed support it
    enumerates residues modulo p^(2m+1), m = v_p(3) (mod p tame, mod 27
    at p = 3), certifies points satisfying Hensel's criterion at a unit
    coordinate with unit coefficient, and otherwise recurses into the
    zero strata x_i -> p x_i.  Within fixed support, revisiting a
    coefficient state (valuations mod 3 up to a common shift, units mod
    p^k) without a certificate forces infinite divisibility of a
    coordinate: an infinite descent, hence no point with that support.
    """
    m3 = 1 if p == 3 else 0
    k = 2 * m3 + 1
    mod = p**k

    def canonical(coefs: tuple[int, ...]) -> tuple:
        parts = [_strip_p(c, p) for c in coefs]
        best = None
        for shift in range(3):
            key = tuple(((v - shift) % 3, u % mod) for u, v in parts)
            if best is None or key < best:
                best = key
        return best

    def represent(key: tuple) -> tuple[int, ...]:
        return tuple(u * p**v for v, u in key)

    def lifts(coefs: tuple[int, ...], cache: dict) -> bool:
        key = canonical(coefs)
        if key in cache:
            return cache[key]
        cache[key] = False  # in-progress: a revisit is an infinite descent
        coefs = represent(key)
        n = len(coefs)
        cm = [c % mod for c in coefs]
        hensel_ok = [_strip_p(3 * c, p)[1] <= m3 for c in coefs]
        cubes = [x**3 % mod for x in range(mod)]
        by_value: dict[int, list[int]] = {}
        for xl in range(mod):
            by_value.setdefault(cm[-1] * cubes[xl] % mod, []).append(xl)
        strata: set[tuple[int, ...]] = set()
        found = False
        for head in itertools.product(range(mod), repeat=n - 1):
            s = sum(c * cubes[x] for c, x in zip(cm, head)) % mod
            for xl in by_value.get(-s % mod, ()):
                x = head + (xl,)
                zero = tuple(1 if t % p == 0 else 0 for t in x)
                if all(zero) and not any(x):
                    continue
                found = True
                if any(not z and ok for z, ok in zip(zero, hensel_ok)):
                    cache[key] = True
                    return True
                strata.add(zero)
        if found:
            for pattern in strata:
                if all(pattern):
                    continue  # non-primitive: a rescaled copy of this state
                sub = tuple(
                    c * p**3 if z else c for c, z in zip(coefs, pattern)
                )
                if lifts(sub, cache):
                    cache[key] = True
                    return True
        return False

    full = (1, a, b, a * b)
    for size in (4, 3, 2):
        for support in itertools.combinations(range(4), size):
            coefs = tuple(full[i] for i in support)
            if lifts(coefs, {}):
                return True
    return False


def check_local_solubility(
    inst: NormInstance, primes: Optional[Sequence[int]] = None
) -> SolubilityCertificate:
    """Certificate of everywhere-local solubility of V_{a,b}.

    Checks the supplied primes, or all primes dividing 3ab.  At p = 3 a
    non-Galois cubic has surjective local norms, so only p = 1 mod 3 can
    obstruct; the tame criteria decide those exactly.
    """
    a, b = inst.a, inst.b
    if a == 0 or a == 1:
        return SolubilityCertificate(True, detail="terminal instance")
    if primes is None:
        ps = set(arith.factor(a).primes()) | set(arith.factor(b).primes()) | {3}
        primes = sorted(ps)
    for p in primes:
        if p == 3 or p % 3 == 2:
            continue
        if not _soluble_at_tame(a, b, p):
            return SolubilityCertificate(False, p, f"obstruction at {p}")
    return SolubilityCertificate(True, detail=f"checked primes {list(primes)}")


# ---------------------------------------------------------------------------
# Bounded norm-equation search over the Eisenstein base field.


def solve_norm_over_eisenstein(
    target,
    tower,
    height: int = 8,
    scalars: Optional[Sequence[tuple[int, int, int]]] = None,
):
    """Search xi in M = Q(zeta3, cbrt n) with N_{M/L1}(xi) = target, exactly.

    target lies in Q(zeta3).  The search sweeps pairs (y, z) of
    Eisenstein integers of coordinate height at most ``height`` and
    solves the norm form, cubic in the remaining coordinate x, by
    vectorised float64 Cardano; near-integral roots are verified
    exactly.  Because N(c) = c^3 for scalars c in Q(zeta3), a solution
    of N(w) = target * c^3 yields xi = w / c, so the sweep also runs
    over scaled targets for small scalars c = (cr + ci*zeta3)/cd.
    Returns a verified solution or None.
    """
    import numpy as np

    from .tower import norm_rel

    if not target.in_l1():
        raise ValueError("target must lie in Q(zeta3)")
    tw = tower
    if scalars is None:
        scalars = [(1, 0, 1), (2, 0, 1), (3, 0, 1), (1, 0, 2), (1, 0, 3)]
        for cr in range(-3, 4):
            for ci in range(-3, 4):
                if (cr, ci) not in ((0, 0), (1, 0)):
                    scalars.append((cr, ci, 1))
    n = tw.n
    om = np.exp(2j * np.pi / 3)
    rng = np.arange(-height, height + 1)
    re, im = np.meshgrid(rng, rng, indexing="ij")
    units = (re + im * om).ravel()
    y_all = np.repeat(units, units.size)
    z_all = np.tile(units, units.size)
    y_re = np.repeat(re.ravel(), units.size)
    y_im = np.repeat(im.ravel(), units.size)
    z_re = np.tile(re.ravel(), units.size)
    z_im = np.tile(im.ravel(), units.size)
    p_arr = -3.0 * n * y_all * z_all
    base_q = n * y_all**3 + float(n) * n * z_all**3
    for cr, ci, cd in scalars:
        c_el = tw.from_l1(Fraction(cr, cd), Fraction(ci, cd))
        if c_el.is_zero():
            continue
        scaled = target * c_el**3
        tx, ty = scaled.coords[0], scaled.coords[3]
        tv = float(tx) + float(ty) * om
        q_arr = base_q - tv
        disc = np.sqrt(q_arr**2 / 4 + p_arr**3 / 27 + 0j)
        for sign in (1, -1):
            w3 = -q_arr / 2 + sign * disc
            wz = np.where(w3 == 0, 1e-30, w3) ** (1.0 / 3.0)
            for k in range(3):
                wk = wz * om**k
                x = wk - p_arr / (3 * wk)
                xi_im = x.imag / om.imag
                xi_re = x.real - xi_im * om.real
                xr, xii = np.rint(xi_re), np.rint(xi_im)
                near = (np.abs(xi_re - xr) < 1e-4) & (np.abs(xi_im - xii) < 1e-4)
                for idx in np.nonzero(near)[0]:
                    cand = tw.element(
                        (
                            int(xr[idx]),
                            int(y_re[idx]),
                            int(z_re[idx]),
                            int(xii[idx]),
                            int(y_im[idx]),
                            int(z_im[idx]),
                        )
                    )
                    if cand.is_zero():
                        continue
                    if (norm_rel(cand, "M", "L1") - scaled).is_zero():
                        out = cand.div(c_el)
                        if (norm_rel(out, "M", "L1") - target).is_zero():
                            return out
    return None
