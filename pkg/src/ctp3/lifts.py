"""Cocycle lifts at p = 3: H-pairs from norm solutions, and tangent lines.

Two shapes of the mod-3 Galois image are handled.  In the mu3-nonsplit
case a Selmer element a lives in the chi-cyclotomic eigenspace of
Q(zeta3)-classes and lifts through a solution of N_{M/L1}(xi) = a to
the pair (a, b) with b = N_{M/L2}(sigma(xi) sigma^2(xi)^2).  In the
Z/3Z-nonsplit case a is rational, xi solves N_{L2/Q}(xi) = a, and
b = sigma(xi)^2 sigma^2(xi).  Membership in H is checked from the
defining conditions, with cube tests that never certify silently.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

from . import arith
from .errors import CubeTestInconclusive, NormMismatch, VerticalTangent
from .tower import Tower, TowerElement, cube_class_test, is_cube_l1, norm_rel

MU3 = "mu3"
Z3 = "z3"


@dataclass(frozen=True)
class HPair:
    """A lifted cocycle (a, b) with its case tag; g = 2 throughout."""

    case: str
    a: TowerElement
    b: TowerElement

    def __post_init__(self):
        if self.case not in (MU3, Z3):
            raise ValueError("case must be mu3 or z3")


def eigenspace_check(a: TowerElement) -> bool:
    """Is tau(a)/a^2 a cube in L1 = Q(zeta3)?  Exact decision."""
    if not a.in_l1():
        raise ValueError("eigenspace check needs an element of Q(zeta3)")
    if a.is_zero():
        raise ValueError("eigenspace check of zero")
    ratio = a.tau().div(a * a)
    x, y = ratio.l1_pair()
    ok, _ = is_cube_l1(x, y)
    return ok


def lift_mu3(a: TowerElement, xi: TowerElement) -> HPair:
    """Lift a in (L1-classes)^(1) to (a, b) via N_{M/L1}(xi) = a."""
    if not a.in_l1():
        raise NormMismatch("mu3 lift needs a in Q(zeta3)")
    nxi = norm_rel(xi, "M", "L1")
    if not (nxi - a).is_zero():
        raise NormMismatch("N_{M/L1}(xi) != a")
    prod = xi.sigma() * (xi.sigma().sigma() ** 2)
    b = norm_rel(prod, "M", "L2")
    return HPair(MU3, a, b)


def lift_z3(a, xi: TowerElement) -> HPair:
    """Lift rational a to (a, b) via N_{L2/Q}(xi) = a, b = sigma(xi)^2 sigma^2(xi)."""
    tower = xi.tower
    a_el = a if isinstance(a, TowerElement) else tower.rational(a)
    if not a_el.is_rational():
        raise NormMismatch("z3 lift needs rational a")
    if not xi.in_l2():
        raise NormMismatch("z3 lift needs xi in Q(cbrt n)")
    if norm_rel(xi, "L2", "Q") != a_el.as_rational():
        raise NormMismatch("N_{L2/Q}(xi) != a")
    b = (xi.sigma() ** 2) * xi.sigma().sigma()
    return HPair(Z3, a_el, b)


def _require_cube(e: TowerElement, what: str) -> bool:
    res = cube_class_test(e)
    if res.status == "unknown":
        raise CubeTestInconclusive(f"cube test inconclusive for {what}")
    return res.status == "cube"


def check_H_mu3(h: HPair) -> bool:
    """Conditions: a in the eigenspace, N_{L2/Q}(b) a rational cube,
    sigma(b)/(a b) a cube in M."""
    if h.case != MU3:
        raise ValueError("wrong case tag")
    if not eigenspace_check(h.a):
        return False
    if not h.b.in_l2():
        return False
    nb = norm_rel(h.b, "L2", "Q")
    if not arith.is_cube_rational(nb)[0]:
        return False
    ratio = h.b.sigma().div(h.a * h.b)
    return _require_cube(ratio, "sigma(b)/(ab)")


def check_H_z3(h: HPair) -> bool:
    """Conditions: b^2/tau(b), sigma(b)/(a b) cubes in M, and
    N_{M/L1}(b) a cube in L1."""
    if h.case != Z3:
        raise ValueError("wrong case tag")
    if not h.a.is_rational():
        return False
    if not _require_cube((h.b * h.b).div(h.b.tau()), "b^2/tau(b)"):
        return False
    n1 = norm_rel(h.b, "M", "L1")
    x, y = n1.l1_pair()
    if not is_cube_l1(x, y)[0]:
        return False
    ratio = h.b.sigma().div(h.a * h.b)
    return _require_cube(ratio, "sigma(b)/(ab)")


def check_H(h: HPair) -> bool:
    return check_H_mu3(h) if h.case == MU3 else check_H_z3(h)


# ---------------------------------------------------------------------------
# Curves, torsion points and tangent lines.


@dataclass(frozen=True)
class Curve:
    """y^2 + a1 x y + a3 y = x^3 + a2 x^2 + a4 x + a6 over Q."""

    a1: Fraction
    a2: Fraction
    a3: Fraction
    a4: Fraction
    a6: Fraction

    @classmethod
    def make(cls, a1=0, a2=0, a3=0, a4=0, a6=0) -> "Curve":
        return cls(*(Fraction(x) for x in (a1, a2, a3, a4, a6)))

    def residual(self, x: TowerElement, y: TowerElement) -> TowerElement:
        lhs = y * y + x * y.scale(self.a1) + y.scale(self.a3)
        rhs = x * x * x + (x * x).scale(self.a2) + x.scale(self.a4)
        rhs = rhs + x.tower.rational(self.a6)
        return lhs - rhs

    def contains(self, x: TowerElement, y: TowerElement) -> bool:
        return self.residual(x, y).is_zero()

    def negate(self, x: TowerElement, y: TowerElement):
        """-(x, y) = (x, -y - a1 x - a3)."""
        ny = -y - x.scale(self.a1) - x.tower.rational(self.a3)
        return x, ny

    def discriminant(self) -> Fraction:
        b2 = self.a1**2 + 4 * self.a2
        b4 = 2 * self.a4 + self.a1 * self.a3
        b6 = self.a3**2 + 4 * self.a6
        b8 = (
            self.a1**2 * self.a6
            + 4 * self.a2 * self.a6
            - self.a1 * self.a3 * self.a4
            + self.a2 * self.a3**2
            - self.a4**2
        )
        return -(b2**2) * b8 - 8 * b4**3 - 27 * b6**2 + 9 * b2 * b4 * b6


@dataclass(frozen=True)
class TangentLine:
    """y - lam*x - nu with coefficients in the tower."""

    lam: TowerElement
    nu: TowerElement

    def evaluate(self, x: TowerElement, y: TowerElement) -> TowerElement:
        return y - self.lam * x - self.nu


@dataclass(frozen=True)
class TangentData:
    curve: Curve
    s_point: tuple[TowerElement, TowerElement]
    t_point: tuple[TowerElement, TowerElement]
    tan_s: TangentLine
    tan_t: TangentLine


def tangent_form(curve: Curve, point) -> TangentLine:
    """Tangent line at a nonsingular finite point, exact in its field.

    Implicit differentiation of the Weierstrass equation; raises
    VerticalTangent when 2y + a1 x + a3 vanishes (2-torsion).
    """
    x, y = point
    tower = x.tower
    num = (
        (x * x).scale(3)
        + x.scale(2 * curve.a2)
        + tower.rational(curve.a4)
        - y.scale(curve.a1)
    )
    den = y.scale(2) + x.scale(curve.a1) + tower.rational(curve.a3)
    if den.is_zero():
        raise VerticalTangent("tangent at a 2-torsion point is vertical")
    lam = num.div(den)
    nu = y - lam * x
    return TangentLine(lam, nu)


def tangent_multiplicity_check(curve: Curve, point, line: TangentLine) -> bool:
    """Substituting the line into the curve leaves a double root at x(P)."""
    x0, _ = point
    tower = x0.tower
    lam, nu = line.lam, line.nu
    one = tower.rational(1)
    # x^3 + (a2 - lam^2 - a1 lam) x^2 + (a4 - 2 lam nu - a1 nu - a3 lam) x
    #     + (a6 - nu^2 - a3 nu) = 0
    c3 = one
    c2 = tower.rational(curve.a2) - lam * lam - lam.scale(curve.a1)
    c1 = (
        tower.rational(curve.a4)
        - (lam * nu).scale(2)
        - nu.scale(curve.a1)
        - lam.scale(curve.a3)
    )
    c0 = tower.rational(curve.a6) - nu * nu - nu.scale(curve.a3)
    # synthetic division by (x - x0) twice: both remainders must vanish
    r2 = c2 + c3 * x0
    r1 = c1 + r2 * x0
    r0 = c0 + r1 * x0
    if not r0.is_zero():
        return False
    s1 = r2 + c3 * x0
    s0 = r1 + s1 * x0
    return s0.is_zero()


def make_tangent_data(curve: Curve, s_point, t_point) -> TangentData:
    """Validate torsion points and build both tangent lines."""
    for pt in (s_point, t_point):
        x, y = pt
        if not curve.contains(x, y):
            raise ValueError("torsion point is not on the curve")
    tan_s = tangent_form(curve, s_point)
    tan_t = tangent_form(curve, t_point)
    for pt, line in ((s_point, tan_s), (t_point, tan_t)):
        if not tangent_multiplicity_check(curve, pt, line):
            raise ValueError("tangent line misses double contact")
    return TangentData(curve, s_point, t_point, tan_s, tan_t)
