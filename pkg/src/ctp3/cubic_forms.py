"""Binary cubic forms: discriminants, Minkowski reduction, small values.

A cubic f with negative discriminant has one real root and a complex
pair; the positive definite quadratic built from the complex pair is
Gauss-reduced and the small value of f is then found among the pairs
(1,0), (0,1), (1,+-1), (1,+-2).  Floating point enters only through the
root extraction: the accumulated SL2(Z) transform is applied to f in
exact integer arithmetic and the final bound check is exact, so lost
precision can force a retry but never a wrong answer.
"""

from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .errors import PrecisionExhausted, RationalRootFound

CANDIDATE_PAIRS = ((1, 0), (0, 1), (1, 1), (1, -1), (1, 2), (1, -2))


@dataclass(frozen=True)
class UnimodularMatrix:
    """Integer matrix [[alpha, beta], [gamma, delta]] of determinant 1."""

    alpha: int
    beta: int
    gamma: int
    delta: int

    def __post_init__(self):
        if self.alpha * self.delta - self.beta * self.gamma != 1:
            raise ValueError("determinant must be 1")

    @classmethod
    def identity(cls) -> "UnimodularMatrix":
        return cls(1, 0, 0, 1)

    def __matmul__(self, other: "UnimodularMatrix") -> "UnimodularMatrix":
        return UnimodularMatrix(
            self.alpha * other.alpha + self.beta * other.gamma,
            self.alpha * other.beta + self.beta * other.delta,
            self.gamma * other.alpha + self.delta * other.gamma,
            self.gamma * other.beta + self.delta * other.delta,
        )

    def apply(self, u: int, v: int) -> tuple[int, int]:
        """Image of the column (u, v)."""
        return (self.alpha * u + self.beta * v, self.gamma * u + self.delta * v)


@dataclass(frozen=True)
class BinaryCubicForm:
    """a X^3 + b X^2 Y + c X Y^2 + d Y^3 with integer coefficients."""

    a: int
    b: int
    c: int
    d: int

    def __call__(self, u: int, v: int) -> int:
        return (
            self.a * u**3 + self.b * u**2 * v + self.c * u * v**2 + self.d * v**3
        )

    def discriminant(self) -> int:
        a, b, c, d = self.a, self.b, self.c, self.d
        return (
            b * b * c * c
            - 4 * a * c**3
            - 4 * b**3 * d
            - 27 * a * a * d * d
            + 18 * a * b * c * d
        )

    def transform(self, t: UnimodularMatrix) -> "BinaryCubicForm":
        """The form f(alpha X + beta Y, gamma X + delta Y), exactly."""
        al, be, ga, de = t.alpha, t.beta, t.gamma, t.delta
        a, b, c, d = self.a, self.b, self.c, self.d
        na = a * al**3 + b * al**2 * ga + c * al * ga**2 + d * ga**3
        nb = (
            3 * a * al**2 * be
            + b * (al**2 * de + 2 * al * be * ga)
            + c * (2 * al * ga * de + be * ga**2)
            + 3 * d * ga**2 * de
        )
        nc = (
            3 * a * al * be**2
            + b * (2 * al * be * de + be**2 * ga)
            + c * (al * de**2 + 2 * be * ga * de)
            + 3 * d * ga * de**2
        )
        nd = a * be**3 + b * be**2 * de + c * be * de**2 + d * de**3
        return BinaryCubicForm(na, nb, nc, nd)


def discriminant(f: BinaryCubicForm) -> int:
    return f.discriminant()


@dataclass(frozen=True)
class BinaryQuadraticForm:
    """A X^2 + B X Y + C Y^2 with real (mpmath) coefficients."""

    A: mpmath.mpf
    B: mpmath.mpf
    C: mpmath.mpf
    precision: int  # working precision in bits

    def is_positive_definite(self) -> bool:
        with mpmath.workprec(self.precision):
            return self.A > 0 and self.B * self.B - 4 * self.A * self.C < 0

    def is_reduced(self, tol: float = 1e-9) -> bool:
        with mpmath.workprec(self.precision):
            slack = 1 + mpmath.mpf(tol)
            return abs(self.B) <= self.A * slack and self.A <= self.C * slack


def _real_and_complex_roots(f: BinaryCubicForm, prec: int):
    """Roots of f(x, 1); returns (real root, one complex root)."""
    with mpmath.workprec(prec):
        coeffs = [mpmath.mpf(f.a), mpmath.mpf(f.b), mpmath.mpf(f.c), mpmath.mpf(f.d)]
        try:
            roots = mpmath.polyroots(coeffs, maxsteps=200, extraprec=prec)
        except mpmath.libmp.NoConvergence as exc:
            raise PrecisionExhausted(str(exc)) from exc
        roots = sorted(roots, key=lambda z: abs(mpmath.im(z)))
        real = roots[0]
        beta = roots[1] if mpmath.im(roots[1]) != 0 else roots[2]
        if abs(mpmath.im(beta)) == 0:
            raise PrecisionExhausted("could not separate the complex pair")
        return mpmath.re(real), beta


def associated_quadratic(f: BinaryCubicForm, prec: int | None = None) -> BinaryQuadraticForm:
    """The positive definite quadratic (X - beta Y)(X - conj(beta) Y).

    Requires discriminant(f) < 0 (one real root).  Coefficients are the
    trace and norm of the complex root pair of f(x, 1).
    """
    disc = f.discriminant()
    if disc >= 0:
        raise ValueError("associated quadratic needs negative discriminant")
    if prec is None:
        bits = max(abs(x).bit_length() for x in (f.a, f.b, f.c, f.d))
        prec = 2 * bits + 64
    with mpmath.workprec(prec):
        if f.a == 0:
            # f(x,1) is quadratic: the complex pair are its two roots
            disc_q = mpmath.mpf(f.c) ** 2 - 4 * mpmath.mpf(f.b) * mpmath.mpf(f.d)
            if f.b == 0 or disc_q >= 0:
                raise PrecisionExhausted("degenerate leading coefficients")
            tr = -mpmath.mpf(f.c) / f.b
            nm = mpmath.mpf(f.d) / f.b
        else:
            _, beta = _real_and_complex_roots(f, prec)
            tr = 2 * mpmath.re(beta)
            nm = abs(beta) ** 2
        q = BinaryQuadraticForm(mpmath.mpf(1), -tr, nm, prec)
        if not q.is_positive_definite():
            raise PrecisionExhausted("associated quadratic not certified definite")
        return q


def reduce_quadratic(
    q: BinaryQuadraticForm, max_steps: int = 20000
) -> tuple[BinaryQuadraticForm, UnimodularMatrix]:
    """Gauss reduction of a positive definite form.

    Returns the reduced form and t in SL2(Z) with q o t = reduced, where
    the action substitutes (alpha X + beta Y, gamma X + delta Y).
    """
    if not q.is_positive_definite():
        raise ValueError("reduce_quadratic needs a positive definite form")
    with mpmath.workprec(q.precision):
        A, B, C = q.A, q.B, q.C
        t = UnimodularMatrix.identity()
        for _ in range(max_steps):
            # translate: X -> X - m Y keeps A, shifts B by -2mA
            m = int(mpmath.nint(B / (2 * A)))
            if m:
                A, B, C = A, B - 2 * m * A, A * m * m - B * m + C
                t = t @ UnimodularMatrix(1, -m, 0, 1)
            if A > C * (1 + mpmath.mpf(2) ** (8 - q.precision)):
                A, B, C = C, -B, A
                t = t @ UnimodularMatrix(0, -1, 1, 0)
            else:
                break
        else:
            raise PrecisionExhausted("reduction did not stabilise")
        return BinaryQuadraticForm(A, B, C, q.precision), t


def davenport_search(f: BinaryCubicForm) -> tuple[int, int]:
    """A pair (u, v) != (0, 0) with 23 * f(u,v)^4 <= |disc(f)|, exactly.

    Reduces the associated quadratic, evaluates the transformed form at
    the six candidate pairs, and maps the best pair back.  Ties take the
    smallest |f|, then candidate order.  Raises RationalRootFound(u, v)
    if the form vanishes at a candidate, and PrecisionExhausted if the
    exact bound cannot be met after precision retries.
    """
    disc = f.discriminant()
    if disc >= 0:
        raise ValueError("davenport_search needs negative discriminant")
    bits = max(abs(x).bit_length() for x in (f.a, f.b, f.c, f.d))
    prec = 2 * bits + 64
    for _ in range(6):
        try:
            q = associated_quadratic(f, prec)
            _, t = reduce_quadratic(q)
        except PrecisionExhausted:
            prec *= 2
            continue
        g = f.transform(t)
        best: tuple[int, tuple[int, int]] | None = None
        for x, y in CANDIDATE_PAIRS:
            val = g(x, y)
            if val == 0:
                u, v = t.apply(x, y)
                raise RationalRootFound(u, v)
            if best is None or abs(val) < best[0]:
                best = (abs(val), (x, y))
        assert best is not None
        u, v = t.apply(*best[1])
        if 23 * f(u, v) ** 4 <= abs(disc):
            return u, v
        prec *= 2
    raise PrecisionExhausted("no candidate satisfied the exact bound")
