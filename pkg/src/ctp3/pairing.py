"""Assembly of the global pairing matrix from lifts and local data.

A dossier bundles the curve, the case tag and radicand, the Selmer
generators, optional precomputed lifts, and per-prime seeds and local
points.  The global matrix is the sum over the support primes of local
matrices whose (i, j) entry is the Hilbert symbol of the descended
class of b_i / tan_T(P_i) against the class of a_j, halved where
Q_p(zeta3) is quadratic over Q_p.  The result must come out alternating
over F_3; the rank report turns its kernel into the improved rank bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional

from . import arith, descent, lifts as lifts_mod
from .errors import (
    CubeTestInconclusive,
    DossierError,
    InsufficientPrecision,
    NotAlternating,
    PrecisionLoss,
    SearchExhausted,
    UnsupportedLocalField,
    WrongLocalPoint,
)
from .lifts import Curve, HPair, TangentLine, check_H, make_tangent_data
from .localfields import (
    LocalContext,
    LocalCubeClass,
    MCompletion,
    PadicNumber,
    find_local_point,
)
from .tower import Tower, TowerElement, norm_rel


@dataclass
class LocalBlock:
    """Per-prime seeds and optional points from the dossier."""

    prime: int
    zeta_seed: Optional[int] = None
    theta_seed: Optional[int] = None
    precision: Optional[int] = None
    points: dict = field(default_factory=dict)  # generator index -> (x, y-spec)


@dataclass
class Dossier:
    curve: Curve
    case: str  # "mu3" | "z3"
    n: int
    tower: Tower
    torsion_s: tuple[TowerElement, TowerElement]
    torsion_t: tuple[TowerElement, TowerElement]
    generators: list[TowerElement]
    lift_xi: dict = field(default_factory=dict)  # index -> TowerElement
    lift_b: dict = field(default_factory=dict)  # index -> TowerElement
    t_corr: int = 1
    dim_s_phi: int = 0
    selmer_dim: Optional[int] = None
    blocks: dict = field(default_factory=dict)  # prime -> LocalBlock
    bad_primes: Optional[list[int]] = None

    def __post_init__(self):
        if self.case not in (lifts_mod.MU3, lifts_mod.Z3):
            raise DossierError(f"unknown case {self.case}")
        if self.t_corr not in (0, 1, 2):
            raise DossierError("torsion correction must be 0, 1 or 2")
        for g in self.generators:
            if self.case == lifts_mod.Z3 and not g.is_rational():
                raise DossierError("z3 generators must be rational")
            if self.case == lifts_mod.MU3 and not g.in_l1():
                raise DossierError("mu3 generators must lie in Q(zeta3)")
        for x, y in (self.torsion_s, self.torsion_t):
            if not self.curve.contains(x, y):
                raise DossierError("torsion point not on the curve")

    def dim(self) -> int:
        return self.selmer_dim if self.selmer_dim is not None else len(self.generators)


@dataclass
class LiftData:
    pair: HPair
    xi: Optional[TowerElement]
    trace: Optional[descent.DescentTrace]


def compute_lift(dossier: Dossier, index: int, verify: bool = True) -> LiftData:
    """Lift generator #index, preferring dossier data over computation.

    Order: a supplied b is used as-is; a supplied xi is norm-verified and
    lifted; otherwise the norm equation is solved (descent through the
    swap for the z3 case, bounded search over the Eisenstein base for
    mu3).  check_H is enforced when verify is set.
    """
    a = dossier.generators[index]
    tower = dossier.tower
    pair = xi = trace = None
    if index in dossier.lift_b:
        pair = HPair(dossier.case, a, dossier.lift_b[index])
    elif index in dossier.lift_xi:
        xi = dossier.lift_xi[index]
        pair = (
            lifts_mod.lift_mu3(a, xi)
            if dossier.case == lifts_mod.MU3
            else lifts_mod.lift_z3(a, xi)
        )
    elif dossier.case == lifts_mod.Z3:
        av = a.as_rational()
        if av.denominator != 1 or av <= 0:
            raise DossierError("z3 generators must be positive integers")
        af, ag = arith.cube_free_part(int(av))
        trace = descent.run_descent(descent.NormInstance(af, dossier.n))
        eta = descent.unwind(trace)  # norm n over cbrt(af)
        pt = descent.to_surface_point(eta)
        sol = descent.swap_solution(pt)  # radicand n, norm af
        sol = descent.scale_solution(sol, ag)  # norm af * ag^3 = a
        if sol.norm() != av:
            raise DossierError("descent produced a wrong-norm solution")
        xi = tower.from_l2(*sol.coords)
        pair = lifts_mod.lift_z3(a, xi)
    else:
        xi = descent.solve_norm_over_eisenstein(a, tower)
        if xi is None:
            raise DossierError(
                f"no bounded solution of the mu3 norm equation for generator "
                f"{index + 1}; supply xi or b in the dossier"
            )
        pair = lifts_mod.lift_mu3(a, xi)
    if verify and not check_H(pair):
        raise CubeTestInconclusive(
            f"lift for generator {index + 1} fails the H-membership conditions"
        )
    return LiftData(pair, xi, trace)


def compute_lifts(dossier: Dossier, verify: bool = True) -> list[LiftData]:
    return [compute_lift(dossier, i, verify) for i in range(len(dossier.generators))]


# ---------------------------------------------------------------------------
# Support primes.


def support_primes(dossier: Dossier, lift_data: list[LiftData]) -> list[int]:
    """Candidate primes: everything else provably contributes zero.

    Bad reduction, 3, primes under the generators, and the support of
    each lift.  For an element e with coordinate denominator D the
    product e*D is integral with norm N(e)*D^6, so the fractional ideal
    of e is supported over the primes dividing N(e), its denominator,
    and D; columns vanish elsewhere for good-reduction primes and rows
    vanish where every v_P(b_i) is divisible by 3.
    """
    primes: set[int] = {3}
    if dossier.bad_primes is not None:
        primes |= set(dossier.bad_primes)
    else:
        disc = dossier.curve.discriminant()
        primes |= set(arith.factor(abs(disc.numerator)).primes())
        primes |= set(arith.factor(disc.denominator).primes())
    for g in dossier.generators:
        x, y = g.coords[0], g.coords[3]
        nrm = x * x - x * y + y * y
        primes |= set(arith.factor(abs(nrm.numerator)).primes())
        primes |= set(arith.factor(nrm.denominator).primes())
    for ld in lift_data:
        for el in filter(None, (ld.xi, ld.pair.b)):
            nrm = norm_rel(el, "M", "Q")
            primes |= set(arith.factor(abs(nrm.numerator)).primes())
            primes |= set(arith.factor(nrm.denominator).primes())
            den = 1
            for c in el.coords:
                den = den * c.denominator // arith_gcd(den, c.denominator)
            primes |= set(arith.factor(den).primes())
    return sorted(primes)


def arith_gcd(a: int, b: int) -> int:
    while b:
        a, b = b, a % b
    return abs(a)


# ---------------------------------------------------------------------------
# Local matrices.


def _column_classes(dossier: Dossier, ctx: LocalContext) -> list[LocalCubeClass]:
    out = []
    for g in dossier.generators:
        x, y = g.coords[0], g.coords[3]
        out.append(ctx.cube_class(ctx.embed_l1(x, y)))
    return out


def _eval_line_base(ctx, line: TangentLine, x, y):
    """tan(x, y) for a line with Q(zeta3) coefficients, in the base field.

    x is rational; y is a base element (PadicNumber in the split regime,
    EisensteinLocal otherwise).
    """
    lx, ly = line.lam.coords[0], line.lam.coords[3]
    nx, ny = line.nu.coords[0], line.nu.coords[3]
    lam = ctx.embed_l1(lx, ly)
    nu = ctx.embed_l1(nx, ny)
    xx = ctx.from_rational(x)
    return y.add(lam.mul(xx).neg()).add(nu.neg())


def _eval_line_completion(mc: MCompletion, line: TangentLine, x, y):
    """tan_T(x, y) in the completion of M; coefficients live in M."""
    lam = mc.embed(line.lam)
    nu = mc.embed(line.nu)
    xx = mc.from_base(mc.ctx.from_rational(x))
    yy = mc.from_base(y)
    return mc.sub(mc.sub(yy, mc.mul(lam, xx)), nu)


def _coerce_y(ctx: LocalContext, y):
    if isinstance(y, PadicNumber):
        if ctx.regime == "split":
            return y
        from .localfields import EisensteinLocal

        return EisensteinLocal(y.p, y.v, y.u, 0, y.k)
    return ctx.from_rational(y)


def _refine_point(curve: Curve, ctx: LocalContext, x: Fraction, y_spec, precision: int):
    """Check the supplied point and re-lift y to working precision.

    Rational points verify the curve equation exactly; p-adic y values
    act as seeds matched (two digits beyond their valuation) against the
    Hensel-lifted roots at working precision.
    """
    from .localfields import _y_roots

    if isinstance(y_spec, Fraction):
        lhs = y_spec**2 + curve.a1 * x * y_spec + curve.a3 * y_spec
        rhs = x**3 + curve.a2 * x * x + curve.a4 * x + curve.a6
        if lhs != rhs:
            raise WrongLocalPoint(f"rational point ({x}, {y_spec}) is not on the curve")
        return x, PadicNumber.from_rational(ctx.p, y_spec, precision)
    coeffs = (curve.a1, curve.a2, curve.a3, curve.a4, curve.a6)
    roots = _y_roots(coeffs, x, ctx, precision)
    target = y_spec
    best = None
    for y in roots:
        diff = y.add(target.neg())
        if diff.is_zero or (y.is_zero and target.is_zero):
            best = y
            break
        if not target.is_zero and not y.is_zero and diff.v - target.v >= 2:
            best = y
            break
    if best is None:
        raise WrongLocalPoint(
            f"supplied point ({x}, ...) does not lie on the curve over Q_{ctx.p}"
        )
    return x, best


def local_xi(
    dossier: Dossier,
    ctx: LocalContext,
    mc: MCompletion,
    tangents,
    b: TowerElement,
    column: LocalCubeClass,
    point,
) -> LocalCubeClass:
    """Class of b / tan_T(P) descended to the base field.

    point is None for a locally trivial generator (P = O, ratio = b);
    otherwise (x, y) with x rational and y a p-adic number, and the
    sanity condition tan_S(P) = column modulo cubes is enforced.
    """
    ratio = mc.embed(b)
    if point is not None:
        x, y = point
        y_base = _coerce_y(ctx, y)
        sval = _eval_line_base(ctx, tangents.tan_s, x, y_base)
        scls = ctx.cube_class(sval)
        if scls.vector != column.vector:
            raise WrongLocalPoint(
                f"tan_S(P) has class {scls.vector}, generator has {column.vector}"
            )
        tval = _eval_line_completion(mc, tangents.tan_t, x, y_base)
        if mc.shape == "degree1":
            ratio = ratio.mul(tval.inv())
        else:
            # divide modulo cubes: multiply by the square
            ratio = mc.mul(ratio, mc.mul(tval, tval))
    return mc.descend_class(ratio)


def local_matrix(
    dossier: Dossier,
    lift_data: list[LiftData],
    p: int,
    precision: Optional[int] = None,
) -> list[list[int]]:
    """The local pairing matrix at p, entries in Z/3."""
    block = dossier.blocks.get(p) or LocalBlock(p)
    prec = precision or block.precision
    ctx = LocalContext(p, precision=prec, zeta_seed=block.zeta_seed)
    cols = _column_classes(dossier, ctx)
    k = len(cols)
    if all(c.is_trivial() for c in cols):
        return [[0] * k for _ in range(k)]
    mc = MCompletion(ctx, dossier.n, theta_seed=block.theta_seed)
    tangents = make_tangent_data(dossier.curve, dossier.torsion_s, dossier.torsion_t)
    coeffs = (
        dossier.curve.a1,
        dossier.curve.a2,
        dossier.curve.a3,
        dossier.curve.a4,
        dossier.curve.a6,
    )
    rows = []
    for i, ld in enumerate(lift_data):
        if cols[i].is_trivial():
            point = None
        elif i in block.points:
            x, y_spec = block.points[i]
            point = _refine_point(dossier.curve, ctx, x, y_spec, ctx.precision + 6)
        else:
            tan_s_eval = lambda x, y: _eval_line_base(
                ctx, tangents.tan_s, x, _coerce_y(ctx, y)
            )
            point = find_local_point(coeffs, ctx, tan_s_eval, cols[i])
        rows.append(local_xi(dossier, ctx, mc, tangents, ld.pair.b, cols[i], point))
    half = 2 if ctx.degree() == 2 else 1
    out = []
    for i in range(k):
        out.append([(half * ctx.symbol_classes(rows[i], cols[j])) % 3 for j in range(k)])
    return out


def local_matrix_with_retry(dossier, lift_data, p) -> list[list[int]]:
    base = None
    block = dossier.blocks.get(p)
    if block and block.precision:
        base = block.precision
    last = None
    for mult in (1, 2, 4):
        try:
            prec = base * mult if base else (None if mult == 1 else 12 * mult)
            return local_matrix(dossier, lift_data, p, precision=prec)
        except (InsufficientPrecision, PrecisionLoss) as exc:
            last = exc
    raise last


# ---------------------------------------------------------------------------
# Global assembly.


@dataclass
class PairingMatrix:
    entries: list[list[int]]
    labels: list[str]
    locals: dict

    def rank(self) -> int:
        return f3_rank(self.entries)


@dataclass
class RankReport:
    matrix_rank: int
    kernel_dim: int
    selmer_dim: int
    dim_s_phi: int
    t_corr: int
    bound: int


def f3_rank(matrix: list[list[int]]) -> int:
    m = [row[:] for row in matrix]
    rank = 0
    rows, cols = len(m), len(m[0]) if m else 0
    r = 0
    for c in range(cols):
        piv = next((i for i in range(r, rows) if m[i][c] % 3), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 if m[r][c] % 3 == 1 else 2
        m[r] = [(x * inv) % 3 for x in m[r]]
        for i in range(rows):
            if i != r and m[i][c] % 3:
                f = m[i][c] % 3
                m[i] = [(a - f * b) % 3 for a, b in zip(m[i], m[r])]
        r += 1
        rank += 1
        if r == rows:
            break
    return rank


def global_matrix(dossier: Dossier, lift_data: Optional[list[LiftData]] = None) -> PairingMatrix:
    """Sum of local matrices over the support; enforced alternating."""
    if lift_data is None:
        lift_data = compute_lifts(dossier)
    k = len(dossier.generators)
    total = [[0] * k for _ in range(k)]
    local_all = {}
    for p in support_primes(dossier, lift_data):
        loc = local_matrix_with_retry(dossier, lift_data, p)
        if any(any(row) for row in loc):
            local_all[p] = loc
        for i in range(k):
            for j in range(k):
                total[i][j] = (total[i][j] + loc[i][j]) % 3
    for i in range(k):
        if total[i][i] % 3:
            raise NotAlternating(f"diagonal entry ({i},{i}) is nonzero")
        for j in range(k):
            if (total[i][j] + total[j][i]) % 3:
                raise NotAlternating(f"entries ({i},{j}) and ({j},{i}) do not cancel")
    labels = [_gen_label(g) for g in dossier.generators]
    return PairingMatrix(total, labels, local_all)


def _gen_label(g: TowerElement) -> str:
    if g.is_rational():
        return str(g.coords[0])
    x, y = g.coords[0], g.coords[3]
    return f"{x}+{y}z"


def rank_report(matrix: PairingMatrix, dossier: Dossier) -> RankReport:
    r = matrix.rank()
    dim = dossier.dim()
    ker = dim - r
    bound = ker + dossier.dim_s_phi - dossier.t_corr
    return RankReport(r, ker, dim, dossier.dim_s_phi, dossier.t_corr, bound)


def equal_up_to_scalar(m1: list[list[int]], m2: list[list[int]]) -> bool:
    if len(m1) != len(m2):
        return False
    for s in (1, 2):
        if all(
            (s * a - b) % 3 == 0
            for ra, rb in zip(m1, m2)
            for a, b in zip(ra, rb)
        ):
            return True
    return False
