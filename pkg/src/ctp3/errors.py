"""Exception types shared across the package."""


class Ctp3Error(Exception):
    """Base class for all package errors."""


class FactorTimeout(Ctp3Error):
    """Factoring work budget exceeded; caller may supply hints."""

    def __init__(self, n, partial=None):
        super().__init__(f"factoring budget exceeded on {n}")
        self.n = n
        self.partial = partial or []


class NotCubeMod(Ctp3Error):
    """a is not a cube modulo q: certificate of local insolubility."""

    def __init__(self, a, q):
        super().__init__(f"{a} is not a cube mod {q}")
        self.a = a
        self.q = q


class IterationCap(Ctp3Error):
    """Descent exceeded its iteration cap (insoluble input or bug)."""


class PrecisionExhausted(Ctp3Error):
    """Certified real-root bounds unobtainable at maximum precision."""


class RationalRootFound(Ctp3Error):
    """A candidate pair is a rational root of the cubic form."""

    def __init__(self, u, v):
        super().__init__(f"form vanishes at ({u}, {v})")
        self.u = u
        self.v = v


class DegenerateDenominator(Ctp3Error):
    """Surface-point swap hit a zero denominator (cube radicand)."""


class ChainVerificationFailed(Ctp3Error):
    """An unwinding step failed its exact norm check."""


class IncompatibleRadicand(Ctp3Error):
    """Requested radicand is not related by a cube or square factor."""


class DivisionByZero(Ctp3Error):
    """Inversion of the zero element of a number field."""


class InvalidTower(Ctp3Error):
    """Invalid subfield pair for a relative norm."""


class NormMismatch(Ctp3Error):
    """Claimed relative norm does not verify exactly."""


class CubeTestInconclusive(Ctp3Error):
    """Cube-class test returned Unknown where a certificate was required."""


class NoLift(Ctp3Error):
    """Hensel's lemma hypothesis fails at the given seed."""


class InsufficientPrecision(Ctp3Error):
    """p-adic precision too low to decide a class."""


class PrecisionLoss(Ctp3Error):
    """Embedding lost too much precision to give a well-defined class."""


class NotUnit(Ctp3Error):
    """Residue is not a unit in the residue field."""


class SearchExhausted(Ctp3Error):
    """Bounded local point search failed; dossier must supply the point."""


class WrongLocalPoint(Ctp3Error):
    """Local point does not lift the requested Selmer element."""


class NotAlternating(Ctp3Error):
    """Assembled global matrix is not alternating: inconsistent inputs."""


class VerticalTangent(Ctp3Error):
    """Tangent line at a 2-torsion point is vertical."""


class DossierError(Ctp3Error):
    """Malformed dossier file."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class UnsupportedLocalField(Ctp3Error):
    """Local completion shape outside the implemented tower regimes."""
