"""Exception and warning types raised by the gbdt package."""


class GbdtError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(GbdtError, ValueError):
    pass


class SingularMatrix(GbdtError, ArithmeticError):
    pass


class NoRootFound(GbdtError, ArithmeticError):
    pass


class SpectraOverlap(GbdtError, ArithmeticError):
    """The Sylvester operator Z -> PZ + ZR is singular (or nearly so)."""


class SpectralPoint(GbdtError, ArithmeticError):
    """The spectral parameter sits on (or too close to) an eigenvalue of A."""


class InconsistentRoot(GbdtError, ValueError):
    pass


class NoDressing(GbdtError, ArithmeticError):
    pass


class QuadratureFailure(GbdtError, ArithmeticError):
    pass


class SingularS(GbdtError, ArithmeticError):
    """S(x) (or S(x, t)) failed the invertibility test at the stored point."""

    def __init__(self, x, t=None, rcond=0.0):
        self.x = x
        self.t = t
        self.rcond = rcond
        where = f"x={x!r}" if t is None else f"(x, t)=({x!r}, {t!r})"
        super().__init__(f"S is numerically singular at {where} (rcond={rcond:.3e})")


class GridTooCoarse(GbdtError, ValueError):
    pass


class SingularSystem(GbdtError, ArithmeticError):
    pass


class SingularGamma(GbdtError, ArithmeticError):
    pass


class DegenerateFrequency(UserWarning):
    """lambda == 0: the two columns of the free fundamental matrix coincide."""
