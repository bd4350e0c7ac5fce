"""Exception hierarchy shared by all vardtf modules."""


class VardtfError(Exception):
    """Base class for all errors raised by this package."""


class ShapeMismatch(VardtfError):
    """Array dimensions are inconsistent with the declared model."""


class NotPositiveSemiDefinite(VardtfError):
    """A covariance matrix is asymmetric or has negative eigenvalues."""


class Unstable(VardtfError):
    """The companion matrix has spectral radius at or above one.

    Attributes
    ----------
    spectral_radius : float
        The offending spectral radius.
    """

    def __init__(self, spectral_radius: float):
        self.spectral_radius = float(spectral_radius)
        super().__init__(
            f"model is not stable: companion spectral radius "
            f"{self.spectral_radius:.6g} >= 1"
        )


class OrderZero(VardtfError):
    """Operation requires at least one lag coefficient matrix."""


class SingularAtFrequency(VardtfError):
    """A frequency-domain matrix could not be inverted reliably.

    Attributes
    ----------
    frequency : float
        Grid point (radians per sample) where inversion broke down.
    """

    def __init__(self, frequency: float, detail: str = ""):
        self.frequency = float(frequency)
        msg = f"singular matrix at frequency {self.frequency:.6g} rad/sample"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class DegenerateRow(VardtfError):
    """An entire transfer-function row vanishes; row-normalization undefined."""


class DimensionTooSmall(VardtfError):
    """Marginalization requires strictly more channels than are retained."""


class SingularToeplitz(VardtfError):
    """The block-Toeplitz autocovariance system is singular."""


class NumericalBreakdown(VardtfError):
    """An innovation covariance lost positive semi-definiteness."""


class NoConvergence(VardtfError):
    """An iterative linear-algebra solve failed to converge."""


class NotConverged(VardtfError):
    """Order-selection loop hit its cap before meeting the tolerance.

    Attributes
    ----------
    best
        The representation achieved at the largest order tried.
    diagnostics : dict
        Tail norms and innovation-trace deltas per order tried.
    """

    def __init__(self, message: str, best=None, diagnostics=None):
        self.best = best
        self.diagnostics = diagnostics or {}
        super().__init__(message)


class RankDeficientRegressors(VardtfError):
    """The lagged-regressor matrix does not have full column rank."""
