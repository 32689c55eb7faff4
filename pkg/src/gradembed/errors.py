"""Exception hierarchy shared across the package."""


class GradEmbedError(Exception):
    """Base class for all errors raised by this package."""


class MetricError(GradEmbedError):
    """Input fails to be a valid finite metric."""


class AsymmetricMatrix(MetricError):
    pass


class NonzeroDiagonal(MetricError):
    pass


class DuplicatePoint(MetricError):
    """Zero distance between two distinct points."""


class TriangleViolation(MetricError):
    def __init__(self, i, j, k, message=None):
        self.i, self.j, self.k = i, j, k
        super().__init__(message or f"triangle inequality violated at ({i},{j},{k})")


class SinglePoint(MetricError):
    pass


class TooSmall(MetricError):
    pass


class TooLarge(MetricError):
    pass


class NotUltrametric(GradEmbedError):
    def __init__(self, i, j, k, message=None):
        self.i, self.j, self.k = i, j, k
        super().__init__(message or f"strong triangle inequality violated at ({i},{j},{k})")


class UnknownPoint(GradEmbedError):
    pass


class DegenerateMetric(GradEmbedError):
    pass


class KTooLarge(GradEmbedError):
    pass


class ProfileExceedsK(GradEmbedError):
    pass


class BadEps(GradEmbedError):
    pass


class NotAPartition(GradEmbedError):
    pass


class TooLargeForOracle(GradEmbedError):
    pass


class OracleInfeasible(GradEmbedError):
    pass


class NotNonContractive(GradEmbedError):
    pass


class BadEdge(GradEmbedError):
    pass


class CertificateMissing(GradEmbedError):
    """No cycle edge reached the guaranteed tree-distance threshold."""


# errors that indicate bad/ill-formed input data (CLI exit code 3)
VALIDATION_ERRORS = (
    MetricError,
    NotUltrametric,
    UnknownPoint,
    DegenerateMetric,
    KTooLarge,
    ProfileExceedsK,
    BadEps,
    NotAPartition,
    NotNonContractive,
    BadEdge,
)

# errors that indicate an instance too large for the requested solver (exit code 4)
INFEASIBLE_ERRORS = (TooLargeForOracle, OracleInfeasible)
