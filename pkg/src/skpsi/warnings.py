class HeuristicCertificateWarning(UserWarning):
    """Raised when a finite-K certificate for an infinite-dimensional
    invertibility statement is inconclusive."""


class TruncationEdgeWarning(UserWarning):
    """Raised when a comparison reaches beyond the interior frequency band."""
