"""Exception types shared across the package."""


class FVPError(Exception):
    """Base class for all package errors."""


class InvalidArgumentError(FVPError, ValueError):
    pass


class BasisMismatchError(FVPError, ValueError):
    pass


class UnsupportedDomainError(FVPError, ValueError):
    pass


class NotEllipticError(FVPError, ValueError):
    pass


class OverflowDomainError(FVPError, ArithmeticError):
    """A per-mode amplification exceeded the log cap.

    ``mode`` is 1-based; ``log_amplification`` is ``log|c_j| + t*lambda_j``.
    """

    def __init__(self, mode, log_amplification, log_cap):
        self.mode = int(mode)
        self.log_amplification = float(log_amplification)
        self.log_cap = float(log_cap)
        super().__init__(
            f"mode {self.mode}: log-amplification {self.log_amplification:.6g} "
            f"exceeds log_cap {self.log_cap:.6g}"
        )


class IncompatibleDataError(FVPError):
    """Final data fail the compatibility condition; ``report`` says why."""

    def __init__(self, report):
        self.report = report
        super().__init__(
            f"final data incompatible (worst mode {report.worst_mode}, "
            f"log-amplification {report.worst_log_amplification:.6g})"
        )
