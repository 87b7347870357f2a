"""Exception hierarchy shared by the numerical kernels and the CLI"""


class VerificationError(Exception):
    """Base class for every error raised by rtf-verify"""

    def to_dict(self) -> dict:
        """Machine-readable error block for reports"""
        return {"type": type(self).__name__, "message": str(self)}


class PoleError(VerificationError):
    """Argument sits on a pole of Gamma, zeta or a sine denominator"""


class DomainError(VerificationError):
    """Argument outside the region a routine supports"""


class ConvergenceError(VerificationError):
    """Series or quadrature did not reach its tolerance within the cap"""


class RangeError(VerificationError):
    """Requested index lies beyond a coefficient table"""


class ResourceError(VerificationError):
    """Requested table size exceeds the configured cap"""


class UnsupportedWeightError(VerificationError):
    """Weight outside {12, 16, 18, 20, 22, 26}"""


class RegionError(VerificationError):
    """Spectral parameters outside the region where the identity holds"""


class ConfigError(VerificationError):
    """Invalid tolerance configuration"""
