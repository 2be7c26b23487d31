"""Exception hierarchy shared by the crypto layer, the ledger and the CLI."""


class SilentLedgerError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(SilentLedgerError, ValueError):
    """An environment variable or configuration file holds an invalid value."""


class UnsupportedSecurityLevelError(SilentLedgerError, ValueError):
    """No curve descriptor is configured for the requested security level."""


class EncodingError(SilentLedgerError, ValueError):
    """Bytes could not be decoded into a protocol object."""


class LengthError(EncodingError):
    """Input does not have the exact expected length."""


class PointNotOnCurveError(EncodingError):
    """Compressed bytes do not describe a point on the curve."""


class PointSubgroupError(EncodingError):
    """Point is on the curve but outside the prime-order subgroup."""


class ScalarRangeError(EncodingError):
    """Encoded scalar is not reduced modulo the group order."""


class MalformedProofError(EncodingError):
    """Proof transcript is truncated or has an impossible shape."""


class WitnessError(SilentLedgerError, ValueError):
    """Witness does not satisfy the statement it is supposed to prove."""


class RangeViolationError(SilentLedgerError, ValueError):
    """Amount lies outside the provable range."""


class ImbalanceError(SilentLedgerError, ValueError):
    """Input amounts do not add up to output amounts."""


class ZeroRandomnessError(SilentLedgerError, ValueError):
    """Zero was supplied where the protocol needs non-zero randomness."""


class AmountNotFoundError(SilentLedgerError, LookupError):
    """Bounded discrete logarithm search found no amount in range."""


class DuplicateRegistrationError(SilentLedgerError, ValueError):
    """Long-term address is already present in the directory."""


class RegistrationError(SilentLedgerError, ValueError):
    """Registration request failed the proof-of-possession check."""


class LedgerFileError(SilentLedgerError, ValueError):
    """Ledger file cannot be read."""


class LedgerVersionError(LedgerFileError):
    """Ledger file was written by an incompatible format version."""


class LedgerTruncatedError(LedgerFileError):
    """Ledger file ends in the middle of a record."""


class TransactionRejectedError(SilentLedgerError):
    """Transaction failed validation.

    Args:
        reason: Rejection reason code.
    """

    def __init__(self, reason: str):
        super().__init__(f"transaction rejected: {reason}")
        self.reason = reason
