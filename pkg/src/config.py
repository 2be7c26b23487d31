"""Shared configuration loading."""

import os
from dataclasses import dataclass
from functools import lru_cache

from dotenv import load_dotenv

from errors import ConfigError

# Load environment variables once for the package.
load_dotenv(override=False)

DEFAULT_SECURITY_LEVEL = 128
DEFAULT_RANGE_BITS = 33
DEFAULT_BSGS_BOUND = 2**32
DEFAULT_BENCH_ITERATIONS = 1000
DEFAULT_BACKEND = "auto"


@dataclass(frozen=True)
class Settings:
    """Runtime settings resolved from ``SL_*`` environment variables."""

    security_level: int = DEFAULT_SECURITY_LEVEL
    range_bits: int = DEFAULT_RANGE_BITS
    bsgs_bound: int = DEFAULT_BSGS_BOUND
    bench_iterations: int = DEFAULT_BENCH_ITERATIONS
    bench_workers: int = 1
    log_level: str = "INFO"

    def __post_init__(self) -> None:
        if not 2 <= self.range_bits <= 64:
            raise ConfigError(f"SL_RANGE_BITS must be in [2, 64], got {self.range_bits}")
        if self.bsgs_bound < 1:
            raise ConfigError(f"SL_BSGS_BOUND must be positive, got {self.bsgs_bound}")
        require_bound(self.range_bits, self.bsgs_bound)
        if self.bench_iterations < 1:
            raise ConfigError("SL_BENCH_ITERATIONS must be at least 1")
        if self.bench_workers < 1:
            raise ConfigError("SL_BENCH_WORKERS must be at least 1")

    @property
    def max_amount(self) -> int:
        """Largest amount a range proof of this width admits."""
        return 2 ** (self.range_bits - 1) - 1

    @classmethod
    def from_env(cls) -> "Settings":
        """Build settings from the process environment.

        Returns:
            Settings: Resolved settings.

        Raises:
            ConfigError: If a variable does not parse.
        """
        return cls(
            security_level=_int_env("SL_SECURITY_LEVEL", DEFAULT_SECURITY_LEVEL),
            range_bits=_int_env("SL_RANGE_BITS", DEFAULT_RANGE_BITS),
            bsgs_bound=_int_env("SL_BSGS_BOUND", DEFAULT_BSGS_BOUND),
            bench_iterations=_int_env("SL_BENCH_ITERATIONS", DEFAULT_BENCH_ITERATIONS),
            bench_workers=_int_env("SL_BENCH_WORKERS", 1),
            log_level=os.getenv("SL_LOG_LEVEL", "INFO").strip().upper() or "INFO",
        )


@lru_cache(maxsize=1)
def get_settings() -> Settings:
    """Return process-wide settings, read once."""
    return Settings.from_env()


def require_bound(range_bits: int, bsgs_bound: int) -> None:
    """Refuse a BSGS bound that cannot recover every amount a range proof admits.

    Raises:
        ConfigError: If ``bsgs_bound < 2**(range_bits - 1)``.
    """
    needed = 2 ** (range_bits - 1)
    if bsgs_bound < needed:
        raise ConfigError(
            f"SL_BSGS_BOUND={bsgs_bound} cannot recover every amount below "
            f"2**{range_bits - 1}; use at least {needed}"
        )


def backend_name() -> str:
    """Curve backend requested by ``SL_BACKEND`` (auto, arkworks or py_ecc)."""
    return os.getenv("SL_BACKEND", DEFAULT_BACKEND).strip().lower() or DEFAULT_BACKEND


def _int_env(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    if not raw:
        return default
    return _parse_int(name, raw)


def _parse_int(name: str, raw: str) -> int:
    # Powers of two are common for bounds ("2**32").
    if "**" in raw:
        base, _, exponent = raw.partition("**")
        try:
            return int(base.strip()) ** int(exponent.strip())
        except ValueError as exc:
            raise ConfigError(f"{name} is not an integer expression: {raw!r}") from exc
    try:
        return int(raw, 0)
    except ValueError as exc:
        raise ConfigError(f"{name} is not an integer: {raw!r}") from exc
