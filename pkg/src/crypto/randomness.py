"""Randomness source for key generation, blinding and proofs.

Sampling uses :mod:`secrets` unless a seeded generator is installed for the
current context with :func:`seeded`.
"""

import contextvars
import random
import secrets
from contextlib import contextmanager
from typing import Iterator, Optional

_current_rng: contextvars.ContextVar[Optional[random.Random]] = contextvars.ContextVar(
    "silentledger_rng", default=None
)


@contextmanager
def seeded(seed: int) -> Iterator[random.Random]:
    """Install a deterministic generator for the current context."""
    rng = random.Random(seed)
    token = _current_rng.set(rng)
    try:
        yield rng
    finally:
        _current_rng.reset(token)


def is_seeded() -> bool:
    """Return whether a deterministic generator is active."""
    return _current_rng.get() is not None


def random_below(bound: int) -> int:
    """Sample uniformly from ``[0, bound)``."""
    rng = _current_rng.get()
    if rng is None:
        return secrets.randbelow(bound)
    return rng.randrange(bound)


def random_nonzero_below(bound: int) -> int:
    """Sample uniformly from ``[1, bound)``."""
    return random_below(bound - 1) + 1
