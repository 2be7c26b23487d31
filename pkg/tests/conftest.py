import os
from dataclasses import dataclass
from typing import Iterator, List, Tuple

import pytest

from config import Settings, get_settings
from crypto.pairing import PublicParams, setup
from ledger import LongTermAccount, OwnedAccount, Transaction, UserSecret
from silent_ledger import SilentLedger

# Small widths keep proofs and BSGS tables fast; amounts stay below 2**(RANGE_BITS-1).
RANGE_BITS = 5
BSGS_BOUND = 1 << 8

# Seed handed to seeded CLI runs; SL_SEED overrides it for reproducing a failure.
TEST_SEED = int(os.getenv("SL_SEED", "7"), 0)

_KEPT_VARIABLES = ("SL_TEST_TRIALS", "SL_FULL_ACCEPTANCE", "SL_BACKEND")


def trials(default: int = 3) -> int:
    """Repetitions for randomized checks; SL_FULL_ACCEPTANCE=1 runs the long sweeps."""
    if os.getenv("SL_TEST_TRIALS"):
        return int(os.environ["SL_TEST_TRIALS"])
    return 1000 if os.getenv("SL_FULL_ACCEPTANCE") == "1" else default


@pytest.fixture(autouse=True)
def _fresh_settings(monkeypatch: pytest.MonkeyPatch) -> Iterator[None]:
    for name in list(os.environ):
        if name.startswith("SL_") and name not in _KEPT_VARIABLES:
            monkeypatch.delenv(name)
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture(scope="session")
def pp() -> PublicParams:
    return setup(128)


@pytest.fixture(scope="session")
def settings() -> Settings:
    return Settings(range_bits=RANGE_BITS, bsgs_bound=BSGS_BOUND, bench_iterations=1)


@dataclass
class Funded:
    """Ledger with alice holding two minted outputs and bob registered."""

    ledger: SilentLedger
    alice: LongTermAccount
    alice_secret: UserSecret
    bob: LongTermAccount
    bob_secret: UserSecret
    coins: List[OwnedAccount]


def make_funded(settings: Settings, amounts: Tuple[int, ...] = (5, 7)) -> Funded:
    ledger = SilentLedger.create(settings)
    alice, alice_secret = ledger.register("alice")
    bob, bob_secret = ledger.register("bob")
    for amount in amounts:
        ledger.mint(alice, amount)
    return Funded(ledger, alice, alice_secret, bob, bob_secret, ledger.scan(alice_secret))


@pytest.fixture
def funded(settings: Settings) -> Funded:
    return make_funded(settings)


@dataclass
class Paid:
    funded: Funded
    tx: Transaction


@pytest.fixture(scope="module")
def paid(settings: Settings) -> Paid:
    """One valid 5+7 -> 9(bob)+3(alice) transaction, not yet submitted."""
    funded = make_funded(settings)
    tx = funded.ledger.pay(funded.coins, [funded.bob, funded.alice], [9, 3], b"invoice 42")
    return Paid(funded, tx)
