"""SilentLedger class tying the auditor, users and the ledger together."""

import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from config import Settings, get_settings, require_bound
from crypto.pairing import PublicParams, setup
from errors import SilentLedgerError
from ledger import (
    AuditorPublicKeys,
    GenesisRecord,
    LedgerState,
    LongTermAccount,
    ManagementKeys,
    OwnedAccount,
    TraceResult,
    Transaction,
    UserSecret,
    VerificationResult,
    load_ledger,
    mint,
    mk_gen,
    scan_output,
    trace,
    trans,
    uk_gen_and_register,
    verf_tx,
)


class SilentLedger:
    """One ledger with its auditor, for demos, tests and the bench."""

    logger = logging.getLogger(__name__)

    def __init__(
        self,
        pp: PublicParams,
        keys_public: AuditorPublicKeys,
        state: LedgerState,
        settings: Settings,
        keys: Optional[ManagementKeys] = None,
    ):
        """Initialize the ledger.

        Args:
            pp: Public parameters.
            keys_public: Auditor public keys every party uses.
            state: Ledger state.
            settings: Range width and BSGS bound.
            keys: Auditor secrets, present only in the auditor's instance.
        """
        self.pp = pp
        self.keys_public = keys_public
        self.state = state
        self.settings = settings
        self.keys = keys

    @classmethod
    def create(
        cls, settings: Optional[Settings] = None, keys: Optional[ManagementKeys] = None
    ) -> "SilentLedger":
        """Create an empty ledger, generating auditor keys when none are given.

        Returns:
            SilentLedger: Ledger with auditor secrets attached.
        """
        settings = settings or get_settings()
        pp = setup(settings.security_level)
        keys = keys or mk_gen(pp)
        cls.logger.info("Created ledger on %s with n=%d", pp.curve_id, settings.range_bits)
        state = LedgerState(settings.range_bits, keys.public())
        return cls(pp, keys.public(), state, settings, keys)

    @classmethod
    def load(
        cls,
        path: Path,
        keys_public: Optional[AuditorPublicKeys] = None,
        settings: Optional[Settings] = None,
        keys: Optional[ManagementKeys] = None,
    ) -> "SilentLedger":
        """Load a saved ledger and re-check every record.

        Args:
            path: Ledger file.
            keys_public: Expected auditor keys; defaults to the keys in the file header.
            settings: Range width and BSGS bound.
            keys: Auditor secrets, when loading the auditor's instance.

        Raises:
            LedgerFileError: If the file is unreadable or fails verification.
            ConfigError: If the BSGS bound is too small for the ledger's range width.
        """
        settings = settings or get_settings()
        pp = setup(settings.security_level)
        state = load_ledger(pp, keys_public, path)
        require_bound(state.range_bits, settings.bsgs_bound)
        return cls(pp, state.auditor_keys, state, settings, keys)

    def save(self, path: Path) -> None:
        self.state.save(path)

    def _auditor_keys(self) -> ManagementKeys:
        if self.keys is None:
            raise SilentLedgerError("this operation needs the auditor's management keys")
        return self.keys

    def register(self, label: str) -> Tuple[LongTermAccount, UserSecret]:
        return uk_gen_and_register(self.pp, self._auditor_keys(), self.state, label)

    def mint(self, payee: LongTermAccount, amount: int) -> GenesisRecord:
        return mint(self.pp, self._auditor_keys(), payee, amount, self.state)

    def pay(
        self,
        inputs: Sequence[OwnedAccount],
        payees: Sequence[LongTermAccount],
        amounts: Sequence[int],
        message: bytes = b"",
    ) -> Transaction:
        return trans(
            self.pp,
            self.keys_public,
            inputs,
            payees,
            amounts,
            message,
            range_bits=self.state.range_bits,
        )

    def submit(self, tx: Transaction, commit: bool = True) -> VerificationResult:
        return verf_tx(self.pp, self.keys_public, tx, self.state, commit=commit)

    def trace(self, tx: Transaction, index: int) -> TraceResult:
        return trace(
            self.pp,
            self._auditor_keys().mk,
            tx,
            index,
            state=self.state,
            bound=self.settings.bsgs_bound,
        )

    def scan(self, secret: UserSecret) -> List[OwnedAccount]:
        """Walk every output on the ledger and return the unspent ones owned by ``secret``."""
        spent = self.state.spent
        owned = []
        for account, bundle in self.state.iter_outputs():
            if account.Q in spent:
                continue
            found = scan_output(
                self.pp, self.keys_public, secret, account, bundle, bound=self.settings.bsgs_bound
            )
            if found is not None:
                owned.append(found)
        self.logger.debug("Scan found %d unspent outputs for %r", len(owned), secret.label)
        return owned
