"""Ledger state: public directory, append-only record log, spent addresses.

Writers (registration, genesis, accepted transactions) take the state lock;
readers get snapshots.
"""

import logging
import struct
import threading
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Dict, FrozenSet, Iterator, List, Mapping, Optional, Set, Tuple, Union

from crypto.encoding import Reader, u32_prefixed
from crypto.pairing import PointG1
from crypto.rac import RacSignature
from crypto.sok import DlProof
from errors import (
    DuplicateRegistrationError,
    EncodingError,
    LedgerFileError,
    LedgerTruncatedError,
    LedgerVersionError,
    TransactionRejectedError,
)

from .accounts import AnonymousAccount, AuditorPublicKeys, LongTermAccount, TraceBundle
from .transaction import Transaction

LEDGER_MAGIC = b"SLDG"
LEDGER_VERSION = 2


class Reason:
    """Transaction verification outcomes."""

    ACCEPTED = "accepted"
    DUPLICATE_INPUT = "duplicate-input"
    UNKNOWN_INPUT = "unknown-input"
    DOUBLE_SPEND = "double-spend"
    DUPLICATE_OUTPUT = "duplicate-output"
    STATEMENT_MISMATCH = "statement-mismatch"
    DEGENERATE_RANDOMNESS = "degenerate-randomness"
    CERTIFICATE_INVALID = "certificate-invalid"
    SOK_CHALLENGE_MISMATCH = "sok-challenge-mismatch"
    RANGE_PROOF_INVALID = "range-proof-invalid"


@dataclass(frozen=True)
class RegistrationRecord:
    account: LongTermAccount

    KIND = 1

    def to_bytes(self) -> bytes:
        return self.account.to_bytes()

    @classmethod
    def read(cls, reader: Reader) -> "RegistrationRecord":
        return cls(account=LongTermAccount.read(reader))


def genesis_body(
    account: AnonymousAccount, bundle: TraceBundle, certificate: RacSignature, amount: int
) -> bytes:
    """Bytes covered by the auditor annotation of a genesis output."""
    return account.to_bytes() + bundle.to_bytes() + certificate.to_bytes() + struct.pack(">Q", amount)


@dataclass(frozen=True)
class GenesisRecord:
    """Minted output with a public amount and the auditor's signature over it."""

    account: AnonymousAccount
    bundle: TraceBundle
    certificate: RacSignature
    amount: int
    annotation: DlProof

    KIND = 2

    def body(self) -> bytes:
        return genesis_body(self.account, self.bundle, self.certificate, self.amount)

    def to_bytes(self) -> bytes:
        return self.body() + self.annotation.to_bytes()

    @classmethod
    def read(cls, reader: Reader) -> "GenesisRecord":
        account = AnonymousAccount.read(reader)
        bundle = TraceBundle.read(reader)
        certificate = RacSignature.read(reader)
        (amount,) = struct.unpack(">Q", reader.take(8))
        return cls(account, bundle, certificate, amount, DlProof.read(reader))


@dataclass(frozen=True)
class TransactionRecord:
    tx: Transaction

    KIND = 3

    def to_bytes(self) -> bytes:
        return self.tx.to_bytes()

    @classmethod
    def read(cls, reader: Reader) -> "TransactionRecord":
        return cls(tx=Transaction.read(reader))


LedgerRecord = Union[RegistrationRecord, GenesisRecord, TransactionRecord]
_RECORD_READERS: Dict[int, Callable[[Reader], LedgerRecord]] = {
    RegistrationRecord.KIND: RegistrationRecord.read,
    GenesisRecord.KIND: GenesisRecord.read,
    TransactionRecord.KIND: TransactionRecord.read,
}


class LedgerState:
    """Directory, record log, spent set and the map of live outputs.

    Args:
        range_bits: Bit-width ``n`` that range proofs on this ledger must use.
        auditor: Public keys of the auditor the ledger was created under. Needed
            to save the ledger; the file header records them.
    """

    logger = logging.getLogger(__name__)

    def __init__(self, range_bits: int, auditor: Optional[AuditorPublicKeys] = None):
        self.range_bits = range_bits
        self.auditor = auditor
        self.lock = threading.RLock()
        self._directory: Dict[PointG1, LongTermAccount] = {}
        self._labels: Dict[str, PointG1] = {}
        self._records: List[LedgerRecord] = []
        self._spent: Set[PointG1] = set()
        self._outputs: Dict[PointG1, PointG1] = {}

    @property
    def auditor_keys(self) -> AuditorPublicKeys:
        """Auditor keys the ledger was created under.

        Raises:
            LedgerFileError: If the ledger was built without them.
        """
        if self.auditor is None:
            raise LedgerFileError("ledger has no auditor keys")
        return self.auditor

    @property
    def directory(self) -> Mapping[PointG1, LongTermAccount]:
        with self.lock:
            return dict(self._directory)

    @property
    def records(self) -> Tuple[LedgerRecord, ...]:
        with self.lock:
            return tuple(self._records)

    @property
    def spent(self) -> FrozenSet[PointG1]:
        with self.lock:
            return frozenset(self._spent)

    @property
    def outputs(self) -> Mapping[PointG1, PointG1]:
        """Every output address on the ledger mapped to its encrypted amount."""
        with self.lock:
            return dict(self._outputs)

    def transactions(self) -> List[Transaction]:
        return [record.tx for record in self.records if isinstance(record, TransactionRecord)]

    def lookup(self, S: PointG1) -> Optional[LongTermAccount]:
        with self.lock:
            return self._directory.get(S)

    def lookup_label(self, label: str) -> Optional[LongTermAccount]:
        with self.lock:
            S = self._labels.get(label)
            return None if S is None else self._directory[S]

    def iter_outputs(self) -> Iterator[Tuple[AnonymousAccount, TraceBundle]]:
        """Yield every genesis and transaction output with its trace bundle, in log order."""
        for record in self.records:
            if isinstance(record, GenesisRecord):
                yield record.account, record.bundle
            elif isinstance(record, TransactionRecord):
                yield from zip(record.tx.outputs, record.tx.bundles)

    def add_registration(self, account: LongTermAccount) -> None:
        """Add a certified account to the directory.

        Raises:
            DuplicateRegistrationError: If the address or the label is taken.
        """
        with self.lock:
            if account.S in self._directory:
                raise DuplicateRegistrationError("long-term address is already registered")
            if account.label in self._labels:
                raise DuplicateRegistrationError(f"label {account.label!r} is already registered")
            self._directory[account.S] = account
            self._labels[account.label] = account.S
            self._records.append(RegistrationRecord(account))
        self.logger.info("Registered long-term account %r", account.label)

    def append_genesis(self, record: GenesisRecord) -> None:
        """Append a minted output.

        Raises:
            TransactionRejectedError: If the output address already exists.
        """
        with self.lock:
            if record.account.Q in self._outputs:
                raise TransactionRejectedError(Reason.DUPLICATE_OUTPUT)
            self._outputs[record.account.Q] = record.account.cm
            self._records.append(record)
        self.logger.info("Appended genesis output of %d", record.amount)

    def check_transaction(self, tx: Transaction) -> Optional[str]:
        """Run the state-dependent checks; return a rejection reason or None."""
        with self.lock:
            return self._check_locked(tx)

    def append_transaction(self, tx: Transaction) -> Optional[str]:
        """Re-check against current state and append atomically.

        Returns:
            Optional[str]: Rejection reason, or None when the transaction was appended.
        """
        with self.lock:
            reason = self._check_locked(tx)
            if reason is not None:
                return reason
            for account in tx.inputs:
                self._spent.add(account.Q)
            for account in tx.outputs:
                self._outputs[account.Q] = account.cm
            self._records.append(TransactionRecord(tx))
        self.logger.info("Appended transaction %s", tx.tx_id[:16])
        return None

    def _check_locked(self, tx: Transaction) -> Optional[str]:
        in1, in2 = tx.inputs
        if in1.Q == in2.Q:
            return Reason.DUPLICATE_INPUT
        for account in tx.inputs:
            if account.Q in self._spent:
                return Reason.DOUBLE_SPEND
            if self._outputs.get(account.Q) != account.cm:
                return Reason.UNKNOWN_INPUT
        out1, out2 = tx.outputs
        if out1.Q == out2.Q or out1.Q in self._outputs or out2.Q in self._outputs:
            return Reason.DUPLICATE_OUTPUT
        return None

    def to_bytes(self) -> bytes:
        """Encode the header (version, width, auditor keys) and every record.

        Raises:
            LedgerFileError: If the ledger has no auditor keys to record.
        """
        auditor = self.auditor_keys
        with self.lock:
            records = list(self._records)
        parts = [
            LEDGER_MAGIC,
            struct.pack(">HB", LEDGER_VERSION, self.range_bits),
            auditor.T.to_bytes(),
            auditor.X.to_bytes(),
        ]
        for record in records:
            parts.append(struct.pack(">B", record.KIND) + u32_prefixed(record.to_bytes()))
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "LedgerState":
        """Rebuild a ledger by replaying its records.

        Raises:
            LedgerFileError: If the magic is wrong, a key or record does not
                decode, or replaying a record fails.
            LedgerVersionError: If the file uses another format version.
            LedgerTruncatedError: If the file ends inside a header or record.
        """
        reader = Reader(data, truncated=LedgerTruncatedError)
        if reader.take(len(LEDGER_MAGIC)) != LEDGER_MAGIC:
            raise LedgerFileError("not a ledger file")
        version = reader.u16()
        if version != LEDGER_VERSION:
            raise LedgerVersionError(f"ledger version {version} is not supported")
        range_bits = reader.u8()
        try:
            auditor = AuditorPublicKeys(T=reader.g1(), X=reader.g2())
        except EncodingError as exc:
            raise LedgerFileError(f"ledger header holds invalid auditor keys: {exc}") from exc
        state = cls(range_bits, auditor)
        while reader.remaining:
            kind = reader.u8()
            body = reader.u32_prefixed()
            read_record = _RECORD_READERS.get(kind)
            if read_record is None:
                raise LedgerFileError(f"unknown record kind {kind}")
            record_reader = Reader(body, truncated=LedgerTruncatedError)
            try:
                record = read_record(record_reader)
                record_reader.finish()
            except EncodingError as exc:
                raise LedgerFileError(f"unreadable record of kind {kind}: {exc}") from exc
            state._replay(record)
        return state

    def _replay(self, record: LedgerRecord) -> None:
        try:
            if isinstance(record, RegistrationRecord):
                self.add_registration(record.account)
            elif isinstance(record, GenesisRecord):
                self.append_genesis(record)
            else:
                reason = self.append_transaction(record.tx)
                if reason is not None:
                    raise TransactionRejectedError(reason)
        except (DuplicateRegistrationError, TransactionRejectedError) as exc:
            raise LedgerFileError(f"ledger replay failed: {exc}") from exc

    def save(self, path: Path) -> None:
        path.write_bytes(self.to_bytes())
        self.logger.debug("Saved ledger with %d records to %s", len(self._records), path)

    @classmethod
    def load(cls, path: Path) -> "LedgerState":
        return cls.from_bytes(path.read_bytes())
