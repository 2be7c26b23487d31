"""Auditable payment ledger built on anonymous accounts."""

from .accounts import (
    AnonymousAccount,
    AuditorPublicKeys,
    LongTermAccount,
    ManagementKeys,
    OwnedAccount,
    RegistrationRequest,
    TraceBundle,
    TraceResult,
    UserSecret,
)
from .protocol import (
    VerificationResult,
    aa_gen,
    load_ledger,
    mint,
    mk_gen,
    register,
    scan,
    scan_output,
    trace,
    trace_output,
    trans,
    uk_gen,
    uk_gen_and_register,
    verf_tx,
    verify_genesis,
)
from .state import GenesisRecord, LedgerState, Reason
from .transaction import Transaction, transaction_element_count

__all__ = [
    "AnonymousAccount",
    "AuditorPublicKeys",
    "GenesisRecord",
    "LedgerState",
    "LongTermAccount",
    "ManagementKeys",
    "OwnedAccount",
    "Reason",
    "RegistrationRequest",
    "TraceBundle",
    "TraceResult",
    "Transaction",
    "UserSecret",
    "VerificationResult",
    "aa_gen",
    "load_ledger",
    "mint",
    "mk_gen",
    "register",
    "scan",
    "scan_output",
    "trace",
    "trace_output",
    "trans",
    "transaction_element_count",
    "uk_gen",
    "uk_gen_and_register",
    "verf_tx",
    "verify_genesis",
]
