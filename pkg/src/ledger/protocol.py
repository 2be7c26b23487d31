"""Protocol algorithms: key generation, registration, anonymous accounts,
transactions, verification, tracing, scanning and genesis minting."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import List, Mapping, Optional, Sequence, Tuple

from config import DEFAULT_BSGS_BOUND, DEFAULT_RANGE_BITS
from crypto import rac
from crypto.pairing import PointG1, PublicParams, bsgs_dlog
from crypto.primitives import (
    ake_shared,
    of_map,
    pke_decrypt,
    pke_encrypt,
    pke_keygen,
    rf_encode,
    ske_decrypt,
)
from crypto.randomness import random_nonzero_below
from crypto.rangeproof import (
    RangeStatement,
    RangeWitness,
    aggregate_prove,
    aggregate_verify,
)
from crypto.sok import Tx1Witness, prove_dl, prove_tx1, verify_dl, verify_tx1
from errors import (
    AmountNotFoundError,
    DuplicateRegistrationError,
    ImbalanceError,
    LedgerFileError,
    RangeViolationError,
    RegistrationError,
    ZeroRandomnessError,
)

from .accounts import (
    AnonymousAccount,
    AuditorPublicKeys,
    LongTermAccount,
    ManagementKeys,
    OutputSecrets,
    OwnedAccount,
    RegistrationRequest,
    TraceBundle,
    TraceResult,
    UserSecret,
    registration_message,
)
from .state import (
    GenesisRecord,
    LedgerState,
    Reason,
    RegistrationRecord,
    TransactionRecord,
    genesis_body,
)
from .transaction import Transaction, build_statement

logger = logging.getLogger(__name__)

GENESIS_DOMAIN = b"SL/GENESIS"


def mk_gen(pp: PublicParams) -> ManagementKeys:
    """Generate the auditor's tracing pair ``(mk, T)`` and signing pair ``(x, X)``."""
    mk = random_nonzero_below(pp.q)
    signing, verif = rac.skey_gen(pp)
    return ManagementKeys(mk=mk, T=pp.G1 * mk, x=signing.x, X=verif.X)


def uk_gen(pp: PublicParams, label: str) -> Tuple[UserSecret, RegistrationRequest]:
    """User side of registration: long-term address, viewing pair and proof of possession.

    Args:
        pp: Public parameters.
        label: Real-world identity the auditor binds to the account.

    Returns:
        Tuple[UserSecret, RegistrationRequest]: Secrets kept by the user and the
        request sent to the auditor.
    """
    identity = rac.cert_gen(pp)
    assert identity.r is not None
    viewing = pke_keygen(pp)
    message = registration_message(identity.C, viewing.public, label)
    pok = prove_dl(pp, pp.G1, identity.C, identity.r, message)
    secret = UserSecret(sk=identity.r, vk=viewing.secret, S=identity.C, V=viewing.public, label=label)
    return secret, RegistrationRequest(S=identity.C, V=viewing.public, label=label, pok=pok)


def register(
    pp: PublicParams, keys: ManagementKeys, request: RegistrationRequest, state: LedgerState
) -> LongTermAccount:
    """Auditor side of registration: check possession, certify ``S``, publish.

    Raises:
        RegistrationError: If the proof of possession fails.
        DuplicateRegistrationError: If ``S`` or the label is already in the directory.
    """
    if not verify_dl(pp, pp.G1, request.S, request.pok, request.bound_message()):
        raise RegistrationError(f"proof of possession failed for {request.label!r}")
    if state.lookup(request.S) is not None:
        raise DuplicateRegistrationError("long-term address is already registered")
    sigma = rac.sign(pp, keys.signing_key, request.S)
    account = LongTermAccount(S=request.S, V=request.V, sigma=sigma, label=request.label)
    state.add_registration(account)
    return account


def uk_gen_and_register(
    pp: PublicParams, keys: ManagementKeys, state: LedgerState, label: str
) -> Tuple[LongTermAccount, UserSecret]:
    secret, request = uk_gen(pp, label)
    return register(pp, keys, request, state), secret


@dataclass(frozen=True)
class GeneratedOutput:
    """Fresh anonymous account for a payee plus what the payer needs to prove it."""

    account: AnonymousAccount
    bundle: TraceBundle
    certificate: rac.RacSignature
    secrets: OutputSecrets


def aa_gen(
    pp: PublicParams,
    v: int,
    payee: LongTermAccount,
    keys_public: AuditorPublicKeys,
    *,
    range_bits: int = DEFAULT_RANGE_BITS,
    gamma: Optional[int] = None,
    r: Optional[int] = None,
) -> GeneratedOutput:
    """Derive an anonymous account for ``payee`` holding ``v``.

    Args:
        pp: Public parameters.
        v: Amount, in ``[0, 2**(range_bits-1))``.
        payee: Registered long-term account of the payee.
        keys_public: Auditor public keys.
        range_bits: Bit-width ``n`` of the ledger's range proofs.
        gamma: Encryption randomness for the trace bundle; sampled when omitted.
        r: Ephemeral key; sampled when omitted.

    Returns:
        GeneratedOutput: Account, trace bundle, adapted certificate and witnesses.

    Raises:
        RangeViolationError: If ``v`` is out of range.
        ZeroRandomnessError: If ``gamma`` or ``r`` is zero.
    """
    if not 0 <= v < 1 << (range_bits - 1):
        raise RangeViolationError(f"amount {v} is outside [0, 2**{range_bits - 1})")
    if (gamma is not None and gamma % pp.q == 0) or (r is not None and r % pp.q == 0):
        raise ZeroRandomnessError("trace bundle randomness must be non-zero")
    r = random_nonzero_below(pp.q) if r is None else r % pp.q
    gamma = random_nonzero_below(pp.q) if gamma is None else gamma % pp.q

    c = ake_shared(r, payee.V).scalar
    ct, gamma = pke_encrypt(pp, of_map(pp, c), keys_public.T, gamma)
    Q = rac.rndmz(payee.S, c)
    certificate = rac.adapt(pp, payee.sigma, c)
    cm = rf_encode(pp, v) + keys_public.T * c
    W = certificate.Z - certificate.T_sig * c
    return GeneratedOutput(
        account=AnonymousAccount(Q=Q, cm=cm),
        bundle=TraceBundle(ct=ct, R=pp.G1 * r),
        certificate=certificate,
        secrets=OutputSecrets(v=v, c=c, gamma=gamma, r=r, S_hat=payee.S, W=W),
    )


def trans(
    pp: PublicParams,
    keys_public: AuditorPublicKeys,
    inputs: Sequence[OwnedAccount],
    payees: Sequence[LongTermAccount],
    amounts: Sequence[int],
    message: bytes = b"",
    *,
    range_bits: int = DEFAULT_RANGE_BITS,
    check_balance: bool = True,
) -> Transaction:
    """Build a 2-in/2-out transaction.

    No payee secret is needed: outputs are derived from the payees' public
    long-term accounts.

    Args:
        pp: Public parameters.
        keys_public: Auditor public keys.
        inputs: Two owned accounts being spent.
        payees: Two recipients.
        amounts: Amount sent to each recipient.
        message: Context bytes bound into the SoK.
        range_bits: Bit-width ``n`` of the range proof.
        check_balance: Refuse imbalanced amounts. Disabled only by tests that
            need a transaction with a false statement.

    Returns:
        Transaction: Transaction ready for :func:`verf_tx`.

    Raises:
        ValueError: If there are not exactly two inputs, payees and amounts.
        ImbalanceError: If input and output amounts differ.
        RangeViolationError: If an output amount is out of range.
    """
    if not len(inputs) == len(payees) == len(amounts) == 2:
        raise ValueError("transactions spend exactly two inputs to exactly two payees")
    if check_balance and sum(i.amount for i in inputs) != sum(amounts):
        raise ImbalanceError(
            f"inputs hold {sum(i.amount for i in inputs)} but outputs send {sum(amounts)}"
        )

    generated = [
        aa_gen(pp, amount, payee, keys_public, range_bits=range_bits)
        for amount, payee in zip(amounts, payees)
    ]
    out1, out2 = generated
    in1, in2 = inputs
    inputs_public = (in1.account, in2.account)
    outputs_public = (out1.account, out2.account)
    bundles = (out1.bundle, out2.bundle)
    certificates = (out1.certificate, out2.certificate)
    statement = build_statement(
        inputs_public, outputs_public, bundles, certificates, message, keys_public.T, pp.G1
    )
    witness = Tx1Witness(
        v=(in1.amount, in2.amount),
        v_hat=(out1.secrets.v, out2.secrets.v),
        c=(in1.c, in2.c),
        c_hat=(out1.secrets.c, out2.secrets.c),
        sc=(in1.spend_key, in2.spend_key),
        gamma=(out1.secrets.gamma, out2.secrets.gamma),
        r=(out1.secrets.r, out2.secrets.r),
        S_hat=(out1.secrets.S_hat, out2.secrets.S_hat),
        W=(out1.secrets.W, out2.secrets.W),
    )
    sok = prove_tx1(pp, statement, witness, validate=check_balance)
    range_statement = RangeStatement.build(
        pp, keys_public.T, [out1.account.cm, out2.account.cm], range_bits
    )
    range_proof = aggregate_prove(
        pp,
        range_statement,
        RangeWitness(values=tuple(amounts), blinders=(out1.secrets.c, out2.secrets.c)),
    )
    tx = Transaction(
        inputs=inputs_public,
        outputs=outputs_public,
        bundles=bundles,
        certificates=certificates,
        message=message,
        sok=sok,
        range_proof=range_proof,
    )
    logger.debug("Built transaction %s", tx.tx_id[:16])
    return tx


@dataclass(frozen=True)
class VerificationResult:
    """Outcome of :func:`verf_tx`; truthy iff accepted."""

    accepted: bool
    reason: str

    def __bool__(self) -> bool:
        return self.accepted


def verf_tx(
    pp: PublicParams,
    keys_public: AuditorPublicKeys,
    tx: Transaction,
    state: LedgerState,
    *,
    commit: bool = True,
) -> VerificationResult:
    """Validate a transaction from public data and, if accepted, append it.

    State checks run first, then the certificates, the SoK and the range proof.

    Args:
        pp: Public parameters.
        keys_public: Auditor public keys.
        tx: Transaction to check.
        state: Ledger to check against.
        commit: Append and mark inputs spent on acceptance.

    Returns:
        VerificationResult: Acceptance flag and reason code. State is unchanged on rejection.
    """
    reason = state.check_transaction(tx) or _check_public(pp, keys_public, tx, state.range_bits)
    if reason is None and commit:
        reason = state.append_transaction(tx)
    if reason is not None:
        logger.warning("Rejected transaction %s: %s", tx.tx_id[:16], reason)
        return VerificationResult(False, reason)
    logger.debug("Accepted transaction %s", tx.tx_id[:16])
    return VerificationResult(True, Reason.ACCEPTED)


def _check_public(
    pp: PublicParams, keys_public: AuditorPublicKeys, tx: Transaction, range_bits: int
) -> Optional[str]:
    range_statement = RangeStatement.build(pp, keys_public.T, [o.cm for o in tx.outputs], range_bits)
    if len(tx.range_proof.L) != range_statement.rounds:
        return Reason.STATEMENT_MISMATCH
    for bundle in tx.bundles:
        if bundle.ct.C.is_identity() or bundle.R.is_identity():
            return Reason.DEGENERATE_RANDOMNESS
    certificates = [(output.Q, sigma) for output, sigma in zip(tx.outputs, tx.certificates)]
    if not rac.verify_batch(pp, keys_public.verif_key, certificates):
        return Reason.CERTIFICATE_INVALID
    if not verify_tx1(pp, tx.statement(keys_public.T, pp.G1), tx.sok):
        return Reason.SOK_CHALLENGE_MISMATCH
    if not aggregate_verify(pp, range_statement, tx.range_proof):
        return Reason.RANGE_PROOF_INVALID
    return None


def trace_output(
    pp: PublicParams,
    mk: int,
    account: AnonymousAccount,
    bundle: TraceBundle,
    *,
    directory: Optional[Mapping[PointG1, LongTermAccount]] = None,
    bound: int = DEFAULT_BSGS_BOUND,
) -> TraceResult:
    """Recover the payee address and amount of an output with the tracing key alone.

    Raises:
        AmountNotFoundError: If the amount is not below ``bound``.
    """
    K = pke_decrypt(bundle.ct, mk)
    S = ske_decrypt(account.Q, K)
    vx = account.cm - K * mk
    amount = bsgs_dlog(pp.G1, vx, bound)
    if amount is None:
        raise AmountNotFoundError(f"no amount below {bound} matches the output")
    label = None
    if directory is not None:
        entry = directory.get(S)
        label = entry.label if entry is not None else None
    return TraceResult(S=S, amount=amount, label=label)


def trace(
    pp: PublicParams,
    mk: int,
    tx: Transaction,
    index: int,
    *,
    state: Optional[LedgerState] = None,
    bound: int = DEFAULT_BSGS_BOUND,
) -> TraceResult:
    """Trace output ``index`` (0 or 1) of ``tx``; labels come from ``state`` when given."""
    return trace_output(
        pp,
        mk,
        tx.outputs[index],
        tx.bundles[index],
        directory=state.directory if state is not None else None,
        bound=bound,
    )


def scan_output(
    pp: PublicParams,
    keys_public: AuditorPublicKeys,
    secret: UserSecret,
    account: AnonymousAccount,
    bundle: TraceBundle,
    *,
    bound: int = DEFAULT_BSGS_BOUND,
) -> Optional[OwnedAccount]:
    """Check whether an output belongs to ``secret`` and recover it.

    Returns:
        Optional[OwnedAccount]: The spendable account, or None for someone else's output.

    Raises:
        AmountNotFoundError: If the address matches but the amount does not decode.
    """
    c = ake_shared(secret.vk, bundle.R).scalar
    if account.Q != secret.S + pp.G1 * c:
        return None
    amount = bsgs_dlog(pp.G1, account.cm - keys_public.T * c, bound)
    if amount is None:
        raise AmountNotFoundError("owned output carries an undecodable amount")
    return OwnedAccount(account=account, amount=amount, c=c, spend_key=(secret.sk + c) % pp.q)


def scan(
    pp: PublicParams,
    keys_public: AuditorPublicKeys,
    secret: UserSecret,
    tx: Transaction,
    *,
    bound: int = DEFAULT_BSGS_BOUND,
) -> List[OwnedAccount]:
    """Return the outputs of ``tx`` that belong to ``secret``."""
    found = []
    for account, bundle in zip(tx.outputs, tx.bundles):
        owned = scan_output(pp, keys_public, secret, account, bundle, bound=bound)
        if owned is not None:
            found.append(owned)
    return found


def mint(
    pp: PublicParams,
    keys: ManagementKeys,
    payee: LongTermAccount,
    amount: int,
    state: LedgerState,
) -> GenesisRecord:
    """Issue a genesis output to a registered account and append it.

    Raises:
        RangeViolationError: If ``amount`` exceeds the ledger's range.
        TransactionRejectedError: If the output address already exists.
    """
    output = aa_gen(pp, amount, payee, keys.public(), range_bits=state.range_bits)
    body = genesis_body(output.account, output.bundle, output.certificate, amount)
    annotation = prove_dl(pp, pp.G1, keys.T, keys.mk, GENESIS_DOMAIN + body)
    record = GenesisRecord(output.account, output.bundle, output.certificate, amount, annotation)
    state.append_genesis(record)
    return record


def verify_genesis(pp: PublicParams, keys_public: AuditorPublicKeys, record: GenesisRecord) -> bool:
    """Check the auditor annotation and the adapted certificate of a genesis output."""
    if not verify_dl(pp, pp.G1, keys_public.T, record.annotation, GENESIS_DOMAIN + record.body()):
        return False
    return rac.verify(pp, keys_public.verif_key, record.account.Q, record.certificate)


def load_ledger(
    pp: PublicParams, keys_public: Optional[AuditorPublicKeys], path: Path
) -> LedgerState:
    """Load a ledger file and re-check every record under its auditor keys.

    Registrations are checked against their certificates, genesis outputs
    against the auditor annotation, and transactions against their
    certificates, SoK and range proof.

    Args:
        pp: Public parameters.
        keys_public: Keys the caller expects; None trusts the keys in the file header.
        path: Ledger file.

    Raises:
        LedgerFileError: If the file is unreadable, was created under other
            keys, or a record fails its checks.
    """
    state = LedgerState.load(path)
    stored = state.auditor_keys
    if keys_public is not None and keys_public != stored:
        raise LedgerFileError("ledger was created under other auditor keys")
    for record in state.records:
        if isinstance(record, RegistrationRecord):
            account = record.account
            if not rac.verify(pp, stored.verif_key, account.S, account.sigma):
                raise LedgerFileError(f"registration of {account.label!r} has an invalid certificate")
        elif isinstance(record, GenesisRecord):
            if not verify_genesis(pp, stored, record):
                raise LedgerFileError("genesis record fails its auditor annotation")
        elif isinstance(record, TransactionRecord):
            reason = _check_public(pp, stored, record.tx, state.range_bits)
            if reason is not None:
                raise LedgerFileError(f"transaction {record.tx.tx_id[:16]} fails verification: {reason}")
    logger.debug("Loaded ledger %s with %d records", path, len(state.records))
    return state
