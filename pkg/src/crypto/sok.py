"""Signatures of knowledge compiled from Sigma protocols with Fiat-Shamir.

Provides the discrete-log proof, the linear "bounded" discrete-log proof and the
multi-clause proof that binds a 2-in/2-out transaction statement. Responses use
the convention ``z = r - w*e (mod q)``.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from errors import WitnessError

from .encoding import Reader, u32_prefixed
from .pairing import (
    G1_BYTES,
    SCALAR_BYTES,
    TAG_BDL,
    TAG_DL,
    TAG_TX1,
    PointG1,
    PublicParams,
    Transcript,
    hash_to_scalar,
    serialize_scalar,
)
from .randomness import random_below

logger = logging.getLogger(__name__)

Pair = Tuple[PointG1, PointG1]
ScalarPair = Tuple[int, int]


@dataclass(frozen=True)
class DlProof:
    """Proof of knowledge of ``w`` with ``y = w*base``."""

    challenge: int
    response: int

    SIZE = 2 * SCALAR_BYTES

    def to_bytes(self) -> bytes:
        return serialize_scalar(self.challenge) + serialize_scalar(self.response)

    @classmethod
    def read(cls, reader: Reader) -> "DlProof":
        return cls(challenge=reader.scalar(), response=reader.scalar())


@dataclass(frozen=True)
class BdlProof:
    """Proof of one ``w`` with ``y1 = w*base`` and ``y2 = (a*w + b)*base``."""

    challenge: int
    response: int

    def to_bytes(self) -> bytes:
        return serialize_scalar(self.challenge) + serialize_scalar(self.response)

    @classmethod
    def read(cls, reader: Reader) -> "BdlProof":
        return cls(challenge=reader.scalar(), response=reader.scalar())


def _dl_challenge(base: PointG1, y: PointG1, A: PointG1, message: bytes) -> int:
    transcript = Transcript(TAG_DL)
    transcript.append_points((base, y, A))
    transcript.append_bytes(message)
    return transcript.challenge()


def prove_dl(pp: PublicParams, base: PointG1, y: PointG1, w: int, message: bytes) -> DlProof:
    """Schnorr signature of knowledge of ``w`` bound to ``message``.

    Raises:
        WitnessError: If ``y != w*base``.
    """
    if base * w != y:
        raise WitnessError("discrete-log witness does not open y")
    r = random_below(pp.q)
    e = _dl_challenge(base, y, base * r, message)
    return DlProof(challenge=e, response=(r - w * e) % pp.q)


def verify_dl(
    pp: PublicParams, base: PointG1, y: PointG1, proof: DlProof, message: bytes
) -> bool:
    A = base * proof.response + y * proof.challenge
    return _dl_challenge(base, y, A, message) == proof.challenge


def _bdl_challenge(
    base: PointG1, y1: PointG1, y2: PointG1, a: int, b: int, A1: PointG1, A2: PointG1, message: bytes
) -> int:
    transcript = Transcript(TAG_BDL)
    transcript.append_points((base, y1, y2))
    transcript.append_scalar(a)
    transcript.append_scalar(b)
    transcript.append_points((A1, A2))
    transcript.append_bytes(message)
    return transcript.challenge()


def prove_bdl(
    pp: PublicParams,
    base: PointG1,
    y1: PointG1,
    y2: PointG1,
    w: int,
    a: int,
    b: int,
    message: bytes,
) -> BdlProof:
    """Prove ``y1 = w*base`` and ``y2 = (a*w + b)*base`` with public ``a``, ``b``.

    Raises:
        WitnessError: If either equation fails for ``w``.
    """
    if base * w != y1 or base * (a * w + b) != y2:
        raise WitnessError("linear discrete-log witness does not open (y1, y2)")
    r = random_below(pp.q)
    e = _bdl_challenge(base, y1, y2, a, b, base * r, base * (a * r), message)
    return BdlProof(challenge=e, response=(r - w * e) % pp.q)


def verify_bdl(
    pp: PublicParams,
    base: PointG1,
    y1: PointG1,
    y2: PointG1,
    a: int,
    b: int,
    proof: BdlProof,
    message: bytes,
) -> bool:
    z, e = proof.response, proof.challenge
    A1 = base * z + y1 * e
    A2 = base * (a * z) + (y2 - base * b) * e
    return _bdl_challenge(base, y1, y2, a, b, A1, A2, message) == e


@dataclass(frozen=True)
class Tx1Statement:
    """Public statement of a 2-in/2-out transaction.

    Pairs are indexed by input (``cm``, ``Q``) or by output (every hatted field,
    ``Z_prime`` and ``T_prime``).
    """

    cm: Pair
    Q: Pair
    cm_hat: Pair
    Q_hat: Pair
    C_hat: Pair
    D_hat: Pair
    R_hat: Pair
    Z_prime: Pair
    T_prime: Pair
    T: PointG1
    G: PointG1
    message: bytes = b""

    def points(self) -> List[PointG1]:
        pairs = (
            self.cm,
            self.Q,
            self.cm_hat,
            self.Q_hat,
            self.C_hat,
            self.D_hat,
            self.R_hat,
            self.Z_prime,
            self.T_prime,
        )
        return [point for pair in pairs for point in pair] + [self.T, self.G]

    def to_bytes(self) -> bytes:
        return b"".join(point.to_bytes() for point in self.points()) + u32_prefixed(self.message)


@dataclass(frozen=True)
class Tx1Witness:
    """Openings for every clause of :class:`Tx1Statement`.

    ``sc`` is the payer's spend key ``s_j + c_j`` for input ``j``; ``S_hat`` is the
    payee's long-term address and ``W`` the adapted-certificate point with
    ``Z'_j = W_j + c_hat_j*T'_j``.
    """

    v: ScalarPair
    v_hat: ScalarPair
    c: ScalarPair
    c_hat: ScalarPair
    sc: ScalarPair
    gamma: ScalarPair
    r: ScalarPair
    S_hat: Pair
    W: Pair


@dataclass(frozen=True)
class Tx1Blinders:
    """Commitment randomness of one proof run."""

    r_v: ScalarPair
    r_v_hat: ScalarPair
    r_c: ScalarPair
    r_sc: ScalarPair
    r_r: ScalarPair
    r_gamma: ScalarPair
    r_c_hat: ScalarPair
    r_balance: int
    R_S_hat: Pair
    R_W: Pair

    @classmethod
    def random(cls, pp: PublicParams) -> "Tx1Blinders":
        def pair() -> ScalarPair:
            return (random_below(pp.q), random_below(pp.q))

        def points() -> Pair:
            return (pp.G1 * random_below(pp.q), pp.G1 * random_below(pp.q))

        return cls(
            r_v=pair(),
            r_v_hat=pair(),
            r_c=pair(),
            r_sc=pair(),
            r_r=pair(),
            r_gamma=pair(),
            r_c_hat=pair(),
            r_balance=random_below(pp.q),
            R_S_hat=points(),
            R_W=points(),
        )


@dataclass(frozen=True)
class Tx1Proof:
    """Challenge, fifteen scalar responses and four group responses."""

    e: int
    z_v: ScalarPair
    z_v_hat: ScalarPair
    z_c: ScalarPair
    z_sc: ScalarPair
    z_r: ScalarPair
    z_gamma: ScalarPair
    z_c_hat: ScalarPair
    z_balance: int
    Z_S_hat: Pair
    Z_W: Pair

    SCALAR_COUNT = 16
    POINT_COUNT = 4
    SIZE = SCALAR_COUNT * SCALAR_BYTES + POINT_COUNT * G1_BYTES

    def scalars(self) -> List[int]:
        values = [self.e]
        for name in ("z_v", "z_v_hat", "z_c", "z_sc", "z_r", "z_gamma", "z_c_hat"):
            values.extend(getattr(self, name))
        values.append(self.z_balance)
        return values

    def group_elements(self) -> List[PointG1]:
        return [*self.Z_S_hat, *self.Z_W]

    @classmethod
    def from_components(cls, scalars: Sequence[int], points: Sequence[PointG1]) -> "Tx1Proof":
        if len(scalars) != cls.SCALAR_COUNT or len(points) != cls.POINT_COUNT:
            raise ValueError("wrong number of proof components")
        s = list(scalars)
        return cls(
            e=s[0],
            z_v=(s[1], s[2]),
            z_v_hat=(s[3], s[4]),
            z_c=(s[5], s[6]),
            z_sc=(s[7], s[8]),
            z_r=(s[9], s[10]),
            z_gamma=(s[11], s[12]),
            z_c_hat=(s[13], s[14]),
            z_balance=s[15],
            Z_S_hat=(points[0], points[1]),
            Z_W=(points[2], points[3]),
        )

    def to_bytes(self) -> bytes:
        return b"".join(serialize_scalar(value) for value in self.scalars()) + b"".join(
            point.to_bytes() for point in self.group_elements()
        )

    @classmethod
    def read(cls, reader: Reader) -> "Tx1Proof":
        scalars = [reader.scalar() for _ in range(cls.SCALAR_COUNT)]
        points = [reader.g1() for _ in range(cls.POINT_COUNT)]
        return cls.from_components(scalars, points)


def check_tx1_witness(statement: Tx1Statement, witness: Tx1Witness) -> None:
    """Substitute the witness into every clause.

    Raises:
        WitnessError: Naming the first clause that fails.
    """
    x, w = statement, witness
    G, T = x.G, x.T
    for j in range(2):
        clauses = (
            ("input commitment", x.cm[j] == G * w.v[j] + T * w.c[j]),
            ("input address", x.Q[j] == G * w.sc[j]),
            ("output commitment", x.cm_hat[j] == G * w.v_hat[j] + T * w.c_hat[j]),
            ("output address", x.Q_hat[j] == w.S_hat[j] + G * w.c_hat[j]),
            ("trace ciphertext C", x.C_hat[j] == G * w.gamma[j]),
            ("trace ciphertext D", x.D_hat[j] == G * w.c_hat[j] + T * w.gamma[j]),
            ("ephemeral key", x.R_hat[j] == G * w.r[j]),
            ("certificate binding", x.Z_prime[j] == w.W[j] + x.T_prime[j] * w.c_hat[j]),
        )
        for name, holds in clauses:
            if not holds:
                raise WitnessError(f"{name} clause fails for index {j + 1}")
    balance = (x.cm[0] + x.cm[1]) - (x.cm_hat[0] + x.cm_hat[1])
    if balance != T * _balance_witness(w):
        raise WitnessError("balance clause fails")


def _balance_witness(w: Tx1Witness) -> int:
    return w.c[0] + w.c[1] - w.c_hat[0] - w.c_hat[1]


def _balance_point(x: Tx1Statement) -> PointG1:
    return (x.cm[0] + x.cm[1]) - (x.cm_hat[0] + x.cm_hat[1])


def tx1_challenge(statement: Tx1Statement, commitments: Sequence[PointG1]) -> int:
    """Hash the statement followed by the commitments in their fixed order."""
    parts = [statement.to_bytes()] + [point.to_bytes() for point in commitments]
    return hash_to_scalar(TAG_TX1, parts)


class Tx1Prover:
    """Three-move prover for the transaction statement.

    ``commitments()`` is the first move and ``respond(e)`` the third, so tests
    can run the protocol interactively and rewind with a second challenge.

    Args:
        pp: Public parameters.
        statement: Statement to prove.
        witness: Openings of the statement.
        blinders: Commitment randomness; sampled when omitted.
        validate: Check the witness against the statement first.

    Raises:
        WitnessError: If ``validate`` is set and a clause fails.
    """

    logger = logging.getLogger(__name__)

    def __init__(
        self,
        pp: PublicParams,
        statement: Tx1Statement,
        witness: Tx1Witness,
        blinders: Optional[Tx1Blinders] = None,
        *,
        validate: bool = True,
    ) -> None:
        if validate:
            check_tx1_witness(statement, witness)
        self.pp = pp
        self.statement = statement
        self.witness = witness
        self.blinders = blinders or Tx1Blinders.random(pp)

    def commitments(self) -> List[PointG1]:
        x, b = self.statement, self.blinders
        G, T = x.G, x.T
        cm_t = [G * b.r_v[j] + T * b.r_c[j] for j in range(2)]
        cm_hat_t = [G * b.r_v_hat[j] + T * b.r_c_hat[j] for j in range(2)]
        q_t = [G * b.r_sc[j] for j in range(2)]
        c_t = [G * b.r_gamma[j] for j in range(2)]
        d_t = [G * b.r_c_hat[j] + T * b.r_gamma[j] for j in range(2)]
        r_t = [G * b.r_r[j] for j in range(2)]
        q_hat_t = [b.R_S_hat[j] + G * b.r_c_hat[j] for j in range(2)]
        balance_t = [T * b.r_balance]
        binding_t = [b.R_W[j] + x.T_prime[j] * b.r_c_hat[j] for j in range(2)]
        return cm_t + cm_hat_t + q_t + c_t + d_t + r_t + q_hat_t + balance_t + binding_t

    def respond(self, e: int) -> Tx1Proof:
        w, b, q = self.witness, self.blinders, self.pp.q

        def z(blind: ScalarPair, secret: ScalarPair) -> ScalarPair:
            return ((blind[0] - secret[0] * e) % q, (blind[1] - secret[1] * e) % q)

        def z_point(blind: Pair, secret: Pair) -> Pair:
            return (blind[0] - secret[0] * e, blind[1] - secret[1] * e)

        return Tx1Proof(
            e=e % q,
            z_v=z(b.r_v, w.v),
            z_v_hat=z(b.r_v_hat, w.v_hat),
            z_c=z(b.r_c, w.c),
            z_sc=z(b.r_sc, w.sc),
            z_r=z(b.r_r, w.r),
            z_gamma=z(b.r_gamma, w.gamma),
            z_c_hat=z(b.r_c_hat, w.c_hat),
            z_balance=(b.r_balance - _balance_witness(w) * e) % q,
            Z_S_hat=z_point(b.R_S_hat, w.S_hat),
            Z_W=z_point(b.R_W, w.W),
        )


def prove_tx1(
    pp: PublicParams,
    statement: Tx1Statement,
    witness: Tx1Witness,
    *,
    blinders: Optional[Tx1Blinders] = None,
    validate: bool = True,
) -> Tx1Proof:
    """Produce the non-interactive proof for a transaction statement.

    Args:
        pp: Public parameters.
        statement: Public statement, including the bound message.
        witness: Openings of every clause.
        blinders: Fixed commitment randomness. With the same blinders the proof
            is byte-identical.
        validate: Check the witness first. Disabling it lets tests produce
            proofs for false statements.

    Returns:
        Tx1Proof: The proof.

    Raises:
        WitnessError: If ``validate`` is set and the witness does not satisfy the statement.
    """
    prover = Tx1Prover(pp, statement, witness, blinders, validate=validate)
    e = tx1_challenge(statement, prover.commitments())
    logger.debug("Generated transaction SoK")
    return prover.respond(e)


def tx1_recompute_commitments(statement: Tx1Statement, proof: Tx1Proof) -> List[PointG1]:
    """Rebuild the commitments from responses, in the order the prover emits them."""
    x, p, e = statement, proof, proof.e
    G, T = x.G, x.T
    cm_t = [G * p.z_v[j] + T * p.z_c[j] + x.cm[j] * e for j in range(2)]
    cm_hat_t = [G * p.z_v_hat[j] + T * p.z_c_hat[j] + x.cm_hat[j] * e for j in range(2)]
    q_t = [G * p.z_sc[j] + x.Q[j] * e for j in range(2)]
    c_t = [G * p.z_gamma[j] + x.C_hat[j] * e for j in range(2)]
    d_t = [G * p.z_c_hat[j] + T * p.z_gamma[j] + x.D_hat[j] * e for j in range(2)]
    r_t = [G * p.z_r[j] + x.R_hat[j] * e for j in range(2)]
    q_hat_t = [p.Z_S_hat[j] + G * p.z_c_hat[j] + x.Q_hat[j] * e for j in range(2)]
    balance_t = [T * p.z_balance + _balance_point(x) * e]
    binding_t = [p.Z_W[j] + x.T_prime[j] * p.z_c_hat[j] + x.Z_prime[j] * e for j in range(2)]
    return cm_t + cm_hat_t + q_t + c_t + d_t + r_t + q_hat_t + balance_t + binding_t


def verify_tx1(pp: PublicParams, statement: Tx1Statement, proof: Tx1Proof) -> bool:
    """Recompute the challenge from the statement and the rebuilt commitments.

    Returns:
        bool: True iff the recomputed challenge equals ``proof.e``.
    """
    ok = tx1_challenge(statement, tx1_recompute_commitments(statement, proof)) == proof.e
    logger.debug("Transaction SoK verification: %s", ok)
    return ok


TX1_COMMITMENT_COUNT = 17
