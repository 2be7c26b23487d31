"""2-in/2-out transaction and its wire format.

Layout: input accounts, output accounts, u16-prefixed context message, the
transaction SoK, the u16-prefixed range proof, both adapted certificates and
both trace bundles. Statement components that already appear in the bundles or
certificates are not repeated.
"""

import hashlib
import math
import struct
from dataclasses import dataclass
from typing import Sequence, Tuple

from crypto.encoding import Reader, u16_prefixed
from crypto.pairing import G1_BYTES, G2_BYTES, SCALAR_BYTES, PointG1
from crypto.rac import RacSignature
from crypto.rangeproof import RangeProof
from crypto.sok import Tx1Proof, Tx1Statement
from errors import MalformedProofError

from .accounts import AnonymousAccount, TraceBundle

# Prefixed to the caller's context before it is bound into the transaction SoK:
# format version, then the input and output counts.
TX_CONTEXT_HEADER = b"SL/TX/v1"


@dataclass(frozen=True)
class ElementCount:
    """Number of G1, G2 and scalar fields in a serialized transaction."""

    g1: int
    g2: int
    scalars: int

    def byte_size(self) -> int:
        return self.g1 * G1_BYTES + self.g2 * G2_BYTES + self.scalars * SCALAR_BYTES


@dataclass(frozen=True)
class Transaction:
    inputs: Tuple[AnonymousAccount, AnonymousAccount]
    outputs: Tuple[AnonymousAccount, AnonymousAccount]
    bundles: Tuple[TraceBundle, TraceBundle]
    certificates: Tuple[RacSignature, RacSignature]
    message: bytes
    sok: Tx1Proof
    range_proof: RangeProof

    def statement(self, T: PointG1, G: PointG1) -> Tx1Statement:
        """Assemble the SoK statement from the public transaction fields."""
        return build_statement(
            self.inputs, self.outputs, self.bundles, self.certificates, self.message, T, G
        )

    def to_bytes(self) -> bytes:
        parts = [account.to_bytes() for account in (*self.inputs, *self.outputs)]
        parts.append(u16_prefixed(self.message))
        parts.append(self.sok.to_bytes())
        parts.append(u16_prefixed(self.range_proof.to_bytes()))
        parts += [sigma.to_bytes() for sigma in self.certificates]
        parts += [bundle.to_bytes() for bundle in self.bundles]
        return b"".join(parts)

    @classmethod
    def read(cls, reader: Reader) -> "Transaction":
        in1, in2, out1, out2 = (AnonymousAccount.read(reader) for _ in range(4))
        message = reader.u16_prefixed()
        sok = Tx1Proof.read(reader)
        range_proof = RangeProof.from_bytes(reader.u16_prefixed())
        sigma1, sigma2 = RacSignature.read(reader), RacSignature.read(reader)
        bundle1, bundle2 = TraceBundle.read(reader), TraceBundle.read(reader)
        return cls(
            inputs=(in1, in2),
            outputs=(out1, out2),
            bundles=(bundle1, bundle2),
            certificates=(sigma1, sigma2),
            message=message,
            sok=sok,
            range_proof=range_proof,
        )

    @classmethod
    def from_bytes(cls, data: bytes) -> "Transaction":
        """Decode a transaction.

        Raises:
            EncodingError: On truncation, trailing bytes, or an invalid point or scalar.
        """
        reader = Reader(data, truncated=MalformedProofError)
        tx = cls.read(reader)
        reader.finish()
        return tx

    @property
    def tx_id(self) -> str:
        return hashlib.sha256(self.to_bytes()).hexdigest()


def transaction_element_count(tx: Transaction) -> ElementCount:
    """Count the group elements and scalars the wire format carries for ``tx``."""
    g1 = 2 * (len(tx.inputs) + len(tx.outputs))
    g1 += len(tx.sok.group_elements())
    g1 += tx.range_proof.group_element_count
    g1 += 3 * len(tx.certificates)
    g1 += 3 * len(tx.bundles)
    return ElementCount(
        g1=g1,
        g2=len(tx.certificates),
        scalars=len(tx.sok.scalars()) + 5,
    )


def reference_g1_count(n: int) -> float:
    """Reference G1 count ``27 + 2*log2(n)`` for a transaction with bit-width ``n``."""
    return 27 + 2 * math.log2(n)


def bound_message(message: bytes, inputs: int = 2, outputs: int = 2) -> bytes:
    """Bytes the transaction SoK signs: versioned header plus the caller's context."""
    return TX_CONTEXT_HEADER + struct.pack(">BB", inputs, outputs) + message


def build_statement(
    inputs: Sequence[AnonymousAccount],
    outputs: Sequence[AnonymousAccount],
    bundles: Sequence[TraceBundle],
    certificates: Sequence[RacSignature],
    message: bytes,
    T: PointG1,
    G: PointG1,
) -> Tx1Statement:
    return Tx1Statement(
        cm=(inputs[0].cm, inputs[1].cm),
        Q=(inputs[0].Q, inputs[1].Q),
        cm_hat=(outputs[0].cm, outputs[1].cm),
        Q_hat=(outputs[0].Q, outputs[1].Q),
        C_hat=(bundles[0].ct.C, bundles[1].ct.C),
        D_hat=(bundles[0].ct.D, bundles[1].ct.D),
        R_hat=(bundles[0].R, bundles[1].R),
        Z_prime=(certificates[0].Z, certificates[1].Z),
        T_prime=(certificates[0].T_sig, certificates[1].T_sig),
        T=T,
        G=G,
        message=bound_message(message, len(inputs), len(outputs)),
    )
