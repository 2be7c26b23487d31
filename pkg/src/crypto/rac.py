"""Renewable anonymous certificates.

The auditor signs an identity point ``C``. A holder can shift the identity to
``C + r'G1`` and adapt the signature to it without the signing key, so a
certificate can be shown under a fresh, unlinkable identity every time.
"""

import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

from .encoding import Reader
from .pairing import (
    G1_BYTES,
    G2_BYTES,
    PointG1,
    PointG2,
    PublicParams,
    pairing_product_is_one,
    scalar_inverse,
)
from .randomness import random_nonzero_below

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Identity:
    """Identity point, with its opening when held by the owner."""

    C: PointG1
    r: Optional[int] = None


@dataclass(frozen=True)
class RacSigningKey:
    x: int


@dataclass(frozen=True)
class RacVerifKey:
    X: PointG2


@dataclass(frozen=True)
class RacSignature:
    """Certificate signature (Z, S, S_hat, T_sig)."""

    Z: PointG1
    S: PointG1
    S_hat: PointG2
    T_sig: PointG1

    SIZE = 3 * G1_BYTES + G2_BYTES

    def to_bytes(self) -> bytes:
        return self.Z.to_bytes() + self.S.to_bytes() + self.S_hat.to_bytes() + self.T_sig.to_bytes()

    @classmethod
    def read(cls, reader: Reader) -> "RacSignature":
        return cls(Z=reader.g1(), S=reader.g1(), S_hat=reader.g2(), T_sig=reader.g1())

    @classmethod
    def from_bytes(cls, data: bytes) -> "RacSignature":
        reader = Reader(data)
        signature = cls.read(reader)
        reader.finish()
        return signature


def cert_gen(pp: PublicParams) -> Identity:
    """Sample an identity ``C = rG1`` and keep its opening."""
    r = random_nonzero_below(pp.q)
    return Identity(C=pp.G1 * r, r=r)


def rndmz(C: PointG1, r_prime: int) -> PointG1:
    """Shift an identity: ``C + r'G1``."""
    return C + PointG1.generator() * r_prime


def skey_gen(pp: PublicParams) -> Tuple[RacSigningKey, RacVerifKey]:
    """Generate the auditor's certificate signing pair ``(x, X = xG2)``."""
    x = random_nonzero_below(pp.q)
    return RacSigningKey(x=x), RacVerifKey(X=pp.G2 * x)


def sign(pp: PublicParams, sk: RacSigningKey, C: PointG1) -> RacSignature:
    """Sign an identity point.

    Args:
        pp: Public parameters.
        sk: Signing key.
        C: Identity point.

    Returns:
        RacSignature: Signature with fresh randomness ``s``.
    """
    s = random_nonzero_below(pp.q)
    s_inv = scalar_inverse(s)
    return RacSignature(
        Z=(pp.G1 + C * sk.x) * s_inv,
        S=pp.G1 * s,
        S_hat=pp.G2 * s,
        T_sig=pp.G1 * (s_inv * sk.x),
    )


def adapt(pp: PublicParams, sigma: RacSignature, r_prime: int) -> RacSignature:
    """Adapt ``sigma`` on ``C`` into a signature on ``rndmz(C, r_prime)``."""
    return _adapt(sigma, r_prime, random_nonzero_below(pp.q))


def _adapt(sigma: RacSignature, r_prime: int, s_prime: int) -> RacSignature:
    # Exposed to tests so the structural relation s'Z' = Z + r'T_sig can be checked.
    s_inv = scalar_inverse(s_prime)
    return RacSignature(
        Z=(sigma.Z + sigma.T_sig * r_prime) * s_inv,
        S=sigma.S * s_prime,
        S_hat=sigma.S_hat * s_prime,
        T_sig=sigma.T_sig * s_inv,
    )


def verify(pp: PublicParams, vk: RacVerifKey, C: PointG1, sigma: RacSignature) -> bool:
    """Check a certificate signature against an identity.

    The three equations e(Z, S_hat) = g e(C, X), e(G1, S_hat) = e(S, G2) and
    e(T_sig, S_hat) = e(G1, X) are each evaluated as one pairing product.

    Returns:
        bool: True iff all three equations hold. Never raises on well-typed input.
    """
    if sigma.S_hat.is_identity():
        logger.debug("Rejecting certificate with identity S_hat")
        return False
    neg_g1 = -pp.G1
    checks = (
        [(sigma.Z, sigma.S_hat), (neg_g1, pp.G2), (-C, vk.X)],
        [(pp.G1, sigma.S_hat), (-sigma.S, pp.G2)],
        [(sigma.T_sig, sigma.S_hat), (neg_g1, vk.X)],
    )
    for index, pairs in enumerate(checks, start=1):
        if not pairing_product_is_one(pairs):
            logger.debug("Certificate pairing equation %d failed", index)
            return False
    return True


def verify_batch(
    pp: PublicParams, vk: RacVerifKey, certificates: Sequence[Tuple[PointG1, RacSignature]]
) -> bool:
    """Check several certificates with a single pairing product.

    Each of the three equations of every certificate is weighted by a fresh
    random scalar and the weighted equations are multiplied together. Terms
    that share a G2 element are merged, so ``k`` certificates cost ``k + 2``
    Miller loops and one final exponentiation. A forged certificate passes
    with probability at most ``1/q``.

    Returns:
        bool: True iff every certificate verifies.
    """
    if any(sigma.S_hat.is_identity() for _, sigma in certificates):
        logger.debug("Rejecting certificate with identity S_hat")
        return False
    pairs: List[Tuple[PointG1, PointG2]] = []
    g2_points: List[PointG1] = []
    g2_scalars: List[int] = []
    x_points: List[PointG1] = []
    x_scalars: List[int] = []
    for C, sigma in certificates:
        w1, w2, w3 = (random_nonzero_below(pp.q) for _ in range(3))
        pairs.append(
            (PointG1.multi_scalar_mul([sigma.Z, pp.G1, sigma.T_sig], [w1, w2, w3]), sigma.S_hat)
        )
        g2_points += [pp.G1, sigma.S]
        g2_scalars += [-w1, -w2]
        x_points += [C, pp.G1]
        x_scalars += [-w1, -w3]
    pairs.append((PointG1.multi_scalar_mul(g2_points, g2_scalars), pp.G2))
    pairs.append((PointG1.multi_scalar_mul(x_points, x_scalars), vk.X))
    return pairing_product_is_one(pairs)


def certificate_to_bytes(C: PointG1, sigma: RacSignature) -> bytes:
    """Encode a certificate as C, Z, S, S_hat, T_sig."""
    return C.to_bytes() + sigma.to_bytes()


def certificate_from_bytes(data: bytes) -> Tuple[PointG1, RacSignature]:
    reader = Reader(data)
    C = reader.g1()
    sigma = RacSignature.read(reader)
    reader.finish()
    return C, sigma
