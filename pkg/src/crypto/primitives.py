"""Auxiliary primitives instantiated over G1.

ElGamal encryption, additive one-time encryption of points, a static
Diffie-Hellman agreement hashed to a scalar, the one-way map ``c -> cG`` and
the reversible amount encoding ``v -> vG``.
"""

from dataclasses import dataclass
from typing import Optional, Tuple

from .encoding import Reader
from .pairing import TAG_AKE, PointG1, PublicParams, bsgs_dlog, hash_to_scalar
from .randomness import random_below, random_nonzero_below


@dataclass(frozen=True)
class ElGamalKeyPair:
    secret: int
    public: PointG1


@dataclass(frozen=True)
class ElGamalCiphertext:
    C: PointG1
    D: PointG1

    def to_bytes(self) -> bytes:
        return self.C.to_bytes() + self.D.to_bytes()

    @classmethod
    def read(cls, reader: Reader) -> "ElGamalCiphertext":
        return cls(C=reader.g1(), D=reader.g1())


@dataclass(frozen=True)
class SharedKey:
    """Diffie-Hellman share and the scalar derived from it."""

    point: PointG1
    scalar: int


def pke_keygen(pp: PublicParams) -> ElGamalKeyPair:
    secret = random_nonzero_below(pp.q)
    return ElGamalKeyPair(secret=secret, public=pp.G1 * secret)


def pke_encrypt(
    pp: PublicParams, M: PointG1, pk: PointG1, gamma: Optional[int] = None
) -> Tuple[ElGamalCiphertext, int]:
    """Encrypt a point under ``pk``.

    Args:
        pp: Public parameters.
        M: Plaintext point.
        pk: Recipient public key.
        gamma: Encryption randomness. Sampled when omitted; zero is allowed here.

    Returns:
        Tuple[ElGamalCiphertext, int]: ``(gamma*G1, M + gamma*pk)`` and the randomness
        used, which callers keep as a proof witness.
    """
    if gamma is None:
        gamma = random_below(pp.q)
    gamma %= pp.q
    return ElGamalCiphertext(C=pp.G1 * gamma, D=M + pk * gamma), gamma


def pke_decrypt(ct: ElGamalCiphertext, sk: int) -> PointG1:
    return ct.D - ct.C * sk


def ske_encrypt(m: PointG1, xk: PointG1) -> PointG1:
    return m + xk


def ske_decrypt(c: PointG1, xk: PointG1) -> PointG1:
    return c - xk


def ake_shared(sk: int, pk: PointG1) -> SharedKey:
    """Static Diffie-Hellman with the share hashed into Z_q."""
    point = pk * sk
    return SharedKey(point=point, scalar=hash_to_scalar(TAG_AKE, [point.to_bytes()]))


def of_map(pp: PublicParams, c: int) -> PointG1:
    return pp.G1 * c


def rf_encode(pp: PublicParams, v: int) -> PointG1:
    return pp.G1 * v


def rf_decode(pp: PublicParams, vx: PointG1, bound: int) -> Optional[int]:
    """Invert :func:`rf_encode` for amounts below ``bound``; None when out of range."""
    return bsgs_dlog(pp.G1, vx, bound)
