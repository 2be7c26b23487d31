"""Key material and account types held by the auditor, users and the ledger."""

from dataclasses import dataclass
from typing import Optional

from crypto.encoding import Reader, u16_prefixed
from crypto.pairing import PointG1, PointG2
from crypto.primitives import ElGamalCiphertext
from crypto.rac import RacSignature, RacSigningKey, RacVerifKey
from crypto.sok import DlProof


@dataclass(frozen=True)
class AuditorPublicKeys:
    """Tracing key ``T`` and certificate verification key ``X``."""

    T: PointG1
    X: PointG2

    @property
    def verif_key(self) -> RacVerifKey:
        return RacVerifKey(X=self.X)


@dataclass(frozen=True)
class ManagementKeys:
    """Auditor secrets: ``mk`` with ``T = mk*G1`` and ``x`` with ``X = x*G2``."""

    mk: int
    T: PointG1
    x: int
    X: PointG2

    @property
    def signing_key(self) -> RacSigningKey:
        return RacSigningKey(x=self.x)

    def public(self) -> AuditorPublicKeys:
        return AuditorPublicKeys(T=self.T, X=self.X)


@dataclass(frozen=True)
class UserSecret:
    """Long-term secrets of a user: ``S = sk*G1`` and viewing key ``V = vk*G1``."""

    sk: int
    vk: int
    S: PointG1
    V: PointG1
    label: str


@dataclass(frozen=True)
class RegistrationRequest:
    """Public part of a new account with a proof of possession of ``sk``."""

    S: PointG1
    V: PointG1
    label: str
    pok: DlProof

    def bound_message(self) -> bytes:
        return registration_message(self.S, self.V, self.label)


def registration_message(S: PointG1, V: PointG1, label: str) -> bytes:
    return b"SL/REG" + S.to_bytes() + V.to_bytes() + u16_prefixed(label.encode("utf-8"))


@dataclass(frozen=True)
class LongTermAccount:
    """Directory entry: address ``S``, viewing key ``V``, certificate and identity label."""

    S: PointG1
    V: PointG1
    sigma: RacSignature
    label: str

    def to_bytes(self) -> bytes:
        return (
            self.S.to_bytes()
            + self.V.to_bytes()
            + self.sigma.to_bytes()
            + u16_prefixed(self.label.encode("utf-8"))
        )

    @classmethod
    def read(cls, reader: Reader) -> "LongTermAccount":
        S, V = reader.g1(), reader.g1()
        sigma = RacSignature.read(reader)
        return cls(S=S, V=V, sigma=sigma, label=reader.u16_prefixed().decode("utf-8"))


@dataclass(frozen=True)
class AnonymousAccount:
    """One-time address ``Q = S + c*G`` and encrypted amount ``cm = v*G + c*T``."""

    Q: PointG1
    cm: PointG1

    def to_bytes(self) -> bytes:
        return self.Q.to_bytes() + self.cm.to_bytes()

    @classmethod
    def read(cls, reader: Reader) -> "AnonymousAccount":
        return cls(Q=reader.g1(), cm=reader.g1())


@dataclass(frozen=True)
class TraceBundle:
    """Encryption of ``K = c*G`` under ``T`` and the ephemeral key ``R = r*G``."""

    ct: ElGamalCiphertext
    R: PointG1

    def to_bytes(self) -> bytes:
        return self.ct.to_bytes() + self.R.to_bytes()

    @classmethod
    def read(cls, reader: Reader) -> "TraceBundle":
        return cls(ct=ElGamalCiphertext.read(reader), R=reader.g1())


@dataclass(frozen=True)
class OutputSecrets:
    """Payer-side openings of a freshly generated output, used as proof witnesses."""

    v: int
    c: int
    gamma: int
    r: int
    S_hat: PointG1
    W: PointG1


@dataclass(frozen=True)
class OwnedAccount:
    """Anonymous account recovered by its payee, with everything needed to spend it."""

    account: AnonymousAccount
    amount: int
    c: int
    spend_key: int

    @property
    def Q(self) -> PointG1:
        return self.account.Q


@dataclass(frozen=True)
class TraceResult:
    """Auditor view of one output."""

    S: PointG1
    amount: int
    label: Optional[str] = None

    @property
    def registered(self) -> bool:
        return self.label is not None
