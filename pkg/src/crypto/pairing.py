"""Bilinear group layer over BLS12-381.

Points are immutable wrappers around backend points with operator
overloading (``P + Q``, ``k * P``). Scalars are plain ``int`` values reduced
modulo the group order. The arithmetic backend is chosen once per process
from ``SL_BACKEND`` (see ``crypto.backend``).
"""

import hashlib
import logging
import math
import struct
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import (
    Any,
    ClassVar,
    Dict,
    Hashable,
    Iterable,
    List,
    Mapping,
    Optional,
    Sequence,
    Tuple,
    Type,
    TypeVar,
)

from config import backend_name
from errors import ConfigError, LengthError, ScalarRangeError

from .backend import CURVE_ORDER, FIELD_MODULUS, CurveBackend, GroupOps, load_backend
from .loader import CurveDescriptor, CurveLoader

logger = logging.getLogger(__name__)

Scalar = int

BACKEND: CurveBackend = load_backend(backend_name())

SCALAR_BYTES = (CURVE_ORDER.bit_length() + 7) // 8
G1_BYTES = 48
G2_BYTES = 96

# Effective cofactor for clearing G1 points into the prime-order subgroup.
G1_COFACTOR_EFF = 0xD201000000010001
_B1 = 4

TAG_AKE = b"SL/H2S/ake"
TAG_TX1 = b"SL/FS/tx1"
TAG_DL = b"SL/FS/dl"
TAG_BDL = b"SL/FS/bdl"
TAG_RANGE = b"SL/FS/range"
TAG_GENERATORS = b"SL/GEN/bp"

P = TypeVar("P", bound="GroupPoint")


class GroupPoint:
    """Element of an additive source group."""

    __slots__ = ("_raw",)

    SIZE: ClassVar[int]
    _OPS: ClassVar[GroupOps]

    def __init__(self, raw: Any) -> None:
        self._raw = raw

    @property
    def raw(self) -> Any:
        """Backend point object."""
        return self._raw

    @classmethod
    def identity(cls: Type[P]) -> P:
        return cls(cls._OPS.zero())

    @classmethod
    def generator(cls: Type[P]) -> P:
        return cls(cls._OPS.generator())

    def __add__(self: P, other: P) -> P:
        return type(self)(self._OPS.add(self._raw, other._raw))

    def __sub__(self: P, other: P) -> P:
        return type(self)(self._OPS.add(self._raw, self._OPS.neg(other._raw)))

    def __neg__(self: P) -> P:
        return type(self)(self._OPS.neg(self._raw))

    def __mul__(self: P, scalar: int) -> P:
        return type(self)(self._OPS.mul(self._raw, scalar))

    def __rmul__(self: P, scalar: int) -> P:
        return self * scalar

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, GroupPoint) or type(other) is not type(self):
            return NotImplemented
        return self._OPS.eq(self._raw, other._raw)

    def __hash__(self) -> int:
        return hash((type(self).__name__, self.to_bytes()))

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.to_bytes().hex()[:16]}..)"

    def is_identity(self) -> bool:
        return self._OPS.is_identity(self._raw)

    def in_subgroup(self) -> bool:
        return self._OPS.in_subgroup(self._raw)

    def key(self) -> Hashable:
        """Cheap canonical key for lookup tables."""
        return self._OPS.key(self._raw)

    def to_bytes(self) -> bytes:
        return self._OPS.encode(self._raw)

    @classmethod
    def from_bytes(cls: Type[P], data: bytes) -> P:
        """Decode a compressed point and check subgroup membership.

        Raises:
            LengthError: If ``data`` has the wrong size.
            PointNotOnCurveError: If the bytes do not describe a curve point.
            PointSubgroupError: If the point lies outside the prime-order subgroup.
        """
        if len(data) != cls.SIZE:
            raise LengthError(f"{cls.__name__} needs {cls.SIZE} bytes, got {len(data)}")
        return cls(cls._OPS.decode(bytes(data)))

    @classmethod
    def multi_scalar_mul(cls: Type[P], points: Sequence[P], scalars: Sequence[int]) -> P:
        """Return ``sum(k_i * P_i)`` in one backend call."""
        if len(points) != len(scalars):
            raise ValueError("points and scalars differ in length")
        return cls(cls._OPS.msm([p._raw for p in points], scalars))


class PointG1(GroupPoint):
    """Element of G1, 48-byte compressed encoding."""

    __slots__ = ()

    SIZE = G1_BYTES
    _OPS = BACKEND.g1


class PointG2(GroupPoint):
    """Element of G2, 96-byte compressed encoding."""

    __slots__ = ()

    SIZE = G2_BYTES
    _OPS = BACKEND.g2


class PointGT:
    """Element of the target group, kept as a formal product of pairings.

    ``e(p1, q1) * e(p2, q2)`` is stored as its pairs; equality runs one
    pairing-product check, so no target-group element is ever materialized.
    """

    __slots__ = ("pairs",)

    def __init__(self, pairs: Tuple[Tuple[PointG1, PointG2], ...] = ()) -> None:
        self.pairs = pairs

    @classmethod
    def identity(cls) -> "PointGT":
        return cls()

    def __mul__(self, other: "PointGT") -> "PointGT":
        return PointGT(self.pairs + other.pairs)

    def __pow__(self, exponent: int) -> "PointGT":
        return PointGT(tuple((p * exponent, q) for p, q in self.pairs))

    def inverse(self) -> "PointGT":
        return PointGT(tuple((-p, q) for p, q in self.pairs))

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PointGT):
            return NotImplemented
        return pairing_product_is_one(self.pairs + other.inverse().pairs)

    __hash__ = None  # type: ignore[assignment]

    def is_identity(self) -> bool:
        return pairing_product_is_one(self.pairs)


@dataclass(frozen=True)
class PublicParams:
    """Bilinear setting shared by every party."""

    G1: PointG1
    G2: PointG2
    g: PointGT = field(compare=False)
    q: int
    curve_id: str


@lru_cache(maxsize=None)
def setup(security_level: int = 128) -> PublicParams:
    """Return public parameters for a security level.

    Args:
        security_level: Requested security in bits. Only 128 is configured.

    Returns:
        PublicParams: Generators, the pairing of the generators and the group order.

    Raises:
        UnsupportedSecurityLevelError: If no curve is configured for the level.
    """
    return build_params(CurveLoader.load(security_level))


def build_params(descriptor: CurveDescriptor) -> PublicParams:
    """Instantiate public parameters from a curve descriptor (uncached)."""
    if BACKEND.name not in descriptor.backends:
        raise ConfigError(
            f"Curve {descriptor.key} does not list the active backend {BACKEND.name!r}"
        )
    sizes = (descriptor.scalar_bytes, descriptor.g1_bytes, descriptor.g2_bytes)
    if sizes != (SCALAR_BYTES, G1_BYTES, G2_BYTES):
        raise ConfigError(f"Curve descriptor {descriptor.key} disagrees with backend sizes")
    g1 = PointG1.generator()
    g2 = PointG2.generator()
    logger.debug("Building public parameters for %s on %s", descriptor.curve_id, BACKEND.name)
    return PublicParams(
        G1=g1,
        G2=g2,
        g=pairing(g1, g2),
        q=CURVE_ORDER,
        curve_id=descriptor.curve_id,
    )


def pairing(p: PointG1, q: PointG2) -> PointGT:
    """Compute e(p, q)."""
    return PointGT(((p, q),))


def pairing_product_is_one(pairs: Sequence[Tuple[PointG1, PointG2]]) -> bool:
    """Check that the product of e(p_i, q_i) is the identity of GT.

    Miller loops are multiplied first and share one final exponentiation.
    """
    return BACKEND.pairing_check([(p.raw, q.raw) for p, q in pairs])


def scalar_inverse(value: Scalar) -> Scalar:
    """Multiplicative inverse modulo the group order."""
    if value % CURVE_ORDER == 0:
        raise ZeroDivisionError("zero has no inverse modulo the group order")
    return pow(value, -1, CURVE_ORDER)


def serialize_scalar(value: Scalar) -> bytes:
    """Fixed-width big-endian encoding."""
    if not 0 <= value < CURVE_ORDER:
        raise ScalarRangeError("scalar is not reduced modulo the group order")
    return value.to_bytes(SCALAR_BYTES, "big")


def deserialize_scalar(data: bytes) -> Scalar:
    """Decode a canonical scalar.

    Raises:
        LengthError: If ``data`` is not exactly ``SCALAR_BYTES`` long.
        ScalarRangeError: If the value is not below the group order.
    """
    if len(data) != SCALAR_BYTES:
        raise LengthError(f"scalar needs {SCALAR_BYTES} bytes, got {len(data)}")
    value = int.from_bytes(data, "big")
    if value >= CURVE_ORDER:
        raise ScalarRangeError("scalar is not reduced modulo the group order")
    return value


def serialize_point(point: GroupPoint) -> bytes:
    return point.to_bytes()


def deserialize_point(kind: Type[P], data: bytes) -> P:
    """Decode and validate a point of the given group class."""
    return kind.from_bytes(data)


def _frame(data: bytes) -> bytes:
    return struct.pack(">Q", len(data)) + data


def hash_to_scalar(domain_tag: bytes, parts: Sequence[bytes]) -> Scalar:
    """Hash length-prefixed parts under a domain tag into Z_q.

    A 512-bit SHAKE-256 output is reduced modulo q, so the bias is negligible.

    Raises:
        ValueError: If ``domain_tag`` is empty.
    """
    if not domain_tag:
        raise ValueError("domain tag must not be empty")
    h = hashlib.shake_256()
    h.update(_frame(domain_tag))
    h.update(struct.pack(">I", len(parts)))
    for part in parts:
        h.update(_frame(part))
    return int.from_bytes(h.digest(64), "big") % CURVE_ORDER


@lru_cache(maxsize=1024)
def hash_to_g1(domain_tag: bytes, index: int) -> PointG1:
    """Derive a G1 generator with unknown discrete logarithm (try-and-increment).

    A candidate ``x`` is accepted when ``x^3 + b`` is a square; the point with
    the smaller ``y`` is decoded and the cofactor is cleared.
    """
    counter = 0
    while True:
        digest = hashlib.shake_256(
            _frame(domain_tag) + struct.pack(">QQ", index, counter)
        ).digest(64)
        counter += 1
        x = int.from_bytes(digest, "big") % FIELD_MODULUS
        rhs = (pow(x, 3, FIELD_MODULUS) + _B1) % FIELD_MODULUS
        if pow(rhs, (FIELD_MODULUS - 1) // 2, FIELD_MODULUS) > 1:
            continue
        compressed = (x | (1 << 383)).to_bytes(G1_BYTES, "big")
        point = PointG1(PointG1._OPS.decode_unchecked(compressed)) * G1_COFACTOR_EFF
        if not point.is_identity():
            return point


class Transcript:
    """Fiat-Shamir transcript that absorbs encodings and squeezes challenges.

    Every challenge is appended to the transcript, so later challenges depend on
    all earlier messages.
    """

    def __init__(self, domain_tag: bytes) -> None:
        self._domain_tag = domain_tag
        self._parts: List[bytes] = []

    def append_bytes(self, data: bytes) -> None:
        self._parts.append(data)

    def append_int(self, value: int) -> None:
        self._parts.append(struct.pack(">Q", value))

    def append_scalar(self, value: Scalar) -> None:
        self._parts.append(serialize_scalar(value % CURVE_ORDER))

    def append_point(self, point: GroupPoint) -> None:
        self._parts.append(point.to_bytes())

    def append_points(self, points: Iterable[GroupPoint]) -> None:
        for point in points:
            self.append_point(point)

    def challenge(self) -> Scalar:
        value = hash_to_scalar(self._domain_tag, self._parts)
        self._parts.append(serialize_scalar(value))
        return value


class BabyStepTable:
    """Baby-step table for discrete logarithms below ``bound`` in base ``base``.

    The table is read-only after construction and can be shared across threads.
    """

    logger = logging.getLogger(__name__)

    def __init__(self, base: PointG1, bound: int) -> None:
        if bound < 1:
            raise ValueError("bound must be at least 1")
        self.base = base
        self.bound = bound
        self.step = math.isqrt(bound - 1) + 1
        self.giant_steps = -(-bound // self.step)

        table: Dict[Hashable, int] = {}
        current = PointG1.identity()
        for j in range(self.step):
            table.setdefault(current.key(), j)
            current = current + base
        self._table: Mapping[Hashable, int] = MappingProxyType(table)
        self._giant = -(base * self.step)
        self.logger.debug("Built baby-step table: bound=%d, entries=%d", bound, self.step)

    def solve(self, target: PointG1) -> Optional[int]:
        """Return ``v`` in ``[0, bound)`` with ``target == v * base``, or None."""
        gamma = target
        for i in range(self.giant_steps):
            j = self._table.get(gamma.key())
            if j is not None:
                value = i * self.step + j
                return value if value < self.bound else None
            gamma = gamma + self._giant
        return None


@lru_cache(maxsize=8)
def baby_step_table(base: PointG1, bound: int) -> BabyStepTable:
    """Shared table per ``(base, bound)``."""
    return BabyStepTable(base, bound)


def bsgs_dlog(base: PointG1, target: PointG1, bound: int) -> Optional[int]:
    """Bounded discrete logarithm by baby-step giant-step.

    Args:
        base: Base point.
        target: Point to solve for.
        bound: Exclusive upper bound on the logarithm.

    Returns:
        Optional[int]: The unique ``v < bound`` with ``target == v * base``, or None
        when the logarithm is outside the range.
    """
    return baby_step_table(base, bound).solve(target)
