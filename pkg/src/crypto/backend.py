"""BLS12-381 arithmetic backends.

``arkworks`` wraps the compiled ``py_arkworks_bls12381`` binding and is the
default when it imports. ``py_ecc`` is the pure-Python fallback; it is correct
but far too slow for protocol-size range proofs. ``SL_BACKEND`` pins one of
them (``auto`` picks arkworks when available).
"""

import logging
from functools import lru_cache
from typing import Any, Callable, Dict, Hashable, List, Sequence, Tuple

from errors import ConfigError, PointNotOnCurveError, PointSubgroupError

logger = logging.getLogger(__name__)

# Group order r of BLS12-381, shared by both backends.
CURVE_ORDER = 0x73EDA753299D7D483339D80809A1D80553BDA402FFFE5BFEFFFFFFFF00000001
FIELD_MODULUS = int(
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f624"
    "1eabfffeb153ffffb9feffffffffaaab",
    16,
)

BACKEND_NAMES = ("auto", "arkworks", "py_ecc")


class GroupOps:
    """Arithmetic and encoding for one source group of one backend."""

    size: int

    def zero(self) -> Any:
        raise NotImplementedError

    def generator(self) -> Any:
        raise NotImplementedError

    def add(self, a: Any, b: Any) -> Any:
        raise NotImplementedError

    def neg(self, a: Any) -> Any:
        raise NotImplementedError

    def mul(self, a: Any, scalar: int) -> Any:
        raise NotImplementedError

    def eq(self, a: Any, b: Any) -> bool:
        raise NotImplementedError

    def is_identity(self, a: Any) -> bool:
        return self.eq(a, self.zero())

    def msm(self, points: Sequence[Any], scalars: Sequence[int]) -> Any:
        """Return ``sum(k_i * P_i)``."""
        raise NotImplementedError

    def encode(self, a: Any) -> bytes:
        raise NotImplementedError

    def decode_unchecked(self, data: bytes) -> Any:
        """Decode a point on the curve without the subgroup check.

        Raises:
            PointNotOnCurveError: If the bytes do not describe a curve point.
        """
        raise NotImplementedError

    def decode(self, data: bytes) -> Any:
        """Decode a point of the prime-order subgroup.

        Raises:
            PointNotOnCurveError: If the bytes do not describe a curve point.
            PointSubgroupError: If the point lies outside the subgroup.
        """
        raise NotImplementedError

    def in_subgroup(self, a: Any) -> bool:
        raise NotImplementedError

    def key(self, a: Any) -> Hashable:
        """Canonical dictionary key, equal for equal points."""
        return self.encode(a)


class CurveBackend:
    """Both source groups plus the pairing check."""

    name: str
    g1: GroupOps
    g2: GroupOps

    def pairing_check(self, pairs: Sequence[Tuple[Any, Any]]) -> bool:
        """Whether the product of ``e(p_i, q_i)`` is the identity of GT."""
        raise NotImplementedError


class _ArkworksGroup(GroupOps):
    def __init__(self, point_cls: Any, scalar_cls: Any, size: int, label: str) -> None:
        self._cls = point_cls
        self._scalar = scalar_cls
        self._zero = point_cls.identity()
        self._generator = point_cls()
        self.size = size
        self.label = label

    def _to_scalar(self, value: int) -> Any:
        return self._scalar.from_le_bytes((value % CURVE_ORDER).to_bytes(32, "little"))

    def zero(self) -> Any:
        return self._zero

    def generator(self) -> Any:
        return self._generator

    def add(self, a: Any, b: Any) -> Any:
        return a + b

    def neg(self, a: Any) -> Any:
        return -a

    def mul(self, a: Any, scalar: int) -> Any:
        return a * self._to_scalar(scalar)

    def eq(self, a: Any, b: Any) -> bool:
        return bool(a == b)

    def msm(self, points: Sequence[Any], scalars: Sequence[int]) -> Any:
        if not points:
            return self._zero
        return self._cls.multiexp_unchecked(list(points), [self._to_scalar(k) for k in scalars])

    def encode(self, a: Any) -> bytes:
        return bytes(a.to_compressed_bytes())

    def decode_unchecked(self, data: bytes) -> Any:
        try:
            return self._cls.from_compressed_bytes_unchecked(data)
        except Exception as exc:  # the binding raises plain exceptions
            raise PointNotOnCurveError(f"invalid {self.label} encoding: {exc}") from exc

    def decode(self, data: bytes) -> Any:
        self.decode_unchecked(data)
        try:
            return self._cls.from_compressed_bytes(data)
        except Exception as exc:
            raise PointSubgroupError(
                f"{self.label} point is not in the prime-order subgroup"
            ) from exc

    def in_subgroup(self, a: Any) -> bool:
        try:
            self._cls.from_compressed_bytes(self.encode(a))
        except Exception:
            return False
        return True


class ArkworksBackend(CurveBackend):
    name = "arkworks"

    def __init__(self) -> None:
        import py_arkworks_bls12381 as ark

        self._gt = ark.GT
        self.g1 = _ArkworksGroup(ark.G1Point, ark.Scalar, 48, "G1")
        self.g2 = _ArkworksGroup(ark.G2Point, ark.Scalar, 96, "G2")

    def pairing_check(self, pairs: Sequence[Tuple[Any, Any]]) -> bool:
        if not pairs:
            return True
        g1s = [p for p, _ in pairs]
        g2s = [q for _, q in pairs]
        return bool(self._gt.multi_pairing(g1s, g2s) == self._gt.one())


def pippenger(
    add: Callable[[Any, Any], Any], zero: Any, points: Sequence[Any], scalars: Sequence[int]
) -> Any:
    """Bucket multi-scalar multiplication over an additive group given by ``add``."""
    if not points:
        return zero
    window = max(1, len(points).bit_length() - 3)
    mask = (1 << window) - 1
    reduced = [k % CURVE_ORDER for k in scalars]
    windows = -(-CURVE_ORDER.bit_length() // window)
    result = zero
    for w in reversed(range(windows)):
        for _ in range(window):
            result = add(result, result)
        buckets: List[Any] = [None] * mask
        shift = w * window
        for point, k in zip(points, reduced):
            digit = (k >> shift) & mask
            if digit:
                held = buckets[digit - 1]
                buckets[digit - 1] = point if held is None else add(held, point)
        running, total = zero, zero
        for bucket in reversed(buckets):
            if bucket is not None:
                running = add(running, bucket)
            total = add(total, running)
        result = add(result, total)
    return result


class _PyEccGroup(GroupOps):
    def __init__(
        self,
        curve: Any,
        zero: Any,
        generator: Any,
        compress: Callable[[Any], bytes],
        decompress: Callable[[bytes], Any],
        size: int,
        label: str,
    ) -> None:
        self._curve = curve
        self._zero = zero
        self._generator = generator
        self._compress = compress
        self._decompress = decompress
        self.size = size
        self.label = label

    def zero(self) -> Any:
        return self._zero

    def generator(self) -> Any:
        return self._generator

    def add(self, a: Any, b: Any) -> Any:
        return self._curve.add(a, b)

    def neg(self, a: Any) -> Any:
        return self._curve.neg(a)

    def mul(self, a: Any, scalar: int) -> Any:
        return self._curve.multiply(a, scalar % CURVE_ORDER)

    def eq(self, a: Any, b: Any) -> bool:
        return bool(self._curve.eq(a, b))

    def is_identity(self, a: Any) -> bool:
        return bool(self._curve.is_inf(a))

    def msm(self, points: Sequence[Any], scalars: Sequence[int]) -> Any:
        return pippenger(self._curve.add, self._zero, points, scalars)

    def encode(self, a: Any) -> bytes:
        return self._compress(a)

    def decode_unchecked(self, data: bytes) -> Any:
        try:
            return self._decompress(data)
        except (ValueError, AssertionError) as exc:
            raise PointNotOnCurveError(f"invalid {self.label} encoding: {exc}") from exc

    def decode(self, data: bytes) -> Any:
        raw = self.decode_unchecked(data)
        if not self.in_subgroup(raw):
            raise PointSubgroupError(f"{self.label} point is not in the prime-order subgroup")
        return raw

    def in_subgroup(self, a: Any) -> bool:
        return bool(self._curve.is_inf(self._curve.multiply(a, CURVE_ORDER)))

    def key(self, a: Any) -> Hashable:
        if self.label != "G1":
            return self.encode(a)
        # Affine coordinates; (0, 0) is not on the curve, so it marks the identity.
        if self._curve.is_inf(a):
            return (0, 0)
        x, y = self._curve.normalize(a)
        return (int(x), int(y))


class PyEccBackend(CurveBackend):
    name = "py_ecc"

    def __init__(self) -> None:
        from py_ecc import optimized_bls12_381 as curve
        from py_ecc.bls.point_compression import (
            compress_G1,
            compress_G2,
            decompress_G1,
            decompress_G2,
        )
        from py_ecc.bls.typing import G1Compressed, G2Compressed
        from py_ecc.fields import optimized_bls12_381_FQ12 as FQ12
        from py_ecc.optimized_bls12_381.optimized_pairing import final_exponentiate, pairing

        def encode_g2(raw: Any) -> bytes:
            z1, z2 = compress_G2(raw)
            return int(z1).to_bytes(48, "big") + int(z2).to_bytes(48, "big")

        def decode_g2(data: bytes) -> Any:
            z = (int.from_bytes(data[:48], "big"), int.from_bytes(data[48:], "big"))
            return decompress_G2(G2Compressed(z))

        self._fq12_one = FQ12.one()
        self._pairing = pairing
        self._final_exponentiate = final_exponentiate
        self.g1 = _PyEccGroup(
            curve,
            curve.Z1,
            curve.G1,
            lambda raw: int(compress_G1(raw)).to_bytes(48, "big"),
            lambda data: decompress_G1(G1Compressed(int.from_bytes(data, "big"))),
            48,
            "G1",
        )
        self.g2 = _PyEccGroup(curve, curve.Z2, curve.G2, encode_g2, decode_g2, 96, "G2")

    def pairing_check(self, pairs: Sequence[Tuple[Any, Any]]) -> bool:
        # Miller loops are multiplied first and share one final exponentiation.
        acc = self._fq12_one
        for p, q in pairs:
            acc = acc * self._pairing(q, p, final_exponentiate=False)
        return bool(self._final_exponentiate(acc) == self._fq12_one)


_FACTORIES: Dict[str, Callable[[], CurveBackend]] = {
    "arkworks": ArkworksBackend,
    "py_ecc": PyEccBackend,
}


@lru_cache(maxsize=None)
def load_backend(name: str = "auto") -> CurveBackend:
    """Instantiate a backend by name.

    Raises:
        ConfigError: If the name is unknown or a pinned backend cannot be imported.
    """
    if name not in BACKEND_NAMES:
        raise ConfigError(f"SL_BACKEND must be one of {', '.join(BACKEND_NAMES)}, got {name!r}")
    if name == "auto":
        try:
            backend: CurveBackend = ArkworksBackend()
        except ImportError:
            logger.warning("py_arkworks_bls12381 is not installed; using the slow py_ecc backend")
            backend = PyEccBackend()
    else:
        try:
            backend = _FACTORIES[name]()
        except ImportError as exc:
            raise ConfigError(f"curve backend {name!r} is not installed: {exc}") from exc
    logger.debug("Using curve backend %s", backend.name)
    return backend
