"""Byte framing helpers for wire formats built from pairing-core encodings."""

import struct
from typing import Type

from errors import EncodingError, LengthError, MalformedProofError

from .pairing import G1_BYTES, G2_BYTES, SCALAR_BYTES, PointG1, PointG2, deserialize_scalar

U16_MAX = 0xFFFF


def u16_prefixed(data: bytes) -> bytes:
    """Prefix ``data`` with its length as a big-endian u16."""
    if len(data) > U16_MAX:
        raise LengthError(f"field of {len(data)} bytes does not fit a u16 length prefix")
    return struct.pack(">H", len(data)) + data


def u32_prefixed(data: bytes) -> bytes:
    return struct.pack(">I", len(data)) + data


class Reader:
    """Sequential decoder over a byte string.

    Args:
        data: Bytes to decode.
        truncated: Error raised when a field runs past the end of ``data``.
    """

    def __init__(self, data: bytes, truncated: Type[EncodingError] = MalformedProofError) -> None:
        self._data = memoryview(data)
        self._offset = 0
        self._truncated = truncated

    @property
    def remaining(self) -> int:
        return len(self._data) - self._offset

    def take(self, size: int) -> bytes:
        if size > self.remaining:
            raise self._truncated(
                f"need {size} bytes at offset {self._offset}, only {self.remaining} left"
            )
        chunk = bytes(self._data[self._offset : self._offset + size])
        self._offset += size
        return chunk

    def u8(self) -> int:
        return int(self.take(1)[0])

    def u16(self) -> int:
        value: int = struct.unpack(">H", self.take(2))[0]
        return value

    def u32(self) -> int:
        value: int = struct.unpack(">I", self.take(4))[0]
        return value

    def u16_prefixed(self) -> bytes:
        return self.take(self.u16())

    def u32_prefixed(self) -> bytes:
        return self.take(self.u32())

    def scalar(self) -> int:
        return deserialize_scalar(self.take(SCALAR_BYTES))

    def g1(self) -> PointG1:
        return PointG1.from_bytes(self.take(G1_BYTES))

    def g2(self) -> PointG2:
        return PointG2.from_bytes(self.take(G2_BYTES))

    def finish(self) -> None:
        """Require that every byte was consumed."""
        if self.remaining:
            raise LengthError(f"{self.remaining} trailing bytes after the last field")
