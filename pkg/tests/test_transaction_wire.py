import math

import pytest

from conftest import RANGE_BITS
from errors import EncodingError, LengthError, MalformedProofError
from ledger import Transaction, transaction_element_count
from ledger.transaction import reference_g1_count


def test_transaction_round_trip(paid):
    data = paid.tx.to_bytes()
    decoded = Transaction.from_bytes(data)
    assert decoded == paid.tx
    assert decoded.tx_id == paid.tx.tx_id
    assert decoded.message == b"invoice 42"


def test_element_count(paid):
    count = transaction_element_count(paid.tx)
    rounds = len(paid.tx.range_proof.L)
    assert rounds == 3
    assert count.g1 == 28 + 2 * rounds
    assert count.g2 == 2
    assert count.scalars == 21
    framing = 2 + len(paid.tx.message) + 2
    assert count.byte_size() + framing == len(paid.tx.to_bytes())


def test_reference_count():
    assert reference_g1_count(32) == 37
    assert math.isclose(reference_g1_count(33), 27 + 2 * math.log2(33))
    assert reference_g1_count(RANGE_BITS) < 28 + 2 * 3


def test_truncated_transaction(paid):
    data = paid.tx.to_bytes()
    for cut in (1, 100, len(data) // 2):
        with pytest.raises(MalformedProofError):
            Transaction.from_bytes(data[:-cut])


def test_trailing_bytes(paid):
    with pytest.raises(LengthError):
        Transaction.from_bytes(paid.tx.to_bytes() + b"\x00")


def test_corrupted_point(paid):
    data = bytearray(paid.tx.to_bytes())
    # First input address: clearing the compression flag makes it undecodable.
    data[0] &= 0x7F
    with pytest.raises(EncodingError):
        Transaction.from_bytes(bytes(data))
