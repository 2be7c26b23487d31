import dataclasses
import math

import pytest

from crypto.pairing import TAG_GENERATORS, hash_to_g1
from crypto.randomness import random_nonzero_below
from crypto.rangeproof import (
    RangeProof,
    RangeStatement,
    RangeWitness,
    aggregate_prove,
    aggregate_verify,
    generators,
    next_power_of_two,
    prove_range,
    verify_range,
)
from errors import MalformedProofError, RangeViolationError, WitnessError


@pytest.fixture(scope="module")
def T():
    return hash_to_g1(b"SL/test/T", 0)


def commit(pp, T, value, blinder):
    return pp.G1 * value + T * blinder


def single(pp, T, value, n):
    blinder = random_nonzero_below(pp.q)
    statement = RangeStatement.build(pp, T, [commit(pp, T, value, blinder)], n)
    return statement, RangeWitness(values=(value,), blinders=(blinder,))


@pytest.fixture(scope="module")
def pair_proof(pp, T):
    blinders = (random_nonzero_below(pp.q), random_nonzero_below(pp.q))
    values = (9, 3)
    statement = RangeStatement.build(pp, T, [commit(pp, T, v, c) for v, c in zip(values, blinders)], 5)
    return statement, aggregate_prove(pp, statement, RangeWitness(values, blinders))


def test_next_power_of_two():
    assert [next_power_of_two(v) for v in (0, 1, 2, 3, 5, 32, 33)] == [1, 1, 2, 4, 8, 32, 64]


def test_generators_are_distinct_and_stable():
    g_vec, h_vec, U = generators(4)
    points = set(g_vec) | set(h_vec) | {U}
    assert len(points) == 9
    assert generators(4)[0][0] == hash_to_g1(TAG_GENERATORS, 0)


def test_exhaustive_small_width(pp, T):
    n = 4
    for value in range(2 ** (n - 1)):
        statement, witness = single(pp, T, value, n)
        proof = prove_range(pp, statement, witness)
        assert verify_range(pp, statement, proof), value
    for value in range(2 ** (n - 1), 2**n):
        with pytest.raises(RangeViolationError):
            prove_range(pp, *single(pp, T, value, n))
        # A proof for the value with its top bit cleared does not carry over.
        statement, witness = single(pp, T, value - 2 ** (n - 1), n)
        proof = prove_range(pp, statement, witness)
        lifted = RangeStatement.build(pp, T, [statement.commitments[0] + pp.G1 * 2 ** (n - 1)], n)
        assert not verify_range(pp, lifted, proof), value


@pytest.mark.slow
def test_protocol_width(pp, T):
    statement, witness = single(pp, T, 1_000_000, 33)
    proof = prove_range(pp, statement, witness)
    assert len(proof.L) == statement.rounds == 5
    assert verify_range(pp, statement, proof)
    with pytest.raises(RangeViolationError):
        prove_range(pp, *single(pp, T, 2**32, 33))


def test_proof_does_not_transfer_to_other_commitment(pp, T):
    statement, witness = single(pp, T, 6, 4)
    proof = prove_range(pp, statement, witness)
    shifted = RangeStatement.build(pp, T, [statement.commitments[0] + pp.G1], 4)
    assert not verify_range(pp, shifted, proof)


def test_witness_must_open_commitment(pp, T):
    statement, witness = single(pp, T, 3, 4)
    with pytest.raises(WitnessError):
        prove_range(pp, statement, RangeWitness(values=(4,), blinders=witness.blinders))
    with pytest.raises(WitnessError):
        prove_range(pp, statement, RangeWitness(values=(3, 3), blinders=(1, 2)))


@pytest.mark.parametrize("n", [4, 8, 16, 32, 64])
def test_rounds_single_commitment(pp, T, n):
    statement = RangeStatement.build(pp, T, [pp.G1], n)
    assert statement.rounds == int(math.log2(n))
    assert statement.value_bits == n - 1


@pytest.mark.parametrize("n, rounds", [(4, 3), (5, 3), (8, 4), (17, 5), (33, 6), (64, 7)])
def test_rounds_two_commitments(pp, T, n, rounds):
    assert RangeStatement.build(pp, T, [pp.G1, pp.G1], n).rounds == rounds


def test_single_proof_size(pp, T):
    statement, witness = single(pp, T, 5, 8)
    proof = prove_range(pp, statement, witness)
    assert len(proof.L) == len(proof.R) == 3
    assert proof.group_element_count == 4 + 2 * 3
    assert len(proof.to_bytes()) == RangeProof.FIXED_SIZE + 3 * RangeProof.ROUND_SIZE


def test_aggregate_proof(pp, pair_proof):
    statement, proof = pair_proof
    assert aggregate_verify(pp, statement, proof)
    assert RangeProof.from_bytes(proof.to_bytes()) == proof


def test_aggregate_requires_two_commitments(pp, T):
    statement, witness = single(pp, T, 1, 5)
    with pytest.raises(ValueError):
        aggregate_prove(pp, statement, witness)
    assert not aggregate_verify(pp, statement, prove_range(pp, statement, witness))


def test_aggregate_range_violation(pp, T):
    blinders = (5, 6)
    values = (16, 0)
    statement = RangeStatement.build(pp, T, [commit(pp, T, v, c) for v, c in zip(values, blinders)], 5)
    with pytest.raises(RangeViolationError):
        aggregate_prove(pp, statement, RangeWitness(values, blinders))


@pytest.mark.parametrize("field", ["tau_x", "mu", "t_hat", "a", "b"])
def test_tampered_scalar_rejected(pp, pair_proof, field):
    statement, proof = pair_proof
    tampered = dataclasses.replace(proof, **{field: (getattr(proof, field) + 1) % pp.q})
    assert not aggregate_verify(pp, statement, tampered)


@pytest.mark.parametrize("field", ["A", "S", "T1", "T2"])
def test_tampered_point_rejected(pp, pair_proof, field):
    statement, proof = pair_proof
    tampered = dataclasses.replace(proof, **{field: getattr(proof, field) + pp.G1})
    assert not aggregate_verify(pp, statement, tampered)


def test_tampered_rounds_rejected(pp, pair_proof):
    statement, proof = pair_proof
    swapped = dataclasses.replace(proof, L=(proof.R[0],) + proof.L[1:], R=(proof.L[0],) + proof.R[1:])
    assert not aggregate_verify(pp, statement, swapped)
    short = dataclasses.replace(proof, L=proof.L[:-1], R=proof.R[:-1])
    assert not aggregate_verify(pp, statement, short)


def test_wrong_width_rejected(pp, pair_proof):
    statement, proof = pair_proof
    assert not aggregate_verify(pp, dataclasses.replace(statement, n=9), proof)


def test_malformed_bytes(pair_proof):
    _, proof = pair_proof
    data = proof.to_bytes()
    with pytest.raises(MalformedProofError):
        RangeProof.from_bytes(data[:-1])
    with pytest.raises(MalformedProofError):
        RangeProof.from_bytes(data[: RangeProof.FIXED_SIZE - 1])


@pytest.mark.parametrize("n, count", [(1, 1), (65, 1), (5, 0), (5, 3)])
def test_statement_validation(pp, T, n, count):
    with pytest.raises(ValueError):
        RangeStatement.build(pp, T, [pp.G1] * count, n)
