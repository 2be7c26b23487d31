import dataclasses
from typing import Tuple

import pytest

from conftest import RANGE_BITS, trials
from crypto.pairing import PublicParams, scalar_inverse
from crypto.randomness import seeded
from crypto.sok import (
    TX1_COMMITMENT_COUNT,
    Tx1Blinders,
    Tx1Proof,
    Tx1Prover,
    Tx1Statement,
    Tx1Witness,
    check_tx1_witness,
    prove_bdl,
    prove_dl,
    prove_tx1,
    tx1_challenge,
    tx1_recompute_commitments,
    verify_bdl,
    verify_dl,
    verify_tx1,
)
from errors import WitnessError
from ledger import LedgerState, aa_gen, mk_gen, scan_output, uk_gen_and_register
from ledger.transaction import build_statement


def make_instance(pp: PublicParams, amounts_in=(5, 7), amounts_out=(9, 3)) -> Tuple[Tx1Statement, Tx1Witness]:
    """A valid 2-2 statement built from real accounts."""
    keys = mk_gen(pp)
    public = keys.public()
    state = LedgerState(RANGE_BITS)
    alice, alice_secret = uk_gen_and_register(pp, keys, state, "alice")
    bob, _ = uk_gen_and_register(pp, keys, state, "bob")
    owned = []
    for amount in amounts_in:
        out = aa_gen(pp, amount, alice, public, range_bits=RANGE_BITS)
        found = scan_output(pp, public, alice_secret, out.account, out.bundle, bound=64)
        assert found is not None
        owned.append(found)
    generated = [
        aa_gen(pp, amount, payee, public, range_bits=RANGE_BITS)
        for amount, payee in zip(amounts_out, (bob, alice))
    ]
    statement = build_statement(
        [o.account for o in owned],
        [g.account for g in generated],
        [g.bundle for g in generated],
        [g.certificate for g in generated],
        b"ctx",
        public.T,
        pp.G1,
    )
    witness = Tx1Witness(
        v=(owned[0].amount, owned[1].amount),
        v_hat=(generated[0].secrets.v, generated[1].secrets.v),
        c=(owned[0].c, owned[1].c),
        c_hat=(generated[0].secrets.c, generated[1].secrets.c),
        sc=(owned[0].spend_key, owned[1].spend_key),
        gamma=(generated[0].secrets.gamma, generated[1].secrets.gamma),
        r=(generated[0].secrets.r, generated[1].secrets.r),
        S_hat=(generated[0].secrets.S_hat, generated[1].secrets.S_hat),
        W=(generated[0].secrets.W, generated[1].secrets.W),
    )
    return statement, witness


@pytest.fixture(scope="module")
def instance(pp):
    return make_instance(pp)


@pytest.fixture(scope="module")
def proof(pp, instance):
    statement, witness = instance
    return prove_tx1(pp, statement, witness)


def test_dl_proof(pp):
    w = 424242
    y = pp.G1 * w
    proof = prove_dl(pp, pp.G1, y, w, b"m")
    assert verify_dl(pp, pp.G1, y, proof, b"m")
    assert not verify_dl(pp, pp.G1, y, proof, b"other")
    assert not verify_dl(pp, pp.G1, y + pp.G1, proof, b"m")
    with pytest.raises(WitnessError):
        prove_dl(pp, pp.G1, y, w + 1, b"m")


def test_bdl_proof(pp):
    w, a, b = 1001, 17, 99
    y1, y2 = pp.G1 * w, pp.G1 * (a * w + b)
    proof = prove_bdl(pp, pp.G1, y1, y2, w, a, b, b"m")
    assert verify_bdl(pp, pp.G1, y1, y2, a, b, proof, b"m")
    assert not verify_bdl(pp, pp.G1, y1, y2, a, b + 1, proof, b"m")
    assert not verify_bdl(pp, pp.G1, y1, y2 + pp.G1, a, b, proof, b"m")
    with pytest.raises(WitnessError):
        prove_bdl(pp, pp.G1, y1, y2 + pp.G1, w, a, b, b"m")


def test_witness_satisfies_statement(instance):
    statement, witness = instance
    check_tx1_witness(statement, witness)


def test_proof_verifies(pp, instance, proof):
    statement, _ = instance
    assert verify_tx1(pp, statement, proof)
    assert len(proof.scalars()) == Tx1Proof.SCALAR_COUNT == 16
    assert len(proof.group_elements()) == Tx1Proof.POINT_COUNT == 4
    assert len(proof.to_bytes()) == Tx1Proof.SIZE


def test_proof_repeats_verify(pp):
    for _ in range(trials(1)):
        statement, witness = make_instance(pp)
        assert verify_tx1(pp, statement, prove_tx1(pp, statement, witness))


def test_message_is_bound(pp, instance, proof):
    statement, _ = instance
    assert not verify_tx1(pp, dataclasses.replace(statement, message=b"ctx2"), proof)


def test_every_response_is_checked(pp, instance, proof):
    statement, _ = instance
    scalars, points = proof.scalars(), proof.group_elements()
    for i in range(len(scalars)):
        mutated = list(scalars)
        mutated[i] = (mutated[i] + 1) % pp.q
        assert not verify_tx1(pp, statement, Tx1Proof.from_components(mutated, points)), i
    for i in range(len(points)):
        mutated_points = list(points)
        mutated_points[i] = mutated_points[i] + pp.G1
        assert not verify_tx1(pp, statement, Tx1Proof.from_components(scalars, mutated_points)), i


@pytest.mark.parametrize(
    "field", ["cm", "Q", "cm_hat", "Q_hat", "C_hat", "D_hat", "R_hat", "Z_prime", "T_prime"]
)
@pytest.mark.parametrize("index", [0, 1])
def test_every_statement_field_is_bound(pp, instance, proof, field, index):
    statement, _ = instance
    pair = list(getattr(statement, field))
    pair[index] = pair[index] + pp.G1
    mutated = dataclasses.replace(statement, **{field: tuple(pair)})
    assert not verify_tx1(pp, mutated, proof)


def test_invalid_witness_named(pp, instance):
    statement, witness = instance
    with pytest.raises(WitnessError, match="input address clause fails for index 1"):
        check_tx1_witness(statement, dataclasses.replace(witness, sc=(witness.sc[0] + 1, witness.sc[1])))
    with pytest.raises(WitnessError, match="ephemeral key clause fails for index 2"):
        prove_tx1(pp, statement, dataclasses.replace(witness, r=(witness.r[0], witness.r[1] + 1)))


def test_imbalanced_statement_cannot_be_proved(pp):
    statement, witness = make_instance(pp, amounts_in=(5, 7), amounts_out=(9, 4))
    with pytest.raises(WitnessError, match="balance clause fails"):
        check_tx1_witness(statement, witness)
    forced = prove_tx1(pp, statement, witness, validate=False)
    assert not verify_tx1(pp, statement, forced)


def test_fixed_blinders_are_deterministic(pp, instance):
    statement, witness = instance
    with seeded(3):
        blinders = Tx1Blinders.random(pp)
    first = prove_tx1(pp, statement, witness, blinders=blinders)
    second = prove_tx1(pp, statement, witness, blinders=blinders)
    assert first.to_bytes() == second.to_bytes()


def test_commitment_order(pp, instance):
    statement, witness = instance
    prover = Tx1Prover(pp, statement, witness)
    commitments = prover.commitments()
    assert len(commitments) == TX1_COMMITMENT_COUNT
    e = tx1_challenge(statement, commitments)
    assert tx1_recompute_commitments(statement, prover.respond(e)) == commitments


def test_two_challenges_extract_the_witness(pp, instance):
    statement, witness = instance
    prover = Tx1Prover(pp, statement, witness)
    commitments = prover.commitments()
    e1, e2 = 1111, 2222
    p1, p2 = prover.respond(e1), prover.respond(e2)
    # Both transcripts are accepting against the same first move.
    assert tx1_recompute_commitments(statement, p1) == commitments
    assert tx1_recompute_commitments(statement, p2) == commitments

    inv = scalar_inverse(e2 - e1)

    def extract(z1: int, z2: int) -> int:
        return (z1 - z2) * inv % pp.q

    for j in range(2):
        assert extract(p1.z_v[j], p2.z_v[j]) == witness.v[j]
        assert extract(p1.z_c[j], p2.z_c[j]) == witness.c[j]
        assert extract(p1.z_sc[j], p2.z_sc[j]) == witness.sc[j] % pp.q
        assert extract(p1.z_v_hat[j], p2.z_v_hat[j]) == witness.v_hat[j]
        assert extract(p1.z_c_hat[j], p2.z_c_hat[j]) == witness.c_hat[j]
        assert (p1.Z_S_hat[j] - p2.Z_S_hat[j]) * inv == witness.S_hat[j]
        assert (p1.Z_W[j] - p2.Z_W[j]) * inv == witness.W[j]
    v_in = sum(extract(p1.z_v[j], p2.z_v[j]) for j in range(2))
    v_out = sum(extract(p1.z_v_hat[j], p2.z_v_hat[j]) for j in range(2))
    assert v_in == v_out
