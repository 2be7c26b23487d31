import pytest

from conftest import trials
from crypto import rac
from crypto.pairing import PointG2, pairing
from crypto.randomness import random_nonzero_below
from errors import LengthError


@pytest.fixture(scope="module")
def signer(pp):
    return rac.skey_gen(pp)


@pytest.fixture(scope="module")
def signed(pp, signer):
    sk, _ = signer
    identity = rac.cert_gen(pp)
    return identity, rac.sign(pp, sk, identity.C)


def test_cert_gen_opens(pp):
    identity = rac.cert_gen(pp)
    assert identity.C == pp.G1 * identity.r


def test_sign_and_verify(pp, signer, signed):
    _, vk = signer
    identity, sigma = signed
    assert rac.verify(pp, vk, identity.C, sigma)


def test_wrong_identity_or_key_rejected(pp, signer, signed):
    _, vk = signer
    identity, sigma = signed
    assert not rac.verify(pp, vk, identity.C + pp.G1, sigma)
    _, other_vk = rac.skey_gen(pp)
    assert not rac.verify(pp, other_vk, identity.C, sigma)


def test_adapted_signature_verifies_on_randomized_identity(pp, signer, signed):
    _, vk = signer
    identity, sigma = signed
    for _ in range(trials(1)):
        r_prime = random_nonzero_below(pp.q)
        adapted = rac.adapt(pp, sigma, r_prime)
        assert rac.verify(pp, vk, rac.rndmz(identity.C, r_prime), adapted)
        assert not rac.verify(pp, vk, identity.C, adapted)


def test_adapt_structure(pp, signed):
    _, sigma = signed
    r_prime, s_prime = 12345, 67890
    adapted = rac._adapt(sigma, r_prime, s_prime)
    assert adapted.Z * s_prime == sigma.Z + sigma.T_sig * r_prime
    assert adapted.S == sigma.S * s_prime
    assert adapted.S_hat == sigma.S_hat * s_prime
    assert adapted.T_sig * s_prime == sigma.T_sig


def test_adapt_rerandomizes(pp, signed):
    _, sigma = signed
    first = rac.adapt(pp, sigma, 5)
    second = rac.adapt(pp, sigma, 5)
    assert first.S != second.S


def test_identity_s_hat_rejected(pp, signer, signed):
    _, vk = signer
    identity, sigma = signed
    forged = rac.RacSignature(Z=sigma.Z, S=sigma.S, S_hat=PointG2.identity(), T_sig=sigma.T_sig)
    assert not rac.verify(pp, vk, identity.C, forged)


def test_each_equation_is_checked(pp, signer, signed):
    _, vk = signer
    identity, sigma = signed
    bad = (
        rac.RacSignature(Z=sigma.Z + pp.G1, S=sigma.S, S_hat=sigma.S_hat, T_sig=sigma.T_sig),
        rac.RacSignature(Z=sigma.Z, S=sigma.S + pp.G1, S_hat=sigma.S_hat, T_sig=sigma.T_sig),
        rac.RacSignature(Z=sigma.Z, S=sigma.S, S_hat=sigma.S_hat, T_sig=sigma.T_sig + pp.G1),
    )
    for forged in bad:
        assert not rac.verify(pp, vk, identity.C, forged)


def test_certificate_encoding(signed):
    identity, sigma = signed
    data = rac.certificate_to_bytes(identity.C, sigma)
    assert len(data) == 48 + rac.RacSignature.SIZE
    assert rac.certificate_from_bytes(data) == (identity.C, sigma)
    with pytest.raises(LengthError):
        rac.certificate_from_bytes(data + b"\x00")


def test_shifted_s_hat_rejected(pp, signer, signed):
    _, vk = signer
    identity, sigma = signed
    forged = rac.RacSignature(Z=sigma.Z, S=sigma.S, S_hat=sigma.S_hat + pp.G2, T_sig=sigma.T_sig)
    assert not forged.S_hat.is_identity()
    assert not rac.verify(pp, vk, identity.C, forged)
    assert not rac.verify_batch(pp, vk, [(identity.C, forged)])


def test_batch_verification(pp, signer, signed):
    sk, vk = signer
    identity, sigma = signed
    other = rac.cert_gen(pp)
    other_sigma = rac.sign(pp, sk, other.C)
    assert rac.verify_batch(pp, vk, [])
    assert rac.verify_batch(pp, vk, [(identity.C, sigma), (other.C, other_sigma)])
    # Every single-equation forgery is caught inside a batch with a valid certificate.
    forgeries = (
        rac.RacSignature(Z=sigma.Z + pp.G1, S=sigma.S, S_hat=sigma.S_hat, T_sig=sigma.T_sig),
        rac.RacSignature(Z=sigma.Z, S=sigma.S + pp.G1, S_hat=sigma.S_hat, T_sig=sigma.T_sig),
        rac.RacSignature(Z=sigma.Z, S=sigma.S, S_hat=sigma.S_hat, T_sig=sigma.T_sig + pp.G1),
        rac.RacSignature(Z=sigma.Z, S=sigma.S, S_hat=PointG2.identity(), T_sig=sigma.T_sig),
    )
    for forged in forgeries:
        assert not rac.verify_batch(pp, vk, [(other.C, other_sigma), (identity.C, forged)])
    assert not rac.verify_batch(pp, vk, [(identity.C, other_sigma), (other.C, sigma)])


def test_adapted_and_fresh_signatures_look_alike(pp, signer, signed):
    sk, vk = signer
    identity, sigma = signed
    r_prime = random_nonzero_below(pp.q)
    shifted = rac.rndmz(identity.C, r_prime)
    adapted = [rac.adapt(pp, sigma, r_prime) for _ in range(trials(4))]
    fresh = [rac.sign(pp, sk, shifted) for _ in range(trials(4))]
    for group in (adapted, fresh):
        assert all(rac.verify(pp, vk, shifted, candidate) for candidate in group)
        # Each call draws a fresh S, so no two signatures on the same identity repeat.
        assert len({candidate.S for candidate in group}) == len(group)
        assert len({candidate.Z for candidate in group}) == len(group)
    # Same verification relation S_hat = log(S) in G2 for both kinds.
    for candidate in adapted + fresh:
        assert pairing(pp.G1, candidate.S_hat) == pairing(candidate.S, pp.G2)
    assert not {c.S for c in adapted} & {c.S for c in fresh}
