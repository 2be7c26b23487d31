"""Logarithmic range proofs for amounts committed as ``v*G + c*T``.

Each value is proven to lie in ``[0, 2**(n-1))``. Up to two commitments share one
transcript: their bits are laid out back to back and padded with zero-weight
bits up to a power of two, then compressed by the halving inner-product
argument ``P' = P + gamma**-2 * L + gamma**2 * R``.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Sequence, Tuple

from errors import MalformedProofError, RangeViolationError, WitnessError

from .encoding import Reader
from .pairing import (
    G1_BYTES,
    SCALAR_BYTES,
    TAG_GENERATORS,
    TAG_RANGE,
    PointG1,
    PublicParams,
    Transcript,
    hash_to_g1,
    scalar_inverse,
    serialize_scalar,
)
from .randomness import random_below

logger = logging.getLogger(__name__)

MIN_BITS = 2
MAX_BITS = 64
MAX_COMMITMENTS = 2

# Index of the inner-product base U among the derived generators.
_U_INDEX = 2**40


def next_power_of_two(value: int) -> int:
    return 1 if value <= 1 else 1 << (value - 1).bit_length()


@lru_cache(maxsize=16)
def generators(size: int) -> Tuple[Tuple[PointG1, ...], Tuple[PointG1, ...], PointG1]:
    """Derive the per-bit vectors and the inner-product base.

    Returns:
        Tuple: ``(G_vec, H_vec, U)`` with ``len(G_vec) == len(H_vec) == size``.
    """
    g_vec = tuple(hash_to_g1(TAG_GENERATORS, 2 * i) for i in range(size))
    h_vec = tuple(hash_to_g1(TAG_GENERATORS, 2 * i + 1) for i in range(size))
    return g_vec, h_vec, hash_to_g1(TAG_GENERATORS, _U_INDEX)


@dataclass(frozen=True)
class RangeStatement:
    """Commitments ``V_j = v_j*G + c_j*T`` and the bit-width ``n``.

    Raises:
        ValueError: If ``n`` or the number of commitments is unsupported.
    """

    commitments: Tuple[PointG1, ...]
    n: int
    G: PointG1
    T: PointG1

    def __post_init__(self) -> None:
        if not MIN_BITS <= self.n <= MAX_BITS:
            raise ValueError(f"bit-width must be in [{MIN_BITS}, {MAX_BITS}], got {self.n}")
        if not 1 <= len(self.commitments) <= MAX_COMMITMENTS:
            raise ValueError(f"expected 1 or 2 commitments, got {len(self.commitments)}")

    @classmethod
    def build(cls, pp: PublicParams, T: PointG1, commitments: Sequence[PointG1], n: int) -> "RangeStatement":
        return cls(commitments=tuple(commitments), n=n, G=pp.G1, T=T)

    @property
    def value_bits(self) -> int:
        return self.n - 1

    @property
    def upper_bound(self) -> int:
        return 1 << self.value_bits

    @property
    def vector_length(self) -> int:
        return next_power_of_two(len(self.commitments) * self.value_bits)

    @property
    def rounds(self) -> int:
        return self.vector_length.bit_length() - 1


@dataclass(frozen=True)
class RangeWitness:
    values: Tuple[int, ...]
    blinders: Tuple[int, ...]


@dataclass(frozen=True)
class RangeProof:
    """Bit commitments, polynomial commitments, final scalars and the L/R rounds."""

    A: PointG1
    S: PointG1
    T1: PointG1
    T2: PointG1
    tau_x: int
    mu: int
    t_hat: int
    a: int
    b: int
    L: Tuple[PointG1, ...]
    R: Tuple[PointG1, ...]

    FIXED_SIZE = 4 * G1_BYTES + 5 * SCALAR_BYTES
    ROUND_SIZE = 2 * G1_BYTES

    @property
    def group_element_count(self) -> int:
        return 4 + len(self.L) + len(self.R)

    def to_bytes(self) -> bytes:
        parts = [point.to_bytes() for point in (self.A, self.S, self.T1, self.T2)]
        parts += [serialize_scalar(value) for value in (self.tau_x, self.mu, self.t_hat, self.a, self.b)]
        for left, right in zip(self.L, self.R):
            parts += [left.to_bytes(), right.to_bytes()]
        return b"".join(parts)

    @classmethod
    def from_bytes(cls, data: bytes) -> "RangeProof":
        """Decode a proof; the number of rounds follows from the length.

        Raises:
            MalformedProofError: If the length is not ``FIXED_SIZE`` plus whole rounds.
        """
        extra = len(data) - cls.FIXED_SIZE
        if extra < 0 or extra % cls.ROUND_SIZE:
            raise MalformedProofError(f"range proof of {len(data)} bytes has no valid shape")
        reader = Reader(data)
        A, S, T1, T2 = (reader.g1() for _ in range(4))
        tau_x, mu, t_hat, a, b = (reader.scalar() for _ in range(5))
        L: List[PointG1] = []
        R: List[PointG1] = []
        for _ in range(extra // cls.ROUND_SIZE):
            L.append(reader.g1())
            R.append(reader.g1())
        reader.finish()
        return cls(A, S, T1, T2, tau_x, mu, t_hat, a, b, tuple(L), tuple(R))


def _msm(scalars: Sequence[int], points: Sequence[PointG1], q: int) -> PointG1:
    return PointG1.multi_scalar_mul(points, [scalar % q for scalar in scalars])


def _inner(a: Sequence[int], b: Sequence[int], q: int) -> int:
    return sum(x * y for x, y in zip(a, b)) % q


def _powers(base: int, count: int, q: int) -> List[int]:
    out = [1] * count
    for i in range(1, count):
        out[i] = out[i - 1] * base % q
    return out


def _weights(statement: RangeStatement, z: int, q: int) -> List[int]:
    # Bit b of value j carries z**(2+j) * 2**b; padding bits carry zero.
    k = statement.value_bits
    weights = [0] * statement.vector_length
    z_power = z * z % q
    for j in range(len(statement.commitments)):
        for bit in range(k):
            weights[j * k + bit] = z_power * (1 << bit) % q
        z_power = z_power * z % q
    return weights


def _start_transcript(statement: RangeStatement) -> Transcript:
    transcript = Transcript(TAG_RANGE)
    transcript.append_int(statement.n)
    transcript.append_int(len(statement.commitments))
    transcript.append_points((statement.G, statement.T))
    transcript.append_points(statement.commitments)
    return transcript


def prove_range(pp: PublicParams, statement: RangeStatement, witness: RangeWitness) -> RangeProof:
    """Prove every committed value lies in ``[0, 2**(n-1))``.

    Args:
        pp: Public parameters.
        statement: Commitments and bit-width.
        witness: Values and blinders opening the commitments.

    Returns:
        RangeProof: Non-interactive proof.

    Raises:
        RangeViolationError: If a value is outside the range.
        WitnessError: If the witness does not open the commitments.
    """
    q = pp.q
    x_st = statement
    m, k, N = len(x_st.commitments), x_st.value_bits, x_st.vector_length
    if len(witness.values) != m or len(witness.blinders) != m:
        raise WitnessError("range witness does not match the number of commitments")
    for value, blinder, commitment in zip(witness.values, witness.blinders, x_st.commitments):
        if not 0 <= value < x_st.upper_bound:
            raise RangeViolationError(f"value is outside [0, 2**{k})")
        if x_st.G * value + x_st.T * blinder != commitment:
            raise WitnessError("range witness does not open its commitment")

    g_vec, h_vec, U = generators(N)
    a_L = [0] * N
    for j, value in enumerate(witness.values):
        for bit in range(k):
            a_L[j * k + bit] = (value >> bit) & 1
    a_R = [(bit - 1) % q for bit in a_L]

    alpha, rho = random_below(q), random_below(q)
    s_L = [random_below(q) for _ in range(N)]
    s_R = [random_below(q) for _ in range(N)]
    A = _msm([alpha] + a_L + a_R, [x_st.T, *g_vec, *h_vec], q)
    S = _msm([rho] + s_L + s_R, [x_st.T, *g_vec, *h_vec], q)

    transcript = _start_transcript(x_st)
    transcript.append_points((A, S))
    y = transcript.challenge()
    z = transcript.challenge()

    y_pow = _powers(y, N, q)
    w = _weights(x_st, z, q)
    l0 = [(a - z) % q for a in a_L]
    l1 = s_L
    r0 = [(y_pow[i] * (a_R[i] + z) + w[i]) % q for i in range(N)]
    r1 = [y_pow[i] * s_R[i] % q for i in range(N)]
    t1 = (_inner(l0, r1, q) + _inner(l1, r0, q)) % q
    t2 = _inner(l1, r1, q)

    tau1, tau2 = random_below(q), random_below(q)
    T1 = x_st.G * t1 + x_st.T * tau1
    T2 = x_st.G * t2 + x_st.T * tau2
    transcript.append_points((T1, T2))
    x = transcript.challenge()

    l_vec = [(l0[i] + l1[i] * x) % q for i in range(N)]
    r_vec = [(r0[i] + r1[i] * x) % q for i in range(N)]
    t_hat = _inner(l_vec, r_vec, q)
    z_blind = sum(pow(z, 2 + j, q) * blinder for j, blinder in enumerate(witness.blinders))
    tau_x = (tau2 * x * x + tau1 * x + z_blind) % q
    mu = (alpha + rho * x) % q

    transcript.append_scalar(tau_x)
    transcript.append_scalar(mu)
    transcript.append_scalar(t_hat)
    x_u = transcript.challenge()

    y_inv = _powers(scalar_inverse(y), N, q)
    h_prime = [h * y_inv[i] for i, h in enumerate(h_vec)]
    L, R, a, b = _prove_inner_product(transcript, list(g_vec), h_prime, U * x_u, l_vec, r_vec, q)
    logger.debug("Generated range proof: commitments=%d, n=%d, rounds=%d", m, x_st.n, len(L))
    return RangeProof(A, S, T1, T2, tau_x, mu, t_hat, a, b, tuple(L), tuple(R))


def _prove_inner_product(
    transcript: Transcript,
    g_vec: List[PointG1],
    h_vec: List[PointG1],
    U: PointG1,
    a: List[int],
    b: List[int],
    q: int,
) -> Tuple[List[PointG1], List[PointG1], int, int]:
    L_out: List[PointG1] = []
    R_out: List[PointG1] = []
    while len(a) > 1:
        h = len(a) // 2
        a_lo, a_hi, b_lo, b_hi = a[:h], a[h:], b[:h], b[h:]
        g_lo, g_hi, h_lo, h_hi = g_vec[:h], g_vec[h:], h_vec[:h], h_vec[h:]
        L = _msm(a_lo + b_hi + [_inner(a_lo, b_hi, q)], g_hi + h_lo + [U], q)
        R = _msm(a_hi + b_lo + [_inner(a_hi, b_lo, q)], g_lo + h_hi + [U], q)
        L_out.append(L)
        R_out.append(R)
        transcript.append_points((L, R))
        gamma = transcript.challenge()
        gamma_inv = scalar_inverse(gamma)
        a = [(a_lo[i] * gamma_inv + a_hi[i] * gamma) % q for i in range(h)]
        b = [(b_lo[i] * gamma + b_hi[i] * gamma_inv) % q for i in range(h)]
        g_vec = [g_lo[i] * gamma + g_hi[i] * gamma_inv for i in range(h)]
        h_vec = [h_lo[i] * gamma_inv + h_hi[i] * gamma for i in range(h)]
    return L_out, R_out, a[0], b[0]


def verify_range(pp: PublicParams, statement: RangeStatement, proof: RangeProof) -> bool:
    """Verify a range proof.

    Returns:
        bool: True iff the proof verifies. Malformed bytes are rejected earlier,
        by :meth:`RangeProof.from_bytes`.
    """
    q = pp.q
    x_st = statement
    N = x_st.vector_length
    if len(proof.L) != x_st.rounds or len(proof.R) != x_st.rounds:
        logger.debug("Range proof has %d rounds, expected %d", len(proof.L), x_st.rounds)
        return False

    transcript = _start_transcript(x_st)
    transcript.append_points((proof.A, proof.S))
    y = transcript.challenge()
    z = transcript.challenge()
    transcript.append_points((proof.T1, proof.T2))
    x = transcript.challenge()
    transcript.append_scalar(proof.tau_x)
    transcript.append_scalar(proof.mu)
    transcript.append_scalar(proof.t_hat)
    x_u = transcript.challenge()
    gammas = []
    for left, right in zip(proof.L, proof.R):
        transcript.append_points((left, right))
        gammas.append(transcript.challenge())
    if y == 0 or any(gamma == 0 for gamma in gammas):
        return False

    y_pow = _powers(y, N, q)
    w = _weights(x_st, z, q)

    # Polynomial evaluation: t_hat*G + tau_x*T == sum z^(2+j) V_j + delta*G + x*T1 + x^2*T2
    delta = ((z - z * z) * sum(y_pow) - z * sum(w)) % q
    lhs = x_st.G * proof.t_hat + x_st.T * proof.tau_x
    rhs = x_st.G * delta + proof.T1 * x + proof.T2 * (x * x)
    for j, commitment in enumerate(x_st.commitments):
        rhs = rhs + commitment * pow(z, 2 + j, q)
    if lhs != rhs:
        logger.debug("Range proof polynomial check failed")
        return False

    # Inner-product check folded into one multi-scalar relation.
    rounds = len(gammas)
    gamma_inv = [scalar_inverse(gamma) for gamma in gammas]
    s = []
    for i in range(N):
        coeff = 1
        for j in range(rounds):
            bit = (i >> (rounds - 1 - j)) & 1
            coeff = coeff * (gamma_inv[j] if bit else gammas[j]) % q
        s.append(coeff)
    y_inv = _powers(scalar_inverse(y), N, q)

    g_vec, h_vec, U = generators(N)
    scalars = [1, x, (-proof.mu) % q, x_u * (proof.t_hat - proof.a * proof.b) % q]
    points = [proof.A, proof.S, x_st.T, U]
    for i in range(N):
        scalars.append((-z - proof.a * s[i]) % q)
        points.append(g_vec[i])
        s_inv = scalar_inverse(s[i])
        scalars.append((z + (w[i] - proof.b * s_inv) * y_inv[i]) % q)
        points.append(h_vec[i])
    for j in range(rounds):
        scalars.append(gamma_inv[j] * gamma_inv[j] % q)
        points.append(proof.L[j])
        scalars.append(gammas[j] * gammas[j] % q)
        points.append(proof.R[j])
    ok = _msm(scalars, points, q).is_identity()
    if not ok:
        logger.debug("Range proof inner-product check failed")
    return ok


def aggregate_prove(pp: PublicParams, statement: RangeStatement, witness: RangeWitness) -> RangeProof:
    """Prove two commitments in one transcript.

    Raises:
        ValueError: If the statement does not hold exactly two commitments.
    """
    if len(statement.commitments) != 2:
        raise ValueError("aggregate proofs cover exactly two commitments")
    return prove_range(pp, statement, witness)


def aggregate_verify(pp: PublicParams, statement: RangeStatement, proof: RangeProof) -> bool:
    if len(statement.commitments) != 2:
        return False
    return verify_range(pp, statement, proof)
