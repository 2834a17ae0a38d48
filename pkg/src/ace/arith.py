"""Number theory for both backends.

Prime-order groups are the quadratic residues modulo a safe prime
``p = 2q + 1``.  Paillier moduli are products of two distinct primes.
Group elements, scalars and residues are plain Python ints; the
containers here only carry the moduli.

Byte payloads are mapped to integers with a length marker bit and a
16-bit checksum, so that decoding an unrelated (random) value fails with
probability about ``1 - 2**-16``.
"""

from dataclasses import dataclass, field
import hashlib
import math

import gmpy2

from .common import EncodingError, GenerationError, default_rng

MR_ROUNDS = 64
CHECKSUM_BITS = 16
# marker bit + checksum
_CODEC_OVERHEAD_BITS = 1 + CHECKSUM_BITS


def powmod(base, exp, mod):
    """``base**exp % mod`` as a Python int; negative exponents invert."""
    return int(gmpy2.powmod(base, exp, mod))


def invert(a, mod):
    return int(gmpy2.invert(a, mod))


def is_probable_prime(n):
    return n >= 2 and bool(gmpy2.is_prime(n, MR_ROUNDS))


def byte_width(modulus):
    return max(1, (modulus.bit_length() + 7) // 8)


def int_to_bytes(value, width):
    return value.to_bytes(width, "big")


def int_from_bytes(data):
    return int.from_bytes(data, "big")


# ---------------------------------------------------------------------------
# prime-order groups


@dataclass(frozen=True)
class GroupParams:
    """The order-``q`` subgroup of ``Z_p^*`` generated by ``g``."""

    p: int
    q: int
    g: int

    def __post_init__(self):
        if self.p != 2 * self.q + 1:
            raise ValueError("p must equal 2q + 1")
        if self.q < 3 or not (is_probable_prime(self.q) and is_probable_prime(self.p)):
            raise ValueError("p and q must be odd primes")
        if self.g in (0, 1) or not 0 < self.g < self.p or powmod(self.g, self.q, self.p) != 1:
            raise ValueError("g must generate the order-q subgroup")

    @property
    def width(self):
        """Serialized size of one element, in bytes."""
        return byte_width(self.p)

    def contains(self, value):
        """Membership in the QR subgroup (Euler criterion via Legendre symbol)."""
        return (isinstance(value, int) and 0 < value < self.p
                and gmpy2.legendre(value, self.p) == 1)

    def exp(self, e):
        return powmod(self.g, e, self.p)

    def mul(self, *values):
        out = 1
        for v in values:
            out = out * v % self.p
        return out

    def random_scalar(self, rng=None):
        return default_rng(rng).randrange(self.q)

    def random_element(self, rng=None):
        return self.exp(self.random_scalar(rng))

    def elements(self):
        """All subgroup elements in exponent order; only sensible for tiny q."""
        return [self.exp(k) for k in range(self.q)]


def generate_group(bit_length, rng=None, max_attempts=None):
    """Sample a safe prime of exactly ``bit_length`` bits and a subgroup generator.

    ``bit_length`` may be as small as 5 (which forces ``p = 23``); such
    groups are insecure and exist for exhaustive tests.
    """
    if bit_length < 5:
        raise ValueError("bit_length must be at least 5")
    rng = default_rng(rng)
    if max_attempts is None:
        max_attempts = 200 * bit_length * bit_length
    lo, hi = 1 << (bit_length - 2), 1 << (bit_length - 1)
    for _ in range(max_attempts):
        q = rng.randrange(lo, hi) | 1
        if bit_length > 8 and q % 3 == 1:
            # then 3 divides 2q + 1
            continue
        p = 2 * q + 1
        if gmpy2.is_prime(q, 1) and gmpy2.is_prime(p, 1) and is_probable_prime(q) and is_probable_prime(p):
            break
    else:
        raise GenerationError(f"no {bit_length}-bit safe prime found in {max_attempts} attempts")
    while True:
        g = powmod(rng.randrange(2, p - 1), 2, p)
        if g != 1:
            return GroupParams(p, q, g)


# ---------------------------------------------------------------------------
# payload codec


def payload_capacity(bound):
    """Largest payload length (bytes) that packs to an integer below ``bound``."""
    return max(-1, (bound.bit_length() - 1 - _CODEC_OVERHEAD_BITS) // 8)


def _checksum(payload):
    return int.from_bytes(hashlib.blake2b(payload, digest_size=CHECKSUM_BITS // 8).digest(), "big")


def pack_payload(payload, bound):
    """Injectively map ``payload`` to an integer in ``[1, bound)``."""
    payload = bytes(payload)
    if len(payload) > payload_capacity(bound):
        raise EncodingError(f"payload of {len(payload)} bytes exceeds capacity "
                            f"{max(payload_capacity(bound), 0)} for this modulus")
    body = (1 << (8 * len(payload))) | int.from_bytes(payload, "big")
    return (body << CHECKSUM_BITS) | _checksum(payload)


def unpack_payload(u, bound):
    """Inverse of :func:`pack_payload`; None when the checksum does not verify."""
    if not 0 < u < bound:
        return None
    extra = u.bit_length() - _CODEC_OVERHEAD_BITS
    if extra < 0 or extra % 8:
        return None
    n = extra // 8
    if n > payload_capacity(bound):
        return None
    payload = ((u >> CHECKSUM_BITS) ^ (1 << (8 * n))).to_bytes(n, "big")
    if u & ((1 << CHECKSUM_BITS) - 1) != _checksum(payload):
        return None
    return payload


def embed_int(params, u):
    """Map ``u`` in ``[1, q]`` to the subgroup by squaring."""
    if not 1 <= u <= params.q:
        raise EncodingError("integer outside [1, q]")
    return u * u % params.p


def extract_int(params, elem):
    """The square root of ``elem`` lying in ``[1, q]`` (p = 3 mod 4)."""
    root = powmod(elem, (params.p + 1) // 4, params.p)
    if root * root % params.p != elem:
        raise EncodingError("element is not a quadratic residue")
    return root if root <= params.q else params.p - root


def max_message_length(params):
    return max(0, payload_capacity(params.q))


def encode_message(params, payload):
    return embed_int(params, pack_payload(payload, params.q))


def decode_message(params, elem):
    """Recover the payload, or None (the decryption ⊥) on checksum failure."""
    try:
        u = extract_int(params, elem)
    except EncodingError:
        return None
    return unpack_payload(u, params.q)


# ---------------------------------------------------------------------------
# Paillier moduli


@dataclass(frozen=True)
class PaillierModulus:
    """``N = p q``; the factors are present only on the secret side."""

    N: int
    p: int | None = field(default=None, repr=False)
    q: int | None = field(default=None, repr=False)

    def __post_init__(self):
        if self.p is not None and self.p * self.q != self.N:
            raise ValueError("factors do not multiply to N")

    @property
    def N2(self):
        return self.N * self.N

    @property
    def lam(self):
        if self.p is None:
            raise ValueError("lambda needs the factorization")
        return math.lcm(self.p - 1, self.q - 1)

    @property
    def public(self):
        return PaillierModulus(self.N)

    @property
    def width(self):
        """Serialized size of one element of ``Z_{N^2}``."""
        return byte_width(self.N2)

    def is_unit(self, c):
        return isinstance(c, int) and 0 < c < self.N2 and math.gcd(c, self.N) == 1

    def random_unit_mod_n(self, rng=None):
        rng = default_rng(rng)
        while True:
            r = rng.randrange(1, self.N)
            if math.gcd(r, self.N) == 1:
                return r

    def random_unit_mod_n2(self, rng=None):
        rng = default_rng(rng)
        while True:
            r = rng.randrange(1, self.N2)
            if math.gcd(r, self.N) == 1:
                return r

    def units_mod_n(self):
        return [r for r in range(1, self.N) if math.gcd(r, self.N) == 1]


def _random_prime(bits, rng):
    lo, hi = 1 << (bits - 1), 1 << bits
    for _ in range(100 * bits * bits):
        c = rng.randrange(lo, hi) | 1
        if is_probable_prime(c):
            return c
    raise GenerationError(f"no {bits}-bit prime found")


def generate_paillier_modulus(bit_length, rng=None, primes=None, max_attempts=1000):
    """Sample ``N = p q`` with distinct primes and ``N`` of exactly ``bit_length`` bits.

    ``primes`` forces the factorization (tests use ``(3, 5)``).
    """
    if primes is not None:
        p, q = primes
        if p == q or not (is_probable_prime(p) and is_probable_prime(q)):
            raise ValueError("forced factors must be distinct primes")
        return PaillierModulus(p * q, p, q)
    if bit_length < 8:
        raise ValueError("bit_length must be at least 8")
    rng = default_rng(rng)
    half = bit_length // 2
    for _ in range(max_attempts):
        p = _random_prime(half, rng)
        q = _random_prime(bit_length - half, rng)
        n = p * q
        if p != q and n.bit_length() == bit_length and math.gcd(n, (p - 1) * (q - 1)) == 1:
            return PaillierModulus(n, p, q)
    raise GenerationError(f"no {bit_length}-bit Paillier modulus found")
