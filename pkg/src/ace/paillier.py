"""Single-identity ACE from Paillier encryption.

``Enc(alpha, m) = ((1 + alpha N) r0^N, (1 + m N) r1^N)`` and the sanitizer
outputs ``c1 * (c0 (1 + rk N))^beta * s^N``, a fresh Paillier encryption
of ``m + beta (delta0 - alpha)`` where ``delta0`` is the plaintext of c0.
"""

from dataclasses import dataclass

from . import arith
from .common import IDENTITY_ZERO, InvalidCiphertext, Role, UsageError, default_rng


@dataclass(frozen=True)
class PaillierPublicParams:
    modulus: arith.PaillierModulus

    @property
    def N(self):
        return self.modulus.N

    @property
    def N2(self):
        return self.modulus.N2


@dataclass(frozen=True)
class PaillierMasterKey:
    modulus: arith.PaillierModulus
    alpha: int

    @property
    def lam(self):
        return self.modulus.lam


@dataclass(frozen=True)
class PaillierEncKey:
    alpha: int


@dataclass(frozen=True)
class PaillierSanKey:
    neg_alpha: int


@dataclass(frozen=True)
class PaillierDecKey:
    modulus: arith.PaillierModulus

    @property
    def lam(self):
        return self.modulus.lam


@dataclass(frozen=True)
class PaillierCiphertext:
    c0: int
    c1: int

    def __iter__(self):
        return iter((self.c0, self.c1))


@dataclass(frozen=True)
class PaillierSanitizedCiphertext:
    cp: int

    def __iter__(self):
        return iter((self.cp,))


def setup(bit_length, rng=None, *, primes=None):
    """Fresh modulus and ``alpha``; ``primes`` forces the factorization."""
    rng = default_rng(rng)
    modulus = arith.generate_paillier_modulus(bit_length, rng, primes=primes)
    alpha = rng.randrange(modulus.N)
    return PaillierPublicParams(modulus.public), PaillierMasterKey(modulus, alpha)


def gen(pp, msk, role):
    role = Role(role)
    if role is Role.SENDER:
        return PaillierEncKey(msk.alpha)
    if role is Role.RECEIVER:
        return PaillierDecKey(msk.modulus)
    if role is Role.SANITIZER:
        return PaillierSanKey((-msk.alpha) % pp.N)
    raise UsageError(f"unknown role {role!r}")


def paillier_encrypt(pp, m, r):
    """Plain Paillier ``(1 + m N) r^N mod N^2``."""
    N, N2 = pp.N, pp.N2
    return (1 + m * N) * arith.powmod(r, N, N2) % N2


def encrypt(pp, ek, m, rng=None, *, coins=None):
    """``coins=(r0, r1)`` fixes the randomness (known-answer tests only)."""
    if not (isinstance(m, int) and 0 <= m < pp.N):
        raise ValueError("message outside Z_N")
    mod = pp.modulus
    rng = default_rng(rng)
    if ek is IDENTITY_ZERO:
        return PaillierCiphertext(mod.random_unit_mod_n2(rng), mod.random_unit_mod_n2(rng))
    r0, r1 = coins if coins is not None else (mod.random_unit_mod_n(rng), mod.random_unit_mod_n(rng))
    return PaillierCiphertext(paillier_encrypt(pp, ek.alpha, r0), paillier_encrypt(pp, m, r1))


def validate(pp, c):
    if not all(pp.modulus.is_unit(v) for v in c):
        raise InvalidCiphertext("ciphertext component is not a unit mod N^2")


def sanitize(pp, rk, c, rng=None, *, coins=None):
    """``coins=(beta, s)`` with beta in Z_N and s a unit mod N."""
    validate(pp, c)
    N, N2 = pp.N, pp.N2
    if coins is None:
        rng = default_rng(rng)
        coins = (rng.randrange(N), pp.modulus.random_unit_mod_n(rng))
    beta, s = coins
    blinded = c.c0 * (1 + rk.neg_alpha * N) % N2
    cp = c.c1 * arith.powmod(blinded, beta, N2) * arith.powmod(s, N, N2) % N2
    return PaillierSanitizedCiphertext(cp)


def decrypt(pp, dk, c):
    """Standard Paillier decryption with ``g = 1 + N``."""
    N, N2 = pp.N, pp.N2
    if not pp.modulus.is_unit(c.cp):
        raise InvalidCiphertext("sanitized ciphertext is not a unit mod N^2")
    lam = dk.lam

    def L(u):
        return (u - 1) // N

    mu = arith.invert(L(arith.powmod(1 + N, lam, N2)), N)
    return L(arith.powmod(c.cp, lam, N2)) * mu % N


def ciphertext_size(pp):
    return 2 * pp.modulus.width


def sanitized_size(pp):
    return pp.modulus.width


def _split(pp, data, count):
    w = pp.modulus.width
    if len(data) != count * w:
        raise InvalidCiphertext(f"expected {count * w} bytes, got {len(data)}")
    return [arith.int_from_bytes(data[k * w:(k + 1) * w]) for k in range(count)]


def ciphertext_to_bytes(pp, c):
    return b"".join(arith.int_to_bytes(v, pp.modulus.width) for v in c)


def ciphertext_from_bytes(pp, data):
    return PaillierCiphertext(*_split(pp, data, 2))


def sanitized_to_bytes(pp, c):
    return arith.int_to_bytes(c.cp, pp.modulus.width)


def sanitized_from_bytes(pp, data):
    return PaillierSanitizedCiphertext(*_split(pp, data, 1))


class PaillierBackend:
    """Adapter used by the repetition scheme; every instance gets its own modulus."""

    tag = "paillier"
    code = 2
    zero_coins = (0, 1)

    def __init__(self, bits, primes=None):
        self.bits = bits
        self.primes = primes

    def setup(self, rng=None):
        return setup(self.bits, rng, primes=self.primes)

    def gen(self, pp, msk, role):
        return gen(pp, msk, role)

    def encrypt(self, pp, ek, m, rng=None, *, coins=None):
        return encrypt(pp, ek, m, rng, coins=coins)

    def sanitize(self, pp, rk, c, rng=None, *, coins=None):
        return sanitize(pp, rk, c, rng, coins=coins)

    def decrypt(self, pp, dk, c):
        return decrypt(pp, dk, c)

    def encode(self, pp, payload):
        return arith.pack_payload(payload, pp.N)

    def decode(self, pp, m):
        return arith.unpack_payload(m, pp.N)

    def capacity(self, pp):
        return max(0, arith.payload_capacity(pp.N))

    ciphertext_size = staticmethod(ciphertext_size)
    sanitized_size = staticmethod(sanitized_size)
    ciphertext_to_bytes = staticmethod(ciphertext_to_bytes)
    ciphertext_from_bytes = staticmethod(ciphertext_from_bytes)
    sanitized_to_bytes = staticmethod(sanitized_to_bytes)
    sanitized_from_bytes = staticmethod(sanitized_from_bytes)
