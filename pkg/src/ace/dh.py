"""Single-identity ACE over a prime-order group (double-strand ElGamal).

A sender holding ``alpha`` encrypts ``m`` as the pair of ElGamal
ciphertexts ``E(g^alpha), E(m)``.  The sanitizer, holding ``-alpha``,
outputs ``E(m) * (E(g^alpha) * g^-alpha)^s1`` re-randomized by ``s2``;
the message survives only when the first strand really encrypted
``g^alpha``.
"""

from dataclasses import dataclass

from . import arith
from .common import IDENTITY_ZERO, InvalidCiphertext, Role, UsageError, default_rng


@dataclass(frozen=True)
class DhPublicParams:
    group: arith.GroupParams
    h: int


@dataclass(frozen=True)
class DhMasterKey:
    alpha: int
    x: int


@dataclass(frozen=True)
class DhEncKey:
    alpha: int


@dataclass(frozen=True)
class DhDecKey:
    neg_x: int


@dataclass(frozen=True)
class DhSanKey:
    neg_alpha: int


@dataclass(frozen=True)
class DhCiphertext:
    c0: int
    c1: int
    c2: int
    c3: int

    def __iter__(self):
        return iter((self.c0, self.c1, self.c2, self.c3))


@dataclass(frozen=True)
class DhSanitizedCiphertext:
    c0p: int
    c1p: int

    def __iter__(self):
        return iter((self.c0p, self.c1p))


def setup(group, rng=None):
    rng = default_rng(rng)
    # x = 0 would make h = 1 and void the s2 rerandomization
    x = 1 + rng.randrange(group.q - 1)
    alpha = group.random_scalar(rng)
    return DhPublicParams(group, group.exp(x)), DhMasterKey(alpha=alpha, x=x)


def gen(pp, msk, role):
    role = Role(role)
    q = pp.group.q
    if role is Role.SENDER:
        return DhEncKey(msk.alpha)
    if role is Role.RECEIVER:
        return DhDecKey((-msk.x) % q)
    if role is Role.SANITIZER:
        return DhSanKey((-msk.alpha) % q)
    raise UsageError(f"unknown role {role!r}")


def encrypt(pp, ek, m, rng=None, *, coins=None):
    """Encrypt the group element ``m``.

    ``ek`` may be :data:`IDENTITY_ZERO`, giving four uniform elements.
    ``coins=(r1, r2)`` fixes the randomness (known-answer tests only).
    """
    G = pp.group
    if not G.contains(m):
        raise InvalidCiphertext("message is not a subgroup element")
    rng = default_rng(rng)
    if ek is IDENTITY_ZERO:
        return DhCiphertext(*(G.random_element(rng) for _ in range(4)))
    r1, r2 = coins if coins is not None else (G.random_scalar(rng), G.random_scalar(rng))
    p = G.p
    return DhCiphertext(
        G.exp(r1),
        G.exp(ek.alpha) * arith.powmod(pp.h, r1, p) % p,
        G.exp(r2),
        m * arith.powmod(pp.h, r2, p) % p,
    )


def validate(pp, c):
    if not all(pp.group.contains(v) for v in c):
        raise InvalidCiphertext("ciphertext component outside the prime-order subgroup")


def sanitize(pp, rk, c, rng=None, *, coins=None):
    """Sanitize ``c``; rejects tuples with non-subgroup components."""
    validate(pp, c)
    G = pp.group
    p = G.p
    if coins is None:
        rng = default_rng(rng)
        coins = (G.random_scalar(rng), G.random_scalar(rng))
    s1, s2 = coins
    c0p = c.c2 * arith.powmod(c.c0, s1, p) * G.exp(s2) % p
    c1p = c.c3 * arith.powmod(G.exp(rk.neg_alpha) * c.c1 % p, s1, p) * arith.powmod(pp.h, s2, p) % p
    out = DhSanitizedCiphertext(c0p, c1p)
    assert G.contains(c0p) and G.contains(c1p)
    return out


def decrypt(pp, dk, c):
    p = pp.group.p
    return c.c1p * arith.powmod(c.c0p, dk.neg_x, p) % p


# ---------------------------------------------------------------------------
# serialization: concatenated fixed-width big-endian components


def ciphertext_size(pp):
    return 4 * pp.group.width


def sanitized_size(pp):
    return 2 * pp.group.width


def _split(pp, data, count):
    w = pp.group.width
    if len(data) != count * w:
        raise InvalidCiphertext(f"expected {count * w} bytes, got {len(data)}")
    return [arith.int_from_bytes(data[k * w:(k + 1) * w]) for k in range(count)]


def ciphertext_to_bytes(pp, c):
    w = pp.group.width
    return b"".join(arith.int_to_bytes(v, w) for v in c)


def ciphertext_from_bytes(pp, data):
    return DhCiphertext(*_split(pp, data, 4))


def sanitized_to_bytes(pp, c):
    w = pp.group.width
    return b"".join(arith.int_to_bytes(v, w) for v in c)


def sanitized_from_bytes(pp, data):
    return DhSanitizedCiphertext(*_split(pp, data, 2))


class DhBackend:
    """Adapter used by the repetition scheme; all instances share one group."""

    tag = "dh"
    code = 1

    def __init__(self, group):
        self.group = group

    @classmethod
    def generate(cls, bits, rng=None):
        return cls(arith.generate_group(bits, rng))

    def setup(self, rng=None):
        return setup(self.group, rng)

    def gen(self, pp, msk, role):
        return gen(pp, msk, role)

    def encrypt(self, pp, ek, m, rng=None, *, coins=None):
        return encrypt(pp, ek, m, rng, coins=coins)

    def sanitize(self, pp, rk, c, rng=None, *, coins=None):
        return sanitize(pp, rk, c, rng, coins=coins)

    # zero sanitizer randomness: output depends on c alone
    zero_coins = (0, 0)

    def decrypt(self, pp, dk, c):
        return decrypt(pp, dk, c)

    def encode(self, pp, payload):
        return arith.encode_message(pp.group, payload)

    def decode(self, pp, m):
        return arith.decode_message(pp.group, m)

    def capacity(self, pp):
        return arith.max_message_length(pp.group)

    ciphertext_size = staticmethod(ciphertext_size)
    sanitized_size = staticmethod(sanitized_size)
    ciphertext_to_bytes = staticmethod(ciphertext_to_bytes)
    ciphertext_from_bytes = staticmethod(ciphertext_from_bytes)
    sanitized_to_bytes = staticmethod(sanitized_to_bytes)
    sanitized_from_bytes = staticmethod(sanitized_from_bytes)
