"""The repetition scheme: ``n`` independent single-identity instances.

Receiver ``j`` holds the decryption key of instance ``j``; sender ``i``
holds the encryption keys of every instance ``j`` with ``P(i, j) = 1``
and fills the remaining positions with rightless (uniform) ciphertexts.
The sanitizer holds all ``n`` sanitizer keys and sanitizes componentwise.
"""

from dataclasses import dataclass
import struct
from typing import Mapping

from .common import (IDENTITY_ZERO, BackendMismatch, EncodingError, InvalidCiphertext, Role,
                     UsageError, default_rng)
from .dh import DhBackend
from .paillier import PaillierBackend


@dataclass(frozen=True)
class Policy:
    """``matrix[i-1][j-1] = P(i, j)`` for identities ``1..n``."""

    n: int
    matrix: tuple

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("a policy needs at least one identity")
        rows = tuple(tuple(bool(b) for b in row) for row in self.matrix)
        if len(rows) != self.n or any(len(row) != self.n for row in rows):
            raise ValueError(f"policy matrix must be {self.n}x{self.n}")
        object.__setattr__(self, "matrix", rows)

    @classmethod
    def from_rows(cls, rows):
        rows = [list(r) for r in rows]
        return cls(len(rows), tuple(map(tuple, rows)))

    def allows(self, i, j):
        """P(i, j) including the conventions for identities 0 and n+1."""
        n = self.n
        if not (0 <= i <= n + 1 and 0 <= j <= n + 1):
            raise UsageError(f"identity out of range 0..{n + 1}")
        if i == 0 or j == 0 or j == n + 1:
            return False
        if i == n + 1:
            return True
        return self.matrix[i - 1][j - 1]

    def writable(self, i):
        """The set of receivers sender ``i`` may reach."""
        return {j for j in range(1, self.n + 1) if self.allows(i, j)}

    def pairs(self, allowed=True):
        return [(i, j) for i in range(1, self.n + 1) for j in range(1, self.n + 1)
                if self.allows(i, j) == allowed]

    def to_text(self):
        lines = [str(self.n)]
        lines += [" ".join("1" if b else "0" for b in row) for row in self.matrix]
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text):
        """Parse ``n`` followed by ``n`` rows of ``n`` space-separated bits."""
        lines = [(k, ln.strip()) for k, ln in enumerate(text.splitlines(), 1) if ln.strip()]
        if not lines:
            raise ValueError("empty policy")
        lineno, head = lines[0]
        try:
            n = int(head)
        except ValueError:
            raise ValueError(f"line {lineno}: expected the number of identities, got {head!r}") from None
        if n < 1:
            raise ValueError(f"line {lineno}: n must be positive")
        body = lines[1:]
        if len(body) != n:
            raise ValueError(f"expected {n} matrix rows, found {len(body)}")
        rows = []
        for lineno, ln in body:
            bits = ln.split()
            if len(bits) != n or any(b not in ("0", "1") for b in bits):
                raise ValueError(f"line {lineno}: expected {n} bits (0/1), got {ln!r}")
            rows.append(tuple(b == "1" for b in bits))
        return cls(n, tuple(rows))


def bell_lapadula(n):
    """No read up, no write down: ``P(i, j) = 1`` iff ``i >= j``."""
    return Policy(n, tuple(tuple(i >= j for j in range(1, n + 1)) for i in range(1, n + 1)))


# ---------------------------------------------------------------------------
# keys and ciphertexts


@dataclass(frozen=True)
class MultiPublicParams:
    n: int
    backend: str
    instances: tuple


@dataclass(frozen=True)
class MultiMasterKey:
    policy: Policy
    keys: tuple  # (ek, dk, rk) per instance
    pp: MultiPublicParams


@dataclass(frozen=True)
class MultiEncKey:
    identity: int
    keys: Mapping[int, object]


@dataclass(frozen=True)
class MultiDecKey:
    identity: int
    key: object


@dataclass(frozen=True)
class MultiSanKey:
    keys: tuple


@dataclass(frozen=True)
class MultiCiphertext:
    components: tuple

    def __len__(self):
        return len(self.components)


@dataclass(frozen=True)
class MultiSanitizedCiphertext:
    components: tuple

    def __len__(self):
        return len(self.components)


BACKENDS = {"dh": DhBackend, "paillier": PaillierBackend}
BACKEND_CODES = {1: "dh", 2: "paillier"}


def backend_for(pp):
    """Rebuild the backend adapter implied by public parameters."""
    if pp.backend == "dh":
        return DhBackend(pp.instances[0].group)
    if pp.backend == "paillier":
        return PaillierBackend(pp.instances[0].N.bit_length())
    raise BackendMismatch(f"unknown backend {pp.backend!r}")


class AceScheme:
    """ACE for an arbitrary ``n x n`` policy over a single-identity backend."""

    def __init__(self, backend):
        self.backend = backend

    @classmethod
    def for_params(cls, pp):
        return cls(backend_for(pp))

    # -- setup and keys ------------------------------------------------------

    def setup(self, policy, rng=None):
        rng = default_rng(rng)
        be = self.backend
        pps, keys = [], []
        for _ in range(policy.n):
            pp_i, msk_i = be.setup(rng)
            pps.append(pp_i)
            keys.append(tuple(be.gen(pp_i, msk_i, role)
                              for role in (Role.SENDER, Role.RECEIVER, Role.SANITIZER)))
        pp = MultiPublicParams(policy.n, be.tag, tuple(pps))
        return pp, MultiMasterKey(policy, tuple(keys), pp)

    def gen(self, msk, identity, role):
        """Key for ``identity`` in ``0..n+1``; identity 0 gets the pp-only marker."""
        role = Role(role)
        policy = msk.policy
        n = policy.n
        if not 0 <= identity <= n + 1:
            raise UsageError(f"identity {identity} outside 0..{n + 1}")
        if role is Role.SANITIZER:
            if identity != n + 1:
                raise UsageError(f"only identity {n + 1} holds the sanitizer key")
            return MultiSanKey(tuple(k[2] for k in msk.keys))
        if identity == 0:
            return IDENTITY_ZERO
        if role is Role.SENDER:
            return MultiEncKey(identity, {j: msk.keys[j - 1][0] for j in sorted(policy.writable(identity))})
        if identity == n + 1:
            raise UsageError("the sanitizer identity cannot receive")
        return MultiDecKey(identity, msk.keys[identity - 1][1])

    # -- the four algorithms -------------------------------------------------

    def capacity(self, pp):
        """Longest payload every instance can carry."""
        return min(self.backend.capacity(p) for p in pp.instances)

    def encode(self, pp, payload):
        if len(payload) > self.capacity(pp):
            raise EncodingError(f"payload of {len(payload)} bytes exceeds capacity {self.capacity(pp)}")
        return [self.backend.encode(p, payload) for p in pp.instances]

    def encrypt(self, pp, ek, payload, rng=None):
        rng = default_rng(rng)
        messages = self.encode(pp, payload)
        keys = {} if ek is IDENTITY_ZERO else ek.keys
        comps = []
        for j, (pp_j, m_j) in enumerate(zip(pp.instances, messages), 1):
            comps.append(self.backend.encrypt(pp_j, keys.get(j, IDENTITY_ZERO), m_j, rng))
        return MultiCiphertext(tuple(comps))

    def sanitize(self, pp, rk, c, rng=None, *, coins=None):
        """Componentwise sanitization; one bad component rejects the whole vector."""
        if len(c) != pp.n:
            raise InvalidCiphertext(f"expected {pp.n} components, got {len(c)}")
        rng = default_rng(rng)
        if coins is None:
            coins = [None] * pp.n
        out = [self.backend.sanitize(pp_j, rk_j, c_j, rng, coins=co)
               for pp_j, rk_j, c_j, co in zip(pp.instances, rk.keys, c.components, coins)]
        return MultiSanitizedCiphertext(tuple(out))

    def decrypt_element(self, pp, dk, c):
        """Backend plaintext at the receiver's own position."""
        if len(c) != pp.n:
            raise InvalidCiphertext(f"expected {pp.n} components, got {len(c)}")
        j = dk.identity
        if not 1 <= j <= pp.n:
            raise UsageError(f"receiver identity {j} outside 1..{pp.n}")
        return self.backend.decrypt(pp.instances[j - 1], dk.key, c.components[j - 1])

    def decrypt(self, pp, dk, c):
        """Payload bytes, or None for ⊥."""
        if dk is IDENTITY_ZERO:
            return None
        m = self.decrypt_element(pp, dk, c)
        return self.backend.decode(pp.instances[dk.identity - 1], m)

    # -- vector serialization ------------------------------------------------
    # header: kind (1) | backend code (1) | n (2), then fixed-width components

    HEADER = struct.Struct(">BBH")
    KIND_CIPHERTEXT = 1
    KIND_SANITIZED = 2

    def _pack(self, pp, kind, comps, to_bytes):
        head = self.HEADER.pack(kind, self.backend.code, len(comps))
        return head + b"".join(to_bytes(p, c) for p, c in zip(pp.instances, comps))

    def _unpack(self, pp, kind, data, size, from_bytes):
        if len(data) < self.HEADER.size:
            raise InvalidCiphertext("truncated ciphertext header")
        k, code, n = self.HEADER.unpack_from(data)
        if k != kind:
            raise InvalidCiphertext("wrong ciphertext kind")
        if code != self.backend.code:
            raise BackendMismatch(f"ciphertext backend {BACKEND_CODES.get(code, code)!r} "
                                  f"does not match {self.backend.tag!r}")
        if n != pp.n:
            raise InvalidCiphertext(f"ciphertext has {n} components, expected {pp.n}")
        comps, off = [], self.HEADER.size
        for p in pp.instances:
            w = size(p)
            chunk = data[off:off + w]
            if len(chunk) != w:
                raise InvalidCiphertext("truncated ciphertext body")
            comps.append(from_bytes(p, chunk))
            off += w
        if off != len(data):
            raise InvalidCiphertext("trailing bytes after ciphertext")
        return tuple(comps)

    def ciphertext_to_bytes(self, pp, c):
        return self._pack(pp, self.KIND_CIPHERTEXT, c.components, self.backend.ciphertext_to_bytes)

    def ciphertext_from_bytes(self, pp, data):
        be = self.backend
        return MultiCiphertext(self._unpack(pp, self.KIND_CIPHERTEXT, data,
                                            be.ciphertext_size, be.ciphertext_from_bytes))

    def sanitized_to_bytes(self, pp, c):
        return self._pack(pp, self.KIND_SANITIZED, c.components, self.backend.sanitized_to_bytes)

    def sanitized_from_bytes(self, pp, data):
        be = self.backend
        return MultiSanitizedCiphertext(self._unpack(pp, self.KIND_SANITIZED, data,
                                                     be.sanitized_size, be.sanitized_from_bytes))
