"""Binary key-file envelopes.

Every file starts with ``magic | version | backend | role | identity(u16) |
body length(u32)``.  Bodies are sequences of u32-length-prefixed fields;
integers inside are big-endian, padded to the byte width of their modulus.
Role keys start with an 8-byte fingerprint of the public parameters they
belong to so that mismatched files are caught on load.
"""

from dataclasses import dataclass
import enum
import hashlib
import struct

from . import arith
from .common import IDENTITY_ZERO, BackendMismatch, UsageError
from .dh import DhDecKey, DhEncKey, DhPublicParams, DhSanKey
from .multi import (BACKEND_CODES, MultiDecKey, MultiEncKey, MultiMasterKey, MultiPublicParams,
                    MultiSanKey, Policy)
from .paillier import PaillierDecKey, PaillierEncKey, PaillierPublicParams, PaillierSanKey

MAGIC = 0xAC
VERSION = 1
_HEAD = struct.Struct(">BBBBHI")


class KeyRole(enum.IntEnum):
    SENDER = 1
    RECEIVER = 2
    SANITIZER = 3
    MASTER = 4
    PUBLIC_PARAMS = 5


class FormatError(ValueError):
    pass


@dataclass(frozen=True)
class KeyFileEnvelope:
    backend: int
    role: KeyRole
    identity: int
    body: bytes

    def to_bytes(self):
        return _HEAD.pack(MAGIC, VERSION, self.backend, self.role, self.identity, len(self.body)) + self.body

    @classmethod
    def from_bytes(cls, data):
        if len(data) < _HEAD.size:
            raise FormatError("truncated key file")
        magic, version, backend, role, identity, size = _HEAD.unpack_from(data)
        if magic != MAGIC:
            raise FormatError("not an ACE key file")
        if version != VERSION:
            raise FormatError(f"unsupported key file version {version}")
        if backend not in BACKEND_CODES:
            raise FormatError(f"unknown backend code {backend}")
        body = data[_HEAD.size:]
        if len(body) != size:
            raise FormatError("key file body length mismatch")
        try:
            role = KeyRole(role)
        except ValueError:
            raise FormatError(f"unknown role tag {role}") from None
        return cls(backend, role, identity, bytes(body))


class _Writer:
    def __init__(self):
        self.parts = []

    def raw(self, data):
        self.parts.append(struct.pack(">I", len(data)) + data)

    def int(self, value, width):
        self.raw(arith.int_to_bytes(value, width))

    def getvalue(self):
        return b"".join(self.parts)


class _Reader:
    def __init__(self, data):
        self.data = data
        self.off = 0

    def raw(self):
        if self.off + 4 > len(self.data):
            raise FormatError("truncated field")
        (size,) = struct.unpack_from(">I", self.data, self.off)
        self.off += 4
        chunk = self.data[self.off:self.off + size]
        if len(chunk) != size:
            raise FormatError("truncated field")
        self.off += size
        return chunk

    def int(self):
        return arith.int_from_bytes(self.raw())

    def done(self):
        if self.off != len(self.data):
            raise FormatError("trailing bytes in key file")


def _code(pp):
    return {v: k for k, v in BACKEND_CODES.items()}[pp.backend]


def _width(pp):
    if pp.backend == "dh":
        return pp.instances[0].group.width
    return max(arith.byte_width(p.N) for p in pp.instances)


def _pp_body(pp):
    w = _width(pp)
    out = _Writer()
    out.int(pp.n, 2)
    if pp.backend == "dh":
        G = pp.instances[0].group
        for v in (G.p, G.q, G.g):
            out.int(v, w)
        for inst in pp.instances:
            out.int(inst.h, w)
    else:
        for inst in pp.instances:
            out.int(inst.N, w)
    return out.getvalue()


def fingerprint(pp):
    return hashlib.sha256(_pp_body(pp) + pp.backend.encode()).digest()[:8]


def dump_public_params(pp):
    return KeyFileEnvelope(_code(pp), KeyRole.PUBLIC_PARAMS, 0, _pp_body(pp)).to_bytes()


def _parse_pp(backend, body):
    r = _Reader(body)
    n = r.int()
    if backend == "dh":
        G = arith.GroupParams(r.int(), r.int(), r.int())
        inst = tuple(DhPublicParams(G, r.int()) for _ in range(n))
    else:
        inst = tuple(PaillierPublicParams(arith.PaillierModulus(r.int())) for _ in range(n))
    r.done()
    return MultiPublicParams(n, backend, inst)


def load_public_params(data):
    env = KeyFileEnvelope.from_bytes(data)
    if env.role is not KeyRole.PUBLIC_PARAMS:
        raise FormatError(f"expected public parameters, found {env.role.name.lower()} key")
    return _parse_pp(BACKEND_CODES[env.backend], env.body)


# -- single-instance key components


def _dump_component(pp_i, key, w, out):
    if isinstance(key, DhEncKey):
        out.int(key.alpha, w)
    elif isinstance(key, DhDecKey):
        out.int(key.neg_x, w)
    elif isinstance(key, DhSanKey):
        out.int(key.neg_alpha, w)
    elif isinstance(key, PaillierEncKey):
        out.int(key.alpha, w)
    elif isinstance(key, PaillierSanKey):
        out.int(key.neg_alpha, w)
    elif isinstance(key, PaillierDecKey):
        out.int(key.modulus.p, w)
        out.int(key.modulus.q, w)
    else:
        raise TypeError(f"cannot serialize {type(key).__name__}")


def _load_component(backend, pp_i, kind, r):
    if backend == "dh":
        return {KeyRole.SENDER: DhEncKey, KeyRole.RECEIVER: DhDecKey,
                KeyRole.SANITIZER: DhSanKey}[kind](r.int())
    if kind is KeyRole.SENDER:
        return PaillierEncKey(r.int())
    if kind is KeyRole.SANITIZER:
        return PaillierSanKey(r.int())
    p, q = r.int(), r.int()
    return PaillierDecKey(arith.PaillierModulus(pp_i.N, p, q))


def dump_key(pp, key, identity=None):
    """Serialize a role key (or the identity-0 marker) belonging to ``pp``."""
    w = _width(pp)
    out = _Writer()
    out.raw(fingerprint(pp))
    if key is IDENTITY_ZERO:
        role, ident = KeyRole.SENDER, 0
    elif isinstance(key, MultiEncKey):
        role, ident = KeyRole.SENDER, key.identity
        out.int(len(key.keys), 2)
        for j, k in sorted(key.keys.items()):
            out.int(j, 2)
            _dump_component(pp.instances[j - 1], k, w, out)
    elif isinstance(key, MultiDecKey):
        role, ident = KeyRole.RECEIVER, key.identity
        _dump_component(pp.instances[key.identity - 1], key.key, w, out)
    elif isinstance(key, MultiSanKey):
        role, ident = KeyRole.SANITIZER, pp.n + 1
        for pp_i, k in zip(pp.instances, key.keys):
            _dump_component(pp_i, k, w, out)
    else:
        raise TypeError(f"cannot serialize {type(key).__name__}")
    if identity is not None and identity != ident:
        raise UsageError("identity does not match key")
    return KeyFileEnvelope(_code(pp), role, ident, out.getvalue()).to_bytes()


def load_key(data, pp):
    env = KeyFileEnvelope.from_bytes(data)
    backend = BACKEND_CODES[env.backend]
    if backend != pp.backend:
        raise BackendMismatch(f"key is for backend {backend!r}, parameters are {pp.backend!r}")
    if env.role in (KeyRole.MASTER, KeyRole.PUBLIC_PARAMS):
        raise FormatError(f"expected a role key, found {env.role.name.lower()}")
    r = _Reader(env.body)
    if r.raw() != fingerprint(pp):
        raise BackendMismatch("key belongs to different public parameters")
    if env.role is KeyRole.SENDER:
        if env.identity == 0:
            r.done()
            return IDENTITY_ZERO
        keys = {}
        for _ in range(r.int()):
            j = r.int()
            keys[j] = _load_component(backend, pp.instances[j - 1], KeyRole.SENDER, r)
        key = MultiEncKey(env.identity, keys)
    elif env.role is KeyRole.RECEIVER:
        j = env.identity
        key = MultiDecKey(j, _load_component(backend, pp.instances[j - 1], KeyRole.RECEIVER, r))
    else:
        key = MultiSanKey(tuple(_load_component(backend, p, KeyRole.SANITIZER, r) for p in pp.instances))
    r.done()
    return key


def key_role(data):
    """Peek at the envelope of a key file."""
    env = KeyFileEnvelope.from_bytes(data)
    return env.role, env.identity


# -- master key


def dump_master_key(msk):
    pp = msk.pp
    w = _width(pp)
    out = _Writer()
    out.raw(dump_public_params(pp))
    out.raw(msk.policy.to_text().encode())
    for pp_i, (ek, dk, rk) in zip(pp.instances, msk.keys):
        for k in (ek, dk, rk):
            _dump_component(pp_i, k, w, out)
    return KeyFileEnvelope(_code(pp), KeyRole.MASTER, 0, out.getvalue()).to_bytes()


def load_master_key(data):
    env = KeyFileEnvelope.from_bytes(data)
    if env.role is not KeyRole.MASTER:
        raise FormatError(f"expected a master key, found {env.role.name.lower()}")
    backend = BACKEND_CODES[env.backend]
    r = _Reader(env.body)
    pp = load_public_params(r.raw())
    policy = Policy.from_text(r.raw().decode())
    keys = []
    for pp_i in pp.instances:
        keys.append(tuple(_load_component(backend, pp_i, kind, r)
                          for kind in (KeyRole.SENDER, KeyRole.RECEIVER, KeyRole.SANITIZER)))
    r.done()
    return MultiMasterKey(policy, tuple(keys), pp)

