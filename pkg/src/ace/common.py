"""Shared roles, markers and exceptions."""

import enum
import secrets


class AceError(Exception):
    """Base class for all errors raised by the package."""


class GenerationError(AceError):
    pass


class EncodingError(AceError):
    pass


class InvalidCiphertext(AceError):
    """A ciphertext component failed structural validation."""


class UsageError(AceError):
    """An illegal identity/role combination or out-of-range argument."""


class BackendMismatch(AceError):
    pass


class Role(enum.IntEnum):
    SENDER = 1
    RECEIVER = 2
    SANITIZER = 3

    @classmethod
    def parse(cls, text):
        aliases = {"sender": cls.SENDER, "sen": cls.SENDER,
                   "receiver": cls.RECEIVER, "rec": cls.RECEIVER,
                   "sanitizer": cls.SANITIZER, "san": cls.SANITIZER}
        try:
            return aliases[text.lower()]
        except KeyError:
            raise UsageError(f"unknown role {text!r}") from None

    @classmethod
    def _missing_(cls, value):
        # lets Role("sender") work wherever Role(x) normalizes an argument
        if isinstance(value, str):
            return cls.parse(value)
        return None


class _IdentityZero:
    """The key of the rightless identity 0: it carries nothing beyond pp."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "IDENTITY_ZERO"

    def __reduce__(self):
        return (_IdentityZero, ())


IDENTITY_ZERO = _IdentityZero()


def default_rng(rng=None):
    """Return ``rng`` unchanged, or OS entropy when it is None."""
    return secrets.SystemRandom() if rng is None else rng
