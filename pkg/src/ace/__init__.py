"""Sanitized broadcast encryption enforcing who may read and who may write."""

from .arith import GroupParams, PaillierModulus, generate_group, generate_paillier_modulus
from .common import (IDENTITY_ZERO, AceError, BackendMismatch, EncodingError, GenerationError,
                     InvalidCiphertext, Role, UsageError)
from .dh import DhBackend
from .multi import AceScheme, Policy, bell_lapadula
from .paillier import PaillierBackend

__version__ = "0.1.0"

__all__ = [
    "AceError", "AceScheme", "BackendMismatch", "DhBackend", "EncodingError", "GenerationError",
    "GroupParams", "IDENTITY_ZERO", "InvalidCiphertext", "PaillierBackend", "PaillierModulus",
    "Policy", "Role", "UsageError", "bell_lapadula", "generate_group", "generate_paillier_modulus",
]
