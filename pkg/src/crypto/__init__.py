"""Cryptographic primitives: hashing, keys, AEAD and the Diffie-Hellman group."""

from .primitives import (
    Ciphertext,
    KeyCommitment,
    NonceSource,
    SymmetricKey,
    commit_key,
    decrypt,
    derive_session_key,
    digest,
    encrypt,
    gen_key,
)
from .group import (
    GroupElement,
    SigningKey,
    dh_keypair,
    dh_shared,
    schnorr_sign,
    schnorr_verify,
)

__all__ = [
    "Ciphertext",
    "KeyCommitment",
    "NonceSource",
    "SymmetricKey",
    "commit_key",
    "decrypt",
    "derive_session_key",
    "digest",
    "encrypt",
    "gen_key",
    "GroupElement",
    "SigningKey",
    "dh_keypair",
    "dh_shared",
    "schnorr_sign",
    "schnorr_verify",
]
