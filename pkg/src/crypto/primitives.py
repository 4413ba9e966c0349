"""
Hashing, key generation, key commitments and authenticated encryption.
"""

import hashlib
from dataclasses import dataclass
from typing import Union

from cryptography.exceptions import InvalidTag
from cryptography.hazmat.primitives import hashes
from cryptography.hazmat.primitives.ciphers.aead import ChaCha20Poly1305
from cryptography.hazmat.primitives.kdf.hkdf import HKDF

from ..utils.errors import AuthFailure, EmptyPlaintext
from ..utils.opcount import record
from ..utils.rng import RunRng

KEY_BYTES = 32
NONCE_BYTES = 12
TAG_BYTES = 16

KEYGEN_SALT = b"yotta/keygen/v1"
KEY_COMMIT_TAG = b"yotta/keycommit/v1"
SESSION_KEY_SALT = b"yotta/session-key/v1"


def digest(data: bytes) -> bytes:
    """SHA-256 of ``data``; every protocol hash goes through here so it is counted."""
    record("hash_calls")
    record("bytes_hashed", len(data))
    return hashlib.sha256(data).digest()


def hkdf(ikm: bytes, *, salt: bytes, info: bytes, length: int = KEY_BYTES) -> bytes:
    record("kdf_calls")
    return HKDF(algorithm=hashes.SHA256(), length=length, salt=salt, info=info).derive(ikm)


@dataclass(frozen=True)
class SymmetricKey:
    key_bytes: bytes

    def __post_init__(self):
        if len(self.key_bytes) != KEY_BYTES:
            raise ValueError(f"symmetric keys are {KEY_BYTES} bytes, got {len(self.key_bytes)}")

    def __repr__(self) -> str:
        return "SymmetricKey(<redacted>)"

    def reveal(self) -> str:
        """Hex form; only used when the key is deliberately published (Step 4)."""
        return self.key_bytes.hex()

    @classmethod
    def from_hex(cls, text: str) -> "SymmetricKey":
        return cls(bytes.fromhex(text))


@dataclass(frozen=True)
class KeyCommitment:
    digest: bytes

    def __post_init__(self):
        if len(self.digest) != 32:
            raise ValueError("key commitments are 32 bytes")

    def hex(self) -> str:
        return self.digest.hex()

    @classmethod
    def from_hex(cls, text: str) -> "KeyCommitment":
        return cls(bytes.fromhex(text))


@dataclass(frozen=True)
class Ciphertext:
    nonce: bytes
    body: bytes
    auth_tag: bytes

    def __post_init__(self):
        if len(self.nonce) != NONCE_BYTES:
            raise ValueError(f"nonce must be {NONCE_BYTES} bytes")
        if len(self.auth_tag) != TAG_BYTES:
            raise ValueError(f"auth tag must be {TAG_BYTES} bytes")

    def to_bytes(self) -> bytes:
        return self.nonce + self.body + self.auth_tag

    @classmethod
    def from_bytes(cls, blob: bytes) -> "Ciphertext":
        if len(blob) < NONCE_BYTES + TAG_BYTES:
            raise AuthFailure("ciphertext too short")
        return cls(
            nonce=blob[:NONCE_BYTES],
            body=blob[NONCE_BYTES:-TAG_BYTES],
            auth_tag=blob[-TAG_BYTES:],
        )

    def hex(self) -> str:
        return self.to_bytes().hex()

    @classmethod
    def from_hex(cls, text: str) -> "Ciphertext":
        return cls.from_bytes(bytes.fromhex(text))

    def digest(self) -> bytes:
        return digest(self.to_bytes())


class NonceSource:
    """Draws 12-byte nonces from the run PRNG and never hands out the same one twice."""

    def __init__(self, rng: RunRng):
        self.rng = rng
        self._issued: set[bytes] = set()

    def next_nonce(self) -> bytes:
        while True:
            nonce = self.rng.bytes(NONCE_BYTES)
            if nonce not in self._issued:
                self._issued.add(nonce)
                return nonce


def gen_key(rng_seed: int, index: int) -> SymmetricKey:
    """Deterministic key for ``(seed, index)``."""
    seed_bytes = (int(rng_seed) % 2**64).to_bytes(8, "big")
    index_bytes = (int(index) % 2**64).to_bytes(8, "big")
    return SymmetricKey(hkdf(seed_bytes, salt=KEYGEN_SALT, info=index_bytes))


def commit_key(key: SymmetricKey) -> KeyCommitment:
    return KeyCommitment(digest(KEY_COMMIT_TAG + key.key_bytes))


def encrypt(
    key: SymmetricKey,
    plaintext: bytes,
    nonce_source: Union[NonceSource, bytes],
    associated_data: bytes = b"",
) -> Ciphertext:
    """ChaCha20-Poly1305 encryption. ``nonce_source`` is a ``NonceSource`` or explicit nonce bytes."""
    if not plaintext:
        raise EmptyPlaintext("cannot encrypt an empty plaintext")
    if isinstance(nonce_source, NonceSource):
        nonce = nonce_source.next_nonce()
    else:
        nonce = bytes(nonce_source)
    record("aead_seals")
    sealed = ChaCha20Poly1305(key.key_bytes).encrypt(nonce, plaintext, associated_data or None)
    return Ciphertext(nonce=nonce, body=sealed[:-TAG_BYTES], auth_tag=sealed[-TAG_BYTES:])


def decrypt(key: SymmetricKey, ct: Ciphertext, associated_data: bytes = b"") -> bytes:
    record("aead_opens")
    try:
        return ChaCha20Poly1305(key.key_bytes).decrypt(
            ct.nonce, ct.body + ct.auth_tag, associated_data or None
        )
    except (InvalidTag, ValueError) as exc:
        raise AuthFailure("authentication failed") from exc


def derive_session_key(shared_secret: bytes, context: bytes = b"") -> SymmetricKey:
    """Symmetric key from a Diffie-Hellman shared secret."""
    return SymmetricKey(hkdf(shared_secret, salt=SESSION_KEY_SALT, info=context))
