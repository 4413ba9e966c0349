"""
Public statements, private witnesses and proof envelopes.
"""

import struct
from dataclasses import dataclass

from ..crypto.primitives import Ciphertext, KeyCommitment, SymmetricKey, digest
from ..storage.content_store import ContentHash
from ..utils.errors import MalformedProof

PROOF_MAGIC = b"YPF1"
AGGREGATE_MAGIC = b"YPA1"


def _framed(blob: bytes) -> bytes:
    return struct.pack(">I", len(blob)) + blob


@dataclass(frozen=True)
class SellerStatement:
    """Everything the buyer sees about an offer; contains no secrets."""

    key_commitment: KeyCommitment
    ciphertext: Ciphertext
    content_hash: ContentHash
    eval_id: str

    def encode(self) -> bytes:
        return (
            b"yotta/statement/v1"
            + self.key_commitment.digest
            + _framed(self.ciphertext.to_bytes())
            + self.content_hash.digest
            + _framed(self.eval_id.encode("utf-8"))
        )

    def digest(self) -> bytes:
        return digest(self.encode())


@dataclass(frozen=True)
class SellerWitness:
    data: bytes
    key: SymmetricKey
    address: bytes

    def __repr__(self) -> str:
        return f"SellerWitness(<redacted>, {len(self.data)} bytes)"


@dataclass(frozen=True)
class Proof:
    backend_id: int
    attestation: bytes

    def encode(self) -> bytes:
        """``YPF1`` magic, backend id byte, length-prefixed attestation."""
        return PROOF_MAGIC + bytes([self.backend_id]) + _framed(self.attestation)

    @property
    def size_bytes(self) -> int:
        return len(self.encode())

    def digest(self) -> bytes:
        return digest(self.encode())

    @classmethod
    def decode(cls, blob: bytes) -> "Proof":
        if len(blob) < 9 or blob[:4] != PROOF_MAGIC:
            raise MalformedProof("missing YPF1 envelope")
        (length,) = struct.unpack(">I", blob[5:9])
        if len(blob) != 9 + length:
            raise MalformedProof("attestation length does not match envelope")
        return cls(backend_id=blob[4], attestation=blob[9:])


@dataclass(frozen=True)
class AggregateProof:
    backend_id: int
    attestation: bytes
    count: int

    def encode(self) -> bytes:
        return (
            AGGREGATE_MAGIC
            + bytes([self.backend_id])
            + struct.pack(">I", self.count)
            + _framed(self.attestation)
        )

    @property
    def size_bytes(self) -> int:
        return len(self.encode())

    @classmethod
    def decode(cls, blob: bytes) -> "AggregateProof":
        if len(blob) < 13 or blob[:4] != AGGREGATE_MAGIC:
            raise MalformedProof("missing YPA1 envelope")
        (count,) = struct.unpack(">I", blob[5:9])
        (length,) = struct.unpack(">I", blob[9:13])
        if len(blob) != 13 + length:
            raise MalformedProof("attestation length does not match envelope")
        return cls(backend_id=blob[4], attestation=blob[13:], count=count)
