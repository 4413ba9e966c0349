"""
Proof backend abstraction for the seller statement, and the reference
"commit-and-recheck" backend.

The reference backend seals the witness key, data digest and address under a
backend context key, bound to the statement digest. Verification opens the
seal and re-executes the whole statement: key commitment, address decryption,
content-hash binding, payload decryption and the evaluation function, using
the content store to fetch the payload. Proof size therefore does not depend
on the dataset size. It is sound for testing but NOT zero-knowledge; the
interface is what a SNARK backend would implement.

Aggregation re-checks every constituent proof, chains their digests into a
transcript and signs (count, verdict, statements digest, transcript) with a
Schnorr key of the backend. Verifying an aggregate costs one hash over the
statements and a constant number of group exponentiations.
"""

import struct
from abc import ABC, abstractmethod
from typing import Optional, Sequence

from ..crypto.group import SIGNATURE_BYTES, SigningKey, schnorr_sign, schnorr_verify
from ..crypto.primitives import (
    NONCE_BYTES,
    TAG_BYTES,
    Ciphertext,
    SymmetricKey,
    commit_key,
    decrypt,
    digest,
    encrypt,
    hkdf,
)
from ..storage.content_store import ContentHash, ContentStore
from ..utils.config import get_config
from ..utils.errors import (
    AuthFailure,
    CountMismatch,
    EmptyBatch,
    MalformedProof,
    MixedBackends,
    StoreError,
    UnknownEval,
)
from ..utils.logging import get_logger
from ..utils.opcount import record
from .evals import EvalFunction, builtin_eval
from .statement import AggregateProof, Proof, SellerStatement, SellerWitness

logger = get_logger("yotta.proof")

RECHECK_BACKEND_ID = 1

_AGGREGATE_TAG = b"yotta/aggregate/v1"
_PROOF_NONCE_TAG = b"yotta/proof-nonce/v1"
_SEALED_HEADER = 32 + 32 + 32 + 2


class ProofBackend(ABC):
    """Abstract proof system for seller statements."""

    backend_id: int

    @abstractmethod
    def prove(self, stmt: SellerStatement, wit: SellerWitness, eval_fn: EvalFunction) -> Proof:
        """Produce a proof; a false statement yields a proof that fails verification."""

    @abstractmethod
    def verify(self, stmt: SellerStatement, proof: Proof) -> bool:
        """Check a single proof. Raises MalformedProof for undecodable attestations."""

    @abstractmethod
    def aggregate(self, proofs: Sequence[tuple[SellerStatement, Proof]]) -> AggregateProof:
        """Fold an ordered batch into one attestation."""

    @abstractmethod
    def verify_aggregate(self, stmts: Sequence[SellerStatement], agg: AggregateProof) -> bool:
        """True iff every constituent proof would verify."""

    def explain(self, stmt: SellerStatement, proof: Proof) -> Optional[str]:
        """Reason a proof is rejected, or None when it verifies."""
        return None if self.verify(stmt, proof) else "invalid proof"

    def _check_backend(self, backend_id: int):
        if backend_id != self.backend_id:
            raise MalformedProof(f"backend {backend_id} cannot be checked by backend {self.backend_id}")


class RecheckBackend(ProofBackend):
    """Reference backend: sealed witness, full re-execution on verify."""

    backend_id = RECHECK_BACKEND_ID

    def __init__(self, context_key: bytes, store: ContentStore):
        if len(context_key) != 32:
            raise ValueError("context key must be 32 bytes")
        self.store = store
        self._context = SymmetricKey(context_key)
        self._signing_key = SigningKey.derive(context_key)
        self.public_key = self._signing_key.public()

    @classmethod
    def from_seed(cls, seed: int, store: ContentStore, label: Optional[str] = None) -> "RecheckBackend":
        label = label or get_config().proof.context_label
        context = hkdf(
            (int(seed) % 2**64).to_bytes(8, "big"),
            salt=b"yotta/proof-context/v1",
            info=label.encode("utf-8"),
        )
        return cls(context, store)

    # Single proofs

    def prove(self, stmt: SellerStatement, wit: SellerWitness, eval_fn: EvalFunction) -> Proof:
        body = (
            wit.key.key_bytes
            + digest(wit.data)
            + digest(eval_fn.eval_id.encode("utf-8"))
            + struct.pack(">H", len(wit.address))
            + wit.address
        )
        stmt_digest = stmt.digest()
        # Deterministic nonce; distinct (statement, body) pairs never share one.
        nonce = digest(_PROOF_NONCE_TAG + stmt_digest + body)[:NONCE_BYTES]
        sealed = encrypt(self._context, body, nonce, associated_data=stmt_digest)
        return Proof(backend_id=self.backend_id, attestation=sealed.to_bytes())

    def verify(self, stmt: SellerStatement, proof: Proof) -> bool:
        return self.explain(stmt, proof) is None

    def explain(self, stmt: SellerStatement, proof: Proof) -> Optional[str]:
        """Name of the first failed check, or None when the proof verifies."""
        record("verify_calls")
        self._check_backend(proof.backend_id)
        if len(proof.attestation) < NONCE_BYTES + TAG_BYTES:
            raise MalformedProof("attestation shorter than its seal")
        try:
            body = decrypt(self._context, Ciphertext.from_bytes(proof.attestation), stmt.digest())
        except AuthFailure:
            return "statement-binding"
        reason = self._recheck(stmt, body)
        if reason:
            logger.debug("Proof rejected at %s for %s", reason, stmt.content_hash)
        return reason

    def _recheck(self, stmt: SellerStatement, body: bytes) -> Optional[str]:
        if len(body) < _SEALED_HEADER:
            return "witness-encoding"
        key = SymmetricKey(body[:32])
        data_digest = body[32:64]
        eval_digest = body[64:96]
        (address_len,) = struct.unpack(">H", body[96:98])
        address = body[98:]
        if len(address) != address_len:
            return "witness-encoding"

        if commit_key(key) != stmt.key_commitment:
            return "key-commitment"
        try:
            if decrypt(key, stmt.ciphertext) != address:
                return "address-ciphertext"
        except AuthFailure:
            return "address-ciphertext"
        try:
            if ContentHash.parse(address.decode("utf-8")) != stmt.content_hash:
                return "content-address"
        except (UnicodeDecodeError, ValueError):
            return "content-address"
        try:
            payload = self.store.get(stmt.content_hash)
            data = decrypt(key, Ciphertext.from_bytes(payload))
        except (StoreError, AuthFailure):
            return "stored-payload"
        if digest(data) != data_digest:
            return "data-binding"
        if digest(stmt.eval_id.encode("utf-8")) != eval_digest:
            return "eval-binding"
        try:
            eval_fn = builtin_eval(stmt.eval_id)
        except UnknownEval:
            return "eval-binding"
        if not eval_fn(data):
            return "evaluation"
        return None

    # Aggregation

    @staticmethod
    def _statements_digest(stmts: Sequence[SellerStatement]) -> bytes:
        return digest(b"".join(stmt.encode() for stmt in stmts))

    @staticmethod
    def _aggregate_message(count: int, verdict: bool, statements: bytes, transcript: bytes) -> bytes:
        return _AGGREGATE_TAG + struct.pack(">I?", count, verdict) + statements + transcript

    def aggregate(self, proofs: Sequence[tuple[SellerStatement, Proof]]) -> AggregateProof:
        if not proofs:
            raise EmptyBatch("cannot aggregate an empty batch")
        backends = {proof.backend_id for _, proof in proofs}
        if backends != {self.backend_id}:
            raise MixedBackends(f"batch mixes backends {sorted(backends)}")

        verdict = True
        transcript = digest(_AGGREGATE_TAG)
        for stmt, proof in proofs:
            try:
                ok = self.verify(stmt, proof)
            except MalformedProof:
                ok = False
            verdict = verdict and ok
            transcript = digest(transcript + stmt.digest() + proof.digest())

        message = self._aggregate_message(
            len(proofs), verdict, self._statements_digest([stmt for stmt, _ in proofs]), transcript
        )
        signature = schnorr_sign(self._signing_key, message)
        return AggregateProof(
            backend_id=self.backend_id,
            attestation=bytes([verdict]) + transcript + signature,
            count=len(proofs),
        )

    def verify_aggregate(self, stmts: Sequence[SellerStatement], agg: AggregateProof) -> bool:
        record("verify_calls")
        self._check_backend(agg.backend_id)
        if len(stmts) != agg.count:
            raise CountMismatch(f"{len(stmts)} statements for an aggregate of {agg.count}")
        if len(agg.attestation) != 1 + 32 + SIGNATURE_BYTES:
            raise MalformedProof("aggregate attestation has the wrong size")

        verdict = agg.attestation[0]
        if verdict not in (0, 1):
            return False
        transcript = agg.attestation[1:33]
        signature = agg.attestation[33:]
        message = self._aggregate_message(agg.count, bool(verdict), self._statements_digest(stmts), transcript)
        if not schnorr_verify(self.public_key, message, signature):
            return False
        return verdict == 1


def create_backend(store: ContentStore, seed: int) -> ProofBackend:
    """Factory for the configured proof backend."""
    config = get_config().proof

    if config.backend == "recheck":
        return RecheckBackend.from_seed(seed, store, config.context_label)

    raise ValueError(f"unknown proof backend: {config.backend}")
