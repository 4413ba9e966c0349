"""
Buyer side of the protocol: Step 2 verification, Step 3 funding and Step 5
delivery.
"""

import time
from dataclasses import dataclass
from typing import Optional, Sequence, Union

from ..crypto.primitives import Ciphertext, decrypt
from ..ledger.chain import Ledger
from ..ledger.models import EscrowEntrySpec, EscrowMode, EscrowStatus
from ..proof.backend import ProofBackend
from ..proof.evals import builtin_eval
from ..proof.statement import AggregateProof
from ..storage.content_store import ContentHash, ContentStore
from ..utils.errors import AuthFailure, IntegrityFailure, ProofError, SettlementPending, StoreError
from ..utils.logging import get_logger
from ..utils.opcount import counting
from .models import OfferOutcome, PurchaseOrder, SellerOffer, VerificationMode, VerifyCost

logger = get_logger("yotta.buyer")


def buyer_verify_offers(
    offers: Sequence[SellerOffer],
    mode: Union[VerificationMode, str],
    backend: ProofBackend,
    aggregate: Optional[AggregateProof] = None,
) -> tuple[list[SellerOffer], list[tuple[SellerOffer, str]], VerifyCost]:
    """
    Step 2: split offers into accepted and rejected (with a reason).

    In aggregated mode one aggregate check covers the batch; if it fails the
    offers are re-checked one by one to find the culprits and the fallback
    time is recorded. Without a supplied ``aggregate`` it is built here,
    outside the measured cost, since aggregation is prover-side work.
    """
    mode = VerificationMode(mode)
    cost = VerifyCost()
    if not offers:
        return [], [], cost

    stmts = [offer.statement() for offer in offers]
    if mode == VerificationMode.AGGREGATED and aggregate is None:
        aggregate = backend.aggregate([(stmt, offer.proof) for stmt, offer in zip(stmts, offers)])

    accepted: list[SellerOffer] = []
    rejected: list[tuple[SellerOffer, str]] = []

    with counting() as ops:
        start = time.perf_counter()
        batch_ok = False
        if mode == VerificationMode.AGGREGATED:
            try:
                batch_ok = backend.verify_aggregate(stmts, aggregate)
            except ProofError as exc:
                logger.debug("Aggregate unusable: %s", exc)
            if batch_ok:
                accepted = list(offers)

        if not batch_ok:
            fallback_start = time.perf_counter()
            for stmt, offer in zip(stmts, offers):
                try:
                    reason = backend.explain(stmt, offer.proof)
                except ProofError as exc:
                    reason = f"malformed proof: {exc}"
                if reason is None:
                    accepted.append(offer)
                else:
                    rejected.append((offer, reason))
            if mode == VerificationMode.AGGREGATED:
                cost.fallback = True
                cost.fallback_ms = (time.perf_counter() - fallback_start) * 1000

        cost.wall_ms = (time.perf_counter() - start) * 1000
    cost.ops = ops.snapshot()
    return accepted, rejected, cost


def buyer_fund(ledger: Ledger, order: PurchaseOrder) -> str:
    """Step 3: deploy the escrow binding each accepted offer's commitment."""
    mode = EscrowMode(order.mode)
    entries = [
        EscrowEntrySpec(
            seller=offer.seller,
            key_commitment=offer.key_commitment.hex(),
            amount=amount,
            ciphertext=offer.ciphertext.hex() if mode == EscrowMode.FULL_DECRYPT else None,
            content_hash=str(offer.content_hash),
            proof_digest=offer.proof.digest().hex(),
        )
        for offer, amount in zip(order.offers, order.amounts)
    ]
    return ledger.deploy_escrow(order.buyer, entries, ledger.height + order.deadline_blocks, mode)


@dataclass
class Delivery:
    seller: str
    item: int
    outcome: OfferOutcome
    data: Optional[bytes] = None
    failure: Optional[IntegrityFailure] = None

    @property
    def delivered(self) -> bool:
        return self.outcome == OfferOutcome.DELIVERED


def _recover(store: ContentStore, offer: SellerOffer, key) -> bytes:
    """The five delivery checks; raises IntegrityFailure at the first that fails."""
    seller = offer.label
    try:
        address = decrypt(key, offer.ciphertext).decode("utf-8")
    except (AuthFailure, UnicodeDecodeError) as exc:
        raise IntegrityFailure("decrypt_address", seller, str(exc)) from exc
    try:
        content_hash = ContentHash.parse(address)
        payload = store.get(content_hash)
    except (ValueError, StoreError) as exc:
        raise IntegrityFailure("fetch", seller, str(exc)) from exc
    if content_hash != offer.content_hash or not store.verify(offer.content_hash, payload):
        raise IntegrityFailure("content_hash", seller, f"{content_hash} was not the proven content")
    try:
        data = decrypt(key, Ciphertext.from_bytes(payload))
    except AuthFailure as exc:
        raise IntegrityFailure("decrypt_payload", seller, str(exc)) from exc
    if not builtin_eval(offer.eval_id)(data):
        raise IntegrityFailure("evaluate", seller, f"data does not satisfy {offer.eval_id}")
    return data


def buyer_finalize(
    ledger: Ledger,
    store: ContentStore,
    contract_id: str,
    offers: Sequence[SellerOffer],
    strict: bool = False,
) -> list[Delivery]:
    """
    Step 5: recover the data of every Paid entry.

    ``offers`` are in the order they were funded. Expired contracts are
    refunded first. With ``strict`` the first IntegrityFailure is raised;
    otherwise it is reported on the Delivery.
    """
    contract = ledger.contract(contract_id)
    if ledger.height > contract.deadline:
        ledger.refund_expired(contract_id)
        contract = ledger.contract(contract_id)
    elif not contract.is_settled():
        raise SettlementPending(f"{contract_id} has open entries until height {contract.deadline}")

    keys = ledger.revealed_keys(contract_id)
    deliveries = []
    for position, (offer, entry) in enumerate(zip(offers, contract.entries)):
        if entry.status != EscrowStatus.PAID:
            deliveries.append(Delivery(offer.seller, offer.item, OfferOutcome.REFUNDED))
            continue
        try:
            data = _recover(store, offer, keys[position])
        except IntegrityFailure as failure:
            if strict:
                raise
            logger.error("Paid entry %s of %s undelivered: %s", position, contract_id, failure)
            deliveries.append(Delivery(offer.seller, offer.item, OfferOutcome.INTEGRITY_FAILURE, failure=failure))
            continue
        deliveries.append(Delivery(offer.seller, offer.item, OfferOutcome.DELIVERED, data=data))
    return deliveries
