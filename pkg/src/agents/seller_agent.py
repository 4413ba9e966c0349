"""
Seller Agent - prepares per-buyer offers and claims payment.
"""

import asyncio
from typing import Optional

from ..ledger.chain import Ledger
from ..ledger.models import EscrowStatus
from ..market.datasets import FAILING_DATA
from ..market.models import AdversaryKind, Listing, SellerOffer
from ..market.seller import make_wrong_key, replay_proof, seller_claim, seller_prepare, tamper_store
from ..proof.backend import ProofBackend
from ..storage.content_store import ContentStore
from ..utils.errors import LedgerError
from ..utils.rng import RunRng
from .base_agent import AgentMessage, BaseAgent


class SellerAgent(BaseAgent):
    """
    One seller with a fixed catalogue of data items.

    Handles:
    - ``request_offers``: Step 1 for every item, with a fresh key per buyer
    - ``replay_proof``: swap in a donor proof (proof-replay adversary only)
    - ``claim``: Step 4 against a deployed escrow
    """

    def __init__(
        self,
        name: str,
        items: list[bytes],
        prices: list[int],
        kind: AdversaryKind,
        store: ContentStore,
        backend: ProofBackend,
        ledger: Ledger,
        rng: RunRng,
    ):
        super().__init__(name, role="seller")
        self.items = items
        self.prices = prices
        self.kind = kind
        self.store = store
        self.backend = backend
        self.ledger = ledger
        self.rng = rng
        # (buyer index, item) -> listing
        self.listings: dict[tuple[int, int], Listing] = {}

    async def process(self, message: AgentMessage) -> Optional[AgentMessage]:
        if message.message_type == "request_offers":
            offers = await asyncio.to_thread(
                self.prepare_offers, message.payload["buyer_index"], message.payload["eval_id"]
            )
            return self.send_message(message.sender, "offers", {"offers": offers})

        if message.message_type == "replay_proof":
            offer = self.adopt_proof(message.payload["buyer_index"], message.payload["item"],
                                     message.payload.get("donor"))
            return self.send_message(message.sender, "offers", {"offers": [offer]})

        if message.message_type == "claim":
            results = self.claim(message.payload["contract_id"], message.payload["buyer_index"])
            return self.send_message(message.sender, "claims", {"results": results})

        raise ValueError(f"{self.name} cannot handle {message.message_type!r}")

    def prepare_offers(self, buyer_index: int, eval_id: str) -> list[SellerOffer]:
        offers = []
        for item, data in enumerate(self.items):
            rng = self.rng.child(buyer_index, item)
            if self.kind == AdversaryKind.FAILING_F:
                data = FAILING_DATA
            listing = seller_prepare(
                data, eval_id, self.prices[item], rng,
                store=self.store, backend=self.backend, seller=self.name, item=item,
            )
            listing.kind = self.kind
            if self.kind == AdversaryKind.WRONG_KEY:
                make_wrong_key(listing, rng)
            elif self.kind == AdversaryKind.STORE_TAMPER:
                tamper_store(listing, self.store)
            self.listings[(buyer_index, item)] = listing
            offers.append(listing.offer)
        return offers

    def adopt_proof(self, buyer_index: int, item: int, donor: Optional[SellerOffer]) -> SellerOffer:
        """Replace the proof with another offer's; a decoy offer stands in when no donor exists."""
        listing = self.listings[(buyer_index, item)]
        if donor is None or donor.proof == listing.offer.proof:
            decoy = seller_prepare(
                b"decoy\n" + listing.data, listing.offer.eval_id, listing.offer.asking_price,
                self.rng.child(buyer_index, item, 1),
                store=self.store, backend=self.backend, seller=self.name, item=item,
            )
            donor = decoy.offer
        replay_proof(listing, donor)
        self.logger.warning(f"Replaying a foreign proof for item {item}")
        return listing.offer

    def claim(self, contract_id: str, buyer_index: int) -> list[dict]:
        """Submit keys for every Funded entry of this seller that matches one of its listings."""
        if self.kind == AdversaryKind.NON_CLAIMER:
            return []
        contract = self.ledger.contract(contract_id)
        by_commitment = {
            listing.offer.key_commitment.hex(): listing
            for (buyer, _), listing in self.listings.items()
            if buyer == buyer_index
        }
        results = []
        for entry in contract.entries:
            listing = by_commitment.get(entry.key_commitment)
            if entry.seller != self.name or entry.status != EscrowStatus.FUNDED or listing is None:
                continue
            try:
                result = seller_claim(self.ledger, contract_id, self.name, listing.claim_key)
            except LedgerError as exc:
                self.logger.warning(f"Claim on {contract_id} refused: {exc}")
                results.append({"item": listing.offer.item, "paid": False, "reason": str(exc)})
                continue
            results.append({"item": listing.offer.item, "paid": result.paid, "reason": result.reason})
        return results
