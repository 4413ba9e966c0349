"""
Buyer Agent - verifies offers, funds the escrow and collects deliveries.
"""

from typing import Optional

from ..ledger.chain import Ledger
from ..market.buyer import Delivery, buyer_finalize, buyer_fund, buyer_verify_offers
from ..market.models import PurchaseOrder, SellerOffer, VerificationMode, VerifyCost
from ..proof.backend import ProofBackend
from ..storage.content_store import ContentStore
from ..utils.errors import LedgerError, MarketError
from .base_agent import AgentMessage, BaseAgent


class BuyerAgent(BaseAgent):
    """
    One buyer publishing one evaluation function.

    Message types: ``offers`` (Step 2), ``fund`` (Step 3), ``finalize`` (Step 5).
    """

    def __init__(
        self,
        name: str,
        index: int,
        eval_id: str,
        funds: bool,
        store: ContentStore,
        backend: ProofBackend,
        ledger: Ledger,
        verification: VerificationMode,
        ledger_mode: str,
        deadline_blocks: int,
    ):
        super().__init__(name, role="buyer")
        self.index = index
        self.eval_id = eval_id
        self.funds = funds
        self.store = store
        self.backend = backend
        self.ledger = ledger
        self.verification = verification
        self.ledger_mode = ledger_mode
        self.deadline_blocks = deadline_blocks

        self.offers: list[SellerOffer] = []
        self.accepted: list[SellerOffer] = []
        self.rejected: list[tuple[SellerOffer, str]] = []
        self.verify_cost = VerifyCost()
        self.contract_id: Optional[str] = None
        self.funding_error: str = ""
        self.deliveries: list[Delivery] = []

    async def process(self, message: AgentMessage) -> Optional[AgentMessage]:
        if message.message_type == "offers":
            self.verify(message.payload["offers"], message.payload.get("aggregate"))
            return self.send_message(message.sender, "verified", {
                "accepted": len(self.accepted),
                "rejected": len(self.rejected),
                "fallback": self.verify_cost.fallback,
            })

        if message.message_type == "fund":
            contract_id = self.fund()
            return self.send_message(message.sender, "funded", {"contract_id": contract_id})

        if message.message_type == "finalize":
            self.finalize()
            return self.send_message(message.sender, "finalized", {
                "delivered": sum(d.delivered for d in self.deliveries),
            })

        raise ValueError(f"{self.name} cannot handle {message.message_type!r}")

    def verify(self, offers: list[SellerOffer], aggregate=None):
        self.offers = list(offers)
        self.accepted, self.rejected, self.verify_cost = buyer_verify_offers(
            self.offers, self.verification, self.backend, aggregate
        )
        if self.rejected:
            self.logger.warning(f"Rejected {len(self.rejected)} of {len(self.offers)} offers")
        else:
            self.logger.info(f"Accepted all {len(self.offers)} offers")

    def fund(self) -> Optional[str]:
        if not self.funds:
            self.logger.warning("Not funding accepted offers")
            return None
        if not self.accepted:
            return None
        order = PurchaseOrder.at_asking_price(self.name, self.accepted, self.deadline_blocks, self.ledger_mode)
        try:
            self.contract_id = buyer_fund(self.ledger, order)
        except (LedgerError, MarketError) as exc:
            self.funding_error = str(exc)
            self.logger.error(f"Escrow deployment failed: {exc}")
            return None
        self.logger.success(f"Escrowed {order.total} tokens in {self.contract_id}")
        return self.contract_id

    def finalize(self):
        if self.contract_id is None:
            return
        self.deliveries = buyer_finalize(self.ledger, self.store, self.contract_id, self.accepted)
        delivered = sum(d.delivered for d in self.deliveries)
        self.logger.success(f"Received {delivered} of {len(self.deliveries)} datasets")
