"""
Market data models: offers, orders and run reports.
"""

from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

from pydantic import BaseModel, Field

from ..crypto.primitives import Ciphertext, KeyCommitment, SymmetricKey
from ..proof.statement import Proof, SellerStatement
from ..storage.content_store import ContentHash
from ..utils.errors import InvalidOrder


class AdversaryKind(str, Enum):
    HONEST = "honest"
    WRONG_KEY = "wrong_key"
    FAILING_F = "failing_f"
    PROOF_REPLAY = "proof_replay"
    STORE_TAMPER = "store_tamper"
    NON_CLAIMER = "non_claimer"


class VerificationMode(str, Enum):
    INDIVIDUAL = "individual"
    AGGREGATED = "aggregated"


class OfferOutcome(str, Enum):
    DELIVERED = "Delivered"
    REFUNDED = "Refunded"
    REJECTED = "RejectedAtVerification"
    UNFUNDED = "Unfunded"
    # Paid without a usable delivery; always a safety violation.
    INTEGRITY_FAILURE = "IntegrityFailure"


@dataclass(frozen=True)
class SellerOffer:
    """What a seller presents to one buyer in Step 2. C_i travels off-ledger."""

    seller: str
    item: int
    key_commitment: KeyCommitment
    ciphertext: Ciphertext
    content_hash: ContentHash
    proof: Proof
    eval_id: str
    asking_price: int

    @property
    def label(self) -> str:
        return f"{self.seller}/{self.item}"

    def statement(self) -> SellerStatement:
        return SellerStatement(self.key_commitment, self.ciphertext, self.content_hash, self.eval_id)


@dataclass
class Listing:
    """Seller-side view of an offer: the public offer plus the secrets behind it."""

    offer: SellerOffer
    key: SymmetricKey = field(repr=False)
    data: bytes = field(repr=False)
    kind: AdversaryKind = AdversaryKind.HONEST
    claim_key: Optional[SymmetricKey] = field(default=None, repr=False)

    def __post_init__(self):
        if self.claim_key is None:
            self.claim_key = self.key

    @property
    def claims(self) -> bool:
        return self.kind != AdversaryKind.NON_CLAIMER


@dataclass
class PurchaseOrder:
    buyer: str
    offers: list[SellerOffer]
    amounts: list[int]
    deadline_blocks: int
    mode: str = "commitment-only"

    def __post_init__(self):
        if len(self.offers) != len(self.amounts):
            raise InvalidOrder("one amount is needed per accepted offer")
        for offer, amount in zip(self.offers, self.amounts):
            if amount < offer.asking_price:
                raise InvalidOrder(f"{amount} is below the asking price {offer.asking_price} of {offer.label}")
        if self.deadline_blocks < 1:
            raise InvalidOrder("deadline must be at least one block away")

    @classmethod
    def at_asking_price(cls, buyer: str, offers: list[SellerOffer], deadline_blocks: int, mode: str) -> "PurchaseOrder":
        return cls(buyer, list(offers), [o.asking_price for o in offers], deadline_blocks, mode)

    @property
    def total(self) -> int:
        return sum(self.amounts)


@dataclass
class VerifyCost:
    """Buyer-side cost of Step 2 verification."""

    wall_ms: float = 0.0
    ops: dict[str, int] = field(default_factory=dict)
    fallback: bool = False
    fallback_ms: float = 0.0


class OfferRecord(BaseModel):
    buyer: str
    seller: str
    item: int
    adversary: AdversaryKind = AdversaryKind.HONEST
    outcome: OfferOutcome
    amount: int = 0
    content_hash: str = ""
    contract_id: Optional[str] = None
    entry: Optional[int] = None
    detail: str = ""


class MarketReport(BaseModel):
    """Per-offer outcomes plus phase timings and operation counts of one run."""

    scenario: str
    seed: int
    ledger_mode: str
    verification: str
    records: list[OfferRecord] = Field(default_factory=list)
    timings: dict[str, float] = Field(default_factory=dict)
    ops: dict[str, dict[str, int]] = Field(default_factory=dict)
    balances: dict[str, int] = Field(default_factory=dict)
    log_digest: str = ""
    conservation: bool = True
    violations: list[str] = Field(default_factory=list)

    def count(self, outcome: OfferOutcome) -> int:
        return sum(1 for r in self.records if r.outcome == outcome)

    def summary(self) -> dict:
        outcomes = {o.value: self.count(o) for o in OfferOutcome}
        tokens = {o.value: sum(r.amount for r in self.records if r.outcome == o) for o in OfferOutcome}
        return {"offers": len(self.records), "outcomes": outcomes, "tokens": tokens}

    def deterministic_view(self) -> dict:
        """Everything except wall-clock timings."""
        return self.model_dump(mode="json", exclude={"timings"})

    @property
    def safe(self) -> bool:
        return self.conservation and not self.violations
