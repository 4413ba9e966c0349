"""Buyer and seller operations of the trading protocol."""

from .buyer import Delivery, buyer_finalize, buyer_fund, buyer_verify_offers
from .datasets import FAILING_DATA, synthetic_item, synthetic_rows
from .models import (
    AdversaryKind,
    Listing,
    MarketReport,
    OfferOutcome,
    OfferRecord,
    PurchaseOrder,
    SellerOffer,
    VerificationMode,
    VerifyCost,
)
from .safety import check_fair_exchange
from .seller import (
    assign_adversaries,
    expected_adversary_counts,
    make_wrong_key,
    replay_proof,
    seller_claim,
    seller_prepare,
    tamper_store,
)

__all__ = [
    "Delivery",
    "buyer_finalize",
    "buyer_fund",
    "buyer_verify_offers",
    "FAILING_DATA",
    "synthetic_item",
    "synthetic_rows",
    "AdversaryKind",
    "Listing",
    "MarketReport",
    "OfferOutcome",
    "OfferRecord",
    "PurchaseOrder",
    "SellerOffer",
    "VerificationMode",
    "VerifyCost",
    "check_fair_exchange",
    "assign_adversaries",
    "expected_adversary_counts",
    "make_wrong_key",
    "replay_proof",
    "seller_claim",
    "seller_prepare",
    "tamper_store",
]
