"""Tests for the seller and buyer protocol steps and the fair-exchange audit."""

import pytest

from src.crypto.primitives import Ciphertext, commit_key, decrypt
from src.ledger.chain import Ledger
from src.market.buyer import buyer_finalize, buyer_fund, buyer_verify_offers
from src.market.datasets import FAILING_DATA, synthetic_item, synthetic_rows
from src.market.models import AdversaryKind, MarketReport, OfferOutcome, OfferRecord, PurchaseOrder, VerificationMode
from src.market.safety import check_fair_exchange
from src.market.seller import (
    assign_adversaries,
    expected_adversary_counts,
    make_wrong_key,
    replay_proof,
    seller_claim,
    seller_prepare,
    tamper_store,
)
from src.utils.config import AdversaryMix
from src.utils.errors import EmptyData, IntegrityFailure, InvalidOrder, SettlementPending
from src.utils.rng import RunRng


def _market(make_listing, n=3, balance=100):
    listings = [make_listing(i) for i in range(n)]
    accounts = {"buyer": balance, **{l.offer.seller: 0 for l in listings}}
    return listings, Ledger(accounts)


def _order(offers, mode="commitment-only", deadline_blocks=5):
    return PurchaseOrder.at_asking_price("buyer", offers, deadline_blocks, mode)


# Step 1


def test_seller_prepare_publishes_consistent_offer(make_listing, store):
    listing = make_listing(0)
    offer = listing.offer
    assert offer.key_commitment == commit_key(listing.key)
    assert decrypt(listing.key, offer.ciphertext) == str(offer.content_hash).encode("utf-8")
    stored = store.get(offer.content_hash)
    assert decrypt(listing.key, Ciphertext.from_bytes(stored)) == listing.data
    assert listing.data not in stored


def test_seller_prepare_rejects_empty_data(store, backend):
    with pytest.raises(EmptyData):
        seller_prepare(b"", "min-records:1", 1, RunRng(1), store=store, backend=backend)


def test_fresh_key_per_buyer(store, backend):
    data = synthetic_rows(RunRng(1), 128)
    first = seller_prepare(data, "min-records:100", 1, RunRng(2, 0), store=store, backend=backend)
    second = seller_prepare(data, "min-records:100", 1, RunRng(2, 1), store=store, backend=backend)
    assert first.offer.key_commitment != second.offer.key_commitment
    assert first.offer.content_hash != second.offer.content_hash


# Step 2


@pytest.mark.parametrize("mode", list(VerificationMode))
def test_verification_modes_partition_identically(make_listing, backend, mode):
    offers = [make_listing(0).offer, make_listing(1, data=FAILING_DATA).offer, make_listing(2).offer]
    accepted, rejected, cost = buyer_verify_offers(offers, mode, backend)
    assert [o.seller for o in accepted] == [offers[0].seller, offers[2].seller]
    assert [(o.seller, reason) for o, reason in rejected] == [(offers[1].seller, "evaluation")]
    assert cost.fallback == (mode == VerificationMode.AGGREGATED)


def test_aggregated_verification_without_failures_skips_fallback(make_listing, backend):
    offers = [make_listing(i).offer for i in range(4)]
    accepted, rejected, cost = buyer_verify_offers(offers, "aggregated", backend)
    assert len(accepted) == 4 and not rejected
    assert not cost.fallback
    assert cost.ops["verify_calls"] == 1
    assert cost.ops["group_exps"] == 3


def test_verify_no_offers(backend):
    assert buyer_verify_offers([], "aggregated", backend)[:2] == ([], [])


# Step 3


def test_purchase_order_validation(make_listing):
    offer = make_listing(0).offer
    with pytest.raises(InvalidOrder):
        PurchaseOrder("buyer", [offer], [offer.asking_price - 1], 5)
    with pytest.raises(InvalidOrder):
        PurchaseOrder("buyer", [offer], [], 5)
    with pytest.raises(InvalidOrder):
        PurchaseOrder("buyer", [offer], [offer.asking_price], 0)
    assert PurchaseOrder("buyer", [offer], [offer.asking_price + 5], 5).total == offer.asking_price + 5


def test_fund_records_commitments(make_listing):
    listings, ledger = _market(make_listing)
    cid = buyer_fund(ledger, _order([l.offer for l in listings]))
    contract = ledger.contract(cid)
    assert [e.key_commitment for e in contract.entries] == [l.offer.key_commitment.hex() for l in listings]
    assert all(e.ciphertext is None for e in contract.entries)
    assert contract.deadline == 5
    assert ledger.balance("buyer") == 70


def test_fund_full_decrypt_carries_ciphertexts(make_listing):
    listings, ledger = _market(make_listing)
    cid = buyer_fund(ledger, _order([l.offer for l in listings], mode="full-decrypt"))
    assert [e.ciphertext for e in ledger.contract(cid).entries] == [l.offer.ciphertext.hex() for l in listings]


# Steps 4 and 5


def test_honest_exchange_delivers_everything(make_listing, store):
    listings, ledger = _market(make_listing)
    cid = buyer_fund(ledger, _order([l.offer for l in listings]))
    for listing in listings:
        assert seller_claim(ledger, cid, listing.offer.seller, listing.key).paid
    deliveries = buyer_finalize(ledger, store, cid, [l.offer for l in listings])
    assert [d.outcome for d in deliveries] == [OfferOutcome.DELIVERED] * 3
    assert [d.data for d in deliveries] == [l.data for l in listings]
    assert all(ledger.balance(l.offer.seller) == 10 for l in listings)


def test_finalize_waits_for_open_entries(make_listing, store):
    listings, ledger = _market(make_listing)
    cid = buyer_fund(ledger, _order([l.offer for l in listings]))
    seller_claim(ledger, cid, listings[0].offer.seller, listings[0].key)
    with pytest.raises(SettlementPending):
        buyer_finalize(ledger, store, cid, [l.offer for l in listings])


def test_finalize_after_deadline_refunds_unclaimed(make_listing, store):
    listings, ledger = _market(make_listing)
    cid = buyer_fund(ledger, _order([l.offer for l in listings]))
    seller_claim(ledger, cid, listings[0].offer.seller, listings[0].key)
    ledger.advance_blocks(6)
    deliveries = buyer_finalize(ledger, store, cid, [l.offer for l in listings])
    assert [d.outcome for d in deliveries] == [OfferOutcome.DELIVERED, OfferOutcome.REFUNDED, OfferOutcome.REFUNDED]
    assert ledger.balance("buyer") == 90
    assert ledger.check_conservation()


def test_wrong_key_is_refused_and_refunded(make_listing, store):
    listings, ledger = _market(make_listing, n=1)
    listing = make_wrong_key(listings[0], RunRng(9))
    cid = buyer_fund(ledger, _order([listing.offer]))
    result = seller_claim(ledger, cid, listing.offer.seller, listing.claim_key)
    assert not result.paid and result.reason == "commitment mismatch"
    ledger.advance_blocks(6)
    assert buyer_finalize(ledger, store, cid, [listing.offer])[0].outcome == OfferOutcome.REFUNDED
    assert ledger.balance("buyer") == 100


def test_replayed_proof_fails_verification(make_listing, backend):
    donor = make_listing(1).offer
    listing = replay_proof(make_listing(0), donor)
    accepted, rejected, _ = buyer_verify_offers([listing.offer], "individual", backend)
    assert not accepted
    assert rejected[0][1] == "statement-binding"


def test_tamper_before_verification_is_rejected(make_listing, store, backend):
    listing = tamper_store(make_listing(0), store)
    _, rejected, _ = buyer_verify_offers([listing.offer], "aggregated", backend)
    assert rejected[0][1] == "stored-payload"


def test_tamper_after_payment_is_an_integrity_failure(make_listing, store):
    listings, ledger = _market(make_listing, n=1)
    listing = listings[0]
    cid = buyer_fund(ledger, _order([listing.offer]))
    seller_claim(ledger, cid, listing.offer.seller, listing.key)
    tamper_store(listing, store)

    deliveries = buyer_finalize(ledger, store, cid, [listing.offer])
    assert deliveries[0].outcome == OfferOutcome.INTEGRITY_FAILURE
    assert deliveries[0].failure.stage == "fetch"
    with pytest.raises(IntegrityFailure):
        buyer_finalize(ledger, store, cid, [listing.offer], strict=True)


# Adversary assignment


def test_assign_adversaries_matches_expected_counts():
    mix = AdversaryMix(wrong_key=10, failing_f=20, non_claimer=15)
    kinds = assign_adversaries(40, mix, RunRng(3))
    expected = expected_adversary_counts(40, mix)
    assert expected[AdversaryKind.WRONG_KEY] == 4
    assert expected[AdversaryKind.FAILING_F] == 8
    assert expected[AdversaryKind.NON_CLAIMER] == 6
    assert expected[AdversaryKind.HONEST] == 22
    for kind, count in expected.items():
        assert kinds.count(kind) == count
    assert assign_adversaries(40, mix, RunRng(3)) == kinds


def test_adversary_mix_over_100_percent():
    with pytest.raises(ValueError):
        AdversaryMix(wrong_key=60, failing_f=50)


# Audit


def test_fair_exchange_audit_flags_doctored_outcomes(make_listing, store):
    listings, ledger = _market(make_listing, n=2)
    cid = buyer_fund(ledger, _order([l.offer for l in listings]))
    seller_claim(ledger, cid, listings[0].offer.seller, listings[0].key)
    ledger.advance_blocks(6)
    buyer_finalize(ledger, store, cid, [l.offer for l in listings])

    def record(position, outcome):
        offer = listings[position].offer
        return OfferRecord(buyer="buyer", seller=offer.seller, item=0, outcome=outcome, amount=10,
                           contract_id=cid, entry=position)

    honest = MarketReport(scenario="t", seed=1, ledger_mode="commitment-only", verification="aggregated",
                          records=[record(0, OfferOutcome.DELIVERED), record(1, OfferOutcome.REFUNDED)])
    assert check_fair_exchange(honest, ledger) == []

    doctored = honest.model_copy(update={"records": [record(0, OfferOutcome.REFUNDED), record(1, OfferOutcome.DELIVERED)]})
    violations = check_fair_exchange(doctored, ledger)
    assert len(violations) == 3
    assert any("key revealed on a refunded entry" in v for v in violations)

    failed = honest.model_copy(update={"records": [record(0, OfferOutcome.INTEGRITY_FAILURE)]})
    assert any("paid but undelivered" in v for v in check_fair_exchange(failed, ledger))


def test_synthetic_item_size():
    for size in (1, 100, 4096):
        assert len(synthetic_item(RunRng(1), size)) >= size
