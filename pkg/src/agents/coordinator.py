"""
Market Coordinator - orchestrates one many-to-many trading run.
"""

import asyncio
import time
from contextlib import contextmanager
from typing import Any, Optional, Union

from pydantic import ValidationError

from ..ledger.chain import Ledger
from ..market.datasets import synthetic_rows
from ..market.models import AdversaryKind, MarketReport, OfferOutcome, OfferRecord, VerificationMode
from ..market.safety import check_fair_exchange
from ..market.seller import assign_adversaries
from ..proof.backend import create_backend
from ..storage.content_store import ContentStore, open_store
from ..utils.config import ScenarioConfig, get_config
from ..utils.errors import InvalidConfig
from ..utils.logging import console
from ..utils.opcount import counting
from ..utils.rng import RunRng
from .base_agent import AgentMessage, BaseAgent
from .buyer_agent import BuyerAgent
from .seller_agent import SellerAgent


class MarketCoordinator(BaseAgent):
    """
    Runs Steps 1-5 for every buyer against every seller.

    Flow:
    1. Prepare: sellers build one offer per (buyer, item), in parallel
    2. Aggregate: offers for each buyer are folded into one proof
    3. Verify: buyers check proofs (aggregate, with per-offer fallback)
    4. Fund: funding buyers deploy escrows for accepted offers
    5. Claim: sellers reveal keys, one ledger transaction at a time
    6. Settle: the clock passes every deadline and stragglers are refunded
    7. Deliver: buyers recover and re-check the purchased data
    """

    PHASES = ("prepare", "aggregate", "verify", "fund", "claim", "settle", "deliver")

    def __init__(self, scenario: ScenarioConfig, store: Optional[ContentStore] = None, verbose: bool = True):
        super().__init__("coordinator")
        self.scenario = scenario
        self.verbose = verbose
        self.store = store if store is not None else open_store(get_config().store.resolved_dir)
        self.rng = RunRng(scenario.seed)
        self.backend = create_backend(self.store, scenario.seed)
        self.timings: dict[str, float] = {}
        self.ops: dict[str, dict[str, int]] = {}

        self.kinds = assign_adversaries(scenario.sellers, scenario.adversaries, self.rng.child(1))
        non_funding = int(scenario.non_funding_buyers * scenario.buyers // 100)
        silent = set(self.rng.child(2).shuffled(list(range(scenario.buyers)))[:non_funding])

        price = scenario.price
        prices = [
            [self.rng.child(3, s, i).integers(price.base, price.base + price.spread + 1)
             for i in range(scenario.items_per_seller)]
            for s in range(scenario.sellers)
        ]
        balance = scenario.buyer_balance
        if balance is None:
            balance = scenario.sellers * scenario.items_per_seller * (price.base + price.spread)

        seller_names = [f"seller-{s:04d}" for s in range(scenario.sellers)]
        buyer_names = [f"buyer-{b:03d}" for b in range(scenario.buyers)]
        accounts = {name: balance for name in buyer_names}
        accounts.update({name: 0 for name in seller_names})
        self.ledger = Ledger(accounts)

        self.sellers = [
            SellerAgent(
                name,
                items=[
                    synthetic_rows(self.rng.child(4, s, i), scenario.records_per_item)
                    for i in range(scenario.items_per_seller)
                ],
                prices=prices[s],
                kind=self.kinds[s],
                store=self.store,
                backend=self.backend,
                ledger=self.ledger,
                rng=self.rng.child(5, s),
            )
            for s, name in enumerate(seller_names)
        ]
        self.buyers = [
            BuyerAgent(
                name,
                index=b,
                eval_id=scenario.eval_for(b),
                funds=b not in silent,
                store=self.store,
                backend=self.backend,
                ledger=self.ledger,
                verification=VerificationMode(scenario.verification),
                ledger_mode=scenario.ledger_mode,
                deadline_blocks=scenario.deadline_blocks,
            )
            for b, name in enumerate(buyer_names)
        ]
        self.claims: dict[tuple[str, str, int], str] = {}

        self.logger.info(
            f"Scenario {scenario.name}: {scenario.buyers} buyers x {scenario.sellers} sellers, seed {scenario.seed}"
        )

    @contextmanager
    def _phase(self, name: str):
        if self.verbose:
            console.rule(f"[bold cyan]{name.capitalize()}[/]")
        with counting() as ops:
            start = time.perf_counter()
            yield
            self.timings[name] = (time.perf_counter() - start) * 1000
        self.ops[name] = ops.snapshot()

    async def process(self, message: AgentMessage) -> Optional[AgentMessage]:
        report = await self.run()
        return self.send_message(message.sender, "report", {"report": report})

    async def run(self) -> MarketReport:
        offers: dict[int, list] = {}
        with self._phase("prepare"):
            requests = [
                (b, seller, seller.handle(self.send_message(seller.name, "request_offers", {
                    "buyer_index": b, "eval_id": buyer.eval_id,
                })))
                for b, buyer in enumerate(self.buyers)
                for seller in self.sellers
            ]
            responses = await asyncio.gather(*(request for _, _, request in requests))
            for (b, seller, _), response in zip(requests, responses):
                offers.setdefault(b, []).extend(response.payload["offers"])
            await self._replay_proofs(offers)

        aggregates: dict[int, Any] = {}
        with self._phase("aggregate"):
            if self.scenario.verification == VerificationMode.AGGREGATED.value:
                for b, batch in offers.items():
                    aggregates[b] = self.backend.aggregate([(o.statement(), o.proof) for o in batch])

        with self._phase("verify"):
            for b, buyer in enumerate(self.buyers):
                await buyer.handle(self.send_message(buyer.name, "offers", {
                    "offers": offers.get(b, []), "aggregate": aggregates.get(b),
                }))

        with self._phase("fund"):
            for buyer in self.buyers:
                await buyer.handle(self.send_message(buyer.name, "fund", {}))

        with self._phase("claim"):
            for buyer in self.buyers:
                if buyer.contract_id is None:
                    continue
                for seller in self.sellers:
                    response = await seller.handle(self.send_message(seller.name, "claim", {
                        "contract_id": buyer.contract_id, "buyer_index": buyer.index,
                    }))
                    for result in response.payload["results"]:
                        if not result["paid"]:
                            self.claims[(buyer.name, seller.name, result["item"])] = result["reason"]

        with self._phase("settle"):
            self.ledger.advance_blocks(self.scenario.deadline_blocks + 1)
            for buyer in self.buyers:
                if buyer.contract_id is not None:
                    self.ledger.refund_expired(buyer.contract_id)

        with self._phase("deliver"):
            for buyer in self.buyers:
                await buyer.handle(self.send_message(buyer.name, "finalize", {}))

        return self._report()

    async def _replay_proofs(self, offers: dict[int, list]):
        """Proof-replay sellers swap in the proof of the next seller's offer for the same buyer and item."""
        by_label = {b: {o.label: i for i, o in enumerate(batch)} for b, batch in offers.items()}
        for s, seller in enumerate(self.sellers):
            if seller.kind != AdversaryKind.PROOF_REPLAY:
                continue
            donor_name = self.sellers[(s + 1) % len(self.sellers)].name
            for b, batch in offers.items():
                for item in range(self.scenario.items_per_seller):
                    donor_at = by_label[b].get(f"{donor_name}/{item}")
                    donor = batch[donor_at] if donor_at is not None and donor_name != seller.name else None
                    response = await seller.handle(self.send_message(seller.name, "replay_proof", {
                        "buyer_index": b, "item": item, "donor": donor,
                    }))
                    batch[by_label[b][f"{seller.name}/{item}"]] = response.payload["offers"][0]

    def _report(self) -> MarketReport:
        kind_of = {seller.name: seller.kind for seller in self.sellers}
        records = []
        for buyer in self.buyers:
            rejected = {offer.label: reason for offer, reason in buyer.rejected}
            delivered = {(d.seller, d.item): d for d in buyer.deliveries}
            entry_of = {offer.label: i for i, offer in enumerate(buyer.accepted)}
            for offer in buyer.offers:
                base = dict(
                    buyer=buyer.name,
                    seller=offer.seller,
                    item=offer.item,
                    adversary=kind_of[offer.seller],
                    content_hash=str(offer.content_hash),
                )
                if offer.label in rejected:
                    records.append(OfferRecord(**base, outcome=OfferOutcome.REJECTED, detail=rejected[offer.label]))
                    continue
                if buyer.contract_id is None:
                    detail = buyer.funding_error or "buyer never funded"
                    records.append(OfferRecord(**base, outcome=OfferOutcome.UNFUNDED, detail=detail))
                    continue
                delivery = delivered[(offer.seller, offer.item)]
                detail = ""
                if delivery.outcome == OfferOutcome.REFUNDED:
                    reason = self.claims.get((buyer.name, offer.seller, offer.item))
                    detail = f"claim rejected: {reason}" if reason else "never claimed"
                elif delivery.failure is not None:
                    detail = str(delivery.failure)
                records.append(OfferRecord(
                    **base,
                    outcome=delivery.outcome,
                    amount=offer.asking_price,
                    contract_id=buyer.contract_id,
                    entry=entry_of[offer.label],
                    detail=detail,
                ))

        state = self.ledger.snapshot()
        report = MarketReport(
            scenario=self.scenario.name,
            seed=self.scenario.seed,
            ledger_mode=self.scenario.ledger_mode,
            verification=self.scenario.verification,
            records=records,
            timings=dict(self.timings),
            ops=dict(self.ops),
            balances=dict(sorted(state.balances.items())),
            log_digest=state.log[-1].state_digest,
            conservation=self.ledger.check_conservation(),
        )
        report.violations = check_fair_exchange(report, self.ledger)
        if report.violations:
            for violation in report.violations:
                self.logger.error(violation)
        else:
            self.logger.success(f"Fair exchange held for {len(records)} offers")
        return report

    def run_blocking(self) -> MarketReport:
        return asyncio.run(self.run())


def run_market(
    config: Union[ScenarioConfig, dict], store: Optional[ContentStore] = None, verbose: bool = False
) -> MarketReport:
    """Run one seeded scenario end to end."""
    if not isinstance(config, ScenarioConfig):
        try:
            config = ScenarioConfig(**config)
        except ValidationError as exc:
            raise InvalidConfig(str(exc)) from exc
    return MarketCoordinator(config, store, verbose=verbose).run_blocking()
