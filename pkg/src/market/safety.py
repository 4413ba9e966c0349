"""
Fair-exchange audit of a finished market run.
"""

from ..crypto.primitives import SymmetricKey, commit_key
from ..ledger.chain import Ledger
from ..ledger.models import EscrowStatus
from .models import MarketReport, OfferOutcome

_EXPECTED_STATUS = {
    OfferOutcome.DELIVERED: EscrowStatus.PAID,
    OfferOutcome.REFUNDED: EscrowStatus.REFUNDED,
}


def check_fair_exchange(report: MarketReport, ledger: Ledger) -> list[str]:
    """
    Violations of fair exchange, empty when the run is safe.

    Every offer must end either Delivered with its entry Paid, or with the
    buyer's money back (Refunded entry, or never escrowed). Paid entries must
    carry a revealed key that opens their commitment, and tokens must be
    conserved.
    """
    violations = []
    state = ledger.snapshot()

    for rec in report.records:
        where = f"{rec.buyer}<-{rec.seller}/{rec.item}"
        if rec.outcome == OfferOutcome.INTEGRITY_FAILURE:
            violations.append(f"{where}: paid but undelivered ({rec.detail})")
            continue
        if rec.outcome in (OfferOutcome.REJECTED, OfferOutcome.UNFUNDED):
            if rec.contract_id is not None:
                violations.append(f"{where}: {rec.outcome.value} offer was escrowed")
            continue

        contract = state.contracts.get(rec.contract_id or "")
        if contract is None or rec.entry is None or rec.entry >= len(contract.entries):
            violations.append(f"{where}: no escrow entry behind a {rec.outcome.value} outcome")
            continue
        entry = contract.entries[rec.entry]
        if entry.status != _EXPECTED_STATUS[rec.outcome]:
            violations.append(f"{where}: outcome {rec.outcome.value} but entry is {entry.status.value}")
        if rec.outcome == OfferOutcome.REFUNDED and entry.revealed_key is not None:
            violations.append(f"{where}: key revealed on a refunded entry")

    for contract in state.contracts.values():
        funded = sum(e.amount for e in contract.entries)
        paid = contract.settled_total(EscrowStatus.PAID)
        refunded = contract.settled_total(EscrowStatus.REFUNDED)
        if paid + refunded > funded:
            violations.append(f"{contract.id}: settled {paid + refunded} of {funded} escrowed")
        for position, entry in enumerate(contract.entries):
            if entry.status != EscrowStatus.PAID:
                continue
            if entry.revealed_key is None or commit_key(SymmetricKey.from_hex(entry.revealed_key)).hex() != entry.key_commitment:
                violations.append(f"{contract.id}#{position}: paid without a key opening its commitment")

    if not ledger.check_conservation():
        violations.append(
            f"token conservation violated: supply {state.total_supply()} vs genesis {ledger.genesis_total}"
        )
    return violations
