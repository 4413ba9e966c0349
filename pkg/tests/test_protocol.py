"""End-to-end market runs through the coordinator and its agents."""

from pathlib import Path

import pytest

from src.agents.coordinator import MarketCoordinator, run_market
from src.ledger.chain import Ledger
from src.market.models import AdversaryKind, OfferOutcome
from src.storage.content_store import ContentStore, FileContentStore
from src.utils.config import ScenarioConfig, load_scenario
from src.utils.errors import InvalidConfig

SCENARIOS = Path(__file__).parent.parent / "scenarios"


def scenario(**overrides) -> ScenarioConfig:
    settings = {"name": "test", "seed": 7, "buyers": 1, "sellers": 10, "records_per_item": 110}
    settings.update(overrides)
    return ScenarioConfig(**settings)


def run(config: ScenarioConfig) -> MarketCoordinator:
    coordinator = MarketCoordinator(config, ContentStore(), verbose=False)
    coordinator.report = coordinator.run_blocking()
    return coordinator


def test_honest_market_delivers_everything():
    coordinator = run(scenario())
    report = coordinator.report
    assert report.count(OfferOutcome.DELIVERED) == 10
    assert report.safe
    assert all(report.balances[f"seller-{s:04d}"] == 10 for s in range(10))
    assert report.balances["buyer-000"] == 0
    assert list(report.timings) == list(MarketCoordinator.PHASES)


def test_adversary_mix_scenario_file():
    report = run(load_scenario(str(SCENARIOS / "adversary_mix.yaml"))).report
    assert report.count(OfferOutcome.DELIVERED) == 8
    assert report.count(OfferOutcome.REFUNDED) == 1
    assert report.count(OfferOutcome.REJECTED) == 1
    assert report.balances["buyer-000"] == 20
    assert report.safe


@pytest.mark.parametrize("kind, outcome, detail", [
    (AdversaryKind.WRONG_KEY, OfferOutcome.REFUNDED, "claim rejected: commitment mismatch"),
    (AdversaryKind.NON_CLAIMER, OfferOutcome.REFUNDED, "never claimed"),
    (AdversaryKind.FAILING_F, OfferOutcome.REJECTED, "evaluation"),
    (AdversaryKind.PROOF_REPLAY, OfferOutcome.REJECTED, "statement-binding"),
    (AdversaryKind.STORE_TAMPER, OfferOutcome.REJECTED, "stored-payload"),
])
@pytest.mark.parametrize("ledger_mode", ["commitment-only", "full-decrypt"])
def test_each_adversary_is_contained(kind, outcome, detail, ledger_mode):
    config = scenario(adversaries={kind.value: 20}, items_per_seller=2, ledger_mode=ledger_mode)
    report = run(config).report
    assert report.safe, report.violations

    bad = [r for r in report.records if r.adversary == kind]
    assert len(bad) == 4
    assert all(r.outcome == outcome and r.detail == detail for r in bad)
    honest = [r for r in report.records if r.adversary == AdversaryKind.HONEST]
    assert all(r.outcome == OfferOutcome.DELIVERED for r in honest)
    assert report.balances["buyer-000"] == 200 - 10 * len(honest)


def test_non_funding_buyer():
    config = scenario(buyers=2, sellers=4, non_funding_buyers=50)
    coordinator = run(config)
    report = coordinator.report
    unfunded = [r for r in report.records if r.outcome == OfferOutcome.UNFUNDED]
    assert len(unfunded) == 4
    assert {r.buyer for r in unfunded} == {unfunded[0].buyer}
    assert all(r.detail == "buyer never funded" and r.contract_id is None for r in unfunded)
    assert report.balances[unfunded[0].buyer] == 40
    assert report.count(OfferOutcome.DELIVERED) == 4
    assert report.safe


def test_many_to_many_scenario_file():
    coordinator = run(load_scenario(str(SCENARIOS / "many_to_many.yaml")))
    report = coordinator.report
    assert len(report.records) == 4 * 20 * 2
    assert report.safe, report.violations
    assert Ledger.replay(coordinator.ledger.log).log[-1].state_digest == report.log_digest


def test_same_seed_gives_identical_runs():
    config = scenario(buyers=2, adversaries={"wrong_key": 10, "proof_replay": 10, "non_claimer": 10})
    first, second = run(config), run(config)
    assert [tx.model_dump_json() for tx in first.ledger.log] == [tx.model_dump_json() for tx in second.ledger.log]
    assert first.report.deterministic_view() == second.report.deterministic_view()


def test_same_scenario_twice_on_one_file_store(tmp_path):
    config = scenario(adversaries={"store_tamper": 20})
    store = FileContentStore(str(tmp_path))
    reports = [MarketCoordinator(config, store, verbose=False).run_blocking() for _ in range(2)]
    assert all(report.safe for report in reports)
    assert reports[0].deterministic_view() == reports[1].deterministic_view()
    assert reports[1].count(OfferOutcome.REJECTED) > 0


def test_different_seed_changes_the_log():
    first, second = run(scenario(seed=1)), run(scenario(seed=2))
    assert first.report.log_digest != second.report.log_digest


def test_verification_mode_does_not_change_outcomes():
    mix = {"wrong_key": 10, "failing_f": 10, "store_tamper": 10}
    aggregated = run(scenario(adversaries=mix, verification="aggregated"))
    individual = run(scenario(adversaries=mix, verification="individual"))
    assert [r.model_dump() for r in aggregated.report.records] == [r.model_dump() for r in individual.report.records]
    assert [tx.model_dump_json() for tx in aggregated.ledger.log] == [tx.model_dump_json() for tx in individual.ledger.log]


def test_aggregated_verification_is_cheaper_for_honest_batches():
    aggregated = run(scenario(verification="aggregated")).report
    individual = run(scenario(verification="individual")).report
    assert aggregated.ops["verify"]["verify_calls"] == 1
    assert individual.ops["verify"]["verify_calls"] == 10


def test_agents_exchange_messages():
    coordinator = run(scenario(sellers=3))
    seller = coordinator.sellers[0].get_status()
    assert seller["role"] == "seller"
    assert seller["status"] == "idle"
    assert seller["stats"]["messages_received"] == 2
    assert coordinator.buyers[0].get_status()["stats"]["messages_received"] == 3


def test_run_market_accepts_plain_settings():
    report = run_market({"name": "plain", "sellers": 3, "records_per_item": 110}, store=ContentStore())
    assert report.count(OfferOutcome.DELIVERED) == 3


@pytest.mark.parametrize("settings", [
    {"sellers": 0},
    {"evals": ["no-such-eval:1"]},
    {"adversaries": {"wrong_key": 80, "failing_f": 30}},
    {"ledger_mode": "optimistic"},
    {"unknown_field": 1},
])
def test_run_market_rejects_bad_settings(settings):
    with pytest.raises(InvalidConfig):
        run_market(settings)


def test_load_scenario_overrides_and_errors(tmp_path):
    config = load_scenario(str(SCENARIOS / "honest_1x10.yaml"), {"seed": 99, "verification": None})
    assert config.seed == 99
    assert config.verification == "aggregated"

    with pytest.raises(InvalidConfig):
        load_scenario(str(tmp_path / "missing.yaml"))
    bad = tmp_path / "bad.yaml"
    bad.write_text("- just\n- a list\n")
    with pytest.raises(InvalidConfig):
        load_scenario(str(bad))
    broken = tmp_path / "broken.yaml"
    broken.write_text("sellers: [unclosed\n")
    with pytest.raises(InvalidConfig):
        load_scenario(str(broken))
