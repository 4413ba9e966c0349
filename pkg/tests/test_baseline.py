"""Tests for the pairwise Diffie-Hellman baseline."""

import pytest

from src.baseline.dcdh import PHASES, PartyState, run_baseline, run_pair
from src.crypto.group import P
from src.market.datasets import synthetic_item
from src.utils.errors import InvalidConfig
from src.utils.rng import RunRng


def _parties(seed=1):
    rng = RunRng(seed)
    return PartyState("buyer", rng.child(1)), PartyState("seller", rng.child(2))


def test_pair_delivers_item():
    item = synthetic_item(RunRng(3), 512)
    data, cost, session = run_pair(*_parties(), item)
    assert data == item
    assert session.delivered
    assert set(cost.phase_ms) == set(PHASES)
    assert all(ms >= 0 for ms in cost.phase_ms.values())


def test_pair_operation_counts():
    _, cost, _ = run_pair(*_parties(), b"item")
    assert cost.total_ops()["group_exps"] == 6
    assert cost.total_ops()["kdf_calls"] == 2
    assert cost.role_ops["buyer"]["group_exps"] == 3
    assert cost.role_ops["seller"]["group_exps"] == 3
    assert cost.phase_ops["verify"]["hash_calls"] == 1


def test_tampered_transfer_is_not_delivered():
    data, _, session = run_pair(*_parties(), b"original item", tamper=True)
    assert data is None
    assert not session.delivered


def test_parties_agree_on_the_shared_element():
    buyer, seller = _parties(5)
    _, _, session = run_pair(buyer, seller, b"x")
    assert session.shared.value == pow(buyer.element.value, seller.scalar, P)
    assert session.shared.value == pow(seller.element.value, buyer.scalar, P)


@pytest.mark.parametrize("n", [1, 3, 8])
def test_baseline_costs_grow_exactly_linearly(n):
    report = run_baseline(n, 256, seed=4)
    assert report.delivered == n
    assert len(report.sessions) == n
    assert report.total_ops()["group_exps"] == 6 * n
    assert report.verification_ops() == 7 * n
    assert report.total_ms > 0


def test_parallel_pairs_match_sequential_counts():
    sequential = run_baseline(4, 128, seed=9)
    parallel = run_baseline(4, 128, seed=9, parallel=True)
    assert parallel.label == "dcdh (parallel pairs)"
    assert sequential.label == "dcdh"
    assert parallel.delivered == sequential.delivered == 4
    assert parallel.total_ops() == sequential.total_ops()


@pytest.mark.parametrize("n, size", [(0, 10), (3, 0)])
def test_baseline_rejects_bad_arguments(n, size):
    with pytest.raises(InvalidConfig):
        run_baseline(n, size, seed=1)
