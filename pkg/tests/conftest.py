"""Shared fixtures for the Yotta test suite."""

import json
from pathlib import Path

import pytest

from src.ledger.chain import Ledger
from src.market.datasets import synthetic_rows
from src.market.seller import seller_prepare
from src.proof.backend import RecheckBackend
from src.storage.content_store import ContentStore
from src.utils.rng import RunRng

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture(autouse=True)
def _in_memory_store(monkeypatch):
    monkeypatch.delenv("YOTTA_STORE_DIR", raising=False)


@pytest.fixture(scope="session")
def vectors() -> dict:
    return json.loads((FIXTURES / "vectors.json").read_text())


@pytest.fixture
def store() -> ContentStore:
    return ContentStore()


@pytest.fixture
def backend(store) -> RecheckBackend:
    return RecheckBackend.from_seed(7, store)


@pytest.fixture
def make_listing(store, backend):
    """Factory for honest listings: ``make_listing(index, eval_id=..., data=...)``."""
    def _make(index: int = 0, eval_id: str = "min-records:100", data: bytes = None, price: int = 10):
        rng = RunRng(7, 99, index)
        if data is None:
            data = synthetic_rows(rng.child(0), 128)
        return seller_prepare(
            data, eval_id, price, rng.child(1),
            store=store, backend=backend, seller=f"seller-{index:04d}",
        )

    return _make


@pytest.fixture
def ledger() -> Ledger:
    return Ledger({"alice": 100, "bob": 0, "carol": 0})
