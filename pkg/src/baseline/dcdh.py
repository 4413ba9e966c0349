"""
Pairwise Diffie-Hellman trading baseline (DCDH).

Every buyer-seller pair runs its own interactive exchange with no
aggregation:

    key_agreement  both parties draw ephemeral keys, validate the peer's
                   element, compute the shared element and derive a session key
    transfer       the seller announces the item digest and encrypts the item
    verify         the buyer decrypts and checks the digest

All of it sits on the critical path of the trade, so the whole session is
the baseline's cost. Operation counts are kept per phase and per role.
"""

import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Iterator, Optional

from ..crypto.group import GroupElement, dh_keypair, dh_shared
from ..crypto.primitives import (
    NONCE_BYTES,
    Ciphertext,
    SymmetricKey,
    decrypt,
    derive_session_key,
    digest,
    encrypt,
)
from ..market.datasets import synthetic_item
from ..utils.errors import AuthFailure, InvalidConfig, KeyAgreementMismatch
from ..utils.logging import AgentLogger
from ..utils.opcount import counting
from ..utils.rng import RunRng

PHASES = ("key_agreement", "transfer", "verify")
# Phases the buyer must finish before trusting the item.
VERIFICATION_PHASES = ("key_agreement", "verify")


@dataclass
class PartyState:
    """One side of a session; the ephemeral key is drawn from ``rng`` when the session starts."""

    name: str
    rng: RunRng
    scalar: Optional[int] = field(default=None, repr=False)
    element: Optional[GroupElement] = None

    def fresh_keypair(self) -> GroupElement:
        self.scalar, self.element = dh_keypair(self.rng)
        return self.element


@dataclass
class CostRecord:
    """Wall time and operation counts of one session, per phase and per role."""

    phase_ms: dict[str, float] = field(default_factory=dict)
    phase_ops: dict[str, Counter] = field(default_factory=dict)
    role_ops: dict[str, Counter] = field(default_factory=dict)

    @contextmanager
    def measure(self, phase: str, role: str) -> Iterator[None]:
        with counting() as ops:
            start = time.perf_counter()
            yield
            elapsed = (time.perf_counter() - start) * 1000
        snapshot = ops.snapshot()
        self.phase_ms[phase] = self.phase_ms.get(phase, 0.0) + elapsed
        self.phase_ops.setdefault(phase, Counter()).update(snapshot)
        self.role_ops.setdefault(role, Counter()).update(snapshot)

    @property
    def total_ms(self) -> float:
        return sum(self.phase_ms.values())

    def total_ops(self) -> dict[str, int]:
        total = Counter()
        for ops in self.phase_ops.values():
            total.update(ops)
        return dict(sorted(total.items()))

    def merge(self, other: "CostRecord"):
        for phase, ms in other.phase_ms.items():
            self.phase_ms[phase] = self.phase_ms.get(phase, 0.0) + ms
        for phase, ops in other.phase_ops.items():
            self.phase_ops.setdefault(phase, Counter()).update(ops)
        for role, ops in other.role_ops.items():
            self.role_ops.setdefault(role, Counter()).update(ops)


@dataclass
class PairwiseSession:
    buyer: PartyState
    seller: PartyState
    shared: GroupElement
    session_key: SymmetricKey = field(repr=False)
    announced_digest: bytes = b""
    delivered: bool = False


def run_pair(
    buyer_state: PartyState,
    seller_state: PartyState,
    item: bytes,
    tamper: bool = False,
) -> tuple[Optional[bytes], CostRecord, PairwiseSession]:
    """
    One full DCDH session for one item.

    Returns the delivered bytes (None when the digest check fails), the
    session cost and the session itself. ``tamper`` makes the seller encrypt
    a modified item after announcing the digest of the original.
    """
    cost = CostRecord()

    with cost.measure("key_agreement", "seller"):
        seller_public = seller_state.fresh_keypair()
    with cost.measure("key_agreement", "buyer"):
        buyer_public = buyer_state.fresh_keypair()

    # Each side validates the element it received before using it.
    with cost.measure("key_agreement", "seller"):
        received = GroupElement(buyer_public.value)
        seller_shared = dh_shared(seller_state.scalar, received)
        seller_key = derive_session_key(seller_shared.to_bytes(), b"dcdh")
    with cost.measure("key_agreement", "buyer"):
        received = GroupElement(seller_public.value)
        buyer_shared = dh_shared(buyer_state.scalar, received)
        buyer_key = derive_session_key(buyer_shared.to_bytes(), b"dcdh")

    if buyer_key != seller_key:
        raise KeyAgreementMismatch(f"{buyer_state.name} and {seller_state.name} derived different keys")

    with cost.measure("transfer", "seller"):
        announced = digest(item)
        sent = item if not tamper else bytes([item[0] ^ 0x01]) + item[1:]
        ciphertext = encrypt(seller_key, sent, seller_state.rng.bytes(NONCE_BYTES))

    with cost.measure("verify", "buyer"):
        try:
            received_item = decrypt(buyer_key, Ciphertext.from_bytes(ciphertext.to_bytes()))
        except AuthFailure:
            received_item = None
        delivered = received_item is not None and digest(received_item) == announced

    session = PairwiseSession(
        buyer=buyer_state,
        seller=seller_state,
        shared=buyer_shared,
        session_key=buyer_key,
        announced_digest=announced,
        delivered=delivered,
    )
    return (received_item if delivered else None), cost, session


@dataclass
class BaselineReport:
    n_sellers: int
    item_size: int
    seed: int
    parallel: bool = False
    sessions: list[CostRecord] = field(default_factory=list)
    delivered: int = 0
    elapsed_ms: float = 0.0

    @property
    def label(self) -> str:
        return "dcdh (parallel pairs)" if self.parallel else "dcdh"

    def combined(self) -> CostRecord:
        total = CostRecord()
        for session in self.sessions:
            total.merge(session)
        return total

    @property
    def total_ms(self) -> float:
        """Sum of session costs; with parallel pairs ``elapsed_ms`` is the observed wall time."""
        return sum(session.total_ms for session in self.sessions)

    def total_ops(self) -> dict[str, int]:
        return self.combined().total_ops()

    def verification_ops(self) -> int:
        combined = self.combined()
        return sum(
            combined.phase_ops.get(phase, Counter()).get(name, 0)
            for phase in VERIFICATION_PHASES
            for name in ("group_exps", "hash_calls", "verify_calls")
        )


def _session(seed: int, index: int, item_size: int) -> tuple[bool, CostRecord]:
    rng = RunRng(seed, 7, index)
    item = synthetic_item(rng.child(0), item_size)
    buyer = PartyState("buyer", rng.child(1))
    seller = PartyState(f"seller-{index:04d}", rng.child(2))
    data, cost, _ = run_pair(buyer, seller, item)
    return data == item, cost


def run_baseline(n_sellers: int, item_size: int, seed: int, parallel: bool = False) -> BaselineReport:
    """
    ``n_sellers`` independent sessions, one item each.

    Sequential on the calling thread unless ``parallel`` is set; the report
    is labelled accordingly.
    """
    if n_sellers < 1:
        raise InvalidConfig("the baseline needs at least one seller")
    if item_size < 1:
        raise InvalidConfig("item size must be positive")

    logger = AgentLogger("baseline")
    report = BaselineReport(n_sellers=n_sellers, item_size=item_size, seed=seed, parallel=parallel)

    start = time.perf_counter()
    if parallel:
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda i: _session(seed, i, item_size), range(n_sellers)))
    else:
        results = [_session(seed, i, item_size) for i in range(n_sellers)]
    report.elapsed_ms = (time.perf_counter() - start) * 1000

    for ok, cost in results:
        report.sessions.append(cost)
        report.delivered += int(ok)

    logger.info(f"{report.label}: {n_sellers} sessions, {report.delivered} delivered, {report.total_ms:.1f} ms")
    return report
