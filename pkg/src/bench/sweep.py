"""
Seller-count sweep comparing the aggregated protocol with the DCDH baseline.

Yotta cost per point is what the buyer and the contract spend once offers
exist: aggregate verification, escrow deployment with key settlement, and
delivery. Proving and aggregation are prover-side and reported as separate
phases outside the total. The DCDH cost is the whole pairwise session.
"""

import csv
import math
import time
from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence, Union

from ..baseline.dcdh import PHASES as DCDH_PHASES
from ..baseline.dcdh import VERIFICATION_PHASES, run_baseline
from ..ledger.chain import Ledger
from ..ledger.models import EscrowMode
from ..market.buyer import buyer_finalize, buyer_fund, buyer_verify_offers
from ..market.datasets import synthetic_item
from ..market.models import PurchaseOrder, VerificationMode
from ..market.seller import seller_claim, seller_prepare
from ..proof.backend import RecheckBackend
from ..storage.content_store import ContentStore
from ..utils.config import get_config
from ..utils.errors import IntegrityFailure, InvalidConfig
from ..utils.logging import AgentLogger
from ..utils.opcount import counting, format_ops
from ..utils.rng import RunRng

CSV_HEADER = ["system", "n_sellers", "phase", "wall_ms", "ops", "proof_bytes"]
PLOT_HEADER = ["n_sellers", "yotta_ms", "dcdh_ms", "log10_yotta_ms", "log10_dcdh_ms", "speedup"]

YOTTA_TOTAL_PHASES = ("verify", "settle", "deliver")
_VERIFY_OP_NAMES = ("group_exps", "hash_calls", "verify_calls")

logger = AgentLogger("bench")


@dataclass
class SweepRow:
    system: str
    n_sellers: int
    phase: str
    wall_ms: float
    ops: dict[str, int] = field(default_factory=dict)
    proof_bytes: int = 0

    def to_csv(self) -> list:
        return [self.system, self.n_sellers, self.phase, f"{self.wall_ms:.3f}", format_ops(self.ops), self.proof_bytes]


def _total_row(system: str, n: int, rows: Sequence[SweepRow], phases: Sequence[str], proof_bytes: int) -> SweepRow:
    ops = Counter()
    for row in rows:
        if row.phase in phases:
            ops.update(row.ops)
    return SweepRow(
        system, n, "total",
        sum(row.wall_ms for row in rows if row.phase in phases),
        dict(sorted(ops.items())),
        proof_bytes,
    )


@dataclass
class SweepResult:
    sweep: list[int]
    item_size: int
    seed: int
    parallel_baseline: bool = False
    rows: list[SweepRow] = field(default_factory=list)

    def row(self, system: str, n: int, phase: str) -> SweepRow:
        for row in self.rows:
            if row.system == system and row.n_sellers == n and row.phase == phase:
                return row
        raise KeyError((system, n, phase))

    def total_ms(self, system: str, n: int) -> float:
        return self.row(system, n, "total").wall_ms

    def speedup(self, n: int) -> float:
        yotta = self.total_ms("yotta", n)
        return self.total_ms("dcdh", n) / yotta if yotta > 0 else math.inf

    def verification_ops(self, system: str, n: int) -> int:
        """Group exponentiations, hash calls and verify calls the buyer spends checking sellers."""
        phases = ("verify",) if system == "yotta" else VERIFICATION_PHASES
        return sum(
            self.row(system, n, phase).ops.get(name, 0)
            for phase in phases
            for name in _VERIFY_OP_NAMES
        )

    def write_csv(self, path: Union[str, Path]):
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(CSV_HEADER)
            for row in self.rows:
                writer.writerow(row.to_csv())

    def write_plot_csv(self, path: Union[str, Path]):
        """Totals and their base-10 logarithms, for a log-scale chart."""
        with open(path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(PLOT_HEADER)
            for n in self.sweep:
                yotta, dcdh = self.total_ms("yotta", n), self.total_ms("dcdh", n)
                writer.writerow([
                    n,
                    f"{yotta:.3f}",
                    f"{dcdh:.3f}",
                    f"{math.log10(yotta):.4f}" if yotta > 0 else "",
                    f"{math.log10(dcdh):.4f}" if dcdh > 0 else "",
                    f"{self.speedup(n):.2f}",
                ])


def plot_path(out: Union[str, Path]) -> Path:
    out = Path(out)
    return out.with_name(out.stem + ".plot.csv")


def run_yotta_point(
    n: int,
    item_size: int,
    seed: int,
    eval_id: Optional[str] = None,
    repeats: int = 1,
    mode: EscrowMode = EscrowMode.COMMITMENT_ONLY,
) -> list[SweepRow]:
    """
    One buyer purchasing one item from each of ``n`` honest sellers.

    Measured phases run ``repeats`` times on fresh ledgers and keep the
    fastest wall time; operation counts are identical across repeats.
    """
    config = get_config().bench
    eval_id = eval_id or config.eval_id
    store = ContentStore()
    backend = RecheckBackend.from_seed(seed, store)
    sellers = [f"seller-{s:04d}" for s in range(n)]

    start = time.perf_counter()
    with counting() as ops:
        listings = [
            seller_prepare(
                synthetic_item(RunRng(seed, 11, 0, s), item_size), eval_id, 1, RunRng(seed, 11, 1, s),
                store=store, backend=backend, seller=name,
            )
            for s, name in enumerate(sellers)
        ]
    prove = SweepRow("yotta", n, "prove", (time.perf_counter() - start) * 1000, ops.snapshot(),
                     max(listing.offer.proof.size_bytes for listing in listings))
    offers = [listing.offer for listing in listings]

    start = time.perf_counter()
    with counting() as ops:
        aggregate = backend.aggregate([(offer.statement(), offer.proof) for offer in offers])
    aggregate_row = SweepRow("yotta", n, "aggregate", (time.perf_counter() - start) * 1000, ops.snapshot(),
                             aggregate.size_bytes)

    best: dict[str, SweepRow] = {}
    for _ in range(repeats):
        ledger = Ledger({"buyer": n, **{name: 0 for name in sellers}})

        accepted, rejected, cost = buyer_verify_offers(offers, VerificationMode.AGGREGATED, backend, aggregate)
        measured = [SweepRow("yotta", n, "verify", cost.wall_ms, cost.ops, aggregate.size_bytes)]

        start = time.perf_counter()
        with counting() as ops:
            order = PurchaseOrder.at_asking_price("buyer", accepted, config.deadline_blocks, mode.value)
            contract_id = buyer_fund(ledger, order)
            for listing in listings:
                seller_claim(ledger, contract_id, listing.offer.seller, listing.key)
        measured.append(SweepRow("yotta", n, "settle", (time.perf_counter() - start) * 1000, ops.snapshot()))

        start = time.perf_counter()
        with counting() as ops:
            deliveries = buyer_finalize(ledger, store, contract_id, accepted)
        measured.append(SweepRow("yotta", n, "deliver", (time.perf_counter() - start) * 1000, ops.snapshot()))

        if rejected or sum(d.delivered for d in deliveries) != n:
            raise IntegrityFailure("evaluate", detail=f"benchmark delivered {len(deliveries)} of {n} honest offers")
        for row in measured:
            if row.phase not in best or row.wall_ms < best[row.phase].wall_ms:
                best[row.phase] = row

    rows = [prove, aggregate_row] + [best[phase] for phase in YOTTA_TOTAL_PHASES]
    rows.append(_total_row("yotta", n, rows, YOTTA_TOTAL_PHASES, aggregate.size_bytes))
    return rows


def run_dcdh_point(n: int, item_size: int, seed: int, parallel: bool = False) -> list[SweepRow]:
    report = run_baseline(n, item_size, seed, parallel=parallel)
    combined = report.combined()
    rows = [
        SweepRow("dcdh", n, phase, combined.phase_ms.get(phase, 0.0), dict(sorted(combined.phase_ops.get(phase, {}).items())))
        for phase in DCDH_PHASES
    ]
    total = _total_row("dcdh", n, rows, DCDH_PHASES, 0)
    if parallel:
        total.wall_ms = report.elapsed_ms
    rows.append(total)
    return rows


def run_sweep(
    sweep: Sequence[int],
    item_size: Optional[int] = None,
    seed: Optional[int] = None,
    include_10k: bool = False,
    parallel_baseline: bool = False,
    repeats: Optional[int] = None,
) -> SweepResult:
    config = get_config().bench
    item_size = config.item_size if item_size is None else item_size
    seed = config.seed if seed is None else seed
    repeats = config.repeats if repeats is None else repeats

    points = list(sweep)
    if include_10k and 10000 not in points:
        points.append(10000)
    if not points or any(n < 1 for n in points) or points != sorted(set(points)):
        raise InvalidConfig("sweep must be a non-empty, strictly ascending list of positive seller counts")
    if item_size < 1:
        raise InvalidConfig("item size must be positive")
    if repeats < 1:
        raise InvalidConfig("repeats must be at least 1")

    result = SweepResult(sweep=points, item_size=item_size, seed=seed, parallel_baseline=parallel_baseline)
    for n in points:
        logger.info(f"Sweep point n={n}")
        result.rows.extend(run_yotta_point(n, item_size, seed, repeats=repeats))
        result.rows.extend(run_dcdh_point(n, item_size, seed, parallel=parallel_baseline))
        logger.success(f"n={n}: speedup {result.speedup(n):.1f}x")
    if parallel_baseline:
        logger.warning("Baseline pairs ran in parallel; DCDH totals are observed wall time")
    return result
