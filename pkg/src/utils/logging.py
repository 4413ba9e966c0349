"""
Logging utilities with Rich console output.
"""

import csv
import logging
from pathlib import Path
from typing import TYPE_CHECKING, Iterable, Optional

from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from .config import get_config

if TYPE_CHECKING:
    from ..bench.sweep import SweepResult
    from ..ledger.models import Transaction
    from ..market.models import MarketReport


# Rich console for beautiful output
console = Console()


def setup_logging(log_level: Optional[str] = None) -> logging.Logger:
    """Set up logging with Rich handler."""
    config = get_config()
    level = log_level or config.system.log_level

    # Configure root logger
    logging.basicConfig(
        level=level,
        format="%(message)s",
        datefmt="[%X]",
        handlers=[RichHandler(console=console, rich_tracebacks=True, markup=True)],
        force=True,
    )

    logger = logging.getLogger("yotta")
    logger.setLevel(level)

    return logger


def get_logger(name: str = "yotta") -> logging.Logger:
    """Get a logger instance."""
    return logging.getLogger(name)


class AgentLogger:
    """Role-tagged logger for market actors."""

    ROLE_COLORS = {
        "seller": "cyan",
        "buyer": "yellow",
        "ledger": "green",
        "coordinator": "magenta",
        "bench": "blue",
        "baseline": "red",
    }

    def __init__(self, agent_name: str, role: Optional[str] = None):
        self.agent_name = agent_name
        self.role = (role or agent_name).lower()
        self.color = self.ROLE_COLORS.get(self.role, "white")
        self.logger = get_logger(f"agent.{self.role}")

    def _tag(self, marker: str = "") -> str:
        return f"[bold {self.color}]\\[{self.agent_name.upper()}][/]{marker} "

    def debug(self, message: str):
        self.logger.debug(self._tag() + message)

    def info(self, message: str):
        self.logger.info(self._tag() + message)

    def warning(self, message: str):
        self.logger.warning(self._tag(" ⚠️") + f"[yellow]{message}[/]")

    def error(self, message: str):
        self.logger.error(self._tag(" ❌") + f"[red]{message}[/]")

    def success(self, message: str):
        self.logger.info(self._tag(" ✅") + f"[green]{message}[/]")


def log_report_table(report: "MarketReport", title: str = "Market Outcomes"):
    """Display per-outcome counts and token flows of a market run."""
    summary = report.summary()

    table = Table(title=title, show_header=True, header_style="bold cyan")
    table.add_column("Outcome", style="cyan")
    table.add_column("Offers", justify="right")
    table.add_column("Tokens", justify="right")

    for outcome, count in summary["outcomes"].items():
        table.add_row(outcome, str(count), str(summary["tokens"].get(outcome, 0)))
    table.add_row("[bold]total[/]", str(summary["offers"]), str(sum(summary["tokens"].values())))

    console.print(table)

    phases = Table(title="Phase timings", show_header=True, header_style="bold magenta")
    phases.add_column("Phase", style="magenta")
    phases.add_column("Wall ms", justify="right")
    phases.add_column("Operations")
    for phase, wall_ms in report.timings.items():
        ops = report.ops.get(phase, {})
        phases.add_row(phase, f"{wall_ms:.2f}", ", ".join(f"{k}={v}" for k, v in ops.items()))
    console.print(phases)


def log_sweep_table(result: "SweepResult"):
    """Display totals and speedup per sweep point."""
    table = Table(title="Yotta vs DCDH", show_header=True, header_style="bold cyan")
    table.add_column("Sellers", justify="right", style="cyan")
    table.add_column("Yotta ms", justify="right")
    table.add_column("DCDH ms", justify="right")
    table.add_column("Speedup", justify="right", style="green")
    table.add_column("Yotta verify ops", justify="right")
    table.add_column("DCDH verify ops", justify="right")

    for n in result.sweep:
        table.add_row(
            str(n),
            f"{result.total_ms('yotta', n):.2f}",
            f"{result.total_ms('dcdh', n):.2f}",
            f"{result.speedup(n):.1f}x",
            str(result.verification_ops("yotta", n)),
            str(result.verification_ops("dcdh", n)),
        )

    console.print(table)


class ArtifactWriter:
    """Persists the artefacts of a market run into one directory."""

    def __init__(self, out_dir: str = "data"):
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.report_file = self.out_dir / "market_report.json"
        self.log_file = self.out_dir / "ledger.ndjson"
        self.offers_file = self.out_dir / "offers.csv"

    def write_report(self, report: "MarketReport"):
        self.report_file.write_text(report.model_dump_json(indent=2))

        with open(self.offers_file, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["buyer", "seller", "item", "outcome", "amount", "content_hash", "detail"])
            for rec in report.records:
                writer.writerow(
                    [rec.buyer, rec.seller, rec.item, rec.outcome.value, rec.amount, rec.content_hash, rec.detail]
                )

    def write_log(self, log: Iterable["Transaction"]):
        from ..ledger.chain import dump_log

        self.log_file.write_text(dump_log(log))
