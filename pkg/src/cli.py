"""
Command implementations behind ``run.py``.

Each command returns a process exit code:

    0  success
    2  configuration or argument error
    3  fair-exchange or conservation violation during a run
    4  ledger log failed replay
    5  run aborted by a store, crypto, proof or ledger error
"""

from pathlib import Path
from typing import Optional, Sequence

from .agents.coordinator import MarketCoordinator
from .bench.sweep import plot_path, run_sweep
from .ledger.chain import Ledger
from .storage.content_store import open_store
from .utils.config import get_config, load_scenario
from .utils.errors import CorruptLog, InvalidConfig, YottaError
from .utils.logging import ArtifactWriter, console, log_report_table, log_sweep_table

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_VIOLATION = 3
EXIT_CORRUPT_LOG = 4
EXIT_RUN_FAILED = 5


def parse_sweep(text: str) -> list[int]:
    """``"10,100,1000"`` -> ``[10, 100, 1000]``; anything else is InvalidConfig."""
    try:
        points = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise InvalidConfig(f"sweep must be comma-separated integers, got {text!r}") from exc
    if not points:
        raise InvalidConfig("sweep is empty")
    return points


def cmd_run(
    config_path: Optional[str] = None,
    overrides: Optional[dict] = None,
    out: Optional[str] = None,
    store_dir: Optional[str] = None,
    verbose: bool = True,
) -> int:
    """Run one scenario and write its report, offer table and ledger log under ``out``."""
    try:
        scenario = load_scenario(config_path, overrides)
    except InvalidConfig as exc:
        console.print(f"[bold red]Invalid configuration:[/] {exc}")
        return EXIT_CONFIG

    try:
        store = open_store(store_dir or get_config().store.resolved_dir)
        coordinator = MarketCoordinator(scenario, store, verbose=verbose)
        report = coordinator.run_blocking()
    except InvalidConfig as exc:
        console.print(f"[bold red]Invalid configuration:[/] {exc}")
        return EXIT_CONFIG
    except YottaError as exc:
        console.print(f"[bold red]Run aborted:[/] {type(exc).__name__}: {exc}")
        return EXIT_RUN_FAILED

    writer = ArtifactWriter(out or get_config().system.data_dir)
    writer.write_report(report)
    writer.write_log(coordinator.ledger.log)

    if verbose:
        console.rule("[bold cyan]Run Complete[/]")
        log_report_table(report, title=f"Market Outcomes: {scenario.name}")
        console.print(f"[bold]Report:[/] {writer.report_file}")
        console.print(f"[bold]Ledger log:[/] {writer.log_file}")

    if not report.safe:
        for violation in report.violations:
            console.print(f"[bold red]violation:[/] {violation}")
        if not report.conservation:
            console.print("[bold red]violation:[/] token conservation does not hold")
        return EXIT_VIOLATION
    return EXIT_OK


def cmd_bench(
    sweep: Sequence[int],
    out: str,
    include_10k: bool = False,
    item_size: Optional[int] = None,
    seed: Optional[int] = None,
    parallel_baseline: bool = False,
    repeats: Optional[int] = None,
) -> int:
    """Sweep seller counts and write the results CSV plus its log-scale plot companion."""
    try:
        result = run_sweep(
            sweep,
            item_size=item_size,
            seed=seed,
            include_10k=include_10k,
            parallel_baseline=parallel_baseline,
            repeats=repeats,
        )
    except InvalidConfig as exc:
        console.print(f"[bold red]Invalid arguments:[/] {exc}")
        return EXIT_CONFIG

    out_path = Path(out)
    out_path.parent.mkdir(parents=True, exist_ok=True)
    result.write_csv(out_path)
    result.write_plot_csv(plot_path(out_path))

    log_sweep_table(result)
    console.print(f"[bold]Results:[/] {out_path}")
    console.print(f"[bold]Plot data:[/] {plot_path(out_path)}")
    return EXIT_OK


def cmd_verify_log(path: str) -> int:
    """Replay a ledger log; exit 4 names the first record that does not reproduce."""
    try:
        state = Ledger.verify_log(path)
    except CorruptLog as exc:
        console.print(f"[bold red]Log invalid at index {exc.index}:[/] {exc.reason}")
        return EXIT_CORRUPT_LOG
    except (OSError, UnicodeDecodeError) as exc:
        console.print(f"[bold red]Cannot read log:[/] {exc}")
        return EXIT_CORRUPT_LOG

    console.print(
        f"[bold green]Log valid:[/] {len(state.log)} records, height {state.height}, "
        f"{state.total_supply()} tokens conserved"
    )
    return EXIT_OK
