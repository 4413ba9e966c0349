#!/usr/bin/env python3
"""
Yotta Data Market - Main Entry Point

Usage:
    python run.py run --config scenarios/honest_1x10.yaml     # Run one seeded market scenario
    python run.py bench --sweep 10,100,1000 --out bench.csv   # Scaling sweep against DCDH
    python run.py verify-log data/ledger.ndjson               # Replay and audit a ledger log
    python run.py --help                                      # Show help
"""

import argparse
import sys
from pathlib import Path

# Add src to path
sys.path.insert(0, str(Path(__file__).parent))

from rich.console import Console

console = Console()


def print_banner():
    """Print the application banner."""
    banner = """
╔═══════════════════════════════════════════════════════════════╗
║       🔐 YOTTA TRUSTLESS DATA MARKET 📦                       ║
║                                                               ║
║   Commit, prove, escrow, reveal: fair exchange of data        ║
║                                                               ║
║   Actors: Sellers | Buyers | Escrow Ledger | Coordinator      ║
╚═══════════════════════════════════════════════════════════════╝
    """
    console.print(banner, style="bold cyan")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Yotta trustless data market",
        formatter_class=argparse.RawDescriptionHelpFormatter
    )

    subparsers = parser.add_subparsers(dest="command", help="Available commands")

    # Run command
    run_parser = subparsers.add_parser("run", help="Run one seeded market scenario")
    run_parser.add_argument(
        "-c", "--config",
        type=str,
        default=None,
        help="Scenario YAML file (default: scenario section of config.yaml)"
    )
    run_parser.add_argument("--seed", type=int, default=None, help="Override the scenario seed")
    run_parser.add_argument(
        "--mode",
        choices=["commitment-only", "full-decrypt"],
        default=None,
        help="Escrow key check mode"
    )
    run_parser.add_argument(
        "--verify",
        choices=["individual", "aggregated"],
        default=None,
        help="Buyer-side proof verification mode"
    )
    run_parser.add_argument("--out", type=str, default=None, help="Output directory (default: data/)")
    run_parser.add_argument(
        "--store-dir",
        type=str,
        default=None,
        help="Directory for a file-backed content store (also YOTTA_STORE_DIR)"
    )
    run_parser.add_argument("-q", "--quiet", action="store_true", help="Hide per-phase output")

    # Bench command
    bench_parser = subparsers.add_parser("bench", help="Sweep seller counts against the DCDH baseline")
    bench_parser.add_argument(
        "--sweep",
        type=str,
        default=None,
        help="Comma-separated seller counts (default: 10,100,1000)"
    )
    bench_parser.add_argument("--include-10k", action="store_true", help="Append the 10000-seller point")
    bench_parser.add_argument("--item-size", type=int, default=None, help="Bytes per item (default: 1024)")
    bench_parser.add_argument("--seed", type=int, default=None, help="Benchmark seed")
    bench_parser.add_argument("--repeats", type=int, default=None, help="Measured repeats per Yotta point")
    bench_parser.add_argument(
        "--parallel-baseline",
        action="store_true",
        help="Run DCDH pairs on a thread pool and report observed wall time"
    )
    bench_parser.add_argument("--out", type=str, required=True, help="Results CSV path")

    # Verify-log command
    verify_parser = subparsers.add_parser("verify-log", help="Replay and audit a ledger log")
    verify_parser.add_argument("file", type=str, help="NDJSON ledger log")

    return parser


def main(argv=None) -> int:
    """Main entry point."""
    parser = build_parser()
    args = parser.parse_args(argv)

    from src.cli import cmd_bench, cmd_run, cmd_verify_log, parse_sweep
    from src.utils.config import get_config
    from src.utils.errors import InvalidConfig
    from src.utils.logging import setup_logging

    setup_logging()

    if args.command == "run":
        print_banner()
        overrides = {"seed": args.seed, "ledger_mode": args.mode, "verification": args.verify}
        return cmd_run(args.config, overrides, args.out, args.store_dir, verbose=not args.quiet)
    elif args.command == "bench":
        print_banner()
        try:
            sweep = parse_sweep(args.sweep) if args.sweep else get_config().bench.sweep
        except InvalidConfig as exc:
            console.print(f"[bold red]Invalid arguments:[/] {exc}")
            return 2
        return cmd_bench(
            sweep,
            args.out,
            include_10k=args.include_10k,
            item_size=args.item_size,
            seed=args.seed,
            parallel_baseline=args.parallel_baseline,
            repeats=args.repeats,
        )
    elif args.command == "verify-log":
        return cmd_verify_log(args.file)
    else:
        parser.print_help()
        console.print("\n[yellow]Example usage:[/]")
        console.print("  python run.py run --config scenarios/honest_1x10.yaml")
        console.print("  python run.py bench --sweep 10,100 --out results/bench.csv")
        console.print("  python run.py verify-log data/ledger.ndjson")
        return 0


if __name__ == "__main__":
    sys.exit(main())
