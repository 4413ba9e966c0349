"""Tests for the scaling sweep and the command-line surface."""

import csv
import json
from pathlib import Path

import pytest

import run
from src.bench import CSV_HEADER, PLOT_HEADER, plot_path, run_sweep
from src.cli import (
    EXIT_CONFIG,
    EXIT_CORRUPT_LOG,
    EXIT_OK,
    EXIT_RUN_FAILED,
    EXIT_VIOLATION,
    cmd_bench,
    cmd_run,
    cmd_verify_log,
    parse_sweep,
)
from src.utils.errors import InvalidConfig, StoreIntegrityError

SCENARIOS = Path(__file__).parent.parent / "scenarios"


@pytest.fixture(scope="module")
def small_sweep():
    return run_sweep([1, 2, 4], item_size=256, seed=3, repeats=1)


def test_sweep_rows_cover_every_point(small_sweep):
    for n in (1, 2, 4):
        for phase in ("prove", "aggregate", "verify", "settle", "deliver", "total"):
            small_sweep.row("yotta", n, phase)
        for phase in ("key_agreement", "transfer", "verify", "total"):
            small_sweep.row("dcdh", n, phase)
    with pytest.raises(KeyError):
        small_sweep.row("yotta", 3, "total")


def test_verification_ops_constant_versus_linear(small_sweep):
    assert [small_sweep.verification_ops("yotta", n) for n in (1, 2, 4)] == [6, 6, 6]
    assert [small_sweep.verification_ops("dcdh", n) for n in (1, 2, 4)] == [7, 14, 28]


def test_proof_bytes_do_not_grow(small_sweep):
    sizes = {small_sweep.row("yotta", n, "aggregate").proof_bytes for n in (1, 2, 4)}
    assert len(sizes) == 1


def test_sweep_counts_are_deterministic(small_sweep):
    again = run_sweep([1, 2, 4], item_size=256, seed=3, repeats=1)
    assert [(r.system, r.n_sellers, r.phase, r.ops) for r in again.rows] == [
        (r.system, r.n_sellers, r.phase, r.ops) for r in small_sweep.rows
    ]


def test_sweep_csv_files(small_sweep, tmp_path):
    out = tmp_path / "bench.csv"
    small_sweep.write_csv(out)
    small_sweep.write_plot_csv(plot_path(out))

    rows = list(csv.reader(out.open()))
    assert rows[0] == CSV_HEADER
    assert all(len(row) == len(CSV_HEADER) for row in rows[1:])
    assert len(rows) - 1 == len(small_sweep.rows)

    plot = list(csv.reader(plot_path(out).open()))
    assert plot[0] == PLOT_HEADER
    assert [int(row[0]) for row in plot[1:]] == [1, 2, 4]
    assert plot_path(out).name == "bench.plot.csv"


@pytest.mark.parametrize("sweep", [[], [10, 5], [0], [5, 5]])
def test_bad_sweeps(sweep, tmp_path):
    with pytest.raises(InvalidConfig):
        run_sweep(sweep, item_size=16, repeats=1)
    assert cmd_bench(sweep, str(tmp_path / "b.csv"), item_size=16, repeats=1) == EXIT_CONFIG


@pytest.mark.parametrize("kwargs", [{"item_size": 0}, {"repeats": 0}])
def test_bad_sweep_arguments(kwargs):
    settings = {"item_size": 16, "repeats": 1, **kwargs}
    with pytest.raises(InvalidConfig):
        run_sweep([1], **settings)


def test_parse_sweep():
    assert parse_sweep("10,100, 1000") == [10, 100, 1000]
    for text in ("", "10,ten", ","):
        with pytest.raises(InvalidConfig):
            parse_sweep(text)


def test_cmd_bench_writes_results(tmp_path):
    out = tmp_path / "nested" / "bench.csv"
    assert cmd_bench([1, 2], str(out), item_size=64, seed=1, repeats=1) == EXIT_OK
    assert out.exists()
    assert plot_path(out).exists()


# run


def test_cmd_run_writes_artifacts(tmp_path):
    code = cmd_run(str(SCENARIOS / "honest_1x10.yaml"), out=str(tmp_path), verbose=False)
    assert code == EXIT_OK
    report = json.loads((tmp_path / "market_report.json").read_text())
    assert report["seed"] == 7
    assert len(report["records"]) == 10
    assert (tmp_path / "offers.csv").exists()
    assert cmd_verify_log(str(tmp_path / "ledger.ndjson")) == EXIT_OK


def test_cmd_run_with_file_store(tmp_path):
    store_dir = tmp_path / "store"
    code = cmd_run(str(SCENARIOS / "honest_1x10.yaml"), out=str(tmp_path / "out"),
                   store_dir=str(store_dir), verbose=False)
    assert code == EXIT_OK
    assert any(store_dir.iterdir())


def test_cmd_run_bad_config(tmp_path):
    assert cmd_run(str(tmp_path / "missing.yaml"), out=str(tmp_path), verbose=False) == EXIT_CONFIG
    bad = tmp_path / "bad.yaml"
    bad.write_text("sellers: -3\n")
    assert cmd_run(str(bad), out=str(tmp_path), verbose=False) == EXIT_CONFIG


def test_cmd_run_reports_violations(tmp_path, monkeypatch):
    monkeypatch.setattr("src.agents.coordinator.check_fair_exchange", lambda report, ledger: ["forced"])
    code = cmd_run(str(SCENARIOS / "honest_1x10.yaml"), out=str(tmp_path), verbose=False)
    assert code == EXIT_VIOLATION


def test_cmd_run_reports_aborted_runs(tmp_path, monkeypatch):
    def broken_run(self):
        raise StoreIntegrityError("distinct payloads collided")

    monkeypatch.setattr("src.cli.MarketCoordinator.run_blocking", broken_run)
    code = cmd_run(str(SCENARIOS / "honest_1x10.yaml"), out=str(tmp_path), verbose=False)
    assert code == EXIT_RUN_FAILED
    assert not (tmp_path / "ledger.ndjson").exists()


def test_cmd_run_twice_on_one_store_directory(tmp_path):
    # The tampering seller leaves a damaged object behind for the second run.
    overrides = {"adversaries": {"store_tamper": 20}}
    store_dir = str(tmp_path / "store")
    for attempt in ("first", "second"):
        code = cmd_run(str(SCENARIOS / "adversary_mix.yaml"), overrides,
                       out=str(tmp_path / attempt), store_dir=store_dir, verbose=False)
        assert code == EXIT_OK
    first = json.loads((tmp_path / "first" / "market_report.json").read_text())
    second = json.loads((tmp_path / "second" / "market_report.json").read_text())
    assert first["records"] == second["records"]


# verify-log


@pytest.fixture
def log_file(tmp_path):
    assert cmd_run(str(SCENARIOS / "adversary_mix.yaml"), out=str(tmp_path), verbose=False) == EXIT_OK
    return tmp_path / "ledger.ndjson"


def test_verify_log_truncated(log_file):
    text = log_file.read_text()
    log_file.write_text(text[: len(text) // 2])
    assert cmd_verify_log(str(log_file)) == EXIT_CORRUPT_LOG


@pytest.mark.parametrize("dropped", [1, 2])
def test_verify_log_cut_at_record_boundary(log_file, dropped):
    lines = log_file.read_text().splitlines()
    log_file.write_text("\n".join(lines[:-dropped]) + "\n")
    assert cmd_verify_log(str(log_file)) == EXIT_CORRUPT_LOG


def test_verify_log_mutated(log_file):
    lines = log_file.read_text().splitlines()
    record = json.loads(lines[1])
    record["payload"]["entries"][0]["amount"] += 1
    lines[1] = json.dumps(record)
    log_file.write_text("\n".join(lines) + "\n")
    assert cmd_verify_log(str(log_file)) == EXIT_CORRUPT_LOG


def test_verify_log_missing(tmp_path):
    assert cmd_verify_log(str(tmp_path / "none.ndjson")) == EXIT_CORRUPT_LOG


def test_main_dispatch(log_file, tmp_path):
    assert run.main(["verify-log", str(log_file)]) == EXIT_OK
    assert run.main(["bench", "--sweep", "5,1", "--out", str(tmp_path / "b.csv")]) == EXIT_CONFIG
    assert run.main(["bench", "--sweep", "x", "--out", str(tmp_path / "b.csv")]) == EXIT_CONFIG
    assert run.main([]) == EXIT_OK
