import csv
import io
import json

import pytest

from bench import CSV_COLUMNS, OPERATIONS, BenchReport, BenchRunner, OperationStats
from cli import main
from config import Settings
from crypto.pairing import BACKEND
from ledger.transaction import ElementCount


def synthetic_report() -> BenchReport:
    report = BenchReport(amount=10, iterations=3, range_bits=33, element_count=ElementCount(40, 2, 21))
    for op in OPERATIONS:
        report.rows.append(OperationStats.from_samples(op, 2, [1.0, 2.0, 3.0], 96))
    for payees in (4, 2):
        report.rows.append(OperationStats.from_samples("Trans", payees, [float(payees)] * 3, 0, proxy=True))
    return report


def test_stats_from_samples():
    stats = OperationStats.from_samples("Trace", 2, [1.0, 2.0, 6.0], 0)
    assert stats.iterations == 3
    assert stats.mean_ms == pytest.approx(3.0)
    assert stats.median_ms == pytest.approx(2.0)
    assert stats.stddev_ms > 0


def test_report_csv():
    stream = io.StringIO()
    synthetic_report().write_csv(stream)
    rows = list(csv.DictReader(io.StringIO(stream.getvalue())))
    assert tuple(rows[0]) == CSV_COLUMNS
    assert [r["op"] for r in rows[: len(OPERATIONS)]] == list(OPERATIONS)
    assert rows[-1]["op"] == "Trans-sweep"
    assert rows[0]["mean_ms"] == "2.000"


def test_report_series_and_table():
    report = synthetic_report()
    assert report.series("Trans") == [(2, 2.0), (4, 4.0)]
    assert report.row("Trans").payees == 2
    table = report.format_table()
    assert "Trans (proxy)" in table
    assert "(4n + 33)T_G1 + 2T_G2" in table
    assert "40 G1 + 2 G2 + 21 scalars" in table
    json.dumps(report.to_dict())


def test_runner_validates_arguments(settings):
    with pytest.raises(ValueError):
        BenchRunner(settings, iterations=0)
    with pytest.raises(ValueError):
        BenchRunner(settings, iterations=1, payee_counts=[0])


@pytest.mark.slow
def test_runner_measures_every_operation(settings):
    report = BenchRunner(settings, iterations=1, payee_counts=[2, 3], amount=6, seed=11).run()
    assert [r.op for r in report.rows if not r.proxy] == list(OPERATIONS)
    assert len(report.series("VerfTX")) == 2
    assert all(r.mean_ms > 0 for r in report.rows)
    assert report.element_count.g1 == 28 + 2 * 3
    assert report.row("Trans").bytes == report.row("VerfTX").bytes > 0


@pytest.mark.slow
def test_bench_command(tmp_path, capsys, monkeypatch):
    monkeypatch.setenv("SL_RANGE_BITS", "5")
    monkeypatch.setenv("SL_BSGS_BOUND", "256")
    out = tmp_path / "bench.csv"
    code = main(["--json", "bench", "--iters", "1", "--payees", "2", "--amount", "3", "--csv-out", str(out)])
    assert code == 0
    body = json.loads(capsys.readouterr().out.strip().splitlines()[-1])
    assert body["iterations"] == 1
    with open(out, newline="") as f:
        assert len(list(csv.DictReader(f))) == len(OPERATIONS) + 3


@pytest.mark.slow
@pytest.mark.skipif(BACKEND.name != "arkworks", reason="timing targets assume the compiled backend")
def test_protocol_width_timings():
    settings = Settings(range_bits=33, bsgs_bound=2**32, bench_iterations=1)
    report = BenchRunner(settings, iterations=2, payee_counts=[2], amount=1000, seed=5).run()
    assert report.row("Trans").mean_ms < 500
    assert report.row("VerfTX").mean_ms < 500
