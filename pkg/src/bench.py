"""Benchmark harness for the seven protocol algorithms.

Runs each algorithm in the 2-in/2-out mode, reports mean/median/stddev wall
times next to the theoretical operation counts, and sweeps the number of
payees for AAGen, Trans and VerfTX.
"""

import csv
import logging
import math
import os
import platform
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, TextIO, Tuple

from config import Settings
from crypto.loader import CurveLoader
from crypto.pairing import G1_BYTES, G2_BYTES, build_params
from crypto.randomness import seeded
from ledger import (
    aa_gen,
    mk_gen,
    register,
    trace,
    trans,
    uk_gen,
    verf_tx,
)
from ledger.state import LedgerState
from ledger.transaction import ElementCount, reference_g1_count, transaction_element_count
from silent_ledger import SilentLedger

CSV_COLUMNS = ("op", "payees", "iterations", "mean_ms", "median_ms", "stddev_ms", "bytes")

OPERATIONS = ("Setup", "MKGen", "UKGen", "AAGen", "Trans", "VerfTX", "Trace")
SWEEP_OPERATIONS = ("AAGen", "Trans", "VerfTX")

THEORY = {
    "Setup": "-",
    "MKGen": "T_G1 + T_G2",
    "UKGen": "5T_G1 + T_G2",
    "AAGen": "14T_G1",
    "Trans": "(4n + 33)T_G1 + 2T_G2",
    "VerfTX": "(6n + 38)T_G1 + 14T_b + 2T_GT",
    "Trace": "T_G1 + T_bsgs",
}

# Published desk measurements, shown for context only.
REFERENCE_MS = {
    "Setup": 5.49,
    "MKGen": 1.83,
    "UKGen": 1.04,
    "AAGen": 1.88,
    "Trans": 9.75,
    "VerfTX": 22.43,
    "Trace": 2030.0,
}

DEFAULT_AMOUNT = 1_000_000
DEFAULT_PAYEE_COUNTS = (2, 4, 8)


@dataclass(frozen=True)
class OperationStats:
    """Timing summary of one operation at one payee count."""

    op: str
    payees: int
    iterations: int
    mean_ms: float
    median_ms: float
    stddev_ms: float
    bytes: int
    proxy: bool = False

    @classmethod
    def from_samples(
        cls, op: str, payees: int, samples_ms: Sequence[float], size: int, proxy: bool = False
    ) -> "OperationStats":
        return cls(
            op=op,
            payees=payees,
            iterations=len(samples_ms),
            mean_ms=statistics.fmean(samples_ms),
            median_ms=statistics.median(samples_ms),
            stddev_ms=statistics.pstdev(samples_ms),
            bytes=size,
            proxy=proxy,
        )

    def csv_row(self) -> Dict[str, Any]:
        return {
            "op": f"{self.op}-sweep" if self.proxy else self.op,
            "payees": self.payees,
            "iterations": self.iterations,
            "mean_ms": f"{self.mean_ms:.3f}",
            "median_ms": f"{self.median_ms:.3f}",
            "stddev_ms": f"{self.stddev_ms:.3f}",
            "bytes": self.bytes,
        }


@dataclass
class BenchReport:
    amount: int
    iterations: int
    range_bits: int
    element_count: ElementCount
    rows: List[OperationStats] = field(default_factory=list)
    machine: Dict[str, str] = field(default_factory=dict)

    def row(self, op: str) -> OperationStats:
        return next(r for r in self.rows if r.op == op and not r.proxy)

    def series(self, op: str) -> List[Tuple[int, float]]:
        """Payee-count sweep of ``op`` as ``(payees, mean_ms)`` pairs."""
        return sorted((r.payees, r.mean_ms) for r in self.rows if r.op == op and r.proxy)

    def write_csv(self, stream: TextIO) -> None:
        writer = csv.DictWriter(stream, fieldnames=CSV_COLUMNS)
        writer.writeheader()
        for row in self.rows:
            writer.writerow(row.csv_row())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "amount": self.amount,
            "iterations": self.iterations,
            "range_bits": self.range_bits,
            "machine": self.machine,
            "element_count": asdict(self.element_count),
            "reference_g1_count": reference_g1_count(self.range_bits),
            "rows": [asdict(r) for r in self.rows],
        }

    def format_table(self) -> str:
        header = (
            f"{'op':<14}{'payees':>7}{'mean ms':>12}{'median ms':>12}{'stddev ms':>12}"
            f"{'bytes':>8}  {'theory':<34}{'ref ms':>9}"
        )
        lines = [header, "-" * len(header)]
        for r in self.rows:
            name = f"{r.op} (proxy)" if r.proxy else r.op
            theory = "" if r.proxy else THEORY[r.op]
            reference = "" if r.proxy else f"{REFERENCE_MS[r.op]:.2f}"
            lines.append(
                f"{name:<14}{r.payees:>7}{r.mean_ms:>12.2f}{r.median_ms:>12.2f}{r.stddev_ms:>12.2f}"
                f"{r.bytes:>8}  {theory:<34}{reference:>9}"
            )
        count = self.element_count
        lines.append("")
        lines.append(
            f"tx elements: {count.g1} G1 + {count.g2} G2 + {count.scalars} scalars "
            f"(reference (27 + 2log2 n) G1 + G2 = {reference_g1_count(self.range_bits):.1f} G1 + 1 G2)"
        )
        lines.append(f"long-term account: 2|G1| = {2 * G1_BYTES} B")
        lines.append("Sweep rows repeat AAGen per payee and 2-2 Trans/VerfTX per payee pair.")
        return "\n".join(lines)


def machine_descriptor() -> Dict[str, str]:
    return {
        "platform": platform.platform(),
        "machine": platform.machine(),
        "processor": platform.processor() or "unknown",
        "python": platform.python_version(),
        "cpus": str(os.cpu_count() or 1),
    }


class BenchRunner:
    """Times the protocol algorithms.

    Args:
        settings: Security level, range width and BSGS bound.
        iterations: Samples per operation.
        payee_counts: Payee counts of the sweep.
        amount: Amount of every output.
        workers: Threads running trials.
        seed: Base seed for per-trial generators; None uses the system source.
    """

    logger = logging.getLogger(__name__)

    def __init__(
        self,
        settings: Settings,
        iterations: int,
        payee_counts: Sequence[int] = DEFAULT_PAYEE_COUNTS,
        amount: int = DEFAULT_AMOUNT,
        workers: int = 1,
        seed: Optional[int] = None,
    ):
        if iterations < 1:
            raise ValueError("iterations must be at least 1")
        if any(p < 1 for p in payee_counts):
            raise ValueError("payee counts must be positive")
        self.settings = settings
        self.iterations = iterations
        self.payee_counts = sorted(set(payee_counts))
        self.amount = amount
        self.workers = workers
        self.seed = seed
        self._trial_offset = 0

    def _measure(self, trial: Callable[[], Any], count: int) -> List[float]:
        offset = self._trial_offset
        self._trial_offset += count

        def one(index: int) -> float:
            if self.seed is None:
                return _timed(trial)
            with seeded(self.seed + offset + index):
                return _timed(trial)

        if self.workers == 1:
            return [one(i) for i in range(count)]
        with ThreadPoolExecutor(max_workers=self.workers) as pool:
            # map keeps trial order, so merged samples do not depend on scheduling.
            return list(pool.map(one, range(count)))

    def run(self) -> BenchReport:
        """Run every measurement.

        Returns:
            BenchReport: One row per operation plus the payee sweep rows.
        """
        n, level = self.settings.range_bits, self.settings.security_level
        self.logger.info("Benchmark: %d iterations, amount %d, n=%d", self.iterations, self.amount, n)

        fixture = SilentLedger.create(self.settings)
        pp, keys, keys_public = fixture.pp, fixture.keys, fixture.keys_public
        assert keys is not None
        alice, alice_secret = fixture.register("alice")
        bob, _ = fixture.register("bob")
        fixture.mint(alice, self.amount)
        fixture.mint(alice, self.amount)
        inputs = fixture.scan(alice_secret)[:2]
        payees = [bob, alice]
        amounts = [self.amount, self.amount]
        tx = fixture.pay(inputs, payees, amounts)
        tx_size = len(tx.to_bytes())
        state = fixture.state
        bound = self.settings.bsgs_bound

        def build_tx() -> Any:
            return trans(pp, keys_public, inputs, payees, amounts, range_bits=n)

        def verify_tx() -> Any:
            result = verf_tx(pp, keys_public, tx, state, commit=False)
            if not result:
                raise RuntimeError(f"benchmark transaction rejected: {result.reason}")
            return result

        def ukgen() -> Any:
            # Fresh directory per trial so labels never collide.
            _, request = uk_gen(pp, "bench")
            return register(pp, keys, request, LedgerState(n))

        trials: Dict[str, Tuple[Callable[[], Any], int]] = {
            "Setup": (lambda: build_params(CurveLoader.load(level)), G1_BYTES + G2_BYTES),
            "MKGen": (lambda: mk_gen(pp), G1_BYTES + G2_BYTES),
            "UKGen": (ukgen, 2 * G1_BYTES),
            "AAGen": (lambda: aa_gen(pp, self.amount, bob, keys_public, range_bits=n), 2 * G1_BYTES),
            "Trans": (build_tx, tx_size),
            "VerfTX": (verify_tx, tx_size),
            "Trace": (lambda: trace(pp, keys.mk, tx, 0, bound=bound), 0),
        }

        report = BenchReport(
            amount=self.amount,
            iterations=self.iterations,
            range_bits=n,
            element_count=transaction_element_count(tx),
            machine=machine_descriptor(),
        )
        for op in OPERATIONS:
            trial, size = trials[op]
            samples = self._measure(trial, self.iterations)
            report.rows.append(OperationStats.from_samples(op, 2, samples, size))
            self.logger.debug("%s: mean %.2f ms", op, report.rows[-1].mean_ms)

        for payees_count in self.payee_counts:
            pairs = math.ceil(payees_count / 2)
            sweep: Dict[str, Tuple[Callable[[], Any], int]] = {
                "AAGen": (_repeat(trials["AAGen"][0], payees_count), payees_count * 2 * G1_BYTES),
                "Trans": (_repeat(build_tx, pairs), pairs * tx_size),
                "VerfTX": (_repeat(verify_tx, pairs), pairs * tx_size),
            }
            for op in SWEEP_OPERATIONS:
                trial, size = sweep[op]
                samples = self._measure(trial, self.iterations)
                report.rows.append(
                    OperationStats.from_samples(op, payees_count, samples, size, proxy=True)
                )
        return report


def _repeat(trial: Callable[[], Any], times: int) -> Callable[[], None]:
    def run() -> None:
        for _ in range(times):
            trial()

    return run


def _timed(trial: Callable[[], Any]) -> float:
    start = time.perf_counter()
    trial()
    return (time.perf_counter() - start) * 1000.0
