"""Benchmark harness: throughput, peak bitmap bytes, compression ratios.

Each bench cell evaluates one formula on one generated trace with one
backend.  A cell runs one warm-up evaluation and then ``reps`` timed
evaluations on a monotonic clock; the reported wall time is the median.
Throughput is events per second of evaluation time; trace loading and
ground-bitmap construction are excluded unless ``include_ingest`` is set,
in which case the ground-bitmap build is timed with each repetition.

Results are plain dataclass rows with a stable CSV schema (header row
mandatory, columns exactly in field order).  A failed cell still yields a
row, with the failure in the ``error`` column and zeroed measurements.
"""

from __future__ import annotations

import csv
import io
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .corpus import corpus
from .evaluator import GroundEnv, evaluate
from .formulas import Formula
from .traces import (GENERATOR_ALGORITHM, Trace, TraceGenSpec,
                     build_ground_bitmaps, generate_random_trace)

DEFAULT_SEED = 12345
RAW_WORD_BYTES = 8


@dataclass
class BenchRecord:
    formula_id: str
    backend: str
    trace_length: int
    repeat: int
    throughput_hz: float
    peak_bitmap_bytes: int
    compressed_ratio: float
    wall_ms: float
    seed: int
    error: str = ""


@dataclass
class CompressionRecord:
    trace_length: int
    repeat: int
    backend: str
    variable: str
    payload_bytes: int
    raw_payload_bytes: int
    ratio: float
    seed: int


BENCH_COLUMNS = [f.name for f in fields(BenchRecord)]
COMPRESSION_COLUMNS = [f.name for f in fields(CompressionRecord)]


@dataclass
class BenchConfig:
    lengths: Sequence[int]
    backends: Sequence[str] = ("raw",)
    formula_ids: Optional[Sequence[str]] = None  # None = whole corpus
    num_vars: int = 10
    repeat: int = 1
    seed: int = DEFAULT_SEED
    reps: int = 5
    include_ingest: bool = False
    jobs: int = 1
    extra_formulas: Dict[str, Formula] = field(default_factory=dict)

    def resolve_formulas(self) -> List[Tuple[str, Formula]]:
        if self.formula_ids is None:
            return [(e.id, e.formula) for e in corpus()]
        out = []
        for fid in self.formula_ids:
            if fid in self.extra_formulas:
                out.append((fid, self.extra_formulas[fid]))
            else:
                out.append((fid, corpus().get(fid).formula))
        return out


def raw_payload_bytes(length: int, num_vars: int) -> int:
    """Payload of the uncompressed ground bitmaps for a trace shape."""
    return num_vars * ((length + 63) // 64) * RAW_WORD_BYTES


def bench_cell(formula_id: str, formula: Formula, trace: Trace, backend: str,
               reps: int, include_ingest: bool, seed: int,
               repeat: int, env: Optional[GroundEnv] = None) -> BenchRecord:
    """One measurement row; never raises, failures land in ``error``."""
    length = len(trace)
    try:
        if env is None:
            env = build_ground_bitmaps(trace, backend)
        timings = []
        peak = 0
        ratio = _env_ratio(env, length, len(trace.variables))
        for rep in range(reps + 1):
            start = time.perf_counter()
            if include_ingest:
                env = build_ground_bitmaps(trace, backend)
            result = evaluate(formula, env)
            elapsed = time.perf_counter() - start
            peak = result.peak_bitmap_bytes
            if rep > 0:  # first run warms caches and allocators
                timings.append(elapsed)
        wall = statistics.median(timings) if timings else 0.0
        throughput = length / wall if wall > 0 else 0.0
        return BenchRecord(formula_id, backend, length, repeat, throughput,
                           peak, ratio, wall * 1e3, seed)
    except Exception as exc:  # noqa: BLE001 - cell failures become rows
        return BenchRecord(formula_id, backend, length, repeat, 0.0, 0, 0.0,
                           0.0, seed, error=f"{type(exc).__name__}: {exc}")


def _env_ratio(env: GroundEnv, length: int, num_vars: int) -> float:
    raw_bytes = raw_payload_bytes(length, num_vars)
    if raw_bytes == 0:
        return 1.0
    payload = sum(b.payload_bytes() for b in env.bindings.values())
    return payload / raw_bytes


def run_bench(config: BenchConfig) -> List[BenchRecord]:
    """All cells of the configured sweep, in deterministic row order."""
    formulas = config.resolve_formulas()
    records: List[BenchRecord] = []
    for length in config.lengths:
        trace = generate_random_trace(TraceGenSpec(
            length=length, num_vars=config.num_vars,
            repeat=config.repeat, seed=config.seed,
        ))
        for backend in config.backends:
            shared = None
            if not config.include_ingest:
                shared = build_ground_bitmaps(trace, backend)
            cells = [
                (fid, formula, trace, backend, config.reps,
                 config.include_ingest, config.seed, config.repeat, shared)
                for fid, formula in formulas
            ]
            if config.jobs > 1:
                with ThreadPoolExecutor(max_workers=config.jobs) as pool:
                    records.extend(pool.map(lambda c: bench_cell(*c), cells))
            else:
                records.extend(bench_cell(*cell) for cell in cells)
    return records


def compression_report(lengths: Sequence[int], repeats: Sequence[int],
                       backends: Sequence[str], seed: int = DEFAULT_SEED,
                       num_vars: int = 10) -> List[CompressionRecord]:
    """Per-variable payload of each backend against the uncompressed payload."""
    rows: List[CompressionRecord] = []
    for length in lengths:
        per_var_raw = ((length + 63) // 64) * RAW_WORD_BYTES
        for repeat in repeats:
            trace = generate_random_trace(TraceGenSpec(
                length=length, num_vars=num_vars, repeat=repeat, seed=seed,
            ))
            for backend in backends:
                env = build_ground_bitmaps(trace, backend)
                for name in trace.variables:
                    payload = env.bindings[name].payload_bytes()
                    ratio = payload / per_var_raw if per_var_raw else 1.0
                    rows.append(CompressionRecord(
                        length, repeat, backend, name, payload,
                        per_var_raw, ratio, seed,
                    ))
    return rows


# -- CSV schema ---------------------------------------------------------------------


def write_csv(records: Iterable, stream: io.TextIOBase) -> None:
    records = list(records)
    columns = BENCH_COLUMNS
    if records and isinstance(records[0], CompressionRecord):
        columns = COMPRESSION_COLUMNS
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(columns)
    for record in records:
        writer.writerow([getattr(record, c) for c in columns])


def parse_bench_csv(stream: io.TextIOBase) -> List[BenchRecord]:
    reader = csv.DictReader(stream)
    if reader.fieldnames != BENCH_COLUMNS:
        raise ValueError(
            f"unexpected bench CSV header {reader.fieldnames!r}"
        )
    out = []
    for row in reader:
        out.append(BenchRecord(
            formula_id=row["formula_id"],
            backend=row["backend"],
            trace_length=int(row["trace_length"]),
            repeat=int(row["repeat"]),
            throughput_hz=float(row["throughput_hz"]),
            peak_bitmap_bytes=int(row["peak_bitmap_bytes"]),
            compressed_ratio=float(row["compressed_ratio"]),
            wall_ms=float(row["wall_ms"]),
            seed=int(row["seed"]),
            error=row["error"],
        ))
    return out


def generator_id() -> str:
    """PRNG identifier recorded alongside reproducible measurements."""
    return GENERATOR_ALGORITHM
