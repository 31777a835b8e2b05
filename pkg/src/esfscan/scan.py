"""Exhaustive exact-arithmetic integrality scan with checkpoint/resume.

The scan walks n upward, maintaining the rolling full-set row and the
k = 1 omit-one column, and tests every omit-one value at
1 <= i <= n, 1 <= k <= min(n-1, k_cap(n)) for integrality.  Values below
``n_start`` are advanced (the recursion state needs the full history)
but not tested.

Parallelism is over the omitted index i: each worker owns a contiguous
i-strip and the matching slice of the column state for the whole run,
and advances its own copy of the (cheap) full-set row, so after startup
no per-n coordination is needed at all.  Workers stream integer hits,
per-checkpoint state slices, and final counts to the coordinator over a
queue; per-worker message order makes checkpoint assembly race-free.
The hit report is merged in (n, i, k) order, so its bytes are a pure
function of the configured range, independent of worker count, of
checkpoint cadence, and of interrupt/resume history.

There is deliberately no modular-arithmetic pre-filter: residues modulo
a word-size prime cannot witness that a rational is not an integer, so
every test is performed on the exact reduced value.
"""

from __future__ import annotations

import bisect
import json
import multiprocessing
import os
import time
import traceback
from dataclasses import dataclass
from queue import Empty
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .checkpoint import (
    CheckpointRecord,
    IntegerHit,
    load_checkpoint,
    save_checkpoint,
)
from .rational import format_rational, make_rational, parse_rational
from .symfun import EsfRow, OmitFirstColumn, k_cap, omit_oracle

REPORT_HEADER = "n,i,k,numerator,denominator"
SUMMARY_SUFFIX = ".summary.json"

# The only integrality hits that are supposed to exist, ever.
KNOWN_HITS = ((2, 2, 1), (4, 4, 2))


class ScanError(RuntimeError):
    """A scan could not run to completion or failed a self-check."""


@dataclass
class ScanConfig:
    n_start: int
    n_end: int
    jobs: int = 1
    checkpoint_path: Optional[str] = None
    report_path: str = "scan_report.csv"
    checkpoint_every: int = 100
    oracle_crosscheck_max: int = 12
    resume: bool = False
    stop_after_n: Optional[int] = None  # graceful stop at a completed n

    def validate(self) -> None:
        if not 2 <= self.n_start <= self.n_end:
            raise ScanError(f"need 2 <= n_start <= n_end, got [{self.n_start}, {self.n_end}]")
        if self.jobs < 1:
            raise ScanError(f"jobs must be >= 1, got {self.jobs}")
        if self.checkpoint_every < 1:
            raise ScanError("checkpoint_every must be >= 1")
        if not 0 <= self.oracle_crosscheck_max <= 20:
            raise ScanError("oracle_crosscheck_max must be within the enumeration bound (<= 20)")
        if self.resume and not self.checkpoint_path:
            raise ScanError("resume requested without a checkpoint path")
        if self.stop_after_n is not None and self.stop_after_n < 2:
            raise ScanError("stop_after_n must be >= 2")


@dataclass(frozen=True)
class WorkerStat:
    worker: int
    i_lo: int
    i_hi: int
    triples_checked: int
    busy_seconds: float


@dataclass(frozen=True)
class ScanReport:
    n_start: int
    n_end: int
    n_completed: int
    triples_checked: int
    hits: Tuple[IntegerHit, ...]
    elapsed_seconds: float
    worker_stats: Tuple[WorkerStat, ...]
    checkpoint_lineage: Tuple[Tuple[str, int], ...]
    report_path: str
    summary_path: str

    @property
    def unexpected_hits(self) -> Tuple[IntegerHit, ...]:
        return tuple(h for h in self.hits if (h.n, h.i, h.k) not in KNOWN_HITS)


def closed_form_triple_count(n_start: int, n_end: int) -> int:
    """Number of (n, i, k) triples the scan tests on [n_start, n_end]."""
    if n_start > n_end:
        return 0
    return sum(n * min(n - 1, k_cap(n)) for n in range(max(2, n_start), n_end + 1))


def _identity_sampled(n: int, i: int, k: int) -> bool:
    # Deterministic 1-in-1000 selection for the online identity self-check.
    return (n * 1000003 + i * 733 + k) % 1000 == 0


class _StripEngine:
    """Runs the recursion for the omitted indices in [i_lo, i_hi].

    Owns the column slice for its strip and a private copy of the rolling
    row (recomputing the row per worker is far cheaper than shipping it).
    """

    def __init__(
        self,
        i_lo: int,
        i_hi: int,
        n_start: int,
        row_cap: int,
        oracle_max: int,
        include_rows: bool,
        on_hit: Callable[[int, int, int, str], None],
        on_snapshot: Callable[[int, Optional[List[str]], List[Tuple[int, str]]], None],
    ):
        self.i_lo = i_lo
        self.i_hi = i_hi
        self.n_start = n_start
        self.row_cap = row_cap
        self.oracle_max = oracle_max
        self.include_rows = include_rows
        self.on_hit = on_hit
        self.on_snapshot = on_snapshot
        self.n = 1
        self.t1 = [None, make_rational(1)]
        size = max(0, i_hi - i_lo + 1)
        self.s1 = [None] * size
        self.recip = [make_rational(1, i) for i in range(i_lo, i_hi + 1)]
        if i_lo <= 1 <= i_hi:
            self.s1[1 - i_lo] = make_rational(0)
        self.checked = 0
        self.busy_seconds = 0.0

    def seed_from(self, n: int, row_values: Sequence, col_pairs: Sequence[Tuple[int, object]]):
        """Restore state at a fully completed n (from a checkpoint)."""
        needed = min(n, self.row_cap)
        if len(row_values) < needed:
            raise ScanError(
                f"checkpoint row has {len(row_values)} entries, scan needs {needed};"
                " it was saved for a shorter n_end"
            )
        self.n = n
        self.t1 = [None] + list(row_values[:needed])
        for i, v in col_pairs:
            if self.i_lo <= i <= self.i_hi:
                self.s1[i - self.i_lo] = v

    def run(self, stop_n: int, snapshot_ns: frozenset) -> None:
        started = time.perf_counter()
        for n in range(self.n + 1, stop_n + 1):
            self._step(n)
            if n in snapshot_ns:
                self._snapshot(n)
        self.busy_seconds = time.perf_counter() - started

    def _step(self, n: int) -> None:
        t1 = self.t1
        rn = make_rational(1, n)
        width = min(n, self.row_cap)
        t2 = [None] * (width + 1)
        t2[1] = t1[1] + rn
        for k in range(2, width + 1):
            t2[k] = t1[k - 1] * rn + (t1[k] if k < len(t1) else 0)
        checking = n >= self.n_start
        if checking and t2[1].denominator == 1:
            raise ScanError(f"self-check failed: harmonic value integral at n={n}")
        mk = min(n - 1, k_cap(n))
        crosscheck = checking and n <= self.oracle_max
        s1 = self.s1
        hi = min(self.i_hi, n - 1)
        for i in range(self.i_lo, hi + 1):
            idx = i - self.i_lo
            acc = s1[idx] + rn
            s1[idx] = acc
            if not checking:
                continue
            self.checked += 1
            if acc.denominator == 1:
                self.on_hit(n, i, 1, format_rational(acc))
            if crosscheck and acc != omit_oracle(n, i, 1):
                raise ScanError(f"recursion disagrees with enumeration at ({n},{i},1)")
            ri = self.recip[idx]
            for k in range(2, mk + 1):
                prev = acc
                acc = t2[k] - acc * ri
                self.checked += 1
                if acc.denominator == 1:
                    self.on_hit(n, i, k, format_rational(acc))
                if _identity_sampled(n, i, k) and t2[k] != acc + prev * ri:
                    raise ScanError(f"identity self-check failed at ({n},{i},{k})")
                if crosscheck and acc != omit_oracle(n, i, k):
                    raise ScanError(f"recursion disagrees with enumeration at ({n},{i},{k})")
        if self.i_lo <= n <= self.i_hi:
            if checking:
                for k in range(1, mk + 1):
                    v = t1[k]
                    self.checked += 1
                    if v.denominator == 1:
                        self.on_hit(n, n, k, format_rational(v))
                    if (
                        k >= 2
                        and _identity_sampled(n, n, k)
                        and t2[k] != v + t1[k - 1] * rn
                    ):
                        raise ScanError(f"identity self-check failed at ({n},{n},{k})")
                    if crosscheck and v != omit_oracle(n, n, k):
                        raise ScanError(f"recursion disagrees with enumeration at ({n},{n},{k})")
            s1[n - self.i_lo] = t1[1]
        self.t1 = t2
        self.n = n

    def _snapshot(self, n: int) -> None:
        rows = [format_rational(v) for v in self.t1[1:]] if self.include_rows else None
        hi = min(self.i_hi, n)
        pairs = [
            (i, format_rational(self.s1[i - self.i_lo])) for i in range(self.i_lo, hi + 1)
        ]
        self.on_snapshot(n, rows, pairs)


def _partition_strips(n_start: int, n_end: int, jobs: int) -> List[Tuple[int, int]]:
    """Contiguous i-strips with roughly equal work.

    Index i is active (and tested) for every n >= max(i, n_start), so low
    indices carry more work than high ones; weights reflect that.
    """
    jobs = max(1, min(jobs, n_end))
    cum = [0]
    for i in range(1, n_end + 1):
        cum.append(cum[-1] + (n_end - max(i, n_start) + 1) + 4)
    total = cum[-1]
    strips: List[Tuple[int, int]] = []
    lo = 1
    for s in range(1, jobs + 1):
        if s == jobs:
            hi = n_end
        else:
            hi = bisect.bisect_left(cum, total * s / jobs)
            hi = max(lo, min(hi, n_end - (jobs - s)))
        strips.append((lo, hi))
        lo = hi + 1
    return strips


@dataclass
class _WorkerTask:
    worker_id: int
    i_lo: int
    i_hi: int
    n_start: int
    row_cap: int
    oracle_max: int
    stop_n: int
    snapshot_ns: Tuple[int, ...]
    resume_n: Optional[int] = None
    resume_row: Optional[Tuple[str, ...]] = None
    resume_pairs: Optional[Tuple[Tuple[int, str], ...]] = None


def _worker_main(task: _WorkerTask, queue) -> None:
    try:
        engine = _StripEngine(
            i_lo=task.i_lo,
            i_hi=task.i_hi,
            n_start=task.n_start,
            row_cap=task.row_cap,
            oracle_max=task.oracle_max,
            include_rows=(task.worker_id == 0),
            on_hit=lambda n, i, k, s: queue.put(("hit", task.worker_id, n, i, k, s)),
            on_snapshot=lambda n, rows, pairs: queue.put(
                ("ckpt", task.worker_id, n, rows, pairs)
            ),
        )
        if task.resume_n is not None:
            engine.seed_from(
                task.resume_n,
                [parse_rational(s, strict=True) for s in task.resume_row],
                [(i, parse_rational(s, strict=True)) for i, s in task.resume_pairs],
            )
        engine.run(task.stop_n, frozenset(task.snapshot_ns))
        queue.put(("done", task.worker_id, engine.checked, engine.busy_seconds))
    except BaseException:
        queue.put(("error", task.worker_id, traceback.format_exc()))


def _write_report(path: str, hits: Sequence[IntegerHit]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(REPORT_HEADER + "\n")
        for h in hits:
            num, den = h.value.split("/")
            fh.write(f"{h.n},{h.i},{h.k},{num},{den}\n")
        fh.flush()
        os.fsync(fh.fileno())


class _Coordinator:
    """Collects worker messages: hits, checkpoint slices, final counts."""

    def __init__(self, config: ScanConfig, strips, hits: Dict[Tuple[int, int, int], IntegerHit]):
        self.config = config
        self.strips = strips
        self.hits = hits
        self.pending: Dict[int, Dict[int, Tuple[Optional[List[str]], List[Tuple[int, str]]]]] = {}
        self.stats: Dict[int, WorkerStat] = {}

    def sorted_hits(self) -> List[IntegerHit]:
        return [self.hits[key] for key in sorted(self.hits)]

    def on_hit(self, worker_id: int, n: int, i: int, k: int, value: str) -> None:
        self.hits[(n, i, k)] = IntegerHit(n=n, i=i, k=k, value=value)
        # A hit is the most valuable datum the scan can produce: persist
        # it before any more work is acknowledged.
        _write_report(self.config.report_path, self.sorted_hits())

    def on_snapshot(self, worker_id: int, n: int, rows, pairs) -> None:
        slot = self.pending.setdefault(n, {})
        slot[worker_id] = (rows, pairs)
        if len(slot) == len(self.strips):
            self._save_checkpoint(n)
            del self.pending[n]

    def on_done(self, worker_id: int, checked: int, busy: float) -> None:
        i_lo, i_hi = self.strips[worker_id]
        self.stats[worker_id] = WorkerStat(
            worker=worker_id, i_lo=i_lo, i_hi=i_hi, triples_checked=checked, busy_seconds=busy
        )

    def _save_checkpoint(self, n: int) -> None:
        slot = self.pending[n]
        rows = None
        col: Dict[int, str] = {}
        for wid, (r, pairs) in slot.items():
            if r is not None:
                rows = r
            col.update(dict(pairs))
        if rows is None or len(col) != n:
            raise ScanError(f"incomplete checkpoint state assembled at n={n}")
        record = CheckpointRecord(
            n=n,
            t_row=EsfRow(
                n=n,
                cap=len(rows),
                values=tuple(parse_rational(s, strict=True) for s in rows),
            ),
            s_col=OmitFirstColumn(
                n=n, values=tuple(parse_rational(col[i], strict=True) for i in range(1, n + 1))
            ),
            hits=tuple(h for h in self.sorted_hits() if h.n <= n),
        )
        save_checkpoint(self.config.checkpoint_path, record)


def scan(config: ScanConfig) -> ScanReport:
    """Run the configured scan and return the report (also written to disk)."""
    config.validate()
    started = time.perf_counter()

    lineage: List[Tuple[str, int]] = []
    resume_rec: Optional[CheckpointRecord] = None
    if config.resume:
        resume_rec = load_checkpoint(config.checkpoint_path)
        lineage.append((config.checkpoint_path, resume_rec.n))

    row_cap = k_cap(config.n_end)
    base_n = resume_rec.n if resume_rec else 1
    stop_n = min(config.stop_after_n or config.n_end, config.n_end)

    hits: Dict[Tuple[int, int, int], IntegerHit] = {}
    if resume_rec:
        if len(resume_rec.t_row.values) < min(base_n, row_cap):
            raise ScanError(
                f"checkpoint at n={base_n} stores only {len(resume_rec.t_row.values)} row"
                f" entries but a scan to n_end={config.n_end} needs {min(base_n, row_cap)}"
            )
        for h in resume_rec.hits:
            if config.n_start <= h.n <= stop_n:
                hits[(h.n, h.i, h.k)] = h

    strips = _partition_strips(config.n_start, config.n_end, config.jobs)
    coord = _Coordinator(config, strips, hits)
    try:
        _write_report(config.report_path, coord.sorted_hits())
    except OSError as exc:
        raise ScanError(f"report path {config.report_path!r} is not writable: {exc}") from exc

    snapshot_ns: Tuple[int, ...] = ()
    if config.checkpoint_path and stop_n > base_n:
        cadence = [
            n
            for n in range(base_n + 1, stop_n + 1)
            if n % config.checkpoint_every == 0
        ]
        if stop_n not in cadence:
            cadence.append(stop_n)
        snapshot_ns = tuple(sorted(cadence))

    def strip_task(wid: int) -> _WorkerTask:
        i_lo, i_hi = strips[wid]
        task = _WorkerTask(
            worker_id=wid,
            i_lo=i_lo,
            i_hi=i_hi,
            n_start=config.n_start,
            row_cap=row_cap,
            oracle_max=config.oracle_crosscheck_max,
            stop_n=stop_n,
            snapshot_ns=snapshot_ns,
        )
        if resume_rec:
            task.resume_n = base_n
            task.resume_row = tuple(
                format_rational(v) for v in resume_rec.t_row.values[: min(base_n, row_cap)]
            )
            task.resume_pairs = tuple(
                (i, format_rational(resume_rec.s_col.values[i - 1]))
                for i in range(max(1, i_lo), min(i_hi, base_n) + 1)
            )
        return task

    if stop_n > base_n:
        if len(strips) == 1:
            _run_inline(strip_task(0), coord)
        else:
            _run_workers([strip_task(w) for w in range(len(strips))], coord)

    exec_lo = max(config.n_start, base_n + 1)
    actual = sum(s.triples_checked for s in coord.stats.values())
    expected_exec = closed_form_triple_count(exec_lo, stop_n)
    if actual != expected_exec:
        raise ScanError(
            f"triple count mismatch: checked {actual}, closed form says {expected_exec}"
        )
    total = closed_form_triple_count(config.n_start, stop_n)

    final_hits = tuple(coord.sorted_hits())
    _write_report(config.report_path, final_hits)
    elapsed = time.perf_counter() - started
    stats = tuple(coord.stats[w] for w in sorted(coord.stats))
    summary_path = config.report_path + SUMMARY_SUFFIX
    report = ScanReport(
        n_start=config.n_start,
        n_end=config.n_end,
        n_completed=max(stop_n, base_n),
        triples_checked=total,
        hits=final_hits,
        elapsed_seconds=elapsed,
        worker_stats=stats,
        checkpoint_lineage=tuple(lineage),
        report_path=config.report_path,
        summary_path=summary_path,
    )
    _write_summary(report)
    return report


def _run_inline(task: _WorkerTask, coord: _Coordinator) -> None:
    engine = _StripEngine(
        i_lo=task.i_lo,
        i_hi=task.i_hi,
        n_start=task.n_start,
        row_cap=task.row_cap,
        oracle_max=task.oracle_max,
        include_rows=True,
        on_hit=lambda n, i, k, s: coord.on_hit(0, n, i, k, s),
        on_snapshot=lambda n, rows, pairs: coord.on_snapshot(0, n, rows, pairs),
    )
    if task.resume_n is not None:
        engine.seed_from(
            task.resume_n,
            [parse_rational(s, strict=True) for s in task.resume_row],
            [(i, parse_rational(s, strict=True)) for i, s in task.resume_pairs],
        )
    engine.run(task.stop_n, frozenset(task.snapshot_ns))
    coord.on_done(0, engine.checked, engine.busy_seconds)


def _run_workers(tasks: List[_WorkerTask], coord: _Coordinator) -> None:
    ctx = multiprocessing.get_context()
    queue = ctx.Queue(maxsize=256)
    procs = [ctx.Process(target=_worker_main, args=(t, queue), daemon=True) for t in tasks]
    for p in procs:
        p.start()
    remaining = len(tasks)
    try:
        while remaining:
            try:
                msg = queue.get(timeout=10)
            except Empty:
                dead = [i for i, p in enumerate(procs) if not p.is_alive() and i not in coord.stats]
                if dead:
                    raise ScanError(f"worker(s) {dead} exited without reporting")
                continue
            kind = msg[0]
            if kind == "hit":
                _, wid, n, i, k, value = msg
                coord.on_hit(wid, n, i, k, value)
            elif kind == "ckpt":
                _, wid, n, rows, pairs = msg
                coord.on_snapshot(wid, n, rows, pairs)
            elif kind == "done":
                _, wid, checked, busy = msg
                coord.on_done(wid, checked, busy)
                remaining -= 1
            else:
                _, wid, tb = msg
                raise ScanError(f"worker {wid} failed:\n{tb}")
    except BaseException:
        for p in procs:
            if p.is_alive():
                p.terminate()
        raise
    finally:
        for p in procs:
            p.join(timeout=30)


def _write_summary(report: ScanReport) -> None:
    payload = {
        "format": "esfscan-report v1",
        "n_start": report.n_start,
        "n_end": report.n_end,
        "n_completed": report.n_completed,
        "triples_checked": report.triples_checked,
        "integer_hits": [
            {"n": h.n, "i": h.i, "k": h.k, "value": h.value} for h in report.hits
        ],
        "elapsed_seconds": report.elapsed_seconds,
        "workers": [
            {
                "worker": s.worker,
                "i_lo": s.i_lo,
                "i_hi": s.i_hi,
                "triples_checked": s.triples_checked,
                "busy_seconds": s.busy_seconds,
            }
            for s in report.worker_stats
        ],
        "checkpoint_lineage": [
            {"path": path, "resumed_at_n": n} for path, n in report.checkpoint_lineage
        ],
        "report_csv": report.report_path,
    }
    with open(report.summary_path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")
