"""Benchmark execution: load, measure, inject a cleansing run, report.

Throughput is sampled into fixed windows (250 ms by default). The impact
experiment starts a query load, lets it establish a baseline, then performs a
real cleansing delete through the ordinary orchestrator; the engine's
exclusive write barrier and the emptied caches are the measured effect, not a
simulation of one. Events on the report come from the cleansing receipt's own
step timestamps.
"""

from __future__ import annotations

import json
import statistics
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from ..clock import SystemClock
from ..cleanse.orchestrator import CleansingService
from ..cleanse.register import VerificationRegister
from ..cleanse.residue import ResidueReport
from ..engine.core import EngineConfig, SearchEngine
from ..engine.queries import QueryKind
from ..errors import EngineUnavailable
from ..selectors import Selector
from .challenges import Challenge
from .track import Track

WINDOW_MS = 250.0
IMPACT_MODES = ("single-doc", "batch-1k")

# Throughput of the same six challenges measured on reference hardware
# (64-core Dell R6525, 36M-document corpus). Hardware-bound context for
# reading reports, never a target: desk-scale runs are not comparable.
REFERENCE_THROUGHPUT_OPS_S = {
    "high-low": 164.4,
    "prefix": 73.2,
    "range": 55.9,
    "fuzzy": 23.1,
    "wildcard": 15.0,
    "agg-wc-fz": 6.7,
}


@dataclass(frozen=True)
class BenchEvent:
    name: str       # e.g. "mark-delete", "cache-clear", "forcemerge"
    at: float       # epoch seconds
    detail: str = ""

    def to_payload(self) -> dict:
        return {"name": self.name, "at": self.at, "detail": self.detail}


@dataclass
class BenchReport:
    challenge: str
    mode: str                      # "throughput" | "single-doc" | "batch-1k"
    window_ms: float
    started_at: float
    finished_at: float
    windows: list[dict]            # {"start": epoch s, "ops": int, "ops_s": float}
    events: list[BenchEvent]
    summary: dict
    metadata: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        for event in self.events:
            if not (self.started_at <= event.at <= self.finished_at):
                raise ValueError(
                    f"event {event.name!r} at {event.at} outside run "
                    f"interval [{self.started_at}, {self.finished_at}]")

    def to_payload(self) -> dict:
        return {
            "challenge": self.challenge,
            "mode": self.mode,
            "window_ms": self.window_ms,
            "started_at": self.started_at,
            "finished_at": self.finished_at,
            "windows": self.windows,
            "events": [e.to_payload() for e in self.events],
            "summary": self.summary,
            "metadata": self.metadata,
        }

    def save(self, path: Path) -> None:
        Path(path).write_text(json.dumps(self.to_payload(), indent=1) + "\n")


# ---------------------------------------------------------------------------
# setup
# ---------------------------------------------------------------------------

def load_engine(track: Track, data_dir: Path,
                config: Optional[EngineConfig] = None,
                ) -> tuple[SearchEngine, CleansingService]:
    """Index the track into a fresh engine rooted at data_dir."""
    data_dir = Path(data_dir)
    clock = SystemClock()
    engine = SearchEngine(data_dir / "engine", clock=clock, config=config)
    register = VerificationRegister(data_dir / "register")
    cleanser = CleansingService(engine, register, data_dir / "receipts", clock)
    with register.bulk_load():
        for doc in track.documents:
            engine.index_document(doc)
        engine.flush()
    return engine, cleanser


def _check_ready(engine: SearchEngine, track: Track) -> None:
    if engine.doc_count() == 0:
        raise EngineUnavailable("engine holds no documents; index the track first")
    # Ids alone are ambiguous across tracks, so compare content. One probe
    # may legitimately be gone after an impact run deleted it; it suffices
    # that some probe is still served verbatim.
    for doc in (track.documents[0], track.documents[-1]):
        stored = engine.get_doc(doc.doc_id)
        if stored is not None and stored.fields == doc.fields:
            return
    raise EngineUnavailable("engine does not serve this track")


# ---------------------------------------------------------------------------
# measurement plumbing
# ---------------------------------------------------------------------------

def _issue(engine: SearchEngine, query) -> None:
    if query.kind is QueryKind.AGGREGATE:
        engine.aggregate(query)
    else:
        engine.search(query)


def _windowize(op_times: list[float], started_at: float, finished_at: float,
               window_ms: float) -> list[dict]:
    """Bucket op completion times into fixed windows over the run interval."""
    width = window_ms / 1000.0
    span = finished_at - started_at
    if span <= 0:
        return []
    n_windows = max(1, int(span / width))
    counts = [0] * n_windows
    for t in op_times:
        idx = min(int((t - started_at) / width), n_windows - 1)
        if idx >= 0:
            counts[idx] += 1
    windows = []
    for i, c in enumerate(counts):
        start = started_at + i * width
        # the last window absorbs the tail and is rated over its real span
        effective = width if i < n_windows - 1 else max(finished_at - start, 1e-9)
        windows.append({"start": start, "ops": c, "ops_s": c / effective})
    return windows


def _series_stats(windows: list[dict], op_times: list[float],
                  started_at: float, finished_at: float) -> dict:
    if not op_times:
        return {"operations": 0}
    duration = finished_at - started_at
    rates = [w["ops_s"] for w in windows]
    mean_rate = statistics.fmean(rates) if rates else 0.0
    stdev = statistics.pstdev(rates) if len(rates) > 1 else 0.0
    return {
        "operations": len(op_times),
        "duration_s": round(duration, 4),
        "mean_ops_s": round(len(op_times) / duration, 2) if duration else 0.0,
        "window_mean_ops_s": round(mean_rate, 2),
        "window_cov": round(stdev / mean_rate, 4) if mean_rate else 0.0,
    }


class _LoadWorkers:
    """Concurrent query workers cycling a pool until told to stop."""

    def __init__(self, engine: SearchEngine, pool, workers: int) -> None:
        self.engine = engine
        self.pool = pool
        self.op_times: list[list[float]] = [[] for _ in range(workers)]
        self._stop = threading.Event()
        self._threads = [
            threading.Thread(target=self._run, args=(i,), daemon=True)
            for i in range(workers)
        ]

    def _run(self, worker_id: int) -> None:
        times = self.op_times[worker_id]
        pool = self.pool
        offset = worker_id * 7  # stagger starting points across workers
        i = 0
        while not self._stop.is_set():
            _issue(self.engine, pool[(offset + i) % len(pool)])
            times.append(time.time())
            i += 1

    def start(self) -> None:
        for t in self._threads:
            t.start()

    def stop(self) -> list[float]:
        self._stop.set()
        for t in self._threads:
            t.join()
        merged = [t for worker in self.op_times for t in worker]
        merged.sort()
        return merged


# ---------------------------------------------------------------------------
# the two experiments
# ---------------------------------------------------------------------------

def run_challenge(engine: SearchEngine, track: Track, challenge: Challenge,
                  seed: int = 7, window_ms: float = WINDOW_MS) -> BenchReport:
    """Fixed-iteration throughput measurement: warmup, then measured ops."""
    _check_ready(engine, track)
    schedule = challenge.queries(track, seed)
    warmup = schedule[:challenge.warmup]
    measured = schedule[challenge.warmup:]

    for query in warmup:
        _issue(engine, query)

    started_at = time.time()
    op_times: list[float] = []
    for query in measured:
        _issue(engine, query)
        op_times.append(time.time())
    finished_at = time.time() if measured else started_at

    windows = _windowize(op_times, started_at, finished_at, window_ms)
    return BenchReport(
        challenge=challenge.name,
        mode="throughput",
        window_ms=window_ms,
        started_at=started_at,
        finished_at=finished_at,
        windows=windows,
        events=[],
        summary=_series_stats(windows, op_times, started_at, finished_at),
        metadata=_metadata(track, challenge, seed),
    )


def cleansing_impact(engine: SearchEngine, cleanser: CleansingService,
                     track: Track, challenge: Challenge, mode: str,
                     seed: int = 7, workers: int = 2,
                     window_ms: float = WINDOW_MS,
                     baseline_s: float = 5.0,
                     post_event_s: float = 12.0,
                     min_duration_s: float = 15.0) -> BenchReport:
    """Measure a live query load while a real cleansing delete runs through it.

    The run holds a steady load, waits baseline_s, performs the cleansing
    delete synchronously, then keeps the load up for post_event_s more. The
    returned summary carries the three figures the experiment is about:
    pre-event baseline, post-event trough, and recovery time.
    """
    if mode not in IMPACT_MODES:
        raise ValueError(f"mode must be one of {IMPACT_MODES}, got {mode!r}")
    _check_ready(engine, track)

    if mode == "single-doc":
        selector = Selector.for_docs(track.solo_doc_id)
    else:
        selector = Selector.for_subject(track.target_subject)

    pool = challenge.query_pool(track, seed)
    for i in range(challenge.warmup):
        _issue(engine, pool[i % len(pool)])

    load = _LoadWorkers(engine, pool, workers)
    started_at = time.time()
    load.start()
    time.sleep(baseline_s)

    receipt = cleanser.cleansing_delete(selector, request_id=f"bench-{mode}")

    event_elapsed = time.time() - started_at
    remaining = max(min_duration_s - event_elapsed - post_event_s, 0.0)
    time.sleep(post_event_s + remaining)
    op_times = load.stop()
    finished_at = time.time()

    residue = cleanser.verify_absence(selector)
    events = _receipt_events(receipt, started_at, finished_at)
    windows = _windowize(op_times, started_at, finished_at, window_ms)
    summary = _series_stats(windows, op_times, started_at, finished_at)
    summary.update(_impact_stats(windows, events, window_ms))
    summary["residue_clean"] = residue.clean
    summary["residue_matches"] = len(residue.matches)
    summary["docs_deleted"] = len(receipt.doc_ids)
    summary["receipt_all_done"] = receipt.all_done

    metadata = _metadata(track, challenge, seed)
    metadata["impact_mode"] = mode
    metadata["workers"] = workers
    metadata["receipt_id"] = receipt.receipt_id
    return BenchReport(
        challenge=challenge.name,
        mode=mode,
        window_ms=window_ms,
        started_at=started_at,
        finished_at=finished_at,
        windows=windows,
        events=events,
        summary=summary,
        metadata=metadata,
    )


def _receipt_events(receipt, started_at: float, finished_at: float,
                    ) -> list[BenchEvent]:
    """Map the receipt's primary-side step completions onto the timeline."""
    names = {
        "expunge_segments": "forcemerge",
        "clear_caches": "cache-clear",
        "flush_translog": "flush",
        "rewrite_snapshots": "snapshot-rewrite",
        "cull_logs": "log-cull",
    }
    events = [BenchEvent(name="cleansing-start", at=receipt.started_at,
                         detail=receipt.selector_text)]
    for status in receipt.steps:
        if status.side != "primary" or status.finished_at is None:
            continue
        events.append(BenchEvent(
            name=names.get(status.step, status.step),
            at=status.finished_at,
            detail=f"step {status.step} done"))
    clamped = [
        BenchEvent(e.name, min(max(e.at, started_at), finished_at), e.detail)
        for e in events
    ]
    return sorted(clamped, key=lambda e: e.at)


def _impact_stats(windows: list[dict], events: list[BenchEvent],
                  window_ms: float) -> dict:
    """Baseline, trough, recovery, and mean ratio around the cleansing run."""
    if not windows or not events:
        return {}
    event_start = events[0].at
    last_event = events[-1].at
    before = [w for w in windows if w["start"] + window_ms / 1000.0 <= event_start]
    after = [w for w in windows if w["start"] >= event_start]
    if not before or not after:
        return {}
    baseline = statistics.fmean(w["ops_s"] for w in before)
    trough = min(w["ops_s"] for w in after)
    recovery_s = None
    for w in after:
        if w["ops_s"] >= 0.9 * baseline:
            recovery_s = max(0.0, w["start"] - event_start)
            break
    mean_rate = statistics.fmean(w["ops_s"] for w in windows)
    return {
        "baseline_ops_s": round(baseline, 2),
        "trough_ops_s": round(trough, 2),
        "trough_ratio": round(trough / baseline, 4) if baseline else None,
        "recovery_s": None if recovery_s is None else round(recovery_s, 3),
        "mean_ratio": round(mean_rate / baseline, 4) if baseline else None,
        "cleansing_duration_s": round(last_event - event_start, 3),
    }


def _metadata(track: Track, challenge: Challenge, seed: int) -> dict:
    return {
        "track_size": track.size,
        "track_seed": track.seed,
        "track_fingerprint": track.fingerprint(),
        "query_seed": seed,
        "warmup": challenge.warmup,
        "measured": challenge.measured,
        "pool_size": challenge.pool_size,
        "reference_ops_s": REFERENCE_THROUGHPUT_OPS_S.get(challenge.name),
        "reference_note": (
            "reference numbers are from a 64-core Dell R6525 over a corpus "
            "three orders of magnitude larger; context only, not a target"),
    }


def render_plot(report: BenchReport, path: Path) -> None:
    """Throughput-vs-time PNG with the cleansing events marked."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    xs = [w["start"] - report.started_at for w in report.windows]
    ys = [w["ops_s"] for w in report.windows]
    fig, ax = plt.subplots(figsize=(10, 4.5))
    ax.plot(xs, ys, linewidth=1.2, color="#4e79a7")
    for event in report.events:
        ax.axvline(event.at - report.started_at, color="#e15759",
                   linestyle="--", linewidth=0.8)
        ax.text(event.at - report.started_at, max(ys) * 0.98, event.name,
                rotation=90, fontsize=7, va="top", ha="right")
    baseline = report.summary.get("baseline_ops_s")
    if baseline:
        ax.axhline(baseline, color="#59a14f", linestyle=":", linewidth=0.8,
                   label=f"baseline {baseline:.0f} ops/s")
        ax.legend(loc="lower right", fontsize=8)
    ax.set_xlabel("seconds since run start")
    ax.set_ylabel("ops/s per window")
    ax.set_title(f"{report.challenge} ({report.mode})")
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
