#!/usr/bin/env python3
"""Measure search throughput around a live cleansing delete.

Generates a synthetic track, loads it into a fresh engine, then runs the
chosen challenges three ways: undisturbed, with a single-document cleansing
delete injected mid-run, and with a batch delete of one percent of the
corpus. Each run writes a JSON report and a throughput-over-time plot into
the output directory, and a compact comparison table goes to stdout.
"""

from __future__ import annotations

import argparse
import sys
import tempfile
import time
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent.parent / "src"))

from forgetctl.bench import (  # noqa: E402
    CHALLENGE_NAMES,
    Challenge,
    cleansing_impact,
    generate_track,
    load_engine,
    render_plot,
    run_challenge,
)


def parse_args() -> argparse.Namespace:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--size", type=int, default=100_000,
                        help="track size in documents (default 100000)")
    parser.add_argument("--seed", type=int, default=7)
    parser.add_argument("--challenges", nargs="+", default=["high-low"],
                        choices=list(CHALLENGE_NAMES))
    parser.add_argument("--modes", nargs="+",
                        default=["single-doc", "batch-1k"],
                        choices=["single-doc", "batch-1k"])
    parser.add_argument("--workers", type=int, default=2)
    parser.add_argument("--baseline-s", type=float, default=5.0)
    parser.add_argument("--post-event-s", type=float, default=15.0)
    parser.add_argument("--min-duration-s", type=float, default=25.0)
    parser.add_argument("--out-dir", type=Path, default=Path("results"))
    return parser.parse_args()


def main() -> None:
    args = parse_args()
    args.out_dir.mkdir(parents=True, exist_ok=True)

    print(f"generating track: {args.size} docs, seed {args.seed}")
    track = generate_track(args.size, args.seed)

    rows = []
    for name in args.challenges:
        # fresh store per challenge so earlier deletes cannot leak across runs
        with tempfile.TemporaryDirectory() as tmp:
            t0 = time.monotonic()
            engine, cleanser = load_engine(track, Path(tmp))
            print(f"indexed in {time.monotonic() - t0:.1f} s "
                  f"({len(engine.segments())} segments)")

            baseline = run_challenge(engine, track, Challenge(name),
                                     seed=args.seed)
            _save(baseline, args.out_dir, f"{name}-throughput")
            rows.append((name, "none", baseline.summary))

            for mode in args.modes:
                report = cleansing_impact(
                    engine, cleanser, track, Challenge(name), mode,
                    seed=args.seed, workers=args.workers,
                    baseline_s=args.baseline_s,
                    post_event_s=args.post_event_s,
                    min_duration_s=args.min_duration_s)
                _save(report, args.out_dir, f"{name}-{mode}")
                rows.append((name, mode, report.summary))

    print()
    header = (f"{'challenge':<10} {'mode':<11} {'ops/s':>9} {'trough':>7} "
              f"{'recover':>8} {'mean':>6} {'clean':>6}")
    print(header)
    print("-" * len(header))
    for name, mode, s in rows:
        rate = s.get("baseline_ops_s") or s.get("mean_ops_s")
        trough = s.get("trough_ratio")
        recovery = s.get("recovery_s")
        print(f"{name:<10} {mode:<11} {rate:>9.1f} "
              f"{'-' if trough is None else f'{trough:.2f}':>7} "
              f"{'-' if recovery is None else f'{recovery:.2f}s':>8} "
              f"{s.get('mean_ratio') or 1.0:>6.2f} "
              f"{str(s.get('residue_clean', '-')):>6}")


def _save(report, out_dir: Path, stem: str) -> None:
    report.save(out_dir / f"{stem}.json")
    render_plot(report, out_dir / f"{stem}.png")
    print(f"  wrote {out_dir / stem}.{{json,png}}")


if __name__ == "__main__":
    main()
