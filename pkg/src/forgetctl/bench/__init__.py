"""Benchmark harness: track generation, query challenges, impact runs."""

from .challenges import (
    CHALLENGE_NAMES,
    Challenge,
    build_pool,
)
from .runner import (
    IMPACT_MODES,
    REFERENCE_THROUGHPUT_OPS_S,
    BenchEvent,
    BenchReport,
    cleansing_impact,
    load_engine,
    render_plot,
    run_challenge,
)
from .track import (
    SOLO_SUBJECT,
    TARGET_SUBJECT,
    Track,
    VOCAB_SIZE,
    ZIPF_EXPONENT,
    generate_track,
)

__all__ = [
    "CHALLENGE_NAMES",
    "Challenge",
    "build_pool",
    "IMPACT_MODES",
    "REFERENCE_THROUGHPUT_OPS_S",
    "BenchEvent",
    "BenchReport",
    "cleansing_impact",
    "load_engine",
    "render_plot",
    "run_challenge",
    "SOLO_SUBJECT",
    "TARGET_SUBJECT",
    "Track",
    "VOCAB_SIZE",
    "ZIPF_EXPONENT",
    "generate_track",
]
