"""Track generation, challenge pools, throughput runs, cleansing impact."""

from __future__ import annotations

import json
import re
from collections import Counter

import pytest

from forgetctl.bench import (
    CHALLENGE_NAMES,
    Challenge,
    REFERENCE_THROUGHPUT_OPS_S,
    BenchEvent,
    BenchReport,
    TARGET_SUBJECT,
    cleansing_impact,
    generate_track,
    load_engine,
    render_plot,
    run_challenge,
)
from forgetctl.engine.documents import SENTINEL_PATTERN
from forgetctl.errors import EngineUnavailable, MalformedQuery

SENTINEL_RE = re.compile(r"\b[0-9a-f]{16}\b")


@pytest.fixture(scope="module")
def track():
    return generate_track(3_000, seed=11)


@pytest.fixture(scope="module")
def loaded(track, tmp_path_factory):
    data_dir = tmp_path_factory.mktemp("bench-engine")
    return load_engine(track, data_dir)


class TestTrackGeneration:
    def test_same_inputs_same_corpus(self):
        first = generate_track(400, seed=3)
        second = generate_track(400, seed=3)
        assert first.fingerprint() == second.fingerprint()
        assert first.documents == second.documents

    def test_different_seed_different_corpus(self):
        assert generate_track(400, seed=3).fingerprint() != \
            generate_track(400, seed=4).fingerprint()

    def test_size_one(self):
        track = generate_track(1, seed=9)
        assert len(track.documents) == 1

    def test_size_zero_rejected(self):
        with pytest.raises(ValueError):
            generate_track(0, seed=1)

    def test_target_share_about_one_percent(self, track):
        targets = track.target_doc_ids
        assert len(targets) == 30  # 1% of 3000
        for doc in track.documents:
            if doc.doc_id in targets:
                assert TARGET_SUBJECT in doc.subject_ids()
            else:
                assert TARGET_SUBJECT not in doc.subject_ids()

    def test_every_doc_has_unique_sentinel(self, track):
        seen = set()
        for doc in track.documents:
            found = SENTINEL_RE.findall(doc.fields["body"])
            assert len(found) == 1, doc.doc_id
            assert SENTINEL_PATTERN.search(doc.fields["body"])
            seen.add(found[0])
        assert len(seen) == len(track.documents)

    def test_doc_shape(self, track):
        doc = track.documents[0]
        assert set(doc.fields) == {"title", "body", "tags", "date", "votes",
                                   "author_name", "author_email"}
        assert set(doc.pii_tags) == {"author_name", "author_email"}
        for tag in doc.pii_tags.values():
            assert tag.purpose == "qa-forum"
        assert len({d.doc_id for d in track.documents}) == len(track.documents)

    def test_token_histogram_matches_declared_distribution(self):
        # recount the emitted corpus and compare against the distribution the
        # generator claims to sample from, for the ten most probable words
        track = generate_track(12_000, seed=5)
        counts: Counter = Counter()
        for doc in track.documents:
            for field in ("title", "body"):
                for token in doc.fields[field].split():
                    if not SENTINEL_RE.fullmatch(token):
                        counts[token] += 1
        total = sum(counts.values())
        probs = track.token_probabilities()
        for rank in range(10):
            word = track.vocabulary[rank]
            empirical = counts[word] / total
            assert abs(empirical - probs[rank]) / probs[rank] < 0.05, \
                f"rank {rank} ({word}): {empirical:.5f} vs {probs[rank]:.5f}"


class TestChallenges:
    def test_unknown_name_rejected(self):
        with pytest.raises(ValueError, match="unknown challenge"):
            Challenge("phrase")

    def test_negative_iterations_rejected(self):
        with pytest.raises(ValueError):
            Challenge("prefix", warmup=-1)

    def test_all_six_names_produce_valid_pools(self, track):
        assert len(CHALLENGE_NAMES) == 6
        for name in CHALLENGE_NAMES:
            pool = Challenge(name, pool_size=8).query_pool(track, seed=2)
            assert len(pool) == 8  # construction already validated them

    def test_pools_deterministic(self, track):
        for name in CHALLENGE_NAMES:
            a = Challenge(name).query_pool(track, seed=2)
            b = Challenge(name).query_pool(track, seed=2)
            assert a == b

    def test_schedule_length(self, track):
        ch = Challenge("range", warmup=7, measured=21)
        assert len(ch.queries(track, seed=1)) == 28


class TestRunChallenge:
    def test_measured_iterations_only(self, loaded, track):
        engine, _ = loaded
        ch = Challenge("high-low", warmup=40, measured=120)
        report = run_challenge(engine, track, ch, seed=3)
        assert report.summary["operations"] == 120
        assert sum(w["ops"] for w in report.windows) == 120
        assert report.mode == "throughput"
        assert report.events == []

    def test_zero_measured_iterations(self, loaded, track):
        engine, _ = loaded
        ch = Challenge("prefix", warmup=5, measured=0)
        report = run_challenge(engine, track, ch, seed=3)
        assert report.summary == {"operations": 0}
        assert report.windows == []

    def test_every_challenge_runs(self, loaded, track):
        engine, _ = loaded
        for name in CHALLENGE_NAMES:
            ch = Challenge(name, warmup=2, measured=10)
            report = run_challenge(engine, track, ch, seed=3)
            assert report.summary["operations"] == 10, name
            assert report.summary["mean_ops_s"] > 0

    def test_reference_context_recorded(self, loaded, track):
        engine, _ = loaded
        assert REFERENCE_THROUGHPUT_OPS_S == {
            "high-low": 164.4, "prefix": 73.2, "range": 55.9,
            "fuzzy": 23.1, "wildcard": 15.0, "agg-wc-fz": 6.7}
        report = run_challenge(
            engine, track, Challenge("fuzzy", warmup=1, measured=5), seed=3)
        assert report.metadata["reference_ops_s"] == 23.1
        assert "not a target" in report.metadata["reference_note"]

    def test_repeated_runs_report_variation(self, loaded, track):
        engine, _ = loaded
        ch = Challenge("range", warmup=10, measured=80)
        first = run_challenge(engine, track, ch, seed=3)
        second = run_challenge(engine, track, ch, seed=3)
        for report in (first, second):
            assert report.summary["window_cov"] >= 0.0
            assert report.summary["mean_ops_s"] > 0

    def test_unloaded_engine_refused(self, track, tmp_path):
        from forgetctl.engine.core import SearchEngine
        empty = SearchEngine(tmp_path / "empty")
        with pytest.raises(EngineUnavailable):
            run_challenge(empty, track, Challenge("prefix"))

    def test_wrong_track_refused(self, loaded):
        engine, _ = loaded
        other = generate_track(50, seed=99)
        with pytest.raises(EngineUnavailable):
            run_challenge(engine, other, Challenge("prefix"))

    def test_report_roundtrips_to_json(self, loaded, track, tmp_path):
        engine, _ = loaded
        report = run_challenge(
            engine, track, Challenge("prefix", warmup=2, measured=15), seed=3)
        target = tmp_path / "report.json"
        report.save(target)
        payload = json.loads(target.read_text())
        assert payload == report.to_payload()

    def test_event_outside_interval_rejected(self):
        with pytest.raises(ValueError, match="outside run interval"):
            BenchReport(
                challenge="prefix", mode="throughput", window_ms=250.0,
                started_at=100.0, finished_at=101.0, windows=[],
                events=[BenchEvent(name="cache-clear", at=250.0)],
                summary={})


class TestCleansingImpact:
    @pytest.fixture()
    def fresh(self, track, tmp_path):
        return load_engine(track, tmp_path)

    def _run(self, fresh, track, mode):
        engine, cleanser = fresh
        return cleansing_impact(
            engine, cleanser, track,
            Challenge("high-low", warmup=30), mode,
            seed=3, workers=2, baseline_s=1.0, post_event_s=1.5,
            min_duration_s=3.0)

    def test_bad_mode_rejected(self, fresh, track):
        engine, cleanser = fresh
        with pytest.raises(ValueError, match="mode"):
            cleansing_impact(engine, cleanser, track,
                             Challenge("high-low"), "drop-table")

    def test_batch_mode_shape_and_residue(self, fresh, track):
        report = self._run(fresh, track, "batch-1k")
        summary = report.summary
        assert summary["docs_deleted"] == 30  # the whole 1% subject
        assert summary["receipt_all_done"] is True
        assert summary["residue_clean"] is True
        assert summary["residue_matches"] == 0
        assert summary["baseline_ops_s"] > 0
        assert summary["trough_ops_s"] < summary["baseline_ops_s"]
        assert summary["recovery_s"] is not None
        assert report.metadata["impact_mode"] == "batch-1k"

    def test_single_doc_mode(self, fresh, track):
        report = self._run(fresh, track, "single-doc")
        assert report.summary["docs_deleted"] == 1
        assert report.summary["residue_clean"] is True

    def test_events_ordered_and_inside_run(self, fresh, track):
        report = self._run(fresh, track, "batch-1k")
        names = [e.name for e in report.events]
        assert names[0] == "cleansing-start"
        assert "cache-clear" in names
        assert "forcemerge" in names
        ats = [e.at for e in report.events]
        assert ats == sorted(ats)
        for at in ats:
            assert report.started_at <= at <= report.finished_at

    def test_plot_rendering(self, fresh, track, tmp_path):
        report = self._run(fresh, track, "batch-1k")
        target = tmp_path / "impact.png"
        render_plot(report, target)
        assert target.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
