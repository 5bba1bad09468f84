"""Synthetic Q&A corpus generator for the benchmark harness.

Documents look like forum posts: a dated, tagged title/body pair with two
personal author fields and one embedded 16-hex sentinel. Body tokens are
drawn from a Zipf distribution over a synthetic vocabulary, so term
frequencies span the high/low range the query challenges need. Everything is
a pure function of (seed, size): same inputs, byte-identical corpus.

Roughly one document in a hundred belongs to a single designated subject
whose erasure the impact experiment later requests. Those documents sit in
short consecutive runs rather than uniformly at random: a subject's posts
cluster in time, and the clustering keeps the later segment rewrite from
touching every segment on disk.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from datetime import date, timedelta

import numpy as np

from ..engine.documents import Document, PiiTag

ZIPF_EXPONENT = 1.15
VOCAB_SIZE = 4096
TARGET_SUBJECT = "erase-target-subject"
SOLO_SUBJECT = "erase-single-doc-author"
TRACK_PURPOSE = "qa-forum"

# target docs come in runs of TARGET_RUN docs every TARGET_STRIDE docs: 1%
TARGET_RUN = 50
TARGET_STRIDE = 5_000

_SYLLABLES = (
    "ar", "ben", "cor", "dal", "en", "for", "gra", "hul", "in", "jor",
    "kel", "lum", "mar", "nor", "ol", "per", "qua", "rin", "sol", "tur",
    "ul", "ver", "wes", "xan", "yor", "zel", "ba", "ce", "di", "fo",
    "gu", "ha",
)

_TAG_WORDS = (
    "indexing", "storage", "queries", "replication", "caching", "logging",
    "snapshots", "tuning", "schema", "migration", "security", "backup",
    "sharding", "parsing", "testing", "deployment", "monitoring", "upgrade",
    "encoding", "compression", "routing", "scaling", "recovery", "auth",
)

_EPOCH_DATE = date(2019, 1, 1)
_DATE_SPAN_DAYS = 1460  # four years of post dates


@dataclass(frozen=True)
class Track:
    """A generated corpus plus the knowledge needed to query it."""

    documents: tuple[Document, ...]
    seed: int
    size: int
    vocabulary: tuple[str, ...]  # probability-descending order
    zipf_exponent: float = ZIPF_EXPONENT

    @property
    def target_subject(self) -> str:
        return TARGET_SUBJECT

    @property
    def target_doc_ids(self) -> tuple[str, ...]:
        return tuple(
            doc.doc_id for doc in self.documents
            if TARGET_SUBJECT in doc.subject_ids()
        )

    @property
    def solo_doc_id(self) -> str:
        """The one document whose author wrote nothing else.

        Deleting a single document can only end residue-clean when no other
        live document shares its personal values, so the single-doc impact
        mode targets this one. Tiny tracks fall back to the first target
        document, whose subject then also owns exactly one document.
        """
        last = self.documents[-1]
        if SOLO_SUBJECT in last.subject_ids():
            return last.doc_id
        return self.target_doc_ids[0]

    def token_probabilities(self) -> np.ndarray:
        """Declared sampling distribution over self.vocabulary, by rank."""
        return _zipf_probabilities(len(self.vocabulary), self.zipf_exponent)

    def fingerprint(self) -> str:
        digest = hashlib.sha256()
        for doc in self.documents:
            digest.update(doc.doc_id.encode())
            for name in sorted(doc.fields):
                digest.update(name.encode())
                digest.update(doc.fields[name].encode())
            for name in sorted(doc.pii_tags):
                tag = doc.pii_tags[name]
                digest.update(f"{name}:{tag.subject_id}:{tag.purpose}".encode())
        return digest.hexdigest()


def _zipf_probabilities(vocab_size: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, vocab_size + 1, dtype=np.float64)
    weights = ranks ** -exponent
    return weights / weights.sum()


def _build_vocabulary(rng: np.random.Generator) -> tuple[str, ...]:
    words: list[str] = []
    seen: set[str] = set()
    while len(words) < VOCAB_SIZE:
        count = int(rng.integers(2, 5))
        parts = rng.integers(0, len(_SYLLABLES), size=count)
        word = "".join(_SYLLABLES[p] for p in parts)
        if word in seen:
            word = f"{word}{_SYLLABLES[int(rng.integers(0, len(_SYLLABLES)))]}"
        if word in seen:
            continue
        seen.add(word)
        words.append(word)
    return tuple(words)


def _is_target(index: int, size: int) -> bool:
    """Runs of TARGET_RUN per TARGET_STRIDE, truncated to ~1% of the track."""
    budget = max(1, size // 100)
    run_no, offset = divmod(index, TARGET_STRIDE)
    if offset >= TARGET_RUN:
        return False
    return run_no * TARGET_RUN + offset < budget


def _sentinel(seed: int, index: int) -> str:
    return hashlib.blake2b(f"{seed}:{index}".encode(), digest_size=8).hexdigest()


def generate_track(size: int, seed: int) -> Track:
    if size < 1:
        raise ValueError("track size must be >= 1")
    rng = np.random.default_rng(seed)
    vocabulary = _build_vocabulary(rng)
    vocab_arr = np.array(vocabulary)
    probs = _zipf_probabilities(VOCAB_SIZE, ZIPF_EXPONENT)

    title_lens = rng.integers(3, 6, size=size)
    body_lens = rng.integers(18, 31, size=size)
    total = int(title_lens.sum() + body_lens.sum())
    token_ranks = rng.choice(VOCAB_SIZE, size=total, p=probs)
    tokens = vocab_arr[token_ranks]

    tag_counts = rng.integers(1, 4, size=size)
    tag_picks = rng.integers(0, len(_TAG_WORDS), size=int(tag_counts.sum()))
    day_offsets = rng.integers(0, _DATE_SPAN_DAYS, size=size)
    votes = rng.integers(0, 500, size=size)
    subject_count = max(1, size // 20)
    subject_picks = rng.integers(0, subject_count, size=size)

    documents: list[Document] = []
    sentinels: set[str] = set()
    cursor = 0
    tag_cursor = 0
    for i in range(size):
        t_len = int(title_lens[i])
        b_len = int(body_lens[i])
        title = " ".join(tokens[cursor:cursor + t_len])
        body_words = list(tokens[cursor + t_len:cursor + t_len + b_len])
        cursor += t_len + b_len

        sentinel = _sentinel(seed, i)
        if sentinel in sentinels:
            raise AssertionError(f"sentinel collision at doc {i}")
        sentinels.add(sentinel)
        body_words.insert(len(body_words) // 2, sentinel)

        n_tags = int(tag_counts[i])
        tags = " ".join(sorted({
            _TAG_WORDS[tag_picks[tag_cursor + j]] for j in range(n_tags)
        }))
        tag_cursor += n_tags

        if _is_target(i, size):
            subject = TARGET_SUBJECT
        elif i == size - 1:
            subject = SOLO_SUBJECT
        else:
            subject = f"user-{int(subject_picks[i]):05d}"
        author_tag = PiiTag(subject_id=subject, purpose=TRACK_PURPOSE)

        posted = _EPOCH_DATE + timedelta(days=int(day_offsets[i]))
        documents.append(Document(
            doc_id=f"post-{i:06d}",
            fields={
                "title": title,
                "body": " ".join(body_words),
                "tags": tags,
                "date": posted.isoformat(),
                "votes": f"{int(votes[i]):04d}",
                "author_name": subject,
                "author_email": f"{subject}@track.example",
            },
            pii_tags={"author_name": author_tag, "author_email": author_tag},
        ))
    return Track(documents=tuple(documents), seed=seed, size=size,
                 vocabulary=vocabulary)
