"""Document store with verifiable erasure.

The package couples a small segment-based search engine with the machinery
needed to honor erasure requests end to end: a cleansing-delete orchestrator
that chases data copies across every auxiliary surface (caches, write-ahead
log, snapshots, event logs, replica), an independent byte-scan verifier, a
policy engine for erasure grounds and exemptions, a request lifecycle service
with an HTTP API, an enforcement-precedent corpus with a config linter, and a
benchmark harness for measuring cleansing impact on query throughput.
"""

__version__ = "0.1.0"
