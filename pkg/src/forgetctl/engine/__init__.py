from .documents import Document, PiiTag, distinctive_tokens
from .queries import Query, QueryKind
from .core import EngineConfig, MergeReport, FlushReport, SearchEngine, SweepReport

__all__ = [
    "Document",
    "PiiTag",
    "distinctive_tokens",
    "Query",
    "QueryKind",
    "EngineConfig",
    "SearchEngine",
    "MergeReport",
    "FlushReport",
    "SweepReport",
]
