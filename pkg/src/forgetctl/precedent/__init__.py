from .cases import (
    Category,
    EnforcementCase,
    RtbfTask,
    TAG_VOCABULARY,
    bundled_corpus,
    bundled_year6,
    load_corpus,
    save_corpus,
)
from .linter import AntiPatternFinding, lint, lint_file, load_system_config
from .matching import MatchResult, match_all, match_case, tally
from .summary import (
    CorpusSummary,
    export_treemap,
    render_svg,
    summarize,
    treemap_layout,
)

__all__ = [
    "AntiPatternFinding",
    "Category",
    "CorpusSummary",
    "EnforcementCase",
    "MatchResult",
    "RtbfTask",
    "TAG_VOCABULARY",
    "bundled_corpus",
    "bundled_year6",
    "export_treemap",
    "lint",
    "lint_file",
    "load_corpus",
    "load_system_config",
    "match_all",
    "match_case",
    "render_svg",
    "save_corpus",
    "summarize",
    "tally",
    "treemap_layout",
]
