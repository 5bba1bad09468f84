"""Corpus summaries: per-category counts, task distribution, treemap export.

Counts are per category citation, not per case: a case citing two categories
counts once in each, so the column sum can exceed the number of cases. The
treemap is a slice-and-dice layout, tasks as vertical slices sized by their
share of citations, categories stacked inside their task's slice.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

from .cases import Category, EnforcementCase, RtbfTask

TASK_COLORS = {
    RtbfTask.SUBJECT_INTERFACE: "#4e79a7",
    RtbfTask.POLICY_RESOLUTION: "#59a14f",
    RtbfTask.PROCESSING_ERASURE: "#f28e2b",
    RtbfTask.STORAGE_ERASURE: "#e15759",
}


@dataclass(frozen=True)
class CorpusSummary:
    category_counts: dict[Category, int]
    uncategorized: int
    total_cases: int

    @property
    def citations(self) -> int:
        return sum(self.category_counts.values())

    @property
    def task_counts(self) -> dict[RtbfTask, int]:
        counts = {task: 0 for task in RtbfTask}
        for category, n in self.category_counts.items():
            counts[category.rtbf_task] += n
        return counts

    @property
    def task_shares(self) -> dict[RtbfTask, float]:
        total = self.citations
        if total == 0:
            return {task: 0.0 for task in RtbfTask}
        return {task: n / total for task, n in self.task_counts.items()}

    def to_payload(self) -> dict:
        return {
            "category_counts": {c.value: n for c, n in self.category_counts.items()},
            "uncategorized": self.uncategorized,
            "total_cases": self.total_cases,
            "citations": self.citations,
            "task_counts": {t.value: n for t, n in self.task_counts.items()},
            "task_shares": {t.value: round(s, 4) for t, s in self.task_shares.items()},
        }


def summarize(corpus: tuple[EnforcementCase, ...]) -> CorpusSummary:
    counts = {category: 0 for category in Category}
    uncategorized = 0
    for case in corpus:
        if case.uncategorized:
            uncategorized += 1
            continue
        for category in case.categories:
            counts[category] += 1
    return CorpusSummary(category_counts=counts, uncategorized=uncategorized,
                         total_cases=len(corpus))


# ---------------------------------------------------------------------------
# treemap
# ---------------------------------------------------------------------------

WIDTH, HEIGHT = 1000.0, 600.0


def treemap_layout(summary: CorpusSummary) -> dict:
    """Slice by task, dice by category; box area tracks citation count."""
    citations = summary.citations
    boxes = []
    x = 0.0
    for task in RtbfTask:
        task_count = summary.task_counts[task]
        if citations == 0 or task_count == 0:
            continue
        slice_width = WIDTH * task_count / citations
        y = 0.0
        for category in Category:
            if category.rtbf_task is not task:
                continue
            count = summary.category_counts[category]
            if count == 0:
                continue
            box_height = HEIGHT * count / task_count
            boxes.append({
                "category": category.value,
                "task": task.value,
                "count": count,
                "color": TASK_COLORS[task],
                "rect": [round(x, 2), round(y, 2),
                         round(slice_width, 2), round(box_height, 2)],
            })
            y += box_height
        x += slice_width
    return {"width": WIDTH, "height": HEIGHT, "citations": citations,
            "boxes": boxes}


def render_svg(layout: dict) -> str:
    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" '
        f'viewBox="0 0 {layout["width"]:.0f} {layout["height"]:.0f}" '
        f'font-family="sans-serif">',
    ]
    for box in layout["boxes"]:
        bx, by, bw, bh = box["rect"]
        parts.append(
            f'<rect x="{bx}" y="{by}" width="{bw}" height="{bh}" '
            f'fill="{box["color"]}" stroke="#ffffff" stroke-width="2"/>')
        if bw > 60 and bh > 26:  # labels only where they fit
            parts.append(
                f'<text x="{bx + 6}" y="{by + 18}" font-size="13" '
                f'fill="#ffffff">{box["category"]} ({box["count"]})</text>')
    parts.append("</svg>")
    return "\n".join(parts)


def export_treemap(summary: CorpusSummary, json_path: Path,
                   svg_path: Path) -> dict:
    layout = treemap_layout(summary)
    Path(json_path).write_text(json.dumps(layout, indent=1) + "\n")
    Path(svg_path).write_text(render_svg(layout) + "\n")
    return layout
