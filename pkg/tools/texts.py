"""Plain-text helpers for markdown and CSV rendering."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

NOT_APPLICABLE = "-"


def escape_markdown(text: str) -> str:
    """Escape characters that would break a markdown table cell."""
    if not text:
        return text
    for char in "\\|*_`":
        text = text.replace(char, rf"\{char}")
    return text


def bold_markdown(text: str) -> str:
    """Escape *text* and wrap it in ``**...**``."""
    if not text:
        return ""
    return f"**{escape_markdown(text)}**"


def format_number(value: float | int | None, digits: int = 2) -> str:
    """Format a statistic for report tables.

    ``None`` and non-finite values become the not-applicable dash.
    """
    if value is None:
        return NOT_APPLICABLE
    if isinstance(value, int) and not isinstance(value, bool):
        return str(value)
    if not math.isfinite(value):
        return NOT_APPLICABLE
    return f"{value:.{digits}f}"


def markdown_table(headers: Sequence[str], rows: Iterable[Sequence[str]]) -> str:
    """Render a GitHub-flavoured markdown table."""
    lines = [
        "| " + " | ".join(escape_markdown(h) for h in headers) + " |",
        "|" + "|".join("---" for _ in headers) + "|",
    ]
    for row in rows:
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines)
