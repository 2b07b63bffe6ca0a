"""Deterministic CSV/JSON emission.

Identical payloads produce byte-identical files: keys are sorted, floats use
repr round-tripping, newlines are LF, and nothing time- or path-dependent is
added here.
"""
from __future__ import annotations

import json
import sys
from typing import Mapping, Sequence


def format_value(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


def render_csv(
    columns: Sequence[str],
    rows: Sequence[Mapping[str, object]],
    header_comments: Mapping[str, object] | None = None,
) -> str:
    lines = []
    if header_comments:
        for key in sorted(header_comments):
            lines.append(f"# {key} = {format_value(header_comments[key])}")
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(row[c]) for c in columns))
    return "\n".join(lines) + "\n"


def write_text(text: str, out_path: str | None) -> None:
    """Write UTF-8 with LF endings to a file, or stdout when no path given."""
    if out_path is None or out_path == "-":
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
