"""Report writers: JSON, CSV and plain-text tables.

Every report carries a single ``generated_at`` line; everything else is a pure
function of inputs and configuration.
"""
from __future__ import annotations

import csv
import json
import math
import os
from datetime import datetime, timezone

import numpy as np

STAMP_KEY = "generated_at"


def _stamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def write_json(path, payload: dict) -> None:
    body = {STAMP_KEY: _stamp(), **_clean(payload)}
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(body, fh, indent=2, sort_keys=False)
        fh.write("\n")


def write_csv(path, header, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(f"# {STAMP_KEY}: {_stamp()}\n")
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt_cell(v) for v in row])


def _fmt_cell(v):
    if isinstance(v, (float, np.floating)):
        return "" if not math.isfinite(v) else repr(float(v))
    if isinstance(v, np.integer):
        return int(v)
    return v


def format_table(title: str, header, rows) -> str:
    cells = [[_show(v) for v in row] for row in rows]
    widths = [max(len(str(h)), *(len(r[i]) for r in cells)) if cells else len(str(h))
              for i, h in enumerate(header)]
    line = "+" + "+".join("-" * (w + 2) for w in widths) + "+"
    out = [title, line, "| " + " | ".join(str(h).ljust(w) for h, w in zip(header, widths)) + " |", line]
    for r in cells:
        row = [r[0].ljust(widths[0])] + [c.rjust(w) for c, w in zip(r[1:], widths[1:])]
        out.append("| " + " | ".join(row) + " |")
    out.append(line)
    return "\n".join(out)


def _show(v) -> str:
    if v is None:
        return "-"
    if isinstance(v, (float, np.floating)):
        v = float(v)
        if not math.isfinite(v):
            return "-"
        if v != 0 and (abs(v) < 1e-3 or abs(v) >= 1e7):
            return f"{v:.4g}"
        return f"{v:.4f}"
    return str(v)


def write_text(path, tables: list[str]) -> str:
    text = "\n\n".join(tables) + "\n"
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# {STAMP_KEY}: {_stamp()}\n")
        fh.write(text)
    return text


def strip_stamp(text: str) -> str:
    """Drop the timestamp line (for reproducibility comparisons)."""
    return "".join(line for line in text.splitlines(keepends=True) if STAMP_KEY not in line)


def ensure_dir(path) -> str:
    os.makedirs(path, exist_ok=True)
    return path


def log_bins(values, base: float = 2.0) -> list[tuple[int, int]]:
    """Half-open integer bins ``[base**i, base**(i+1))`` covering ``values``."""
    vals = [v for v in values if v >= 1]
    if not vals:
        return []
    edges = [1]
    while edges[-1] <= max(vals):
        edges.append(max(edges[-1] + 1, int(math.ceil(edges[-1] * base))))
    return list(zip(edges[:-1], edges[1:]))
