"""Self-describing tables: CSV with a one-line JSON header comment, or JSON."""

from __future__ import annotations

import csv
import json
from pathlib import Path
from typing import Any, Sequence

__all__ = ["write_table", "read_table"]


def _cell(v: Any) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_table(path: str | Path, columns: Sequence[str], rows: Sequence[Sequence[Any]], meta: dict,
                fmt: str = "csv") -> Path:
    """Write ``rows`` under ``columns``; the extension follows ``fmt``."""
    path = Path(path).with_suffix("." + fmt)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "csv":
        with path.open("w", newline="") as fh:
            fh.write("# " + json.dumps(meta, sort_keys=True) + "\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(columns)
            for r in rows:
                w.writerow([_cell(v) for v in r])
    elif fmt == "json":
        data = {"meta": meta, "columns": list(columns), "rows": [list(r) for r in rows]}
        path.write_text(json.dumps(data, sort_keys=True) + "\n")
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return path


def read_table(path: str | Path) -> tuple[dict, list[str], list[list[str]]]:
    """Inverse of :func:`write_table`; CSV cells come back as strings."""
    path = Path(path)
    if path.suffix == ".json":
        data = json.loads(path.read_text())
        return data["meta"], data["columns"], data["rows"]
    with path.open(newline="") as fh:
        first = fh.readline()
        if not first.startswith("# "):
            raise ValueError("missing JSON header line")
        meta = json.loads(first[2:])
        reader = csv.reader(fh)
        columns = next(reader)
        return meta, columns, [row for row in reader]
