"""
CSV, JSON and JSON-lines helpers for run artifacts.
"""

import csv
import json
import os
from typing import Any, Dict, Iterable, List, Sequence


def ensure_parent(path: str) -> None:
    """Create the parent directory of a path if needed."""
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_csv_rows(path: str, fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]]) -> str:
    """
    Write rows to a CSV file, replacing any existing file.

    Args:
        path: Output path
        fieldnames: Column order
        rows: Row dictionaries keyed by column name

    Returns:
        The path written
    """
    ensure_parent(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(row)
    return path


def append_csv_row(path: str, fieldnames: Sequence[str], row: Dict[str, Any]) -> None:
    """Append one row, writing the header first if the file is new."""
    ensure_parent(path)
    new_file = not os.path.exists(path)
    with open(path, "a", encoding="utf-8", newline="") as f:
        writer = csv.DictWriter(f, fieldnames=list(fieldnames), lineterminator="\n")
        if new_file:
            writer.writeheader()
        writer.writerow(row)


def read_csv_rows(path: str) -> List[Dict[str, str]]:
    """
    Read all rows of a CSV file.

    Args:
        path: CSV path

    Returns:
        List of row dictionaries (values are strings)
    """
    with open(path, "r", encoding="utf-8", newline="") as f:
        return list(csv.DictReader(f))


def write_json(path: str, payload: Any) -> str:
    """Write a JSON document with sorted keys."""
    ensure_parent(path)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(payload, f, indent=2, sort_keys=True)
        f.write("\n")
    return path


def read_json(path: str) -> Any:
    with open(path, "r", encoding="utf-8") as f:
        return json.load(f)


def append_jsonl(path: str, record: Dict[str, Any]) -> None:
    """Append one record to a JSON-lines file."""
    ensure_parent(path)
    with open(path, "a", encoding="utf-8") as f:
        f.write(json.dumps(record, sort_keys=True))
        f.write("\n")


def read_jsonl(path: str) -> List[Dict[str, Any]]:
    """Read a JSON-lines file; a missing file reads as empty."""
    if not os.path.exists(path):
        return []
    records = []
    with open(path, "r", encoding="utf-8") as f:
        for line in f:
            line = line.strip()
            if line:
                records.append(json.loads(line))
    return records
