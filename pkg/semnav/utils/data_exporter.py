"""
Data exporter module - Exports batch summaries and episode traces
"""

import csv
import json
import math
import os
from typing import Iterable, List

SUMMARY_COLUMNS = ["config_id", "planner", "scorer", "episodes", "SR", "SPL", "mean_steps", "mean_path_m"]
_FLOAT_COLUMNS = {"SR", "SPL", "mean_steps", "mean_path_m"}


def _ensure_parent(path: str) -> None:
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)


def format_summary_row(row: dict) -> dict:
    """Fixed-precision floats so reruns produce identical files"""
    return {
        column: f"{row[column]:.6f}" if column in _FLOAT_COLUMNS else row[column]
        for column in SUMMARY_COLUMNS
    }


def export_summary_csv(rows: Iterable[dict], path: str) -> str:
    """
    Export per-configuration SR/SPL rows to CSV

    Args:
        rows: Dicts with the SUMMARY_COLUMNS keys
        path: Output file

    Returns:
        Filename of saved CSV
    """
    _ensure_parent(path)
    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.DictWriter(f, fieldnames=SUMMARY_COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in rows:
            writer.writerow(format_summary_row(row))

    print(f"✅ CSV saved: {path}")
    return path


def trace_records(result) -> List[dict]:
    """
    JSONL records for one episode: one per step, then one episode summary
    """
    base = {"scenario": result.scenario, "config_id": result.config_id}
    records = [
        {**base, "record": "step", **step.model_dump(mode="json")}
        for step in result.trace
    ]
    records.append({
        **base,
        "record": "episode",
        "success": result.success,
        "steps": result.steps,
        "agent_path_length": result.agent_path_length,
        "reachable": math.isfinite(result.oracle_shortest),
        # null when no target is reachable
        "oracle_shortest": result.oracle_shortest if math.isfinite(result.oracle_shortest) else None,
        "termination": result.termination.value,
        "error": result.error,
    })
    return records


def export_traces_jsonl(results: Iterable, path: str) -> str:
    """
    Export episode traces as JSON lines (keys sorted)

    Returns:
        Filename of saved JSONL
    """
    _ensure_parent(path)
    count = 0
    with open(path, "w", encoding="utf-8") as f:
        for result in results:
            for record in trace_records(result):
                f.write(json.dumps(record, sort_keys=True, ensure_ascii=False) + "\n")
            count += 1

    print(f"✅ JSONL saved: {path} ({count} episodes)")
    return path
