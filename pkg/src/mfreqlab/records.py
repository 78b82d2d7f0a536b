"""Experiment records: JSON-lines persistence and plain reports."""

from __future__ import annotations

import csv
import json
import threading
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import __version__

PARAM_KEYS = ("N", "n", "s", "kappa", "eps1", "d", "q", "r", "size_xi", "seed")


@dataclass
class ExperimentRecord:
    experiment: str
    params: dict
    measured: dict
    wall_time: float = 0.0
    version: str = field(default_factory=lambda: __version__)
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return _plain(asdict(self))

    @classmethod
    def from_json(cls, obj) -> "ExperimentRecord":
        return cls(**obj)


def _plain(obj):
    """Convert numpy scalars/arrays and tuples into JSON-native values."""
    if isinstance(obj, dict):
        return {str(k): _plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_plain(v) for v in obj]
    if hasattr(obj, "tolist"):
        return _plain(obj.tolist())
    if isinstance(obj, complex):
        return [obj.real, obj.imag]
    return obj


class RecordStore:
    """Append-only JSON-lines file with a single serialized writer."""

    def __init__(self, path):
        self.path = Path(path)
        self._lock = threading.Lock()

    def append(self, rec: ExperimentRecord) -> None:
        line = json.dumps(rec.to_json(), sort_keys=True)
        with self._lock:
            self.path.parent.mkdir(parents=True, exist_ok=True)
            with open(self.path, "a") as fh:
                fh.write(line + "\n")

    def load(self) -> list[ExperimentRecord]:
        if not self.path.exists():
            return []
        out = []
        with open(self.path) as fh:
            for line in fh:
                if line.strip():
                    out.append(ExperimentRecord.from_json(json.loads(line)))
        return out


def _scalar_items(d: dict, prefix=""):
    for k, v in d.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            yield from _scalar_items(v, key + ".")
        elif isinstance(v, (int, float, str, bool)) or v is None:
            yield key, v


def write_report(records, out_dir) -> dict:
    """One CSV per experiment kind plus ``summary.txt``; returns the paths written."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    by_kind: dict = {}
    for rec in records:
        by_kind.setdefault(rec.experiment, []).append(rec)
    written = {}
    lines = []
    for kind, recs in sorted(by_kind.items()):
        rows = []
        for rec in recs:
            row = {"wall_time": rec.wall_time, "version": rec.version}
            row.update({f"param.{k}": v for k, v in _scalar_items(rec.params)})
            row.update({f"measured.{k}": v for k, v in _scalar_items(rec.measured)})
            rows.append(row)
        cols = sorted({c for r in rows for c in r})
        path = out_dir / f"{kind}.csv"
        with open(path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=cols)
            w.writeheader()
            w.writerows(rows)
        written[kind] = str(path)
        lines.append(f"== {kind}: {len(recs)} record(s)")
        for rec in recs:
            head = ", ".join(f"{k}={v}" for k, v in _scalar_items(rec.params) if k in PARAM_KEYS or k == "kind")
            lines.append(f"  [{head}]")
            for k, v in _scalar_items(rec.measured):
                lines.append(f"    {k}: {v}")
            for note in rec.notes:
                lines.append(f"    note: {note}")
    summary = out_dir / "summary.txt"
    summary.write_text("\n".join(lines) + "\n")
    written["summary"] = str(summary)
    return written
