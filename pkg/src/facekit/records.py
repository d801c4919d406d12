"""Response records shared by the experiment service and the analysis stack.

One record is one presentation outcome: a keypress choice or a timeout.
Serialized as JSON lines with a stable field order so exports diff cleanly.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

CHOICES = ("North", "South", "timeout")
CONDITIONS = ("none", "eye", "nose", "mouth")
_FIELDS = (
    "session_id", "face_id", "condition", "choice",
    "correct", "rt_ms", "presented_at", "trial_index",
)


@dataclass(frozen=True)
class ResponseRecord:
    session_id: str
    face_id: str
    condition: str
    choice: str  # North | South | timeout
    correct: bool | None  # absent for timeouts
    rt_ms: float | None  # client-measured, absent for timeouts
    presented_at: float
    trial_index: int

    @property
    def answered(self) -> bool:
        return self.choice != "timeout"

    def to_json(self) -> str:
        doc = {f: getattr(self, f) for f in _FIELDS}
        return json.dumps(doc, separators=(",", ":"))

    @staticmethod
    def from_json(line: str) -> "ResponseRecord":
        doc = json.loads(line)
        return ResponseRecord(**{f: doc[f] for f in _FIELDS})


def write_jsonl(records, path) -> None:
    with open(path, "w") as fh:
        for r in records:
            fh.write(r.to_json() + "\n")


def read_jsonl(path) -> list[ResponseRecord]:
    out = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if line:
                out.append(ResponseRecord.from_json(line))
    return out
