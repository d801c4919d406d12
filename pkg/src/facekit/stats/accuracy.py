"""Per-face response aggregation.

Timed-out presentations never count toward accuracy.  When a face was shown
to the same subject more than once (timeouts re-queue it), only the last
answered presentation counts, so each (subject, face) pair contributes at
most one response.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from facekit.records import ResponseRecord


@dataclass(frozen=True)
class FaceAccuracy:
    n_responses: int
    n_correct: int

    @property
    def accuracy(self) -> float:
        return self.n_correct / self.n_responses


def per_face_accuracy(responses: list[ResponseRecord],
                      face_ids=None) -> tuple[dict[str, FaceAccuracy], list[str]]:
    """Aggregate responses by face.

    Returns the per-face accuracy table and a list of warnings naming faces
    (from ``face_ids``, when given) that received no answered responses.
    """
    last: dict[tuple[str, str], ResponseRecord] = {}
    for rec in responses:
        if not rec.answered:
            continue
        key = (rec.session_id, rec.face_id)
        prev = last.get(key)
        if prev is None or rec.trial_index > prev.trial_index:
            last[key] = rec
    counts: dict[str, list[int]] = {}
    for rec in last.values():
        c = counts.setdefault(rec.face_id, [0, 0])
        c[0] += 1
        c[1] += int(bool(rec.correct))
    table = {
        fid: FaceAccuracy(n_responses=c[0], n_correct=c[1])
        for fid, c in sorted(counts.items())
    }
    warnings = []
    if face_ids is not None:
        for fid in face_ids:
            if fid not in table:
                warnings.append(f"face {fid}: no answered responses, excluded")
    return table, warnings


def accuracy_vector(table: dict[str, FaceAccuracy], face_ids) -> np.ndarray:
    """Accuracies in a fixed face order; faces absent from the table error."""
    return np.array([table[f].accuracy for f in face_ids])


def mean_accuracy(table: dict[str, FaceAccuracy]) -> float:
    if not table:
        return float("nan")
    return float(np.mean([e.accuracy for e in table.values()]))
