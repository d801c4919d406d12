import json

import pytest

from facekit.records import CHOICES, CONDITIONS, ResponseRecord, read_jsonl, write_jsonl


def make(i=0, choice="North", correct=True, rt=812.5):
    return ResponseRecord(
        session_id="s1", face_id=f"f{i}", condition="none", choice=choice,
        correct=correct, rt_ms=rt, presented_at=1000.0 + i, trial_index=i,
    )


def test_constants():
    assert CHOICES == ("North", "South", "timeout")
    assert CONDITIONS == ("none", "eye", "nose", "mouth")


def test_field_order_is_stable():
    line = make().to_json()
    keys = list(json.loads(line).keys())
    assert keys == ["session_id", "face_id", "condition", "choice",
                    "correct", "rt_ms", "presented_at", "trial_index"]


def test_roundtrip():
    rec = make(3, choice="timeout", correct=None, rt=None)
    assert not rec.answered
    back = ResponseRecord.from_json(rec.to_json())
    assert back == rec


def test_jsonl_file_roundtrip(tmp_path):
    recs = [make(i) for i in range(5)] + [make(9, "timeout", None, None)]
    path = tmp_path / "r.jsonl"
    write_jsonl(recs, path)
    assert read_jsonl(path) == recs
    # blank lines are tolerated
    path.write_text(path.read_text() + "\n\n")
    assert read_jsonl(path) == recs


def test_answered_property():
    assert make().answered
    assert not make(choice="timeout", correct=None, rt=None).answered
