"""Session state and response persistence for the experiment service.

One directory holds everything: ``index.json`` with immutable session
metadata, and one append-only JSONL response log per session.  The pending
trial queue is never written to disk; it is a pure function of the session
seed and the response log, so a restart replays the log and lands in the
same state.  A crash loses at most the one in-flight (served, unanswered)
trial, which simply gets served again.
"""

from __future__ import annotations

import json
import threading
import time
import uuid
from collections import deque
from dataclasses import dataclass, field
from itertools import permutations
from pathlib import Path

import numpy as np

from facekit.errors import (
    DuplicateActiveSession,
    DuplicateSubmission,
    RtOutOfRange,
    SessionComplete,
    UnknownFaceId,
    UnknownSession,
    UnknownTrial,
)
from facekit.occlusion import ConditionDesign
from facekit.records import CHOICES, CONDITIONS, ResponseRecord

DESIGNS = ("plain_race", "occlusion")
MAX_RT_MS = 5000.0
REQUEUE_LO, REQUEUE_HI = 3, 10

# all 4! block orders, lexicographic; subject n gets row n mod 24
BLOCK_ORDERS: tuple[tuple[str, ...], ...] = tuple(sorted(permutations(CONDITIONS)))


def requeue_offset(session_seed: int, trial_index: int) -> int:
    """How many pending trials to skip before re-serving a timed-out face.

    Stateless: derived from the seed and the timed-out presentation's index,
    so log replay reproduces the exact queue without storing it.
    """
    rng = np.random.default_rng((session_seed, trial_index))
    return int(rng.integers(REQUEUE_LO, REQUEUE_HI + 1))


@dataclass
class Session:
    session_id: str
    subject_id: str
    design: str
    block_order: tuple[str, ...]
    seed: int
    created_at: float
    pending: deque = field(repr=False)
    next_index: int = 0
    in_flight: tuple[int, str, str] | None = None  # (trial_index, face, cond)
    state: str = "active"

    @property
    def complete(self) -> bool:
        return self.state == "complete"


class SessionStore:
    """Creates sessions, schedules trials, and persists responses.

    ``labels`` maps face_id to its ground-truth choice ("North"/"South");
    correctness is computed here and never returned from submit.  Plain
    sessions schedule every labeled face once (or ``schedule_size`` of them);
    occlusion sessions need a ConditionDesign and run 4 blocks of 217.
    """

    def __init__(self, root, labels: dict[str, str],
                 occlusion_design: ConditionDesign | None = None,
                 schedule_size: int | None = None):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        (self.root / "sessions").mkdir(exist_ok=True)
        for fid, lab in labels.items():
            if lab not in CHOICES[:2]:
                raise UnknownFaceId(f"label for {fid!r} must be North or South, got {lab!r}")
        self.labels = dict(labels)
        self.design = occlusion_design
        self.schedule_size = schedule_size
        self._sessions: dict[str, Session] = {}
        self._lock = threading.Lock()
        self._load()

    # -- persistence --------------------------------------------------------

    def _index_path(self) -> Path:
        return self.root / "index.json"

    def _log_path(self, session_id: str) -> Path:
        return self.root / "sessions" / f"{session_id}.jsonl"

    def _write_index(self) -> None:
        doc = {
            "version": 1,
            "sessions": [
                {
                    "session_id": s.session_id,
                    "subject_id": s.subject_id,
                    "design": s.design,
                    "block_order": list(s.block_order),
                    "seed": s.seed,
                    "created_at": s.created_at,
                    "state": s.state,
                }
                for s in self._sessions.values()
            ],
        }
        tmp = self._index_path().with_suffix(".json.tmp")
        tmp.write_text(json.dumps(doc, indent=2, sort_keys=True))
        tmp.replace(self._index_path())

    def _load(self) -> None:
        path = self._index_path()
        if not path.exists():
            return
        doc = json.loads(path.read_text())
        for meta in doc["sessions"]:
            s = Session(
                session_id=meta["session_id"],
                subject_id=meta["subject_id"],
                design=meta["design"],
                block_order=tuple(meta["block_order"]),
                seed=meta["seed"],
                created_at=meta["created_at"],
                pending=self._build_queue(meta["design"], tuple(meta["block_order"]), meta["seed"]),
            )
            self._replay(s)
            self._sessions[s.session_id] = s

    def _replay(self, session: Session) -> None:
        """Re-derive queue position from the append-only response log."""
        path = self._log_path(session.session_id)
        if not path.exists():
            return
        with open(path) as fh:
            for line in fh:
                line = line.strip()
                if not line:
                    continue
                rec = ResponseRecord.from_json(line)
                face, cond = session.pending.popleft()
                session.next_index += 1
                if rec.face_id != face or rec.condition != cond:
                    raise UnknownTrial(
                        f"log/queue divergence in {session.session_id} "
                        f"at trial {rec.trial_index}"
                    )
                if not rec.answered:
                    self._reinsert(session, rec.trial_index, face, cond)
        if not session.pending:
            session.state = "complete"

    # -- scheduling ---------------------------------------------------------

    def _build_queue(self, design: str, block_order: tuple[str, ...], seed: int) -> deque:
        rng = np.random.default_rng(seed)
        queue: deque = deque()
        if design == "plain_race":
            faces = sorted(self.labels)
            if self.schedule_size is not None and self.schedule_size < len(faces):
                take = rng.choice(len(faces), size=self.schedule_size, replace=False)
                faces = [faces[i] for i in sorted(take)]
            for i in rng.permutation(len(faces)):
                queue.append((faces[i], "none"))
        elif design == "occlusion":
            if self.design is None:
                raise UnknownSession("store has no occlusion design configured")
            for cond in block_order:
                faces = list(self.design.faces_for(cond))
                for i in rng.permutation(len(faces)):
                    queue.append((faces[i], cond))
        else:
            raise UnknownSession(f"unknown design {design!r}")
        return queue

    @staticmethod
    def _reinsert(session: Session, trial_index: int, face: str, cond: str) -> None:
        offset = requeue_offset(session.seed, trial_index)
        pos = min(offset - 1, len(session.pending))
        session.pending.insert(pos, (face, cond))

    # -- operations ---------------------------------------------------------

    def create_session(self, subject_id: str, design: str, seed: int) -> Session:
        if design not in DESIGNS:
            raise UnknownSession(f"design must be one of {DESIGNS}, got {design!r}")
        with self._lock:
            for s in self._sessions.values():
                if s.subject_id == subject_id and s.state == "active":
                    raise DuplicateActiveSession(
                        f"subject {subject_id!r} already has active session {s.session_id}"
                    )
            if design == "occlusion":
                n_prior = sum(1 for s in self._sessions.values() if s.design == "occlusion")
                block_order = BLOCK_ORDERS[n_prior % len(BLOCK_ORDERS)]
            else:
                block_order = ("none",)
            session = Session(
                session_id=uuid.uuid4().hex[:12],
                subject_id=subject_id,
                design=design,
                block_order=block_order,
                seed=seed,
                created_at=time.time(),
                pending=self._build_queue(design, block_order, seed),
            )
            self._sessions[session.session_id] = session
            self._log_path(session.session_id).touch()
            self._write_index()
            return session

    def _get(self, session_id: str) -> Session:
        try:
            return self._sessions[session_id]
        except KeyError:
            raise UnknownSession(f"no session {session_id!r}") from None

    def next_trial(self, session_id: str) -> dict:
        """Trial descriptor for the client.  Re-polling before a submission
        returns the same descriptor; correctness is never included."""
        with self._lock:
            s = self._get(session_id)
            if s.complete:
                raise SessionComplete(session_id)
            if s.in_flight is None:
                if not s.pending:
                    s.state = "complete"
                    self._write_index()
                    raise SessionComplete(session_id)
                face, cond = s.pending.popleft()
                s.in_flight = (s.next_index, face, cond)
                s.next_index += 1
            idx, face, cond = s.in_flight
            return {
                "trial_index": idx,
                "face_id": face,
                "condition": cond,
                "stimulus_url": f"/stimuli/{face}?condition={cond}",
                "remaining": len(s.pending) + 1,
            }

    def submit_response(self, session_id: str, trial_index: int, choice: str,
                        rt_ms: float | None, presented_at: float | None = None) -> dict:
        if choice not in CHOICES:
            raise UnknownTrial(f"choice must be one of {CHOICES}, got {choice!r}")
        with self._lock:
            s = self._get(session_id)
            if s.in_flight is None or trial_index != s.in_flight[0]:
                if trial_index < s.next_index:
                    raise DuplicateSubmission(f"trial {trial_index} already resolved")
                raise UnknownTrial(f"trial {trial_index} was never served")
            _, face, cond = s.in_flight
            answered = choice != "timeout"
            if answered:
                if rt_ms is None or not (0.0 <= float(rt_ms) <= MAX_RT_MS):
                    raise RtOutOfRange(f"rt_ms {rt_ms!r} outside [0, {MAX_RT_MS:.0f}]")
                correct = bool(choice == self.labels.get(face))
                rt_val = float(rt_ms)
            else:
                correct = None
                rt_val = None
            rec = ResponseRecord(
                session_id=session_id,
                face_id=face,
                condition=cond,
                choice=choice,
                correct=correct,
                rt_ms=rt_val,
                presented_at=float(presented_at) if presented_at is not None else time.time(),
                trial_index=trial_index,
            )
            with open(self._log_path(session_id), "a") as fh:
                fh.write(rec.to_json() + "\n")
            s.in_flight = None
            if not answered:
                self._reinsert(s, trial_index, face, cond)
            if not s.pending:
                s.state = "complete"
                self._write_index()
            # the ack tells the client where it stands and nothing about
            # whether the choice was right
            return {
                "trial_index": trial_index,
                "recorded": True,
                "remaining": len(s.pending),
                "complete": s.complete,
            }

    def export_session(self, session_id: str) -> list[ResponseRecord]:
        self._get(session_id)
        path = self._log_path(session_id)
        out: list[ResponseRecord] = []
        if path.exists():
            with open(path) as fh:
                for line in fh:
                    line = line.strip()
                    if line:
                        out.append(ResponseRecord.from_json(line))
        return out

    def sessions(self) -> list[Session]:
        return list(self._sessions.values())
