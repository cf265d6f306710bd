"""What-if session state: a baseline mix plus a history of judged alterations.

Alterations land in the history as pending entries. Accepting one promotes
its result to the current mix, which then serves as the baseline for the
next query; rejecting leaves the current mix untouched. Entries stay in the
history either way, immutable once decided.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .alteration import AlterationRequest, AlterationResult

PENDING = "pending"
ACCEPTED = "accepted"
REJECTED = "rejected"


@dataclass
class HistoryEntry:
    request: AlterationRequest
    result: AlterationResult
    decision: str = PENDING


@dataclass
class Session:
    id: str
    scenario_ref: str
    baseline_mix: np.ndarray
    baseline_sub_mix: list[np.ndarray]
    history: list[HistoryEntry] = field(default_factory=list)
    current_mix: np.ndarray = None
    current_sub_mix: list[np.ndarray] = None

    def __post_init__(self):
        if self.current_mix is None:
            self.current_mix = np.array(self.baseline_mix, dtype=float)
        if self.current_sub_mix is None:
            self.current_sub_mix = [np.array(r, dtype=float) for r in self.baseline_sub_mix]


def record_alteration(session: Session, request: AlterationRequest, result: AlterationResult) -> int:
    """Append a solved alteration as a pending entry; returns its index."""
    session.history.append(HistoryEntry(request=request, result=result))
    return len(session.history) - 1


def apply_decision(session: Session, entry_index: int, decision: str) -> Session:
    """Accept or reject a pending entry.

    Accepting replaces the current mix with the entry's solution; rejecting
    changes nothing. Deciding a non-pending entry is an error.
    """
    if decision not in (ACCEPTED, REJECTED):
        raise ValueError(f"unknown decision {decision!r}")
    if not 0 <= entry_index < len(session.history):
        raise ValueError(f"no history entry {entry_index}")
    entry = session.history[entry_index]
    if entry.decision != PENDING:
        raise ValueError(f"entry {entry_index} already {entry.decision}")
    if decision == ACCEPTED and entry.result.status != "ok":
        raise ValueError("cannot accept an unsolved or infeasible alteration")
    entry.decision = decision
    if decision == ACCEPTED:
        session.current_mix = np.array(entry.result.new_mix, dtype=float)
        session.current_sub_mix = [np.array(r, dtype=float) for r in entry.result.new_sub_mix]
    return session


def accepted_requests(session: Session) -> list[AlterationRequest]:
    return [e.request for e in session.history if e.decision == ACCEPTED]


def session_to_dict(session: Session) -> dict:
    def res_dict(r: AlterationResult) -> dict:
        return {
            "status": r.status,
            "method": r.method,
            "new_mix": [float(v) for v in r.new_mix],
            "new_sub_mix": [[float(v) for v in row] for row in r.new_sub_mix],
            "total": None if np.isnan(r.total) else float(r.total),
            "uniform_deviation": r.uniform_deviation,
        }

    return {
        "id": session.id,
        "scenario_ref": session.scenario_ref,
        "baseline_mix": [float(v) for v in session.baseline_mix],
        "baseline_sub_mix": [[float(v) for v in row] for row in session.baseline_sub_mix],
        "current_mix": [float(v) for v in session.current_mix],
        "current_sub_mix": [[float(v) for v in row] for row in session.current_sub_mix],
        "history": [
            {
                "target_type": e.request.target_type,
                "target_subtype": e.request.target_subtype,
                "delta": e.request.delta,
                "method": e.request.method,
                "decision": e.decision,
                "result": res_dict(e.result),
            }
            for e in session.history
        ],
    }


class SessionRegistry:
    """Single-writer discipline per session id."""

    def __init__(self):
        self._sessions: dict[str, Session] = {}
        self._locks: dict[str, threading.Lock] = {}
        self._guard = threading.Lock()

    def put(self, session: Session) -> None:
        with self._guard:
            self._sessions[session.id] = session
            self._locks.setdefault(session.id, threading.Lock())

    def get(self, session_id: str) -> Optional[Session]:
        with self._guard:
            return self._sessions.get(session_id)

    def lock(self, session_id: str) -> threading.Lock:
        with self._guard:
            return self._locks.setdefault(session_id, threading.Lock())
