"""Experiment service: session scheduling, response persistence, HTTP API."""

from facekit.service.store import BLOCK_ORDERS, Session, SessionStore, requeue_offset

__all__ = ["BLOCK_ORDERS", "Session", "SessionStore", "requeue_offset"]
