"""Bookkeeping for the acceptance suite: one pass/fail line per criterion."""

from __future__ import annotations

import time
from contextlib import contextmanager

LINES: list[str] = []


class Criterion:
    """Collects the named sub-checks of one criterion."""

    def __init__(self) -> None:
        self.failed: list[str] = []
        self.notes: list[str] = []

    def check(self, condition: bool, label: str) -> bool:
        if not condition:
            self.failed.append(label)
        return condition

    def note(self, text: str) -> None:
        self.notes.append(text)


@contextmanager
def criterion(number: int, title: str):
    """Run one criterion, record its line, and fail the test if any check failed."""
    state = Criterion()
    start = time.perf_counter()
    error: BaseException | None = None
    try:
        yield state
    except Exception as exc:  # recorded as a failure, then re-raised below
        error = exc
    elapsed = time.perf_counter() - start
    ok = error is None and not state.failed
    detail = "; ".join(state.notes)
    if error is not None:
        detail = f"error: {type(error).__name__}: {error}"
    elif state.failed:
        detail = "failed: " + ", ".join(state.failed)
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'}  {title} [{elapsed:.1f}s] {detail}".rstrip()
    LINES.append(line)
    print(line)
    if error is not None:
        raise error
    assert ok, line
