"""Speedscope evented-profile export of a critical path."""

import json
from typing import Any, Dict, List, Sequence, Tuple

from loguru import logger

from .core.scheduler import PathEntry

SPEEDSCOPE_SCHEMA = "https://www.speedscope.app/file-format-schema.json"
FILE_SUFFIX = ".speedscope.json"
_UNITS = ("none", "nanoseconds", "microseconds", "milliseconds", "seconds", "bytes")


class _FrameTable:
    """Deduplicated frame names in first-seen order."""

    def __init__(self) -> None:
        self.names: List[str] = []
        self._index: Dict[str, int] = {}

    def index(self, name: str) -> int:
        if name not in self._index:
            self._index[name] = len(self.names)
            self.names.append(name)
        return self._index[name]


def _common_prefix(a: Sequence[Tuple[str, int]], b: Sequence[Tuple[str, int]]) -> int:
    n = 0
    for x, y in zip(a, b):
        if x != y:
            break
        n += 1
    return n


def build_document(path: Sequence[PathEntry], depth: int, name: str) -> Dict[str, Any]:
    """Speedscope document for ``path``.

    Consecutive instructions from the same call share their common stack
    prefix, so a subroutine call shows up as a single flame. Separate calls of
    one operation get separate flames under the same frame name.
    """
    frames = _FrameTable()
    events: List[Dict[str, Any]] = []
    open_stack: List[Tuple[str, int]] = []
    clock = 0

    def close_to(keep: int, at: int) -> None:
        while len(open_stack) > keep:
            frame, _ = open_stack.pop()
            events.append({"type": "C", "frame": frames.index(frame), "at": at})

    for entry in path:
        if entry.start < clock or entry.finish < entry.start:
            raise ValueError(
                f"overlapping spans: instruction {entry.index} [{entry.start}, {entry.finish})"
                f" starts before {clock}"
            )
        activations = entry.activations or tuple(range(len(entry.stack)))
        stack = list(zip(entry.stack, activations))
        if entry.start > clock:
            close_to(0, clock)
        keep = _common_prefix(open_stack, stack)
        close_to(keep, entry.start)
        for frame in stack[keep:]:
            events.append({"type": "O", "frame": frames.index(frame[0]), "at": entry.start})
            open_stack.append(frame)
        clock = entry.finish
    close_to(0, clock)

    return {
        "$schema": SPEEDSCOPE_SCHEMA,
        "shared": {"frames": [{"name": n} for n in frames.names]},
        "profiles": [
            {
                "type": "evented",
                "name": name,
                "unit": "none",
                "startValue": 0,
                "endValue": depth,
                "events": events,
            }
        ],
    }


def to_speedscope(path: Sequence[PathEntry], depth: int, name: str) -> str:
    """Serialize the critical path as speedscope JSON text."""
    doc = build_document(path, depth, name)
    logger.debug(
        f"[FLAME] {name}: {len(doc['shared']['frames'])} frames,"
        f" {len(doc['profiles'][0]['events'])} events, endValue {depth}"
    )
    return json.dumps(doc, indent=2)


def validate_document(doc: Dict[str, Any]) -> List[str]:
    """Structural checks mirroring the speedscope file-format schema for evented profiles.

    Returns a list of problems; empty when the document is well formed.
    """
    problems: List[str] = []
    if doc.get("$schema") != SPEEDSCOPE_SCHEMA:
        problems.append("missing or wrong $schema")
    frames = doc.get("shared", {}).get("frames")
    if not isinstance(frames, list) or not all(
        isinstance(f, dict) and isinstance(f.get("name"), str) for f in frames
    ):
        problems.append("shared.frames must be a list of {name: string}")
        frames = []
    profiles = doc.get("profiles")
    if not isinstance(profiles, list) or not profiles:
        return problems + ["profiles must be a nonempty list"]
    for p, profile in enumerate(profiles):
        for key in ("type", "name", "unit", "startValue", "endValue", "events"):
            if key not in profile:
                problems.append(f"profile {p}: missing {key}")
        if profile.get("type") != "evented":
            problems.append(f"profile {p}: type must be 'evented'")
        if profile.get("unit") not in _UNITS:
            problems.append(f"profile {p}: bad unit {profile.get('unit')!r}")
        open_frames: List[int] = []
        last = profile.get("startValue", 0)
        for e, event in enumerate(profile.get("events", [])):
            at = event.get("at")
            frame = event.get("frame")
            if event.get("type") not in ("O", "C") or not isinstance(at, (int, float)):
                problems.append(f"profile {p} event {e}: malformed")
                continue
            if not isinstance(frame, int) or not 0 <= frame < len(frames):
                problems.append(f"profile {p} event {e}: frame index out of range")
            if at < last:
                problems.append(f"profile {p} event {e}: timestamps decrease")
            last = at
            if event["type"] == "O":
                open_frames.append(frame)
            elif not open_frames or open_frames.pop() != frame:
                problems.append(f"profile {p} event {e}: close does not match innermost open")
        if open_frames:
            problems.append(f"profile {p}: {len(open_frames)} unclosed frame(s)")
        if last > profile.get("endValue", 0):
            problems.append(f"profile {p}: events past endValue")
    return problems


def replay(doc: Dict[str, Any]) -> Dict[int, List[str]]:
    """Stack of frame names covering each unit interval ``[t, t+1)`` of the first profile."""
    names = [f["name"] for f in doc["shared"]["frames"]]
    profile = doc["profiles"][0]
    covering: Dict[int, List[str]] = {}
    stack: List[str] = []
    events = profile["events"]
    for i, event in enumerate(events):
        if event["type"] == "O":
            stack.append(names[event["frame"]])
        else:
            stack.pop()
        nxt = events[i + 1]["at"] if i + 1 < len(events) else profile["endValue"]
        for t in range(event["at"], nxt):
            covering[t] = list(stack)
    return {t: s for t, s in covering.items() if s}
