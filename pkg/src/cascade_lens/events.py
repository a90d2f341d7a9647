"""Engagement events and the time-ordered event log."""
from __future__ import annotations

import json
from collections import defaultdict
from dataclasses import dataclass, field, replace
from typing import Iterable

from .errors import EmptyInputError, ParseError, UnsortedLogError

ORIGINAL = "original"
RETWEET = "retweet"


@dataclass(frozen=True, slots=True)
class Event:
    event_id: int
    user: int
    timestamp: int
    kind: str = ORIGINAL
    parent_event_id: int | None = None
    tokens: frozenset[str] = frozenset()

    @property
    def is_retweet(self) -> bool:
        return self.kind == RETWEET

    def sort_key(self) -> tuple[int, int]:
        return (self.timestamp, self.event_id)


@dataclass(frozen=True, eq=False)
class EventLog:
    """Events in ``(timestamp, event_id)`` order.

    A retweet parent is *resolved* only when it names an event with a strictly
    earlier timestamp; anything else lands in ``unresolved``.
    """

    events: tuple[Event, ...]
    unresolved: frozenset[int] = frozenset()
    _by_id: dict = field(default_factory=dict, repr=False)
    _by_user: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        prev = None
        for ev in self.events:
            key = ev.sort_key()
            if prev is not None and key <= prev:
                if key == prev:
                    raise ParseError(f"duplicate event_id {ev.event_id}")
                raise UnsortedLogError(f"event {ev.event_id} out of (timestamp, event_id) order")
            prev = key
            if ev.event_id in self._by_id:
                raise ParseError(f"duplicate event_id {ev.event_id}")
            self._by_id[ev.event_id] = ev
            self._by_user.setdefault(ev.user, []).append(ev)

    @classmethod
    def from_events(cls, events: Iterable[Event]) -> "EventLog":
        """Sort, check ids, resolve retweet parents and inherit parent tokens."""
        evs = sorted(events, key=Event.sort_key)
        seen: dict[int, Event] = {}
        unresolved = set()
        out = []
        for ev in evs:
            if ev.event_id in seen:
                raise ParseError(f"duplicate event_id {ev.event_id}")
            if ev.is_retweet:
                parent = seen.get(ev.parent_event_id) if ev.parent_event_id is not None else None
                if parent is None or parent.timestamp >= ev.timestamp:
                    unresolved.add(ev.event_id)
                elif not ev.tokens and parent.tokens:
                    ev = replace(ev, tokens=parent.tokens)
            seen[ev.event_id] = ev
            out.append(ev)
        return cls(tuple(out), frozenset(unresolved))

    def __len__(self) -> int:
        return len(self.events)

    def __iter__(self):
        return iter(self.events)

    def get(self, event_id: int) -> Event | None:
        return self._by_id.get(event_id)

    def user_events(self, user: int) -> list[Event]:
        return self._by_user.get(user, [])

    def users(self) -> list[int]:
        return sorted(self._by_user)

    def tokens(self) -> list[str]:
        return sorted({t for ev in self.events for t in ev.tokens})

    def resolved_parent(self, ev: Event) -> Event | None:
        if not ev.is_retweet or ev.event_id in self.unresolved:
            return None
        return self._by_id[ev.parent_event_id]

    def timestamps_by_user(self) -> dict[int, list[int]]:
        out = defaultdict(list)
        for ev in self.events:
            out[ev.user].append(ev.timestamp)
        return dict(out)


def _parse_event(obj: dict, lineno: int) -> Event:
    try:
        kind = obj.get("kind", ORIGINAL)
        if kind not in (ORIGINAL, RETWEET):
            raise ParseError(f"unknown kind {kind!r}", lineno)
        parent = obj.get("parent_event_id")
        tokens = frozenset(str(t).lower() for t in obj.get("tokens") or ())
        ev = Event(
            event_id=int(obj["event_id"]),
            user=int(obj["user_id"]),
            timestamp=int(obj["ts"]),
            kind=kind,
            parent_event_id=None if parent is None else int(parent),
            tokens=tokens,
        )
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}", lineno) from None
    except (TypeError, ValueError) as exc:
        raise ParseError(f"bad field value: {exc}", lineno) from None
    if ev.event_id < 0 or ev.user < 0:
        raise ParseError("ids must be unsigned", lineno)
    return ev


def parse_event_lines(lines: Iterable[str]) -> list[Event]:
    events = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        try:
            obj = json.loads(line)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON: {exc.msg}", lineno) from None
        if not isinstance(obj, dict):
            raise ParseError("event must be a JSON object", lineno)
        events.append(_parse_event(obj, lineno))
    return events


def load_events(source) -> EventLog:
    """Event log from a JSON-lines path or an iterable of lines / :class:`Event`."""
    if isinstance(source, (str, bytes)) or hasattr(source, "__fspath__"):
        with open(source, encoding="utf-8") as fh:
            events = parse_event_lines(fh)
    else:
        items = list(source)
        events = items if items and isinstance(items[0], Event) else parse_event_lines(items)
    if not events:
        raise EmptyInputError("no events")
    return EventLog.from_events(events)


def event_to_json(ev: Event) -> str:
    obj = {"event_id": ev.event_id, "user_id": ev.user, "ts": ev.timestamp, "kind": ev.kind}
    if ev.parent_event_id is not None:
        obj["parent_event_id"] = ev.parent_event_id
    obj["tokens"] = sorted(ev.tokens)
    return json.dumps(obj, separators=(",", ":"))


def write_events(log: Iterable[Event], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for ev in log:
            fh.write(event_to_json(ev) + "\n")
