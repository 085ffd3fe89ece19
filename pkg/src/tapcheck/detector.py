"""Online conflict detection over streams of triggered actions.

Seven safety policies are evaluated against a sliding window of recent
events and the actions they triggered:

* C1: two controllers drive one actuator simultaneously.
* C2: two controllers drive different actuators whose affected features are
  equal or dependent, simultaneously.
* C3: two overlapping events stack conflicting commands on one actuator
  (any distinct action pair, or the same command repeated a tick or more
  apart within the overlap window).
* C4: two overlapping events drive opposite actions touching equal or
  dependent features (the actuators may differ).
* C5: like C3 but for a pair of disjoint events arriving simultaneously.
* C6: like C4 but for a pair of disjoint events arriving simultaneously.
* C7: one sensor repeats the same reading within the duplicate window; the
  later event is marked suppressible.

``detect_at_tick`` feeds a tick's events through rule matching, evaluates
every check over the full window, and never stops at the first hit, so the
returned list is exhaustive for the tick. Each violating pair is reported
exactly once over the lifetime of a stream: checks only consider pairs that
include at least one item inserted by the current call.

Policies C1 to C6 relate firings of two distinct rules. A single rule fired
twice by duplicate readings is the duplicate-event case and is covered by
C7 alone.
"""

from bisect import bisect_left
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterator

from .errors import OutOfOrderTickError, UnknownSensorKindError
from .model import (
    ActionSpec,
    DetectorConfig,
    Event,
    Relation,
    Rule,
    RuleSet,
    Tick,
    overlapping_events,
)


class ConflictKind(str, Enum):
    C1 = "C1"
    C2 = "C2"
    C3 = "C3"
    C4 = "C4"
    C5 = "C5"
    C6 = "C6"
    C7 = "C7"


@dataclass(frozen=True)
class TriggeredAction:
    """One rule firing: the event, the rule that matched it, and the command
    the owning controller would issue."""

    event: Event
    rule: str
    controller: str
    action: ActionSpec
    actuator_kind: str
    time: Tick

    def key(self) -> tuple:
        return (self.time, self.event.id, self.rule)


@dataclass(frozen=True)
class Conflict:
    """A detected policy violation.

    ``participants`` holds the two triggered actions involved (two raw
    events for C7), stored in canonical order so a violation has a single
    identity. ``suppressible`` lists event ids whose actions a downstream
    enforcement point may drop (only C7 marks any).
    """

    kind: ConflictKind
    tick: Tick
    participants: tuple
    note: str = field(compare=False)
    suppressible: tuple[str, ...] = ()

    def key(self) -> tuple:
        """Identity used to compare detector output against reference
        implementations: kind, detection tick, and participant keys."""
        if self.kind is ConflictKind.C7:
            parts = tuple((e.time, e.id) for e in self.participants)
        else:
            parts = tuple(a.key() for a in self.participants)
        return (self.kind.value, self.tick, parts)


def match_rules(event: Event, ruleset: RuleSet) -> list[TriggeredAction]:
    """All rule firings for one event, in ruleset declaration order."""
    kind = event.signature.sensor_kind
    if kind not in ruleset.registry.sensor_kinds:
        raise UnknownSensorKindError(
            f"event {event.id!r} has undeclared sensor kind {kind!r}")
    out = []
    for rule in ruleset.rules_by_kind.get(kind, ()):
        if rule.trigger.matches(event, ruleset.day_length):
            out.append(_fire(rule, event, ruleset))
    return out


def _fire(rule: Rule, event: Event, ruleset: RuleSet) -> TriggeredAction:
    return TriggeredAction(
        event=event,
        rule=rule.id,
        controller=rule.controller,
        action=rule.action,
        actuator_kind=ruleset.registry.actuator_kind(rule.action.actuator),
        time=event.time,
    )


class DetectionWindow:
    """Sliding record of the recent triggered actions and raw events.

    Entries older than the config horizon (the farthest back any check
    looks) relative to the current tick are dropped as each tick begins.
    The window tracks which items arrived in the current call so a
    violating pair is reported exactly once, and rebuilds three scope lists
    per evaluation that jointly cover every in-window item:
    ``scope_actions``, ``scope_controllers`` (one entry per in-scope
    action), and ``scope_events``. Single writer; call ``detect_at_tick``
    serially per stream.
    """

    def __init__(self, horizon: int):
        if horizon < 1:
            raise ValueError("window horizon must be >= 1")
        self.horizon = horizon
        self.last_tick: Tick | None = None
        self._actions: list[TriggeredAction] = []
        self._action_times: list[int] = []
        self._events: list[Event] = []
        self._events_by_sensor: dict[str, list[Event]] = {}
        self._fresh_actions: list[TriggeredAction] = []
        self._fresh_events: list[Event] = []
        self.scope_actions: tuple[TriggeredAction, ...] = ()
        self.scope_controllers: tuple[str, ...] = ()
        self.scope_events: tuple[Event, ...] = ()

    def begin_tick(self, tick: Tick, events: list[Event],
                   actions: list[TriggeredAction]) -> None:
        """Stage a tick's arrivals for evaluation. Entries beyond the
        horizon relative to this tick are dropped first, so the scope lists
        cover exactly the in-window items."""
        if self.last_tick is not None and tick < self.last_tick:
            raise OutOfOrderTickError(
                f"tick {tick} arrived after tick {self.last_tick}")
        self.last_tick = tick
        self._evict(tick)
        self._fresh_events = list(events)
        self._fresh_actions = list(actions)
        self.scope_actions = tuple(self._actions) + tuple(actions)
        self.scope_controllers = tuple(a.controller for a in self.scope_actions)
        self.scope_events = tuple(self._events) + tuple(events)

    def commit_tick(self) -> None:
        """Absorb the staged arrivals into the window."""
        for action in self._fresh_actions:
            self._actions.append(action)
            self._action_times.append(action.time)
        for event in self._fresh_events:
            self._events.append(event)
            self._events_by_sensor.setdefault(event.sensor, []).append(event)
        self._fresh_actions = []
        self._fresh_events = []

    def seed(self, events: list[Event], actions: list[TriggeredAction],
             tick: Tick | None = None) -> None:
        """Load a window with everything fresh, so a check function sees all
        unordered pairs. Intended for direct use of the check functions."""
        t = tick if tick is not None else max(
            [a.time for a in actions] + [e.time for e in events], default=0)
        self.begin_tick(t, events, actions)

    def _evict(self, now: Tick) -> None:
        cutoff = now - self.horizon
        keep = bisect_left(self._action_times, cutoff)
        if keep:
            del self._actions[:keep]
            del self._action_times[:keep]
        if self._events and self._events[0].time < cutoff:
            self._events = [e for e in self._events if e.time >= cutoff]
            for sensor in list(self._events_by_sensor):
                kept = [e for e in self._events_by_sensor[sensor]
                        if e.time >= cutoff]
                if kept:
                    self._events_by_sensor[sensor] = kept
                else:
                    del self._events_by_sensor[sensor]

    def action_pairs(self, max_dt: int) -> Iterator[tuple]:
        """Unordered action pairs with at least one fresh member and a time
        gap of at most ``max_dt``. Pairs outside the gap cannot satisfy the
        caller's policy, so skipping them does not change results."""
        fresh = self._fresh_actions
        older = self._actions
        times = self._action_times
        for i, a in enumerate(fresh):
            start = bisect_left(times, a.time - max_dt)
            for j in range(start, len(older)):
                yield older[j], a
            for j in range(i + 1, len(fresh)):
                yield a, fresh[j]

    def event_pairs_same_sensor(self, max_dt: int) -> Iterator[tuple]:
        """(earlier, later) same-sensor event pairs involving a fresh event
        within ``max_dt`` ticks."""
        fresh = self._fresh_events
        for i, e in enumerate(fresh):
            for old in self._events_by_sensor.get(e.sensor, ()):
                if e.time - old.time <= max_dt:
                    yield old, e
            for j in range(i + 1, len(fresh)):
                other = fresh[j]
                if other.sensor == e.sensor and abs(e.time - other.time) <= max_dt:
                    earlier, later = ((e, other) if e.time <= other.time
                                      else (other, e))
                    yield earlier, later


def _ordered(a: TriggeredAction, b: TriggeredAction):
    return (a, b) if a.key() <= b.key() else (b, a)


def _dt(a: TriggeredAction, b: TriggeredAction) -> int:
    return abs(a.time - b.time)


def _relation(a: TriggeredAction, b: TriggeredAction,
              cfg: DetectorConfig) -> Relation:
    return cfg.action_relations.relation(
        a.actuator_kind, a.action.action, b.actuator_kind, b.action.action)


def _stacked_commands(a, b, cfg) -> bool:
    # Any non-identical command pair conflicts on a shared actuator; an
    # identical command conflicts only when staggered inside the overlap
    # window (the repeated-command case).
    if _relation(a, b, cfg) is not Relation.SAME:
        return True
    return 0 < _dt(a, b) <= cfg.overlap_window


def _c1_holds(a, b, cfg) -> bool:
    return (a.rule != b.rule
            and a.action.actuator == b.action.actuator
            and a.controller != b.controller
            and _dt(a, b) <= cfg.same_tick_epsilon)


def _c2_holds(a, b, cfg) -> bool:
    return (a.rule != b.rule
            and a.action.actuator != b.action.actuator
            and a.controller != b.controller
            and _dt(a, b) <= cfg.same_tick_epsilon
            and cfg.features_related(a.action.affected_features,
                                     b.action.affected_features))


def _c3_holds(a, b, cfg) -> bool:
    return (a.rule != b.rule
            and a.action.actuator == b.action.actuator
            and overlapping_events(a.event, b.event, cfg)
            and _stacked_commands(a, b, cfg))


def _c4_holds(a, b, cfg) -> bool:
    return (a.rule != b.rule
            and overlapping_events(a.event, b.event, cfg)
            and _relation(a, b, cfg) is Relation.OPPOSITE
            and cfg.features_related(a.action.affected_features,
                                     b.action.affected_features))


def _c5_holds(a, b, cfg) -> bool:
    return (a.rule != b.rule
            and a.action.actuator == b.action.actuator
            and a.event.id != b.event.id
            and not overlapping_events(a.event, b.event, cfg)
            and _dt(a, b) <= cfg.same_tick_epsilon
            and _stacked_commands(a, b, cfg))


def _c6_holds(a, b, cfg) -> bool:
    return (a.rule != b.rule
            and a.event.id != b.event.id
            and not overlapping_events(a.event, b.event, cfg)
            and _dt(a, b) <= cfg.same_tick_epsilon
            and _relation(a, b, cfg) is Relation.OPPOSITE
            and cfg.features_related(a.action.affected_features,
                                     b.action.affected_features))


def _pair_conflict(kind: ConflictKind, a: TriggeredAction,
                   b: TriggeredAction, note: str) -> Conflict:
    first, second = _ordered(a, b)
    return Conflict(kind=kind, tick=max(a.time, b.time),
                    participants=(first, second), note=note)


def check_c1(window: DetectionWindow, cfg: DetectorConfig) -> list[Conflict]:
    """Same actuator commanded by two different controllers at once."""
    out = []
    for a, b in window.action_pairs(cfg.same_tick_epsilon):
        if _c1_holds(a, b, cfg):
            out.append(_pair_conflict(
                ConflictKind.C1, a, b,
                f"controllers {a.controller} and {b.controller} both drive "
                f"{a.action.actuator}"))
    return out


def check_c2(window: DetectionWindow, cfg: DetectorConfig) -> list[Conflict]:
    """Different actuators under different controllers touch equal or
    dependent features at once."""
    out = []
    for a, b in window.action_pairs(cfg.same_tick_epsilon):
        if _c2_holds(a, b, cfg):
            out.append(_pair_conflict(
                ConflictKind.C2, a, b,
                f"{a.action.actuator} and {b.action.actuator} touch related "
                f"features under controllers {a.controller} and {b.controller}"))
    return out


def check_c3(window: DetectionWindow, cfg: DetectorConfig) -> list[Conflict]:
    """Overlapping events stack conflicting commands on one actuator."""
    out = []
    for a, b in window.action_pairs(cfg.overlap_window):
        if _c3_holds(a, b, cfg):
            out.append(_pair_conflict(
                ConflictKind.C3, a, b,
                f"overlapping events {a.event.id} and {b.event.id} command "
                f"{a.action.actuator}: {a.action.action}/{b.action.action}"))
    return out


def check_c4(window: DetectionWindow, cfg: DetectorConfig) -> list[Conflict]:
    """Overlapping events drive opposite actions on related features."""
    out = []
    for a, b in window.action_pairs(cfg.overlap_window):
        if _c4_holds(a, b, cfg):
            out.append(_pair_conflict(
                ConflictKind.C4, a, b,
                f"overlapping events push opposite actions "
                f"{a.action.action}/{b.action.action} on related features"))
    return out


def check_c5(window: DetectionWindow, cfg: DetectorConfig) -> list[Conflict]:
    """Disjoint events stack conflicting commands on one actuator at once."""
    out = []
    for a, b in window.action_pairs(cfg.same_tick_epsilon):
        if _c5_holds(a, b, cfg):
            out.append(_pair_conflict(
                ConflictKind.C5, a, b,
                f"disjoint events {a.event.id} and {b.event.id} command "
                f"{a.action.actuator}: {a.action.action}/{b.action.action}"))
    return out


def check_c6(window: DetectionWindow, cfg: DetectorConfig) -> list[Conflict]:
    """Disjoint events drive opposite actions on related features at once."""
    out = []
    for a, b in window.action_pairs(cfg.same_tick_epsilon):
        if _c6_holds(a, b, cfg):
            out.append(_pair_conflict(
                ConflictKind.C6, a, b,
                f"disjoint events push opposite actions "
                f"{a.action.action}/{b.action.action} on related features"))
    return out


def check_c7(window: DetectionWindow, cfg: DetectorConfig) -> list[Conflict]:
    """One sensor repeats a reading within the duplicate window. The later
    event is marked suppressible so enforcement can drop its actions."""
    out = []
    for earlier, later in window.event_pairs_same_sensor(cfg.duplicate_window):
        gap = later.time - earlier.time
        if (0 < gap <= cfg.duplicate_window
                and earlier.signature == later.signature
                and abs(earlier.value - later.value)
                <= cfg.tolerance_for(earlier.sensor)):
            out.append(Conflict(
                kind=ConflictKind.C7,
                tick=later.time,
                participants=(earlier, later),
                note=(f"sensor {earlier.sensor} repeated value "
                      f"{earlier.value:g} after {gap} tick(s)"),
                suppressible=(later.id,),
            ))
    return out


_ALL_CHECKS = (check_c1, check_c2, check_c3, check_c4, check_c5, check_c6,
               check_c7)


def detect_at_tick(new_events: list[Event], ruleset: RuleSet,
                   window: DetectionWindow,
                   cfg: DetectorConfig) -> list[Conflict]:
    """Process one tick of events and return every conflict they complete.

    Events must all share one tick, and successive calls must not go back in
    time (equal ticks are allowed and behave like one larger batch). An
    empty batch just ages the window by one tick. All seven checks run over
    the full window on every call; the union of their findings is returned,
    sorted canonically, with each (kind, pair) reported once.
    """
    if not new_events:
        tick = 0 if window.last_tick is None else window.last_tick + 1
        window.begin_tick(tick, [], [])
        window.commit_tick()
        return []

    tick = new_events[0].time
    for event in new_events:
        if event.time != tick:
            raise OutOfOrderTickError(
                f"events in one batch span ticks {tick} and {event.time}")

    actions = [ta for event in new_events
               for ta in match_rules(event, ruleset)]
    window.begin_tick(tick, new_events, actions)

    conflicts: list[Conflict] = []
    seen: set[tuple] = set()
    for check in _ALL_CHECKS:
        for conflict in check(window, cfg):
            key = conflict.key()
            if key not in seen:
                seen.add(key)
                conflicts.append(conflict)
    window.commit_tick()
    conflicts.sort(key=Conflict.key)
    return conflicts


def new_window(cfg: DetectorConfig) -> DetectionWindow:
    """A detection window sized for the given config."""
    return DetectionWindow(horizon=cfg.horizon)
