"""Domain model for trigger-action smart-home rulesets.

Defines the vocabulary shared by the conflict checks, the static ruleset
analyzer, and the house simulator: sensor events, trigger-action rules, the
feature-dependency graph, the action-relation table, and the detector tuning
knobs. Every type here is immutable after construction, so instances can be
shared across threads without coordination.

Time is a non-negative integer tick. Within one event stream ticks never
decrease, and a single sensor emits at most one event per tick.
"""

from dataclasses import dataclass, field
from enum import Enum
from functools import cached_property
from typing import Iterable

from .errors import (
    InvalidConfigError,
    UnknownActionError,
    UnknownFeatureError,
)

Tick = int

DEFAULT_DAY_LENGTH = 864  # desk-scale day: 86,400 s compressed 100x


class Cmp(str, Enum):
    """Comparator alphabet shared by triggers and event signatures."""

    GT = ">"
    LT = "<"
    EQ = "=="

    def holds(self, value: float, threshold: float) -> bool:
        if self is Cmp.GT:
            return value > threshold
        if self is Cmp.LT:
            return value < threshold
        return value == threshold


class Relation(str, Enum):
    """How two action names on an actuator relate to each other."""

    SAME = "same"
    DIFFERENT = "different"
    OPPOSITE = "opposite"
    DEPENDENT = "dependent"


@dataclass(frozen=True)
class EventSignature:
    """The comparable identity of an event: what was sensed, how, and where.

    Two signatures are similar when they are equal or when an explicit
    equivalence class in :class:`DetectorConfig` groups them together.
    """

    sensor_kind: str
    predicate: Cmp
    location: str

    def compact(self) -> str:
        return f"{self.sensor_kind}:{self.predicate.value}:{self.location}"


@dataclass(frozen=True)
class Event:
    """A timestamped sensor reading.

    ``id`` must be unique within a stream; ``unit`` is the emitting sensor's
    declared unit.
    """

    id: str
    sensor: str
    time: Tick
    value: float
    unit: str
    signature: EventSignature


@dataclass(frozen=True)
class Sensor:
    id: str
    kind: str
    unit: str
    location: str
    range: tuple[float, float] = (0.0, 100.0)
    tolerance: float = 0.0  # max value gap still treated as a repeat reading


@dataclass(frozen=True)
class Actuator:
    id: str
    kind: str
    location: str
    actions: tuple[str, ...]


@dataclass(frozen=True)
class TriggerCondition:
    """Sensor-side condition of a rule.

    ``location_filter`` restricts matching to events from one location;
    ``schedule`` is an optional daily active window [start, end) in ticks of
    day, so management rules like "only after tick 648" can be expressed.
    """

    sensor_kind: str
    comparator: Cmp
    threshold: float
    unit: str
    location_filter: str | None = None
    schedule: tuple[int, int] | None = None

    def active_at(self, time: Tick, day_length: int) -> bool:
        if self.schedule is None:
            return True
        start, end = self.schedule
        return start <= time % day_length < end

    def matches(self, event: Event, day_length: int) -> bool:
        return (
            self.sensor_kind == event.signature.sensor_kind
            and (self.location_filter is None
                 or event.signature.location == self.location_filter)
            and self.comparator.holds(event.value, self.threshold)
            and self.active_at(event.time, day_length)
        )


@dataclass(frozen=True)
class ActionSpec:
    """Actuator-side effect of a rule: which device, which command, and the
    environmental features the command touches."""

    actuator: str
    action: str
    location: str
    affected_features: frozenset[str]


@dataclass(frozen=True)
class Rule:
    id: str
    controller: str
    trigger: TriggerCondition
    action: ActionSpec


@dataclass(frozen=True)
class Registry:
    """Declared device and feature universe of one installation."""

    locations: tuple[str, ...]
    sensors: dict[str, Sensor]
    actuators: dict[str, Actuator]
    controllers: tuple[str, ...]
    features: frozenset[str]

    @cached_property
    def sensor_kinds(self) -> frozenset[str]:
        return frozenset(s.kind for s in self.sensors.values())

    @cached_property
    def kind_unit(self) -> dict[str, str]:
        return {s.kind: s.unit for s in self.sensors.values()}

    @cached_property
    def sensors_by_kind(self) -> dict[str, tuple[Sensor, ...]]:
        out: dict[str, list[Sensor]] = {}
        for sensor in self.sensors.values():
            out.setdefault(sensor.kind, []).append(sensor)
        return {k: tuple(v) for k, v in out.items()}

    def actuator_kind(self, actuator_id: str) -> str:
        return self.actuators[actuator_id].kind


@dataclass(frozen=True)
class RuleSet:
    """A validated bundle of rules plus the registry they refer to."""

    registry: Registry
    rules: tuple[Rule, ...]
    day_length: int = DEFAULT_DAY_LENGTH

    @cached_property
    def by_id(self) -> dict[str, Rule]:
        return {r.id: r for r in self.rules}

    @cached_property
    def rules_by_kind(self) -> dict[str, tuple[Rule, ...]]:
        """Rules bucketed by trigger sensor kind, declaration order kept."""
        out: dict[str, list[Rule]] = {}
        for rule in self.rules:
            out.setdefault(rule.trigger.sensor_kind, []).append(rule)
        return {k: tuple(v) for k, v in out.items()}


@dataclass(frozen=True)
class FeatureDependencyGraph:
    """Directed "changes in x affect y" edges over environmental features.

    Reachability is transitive, and the dependency test applied by the
    policies is the symmetric closure of reachability: order does not matter
    for deciding whether two features interact.
    """

    nodes: frozenset[str]
    edges: frozenset[tuple[str, str]]

    def __post_init__(self):
        for src, dst in self.edges:
            if src == dst:
                raise InvalidConfigError(f"self-loop on feature {src!r}")
            if src not in self.nodes or dst not in self.nodes:
                missing = src if src not in self.nodes else dst
                raise UnknownFeatureError(
                    f"dependency edge references undeclared feature {missing!r}")

    @cached_property
    def _reachable(self) -> dict[str, frozenset[str]]:
        adjacency: dict[str, list[str]] = {}
        for src, dst in self.edges:
            adjacency.setdefault(src, []).append(dst)
        closure: dict[str, frozenset[str]] = {}
        for start, firsts in adjacency.items():
            seen: set[str] = set()
            stack = list(firsts)
            while stack:
                node = stack.pop()
                if node in seen:
                    continue
                seen.add(node)
                stack.extend(adjacency.get(node, ()))
            closure[start] = frozenset(seen)
        return closure

    def reaches(self, src: str, dst: str) -> bool:
        return dst in self._reachable.get(src, frozenset())


def dependent_features(f1: str, f2: str, graph: FeatureDependencyGraph) -> bool:
    """True when two distinct declared features interact, directly or
    through a chain of "affects" edges in either direction."""
    for f in (f1, f2):
        if f not in graph.nodes:
            raise UnknownFeatureError(f"unknown feature {f!r}")
    if f1 == f2:
        return False
    return graph.reaches(f1, f2) or graph.reaches(f2, f1)


RelationKey = tuple[tuple[str, str], tuple[str, str]]


@dataclass(frozen=True)
class ActionRelationTable:
    """Symmetric relation between actions, keyed by (actuator kind, name).

    ``vocabulary`` lists the action names of each actuator kind. Entries are
    stored under a sorted pair of (kind, name) tuples, so same-kind
    relations and cross-kind relations (needed when two different device
    kinds can push one feature in opposing directions, e.g. a blind and a
    lamp) live in one table without ambiguity when kinds share action names.
    An identical (kind, name) always maps to ``same``; any undeclared pair
    defaults to ``different``, which keeps lookups total over the vocabulary
    without forcing configs to spell out every combination.
    """

    vocabulary: dict[str, frozenset[str]]
    entries: dict[RelationKey, Relation] = field(default_factory=dict)

    @staticmethod
    def key(kind1: str, n1: str, kind2: str, n2: str) -> RelationKey:
        a, b = (kind1, n1), (kind2, n2)
        return (a, b) if a <= b else (b, a)

    def relation(self, kind1: str, n1: str, kind2: str, n2: str) -> Relation:
        for kind, name in ((kind1, n1), (kind2, n2)):
            vocab = self.vocabulary.get(kind)
            if vocab is None or name not in vocab:
                raise UnknownActionError(
                    f"action {name!r} is not in the vocabulary of "
                    f"actuator kind {kind!r}")
        if kind1 == kind2 and n1 == n2:
            return Relation.SAME
        return self.entries.get(self.key(kind1, n1, kind2, n2),
                                Relation.DIFFERENT)


def action_relation(actuator_kind: str, n1: str, n2: str,
                    table: ActionRelationTable) -> Relation:
    """Relation between two action names of one actuator kind."""
    return table.relation(actuator_kind, n1, actuator_kind, n2)


@dataclass(frozen=True)
class DetectorConfig:
    """Tuning knobs and relational oracles consumed by every check.

    ``overlap_window`` bounds how far apart two similar events may be and
    still count as overlapping; ``duplicate_window`` bounds repeat readings
    from one sensor; ``same_tick_epsilon`` defines simultaneity for the
    controller and disjoint-event policies (0 means exact tick equality).
    ``similarity_classes`` optionally widens signature similarity beyond
    plain equality, e.g. to treat temperature readings from two rooms that
    share a thermostat as the same kind of event.
    """

    dependency_graph: FeatureDependencyGraph
    action_relations: ActionRelationTable
    overlap_window: int = 5
    duplicate_window: int = 30
    same_tick_epsilon: int = 0
    similarity_classes: tuple[frozenset[EventSignature], ...] = ()
    sensor_tolerance: dict[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.overlap_window < 1:
            raise InvalidConfigError("overlap_window must be >= 1")
        if self.duplicate_window < 1:
            raise InvalidConfigError("duplicate_window must be >= 1")
        if self.same_tick_epsilon < 0:
            raise InvalidConfigError("same_tick_epsilon must be >= 0")

    @property
    def horizon(self) -> int:
        """How many ticks back any check can possibly look."""
        return max(self.overlap_window, self.duplicate_window,
                   self.same_tick_epsilon)

    def similar(self, a: EventSignature, b: EventSignature) -> bool:
        if a == b:
            return True
        return any(a in group and b in group
                   for group in self.similarity_classes)

    def features_related(self, fs1: Iterable[str], fs2: Iterable[str]) -> bool:
        """Existential feature test: some feature of one action equals or
        depends on some feature of the other."""
        fs2 = tuple(fs2)
        for f1 in fs1:
            for f2 in fs2:
                if f1 == f2 or dependent_features(f1, f2, self.dependency_graph):
                    return True
        return False

    def tolerance_for(self, sensor_id: str) -> float:
        return self.sensor_tolerance.get(sensor_id, 0.0)


def overlapping_events(e1: Event, e2: Event, cfg: DetectorConfig) -> bool:
    """True when two distinct events have similar signatures and fall within
    the overlap window of each other. Symmetric and irreflexive; every pair
    that is not overlapping is disjoint."""
    return (
        e1.id != e2.id
        and cfg.similar(e1.signature, e2.signature)
        and abs(e1.time - e2.time) <= cfg.overlap_window
    )
