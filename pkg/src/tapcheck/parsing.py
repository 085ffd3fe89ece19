"""Loading, validating, and serializing ruleset documents.

A document is a single YAML file with sections ``registry``, ``rules``,
``feature_deps``, ``action_relations``, and ``detector``, plus an optional
``day_length`` and, for simulation fixtures, ``house`` and ``sources``
sections that are validated by the simulator. Parsing enforces referential
integrity: every id a rule mentions must be declared exactly once in the
registry, and violations name the offending id.

``parse_ruleset``/``serialize_ruleset`` round-trip through a canonical form:
parse(serialize(parse(text))) equals parse(text).
"""

from dataclasses import dataclass

import yaml

from .errors import (
    DuplicateIdError,
    ParseError,
    ReferentialIntegrityError,
)
from .model import (
    ActionRelationTable,
    ActionSpec,
    Actuator,
    Cmp,
    DEFAULT_DAY_LENGTH,
    DetectorConfig,
    EventSignature,
    FeatureDependencyGraph,
    Registry,
    Relation,
    Rule,
    RuleSet,
    Sensor,
    TriggerCondition,
)

_TOP_LEVEL_KEYS = {
    "registry", "rules", "feature_deps", "action_relations", "detector",
    "day_length", "house", "sources", "scenario",
}

_CMP_TOKENS = {c.value: c for c in Cmp}
_RELATION_TOKENS = {r.value: r for r in Relation}


@dataclass(frozen=True)
class Document:
    """Everything a document declares: the ruleset, the detector config
    assembled from its ``feature_deps``/``action_relations``/``detector``
    sections, and raw simulator sections (``house``, ``sources``,
    ``scenario``) for the simulator to validate."""

    ruleset: RuleSet
    config: DetectorConfig
    house: dict | None = None
    sources: list | None = None
    scenario: dict | None = None


def _load_yaml(text: str):
    try:
        return yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        if mark is not None:
            raise ParseError(f"invalid YAML: {getattr(exc, 'problem', exc)}",
                             line=mark.line + 1, column=mark.column + 1) from exc
        raise ParseError(f"invalid YAML: {exc}") from exc


def _require(mapping, key, path, kind=None):
    if not isinstance(mapping, dict) or key not in mapping:
        raise ParseError(f"missing required key {key!r}", path=path)
    value = mapping[key]
    if kind is not None and not isinstance(value, kind):
        raise ParseError(
            f"key {key!r} must be of type {getattr(kind, '__name__', kind)}",
            path=path)
    return value


def _opt(mapping, key, default=None):
    return mapping.get(key, default) if isinstance(mapping, dict) else default


def _as_number(value, path) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError("expected a number", path=path)
    return float(value)


def _as_str(value, path) -> str:
    if not isinstance(value, str) or not value:
        raise ParseError("expected a non-empty string", path=path)
    return value


def _unique(seen: set, value: str, what: str):
    if value in seen:
        raise DuplicateIdError(f"duplicate {what} {value!r}")
    seen.add(value)


def _parse_registry(raw, path="registry") -> Registry:
    if not isinstance(raw, dict):
        raise ParseError("registry must be a mapping", path=path)
    locations = tuple(_as_str(x, f"{path}.locations")
                      for x in _require(raw, "locations", path, list))
    seen_loc: set[str] = set()
    for loc in locations:
        _unique(seen_loc, loc, "location")

    controllers = tuple(_as_str(x, f"{path}.controllers")
                        for x in _require(raw, "controllers", path, list))
    seen_ctrl: set[str] = set()
    for ctrl in controllers:
        _unique(seen_ctrl, ctrl, "controller")

    sensors: dict[str, Sensor] = {}
    kind_unit: dict[str, str] = {}
    for i, entry in enumerate(_require(raw, "sensors", path, list)):
        p = f"{path}.sensors[{i}]"
        sid = _as_str(_require(entry, "id", p), f"{p}.id")
        if sid in sensors:
            raise DuplicateIdError(f"duplicate sensor {sid!r}")
        kind = _as_str(_require(entry, "kind", p), f"{p}.kind")
        unit = _as_str(_require(entry, "unit", p), f"{p}.unit")
        location = _as_str(_require(entry, "location", p), f"{p}.location")
        if location not in seen_loc:
            raise ReferentialIntegrityError(
                f"sensor {sid!r} placed in undeclared location {location!r}")
        if kind in kind_unit and kind_unit[kind] != unit:
            raise ParseError(
                f"sensor kind {kind!r} declared with conflicting units "
                f"{kind_unit[kind]!r} and {unit!r}", path=p)
        kind_unit[kind] = unit
        rng = _opt(entry, "range", [0, 100])
        if (not isinstance(rng, list) or len(rng) != 2):
            raise ParseError("range must be [low, high]", path=f"{p}.range")
        low, high = (_as_number(v, f"{p}.range") for v in rng)
        if not low < high:
            raise ParseError("range low must be < high", path=f"{p}.range")
        tolerance = _as_number(_opt(entry, "tolerance", 0), f"{p}.tolerance")
        sensors[sid] = Sensor(id=sid, kind=kind, unit=unit, location=location,
                              range=(low, high), tolerance=tolerance)

    actuators: dict[str, Actuator] = {}
    for i, entry in enumerate(_require(raw, "actuators", path, list)):
        p = f"{path}.actuators[{i}]"
        aid = _as_str(_require(entry, "id", p), f"{p}.id")
        if aid in actuators:
            raise DuplicateIdError(f"duplicate actuator {aid!r}")
        kind = _as_str(_require(entry, "kind", p), f"{p}.kind")
        location = _as_str(_require(entry, "location", p), f"{p}.location")
        if location not in seen_loc:
            raise ReferentialIntegrityError(
                f"actuator {aid!r} placed in undeclared location {location!r}")
        actions = tuple(_as_str(x, f"{p}.actions")
                        for x in _require(entry, "actions", p, list))
        if not actions:
            raise ParseError("actuator needs at least one action", path=p)
        if len(set(actions)) != len(actions):
            raise DuplicateIdError(f"duplicate action name on actuator {aid!r}")
        other = next((a for a in actuators.values() if a.kind == kind), None)
        if other is not None and set(other.actions) != set(actions):
            raise ParseError(
                f"actuator kind {kind!r} declared with differing action "
                "vocabularies", path=p)
        actuators[aid] = Actuator(id=aid, kind=kind, location=location,
                                  actions=actions)

    features = _require(raw, "features", path, list)
    seen_feat: set[str] = set()
    for f in features:
        _unique(seen_feat, _as_str(f, f"{path}.features"), "feature")

    return Registry(locations=locations, sensors=sensors, actuators=actuators,
                    controllers=controllers, features=frozenset(seen_feat))


def _parse_cmp(token, path) -> Cmp:
    if token not in _CMP_TOKENS:
        raise ParseError(
            f"comparator must be one of {sorted(_CMP_TOKENS)}, got {token!r}",
            path=path)
    return _CMP_TOKENS[token]


def _parse_rule(entry, i, registry: Registry, day_length: int) -> Rule:
    p = f"rules[{i}]"
    rid = _as_str(_require(entry, "id", p), f"{p}.id")
    controller = _as_str(_require(entry, "controller", p), f"{p}.controller")
    if controller not in registry.controllers:
        raise ReferentialIntegrityError(
            f"rule {rid!r} references undeclared controller {controller!r}")

    traw = _require(entry, "trigger", p, dict)
    tp = f"{p}.trigger"
    kind = _as_str(_require(traw, "sensor_kind", tp), f"{tp}.sensor_kind")
    if kind not in registry.sensor_kinds:
        raise ReferentialIntegrityError(
            f"rule {rid!r} triggers on undeclared sensor kind {kind!r}")
    comparator = _parse_cmp(_require(traw, "comparator", tp), f"{tp}.comparator")
    threshold = _as_number(_require(traw, "threshold", tp), f"{tp}.threshold")
    unit = _opt(traw, "unit")
    kind_unit = registry.kind_unit[kind]
    if unit is None:
        unit = kind_unit
    elif unit != kind_unit:
        raise ParseError(
            f"threshold unit {unit!r} does not match sensor kind "
            f"{kind!r} unit {kind_unit!r}", path=tp)
    location_filter = _opt(traw, "location_filter")
    if location_filter is not None:
        location_filter = _as_str(location_filter, f"{tp}.location_filter")
        if location_filter not in registry.locations:
            raise ReferentialIntegrityError(
                f"rule {rid!r} filters on undeclared location "
                f"{location_filter!r}")
    schedule = _opt(traw, "schedule")
    if schedule is not None:
        if not isinstance(schedule, list) or len(schedule) != 2:
            raise ParseError("schedule must be [start, end]", path=tp)
        start, end = schedule
        if not (isinstance(start, int) and isinstance(end, int)):
            raise ParseError("schedule bounds must be integers", path=tp)
        if not 0 <= start < end <= day_length:
            raise ParseError(
                f"schedule must satisfy 0 <= start < end <= {day_length}",
                path=tp)
        schedule = (start, end)

    araw = _require(entry, "action", p, dict)
    ap = f"{p}.action"
    actuator_id = _as_str(_require(araw, "actuator", ap), f"{ap}.actuator")
    actuator = registry.actuators.get(actuator_id)
    if actuator is None:
        raise ReferentialIntegrityError(
            f"rule {rid!r} references undeclared actuator {actuator_id!r}")
    action = _as_str(_require(araw, "action", ap), f"{ap}.action")
    if action not in actuator.actions:
        raise ReferentialIntegrityError(
            f"rule {rid!r} uses action {action!r} not declared for "
            f"actuator {actuator_id!r}")
    location = _opt(araw, "location", actuator.location)
    if location != actuator.location:
        raise ParseError(
            f"action location {location!r} does not match actuator "
            f"{actuator_id!r} location {actuator.location!r}", path=ap)
    feats = _require(araw, "affected_features", ap, list)
    if not feats:
        raise ParseError("affected_features must be non-empty", path=ap)
    affected = []
    for f in feats:
        f = _as_str(f, f"{ap}.affected_features")
        if f not in registry.features:
            raise ReferentialIntegrityError(
                f"rule {rid!r} affects undeclared feature {f!r}")
        affected.append(f)

    return Rule(
        id=rid,
        controller=controller,
        trigger=TriggerCondition(
            sensor_kind=kind, comparator=comparator, threshold=threshold,
            unit=unit, location_filter=location_filter, schedule=schedule),
        action=ActionSpec(
            actuator=actuator_id, action=action, location=actuator.location,
            affected_features=frozenset(affected)),
    )


def _parse_feature_deps(raw, registry: Registry) -> FeatureDependencyGraph:
    edges: set[tuple[str, str]] = set()
    for i, entry in enumerate(raw or []):
        p = f"feature_deps[{i}]"
        if not isinstance(entry, list) or len(entry) != 2:
            raise ParseError("dependency edge must be [from, to]", path=p)
        src, dst = (_as_str(x, p) for x in entry)
        for f in (src, dst):
            if f not in registry.features:
                raise ReferentialIntegrityError(
                    f"dependency edge references undeclared feature {f!r}")
        if src == dst:
            raise ParseError("self-dependency is not allowed", path=p)
        edges.add((src, dst))
    return FeatureDependencyGraph(nodes=registry.features,
                                  edges=frozenset(edges))


def _parse_action_relations(raw, registry: Registry) -> ActionRelationTable:
    vocabulary: dict[str, frozenset[str]] = {}
    for actuator in registry.actuators.values():
        vocabulary[actuator.kind] = frozenset(actuator.actions)

    entries: dict = {}
    for key, triples in (raw or {}).items():
        p = f"action_relations.{key}"
        kinds = key.split("|")
        if len(kinds) == 1:
            kinds = [kinds[0], kinds[0]]
        if len(kinds) != 2:
            raise ParseError(
                "key must be an actuator kind or 'kindA|kindB'", path=p)
        k1, k2 = kinds
        for k in (k1, k2):
            if k not in vocabulary:
                raise ReferentialIntegrityError(
                    f"action relations declared for undeclared actuator "
                    f"kind {k!r}")
        for j, triple in enumerate(triples or []):
            tp = f"{p}[{j}]"
            if not isinstance(triple, list) or len(triple) != 3:
                raise ParseError("entry must be [action, action, relation]",
                                 path=tp)
            n1, n2, rel = (_as_str(x, tp) for x in triple)
            if rel not in _RELATION_TOKENS:
                raise ParseError(
                    f"relation must be one of {sorted(_RELATION_TOKENS)}",
                    path=tp)
            relation = _RELATION_TOKENS[rel]
            # Names are positional in cross-kind sections: n1 belongs to
            # the kind left of the bar, n2 to the right one.
            for name, k in ((n1, k1), (n2, k2)):
                if name not in vocabulary[k]:
                    raise ReferentialIntegrityError(
                        f"action {name!r} is not in the vocabulary of "
                        f"actuator kind {k!r}")
            if k1 == k2 and n1 == n2 and relation is not Relation.SAME:
                raise ParseError(
                    f"identical action pair ({n1!r}, {n1!r}) must map to "
                    "'same'", path=tp)
            pair = ActionRelationTable.key(k1, n1, k2, n2)
            if pair in entries and entries[pair] is not relation:
                raise ParseError(
                    f"conflicting relations declared for pair {pair}",
                    path=tp)
            entries[pair] = relation
    return ActionRelationTable(vocabulary=vocabulary, entries=entries)


def _parse_signature(token, registry: Registry, path) -> EventSignature:
    parts = _as_str(token, path).split(":")
    if len(parts) != 3:
        raise ParseError(
            "signature must be 'sensor_kind:comparator:location'", path=path)
    kind, pred, location = parts
    if kind not in registry.sensor_kinds:
        raise ReferentialIntegrityError(
            f"similarity class references undeclared sensor kind {kind!r}")
    if location not in registry.locations:
        raise ReferentialIntegrityError(
            f"similarity class references undeclared location {location!r}")
    return EventSignature(sensor_kind=kind, predicate=_parse_cmp(pred, path),
                          location=location)


def _parse_detector(raw, registry: Registry,
                    graph: FeatureDependencyGraph,
                    relations: ActionRelationTable) -> DetectorConfig:
    raw = raw or {}
    if not isinstance(raw, dict):
        raise ParseError("detector must be a mapping", path="detector")
    classes = []
    for i, group in enumerate(raw.get("similarity_classes") or []):
        p = f"detector.similarity_classes[{i}]"
        if not isinstance(group, list) or len(group) < 2:
            raise ParseError("similarity class needs >= 2 signatures", path=p)
        classes.append(frozenset(_parse_signature(tok, registry, p)
                                 for tok in group))
    tolerance = {sid: s.tolerance for sid, s in registry.sensors.items()
                 if s.tolerance}
    return DetectorConfig(
        dependency_graph=graph,
        action_relations=relations,
        overlap_window=int(raw.get("overlap_window", 5)),
        duplicate_window=int(raw.get("duplicate_window", 30)),
        same_tick_epsilon=int(raw.get("same_tick_epsilon", 0)),
        similarity_classes=tuple(classes),
        sensor_tolerance=tolerance,
    )


def load_document(text: str) -> Document:
    """Parse and validate a full configuration document."""
    raw = _load_yaml(text)
    if not isinstance(raw, dict):
        raise ParseError("document must be a mapping of sections")
    unknown = set(raw) - _TOP_LEVEL_KEYS
    if unknown:
        raise ParseError(f"unknown top-level section(s): {sorted(unknown)}")

    day_length = raw.get("day_length", DEFAULT_DAY_LENGTH)
    if not isinstance(day_length, int) or day_length < 2:
        raise ParseError("day_length must be an integer >= 2",
                         path="day_length")

    registry = _parse_registry(_require(raw, "registry", "document"))

    rules = []
    seen_rules: set[str] = set()
    for i, entry in enumerate(raw.get("rules") or []):
        rule = _parse_rule(entry, i, registry, day_length)
        _unique(seen_rules, rule.id, "rule id")
        rules.append(rule)

    graph = _parse_feature_deps(raw.get("feature_deps"), registry)
    relations = _parse_action_relations(raw.get("action_relations"), registry)
    config = _parse_detector(raw.get("detector"), registry, graph, relations)

    ruleset = RuleSet(registry=registry, rules=tuple(rules),
                      day_length=day_length)
    return Document(ruleset=ruleset, config=config,
                    house=raw.get("house"), sources=raw.get("sources"),
                    scenario=raw.get("scenario"))


def parse_ruleset(text: str) -> RuleSet:
    """Parse a document and return its validated ruleset."""
    return load_document(text).ruleset


def _sensor_dict(s: Sensor) -> dict:
    out = {"id": s.id, "kind": s.kind, "unit": s.unit, "location": s.location,
           "range": [s.range[0], s.range[1]]}
    if s.tolerance:
        out["tolerance"] = s.tolerance
    return out


def _rule_dict(r: Rule) -> dict:
    trigger: dict = {
        "sensor_kind": r.trigger.sensor_kind,
        "comparator": r.trigger.comparator.value,
        "threshold": r.trigger.threshold,
        "unit": r.trigger.unit,
    }
    if r.trigger.location_filter is not None:
        trigger["location_filter"] = r.trigger.location_filter
    if r.trigger.schedule is not None:
        trigger["schedule"] = list(r.trigger.schedule)
    return {
        "id": r.id,
        "controller": r.controller,
        "trigger": trigger,
        "action": {
            "actuator": r.action.actuator,
            "action": r.action.action,
            "location": r.action.location,
            "affected_features": sorted(r.action.affected_features),
        },
    }


def _relations_sections(table: ActionRelationTable) -> dict:
    """Regroup relation entries into the document's per-kind sections,
    keeping names positional for cross-kind sections."""
    sections: dict[str, list] = {}
    for ((k1, n1), (k2, n2)), rel in sorted(table.entries.items()):
        key = k1 if k1 == k2 else f"{k1}|{k2}"
        pair = sorted((n1, n2)) if k1 == k2 else [n1, n2]
        sections.setdefault(key, []).append([pair[0], pair[1], rel.value])
    return {key: sorted(rows) for key, rows in sorted(sections.items())}


def serialize_document(ruleset: RuleSet, config: DetectorConfig) -> str:
    """Emit the canonical YAML form of a ruleset plus detector config.

    Rule order is preserved; everything order-insensitive is sorted, so the
    output is a fixed point under parse/serialize.
    """
    registry = ruleset.registry
    doc = {
        "day_length": ruleset.day_length,
        "registry": {
            "locations": list(registry.locations),
            "controllers": list(registry.controllers),
            "sensors": [_sensor_dict(registry.sensors[k])
                        for k in sorted(registry.sensors)],
            "actuators": [
                {"id": a.id, "kind": a.kind, "location": a.location,
                 "actions": list(a.actions)}
                for a in (registry.actuators[k]
                          for k in sorted(registry.actuators))],
            "features": sorted(registry.features),
        },
        "rules": [_rule_dict(r) for r in ruleset.rules],
        "feature_deps": sorted([src, dst] for src, dst
                               in config.dependency_graph.edges),
        "action_relations": _relations_sections(config.action_relations),
        "detector": {
            "overlap_window": config.overlap_window,
            "duplicate_window": config.duplicate_window,
            "same_tick_epsilon": config.same_tick_epsilon,
            "similarity_classes": [
                sorted(sig.compact() for sig in group)
                for group in config.similarity_classes],
        },
    }
    return yaml.safe_dump(doc, sort_keys=False, default_flow_style=False)


def serialize_ruleset(ruleset: RuleSet) -> str:
    """Canonical form of a ruleset with an empty detector config."""
    empty = DetectorConfig(
        dependency_graph=FeatureDependencyGraph(
            nodes=ruleset.registry.features, edges=frozenset()),
        action_relations=ActionRelationTable(vocabulary={
            a.kind: frozenset(a.actions)
            for a in ruleset.registry.actuators.values()}),
    )
    return serialize_document(ruleset, empty)
