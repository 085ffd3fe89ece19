"""Static pairwise misconfiguration analysis of a ruleset.

Without seeing a single event, ``static_check`` flags every pair of rules
that could fire together in a way that violates one of the safety policies.
A pair is reported when its triggers are co-satisfiable (some assignment of
sensor readings and ticks fires both inside the policy's time constraints)
and the pair of commands would then violate the policy. The analysis
over-approximates the dynamic checks: the rule pair behind any dynamically
detected C1 to C6 conflict always appears in the static output.

Co-satisfiability facts used throughout:

* A sensor emits at most one event per tick, so two rules forced through
  exactly one shared sensor at the same tick share a single reading and
  their threshold intervals must intersect. A second sensor or a one-tick
  stagger makes the readings independent.
* An event's signature predicate is chosen by whatever generated the event,
  not by the rule comparators, so similarity and dissimilarity of the
  firing events are free choices within the sensors' kinds and locations.
* Daily schedules constrain which tick gaps are achievable; gaps repeat
  modulo the day length.
"""

import math
from dataclasses import dataclass, field
from itertools import combinations

from .detector import ConflictKind
from .model import (
    Cmp,
    DetectorConfig,
    EventSignature,
    Relation,
    Rule,
    RuleSet,
    Sensor,
)


@dataclass(frozen=True, order=True)
class PotentialConflict:
    """A rule pair that could violate a policy if events line up."""

    kind: ConflictKind
    rule_a: str
    rule_b: str
    note: str = field(compare=False, default="")

    @property
    def pair(self) -> tuple[str, str]:
        return (self.rule_a, self.rule_b)


def _scope(rule: Rule, ruleset: RuleSet) -> tuple[Sensor, ...]:
    """Sensors whose events could fire the rule."""
    out = []
    for sensor in ruleset.registry.sensors_by_kind.get(
            rule.trigger.sensor_kind, ()):
        if (rule.trigger.location_filter is None
                or sensor.location == rule.trigger.location_filter):
            out.append(sensor)
    return tuple(out)


def _interval(rule: Rule) -> tuple[float, float, bool]:
    """(low, high, closed) satisfying set of the trigger over the reals."""
    c, t = rule.trigger.comparator, rule.trigger.threshold
    if c is Cmp.GT:
        return (t, float("inf"), False)
    if c is Cmp.LT:
        return (float("-inf"), t, False)
    return (t, t, True)


def _intervals_intersect(r1: Rule, r2: Rule) -> bool:
    lo1, hi1, point1 = _interval(r1)
    lo2, hi2, point2 = _interval(r2)
    lo, hi = max(lo1, lo2), min(hi1, hi2)
    if lo < hi:
        return True
    if lo > hi:
        return False
    # Interval tips touch; the shared point is a witness only when both
    # sides actually contain it (equality triggers do, strict ones do not).
    in1 = point1 or lo1 < lo < hi1
    in2 = point2 or lo2 < lo < hi2
    return in1 and in2


def gap_achievable(r1: Rule, r2: Rule, dmin: int, dmax: int,
                   day_length: int) -> bool:
    """Can the two triggers be active at ticks whose gap lies in
    [dmin, dmax]? Schedules repeat daily, so achievable gaps are unions of
    integer intervals shifted by multiples of the day length."""
    if dmax < dmin:
        return False
    sch1, sch2 = r1.trigger.schedule, r2.trigger.schedule
    if sch1 is None or sch2 is None:
        return True
    lo1, hi1 = sch1
    lo2, hi2 = sch2
    # d1 - d2 over active ticks of day spans [a, b].
    a = lo1 - (hi2 - 1)
    b = (hi1 - 1) - lo2
    k_min = math.floor((-dmax - b) / day_length)
    k_max = math.ceil((dmax - a) / day_length)
    for k in range(k_min, k_max + 1):
        lo, hi = a + k * day_length, b + k * day_length
        if max(lo, dmin) <= min(hi, dmax):
            return True
        if max(lo, -dmax) <= min(hi, -dmin):
            return True
    return False


def _sig_choice_exists(s1: Sensor, s2: Sensor, want_similar: bool,
                       cfg: DetectorConfig) -> bool:
    """Can two events from these sensors be given predicates making their
    signatures similar (or dissimilar)?"""
    for p1 in Cmp:
        for p2 in Cmp:
            sim = cfg.similar(EventSignature(s1.kind, p1, s1.location),
                              EventSignature(s2.kind, p2, s2.location))
            if sim == want_similar:
                return True
    return False


# Signature requirement on the firing event pair: no constraint, must be
# similar, or must be dissimilar.
_ANY, _SIMILAR, _DISSIMILAR = "any", "similar", "dissimilar"


def _pair_sig_ok(s1: Sensor, s2: Sensor, mode: str,
                 cfg: DetectorConfig) -> bool:
    if mode == _ANY:
        return True
    return _sig_choice_exists(s1, s2, mode == _SIMILAR, cfg)


class _PairAnalysis:
    """Co-satisfiability queries for one rule pair."""

    def __init__(self, r1: Rule, r2: Rule, ruleset: RuleSet,
                 cfg: DetectorConfig):
        self.r1, self.r2 = r1, r2
        self.cfg = cfg
        self.day = ruleset.day_length
        self.s1 = _scope(r1, ruleset)
        self.s2 = _scope(r2, ruleset)

    def same_tick(self, mode: str, distinct_events: bool) -> bool:
        """Both rules fire at one tick. Distinct events need two sensors;
        a lone shared sensor yields one event, which must satisfy both
        triggers at once."""
        if not self.s1 or not self.s2:
            return False
        if not gap_achievable(self.r1, self.r2, 0, 0, self.day):
            return False
        for a in self.s1:
            for b in self.s2:
                if a.id == b.id:
                    if distinct_events:
                        continue
                    if (mode == _ANY
                            and _intervals_intersect(self.r1, self.r2)):
                        return True
                    continue
                if _pair_sig_ok(a, b, mode, self.cfg):
                    return True
        return False

    def staggered(self, dmin: int, dmax: int, mode: str) -> bool:
        """Both rules fire at ticks a nonzero gap apart: readings are
        independent and the events are always distinct."""
        dmin = max(dmin, 1)
        if dmax < dmin or not self.s1 or not self.s2:
            return False
        if not gap_achievable(self.r1, self.r2, dmin, dmax, self.day):
            return False
        return any(_pair_sig_ok(a, b, mode, self.cfg)
                   for a in self.s1 for b in self.s2)


def _pair_tags(r1: Rule, r2: Rule, ruleset: RuleSet,
               cfg: DetectorConfig) -> list[tuple[ConflictKind, str]]:
    pa = _PairAnalysis(r1, r2, ruleset, cfg)
    eps = cfg.same_tick_epsilon
    win = cfg.overlap_window

    same_actuator = r1.action.actuator == r2.action.actuator
    diff_controller = r1.controller != r2.controller
    related = cfg.features_related(r1.action.affected_features,
                                   r2.action.affected_features)
    registry = ruleset.registry
    relation = cfg.action_relations.relation(
        registry.actuator_kind(r1.action.actuator), r1.action.action,
        registry.actuator_kind(r2.action.actuator), r2.action.action)
    repeat = relation is Relation.SAME  # identical command, only conflicts staggered

    simultaneous = (pa.same_tick(_ANY, distinct_events=False)
                    or pa.staggered(1, eps, _ANY))
    overlap = (pa.same_tick(_SIMILAR, distinct_events=True)
               or pa.staggered(1, win, _SIMILAR))
    overlap_staggered = pa.staggered(1, win, _SIMILAR)
    # Disjoint pairs are dissimilar within epsilon, or similar but beyond
    # the overlap window when epsilon reaches past it.
    disjoint = (pa.same_tick(_DISSIMILAR, distinct_events=True)
                or pa.staggered(1, eps, _DISSIMILAR)
                or pa.staggered(win + 1, eps, _SIMILAR))
    disjoint_repeat = pa.staggered(1, min(eps, win), _DISSIMILAR)

    tags: list[tuple[ConflictKind, str]] = []
    if same_actuator and diff_controller and simultaneous:
        tags.append((ConflictKind.C1,
                     f"controllers {r1.controller} and {r2.controller} can "
                     f"drive {r1.action.actuator} at the same time"))
    if (not same_actuator) and diff_controller and related and simultaneous:
        tags.append((ConflictKind.C2,
                     f"{r1.action.actuator} and {r2.action.actuator} can "
                     "touch related features at the same time"))
    if same_actuator and (overlap_staggered if repeat else overlap):
        tags.append((ConflictKind.C3,
                     f"overlapping events can stack "
                     f"{r1.action.action}/{r2.action.action} on "
                     f"{r1.action.actuator}"))
    if relation is Relation.OPPOSITE and related and overlap:
        tags.append((ConflictKind.C4,
                     "overlapping events can push opposite actions on "
                     "related features"))
    if same_actuator and (disjoint_repeat if repeat else disjoint):
        tags.append((ConflictKind.C5,
                     f"disjoint events can stack "
                     f"{r1.action.action}/{r2.action.action} on "
                     f"{r1.action.actuator}"))
    if relation is Relation.OPPOSITE and related and disjoint:
        tags.append((ConflictKind.C6,
                     "disjoint events can push opposite actions on "
                     "related features"))
    return tags


def static_check(ruleset: RuleSet, cfg: DetectorConfig) -> list[PotentialConflict]:
    """Flag every unordered pair of distinct rules that could violate a
    policy, tagged with the policies it would violate."""
    out: list[PotentialConflict] = []
    for r1, r2 in combinations(ruleset.rules, 2):
        a, b = sorted((r1.id, r2.id))
        for kind, note in _pair_tags(r1, r2, ruleset, cfg):
            out.append(PotentialConflict(kind=kind, rule_a=a, rule_b=b,
                                         note=note))
    out.sort()
    return out
