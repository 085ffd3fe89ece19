"""Deterministic discrete-time smart-home simulation.

A house is a set of rooms joined by adjacency (typically a corridor), each
with first-order lumped-parameter physics:

* temperature: exponential pull toward outdoor air, heater/cooler gain,
  extra outdoor coupling through an open window, exchange with adjacent
  rooms, and optional occupant heat,
* relative humidity: falls as temperature rises (warm air holds more
  moisture), plus humidifier gain, clamped to [0, 100],
* luminance: base level plus daylight through an open blind plus lamp.

Each tick the engine samples event sources (seeded per source, so adding a
source never perturbs the draws of another), feeds the events through the
conflict detector, applies the actuations that survive suppression, steps
the physics, and records everything. Identical seeds give byte-identical
runs.

The detector always runs and its findings are always counted; the
``detector`` flag of a scenario only controls enforcement. When it is
``on``, actions triggered by a suppressible duplicate event are dropped, and
for every conflict completed within the current tick the canonically later
action is dropped as well.
"""

import hashlib
from dataclasses import dataclass, field, replace

import numpy as np

from .detector import (
    Conflict,
    ConflictKind,
    DetectionWindow,
    TriggeredAction,
    detect_at_tick,
    match_rules,
    new_window,
)
from .errors import SimulationError
from .model import Cmp, DetectorConfig, Event, EventSignature, RuleSet

THERMOSTAT_OFF, THERMOSTAT_HEAT, THERMOSTAT_COOL = "off", "heat", "cool"


@dataclass
class RoomState:
    """Mutable per-room simulation state, including device positions."""

    name: str
    outdoor_exposed: bool = True
    temperature: float = 70.0
    humidity: float = 50.0
    luminance: float = 0.0
    occupancy: bool = False
    thermostat: str = THERMOSTAT_OFF
    setpoint: float = 70.0
    humidifier: bool = False
    light: bool = False
    blind: bool = False  # True = open
    window: bool = False  # True = open
    door: bool = False  # True = open/unlocked
    alarm: bool = False

    def __post_init__(self):
        if not 0.0 <= self.humidity <= 100.0:
            raise SimulationError(
                f"room {self.name!r} humidity must start in [0, 100]")


@dataclass(frozen=True)
class HouseParams:
    """Physics coefficients, all per tick and non-negative."""

    k_loss: float = 0.05    # outdoor pull
    k_adj: float = 0.1      # neighbor pull
    g_heat: float = 0.5     # heater/cooler gain, degrees F per tick
    k_win: float = 0.1      # extra outdoor pull through an open window
    k_h: float = 1.5        # %RH drop per degree F of warming
    g_hum: float = 2.0      # humidifier gain, %RH per tick
    l_base: float = 100.0   # lux with everything shut
    l_window: float = 250.0  # max daylight contribution through the blind
    l_lamp: float = 250.0   # lamp contribution
    setpoint_step: float = 10.0  # setpoint change per increase/decrease
    occupant_heat: float = 0.0   # degrees F per occupied tick

    def __post_init__(self):
        for name in ("k_loss", "k_adj", "g_heat", "k_win", "k_h", "g_hum",
                     "l_base", "l_window", "l_lamp"):
            if getattr(self, name) < 0:
                raise SimulationError(f"house parameter {name} must be >= 0")


@dataclass(frozen=True)
class HouseModel:
    """Rooms, their adjacency, physics parameters, and the outdoor trace.

    ``outdoor_temperature`` and ``daylight`` may be scalars or per-tick
    sequences (cycled when shorter than the horizon). ``momentary`` lists
    actuators that spring back to their initial position at the end of each
    tick, for devices modeled as pulses rather than latched state.
    """

    rooms: tuple[RoomState, ...]
    adjacency: tuple[tuple[str, str], ...] = ()
    params: HouseParams = field(default_factory=HouseParams)
    outdoor_temperature: float | tuple[float, ...] = 70.0
    daylight: float | tuple[float, ...] = 300.0
    momentary: frozenset[str] = frozenset()

    def __post_init__(self):
        names = [r.name for r in self.rooms]
        if len(set(names)) != len(names):
            raise SimulationError("duplicate room name in house model")
        for a, b in self.adjacency:
            if a not in names or b not in names:
                raise SimulationError(
                    f"adjacency references unknown room in ({a}, {b})")

    def neighbors(self, room: str) -> tuple[str, ...]:
        out = []
        for a, b in self.adjacency:
            if a == room:
                out.append(b)
            elif b == room:
                out.append(a)
        return tuple(out)

    def outdoor_at(self, tick: int) -> float:
        return _trace_at(self.outdoor_temperature, tick)

    def daylight_at(self, tick: int) -> float:
        return _trace_at(self.daylight, tick)


def _trace_at(trace, tick: int) -> float:
    if isinstance(trace, (int, float)):
        return float(trace)
    return float(trace[tick % len(trace)])


def thermal_step(room: RoomState, house: HouseModel, t_out: float,
                 neighbor_temps: tuple[float, ...], dt: int = 1) -> float:
    """Next temperature of a room.

    Outdoor pull and window coupling apply only to rooms exposed to the
    outside; an interior corridor is driven purely by its neighbors and its
    own thermostat.
    """
    p = house.params
    t = room.temperature
    delta = 0.0
    if room.outdoor_exposed:
        delta += p.k_loss * (t_out - t)
        if room.window:
            delta += p.k_win * (t_out - t)
    if room.thermostat == THERMOSTAT_HEAT:
        delta += p.g_heat
    elif room.thermostat == THERMOSTAT_COOL:
        delta -= p.g_heat
    for tn in neighbor_temps:
        delta += p.k_adj * (tn - t)
    if room.occupancy:
        delta += p.occupant_heat
    return t + delta * dt


def humidity_step(room: RoomState, house: HouseModel,
                  d_temp: float) -> float:
    """Next relative humidity given this tick's temperature change."""
    p = house.params
    rh = room.humidity - p.k_h * d_temp
    if room.humidifier:
        rh += p.g_hum
    return min(100.0, max(0.0, rh))


def luminance_of(room: RoomState, house: HouseModel,
                 daylight: float) -> float:
    """Room luminance from the base level, the blind, and the lamp."""
    p = house.params
    lux = p.l_base
    if room.blind:
        lux += min(daylight, p.l_window)
    if room.light:
        lux += p.l_lamp
    return lux


@dataclass(frozen=True)
class SourceSpec:
    """One event source.

    Modes:

    * ``bernoulli``: fires with probability ``p`` per tick; the value is
      ``value`` or drawn uniformly from ``choices``.
    * ``cov``: change-of-value reporting of a room feature
      (``temperature``/``humidity``/``luminance``); emits whenever the
      reading moved more than ``min_delta`` since the last report.
    * ``clock``: emits the tick of day every tick.
    * ``script``: emits exactly at the (tick, value) pairs of ``at``.

    ``occupancy_room``, when set, marks that room occupied for each tick the
    source fires. With ``emit_event`` false the source only drives occupancy
    and puts no event on the wire.
    """

    name: str
    sensor: str
    mode: str = "bernoulli"
    p: float = 0.0
    value: float = 1.0
    choices: tuple[float, ...] | None = None
    predicate: Cmp = Cmp.EQ
    feature: str | None = None
    min_delta: float = 1e-9
    at: tuple[tuple[int, float], ...] = ()
    occupancy_room: str | None = None
    emit_event: bool = True

    def __post_init__(self):
        if self.mode not in ("bernoulli", "cov", "clock", "script"):
            raise SimulationError(f"unknown source mode {self.mode!r}")
        if self.mode == "bernoulli" and not 0.0 <= self.p <= 1.0:
            raise SimulationError(
                f"source {self.name!r} probability must be in [0, 1]")
        if self.mode == "cov" and self.feature not in (
                "temperature", "humidity", "luminance"):
            raise SimulationError(
                f"cov source {self.name!r} needs a feature to watch")


@dataclass(frozen=True)
class Scenario:
    """A reproducible simulation setup.

    ``ruleset`` names a bundled fixture (or a file path) holding the rules,
    detector config, and base house. ``detector`` is ``off`` to only count
    conflicts or ``on`` to also enforce suppression. ``baseline_overrides``,
    when set, makes the run paired: a second arm runs with these extra house
    overrides and the same seed, and actuation deltas are reported.
    """

    id: str
    ruleset: str
    sources: tuple[SourceSpec, ...]
    horizon: int
    seed: int = 0
    detector: str = "off"
    house_overrides: dict = field(default_factory=dict)
    baseline_overrides: dict | None = None
    description: str = ""

    def __post_init__(self):
        if self.horizon < 0:
            raise SimulationError("horizon must be >= 0")
        if self.detector not in ("off", "on"):
            raise SimulationError("detector flag must be 'off' or 'on'")


@dataclass
class TraceReport:
    """Everything one simulation run produced."""

    scenario: str
    seed: int
    horizon: int
    rooms: tuple[str, ...]
    series: dict[str, dict[str, np.ndarray]]
    events: list[Event]
    conflicts: list[Conflict]
    conflict_counts: dict[str, int]
    actuations: dict[str, int]
    actuation_log: list[tuple[int, str, str, str]]  # tick, actuator, action, rule
    suppressed_actions: int = 0
    suppressed_duplicates: int = 0
    baseline_actuations: dict[str, int] | None = None

    @property
    def extra_actuations(self) -> dict[str, int]:
        """Per-actuator actuation surplus over the paired baseline arm."""
        if self.baseline_actuations is None:
            return {}
        keys = set(self.actuations) | set(self.baseline_actuations)
        return {k: self.actuations.get(k, 0) - self.baseline_actuations.get(k, 0)
                for k in sorted(keys)}


_SERIES_FIELDS = ("temperature", "humidity", "luminance", "occupancy",
                  "thermostat", "setpoint", "humidifier", "light", "blind",
                  "window", "door", "alarm")

_THERMO_CODE = {THERMOSTAT_OFF: 0, THERMOSTAT_HEAT: 1, THERMOSTAT_COOL: 2}
THERMO_NAME = {v: k for k, v in _THERMO_CODE.items()}


def _source_rng(seed: int, name: str) -> np.random.Generator:
    # Key the stream by source name so list order never matters.
    digest = hashlib.sha256(name.encode("utf-8")).digest()
    return np.random.default_rng(
        np.random.SeedSequence([seed, int.from_bytes(digest[:8], "big")]))


def apply_action(room: RoomState, actuator_kind: str, action: str,
                 step: float) -> None:
    """Mutate a room's device state according to one actuation command."""
    if actuator_kind == "thermostat":
        if action in ("on", "heat"):
            room.thermostat = THERMOSTAT_HEAT
        elif action == "cool":
            room.thermostat = THERMOSTAT_COOL
        elif action == "off":
            room.thermostat = THERMOSTAT_OFF
        elif action == "increase":
            room.thermostat = THERMOSTAT_HEAT
            room.setpoint += step
        elif action == "decrease":
            room.thermostat = THERMOSTAT_COOL
            room.setpoint -= step
        else:
            raise SimulationError(f"unsupported thermostat action {action!r}")
    elif actuator_kind == "humidifier":
        room.humidifier = _on_off(actuator_kind, action)
    elif actuator_kind == "light":
        room.light = _on_off(actuator_kind, action)
    elif actuator_kind == "blind":
        room.blind = _open_close(actuator_kind, action)
    elif actuator_kind == "window":
        room.window = _open_close(actuator_kind, action)
    elif actuator_kind == "door":
        if action in ("open", "unlock"):
            room.door = True
        elif action in ("close", "lock"):
            room.door = False
        else:
            raise SimulationError(f"unsupported door action {action!r}")
    elif actuator_kind == "alarm":
        if action in ("on", "sound", "beep", "flash"):
            room.alarm = True
        elif action == "off":
            room.alarm = False
        else:
            raise SimulationError(f"unsupported alarm action {action!r}")
    else:
        raise SimulationError(
            f"actuator kind {actuator_kind!r} has no simulation effects")


def _on_off(kind: str, action: str) -> bool:
    if action == "on":
        return True
    if action == "off":
        return False
    raise SimulationError(f"unsupported {kind} action {action!r}")


def _open_close(kind: str, action: str) -> bool:
    if action == "open":
        return True
    if action == "close":
        return False
    raise SimulationError(f"unsupported {kind} action {action!r}")


class _Run:
    """State of one simulation arm."""

    def __init__(self, scenario: Scenario, ruleset: RuleSet,
                 cfg: DetectorConfig, house: HouseModel):
        self.scenario = scenario
        self.ruleset = ruleset
        self.cfg = cfg
        self.house = house
        self.rooms = {r.name: replace(r) for r in house.rooms}
        self.initial = {r.name: replace(r) for r in house.rooms}
        self.window: DetectionWindow = new_window(cfg)
        self.events: list[Event] = []
        self.conflicts: list[Conflict] = []
        self.actuations: dict[str, int] = {}
        self.actuation_log: list[tuple[int, str, str, str]] = []
        self.suppressed_actions = 0
        self.suppressed_duplicates = 0
        self._event_seq = 0
        self._cov_last: dict[str, float] = {}
        horizon = scenario.horizon
        self.series = {
            name: {f: np.zeros(horizon) for f in _SERIES_FIELDS}
            for name in self.rooms
        }
        self._fire_masks: dict[str, np.ndarray] = {}
        self._choice_draws: dict[str, np.ndarray] = {}
        for src in scenario.sources:
            if src.mode == "bernoulli":
                rng = _source_rng(scenario.seed, src.name)
                self._fire_masks[src.name] = rng.random(horizon) < src.p
                if src.choices:
                    self._choice_draws[src.name] = rng.integers(
                        0, len(src.choices), size=horizon)
        registry = ruleset.registry
        for src in scenario.sources:
            if src.sensor not in registry.sensors:
                raise SimulationError(
                    f"source {src.name!r} uses undeclared sensor "
                    f"{src.sensor!r}")
        self._sensor = registry.sensors

    def _emit(self, src: SourceSpec, tick: int, value: float) -> Event:
        sensor = self._sensor[src.sensor]
        self._event_seq += 1
        return Event(
            id=f"e{self._event_seq}",
            sensor=sensor.id,
            time=tick,
            value=float(value),
            unit=sensor.unit,
            signature=EventSignature(sensor_kind=sensor.kind,
                                     predicate=src.predicate,
                                     location=sensor.location),
        )

    def _sample_events(self, tick: int) -> list[Event]:
        out: list[Event] = []
        for src in self.scenario.sources:
            if src.mode == "bernoulli":
                if not self._fire_masks[src.name][tick]:
                    continue
                if src.choices:
                    idx = self._choice_draws[src.name][tick]
                    value = src.choices[int(idx)]
                else:
                    value = src.value
                if src.emit_event:
                    out.append(self._emit(src, tick, value))
                if src.occupancy_room:
                    self.rooms[src.occupancy_room].occupancy = True
            elif src.mode == "clock":
                out.append(self._emit(
                    src, tick, tick % self.ruleset.day_length))
            elif src.mode == "cov":
                room = self.rooms[self._sensor[src.sensor].location]
                reading = getattr(room, src.feature)
                last = self._cov_last.get(src.name)
                if last is None or abs(reading - last) > src.min_delta:
                    self._cov_last[src.name] = reading
                    out.append(self._emit(src, tick, reading))
            elif src.mode == "script":
                for at_tick, value in src.at:
                    if at_tick == tick:
                        out.append(self._emit(src, tick, value))
                        if src.occupancy_room:
                            self.rooms[src.occupancy_room].occupancy = True
        return out

    def _suppressed_keys(self, conflicts: list[Conflict],
                         actions: list[TriggeredAction]) -> tuple[set, set]:
        """(event ids, action keys) to drop under enforcement. For a pair
        conflict the canonically later action is dropped; it is always the
        one completed by the current tick."""
        drop_events: set[str] = set()
        drop_actions: set[tuple] = set()
        if self.scenario.detector != "on":
            return drop_events, drop_actions
        current = {a.key() for a in actions}
        for conflict in conflicts:
            drop_events.update(conflict.suppressible)
            if conflict.kind is ConflictKind.C7:
                continue
            _, second = conflict.participants
            if second.key() in current:
                drop_actions.add(second.key())
        return drop_events, drop_actions

    def step(self, tick: int) -> None:
        house = self.house
        rooms = self.rooms
        for room in rooms.values():
            room.occupancy = False

        events = self._sample_events(tick)
        self.events.extend(events)

        conflicts = detect_at_tick(events, self.ruleset, self.window,
                                   self.cfg) if events else []
        self.conflicts.extend(conflicts)

        actions = [ta for e in events for ta in match_rules(e, self.ruleset)]
        drop_events, drop_actions = self._suppressed_keys(conflicts, actions)
        for ta in actions:
            if ta.event.id in drop_events:
                self.suppressed_actions += 1
                self.suppressed_duplicates += 1
                continue
            if ta.key() in drop_actions:
                self.suppressed_actions += 1
                continue
            actuator = self.ruleset.registry.actuators[ta.action.actuator]
            room = rooms.get(actuator.location)
            if room is None:
                raise SimulationError(
                    f"actuator {actuator.id!r} sits in location "
                    f"{actuator.location!r} which is not a simulated room")
            apply_action(room, actuator.kind, ta.action.action,
                         house.params.setpoint_step)
            self.actuations[actuator.id] = self.actuations.get(
                actuator.id, 0) + 1
            self.actuation_log.append(
                (tick, actuator.id, ta.action.action, ta.rule))

        t_out = house.outdoor_at(tick)
        daylight = house.daylight_at(tick)
        old_temps = {name: room.temperature for name, room in rooms.items()}
        for name, room in rooms.items():
            neighbor_temps = tuple(old_temps[n]
                                   for n in house.neighbors(name))
            new_temp = thermal_step(room, house, t_out, neighbor_temps)
            d_temp = new_temp - room.temperature
            room.temperature = new_temp
            room.humidity = humidity_step(room, house, d_temp)
            room.luminance = luminance_of(room, house, daylight)

        for name, room in rooms.items():
            rec = self.series[name]
            rec["temperature"][tick] = room.temperature
            rec["humidity"][tick] = room.humidity
            rec["luminance"][tick] = room.luminance
            rec["occupancy"][tick] = float(room.occupancy)
            rec["thermostat"][tick] = _THERMO_CODE[room.thermostat]
            rec["setpoint"][tick] = room.setpoint
            for dev in ("humidifier", "light", "blind", "window", "door",
                        "alarm"):
                rec[dev][tick] = float(getattr(room, dev))

        for actuator_id in house.momentary:
            actuator = self.ruleset.registry.actuators[actuator_id]
            room = rooms[actuator.location]
            baseline = self.initial[actuator.location]
            if actuator.kind == "thermostat":
                room.thermostat = baseline.thermostat
                room.setpoint = baseline.setpoint
            else:
                attr = actuator.kind
                setattr(room, attr, getattr(baseline, attr))

    def report(self) -> TraceReport:
        counts = {kind.value: 0 for kind in ConflictKind}
        for conflict in self.conflicts:
            counts[conflict.kind.value] += 1
        return TraceReport(
            scenario=self.scenario.id,
            seed=self.scenario.seed,
            horizon=self.scenario.horizon,
            rooms=tuple(self.rooms),
            series=self.series,
            events=self.events,
            conflicts=self.conflicts,
            conflict_counts=counts,
            actuations=dict(sorted(self.actuations.items())),
            actuation_log=self.actuation_log,
            suppressed_actions=self.suppressed_actions,
            suppressed_duplicates=self.suppressed_duplicates,
        )


def run_arm(scenario: Scenario, ruleset: RuleSet, cfg: DetectorConfig,
            house: HouseModel) -> TraceReport:
    """Run one simulation arm to its horizon and report."""
    run = _Run(scenario, ruleset, cfg, house)
    for tick in range(scenario.horizon):
        run.step(tick)
    return run.report()
