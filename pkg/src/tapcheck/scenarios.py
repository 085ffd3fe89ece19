"""Built-in simulation scenarios and fixture loading.

Eight ready-to-run experiments, each backed by a bundled ruleset fixture:

* S1: blind and lamp pulses race on one room's luminance; co-fires push the
  level outside the comfortable [200, 450] band.
* S2: occupant window commands fight the heating on a cold day; room
  temperature deviates and extra thermostat work is visible.
* S3: two rooms with sensors share a corridor thermostat with no sensor of
  its own; disagreement thrashes it between heating and cooling.
* S4: a hot day drags humidity down through the temperature coupling while
  window commands and the humidifier interact.
* S5: smoke and leak detectors owned by different controllers share one
  alarm; simultaneous detections collide on it.
* S6: the S2 house focused on counting window-versus-thermostat conflicts.
* S7: paired arms measure extra thermostat actuations when occupancy heat
  meets an evening switch-off policy.
* S8: like S7 for the humidifier through the temperature-humidity coupling.

Scenario ids, seeds, horizons, and source probabilities are plain data;
use :func:`with_probability` or ``dataclasses.replace`` to build sweeps.
"""

from dataclasses import dataclass, replace
from importlib import resources
from pathlib import Path

from .errors import ParseError, SimulationError, UnknownScenarioError
from .model import Cmp, DetectorConfig, RuleSet
from .parsing import Document, load_document
from .simulator import (
    HouseModel,
    HouseParams,
    RoomState,
    Scenario,
    SourceSpec,
    TraceReport,
    run_arm,
)

_PARAM_FIELDS = {f for f in HouseParams.__dataclass_fields__}
_ROOM_DEVICE_DEFAULTS = {
    "thermostat": "off", "setpoint": 70.0, "humidifier": False,
    "light": False, "blind": False, "window": False, "door": False,
    "alarm": False,
}


def parse_house(raw: dict, registry) -> HouseModel:
    """Validate the ``house`` section of a fixture document."""
    if not isinstance(raw, dict):
        raise ParseError("house must be a mapping", path="house")
    rooms = []
    for i, entry in enumerate(raw.get("rooms") or []):
        p = f"house.rooms[{i}]"
        if not isinstance(entry, dict) or "id" not in entry:
            raise ParseError("room needs an id", path=p)
        name = entry["id"]
        if name not in registry.locations:
            raise ParseError(f"room {name!r} is not a declared location",
                             path=p)
        kwargs = {
            "name": name,
            "outdoor_exposed": bool(entry.get("exposed", True)),
            "temperature": float(entry.get("temperature", 70.0)),
            "humidity": float(entry.get("humidity", 50.0)),
            "occupancy": bool(entry.get("occupancy", False)),
        }
        for dev, default in _ROOM_DEVICE_DEFAULTS.items():
            value = entry.get(dev, default)
            if isinstance(default, bool):
                value = bool(value)
            elif isinstance(default, float):
                value = float(value)
            kwargs[dev] = value
        rooms.append(RoomState(**kwargs))

    params_raw = raw.get("params") or {}
    unknown = set(params_raw) - _PARAM_FIELDS
    if unknown:
        raise ParseError(f"unknown house parameter(s): {sorted(unknown)}",
                         path="house.params")
    params = HouseParams(**{k: float(v) for k, v in params_raw.items()})

    adjacency = []
    for i, pair in enumerate(raw.get("adjacency") or []):
        if not isinstance(pair, list) or len(pair) != 2:
            raise ParseError("adjacency entry must be [roomA, roomB]",
                             path=f"house.adjacency[{i}]")
        adjacency.append((pair[0], pair[1]))

    outdoor = raw.get("outdoor") or {}
    temperature = outdoor.get("temperature", 70.0)
    daylight = outdoor.get("daylight", 300.0)
    if isinstance(temperature, list):
        temperature = tuple(float(v) for v in temperature)
    if isinstance(daylight, list):
        daylight = tuple(float(v) for v in daylight)

    momentary = frozenset(raw.get("momentary") or [])
    for actuator_id in momentary:
        if actuator_id not in registry.actuators:
            raise ParseError(
                f"momentary actuator {actuator_id!r} is not declared",
                path="house.momentary")

    return HouseModel(rooms=tuple(rooms), adjacency=tuple(adjacency),
                      params=params, outdoor_temperature=temperature,
                      daylight=daylight, momentary=momentary)


@dataclass(frozen=True)
class Bundle:
    """A loaded fixture: ruleset, detector config, house, and raw text."""

    ruleset: RuleSet
    config: DetectorConfig
    house: HouseModel
    text: str


def fixture_text(name: str) -> str:
    """Raw YAML of a bundled fixture, or of a file path."""
    candidate = Path(name)
    if candidate.suffix in (".yaml", ".yml") and candidate.exists():
        return candidate.read_text(encoding="utf-8")
    ref = resources.files("tapcheck.fixtures").joinpath(f"{name}.yaml")
    if not ref.is_file():
        raise UnknownScenarioError(
            f"no bundled fixture or file named {name!r}")
    return ref.read_text(encoding="utf-8")


def load_bundle(name: str) -> Bundle:
    text = fixture_text(name)
    doc: Document = load_document(text)
    if doc.house is None:
        raise SimulationError(f"fixture {name!r} has no house section")
    house = parse_house(doc.house, doc.ruleset.registry)
    return Bundle(ruleset=doc.ruleset, config=doc.config, house=house,
                  text=text)


def _override_house(house: HouseModel, overrides: dict) -> HouseModel:
    """Apply {param: value} overrides onto the house physics parameters;
    an ``outdoor_temperature``/``daylight`` key replaces the trace."""
    if not overrides:
        return house
    params_kwargs = {}
    house_kwargs = {}
    for key, value in overrides.items():
        if key in _PARAM_FIELDS:
            params_kwargs[key] = value
        elif key in ("outdoor_temperature", "daylight"):
            house_kwargs[key] = value
        else:
            raise SimulationError(f"unknown house override {key!r}")
    if params_kwargs:
        house_kwargs["params"] = replace(house.params, **params_kwargs)
    return replace(house, **house_kwargs)


def run_scenario(scenario: Scenario, ruleset: RuleSet | None = None,
                 cfg: DetectorConfig | None = None) -> TraceReport:
    """Run a scenario to its horizon and report.

    The ruleset and detector config default to the scenario's fixture. For
    paired scenarios the baseline arm runs with the same seed and the extra
    house overrides, and the report carries its actuation counts.
    """
    bundle = load_bundle(scenario.ruleset)
    ruleset = ruleset if ruleset is not None else bundle.ruleset
    cfg = cfg if cfg is not None else bundle.config
    house = _override_house(bundle.house, scenario.house_overrides)
    report = run_arm(scenario, ruleset, cfg, house)
    if scenario.baseline_overrides is not None:
        baseline_house = _override_house(house, scenario.baseline_overrides)
        baseline = run_arm(scenario, ruleset, cfg, baseline_house)
        report.baseline_actuations = baseline.actuations
    return report


_SOURCE_FIELDS = set(SourceSpec.__dataclass_fields__)


def parse_sources(raw: list, registry) -> tuple[SourceSpec, ...]:
    """Validate the ``sources`` section of a scenario document."""
    out = []
    for i, entry in enumerate(raw or []):
        p = f"sources[{i}]"
        if not isinstance(entry, dict):
            raise ParseError("source must be a mapping", path=p)
        unknown = set(entry) - _SOURCE_FIELDS
        if unknown:
            raise ParseError(f"unknown source key(s): {sorted(unknown)}",
                             path=p)
        kwargs = dict(entry)
        for key in ("name", "sensor"):
            if key not in kwargs:
                raise ParseError(f"source needs a {key!r}", path=p)
        if kwargs["sensor"] not in registry.sensors:
            raise ParseError(
                f"source {kwargs['name']!r} uses undeclared sensor "
                f"{kwargs['sensor']!r}", path=p)
        if "predicate" in kwargs:
            kwargs["predicate"] = Cmp(kwargs["predicate"])
        if "choices" in kwargs and kwargs["choices"] is not None:
            kwargs["choices"] = tuple(float(v) for v in kwargs["choices"])
        if "at" in kwargs:
            kwargs["at"] = tuple((int(t), float(v)) for t, v in kwargs["at"])
        out.append(SourceSpec(**kwargs))
    return tuple(out)


def load_scenario_file(path: str) -> Scenario:
    """Load a user scenario: one document holding the ruleset, detector
    config, house, event sources, and a ``scenario`` section with the run
    metadata (id, horizon, and optional seed/detector/baseline)."""
    doc = load_document(fixture_text(path))
    if doc.scenario is None:
        raise SimulationError(f"{path} has no scenario section")
    if doc.house is None:
        raise SimulationError(f"{path} has no house section")
    meta = doc.scenario
    unknown = set(meta) - {"id", "horizon", "seed", "detector",
                           "baseline_overrides", "description"}
    if unknown:
        raise ParseError(f"unknown scenario key(s): {sorted(unknown)}",
                         path="scenario")
    for key in ("id", "horizon"):
        if key not in meta:
            raise ParseError(f"scenario needs {key!r}", path="scenario")
    return Scenario(
        id=str(meta["id"]),
        ruleset=path,
        sources=parse_sources(doc.sources, doc.ruleset.registry),
        horizon=int(meta["horizon"]),
        seed=int(meta.get("seed", 0)),
        detector=str(meta.get("detector", "off")),
        baseline_overrides=meta.get("baseline_overrides"),
        description=str(meta.get("description", "")),
    )


def with_probability(scenario: Scenario, source_name: str,
                     p: float) -> Scenario:
    """A copy of the scenario with one source's firing probability changed."""
    sources = []
    found = False
    for src in scenario.sources:
        if src.name == source_name:
            sources.append(replace(src, p=p))
            found = True
        else:
            sources.append(src)
    if not found:
        raise SimulationError(f"no source named {source_name!r}")
    return replace(scenario, sources=tuple(sources))


def _s1(seed: int) -> Scenario:
    return Scenario(
        id="S1",
        ruleset="s1_luminance",
        sources=(
            SourceSpec(name="blind_taps", sensor="app1", p=0.10),
            SourceSpec(name="motion", sensor="motion1", p=0.10,
                       occupancy_room="room1"),
        ),
        horizon=500,
        seed=seed,
        description="blind and lamp pulses race on room luminance",
    )


def _s2(seed: int) -> Scenario:
    return Scenario(
        id="S2",
        ruleset="s2_window_thermostat",
        sources=(
            SourceSpec(name="window_taps", sensor="app1", p=0.10,
                       choices=(1.0, 0.0)),
            SourceSpec(name="room_temp", sensor="temp1", mode="cov",
                       feature="temperature"),
        ),
        horizon=500,
        seed=seed,
        description="window commands fight the heating on a cold day",
    )


def _s3(seed: int) -> Scenario:
    return Scenario(
        id="S3",
        ruleset="s3_corridor",
        sources=(
            SourceSpec(name="temp_room1", sensor="temp1", mode="cov",
                       feature="temperature"),
            SourceSpec(name="temp_room2", sensor="temp2", mode="cov",
                       feature="temperature"),
            SourceSpec(name="crowd_room2", sensor="occ2", p=0.4,
                       occupancy_room="room2", emit_event=False),
        ),
        horizon=500,
        seed=seed,
        description="two rooms thrash a shared corridor thermostat",
    )


def _s4(seed: int) -> Scenario:
    return Scenario(
        id="S4",
        ruleset="s4_humidity",
        sources=(
            SourceSpec(name="window_taps", sensor="app1", p=0.05,
                       choices=(1.0, 0.0)),
            SourceSpec(name="room_humidity", sensor="hum1", mode="cov",
                       feature="humidity"),
        ),
        horizon=500,
        seed=seed,
        description="temperature-humidity coupling pulls the humidifier in",
    )


def _s5(seed: int) -> Scenario:
    return Scenario(
        id="S5",
        ruleset="s5_alarm",
        sources=(
            SourceSpec(name="smoke", sensor="smoke1", p=0.05),
            SourceSpec(name="leak", sensor="leak1", p=0.07),
        ),
        horizon=2000,
        seed=seed,
        description="smoke and leak detections collide on a shared alarm",
    )


def _s6(seed: int) -> Scenario:
    return Scenario(
        id="S6",
        ruleset="s2_window_thermostat",
        sources=(
            SourceSpec(name="window_taps", sensor="app1", p=0.10,
                       choices=(1.0, 0.0)),
            SourceSpec(name="room_temp", sensor="temp1", mode="cov",
                       feature="temperature"),
        ),
        horizon=2000,
        seed=seed,
        description="counting window-versus-thermostat collisions",
    )


def _s7(seed: int) -> Scenario:
    return Scenario(
        id="S7",
        ruleset="s7_thermostat_management",
        sources=(
            SourceSpec(name="crowd", sensor="occ1", p=0.5,
                       occupancy_room="room1", emit_event=False),
            SourceSpec(name="wall_clock", sensor="clock1", mode="clock"),
            SourceSpec(name="room_temp", sensor="temp1", mode="cov",
                       feature="temperature"),
        ),
        horizon=2000,
        seed=seed,
        house_overrides={"occupant_heat": 0.3},
        baseline_overrides={"occupant_heat": 0.0},
        description="occupancy heat versus an evening thermostat policy",
    )


def _s8(seed: int) -> Scenario:
    return Scenario(
        id="S8",
        ruleset="s8_humidifier_management",
        sources=(
            SourceSpec(name="crowd", sensor="occ1", p=0.5,
                       occupancy_room="room1", emit_event=False),
            SourceSpec(name="wall_clock", sensor="clock1", mode="clock"),
            SourceSpec(name="room_humidity", sensor="hum1", mode="cov",
                       feature="humidity"),
        ),
        horizon=2000,
        seed=seed,
        house_overrides={"occupant_heat": 0.3},
        baseline_overrides={"occupant_heat": 0.0},
        description="occupancy humidity impact versus an evening policy",
    )


_BUILDERS = {"S1": _s1, "S2": _s2, "S3": _s3, "S4": _s4, "S5": _s5,
             "S6": _s6, "S7": _s7, "S8": _s8}


def builtin_scenarios(seed: int = 0) -> list[Scenario]:
    """The eight built-in scenarios, S1 through S8."""
    return [build(sid, seed) for sid in sorted(_BUILDERS)]


def build(scenario_id: str, seed: int = 0) -> Scenario:
    """One built-in scenario by id."""
    builder = _BUILDERS.get(scenario_id)
    if builder is None:
        raise UnknownScenarioError(
            f"unknown scenario {scenario_id!r}; expected one of "
            f"{sorted(_BUILDERS)}")
    return builder(seed)
