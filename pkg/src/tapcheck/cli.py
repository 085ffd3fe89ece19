"""Command-line interface.

Four subcommands share one exit-code contract: 0 when no conflicts were
found, 1 when any were, 2 on usage or input errors.

* ``check``: static misconfiguration analysis of a ruleset document.
* ``monitor``: stream an event-trace CSV through the online detector.
* ``simulate``: run a built-in or user scenario across seeds and write CSV
  reports (feature traces, event traces, conflict logs, and a summary).
* ``report``: aggregate the conflict logs in a simulate output directory.

File formats (UTF-8, LF, comma-separated, byte-stable for fixed inputs):

* event trace: ``tick,sensor,kind,predicate,value,location``
* conflict log: ``tick,kind,rule_a,rule_b,event_a,event_b,actuator,note``
* feature trace: one row per room per tick with temperature, humidity,
  luminance, occupancy, and device states.
"""

import argparse
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import scenarios as scen
from .detector import Conflict, ConflictKind, detect_at_tick, new_window
from .errors import TapcheckError, TraceError
from .model import Cmp, DetectorConfig, Event, EventSignature, RuleSet
from .parsing import load_document
from .simulator import THERMO_NAME, TraceReport
from .static import static_check

TRACE_HEADER = "tick,sensor,kind,predicate,value,location"
CONFLICT_HEADER = "tick,kind,rule_a,rule_b,event_a,event_b,actuator,note"

_DEVICE_COLUMNS = ("occupancy", "thermostat", "setpoint", "humidifier",
                   "light", "blind", "window", "door", "alarm")


def _load_doc_file(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise TapcheckError(f"cannot read {path}: {exc}") from exc
    return load_document(text)


def _apply_overrides(cfg: DetectorConfig, args) -> DetectorConfig:
    updates = {}
    if args.overlap_window is not None:
        updates["overlap_window"] = args.overlap_window
    if args.dup_window is not None:
        updates["duplicate_window"] = args.dup_window
    if args.epsilon is not None:
        updates["same_tick_epsilon"] = args.epsilon
    return replace(cfg, **updates) if updates else cfg


def parse_trace(text: str, ruleset: RuleSet) -> list[Event]:
    """Parse and validate an event-trace CSV against a ruleset registry."""
    lines = text.splitlines()
    if not lines or lines[0].strip() != TRACE_HEADER:
        raise TraceError(f"trace header must be {TRACE_HEADER!r}", line=1)
    events: list[Event] = []
    last_tick: int | None = None
    seen_sensor_tick: set[tuple[str, int]] = set()
    cmp_tokens = {c.value: c for c in Cmp}
    for lineno, raw in enumerate(lines[1:], start=2):
        if not raw.strip():
            continue
        parts = raw.split(",")
        if len(parts) != 6:
            raise TraceError("expected 6 comma-separated fields", line=lineno)
        tick_s, sensor_id, kind, predicate, value_s, location = parts
        try:
            tick = int(tick_s)
            value = float(value_s)
        except ValueError as exc:
            raise TraceError(f"bad number: {exc}", line=lineno) from exc
        if tick < 0:
            raise TraceError("tick must be >= 0", line=lineno)
        if last_tick is not None and tick < last_tick:
            raise TraceError(
                f"tick {tick} decreases after {last_tick}", line=lineno)
        last_tick = tick
        sensor = ruleset.registry.sensors.get(sensor_id)
        if sensor is None:
            raise TraceError(f"undeclared sensor {sensor_id!r}", line=lineno)
        if kind != sensor.kind:
            raise TraceError(
                f"sensor {sensor_id!r} is kind {sensor.kind!r}, not {kind!r}",
                line=lineno)
        if location != sensor.location:
            raise TraceError(
                f"sensor {sensor_id!r} sits in {sensor.location!r}, "
                f"not {location!r}", line=lineno)
        if predicate not in cmp_tokens:
            raise TraceError(f"bad predicate {predicate!r}", line=lineno)
        if (sensor_id, tick) in seen_sensor_tick:
            raise TraceError(
                f"sensor {sensor_id!r} emits twice at tick {tick}",
                line=lineno)
        seen_sensor_tick.add((sensor_id, tick))
        events.append(Event(
            id=f"e{lineno - 1}",
            sensor=sensor_id,
            time=tick,
            value=value,
            unit=sensor.unit,
            signature=EventSignature(sensor_kind=kind,
                                     predicate=cmp_tokens[predicate],
                                     location=location),
        ))
    return events


def format_event_row(event: Event) -> str:
    return (f"{event.time},{event.sensor},{event.signature.sensor_kind},"
            f"{event.signature.predicate.value},{event.value!r},"
            f"{event.signature.location}")


def format_conflict_row(conflict: Conflict) -> str:
    note = conflict.note.replace(",", ";")
    if conflict.kind is ConflictKind.C7:
        e1, e2 = conflict.participants
        return (f"{conflict.tick},{conflict.kind.value},,,"
                f"{e1.id},{e2.id},,{note}")
    a, b = conflict.participants
    actuator = a.action.actuator
    if b.action.actuator != actuator:
        actuator = f"{actuator}/{b.action.actuator}"
    return (f"{conflict.tick},{conflict.kind.value},{a.rule},{b.rule},"
            f"{a.event.id},{b.event.id},{actuator},{note}")


def _count_by_kind(conflicts) -> dict[str, int]:
    counts = {k.value: 0 for k in ConflictKind}
    for c in conflicts:
        counts[c.kind.value] += 1
    return counts


def _print_summary(counts: dict[str, int]) -> None:
    total = sum(counts.values())
    line = "  ".join(f"{kind}={counts[kind]}" for kind in sorted(counts))
    print(f"{line}  total={total}")


def cmd_check(args) -> int:
    doc = _load_doc_file(args.ruleset)
    cfg = _apply_overrides(doc.config, args)
    findings = static_check(doc.ruleset, cfg)
    by_kind: dict[str, list] = {}
    for f in findings:
        by_kind.setdefault(f.kind.value, []).append(f)
    for kind in sorted(by_kind):
        print(f"{kind}: {len(by_kind[kind])} potential conflict(s)")
        for f in by_kind[kind]:
            print(f"  {f.rule_a} + {f.rule_b}: {f.note}")
    print(f"{len(findings)} potential conflict(s)")
    return 1 if findings else 0


def cmd_monitor(args) -> int:
    doc = _load_doc_file(args.ruleset)
    cfg = _apply_overrides(doc.config, args)
    try:
        text = Path(args.trace).read_text(encoding="utf-8")
    except OSError as exc:
        raise TapcheckError(f"cannot read {args.trace}: {exc}") from exc
    events = parse_trace(text, doc.ruleset)

    window = new_window(cfg)
    conflicts: list[Conflict] = []
    batch: list[Event] = []
    lines = [CONFLICT_HEADER]
    for event in events:
        if batch and event.time != batch[0].time:
            conflicts.extend(detect_at_tick(batch, doc.ruleset, window, cfg))
            batch = []
        batch.append(event)
    if batch:
        conflicts.extend(detect_at_tick(batch, doc.ruleset, window, cfg))

    for conflict in conflicts:
        lines.append(format_conflict_row(conflict))
    log_text = "\n".join(lines) + "\n"
    if args.out:
        out_dir = Path(args.out)
        out_dir.mkdir(parents=True, exist_ok=True)
        (out_dir / "conflicts.csv").write_text(log_text, encoding="utf-8")
    else:
        sys.stdout.write(log_text)
    _print_summary(_count_by_kind(conflicts))
    return 1 if conflicts else 0


def _series_value(report: TraceReport, room: str, fieldname: str,
                  tick: int) -> str:
    value = report.series[room][fieldname][tick]
    if fieldname == "thermostat":
        return THERMO_NAME[int(value)]
    if fieldname in ("temperature", "humidity", "luminance", "setpoint"):
        return f"{value:.4f}"
    return str(int(value))


def write_report_csvs(report: TraceReport, out_dir: Path) -> None:
    seed = report.seed
    rows = ["tick,room," + ",".join(
        ("temperature", "humidity", "luminance") + _DEVICE_COLUMNS)]
    for tick in range(report.horizon):
        for room in report.rooms:
            cells = [str(tick), room]
            for fieldname in ("temperature", "humidity", "luminance",
                              *_DEVICE_COLUMNS):
                cells.append(_series_value(report, room, fieldname, tick))
            rows.append(",".join(cells))
    (out_dir / f"trace_{seed}.csv").write_text("\n".join(rows) + "\n",
                                               encoding="utf-8")

    event_rows = [TRACE_HEADER]
    event_rows += [format_event_row(e) for e in report.events]
    (out_dir / f"events_{seed}.csv").write_text("\n".join(event_rows) + "\n",
                                                encoding="utf-8")

    conflict_rows = [CONFLICT_HEADER]
    conflict_rows += [format_conflict_row(c) for c in report.conflicts]
    (out_dir / f"conflicts_{seed}.csv").write_text(
        "\n".join(conflict_rows) + "\n", encoding="utf-8")


def write_summary_csv(reports: list[TraceReport], out_dir: Path) -> None:
    actuator_ids = sorted({a for r in reports for a in r.actuations})
    extra_ids = sorted({a for r in reports for a in r.extra_actuations})
    header = (["seed"] + [k.value for k in ConflictKind]
              + ["total", "suppressed_actions", "suppressed_duplicates"]
              + [f"actuations_{a}" for a in actuator_ids]
              + [f"extra_actuations_{a}" for a in extra_ids])
    lines = [",".join(header)]
    table = []
    for r in reports:
        row = [float(r.conflict_counts[k.value]) for k in ConflictKind]
        row.append(float(sum(r.conflict_counts.values())))
        row.append(float(r.suppressed_actions))
        row.append(float(r.suppressed_duplicates))
        row += [float(r.actuations.get(a, 0)) for a in actuator_ids]
        row += [float(r.extra_actuations.get(a, 0)) for a in extra_ids]
        table.append(row)
        lines.append(",".join([str(r.seed)] + [f"{v:g}" for v in row]))
    if table:
        means = np.asarray(table).mean(axis=0)
        lines.append(",".join(["mean"] + [f"{v:g}" for v in means]))
    (out_dir / "summary.csv").write_text("\n".join(lines) + "\n",
                                         encoding="utf-8")


def cmd_simulate(args) -> int:
    if args.out is None:
        raise TapcheckError("simulate needs --out DIR")
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    if Path(args.scenario).suffix in (".yaml", ".yml"):
        scenario = scen.load_scenario_file(args.scenario)
    else:
        scenario = scen.build(args.scenario)
    base_seed = args.seed if args.seed is not None else scenario.seed
    bundle = scen.load_bundle(scenario.ruleset)
    cfg = _apply_overrides(bundle.config, args)

    (out_dir / "ruleset.yaml").write_text(bundle.text, encoding="utf-8")
    reports = []
    any_conflict = False
    for seed in range(base_seed, base_seed + args.seeds):
        report = scen.run_scenario(replace(scenario, seed=seed),
                                   bundle.ruleset, cfg)
        write_report_csvs(report, out_dir)
        reports.append(report)
        any_conflict = any_conflict or bool(report.conflicts)
    write_summary_csv(reports, out_dir)
    print(f"{scenario.id}: {len(reports)} run(s) written to {out_dir}")
    return 1 if any_conflict else 0


def cmd_report(args) -> int:
    if args.out is None:
        raise TapcheckError("report needs --out DIR")
    out_dir = Path(args.out)
    logs = sorted(out_dir.glob("conflicts_*.csv"))
    if not logs:
        raise TapcheckError(f"no conflicts_*.csv files in {out_dir}")
    counts = {k.value: 0 for k in ConflictKind}
    for log in logs:
        lines = log.read_text(encoding="utf-8").splitlines()
        if not lines or lines[0] != CONFLICT_HEADER:
            raise TapcheckError(f"{log} is not a conflict log")
        for row in lines[1:]:
            if row.strip():
                counts[row.split(",")[1]] += 1
    print(f"{len(logs)} conflict log(s) in {out_dir}")
    _print_summary(counts)
    return 1 if sum(counts.values()) else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="tapcheck",
        description="Conflict detection for trigger-action smart-home "
                    "rulesets.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--overlap-window", type=int, default=None,
                       help="override the overlapping-events window")
        p.add_argument("--dup-window", type=int, default=None,
                       help="override the duplicate-reading window")
        p.add_argument("--epsilon", type=int, default=None,
                       help="override same-tick simultaneity slack")

    p_check = sub.add_parser("check", help="static ruleset analysis")
    p_check.add_argument("--ruleset", required=True)
    common(p_check)
    p_check.set_defaults(func=cmd_check)

    p_mon = sub.add_parser("monitor", help="run a trace through the detector")
    p_mon.add_argument("--ruleset", required=True)
    p_mon.add_argument("--trace", required=True)
    p_mon.add_argument("--out", default=None,
                       help="directory for conflicts.csv (default: stdout)")
    common(p_mon)
    p_mon.set_defaults(func=cmd_monitor)

    p_sim = sub.add_parser("simulate", help="run a built-in scenario")
    p_sim.add_argument("--scenario", required=True,
                       help="scenario id S1..S8 or a scenario YAML file")
    p_sim.add_argument("--seed", type=int, default=None,
                       help="base seed (default: the scenario's own)")
    p_sim.add_argument("--seeds", type=int, default=1,
                       help="number of consecutive seeds to run")
    p_sim.add_argument("--out", required=True)
    common(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_rep = sub.add_parser("report", help="summarize simulate output")
    p_rep.add_argument("--out", required=True,
                       help="directory holding conflicts_*.csv")
    p_rep.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "seeds", 1) < 1:
        print("error: --seeds must be >= 1", file=sys.stderr)
        return 2
    try:
        return args.func(args)
    except TapcheckError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
