"""The chatty-sensor story.

A thermostat rule steps the setpoint up 10 F for every reading above 50 F.
The sensor reports 60 F twice, 20 ticks apart, inside the 30-tick duplicate
window. Without suppression the controller obeys both and lands at 80 F;
with duplicate suppression the repeat is flagged as a C7 conflict and its
action dropped, leaving 70 F.

Run: python3 demos/04_duplicate_readings.py
"""

from tapcheck import Scenario, SourceSpec
from tapcheck.scenarios import load_bundle
from tapcheck.simulator import run_arm

bundle = load_bundle("c7_duplicate")
readings = SourceSpec(name="readings", sensor="temp1", mode="script",
                      at=((0, 60.0), (20, 60.0)))

for enforce in (False, True):
    scenario = Scenario(id="dup60", ruleset="c7_duplicate",
                        sources=(readings,), horizon=30,
                        detector="on" if enforce else "off")
    report = run_arm(scenario, bundle.ruleset, bundle.config, bundle.house)
    label = "suppressing duplicates" if enforce else "obeying every reading"
    setpoint = report.series["room1"]["setpoint"][-1]
    print(f"{label}:")
    print(f"  setpoint 60.0 F -> {setpoint} F, "
          f"{report.conflict_counts['C7']} duplicate flagged, "
          f"{report.suppressed_duplicates} action(s) dropped")
    for conflict in report.conflicts:
        print(f"  {conflict.note}; event {conflict.suppressible[0]} "
              "marked suppressible")
    print()

print("Same reading, same sensor, inside the window: the second command")
print("was never information, just noise that cost 10 F of overshoot.")
