"""Running the built-in house scenarios.

Walks three of the bundled experiments:

* S5, the shared alarm: collisions happen when smoke and leak detections
  land on the same tick, so the count over 2000 ticks should sit near
  2000 x 0.05 x 0.07 = 7. We check that against 40 seeds.
* S1, the luminance race: a blind pulse or a lamp pulse alone keeps the
  room comfortable; a same-tick pair pushes it out of the [200, 450] lux
  band. With enforcement on, one action of each colliding pair is dropped
  and the band holds everywhere.
* S3, the corridor tug-of-war: two rooms with sensors but no thermostat
  steer a corridor thermostat in opposite directions.

Run: python3 demos/03_simulated_home.py
"""

from dataclasses import replace

import numpy as np

from tapcheck import build, run_scenario

print("S5: one alarm, two detector silos")
counts = []
for seed in range(40):
    counts.append(run_scenario(build("S5", seed=seed)).conflict_counts["C1"])
print(f"  collisions per 2000-tick run over 40 seeds: "
      f"mean {np.mean(counts):.2f}, min {min(counts)}, max {max(counts)}")
print("  analytic expectation: 2000 x 0.05 x 0.07 = 7.0\n")

print("S1: blind pulses versus lamp pulses in one room")
observe = run_scenario(build("S1", seed=3))
lum = observe.series["room1"]["luminance"]
out_of_band = int(np.sum((lum < 200) | (lum > 450)))
print(f"  watch-only: {observe.conflict_counts['C2']} collisions, "
      f"{out_of_band} ticks outside [200, 450] lux")

enforce = run_scenario(replace(build("S1", seed=3), detector="on"))
lum2 = enforce.series["room1"]["luminance"]
out2 = int(np.sum((lum2 < 200) | (lum2 > 450)))
print(f"  enforcing:  {enforce.suppressed_actions} actions dropped, "
      f"{out2} ticks outside the band\n")

print("S3: a corridor thermostat shared by two disagreeing rooms")
report = run_scenario(replace(build("S3", seed=1), horizon=400))
modes = report.series["corridor"]["thermostat"]
print(f"  conflicts: C3={report.conflict_counts['C3']} "
      f"C4={report.conflict_counts['C4']}")
print(f"  thermostat actuations: {report.actuations['thermostat_c']}, "
      f"heating ticks {int(np.sum(modes == 1))}, "
      f"cooling ticks {int(np.sum(modes == 2))}")
t = report.series["corridor"]["temperature"]
print(f"  corridor temperature wandered over "
      f"[{t.min():.1f}, {t.max():.1f}] F")
