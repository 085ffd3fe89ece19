"""Auditing a ruleset before a single event fires.

Loads the bundled showcase installation (three rooms and a corridor, six
controllers, a dozen rules) and prints every rule pair the static analyzer
flags, grouped by policy. No sensor data is involved: the analyzer reasons
about which triggers can be co-satisfied and what the commands would then
do to shared actuators and features.

Run: python3 demos/02_static_audit.py
"""

from tapcheck import load_document, static_check
from tapcheck.scenarios import fixture_text

doc = load_document(fixture_text("house"))
ruleset, config = doc.ruleset, doc.config

print(f"Installation: {len(ruleset.rules)} rules across "
      f"{len(ruleset.registry.controllers)} controllers, "
      f"{len(ruleset.registry.actuators)} actuators, "
      f"{len(ruleset.registry.sensors)} sensors.\n")

findings = static_check(ruleset, config)
by_kind: dict[str, list] = {}
for f in findings:
    by_kind.setdefault(f.kind.value, []).append(f)

for kind in sorted(by_kind):
    print(f"{kind}: {len(by_kind[kind])} potential conflict(s)")
    for f in by_kind[kind]:
        print(f"  {f.rule_a} + {f.rule_b}")
        print(f"      {f.note}")
    print()

pairs = {f.pair for f in findings}
print(f"{len(findings)} findings over {len(pairs)} distinct rule pairs "
      f"(out of {len(ruleset.rules) * (len(ruleset.rules) - 1) // 2} "
      "pairs total).")
print("\nEvery conflict the online detector can ever raise for this")
print("ruleset (policies C1 to C6) involves one of the pairs above;")
print("fixing them fixes the installation.")
