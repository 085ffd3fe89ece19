"""Policy checks and the tick-by-tick detection loop."""

import pytest

from conftest import build_home, ev
from tapcheck.detector import (
    ConflictKind,
    check_c1,
    check_c2,
    check_c3,
    check_c4,
    check_c5,
    check_c6,
    check_c7,
    detect_at_tick,
    match_rules,
    new_window,
)
from tapcheck.errors import OutOfOrderTickError, UnknownSensorKindError


def seeded(rs, cfg, events):
    """A window loaded with the events' firings, everything fresh."""
    window = new_window(cfg)
    actions = [ta for e in events for ta in match_rules(e, rs)]
    window.seed(events, actions)
    return window


def kinds_of(conflicts):
    return sorted(c.kind.value for c in conflicts)


class TestMatchRules:
    def test_single_match(self):
        rs, _ = build_home(
            sensors=[("t1", "temperature", "F", "room1")],
            actuators=[("th1", "thermostat", "room1",
                        ("increase", "decrease", "off"))],
            controllers=["hvac"], features=["temperature@room1"],
            rules=[("r1", "hvac", ("temperature", "<", 65),
                    ("th1", "increase", ["temperature@room1"]))])
        out = match_rules(ev(rs, "e1", "t1", 0, 60), rs)
        assert [ta.rule for ta in out] == ["r1"]
        assert out[0].controller == "hvac"
        assert out[0].time == 0

    def test_no_match(self):
        rs, _ = build_home(
            sensors=[("t1", "temperature", "F", "room1")],
            actuators=[("th1", "thermostat", "room1", ("increase",))],
            controllers=["hvac"], features=["temperature@room1"],
            rules=[("r1", "hvac", ("temperature", "<", 65),
                    ("th1", "increase", ["temperature@room1"]))])
        assert match_rules(ev(rs, "e1", "t1", 0, 70), rs) == []

    def test_declaration_order_preserved(self):
        rules = [(f"r{i}", "hvac", ("temperature", "<", 50 + 10 * i),
                  ("th1", "increase", ["temperature@room1"]))
                 for i in range(10)]
        rs, _ = build_home(
            sensors=[("t1", "temperature", "F", "room1")],
            actuators=[("th1", "thermostat", "room1", ("increase",))],
            controllers=["hvac"], features=["temperature@room1"],
            rules=rules)
        out = match_rules(ev(rs, "e1", "t1", 0, 115), rs)
        # 115 matches exactly three of the ten rules, declaration order.
        assert [ta.rule for ta in out] == ["r7", "r8", "r9"]

    def test_unknown_kind_raises(self):
        rs, _ = build_home(
            sensors=[("t1", "temperature", "F", "room1")],
            actuators=[("th1", "thermostat", "room1", ("increase",))],
            controllers=["hvac"], features=["temperature@room1"], rules=[])
        bogus = ev(rs, "e1", "t1", 0, 60)
        bogus = type(bogus)(id="e2", sensor="t1", time=0, value=1.0,
                            unit="x", signature=type(bogus.signature)(
                                "pressure", bogus.signature.predicate,
                                "room1"))
        with pytest.raises(UnknownSensorKindError):
            match_rules(bogus, rs)


class TestC1:
    def test_two_controllers_one_alarm(self, alarm_home):
        rs, cfg = alarm_home
        events = [ev(rs, "e1", "smoke1", 7, 1), ev(rs, "e2", "leak1", 7, 1)]
        out = check_c1(seeded(rs, cfg, events), cfg)
        assert len(out) == 1
        assert out[0].tick == 7
        a, b = out[0].participants
        assert {a.controller, b.controller} == {"fire_ctrl", "water_ctrl"}

    def test_same_controller_is_fine(self):
        rs, cfg = build_home(
            sensors=[("smoke1", "smoke", "bool", "room1"),
                     ("leak1", "leak", "bool", "room1")],
            actuators=[("alarm1", "alarm", "room1", ("sound",))],
            controllers=["home"], features=["alert@room1"],
            rules=[("r_smoke", "home", ("smoke", "==", 1),
                    ("alarm1", "sound", ["alert@room1"])),
                   ("r_leak", "home", ("leak", "==", 1),
                    ("alarm1", "sound", ["alert@room1"]))])
        events = [ev(rs, "e1", "smoke1", 7, 1), ev(rs, "e2", "leak1", 7, 1)]
        assert check_c1(seeded(rs, cfg, events), cfg) == []

    def test_elevator_door_lock_vs_unlock(self):
        rs, cfg = build_home(
            sensors=[("motion_e", "motion", "bool", "elevator"),
                     ("alarm_s", "alarm_state", "bool", "building")],
            actuators=[("door_e", "door", "elevator", ("lock", "unlock"))],
            controllers=["cab_ctrl", "safety_ctrl"],
            features=["access@elevator"],
            rules=[("r_keep_open", "cab_ctrl", ("motion", "==", 1),
                    ("door_e", "unlock", ["access@elevator"])),
                   ("r_lockdown", "safety_ctrl", ("alarm_state", "==", 1),
                    ("door_e", "lock", ["access@elevator"]))],
            relations={"door": [("lock", "unlock", "opposite")]})
        events = [ev(rs, "e1", "motion_e", 4, 1), ev(rs, "e2", "alarm_s", 4, 1)]
        out = check_c1(seeded(rs, cfg, events), cfg)
        assert len(out) == 1

    def test_different_tick_not_simultaneous(self, alarm_home):
        rs, cfg = alarm_home
        events = [ev(rs, "e1", "smoke1", 7, 1), ev(rs, "e2", "leak1", 9, 1)]
        assert check_c1(seeded(rs, cfg, events), cfg) == []

    def test_single_event_two_controllers(self):
        # One physical event routed to rules in two controllers still
        # counts: the actuator sees two simultaneous commands.
        rs, cfg = build_home(
            sensors=[("smoke1", "smoke", "bool", "room1")],
            actuators=[("alarm1", "alarm", "room1", ("sound", "flash"))],
            controllers=["a", "b"], features=["alert@room1"],
            rules=[("r1", "a", ("smoke", "==", 1),
                    ("alarm1", "sound", ["alert@room1"])),
                   ("r2", "b", ("smoke", "==", 1),
                    ("alarm1", "flash", ["alert@room1"]))])
        out = check_c1(seeded(rs, cfg, [ev(rs, "e1", "smoke1", 0, 1)]), cfg)
        assert len(out) == 1


def window_thermostat_home(**kwargs):
    return build_home(
        sensors=[("occ1", "motion", "bool", "room1"),
                 ("t1", "temperature", "F", "room1")],
        actuators=[("window1", "window", "room1", ("open", "close")),
                   ("th1", "thermostat", "room1", ("heat", "off"))],
        controllers=["ctrl_a", "ctrl_b"],
        features=["temperature@room1", "luminance@room1"],
        rules=[("r_vent", "ctrl_a", ("motion", "==", 1),
                ("window1", "open", ["temperature@room1"])),
               ("r_warm", "ctrl_b", ("temperature", "<", 65),
                ("th1", "heat", ["temperature@room1"]))],
        **kwargs)


class TestC2:
    def test_shared_feature_two_actuators(self):
        rs, cfg = window_thermostat_home()
        events = [ev(rs, "e1", "occ1", 3, 1), ev(rs, "e2", "t1", 3, 60)]
        out = check_c2(seeded(rs, cfg, events), cfg)
        assert len(out) == 1

    def test_unrelated_features_no_conflict(self):
        rs, cfg = build_home(
            sensors=[("occ1", "motion", "bool", "room1"),
                     ("t1", "temperature", "F", "room1")],
            actuators=[("light1", "light", "room1", ("on", "off")),
                       ("th1", "thermostat", "room1", ("heat", "off"))],
            controllers=["ctrl_a", "ctrl_b"],
            features=["temperature@room1", "luminance@room1"],
            rules=[("r_light", "ctrl_a", ("motion", "==", 1),
                    ("light1", "on", ["luminance@room1"])),
                   ("r_warm", "ctrl_b", ("temperature", "<", 65),
                    ("th1", "heat", ["temperature@room1"]))])
        events = [ev(rs, "e1", "occ1", 3, 1), ev(rs, "e2", "t1", 3, 60)]
        assert check_c2(seeded(rs, cfg, events), cfg) == []

    def test_dependent_feature_chain(self):
        rs, cfg = build_home(
            sensors=[("occ1", "motion", "bool", "room1"),
                     ("h1", "humidity", "pct", "room1")],
            actuators=[("window1", "window", "room1", ("open", "close")),
                       ("hum1", "humidifier", "room1", ("on", "off"))],
            controllers=["ctrl_a", "ctrl_b"],
            features=["temperature@room1", "humidity@room1"],
            rules=[("r_vent", "ctrl_a", ("motion", "==", 1),
                    ("window1", "open", ["temperature@room1"])),
                   ("r_hum", "ctrl_b", ("humidity", "<", 45),
                    ("hum1", "on", ["humidity@room1"]))],
            edges=[("temperature@room1", "humidity@room1")])
        events = [ev(rs, "e1", "occ1", 3, 1), ev(rs, "e2", "h1", 3, 40)]
        out = check_c2(seeded(rs, cfg, events), cfg)
        assert len(out) == 1


def corridor_home():
    return build_home(
        sensors=[("t1", "temperature", "F", "room1"),
                 ("t2", "temperature", "F", "room2")],
        actuators=[("th_c", "thermostat", "corridor",
                    ("increase", "decrease", "off"))],
        controllers=["hvac"],
        features=["temperature@corridor"],
        rules=[("r_up", "hvac", ("temperature", "<", 66, "room1"),
                ("th_c", "increase", ["temperature@corridor"])),
               ("r_down", "hvac", ("temperature", ">", 70, "room2"),
                ("th_c", "decrease", ["temperature@corridor"]))],
        relations={"thermostat": [("increase", "decrease", "opposite"),
                                  ("increase", "off", "different"),
                                  ("decrease", "off", "different")]},
        classes=[[("temperature", "==", "room1"),
                  ("temperature", "==", "room2")]])


class TestC3:
    def test_corridor_tug_of_war(self):
        rs, cfg = corridor_home()
        events = [ev(rs, "e1", "t1", 10, 60), ev(rs, "e2", "t2", 12, 75)]
        out = check_c3(seeded(rs, cfg, events), cfg)
        assert len(out) == 1
        assert out[0].tick == 12

    def test_repeated_command_within_window(self):
        rs, cfg = build_home(
            sensors=[("t1", "temperature", "F", "room1"),
                     ("t2", "temperature", "F", "room1")],
            actuators=[("th1", "thermostat", "room1", ("increase", "off"))],
            controllers=["hvac", "hvac2"],
            features=["temperature@room1"],
            rules=[("r_a", "hvac", ("temperature", "<", 65),
                    ("th1", "increase", ["temperature@room1"])),
                   ("r_b", "hvac2", ("temperature", "<", 70),
                    ("th1", "increase", ["temperature@room1"]))])
        events = [ev(rs, "e1", "t1", 0, 60), ev(rs, "e2", "t2", 3, 60)]
        out = check_c3(seeded(rs, cfg, events), cfg)
        # Both rules fire on both events. The staggered cross-rule pairs
        # conflict (same command repeated on one actuator); same-event and
        # same-rule pairings do not.
        assert all(c.kind is ConflictKind.C3 for c in out)
        assert len(out) == 2

    def test_different_actuators_not_c3(self):
        rs, cfg = build_home(
            sensors=[("t1", "temperature", "F", "room1"),
                     ("t2", "temperature", "F", "room1")],
            actuators=[("th1", "thermostat", "room1", ("increase",)),
                       ("th2", "thermostat", "room1", ("decrease",))],
            controllers=["hvac"], features=["temperature@room1"],
            rules=[("r_a", "hvac", ("temperature", "<", 65),
                    ("th1", "increase", ["temperature@room1"])),
                   ("r_b", "hvac", ("temperature", "<", 70),
                    ("th2", "decrease", ["temperature@room1"]))])
        events = [ev(rs, "e1", "t1", 0, 60), ev(rs, "e2", "t2", 3, 60)]
        assert check_c3(seeded(rs, cfg, events), cfg) == []

    def test_same_rule_twice_is_not_c3(self):
        rs, cfg = build_home(
            sensors=[("t1", "temperature", "F", "room1"),
                     ("t2", "temperature", "F", "room1")],
            actuators=[("th1", "thermostat", "room1", ("increase",))],
            controllers=["hvac"], features=["temperature@room1"],
            rules=[("r_a", "hvac", ("temperature", "<", 65),
                    ("th1", "increase", ["temperature@room1"]))])
        events = [ev(rs, "e1", "t1", 0, 60), ev(rs, "e2", "t2", 3, 61)]
        assert check_c3(seeded(rs, cfg, events), cfg) == []


class TestC4:
    def test_blind_and_light_oppose_on_luminance(self):
        rs, cfg = build_home(
            sensors=[("occ1", "motion", "bool", "room1"),
                     ("occ2", "motion", "bool", "room1")],
            actuators=[("blind1", "blind", "room1", ("open", "close")),
                       ("light1", "light", "room1", ("on", "off"))],
            controllers=["home"],
            features=["luminance@room1"],
            rules=[("r_blind", "home", ("motion", "==", 1),
                    ("blind1", "open", ["luminance@room1"])),
                   ("r_light", "home", ("motion", "==", 0),
                    ("light1", "off", ["luminance@room1"]))],
            relations={"blind|light": [("open", "off", "opposite")]})
        events = [ev(rs, "e1", "occ1", 0, 1), ev(rs, "e2", "occ2", 2, 0)]
        out = check_c4(seeded(rs, cfg, events), cfg)
        assert len(out) == 1

    def test_opposite_but_unrelated_features(self):
        rs, cfg = build_home(
            sensors=[("occ1", "motion", "bool", "room1"),
                     ("occ2", "motion", "bool", "room1")],
            actuators=[("blind1", "blind", "room1", ("open", "close")),
                       ("light1", "light", "room1", ("on", "off"))],
            controllers=["home"],
            features=["luminance@room1", "privacy@room1"],
            rules=[("r_blind", "home", ("motion", "==", 1),
                    ("blind1", "open", ["privacy@room1"])),
                   ("r_light", "home", ("motion", "==", 0),
                    ("light1", "off", ["luminance@room1"]))],
            relations={"blind|light": [("open", "off", "opposite")]})
        events = [ev(rs, "e1", "occ1", 0, 1), ev(rs, "e2", "occ2", 2, 0)]
        assert check_c4(seeded(rs, cfg, events), cfg) == []

    def test_shared_humidifier_chain(self):
        rs, cfg = build_home(
            sensors=[("t1", "temperature", "F", "room1"),
                     ("t2", "temperature", "F", "room2")],
            actuators=[("hum1", "humidifier", "room2", ("on", "off"))],
            controllers=["home"],
            features=["humidity@room2"],
            rules=[("r_on", "home", ("temperature", ">", 75, "room1"),
                    ("hum1", "on", ["humidity@room2"])),
                   ("r_off", "home", ("temperature", "<", 72, "room2"),
                    ("hum1", "off", ["humidity@room2"]))],
            relations={"humidifier": [("on", "off", "opposite")]},
            classes=[[("temperature", "==", "room1"),
                      ("temperature", "==", "room2")]])
        events = [ev(rs, "e1", "t1", 5, 78), ev(rs, "e2", "t2", 7, 70)]
        out = check_c4(seeded(rs, cfg, events), cfg)
        assert len(out) == 1  # also a C3 (same actuator), reported apart


def schedule_motion_home():
    # The two rules touch different features that interact only through
    # the temperature-to-humidity edge.
    return build_home(
        sensors=[("clock1", "clock", "tick", "room1"),
                 ("occ1", "motion", "bool", "room1")],
        actuators=[("th1", "thermostat", "room1", ("heat", "off"))],
        controllers=["mgmt", "ops"],
        features=["temperature@room1", "humidity@room1"],
        rules=[("r_evening_off", "mgmt", ("clock", ">", 647),
                ("th1", "off", ["temperature@room1"])),
               ("r_comfort", "ops", ("motion", "==", 1),
                ("th1", "heat", ["humidity@room1"]))],
        relations={"thermostat": [("heat", "off", "opposite")]},
        edges=[("temperature@room1", "humidity@room1")])


class TestC5:
    def test_schedule_event_vs_motion_event(self):
        rs, cfg = schedule_motion_home()
        events = [ev(rs, "e1", "clock1", 700, 700),
                  ev(rs, "e2", "occ1", 700, 1)]
        out = check_c5(seeded(rs, cfg, events), cfg)
        assert len(out) == 1

    def test_smoke_and_co_on_one_alarm(self, alarm_home):
        rs, cfg = alarm_home
        events = [ev(rs, "e1", "smoke1", 10, 1), ev(rs, "e2", "co1", 10, 60)]
        out = check_c5(seeded(rs, cfg, events), cfg)
        assert len(out) == 1  # sound vs flash on alarm1, disjoint events

    def test_different_actuators_no_c5(self):
        rs, cfg = build_home(
            sensors=[("smoke1", "smoke", "bool", "room1"),
                     ("co1", "co", "ppm", "room1")],
            actuators=[("alarm1", "alarm", "room1", ("sound",)),
                       ("fan1", "light", "room1", ("on", "off"))],
            controllers=["home"],
            features=["alert@room1", "air@room1"],
            rules=[("r_smoke", "home", ("smoke", "==", 1),
                    ("alarm1", "sound", ["alert@room1"])),
                   ("r_co", "home", ("co", ">", 50),
                    ("fan1", "on", ["air@room1"]))])
        events = [ev(rs, "e1", "smoke1", 10, 1), ev(rs, "e2", "co1", 10, 60)]
        assert check_c5(seeded(rs, cfg, events), cfg) == []


class TestC6:
    def test_window_event_vs_thermostat_schedule(self):
        rs, cfg = build_home(
            sensors=[("wc1", "window_state", "bool", "room1"),
                     ("clock1", "clock", "tick", "room1")],
            actuators=[("window1", "window", "room1", ("open", "close")),
                       ("th1", "thermostat", "room1", ("heat", "off"))],
            controllers=["home", "mgmt"],
            features=["temperature@room1"],
            rules=[("r_open", "home", ("window_state", "==", 1),
                    ("window1", "open", ["temperature@room1"])),
                   ("r_evening_heat_off", "mgmt", ("clock", ">", 647),
                    ("th1", "off", ["temperature@room1"]))],
            relations={"window|thermostat": [("open", "off", "opposite")]})
        events = [ev(rs, "e1", "wc1", 650, 1),
                  ev(rs, "e2", "clock1", 650, 650)]
        out = check_c6(seeded(rs, cfg, events), cfg)
        assert len(out) == 1

    def test_dependent_humidity_flagged_too(self):
        rs, cfg = schedule_motion_home()
        events = [ev(rs, "e1", "clock1", 700, 700),
                  ev(rs, "e2", "occ1", 700, 1)]
        out = check_c6(seeded(rs, cfg, events), cfg)
        # heat/off are opposite and the features relate via the edge only
        assert len(out) == 1

    def test_not_simultaneous_no_c6(self):
        rs, cfg = schedule_motion_home()
        events = [ev(rs, "e1", "clock1", 700, 700),
                  ev(rs, "e2", "occ1", 703, 1)]
        assert check_c6(seeded(rs, cfg, events), cfg) == []


class TestC7:
    def home(self, tolerance=0.0):
        return build_home(
            sensors=[("t1", "temperature", "F", "room1", tolerance)],
            actuators=[("th1", "thermostat", "room1", ("increase",))],
            controllers=["hvac"], features=["temperature@room1"],
            rules=[("r1", "hvac", ("temperature", ">", 50),
                    ("th1", "increase", ["temperature@room1"]))])

    def test_repeated_reading_flagged(self):
        rs, cfg = self.home()
        events = [ev(rs, "e1", "t1", 0, 60), ev(rs, "e2", "t1", 20, 60)]
        out = check_c7(seeded(rs, cfg, events), cfg)
        assert len(out) == 1
        assert out[0].suppressible == ("e2",)
        assert out[0].tick == 20

    def test_outside_duplicate_window(self):
        rs, cfg = self.home()
        events = [ev(rs, "e1", "t1", 0, 60), ev(rs, "e2", "t1", 31, 60)]
        assert check_c7(seeded(rs, cfg, events), cfg) == []

    def test_different_values_not_duplicates(self):
        rs, cfg = self.home()
        events = [ev(rs, "e1", "t1", 0, 60), ev(rs, "e2", "t1", 20, 64)]
        assert check_c7(seeded(rs, cfg, events), cfg) == []

    def test_tolerance_widens_equality(self):
        rs, cfg = self.home(tolerance=0.5)
        events = [ev(rs, "e1", "t1", 0, 60), ev(rs, "e2", "t1", 20, 60.4)]
        assert len(check_c7(seeded(rs, cfg, events), cfg)) == 1

    def test_different_sensors_never_duplicates(self):
        rs, cfg = build_home(
            sensors=[("t1", "temperature", "F", "room1"),
                     ("t2", "temperature", "F", "room1")],
            actuators=[("th1", "thermostat", "room1", ("increase",))],
            controllers=["hvac"], features=["temperature@room1"], rules=[])
        events = [ev(rs, "e1", "t1", 0, 60), ev(rs, "e2", "t2", 20, 60)]
        assert check_c7(seeded(rs, cfg, events), cfg) == []


class TestDetectAtTick:
    def test_empty_tick_ages_window(self, alarm_home):
        rs, cfg = alarm_home
        window = new_window(cfg)
        assert detect_at_tick([], rs, window, cfg) == []
        assert window.last_tick == 0

    def test_batches_must_share_tick(self, alarm_home):
        rs, cfg = alarm_home
        window = new_window(cfg)
        events = [ev(rs, "e1", "smoke1", 1, 1), ev(rs, "e2", "leak1", 2, 1)]
        with pytest.raises(OutOfOrderTickError):
            detect_at_tick(events, rs, window, cfg)

    def test_out_of_order_tick_rejected(self, alarm_home):
        rs, cfg = alarm_home
        window = new_window(cfg)
        detect_at_tick([ev(rs, "e1", "smoke1", 5, 1)], rs, window, cfg)
        with pytest.raises(OutOfOrderTickError):
            detect_at_tick([ev(rs, "e2", "leak1", 4, 1)], rs, window, cfg)

    def test_multiple_policies_in_one_call(self):
        # One tick completes a C1 pair on the alarm and a C4 pair on the
        # blind/light; both come back from the same call.
        rs, cfg = build_home(
            sensors=[("smoke1", "smoke", "bool", "room1"),
                     ("leak1", "leak", "bool", "room1"),
                     ("occ1", "motion", "bool", "room1"),
                     ("occ2", "motion", "bool", "room1")],
            actuators=[("alarm1", "alarm", "room1", ("sound",)),
                       ("blind1", "blind", "room1", ("open", "close")),
                       ("light1", "light", "room1", ("on", "off"))],
            controllers=["fire", "water", "home"],
            features=["alert@room1", "luminance@room1"],
            rules=[("r_smoke", "fire", ("smoke", "==", 1),
                    ("alarm1", "sound", ["alert@room1"])),
                   ("r_leak", "water", ("leak", "==", 1),
                    ("alarm1", "sound", ["alert@room1"])),
                   ("r_blind", "home", ("motion", "==", 1),
                    ("blind1", "open", ["luminance@room1"])),
                   ("r_light", "home", ("motion", "==", 0),
                    ("light1", "off", ["luminance@room1"]))],
            relations={"blind|light": [("open", "off", "opposite")]})
        window = new_window(cfg)
        detect_at_tick([ev(rs, "e0", "occ1", 4, 1)], rs, window, cfg)
        out = detect_at_tick(
            [ev(rs, "e1", "smoke1", 6, 1), ev(rs, "e2", "leak1", 6, 1),
             ev(rs, "e3", "occ2", 6, 0)], rs, window, cfg)
        assert "C1" in kinds_of(out) and "C4" in kinds_of(out)

    def test_pair_reported_exactly_once_across_ticks(self):
        rs, cfg = corridor_home()
        window = new_window(cfg)
        all_out = []
        all_out += detect_at_tick([ev(rs, "e1", "t1", 10, 60)], rs, window, cfg)
        all_out += detect_at_tick([ev(rs, "e2", "t2", 12, 75)], rs, window, cfg)
        all_out += detect_at_tick([], rs, window, cfg)
        all_out += detect_at_tick([], rs, window, cfg)
        c3 = [c for c in all_out if c.kind is ConflictKind.C3]
        assert len(c3) == 1

    def test_deterministic_ordering(self, alarm_home):
        rs, cfg = alarm_home
        events = [ev(rs, "e1", "smoke1", 7, 1), ev(rs, "e2", "leak1", 7, 1),
                  ev(rs, "e3", "co1", 7, 80)]

        def run():
            window = new_window(cfg)
            return [c.key() for c in detect_at_tick(events, rs, window, cfg)]

        assert run() == run()

    def test_scope_lists_cover_window(self, alarm_home):
        rs, cfg = alarm_home
        window = new_window(cfg)
        detect_at_tick([ev(rs, "e1", "smoke1", 0, 1)], rs, window, cfg)
        detect_at_tick([ev(rs, "e2", "leak1", 1, 1)], rs, window, cfg)
        assert [e.id for e in window.scope_events] == ["e1", "e2"]
        assert len(window.scope_actions) == 2
        assert len(window.scope_controllers) == 2

    def test_eviction_respects_horizon(self, alarm_home):
        rs, cfg = alarm_home
        window = new_window(cfg)
        detect_at_tick([ev(rs, "e1", "smoke1", 0, 1)], rs, window, cfg)
        detect_at_tick([ev(rs, "e2", "smoke1", 100, 1)], rs, window, cfg)
        assert [e.id for e in window.scope_events] == ["e2"]
