from fractions import Fraction

import pytest

from gtnmc.errors import EnergyExhausted, MissionFailed
from gtnmc.explorer import Accepted, Optimal, SafetyHolds, SafetyViolated, check_global_safety, replay
from gtnmc.mission import (
    ENTRY,
    Disabled,
    GreedyPlanner,
    Vetted,
    build_mission_model,
    config_from_dict,
    initial_world,
    load_config,
    mission_goal,
    plan_mission,
    round_half_up,
    run_mission,
    scaling_profile,
    scenario_profile,
    step_environment,
    update_energy_scale,
    verification_profile,
    vet_external_plan,
    vet_greedy,
)

# ---------------------------------------------------------------- environment


class FixedRng:
    def __init__(self, *values):
        self.values = list(values)

    def random(self):
        return self.values.pop(0)


def test_calm_leg_costs_its_length():
    cfg = scenario_profile()
    w = step_environment(initial_world(cfg), 100, FixedRng(0.9), cfg)
    assert (w.energy, w.current, w.legs) == (59900, False, 1)


def test_current_doubles_consumption():
    cfg = scenario_profile()
    w = step_environment(initial_world(cfg), 100, FixedRng(0.1), cfg)
    assert (w.energy, w.current) == (59800, True)
    # it persists unless the end draw falls below the end probability
    w = step_environment(w, 100, FixedRng(0.5), cfg)
    assert (w.energy, w.current) == (59600, True)
    w = step_environment(w, 100, FixedRng(0.1), cfg)
    assert (w.energy, w.current) == (59500, False)


def test_zero_length_leg_draws_nothing():
    cfg = scenario_profile()
    w = step_environment(initial_world(cfg), 0, FixedRng(), cfg)
    assert w.energy == cfg.initial_energy and w.legs == 1


def test_leg_beyond_the_battery():
    cfg = scenario_profile(initial_energy=50)
    with pytest.raises(EnergyExhausted):
        step_environment(initial_world(cfg), 100, FixedRng(0.9), cfg)


def test_scale_update_rounds_half_up():
    assert update_energy_scale(100, 14400, 23284) == 162
    assert update_energy_scale(162, 27216, 17411) == 104
    assert round_half_up(Fraction(5, 2)) == 3
    assert round_half_up(Fraction(7, 2)) == 4
    with pytest.raises(ValueError):
        update_energy_scale(100, 0, 5)


# ---------------------------------------------------------------- planning model


def test_scenario_model_carries_the_area_rewards():
    cfg = scenario_profile()
    assert [a.reward for a in cfg.areas] == [22807, 51918, 31313]
    text = str(build_mission_model(cfg))
    for r in (22807, 51918, 31313):
        assert str(r) in text


def test_initial_scenario_plan():
    res = plan_mission(scenario_profile())
    assert isinstance(res, Optimal)
    assert res.witness.labels == ["survey.1.0", "survey.0.0", "survey.2.0", "rendezvous"]


def test_config_round_trip(tmp_path):
    import json

    cfg = verification_profile()
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg.to_dict()))
    again = load_config(path)
    assert again.to_dict() == cfg.to_dict()
    assert config_from_dict(cfg.to_dict()).areas == cfg.areas


def test_bad_configs_are_refused():
    with pytest.raises(ValueError):
        scenario_profile(level=3)
    with pytest.raises(ValueError):
        scenario_profile(current_probability=2)


@pytest.mark.parametrize("name,cond", [
    ("energy", "energyNonNegative"),
    ("obstacles", "dontRunIntoObstacle"),
    ("surfacing", "safeSurfacing"),
])
def test_safety_properties_hold(name, cond):
    m = build_mission_model(verification_profile())
    assert isinstance(check_global_safety(m, ENTRY, cond), SafetyHolds)


def test_obstacle_property_fails_without_the_guard():
    cfg = verification_profile(obstacle_guard=False)
    res = check_global_safety(build_mission_model(cfg), ENTRY, "dontRunIntoObstacle")
    assert isinstance(res, SafetyViolated)


# ---------------------------------------------------------------- simulation


def test_scenario_run_replans_towards_lr():
    log = run_mission(scenario_profile())
    assert log.outcome == "recovered"
    assert log.scales == [100, 162, 104]
    first = log.replans()[0]
    assert first[1] == "plan-invalid"
    assert first[2][0].startswith("survey.2.")
    assert not any(label.startswith("survey.0") for label in first[2])
    assert log.plans[-1][2][-1] == "rendezvous"
    assert log.world.visited == (0, 1, 1)


def test_calm_water_run_surveys_everything():
    # at level 2 the expected cost is the exact route length, so the scale never moves
    cfg = scaling_profile(3, level=2)
    log = run_mission(cfg)
    assert log.outcome == "recovered"
    assert log.world.visited == (1, 1, 1)
    assert log.replans() == []
    assert log.scales == [100, 100, 100, 100]


def test_same_seed_gives_identical_logs():
    a = run_mission(scenario_profile(seed=5)).text()
    b = run_mission(scenario_profile(seed=5)).text()
    assert a == b


def test_mission_without_energy_fails_to_plan():
    with pytest.raises(MissionFailed) as info:
        run_mission(scenario_profile(initial_energy=100))
    assert info.value.log.outcome == "no-plan"


def test_log_lines_are_numbered_by_cycle():
    lines = run_mission(scenario_profile()).text().splitlines()
    assert lines[0].startswith("001 plan reason=initial")
    assert lines[-1].startswith("003 done outcome=recovered")


# ---------------------------------------------------------------- vetting


def test_optimal_plan_is_vetted():
    cfg = scenario_profile()
    m = build_mission_model(cfg)
    plan = plan_mission(cfg, model=m).witness.labels
    res = vet_external_plan(m, ENTRY, plan, goal=mission_goal(cfg))
    assert isinstance(res, Vetted) and res.plan == tuple(plan)


def test_plan_that_does_not_replay_is_disabled():
    cfg = scenario_profile()
    m = build_mission_model(cfg)
    res = vet_external_plan(m, ENTRY, ["survey.0.0", "survey.0.1", "rendezvous"])
    assert isinstance(res, Disabled)
    assert ("survey.0.0", "survey.0.1", "rendezvous") in res.disabled
    with pytest.raises(ValueError):
        vet_external_plan(m, ENTRY, ("survey.0.0", "survey.0.1", "rendezvous"), res.disabled)


def test_greedy_plan_beyond_the_battery_is_disabled_then_shortened():
    cfg = scenario_profile(initial_energy=30000)
    vetted, disabled, proposals = vet_greedy(cfg)
    assert disabled and isinstance(vetted, Vetted)
    assert len(vetted.plan) < len(proposals[0])
    assert isinstance(replay(build_mission_model(cfg), ENTRY, vetted.plan), Accepted)


def test_greedy_never_repeats_a_disabled_plan():
    cfg = scenario_profile()
    planner = GreedyPlanner(cfg)
    first = planner.propose()
    assert planner.propose(frozenset({first})) != first
    every = frozenset(planner.candidates())
    assert planner.propose(every) is None
