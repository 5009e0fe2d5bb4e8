import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gtnmc.dsl import format_model, parse_model
from gtnmc.errors import NotUnsatisfiable, WiringError
from gtnmc.explorer import Optimal, check_reaches_optimal
from gtnmc.goals import (
    ConversionFn,
    CurrencyLedger,
    GoalSpec,
    ResourceSpec,
    check_compatible,
    find_muc,
    label_matches,
    ledger_from_dict,
    ledger_to_dict,
    wire_currency,
)
from gtnmc.scenarios import report_model

# ---------------------------------------------------------------- conversions


def test_linear_conversion():
    f = ConversionFn.linear("0.5")
    assert [f(x) for x in (0, 1, 10, 100)] == [0, 0, 5, 50]


def test_logarithmic_conversion():
    f = ConversionFn.logarithmic(rate=10, base=2)
    assert [f(x) for x in (0, 1, 10, 100)] == [0, 10, 34, 66]


def test_power_and_logistic_conversions():
    assert ConversionFn.power(rate=2, exponent=2)(3) == 18
    assert ConversionFn.logistic(rate=100, midpoint=5, steepness=1)(5) == 50


def test_bad_parameters_are_refused():
    with pytest.raises(ValueError):
        ConversionFn("cubic")
    with pytest.raises(ValueError):
        ConversionFn.logarithmic(base=1)
    with pytest.raises(ValueError):
        ConversionFn.linear(-1)


_conversions = st.one_of(
    st.integers(0, 20).map(ConversionFn.linear),
    st.tuples(st.integers(0, 5), st.sampled_from(["0.5", 1, 2])).map(lambda t: ConversionFn.power(*t)),
    st.tuples(st.integers(0, 50), st.sampled_from([2, 10, "1.5"])).map(lambda t: ConversionFn.logarithmic(*t)),
    st.tuples(st.integers(0, 100), st.integers(-5, 50), st.sampled_from(["0.1", 1])).map(
        lambda t: ConversionFn.logistic(*t)),
)


@settings(max_examples=100, deadline=None)
@given(_conversions, st.integers(0, 500), st.integers(0, 500))
def test_conversions_are_monotone(f, a, b):
    lo, hi = sorted((a, b))
    assert f(lo) <= f(hi)


# ---------------------------------------------------------------- wiring

MOVE = """\
var energy:{0..100} = 50;
var done:{0..1} = 0;
var Λ = 0;
P() = move{energy -= 10;} -> finish{done = 1;} -> Skip;
"""


def test_empty_ledger_leaves_model_unchanged():
    m = parse_model(MOVE)
    assert wire_currency(m, CurrencyLedger()) is m


def test_resource_use_is_charged():
    m = parse_model(MOVE)
    ledger = CurrencyLedger(resources=[ResourceSpec("energy", "energy", ConversionFn.power(1, 1))])
    res = check_reaches_optimal(wire_currency(m, ledger), "P()", "done == 1", "Λ", "max")
    assert isinstance(res, Optimal) and res.objective_value == -10


def test_goal_reward_is_paid_once_when_achieved():
    m = parse_model(MOVE)
    ledger = CurrencyLedger(goals=[GoalSpec("finished", "done == 1", reward=25)])
    res = check_reaches_optimal(wire_currency(m, ledger), "P()", "done == 1", "Λ", "max")
    assert res.objective_value == 25


def test_event_bound_reward():
    m = parse_model(MOVE)
    ledger = CurrencyLedger(goals=[GoalSpec("moved", "true", reward=7, event="move")])
    res = check_reaches_optimal(wire_currency(m, ledger), "P()", "done == 1", "Λ", "max")
    assert res.objective_value == 7


def test_wired_model_is_printable():
    m = parse_model(MOVE)
    ledger = CurrencyLedger(resources=[ResourceSpec("energy", "energy", ConversionFn.linear(2))])
    wired = wire_currency(m, ledger)
    assert parse_model(format_model(wired)) == wired


def test_wiring_errors():
    m = parse_model(MOVE)
    with pytest.raises(WiringError):
        wire_currency(m, CurrencyLedger(resources=[ResourceSpec("fuel", "fuel", ConversionFn.linear())]))
    with pytest.raises(WiringError):
        wire_currency(m, CurrencyLedger(goals=[GoalSpec("g", "nothing == 1", reward=1)]))
    # the resource may only be changed by its annotated events
    with pytest.raises(WiringError):
        wire_currency(m, CurrencyLedger(resources=[
            ResourceSpec("energy", "energy", ConversionFn.linear(), events=("finish",))]))


def test_label_prefix_matching():
    assert label_matches("survey.1.0", "survey.1")
    assert label_matches("survey.1", "survey.1")
    assert not label_matches("survey.10", "survey.1")


# ---------------------------------------------------------------- compatibility and cores


def test_report_goals_are_incompatible_without_avoidance():
    goals = [GoalSpec("survey", "successfulSurvey"), GoalSpec("safe", "true")]
    assert not check_compatible(report_model(False), "auvReport()", goals).compatible
    assert check_compatible(report_model(True), "auvReport()", goals).compatible


CHOICE = """\
var x:{0..3} = 0;
var y:{0..3} = 0;
P() = (a{x = 1;} -> Q()) [] (b{x = 2;} -> Q());
Q() = (c{y = 1;} -> Skip) [] (d{y = 2;} -> Skip) [] Skip;
"""


def test_core_of_two_exclusive_goals():
    goals = [GoalSpec("one", "x == 1"), GoalSpec("y", "y == 1"), GoalSpec("two", "x == 2")]
    core = find_muc(parse_model(CHOICE), "P()", goals, seed=3)
    assert [g.name for g in core] == ["one", "two"]


def test_single_impossible_goal_is_its_own_core():
    goals = [GoalSpec("one", "x == 1"), GoalSpec("never", "x == 3"), GoalSpec("y", "y == 2")]
    core = find_muc(parse_model(CHOICE), "P()", goals, seed=0)
    assert [g.name for g in core] == ["never"]


def test_compatible_set_has_no_core():
    goals = [GoalSpec("one", "x == 1"), GoalSpec("y", "y == 2")]
    with pytest.raises(NotUnsatisfiable):
        find_muc(parse_model(CHOICE), "P()", goals, seed=0)


def test_core_is_reproducible_with_a_seed():
    goals = [GoalSpec(f"g{i}", c) for i, c in enumerate(
        ["x == 1", "x == 2", "y == 1", "y == 2", "x == 1 || y == 1"])]
    m = parse_model(CHOICE)
    runs = [[g.name for g in find_muc(m, "P()", goals, seed=11)] for _ in range(3)]
    assert runs[0] == runs[1] == runs[2]


# ---------------------------------------------------------------- ledger files


def test_ledger_round_trips_through_json():
    ledger = CurrencyLedger(
        resources=[ResourceSpec("energy", "energy", ConversionFn.logarithmic("2.5", 10), ("move",))],
        goals=[GoalSpec("finished", "done == 1", reward=25, critical=True),
               GoalSpec("moved", "true", reward=3, event="move")],
    )
    data = json.loads(json.dumps(ledger_to_dict(ledger)))
    again = ledger_from_dict(data)
    assert again == ledger
    assert again.critical_goal() == ledger.goals[0].cond
