import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import WAYPOINTS
from gtnmc.dsl import ast as A
from gtnmc.dsl import parse_expr, parse_model
from gtnmc.dsl.parser import parse_program, parse_proc
from gtnmc.errors import EvalFault, ModelError, RangeFault, RecursionFault
from gtnmc.semantics import Config, Interpreter, canonical_key, normalize, run_deep


def interp(text: str, **kw) -> Interpreter:
    return Interpreter(parse_model(text), **kw)


def steps_of(it: Interpreter, entry: str):
    cfg = it.initial_config(parse_proc(entry))
    return cfg, it.successors(cfg)


# ---------------------------------------------------------------- conditions and programs


def test_condition_on_array_slot():
    it = interp("var visited[2]:{0..1} = [0, 1];")
    assert it.eval_cond(it.layout.init, parse_expr("visited[0] == 0"))
    assert not it.eval_cond(it.layout.init, parse_expr("visited[1] == 0"))


def test_goal_with_all_visited_and_at_final_position():
    it = interp("""
        var visited[3]:{0..1} = [1(3)];
        var currentPosition[2] = [7, 9];
        var finalPosition[2] = [7, 9];
    """)
    goal = parse_expr("(&& i:{0..2}@(visited[i] == 1)) && currentPosition[0] == finalPosition[0]"
                      " && currentPosition[1] == finalPosition[1]")
    assert it.eval_cond(it.layout.init, goal)


def test_division_by_zero_is_an_eval_fault():
    it = interp("var x = 0;")
    with pytest.raises(EvalFault):
        it.eval_cond(it.layout.init, parse_expr("1/0 == 0"))


def test_empty_program_is_identity():
    it = interp("var x = 3; var y[2] = [1, 2];")
    assert it.exec_program(it.layout.init, A.EMPTY_PROGRAM) == it.layout.init


def test_energy_bookkeeping_of_a_move():
    it = interp("""
        var position[1][2] = [10, 0];
        var currentPosition[2] = [0, 0];
        var visited[1]:{0..1} = [0];
        var energyLevel:{0..100} = 60;
    """)
    prog = parse_program("""
        var energyConsumed = dist(currentPosition, position[0]) * 1;
        energyLevel -= energyConsumed;
        currentPosition[0] = position[0][0];
        currentPosition[1] = position[0][1];
        visited[0] = 1;
    """)
    after = it.layout.as_dict(it.exec_program(it.layout.init, prog))
    assert after["energyLevel"] == 50
    assert after["currentPosition"] == [10, 0]
    assert after["visited"] == [1]


def test_out_of_range_write_is_a_range_fault():
    it = interp("var x:{0..5} = 0;")
    with pytest.raises(RangeFault):
        it.exec_program(it.layout.init, parse_program("x = 6;"))


def test_index_out_of_bounds_is_a_fault():
    it = interp("var a[2] = [0, 0];")
    with pytest.raises((EvalFault, RangeFault)):
        it.exec_program(it.layout.init, parse_program("a[2] = 1;"))


def test_rationals_are_exact_and_floored_on_store():
    it = interp("var x = 0; var y = 0;")
    out = it.exec_program(it.layout.init, parse_program("x = 7 * 0.5; y = -7 * 0.5;"))
    assert it.layout.as_dict(out) == {"x": 3, "y": -4}


def test_integer_division_and_modulo_truncate_toward_zero():
    it = interp("var a = 0; var b = 0;")
    out = it.exec_program(it.layout.init, parse_program("a = -7 / 2; b = -7 % 2;"))
    assert it.layout.as_dict(out) == {"a": -3, "b": -1}


# ---------------------------------------------------------------- steps


def test_skip_has_no_steps_and_is_terminated():
    it = interp("P() = Skip;")
    cfg, steps = steps_of(it, "P()")
    assert steps == [] and cfg.terminated


def test_disabled_guard_has_no_steps():
    it = interp("P() = [false] e{} -> Skip;")
    cfg, steps = steps_of(it, "P()")
    assert steps == [] and not cfg.terminated


def test_choice_offers_both_branches():
    it = interp("P() = (a{} -> Skip) [] (b{} -> Skip);")
    _, steps = steps_of(it, "P()")
    assert sorted(s.label for s in steps) == ["a", "b"]


def test_sequence_steps_right_only_after_left_terminates():
    it = interp("var x = 0; P() = a{x = 1;} -> Skip; b{} -> Skip;")
    cfg, steps = steps_of(it, "P()")
    assert [s.label for s in steps] == ["a"]
    nxt = it.successors(steps[0].after)
    assert [s.label for s in nxt] == ["b"]


def test_interleaving_offers_either_side():
    it = interp("P() = (a{} -> Skip) || (b{} -> Skip);")
    _, steps = steps_of(it, "P()")
    assert sorted(s.label for s in steps) == ["a", "b"]
    # after a, only b remains and the Skip on the left is dropped
    after_a = next(s.after for s in steps if s.label == "a")
    assert after_a.process == it.canon(parse_proc("b{} -> Skip"))


def test_conditional_resolves_without_an_event():
    it = interp("var x = 1; P() = if (x == 1) { yes{} -> Skip } else { no{} -> Skip };")
    _, steps = steps_of(it, "P()")
    assert [s.label for s in steps] == ["yes"]


def test_parameterised_labels_are_evaluated():
    it = interp("var v[3] = [0(3)]; go(i) = [v[i] == 0] go.i{v[i] = 1;} -> Skip; P() = go(2) [] go(0);")
    _, steps = steps_of(it, "P()")
    assert sorted(s.label for s in steps) == ["go.0", "go.2"]


def test_unguarded_recursion_contributes_nothing():
    it = interp("P() = P() [] (a{} -> Skip);")
    _, steps = steps_of(it, "P()")
    assert [s.label for s in steps] == ["a"]


def test_deep_unguarded_chain_raises_recursion_fault():
    it = interp("var n = 0; P(i) = P(i + 1);", default_bound=(-10, 10**6), recursion_limit=200)
    with pytest.raises(RecursionFault):
        run_deep(steps_of, it, "P(0)")


def test_deep_but_bounded_unfolding_is_fine():
    it = interp("P(i) = if (i < 3000) { P(i + 1) } else { done{} -> Skip };")
    cfg, steps = run_deep(steps_of, it, "P(0)")
    assert [s.label for s in steps] == ["done"]


def test_invalid_model_is_refused():
    with pytest.raises(ModelError):
        Interpreter(parse_model("P() = Q();"))


# ---------------------------------------------------------------- canonical keys


def test_equal_models_give_equal_keys():
    a = Interpreter(parse_model(WAYPOINTS)).initial_config(A.Call("main"))
    b = Interpreter(parse_model(WAYPOINTS)).initial_config(A.Call("main"))
    assert canonical_key(a) == canonical_key(b)


def test_one_slot_difference_changes_the_key():
    it = Interpreter(parse_model(WAYPOINTS))
    cfg = it.initial_config(A.Call("main"))
    vals = list(cfg.valuation)
    vals[-1] += 1
    assert canonical_key(cfg) != canonical_key(Config(tuple(vals), cfg.process))


def test_leading_skip_is_rewritten_away():
    it = interp("P() = a{} -> Skip;")
    p = parse_proc("a{} -> Skip")
    vals = it.layout.init
    assert canonical_key(Config(vals, it.canon(A.Seq(A.SKIP, p)))) == canonical_key(Config(vals, it.canon(p)))


def test_other_rewrites():
    it = interp("P() = a{} -> Skip;")
    p = it.canon(parse_proc("a{} -> Skip"))
    assert it.canon(A.Seq(A.STOP, p)) == A.STOP
    assert it.canon(A.ExternalChoice(p, p)) == p
    assert it.canon(A.Parallel(p, A.SKIP)) == p


# random process terms: rewriting in any redex order reaches the same normal form

_leaves = st.sampled_from([A.SKIP, A.STOP, A.Call("P"), A.Call("Q")])


def _terms():
    def extend(children):
        binary = st.sampled_from([A.Seq, A.Parallel, A.ExternalChoice, A.InternalChoice])
        return st.one_of(
            st.tuples(binary, children, children).map(lambda t: t[0](t[1], t[2])),
            children.map(lambda c: A.EventPrefix(A.Label("e"), A.EMPTY_PROGRAM, c)),
            children.map(lambda c: A.Guarded(A.BoolLit(True), c)),
        )

    return st.recursive(_leaves, extend, max_leaves=10)


@settings(max_examples=300, deadline=None)
@given(_terms(), st.integers(0, 2**32 - 1))
def test_rewriting_is_confluent(term, seed):
    reference = normalize(term)
    assert normalize(term, random.Random(seed)) == reference


@settings(max_examples=100, deadline=None)
@given(_terms())
def test_interpreter_canon_matches_normal_form(term):
    it = interp("P() = Skip; Q() = Stop;")
    assert it.canon(term) == normalize(term)
