import json
import random

import pytest

from corpus import random_gtn_dict
from gtnmc.dsl import ast as A
from gtnmc.dsl import format_model, parse_expr, parse_model
from gtnmc.dsl.parser import parse_program
from gtnmc.errors import ModelError
from gtnmc.explorer import Optimal, Reachable, Unreachable, check_reaches, terminating_traces
from gtnmc.gtn import (
    GtnFault,
    GtnNode,
    GtnProblem,
    NotEnabled,
    enumerate_executions,
    entry_call,
    gtn_fire,
    load_problem,
    problem_from_dict,
    solve_gtn,
    translate_gtn,
)

VARS = parse_model("var x:{0..3} = 0; var visited[2]:{0..1} = [0, 0]; var pos[2] = [0, 0];").vars


def problem(nodes, root=None, initial=None):
    nodes = {n.id: n for n in nodes}
    return GtnProblem(root or next(iter(nodes)), nodes, VARS, initial or {})


def node(nid, subs=(), guard="true", transition=""):
    return GtnNode(nid, tuple(subs), parse_expr(guard), parse_program(transition))


# ---------------------------------------------------------------- firing


def test_trivial_node_leaves_the_state_alone():
    p = problem([node("root")])
    s = p.initial_valuation()
    assert gtn_fire(p, "root", s) == s


def test_goto_node_moves_and_marks():
    p = problem([node("goto.1", guard="visited[1] == 0",
                      transition="pos[0] = 5; pos[1] = 7; visited[1] = 1;")])
    after = p.interpreter.layout.as_dict(gtn_fire(p, "goto.1", p.initial_valuation()))
    assert after["visited"] == [0, 1] and after["pos"] == [5, 7]


def test_false_guard_is_not_enabled():
    p = problem([node("goto.1", guard="visited[1] == 0")], initial={"visited": [0, 1]})
    assert gtn_fire(p, "goto.1", p.initial_valuation()) is NotEnabled
    assert not NotEnabled


def test_transition_fault_is_wrapped():
    p = problem([node("bad", transition="x = 9;")])
    with pytest.raises(GtnFault) as info:
        gtn_fire(p, "bad", p.initial_valuation())
    assert info.value.partial == ("bad",)


# ---------------------------------------------------------------- executions


def test_primitive_root_has_one_execution():
    execs = enumerate_executions(problem([node("root")]), 3)
    assert [e.nodes for e in execs] == [("root",)]


def test_repeated_sub_node():
    p = problem([node("root", subs=["s"]), node("s")])
    assert [e.nodes for e in enumerate_executions(p, 3)] == [("root",), ("s", "root"), ("s", "s", "root")]


def test_false_root_guard_gives_no_execution():
    p = problem([node("root", subs=["s"], guard="false"), node("s")])
    assert enumerate_executions(p, 4) == []


def test_execution_states_follow_the_firings():
    p = problem([node("root", subs=["inc"], guard="x == 2"), node("inc", guard="x < 3", transition="x = x + 1;")])
    (only,) = enumerate_executions(p, 5)
    assert only.nodes == ("inc", "inc", "root")
    assert [p.interpreter.layout.as_dict(s)["x"] for s in only.states] == [0, 1, 2, 2]


def test_invalid_hierarchies_are_rejected():
    with pytest.raises(ModelError):
        problem([node("a", subs=["b"]), node("b", subs=["a"])])
    with pytest.raises(ModelError):
        problem([node("a", subs=["missing"])])
    with pytest.raises(ModelError):
        problem([node("bad id")])


# ---------------------------------------------------------------- translation


def test_primitive_node_translates_to_one_guarded_event():
    m = translate_gtn(problem([node("root", guard="x < 3", transition="x = x + 1;")]))
    trans = m.proc("trans_root").body
    assert isinstance(trans, A.Guarded) and isinstance(trans.body, A.EventPrefix)
    assert m.proc("root").body == A.Call("trans_root")


def test_two_sub_nodes_give_a_repeating_choice():
    m = translate_gtn(problem([node("root", subs=["e0", "e1"]), node("e0"), node("e1")]))
    sub = m.proc("sub_root").body
    assert isinstance(sub, A.Seq)
    assert sub.left == A.InternalChoice(A.Call("e0"), A.Call("e1"))
    assert sub.right == A.InternalChoice(A.Call("sub_root"), A.SKIP)


def _mission_hierarchy() -> dict:
    positions = [(10, 0), (20, 0), (0, 10), (0, 20)]
    nodes = [{"id": "main", "subs": ["mission", "rendezvous"], "guard": "recovered == 1"},
             {"id": "mission", "subs": ["survey.0", "survey.1"]},
             {"id": "survey.0", "subs": ["goto.0", "goto.1"]},
             {"id": "survey.1", "subs": ["goto.2", "goto.3"]}]
    for i, (x, y) in enumerate(positions):
        nodes.append({
            "id": f"goto.{i}",
            "guard": f"visited[{i}] == 0 && recovered == 0",
            "transition": f"Λ -= dist(pos[0], pos[1], {x}, {y}); pos[0] = {x}; pos[1] = {y}; "
                          f"visited[{i}] = 1; Λ += 30;",
        })
    nodes.append({"id": "rendezvous", "guard": "recovered == 0",
                  "transition": "Λ -= dist(pos[0], pos[1], 0, 0); pos[0] = 0; pos[1] = 0; recovered = 1; Λ += 1000;"})
    return {
        "variables": ["var visited[4]:{0..1} = [0(4)]", "var pos[2] = [0, 0]",
                      "var recovered:{0..1} = 0", "var Λ = 0"],
        "nodes": nodes,
        "root": "main",
    }


def test_mission_hierarchy_translation_has_the_expected_processes():
    m = translate_gtn(problem_from_dict(_mission_hierarchy()))
    names = {p.name for p in m.procs}
    assert {"main", "mission", "survey_0", "survey_1", "goto_0", "rendezvous"} <= names
    assert m.proc("sub_mission").body.left == A.InternalChoice(A.Call("survey_0"), A.Call("survey_1"))
    # the emitted model is ordinary source text
    assert parse_model(format_model(m)) == m


def test_solve_mission_hierarchy_with_objective():
    p = problem_from_dict(_mission_hierarchy())
    res = solve_gtn(p, "recovered == 1 && visited[0] == 1", ("Λ", "max"))
    assert isinstance(res, Optimal)
    # the search stops as soon as the goal holds, which is right after rendezvous
    assert res.witness.labels[-1] == "rendezvous"
    assert "goto.0" in res.witness.labels


def test_trivial_plan():
    p = problem([node("root", transition="x = 1;")])
    res = solve_gtn(p, "x == 1")
    assert isinstance(res, Reachable) and res.witness.labels == ["root"]


def test_unreachable_goal():
    p = problem([node("root", transition="x = 1;")])
    assert isinstance(solve_gtn(p, "x == 2"), Unreachable)


def test_flat_problem_objective_matches_enumeration():
    data = {
        "variables": ["var done[3]:{0..1} = [0(3)]", "var budget:{0..10} = 5", "var Λ = 0"],
        "nodes": [
            {"id": "root", "subs": ["a", "b", "c"]},
            {"id": "a", "guard": "done[0] == 0 && budget >= 3", "transition": "done[0] = 1; budget -= 3; Λ += 7;"},
            {"id": "b", "guard": "done[1] == 0 && budget >= 2", "transition": "done[1] = 1; budget -= 2; Λ += 4;"},
            {"id": "c", "guard": "done[2] == 0 && budget >= 2", "transition": "done[2] = 1; budget -= 2; Λ += 5;"},
        ],
        "root": "root",
    }
    p = problem_from_dict(data)
    execs = enumerate_executions(p, 6)
    lam = lambda e: p.interpreter.layout.as_dict(e.states[-1])["Λ"]
    best = max(lam(e) for e in execs)
    res = solve_gtn(p, "true", ("Λ", "max"))
    assert res.objective_value == best == 12


def test_problem_file(tmp_path):
    path = tmp_path / "p.json"
    path.write_text(json.dumps(_mission_hierarchy()))
    p = load_problem(path)
    assert p.root == "main" and len(p.nodes) == 9


@pytest.mark.parametrize("seed", range(15))
def test_translated_runs_match_executions(seed):
    p = problem_from_dict(random_gtn_dict(random.Random(seed)))
    depth = 5
    expected = {e.nodes for e in enumerate_executions(p, depth)}
    got = terminating_traces(translate_gtn(p), entry_call(p), depth)
    assert got == expected
